//! Forward- and reverse-mode differentiation of computation graphs whose
//! sources are differentiable functions of an input point.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AdapterError;
use crate::algebra::{Bc, Counted, OpCounters, Real, Semiring};
use crate::engine::{forward, forward_backward_with, CheckpointPolicy, EngineError};
use crate::gen::{random_graph, GraphShape};
use crate::graph::{ComputationGraph, GraphDoc};

/// The function of the inputs `x` that a source holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceTag {
    Const {
        value: f64,
    },
    Var {
        input: usize,
    },
    /// `bias + Σ coeffs[k]·x_k`
    Affine {
        coeffs: Vec<f64>,
        bias: f64,
    },
    Exp {
        input: usize,
    },
    Sin {
        input: usize,
    },
    Cos {
        input: usize,
    },
    Log {
        input: usize,
    },
    Sqrt {
        input: usize,
    },
    Abs {
        input: usize,
    },
}

impl SourceTag {
    fn input(&self) -> Option<usize> {
        match *self {
            SourceTag::Const { .. } | SourceTag::Affine { .. } => None,
            SourceTag::Var { input }
            | SourceTag::Exp { input }
            | SourceTag::Sin { input }
            | SourceTag::Cos { input }
            | SourceTag::Log { input }
            | SourceTag::Sqrt { input }
            | SourceTag::Abs { input } => Some(input),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let u = self.input().map(|i| x[i]).unwrap_or(0.0);
        match self {
            SourceTag::Const { value } => *value,
            SourceTag::Affine { coeffs, bias } => {
                coeffs.iter().zip(x).fold(*bias, |acc, (c, x)| acc + c * x)
            }
            SourceTag::Var { .. } => u,
            SourceTag::Exp { .. } => u.exp(),
            SourceTag::Sin { .. } => u.sin(),
            SourceTag::Cos { .. } => u.cos(),
            SourceTag::Log { .. } => u.ln(),
            SourceTag::Sqrt { .. } => u.sqrt(),
            SourceTag::Abs { .. } => u.abs(),
        }
    }

    /// `∂/∂x_k` at `x`; the point must have passed [`AdTape::validate`].
    pub fn partial(&self, x: &[f64], k: usize) -> f64 {
        if let SourceTag::Affine { coeffs, .. } = self {
            return coeffs[k];
        }
        let Some(i) = self.input() else { return 0.0 };
        if i != k {
            return 0.0;
        }
        let u = x[i];
        match self {
            SourceTag::Var { .. } => 1.0,
            SourceTag::Exp { .. } => u.exp(),
            SourceTag::Sin { .. } => u.cos(),
            SourceTag::Cos { .. } => -u.sin(),
            SourceTag::Log { .. } => 1.0 / u,
            SourceTag::Sqrt { .. } => 0.5 / u.sqrt(),
            SourceTag::Abs { .. } => u.signum(),
            SourceTag::Const { .. } | SourceTag::Affine { .. } => unreachable!(),
        }
    }

    fn check(&self, x: &[f64]) -> Result<(), String> {
        if let SourceTag::Affine { coeffs, .. } = self {
            if coeffs.len() != x.len() {
                return Err(format!(
                    "affine tag has {} coefficients for {} inputs",
                    coeffs.len(),
                    x.len()
                ));
            }
        }
        let Some(i) = self.input() else { return Ok(()) };
        let u = *x.get(i).ok_or_else(|| format!("input {i} out of range"))?;
        match self {
            SourceTag::Log { .. } if u <= 0.0 => Err(format!("log at {u}")),
            SourceTag::Sqrt { .. } if u <= 0.0 => Err(format!("sqrt at {u}")),
            SourceTag::Abs { .. } if u == 0.0 => Err("abs at 0".into()),
            _ => Ok(()),
        }
    }
}

/// A graph with one tag per source (in source order) and the point `x₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdTape {
    pub graph: ComputationGraph,
    pub tags: Vec<SourceTag>,
    pub point: Vec<f64>,
}

/// JSON form of an [`AdTape`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdTapeDoc {
    pub graph: GraphDoc,
    pub tags: Vec<SourceTag>,
    pub point: Vec<f64>,
}

impl AdTape {
    pub fn num_inputs(&self) -> usize {
        self.point.len()
    }

    pub fn validate(&self) -> Result<(), AdapterError> {
        let n = self.graph.sources().len();
        if self.tags.len() != n {
            return Err(EngineError::SourceValueMissing {
                expected: n,
                got: self.tags.len(),
            }
            .into());
        }
        for (i, t) in self.tags.iter().enumerate() {
            t.check(&self.point)
                .map_err(|reason| AdapterError::NonDifferentiableTag {
                    source_index: i,
                    reason,
                })?;
        }
        Ok(())
    }

    /// Source values `ψ(x₀; v)`.
    pub fn values(&self) -> Vec<f64> {
        self.tags.iter().map(|t| t.value(&self.point)).collect()
    }

    /// The tape at another point.
    pub fn at(&self, point: Vec<f64>) -> Self {
        Self {
            graph: self.graph.clone(),
            tags: self.tags.clone(),
            point,
        }
    }

    pub fn from_doc(doc: AdTapeDoc) -> Result<Self, AdapterError> {
        let tape = Self {
            graph: doc.graph.to_graph()?,
            tags: doc.tags,
            point: doc.point,
        };
        tape.validate()?;
        Ok(tape)
    }

    pub fn to_doc(&self) -> AdTapeDoc {
        AdTapeDoc {
            graph: self.graph.to_doc(),
            tags: self.tags.clone(),
            point: self.point.clone(),
        }
    }
}

fn forward_grad<S: Semiring<Elem = f64> + Clone>(
    tape: &AdTape,
    k: usize,
    base: S,
) -> Result<(f64, f64), AdapterError> {
    tape.validate()?;
    if k >= tape.num_inputs() {
        return Err(AdapterError::InvalidModel(format!(
            "input {k} out of range"
        )));
    }
    let bc = Bc::new(base, 1).expect("order 1 is supported");
    let xi: Vec<Vec<f64>> = tape
        .tags
        .iter()
        .map(|t| vec![t.value(&tape.point), t.partial(&tape.point, k)])
        .collect();
    let r = forward(&tape.graph, &bc, &xi, CheckpointPolicy::AllElements)?;
    let out = r.sink_sum();
    Ok((out[0], out[1]))
}

fn reverse_grad<S: Semiring<Elem = f64>>(
    tape: &AdTape,
    base: S,
) -> Result<(f64, Vec<f64>), AdapterError> {
    tape.validate()?;
    let g = &tape.graph;
    let r = forward_backward_with(g, &base, &tape.values(), CheckpointPolicy::AllElements)?;
    let grad = (0..tape.num_inputs())
        .map(|k| {
            g.sources()
                .iter()
                .zip(&tape.tags)
                .map(|(v, t)| base.mul(&t.partial(&tape.point, k), &r.beta[v.index()]))
                .reduce(|acc, x| base.add(&acc, &x))
                .unwrap_or_else(|| base.zero())
        })
        .collect();
    Ok((*r.alpha.sink_sum(), grad))
}

/// Value and `∂/∂x_k` at the tape's point, by one forward pass over `BC¹`
/// with seeds `(ψ(x₀), ∂ψ/∂x_k(x₀))`.
pub fn ad_forward_grad(tape: &AdTape, k: usize) -> Result<(f64, f64), AdapterError> {
    forward_grad(tape, k, Real)
}

pub fn ad_forward_grad_counted(
    tape: &AdTape,
    k: usize,
    counters: &OpCounters,
) -> Result<(f64, f64), AdapterError> {
    forward_grad(tape, k, Counted::new(Real, counters.clone()))
}

/// Value and full gradient by one forward and one backward pass over the
/// reals: `∂/∂x_k = Σ_src ∂ψ/∂x_k(x₀; v)·β(v)`.
pub fn ad_reverse_grad(tape: &AdTape) -> Result<(f64, Vec<f64>), AdapterError> {
    reverse_grad(tape, Real)
}

pub fn ad_reverse_grad_counted(
    tape: &AdTape,
    counters: &OpCounters,
) -> Result<(f64, Vec<f64>), AdapterError> {
    reverse_grad(tape, Counted::new(Real, counters.clone()))
}

/// A random tape with at most `max_elements` graph elements and between one
/// and `max_inputs` inputs, evaluated at a point in `[0.3, 1.2]ᵐ`. Tapes
/// whose value exceeds `1e3` in magnitude are redrawn.
pub fn random_tape<R: Rng + ?Sized>(rng: &mut R, max_elements: usize, max_inputs: usize) -> AdTape {
    loop {
        let m = rng.gen_range(1..=max_inputs.max(1));
        let graph = random_graph(
            rng,
            GraphShape {
                max_sources: 10,
                max_elements,
                max_in_degree: 3,
            },
        );
        let tags = (0..graph.sources().len())
            .map(|_| {
                let input = rng.gen_range(0..m);
                match rng.gen_range(0..9) {
                    0 => SourceTag::Const {
                        value: rng.gen_range(-1.0..1.0),
                    },
                    1 => SourceTag::Affine {
                        coeffs: (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                        bias: rng.gen_range(-0.5..0.5),
                    },
                    2 => SourceTag::Exp { input },
                    3 => SourceTag::Sin { input },
                    4 => SourceTag::Cos { input },
                    5 => SourceTag::Log { input },
                    6 => SourceTag::Sqrt { input },
                    7 => SourceTag::Abs { input },
                    _ => SourceTag::Var { input },
                }
            })
            .collect();
        let point = (0..m).map(|_| rng.gen_range(0.3..1.2)).collect();
        let tape = AdTape { graph, tags, point };
        let ok = forward(
            &tape.graph,
            &Real,
            &tape.values(),
            CheckpointPolicy::AllElements,
        )
        .map(|r| r.sink_sum().abs() <= 1e3)
        .unwrap_or(false);
        if ok {
            return tape;
        }
    }
}
