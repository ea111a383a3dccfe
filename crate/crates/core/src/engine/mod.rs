//! Forward evaluation, free-forward polynomials, checkpointed replay and
//! the forward-backward algorithm.

mod backward;
mod replay;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{MonoidHom, NatPoly, NatPolySemiring, Semiring};
use crate::graph::{
    ArcId, ComputationGraph, CutsetWalker, Direction, Element, GraphError, NodeId, Op,
};
use crate::semialgebra::SemialgebraError;

pub use backward::{
    arc_beta, backward_with, forward_backward, forward_backward_with, inject, project0, project1,
    BackwardResult, ScalarBackward,
};
pub use replay::{checkpointed_replay, replay_all};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("expected {expected} source values, got {got}")]
    SourceValueMissing { expected: usize, got: usize },
    #[error("semiring mismatch: {0}")]
    SemiringMismatch(String),
    #[error("semialgebra over `{0}` is not cancellative")]
    NotCancellative(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("stored values do not determine {0}")]
    InsufficientCheckpoints(Element),
    #[error("invalid checkpoint policy: {0}")]
    InvalidPolicy(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Semialgebra(#[from] SemialgebraError),
}

/// Which forward values survive once they are no longer on the frontier.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum CheckpointPolicy {
    #[default]
    AllElements,
    /// Arc values are dropped; each equals its tail's value.
    NodesOnly,
    /// Every `k`-th visited cutset is kept, plus the source and sink
    /// cutsets.
    Cutsets(usize),
}

impl CheckpointPolicy {
    fn validate(self) -> Result<(), EngineError> {
        match self {
            Self::Cutsets(0) => Err(EngineError::InvalidPolicy(
                "cutset stride must be positive".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl FromStr for CheckpointPolicy {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, EngineError> {
        match s {
            "all" => Ok(Self::AllElements),
            "nodes" => Ok(Self::NodesOnly),
            _ => {
                let k = s
                    .strip_prefix("cutsets:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| EngineError::InvalidPolicy(s.to_string()))?;
                let p = Self::Cutsets(k);
                p.validate()?;
                Ok(p)
            }
        }
    }
}

impl fmt::Display for CheckpointPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AllElements => f.write_str("all"),
            Self::NodesOnly => f.write_str("nodes"),
            Self::Cutsets(k) => write!(f, "cutsets:{k}"),
        }
    }
}

/// Forward values retained under a policy, indexed by element, and the sum
/// over the sinks.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardResult<T> {
    values: Vec<Option<T>>,
    sink_sum: T,
    policy: CheckpointPolicy,
}

impl<T: Clone> ForwardResult<T> {
    /// Assembles a result from raw parts, e.g. to replay from a hand-made
    /// store. `values` is indexed by [`ComputationGraph::element_index`].
    pub fn from_parts(values: Vec<Option<T>>, sink_sum: T, policy: CheckpointPolicy) -> Self {
        Self {
            values,
            sink_sum,
            policy,
        }
    }

    pub fn sink_sum(&self) -> &T {
        &self.sink_sum
    }

    pub fn policy(&self) -> CheckpointPolicy {
        self.policy
    }

    /// Stored value of `x`, if the policy kept it.
    pub fn get(&self, g: &ComputationGraph, x: Element) -> Option<&T> {
        self.values.get(g.element_index(x)).and_then(Option::as_ref)
    }

    pub fn node(&self, v: NodeId) -> Option<&T> {
        self.values.get(v.index()).and_then(Option::as_ref)
    }

    pub fn arc(&self, g: &ComputationGraph, e: ArcId) -> Option<&T> {
        self.get(g, Element::Arc(e))
    }

    pub fn stored(&self) -> impl Iterator<Item = (usize, &T)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.as_ref().map(|v| (i, v)))
    }

    pub fn stored_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub(crate) fn raw(&self) -> &[Option<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Option<T>> {
        self.values
    }
}

fn check_sources(g: &ComputationGraph, got: usize) -> Result<(), EngineError> {
    if got != g.sources().len() {
        return Err(EngineError::SourceValueMissing {
            expected: g.sources().len(),
            got,
        });
    }
    Ok(())
}

/// `α(v)` for an internal node from the values on its in-arcs, folded in
/// in-arc order.
pub(crate) fn combine<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    v: NodeId,
    arc_value: impl Fn(ArcId) -> S::Elem,
) -> S::Elem {
    let ins = g.in_arcs(v);
    assert!(!ins.is_empty(), "internal node without in-arcs");
    let op = g.op(v).expect("internal node carries an op tag");
    let mut acc = arc_value(ins[0]);
    for &e in &ins[1..] {
        let x = arc_value(e);
        acc = match op {
            Op::Add => s.add(&acc, &x),
            Op::Mul => s.mul(&acc, &x),
        };
    }
    acc
}

pub(crate) fn sum_sinks<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    node_value: impl Fn(NodeId) -> S::Elem,
) -> S::Elem {
    let mut it = g.sinks().iter();
    let Some(&first) = it.next() else {
        return s.zero();
    };
    it.fold(node_value(first), |acc, &v| s.add(&acc, &node_value(v)))
}

/// Evaluates the forward variable cutset by cutset from the sources to the
/// sinks. `xi[i]` is the value of the `i`-th source in source order.
pub fn forward<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    xi: &[S::Elem],
    policy: CheckpointPolicy,
) -> Result<ForwardResult<S::Elem>, EngineError> {
    check_sources(g, xi.len())?;
    policy.validate()?;
    let n = g.num_elements();
    let mut values: Vec<Option<S::Elem>> = vec![None; n];
    let mut pinned = vec![false; n];
    for (k, &v) in g.sources().iter().enumerate() {
        values[v.index()] = Some(xi[k].clone());
        pinned[v.index()] = true;
    }
    let mut frontier: BTreeSet<usize> = match policy {
        CheckpointPolicy::Cutsets(_) => g.sources().iter().map(|v| v.index()).collect(),
        _ => BTreeSet::new(),
    };
    let mut steps = 0usize;

    for step in CutsetWalker::new(g, Direction::Forward) {
        let computed: Vec<(usize, S::Elem)> = match step.pivot {
            Element::Node(x) => {
                let val = values[x.index()]
                    .clone()
                    .expect("frontier node has a value");
                step.covering
                    .iter()
                    .map(|&a| (g.element_index(a), val.clone()))
                    .collect()
            }
            Element::Arc(_) => {
                let Element::Node(v) = step.covering[0] else {
                    unreachable!("an arc pivot is covered by its head")
                };
                let val = combine(g, s, v, |e| {
                    values[g.element_index(Element::Arc(e))]
                        .clone()
                        .expect("frontier arc has a value")
                });
                vec![(v.index(), val)]
            }
        };
        for &d in &step.covered {
            let i = g.element_index(d);
            let keep = match policy {
                CheckpointPolicy::AllElements => true,
                CheckpointPolicy::NodesOnly => matches!(d, Element::Node(_)),
                CheckpointPolicy::Cutsets(_) => pinned[i],
            };
            if !keep {
                values[i] = None;
            }
        }
        for (i, val) in computed {
            values[i] = Some(val);
        }
        if let CheckpointPolicy::Cutsets(k) = policy {
            for d in &step.covered {
                frontier.remove(&g.element_index(*d));
            }
            frontier.extend(step.covering.iter().map(|&c| g.element_index(c)));
            steps += 1;
            if steps.is_multiple_of(k) {
                for &i in &frontier {
                    pinned[i] = true;
                }
            }
        }
    }

    let sink_sum = sum_sinks(g, s, |v| {
        values[v.index()].clone().expect("sink value retained")
    });
    Ok(ForwardResult {
        values,
        sink_sum,
        policy,
    })
}

/// The forward variable over `ℕ₀[x₀, …, x_{n-1}]` with the `i`-th source
/// mapped to `x_i`.
pub fn free_forward(g: &ComputationGraph) -> Result<ForwardResult<NatPoly>, EngineError> {
    let n = g.sources().len();
    let xi: Vec<NatPoly> = (0..n).map(|i| NatPoly::var(n, i)).collect();
    forward(
        g,
        &NatPolySemiring::new(n),
        &xi,
        CheckpointPolicy::AllElements,
    )
}

/// Forward evaluation with source values `hom(phi(v))`, over the target
/// semiring of `hom`.
pub fn parametrized_forward<H: MonoidHom>(
    g: &ComputationGraph,
    hom: &H,
    phi: &[H::Source],
    policy: CheckpointPolicy,
) -> Result<ForwardResult<<H::Target as Semiring>::Elem>, EngineError> {
    let xi: Vec<_> = phi.iter().map(|m| hom.apply(m)).collect();
    forward(g, hom.target(), &xi, policy)
}
