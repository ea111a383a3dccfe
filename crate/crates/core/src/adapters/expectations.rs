//! Expectations of additive source features: one forward and one backward
//! pass shared by all features, or one tensor forward pass per feature.

use super::AdapterError;
use crate::algebra::{Counted, OpCount, OpCounters, Real, Semiring};
use crate::engine::{forward, forward_backward_with, CheckpointPolicy, EngineError};
use crate::graph::ComputationGraph;
use crate::par::{forward_batch, Execution};
use crate::semialgebra::{compose_framework, FrameworkPart};

/// `z` is the total weight `Σ_snk α`; `numerators[j]` is the weighted sum
/// over derivations of the feature total `Σ ψ_j` along the derivation.
/// `ops` counts the semiring operations of the evaluation passes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationReport {
    pub z: f64,
    pub numerators: Vec<f64>,
    pub ops: OpCount,
}

fn check_features(
    g: &ComputationGraph,
    xi0: &[f64],
    features: &[Vec<f64>],
) -> Result<(), AdapterError> {
    let n = g.sources().len();
    for got in std::iter::once(xi0.len()).chain(features.iter().map(Vec::len)) {
        if got != n {
            return Err(EngineError::SourceValueMissing { expected: n, got }.into());
        }
    }
    Ok(())
}

/// One forward pass over the reals with `xi0` and one backward pass, then
/// `E_j = Σ_src ψ_j(v)·xi0(v)·β(v)` for every feature.
pub fn expectations_fb(
    g: &ComputationGraph,
    xi0: &[f64],
    features: &[Vec<f64>],
    policy: CheckpointPolicy,
) -> Result<ExpectationReport, AdapterError> {
    check_features(g, xi0, features)?;
    let p1: Vec<Vec<f64>> = features
        .iter()
        .map(|psi| psi.iter().zip(xi0).map(|(p, x)| p * x).collect())
        .collect();
    let counters = OpCounters::new();
    let s = Counted::new(Real, counters.clone());
    let r = forward_backward_with(g, &s, xi0, policy)?;
    let numerators = p1
        .iter()
        .map(|p1| {
            g.sources()
                .iter()
                .zip(p1)
                .map(|(v, x)| s.mul(x, &r.beta[v.index()]))
                .reduce(|acc, t| s.add(&acc, &t))
                .unwrap_or_else(|| s.zero())
        })
        .collect();
    Ok(ExpectationReport {
        z: *r.alpha.sink_sum(),
        numerators,
        ops: counters.snapshot(),
    })
}

/// The same quantities by one forward pass per feature over
/// `ℝ ⊗ BC¹`, with sources `xi0(v) ⊗ (1, ψ_j(v))` and extractor
/// `ê₀ ↦ 0, ê₁ ↦ 1`.
pub fn expectations_npass(
    g: &ComputationGraph,
    xi0: &[f64],
    features: &[Vec<f64>],
    policy: CheckpointPolicy,
    exec: Execution,
) -> Result<ExpectationReport, AdapterError> {
    check_features(g, xi0, features)?;
    let counters = OpCounters::new();
    let s = Counted::new(Real, counters.clone());
    let frameworks = features
        .iter()
        .map(|psi| {
            compose_framework(vec![
                FrameworkPart::identity(s.clone(), xi0.to_vec(), 1.0)?,
                FrameworkPart::powers(s.clone(), 1, psi, vec![0.0, 1.0])?,
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let Some(first) = frameworks.first() else {
        let z = *forward(g, &Real, xi0, policy)?.sink_sum();
        return Ok(ExpectationReport {
            z,
            numerators: Vec::new(),
            ops: OpCount::default(),
        });
    };
    let spec = first.spec.clone();
    let xis: Vec<_> = frameworks.iter().map(|f| f.xi.clone()).collect();
    counters.reset();
    let runs = forward_batch(g, &spec, &xis, policy, exec)?;
    let numerators = runs
        .iter()
        .zip(&frameworks)
        .map(|(r, f)| f.extractor.apply(r.sink_sum()))
        .collect();
    Ok(ExpectationReport {
        z: spec.coefficient(runs[0].sink_sum(), 0),
        numerators,
        ops: counters.snapshot(),
    })
}

/// `Σ_derivations w · (Σ φ) · (Σ ψ)` with weights `mu`, by one forward pass
/// over `ℝ ⊗ BC¹ ⊗ BC¹` and the extractor `1 ⊗ ê₁ ⊗ ê₁ ↦ 1`.
pub fn second_order_expectation(
    g: &ComputationGraph,
    mu: &[f64],
    phi: &[f64],
    psi: &[f64],
    policy: CheckpointPolicy,
) -> Result<f64, AdapterError> {
    check_features(g, mu, &[phi.to_vec(), psi.to_vec()])?;
    let fw = compose_framework(vec![
        FrameworkPart::identity(Real, mu.to_vec(), 1.0)?,
        FrameworkPart::powers(Real, 1, phi, vec![0.0, 1.0])?,
        FrameworkPart::powers(Real, 1, psi, vec![0.0, 1.0])?,
    ])?;
    let r = forward(g, &fw.spec, &fw.xi, policy)?;
    Ok(fw.extractor.apply(r.sink_sum()))
}
