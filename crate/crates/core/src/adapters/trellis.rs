//! Hidden Markov model trellises.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AdapterError, Built, Recorder};
use crate::graph::{NodeId, Op};

const STOCHASTIC_TOL: f64 = 1e-9;

/// A discrete HMM with an observation sequence. `emission[i][o]` is the
/// probability of symbol `o` in state `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trellis {
    pub initial: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    pub emission: Vec<Vec<f64>>,
    pub observations: Vec<usize>,
}

fn stochastic(row: &[f64], what: &str) -> Result<(), AdapterError> {
    if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(AdapterError::InvalidModel(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(AdapterError::InvalidModel(format!(
            "{what} sums to {sum}, not 1"
        )));
    }
    Ok(())
}

impl Trellis {
    pub fn num_states(&self) -> usize {
        self.initial.len()
    }

    pub fn horizon(&self) -> usize {
        self.observations.len()
    }

    pub fn validate(&self) -> Result<(), AdapterError> {
        let k = self.num_states();
        if k == 0 || self.horizon() == 0 {
            return Err(AdapterError::InvalidModel(
                "trellis needs at least one state and one observation".into(),
            ));
        }
        stochastic(&self.initial, "initial distribution")?;
        if self.transition.len() != k || self.emission.len() != k {
            return Err(AdapterError::InvalidModel(format!(
                "transition and emission tables need {k} rows"
            )));
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != k {
                return Err(AdapterError::InvalidModel(format!(
                    "transition row {i} has {} entries",
                    row.len()
                )));
            }
            stochastic(row, &format!("transition row {i}"))?;
        }
        let n_sym = self.emission[0].len();
        for (i, row) in self.emission.iter().enumerate() {
            if row.len() != n_sym {
                return Err(AdapterError::InvalidModel(format!(
                    "emission row {i} has {} entries",
                    row.len()
                )));
            }
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(AdapterError::InvalidModel(format!(
                    "emission row {i} has a negative entry"
                )));
            }
        }
        if let Some(o) = self.observations.iter().find(|&&o| o >= n_sym) {
            return Err(AdapterError::InvalidModel(format!(
                "observation {o} outside the {n_sym}-symbol alphabet"
            )));
        }
        Ok(())
    }

    /// Joint probability of a state sequence and the observations.
    pub fn joint(&self, states: &[usize]) -> f64 {
        let o = &self.observations;
        let mut p = self.initial[states[0]] * self.emission[states[0]][o[0]];
        for t in 1..states.len() {
            p *= self.transition[states[t - 1]][states[t]] * self.emission[states[t]][o[t]];
        }
        p
    }

    /// Random model with `k` states, `n_symbols` symbols and a random
    /// observation sequence of length `t`. All probabilities are positive.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize, t: usize, n_symbols: usize) -> Self {
        let mut dist = |n: usize| {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let initial = dist(k);
        let transition = (0..k).map(|_| dist(k)).collect();
        let emission = (0..k).map(|_| dist(n_symbols)).collect();
        let observations = (0..t).map(|_| rng.gen_range(0..n_symbols)).collect();
        Self {
            initial,
            transition,
            emission,
            observations,
        }
    }
}

/// The trellis graph plus source positions by role.
#[derive(Clone, Debug)]
pub struct TrellisBuilt {
    pub built: Built,
    /// `residence[t][j]`: the source every sequence in state `j` at time
    /// `t` passes through (the fused initial·emission source at `t = 0`,
    /// the emission source afterwards).
    pub residence: Vec<Vec<usize>>,
    /// `transition[t - 1][i][j]`: the source for `i → j` entering time `t`.
    pub transition: Vec<Vec<Vec<usize>>>,
}

/// Builds the trellis graph. At `t = 0` each state has one source holding
/// `π_j·b_j(o₀)`. At each later step, every pair `(i, j)` gets a transition
/// source and a MUL of it with the previous value of `i`; an ADD per state
/// sums these, and a MUL with the emission source gives the new value.
/// The final values are the sinks, so the sink sum is the likelihood.
pub fn trellis_to_cg(t: &Trellis) -> Result<TrellisBuilt, AdapterError> {
    t.validate()?;
    let k = t.num_states();
    let obs = &t.observations;
    let mut r = Recorder::default();
    let mut residence = Vec::with_capacity(t.horizon());
    let mut transition = Vec::with_capacity(t.horizon().saturating_sub(1));

    let mut prev: Vec<NodeId> = Vec::with_capacity(k);
    let mut res0 = Vec::with_capacity(k);
    for j in 0..k {
        res0.push(r.next_source());
        prev.push(r.source(
            t.initial[j] * t.emission[j][obs[0]],
            format!("t=0 state={j} initial*emission[{}]", obs[0]),
        ));
    }
    residence.push(res0);

    for (step, &o) in obs.iter().enumerate().skip(1) {
        let mut trans_step = vec![Vec::with_capacity(k); k];
        let mut res = Vec::with_capacity(k);
        let mut next = Vec::with_capacity(k);
        for j in 0..k {
            let mut paths = Vec::with_capacity(k);
            for (i, &p) in prev.iter().enumerate() {
                trans_step[i].push(r.next_source());
                let a = r.source(t.transition[i][j], format!("t={step} transition {i}->{j}"));
                paths.push(r.fresh(Op::Mul, &[p, a]));
            }
            let sum = r.op(Op::Add, &paths);
            res.push(r.next_source());
            let b = r.source(
                t.emission[j][o],
                format!("t={step} state={j} emission[{o}]"),
            );
            next.push(r.fresh(Op::Mul, &[sum, b]));
        }
        transition.push(trans_step);
        residence.push(res);
        prev = next;
    }
    Ok(TrellisBuilt {
        built: r.finish()?,
        residence,
        transition,
    })
}
