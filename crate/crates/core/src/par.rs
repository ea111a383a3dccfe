//! Batch evaluation. Independent runs over one graph are spread across
//! threads with rayon when the `parallel` feature is on; without it, or
//! with [`Execution::Sequential`], they run in order on the caller's thread.
//! Results are identical either way.

use crate::algebra::Semiring;
use crate::engine::{forward, CheckpointPolicy, EngineError, ForwardResult};
use crate::graph::ComputationGraph;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually uses threads in this build.
    pub const fn threads_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// `f` over `items`, preserving order.
pub fn map_ordered<I, O, F>(items: &[I], exec: Execution, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// One forward pass per source assignment in `xis`.
pub fn forward_batch<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    xis: &[Vec<S::Elem>],
    policy: CheckpointPolicy,
    exec: Execution,
) -> Result<Vec<ForwardResult<S::Elem>>, EngineError> {
    map_ordered(xis, exec, |xi| forward(g, s, xi, policy))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Real;
    use crate::graph::{GraphBuilder, Op};

    #[test]
    fn batch_matches_sequential() {
        let mut b = GraphBuilder::new();
        let x = b.add_source();
        let y = b.add_source();
        let s = b.add_op(Op::Add, &[x, y]);
        b.add_op(Op::Mul, &[s, x]);
        let g = b.build().unwrap();
        let xis: Vec<Vec<f64>> = (0..64)
            .map(|i| vec![i as f64 * 0.5, 1.0 - i as f64])
            .collect();
        let par = forward_batch(
            &g,
            &Real,
            &xis,
            CheckpointPolicy::AllElements,
            Execution::Parallel,
        )
        .unwrap();
        let seq = forward_batch(
            &g,
            &Real,
            &xis,
            CheckpointPolicy::AllElements,
            Execution::Sequential,
        )
        .unwrap();
        for (p, q) in par.iter().zip(&seq) {
            assert_eq!(p.sink_sum().to_bits(), q.sink_sum().to_bits());
        }
        assert_eq!(*seq[3].sink_sum(), (1.5 - 2.0) * 1.5);
    }
}
