use std::collections::HashMap;

use crate::algebra::Semiring;
use crate::graph::{ArcId, ComputationGraph, Element, NodeId, Op};
use crate::semialgebra::{bc_semialgebra, tensor_product, SemialgebraSpec, TensorValue};

use super::replay::Replay;
use super::{forward, CheckpointPolicy, EngineError, ForwardResult};

fn check_bc1_last<S: Semiring>(full: &SemialgebraSpec<S>) -> Result<(), EngineError> {
    let ok = full.factors().len() >= 2
        && full
            .factors()
            .last()
            .is_some_and(|f| f.dim() == 2 && f.name() == "bc1");
    if ok {
        Ok(())
    } else {
        Err(EngineError::ShapeMismatch(format!(
            "`{}` does not end in a bc1 factor",
            full.name()
        )))
    }
}

fn project<S: Semiring>(
    full: &SemialgebraSpec<S>,
    t: &TensorValue<S::Elem>,
    which: usize,
) -> Result<TensorValue<S::Elem>, EngineError> {
    check_bc1_last(full)?;
    if t.dim() != full.dim() {
        return Err(EngineError::ShapeMismatch(format!(
            "value of dimension {} under a {}-dimensional spec",
            t.dim(),
            full.dim()
        )));
    }
    let coeffs = t
        .coeffs()
        .iter()
        .filter(|(i, _)| i % 2 == which)
        .map(|(i, c)| (i / 2, c.clone()))
        .collect();
    Ok(TensorValue::from_raw(full.dim() / 2, coeffs))
}

/// `P₀`: the `ê₀` coefficient of a value in `A ⊗ BC¹`, as an `A`-value.
pub fn project0<S: Semiring>(
    full: &SemialgebraSpec<S>,
    t: &TensorValue<S::Elem>,
) -> Result<TensorValue<S::Elem>, EngineError> {
    project(full, t, 0)
}

/// `P₁`: the `ê₁` coefficient of a value in `A ⊗ BC¹`, as an `A`-value.
pub fn project1<S: Semiring>(
    full: &SemialgebraSpec<S>,
    t: &TensorValue<S::Elem>,
) -> Result<TensorValue<S::Elem>, EngineError> {
    project(full, t, 1)
}

/// `a ⊗ ê_which` in `A ⊗ BC¹`.
pub fn inject<S: Semiring>(
    full: &SemialgebraSpec<S>,
    a: &TensorValue<S::Elem>,
    which: usize,
) -> Result<TensorValue<S::Elem>, EngineError> {
    check_bc1_last(full)?;
    assert!(which < 2);
    let coeffs = a
        .coeffs()
        .iter()
        .map(|(i, c)| (2 * i + which, c.clone()))
        .collect();
    Ok(TensorValue::from_raw(full.dim(), coeffs))
}

/// Products of the forward values on the in-arcs of a MUL node, each one
/// excluding a single arc, computed as `prefix · suffix`.
fn exclusive_products<S: Semiring>(alpha: &[S::Elem], s: &S) -> Vec<S::Elem> {
    let k = alpha.len();
    if k == 1 {
        return vec![s.one()];
    }
    let mut prefix = Vec::with_capacity(k);
    prefix.push(alpha[0].clone());
    for a in &alpha[1..k - 1] {
        let p = s.mul(prefix.last().unwrap(), a);
        prefix.push(p);
    }
    let mut suffix = vec![alpha[k - 1].clone(); k];
    for i in (1..k - 1).rev() {
        suffix[i] = s.mul(&alpha[i], &suffix[i + 1]);
    }
    (0..k)
        .map(|i| {
            if i == 0 {
                suffix[1].clone()
            } else if i == k - 1 {
                prefix[k - 2].clone()
            } else {
                s.mul(&prefix[i - 1], &suffix[i + 1])
            }
        })
        .collect()
}

struct BetaPass<'a, S: Semiring> {
    g: &'a ComputationGraph,
    s: &'a S,
    alpha: Replay<'a, S>,
    /// Exclusive products per MUL head, with the number of in-arcs still
    /// to consume; evicted once all are used.
    excl: HashMap<NodeId, (Vec<S::Elem>, usize)>,
}

impl<S: Semiring> BetaPass<'_, S> {
    fn arc_beta(&mut self, beta_head: &S::Elem, e: ArcId) -> Result<S::Elem, EngineError> {
        let g = self.g;
        let h = g.head(e);
        let ins = g.in_arcs(h);
        match g.op(h).expect("head of an arc is internal") {
            Op::Add => Ok(beta_head.clone()),
            Op::Mul if ins.len() == 1 => Ok(beta_head.clone()),
            Op::Mul => {
                if !self.excl.contains_key(&h) {
                    let alpha = ins
                        .iter()
                        .map(|&f| self.alpha.value(Element::Arc(f)))
                        .collect::<Result<Vec<_>, _>>()?;
                    self.excl
                        .insert(h, (exclusive_products(&alpha, self.s), ins.len()));
                }
                let pos = ins
                    .iter()
                    .position(|&f| f == e)
                    .expect("arc is an in-arc of its head");
                let entry = self.excl.get_mut(&h).expect("cached");
                let b = self.s.mul(beta_head, &entry.0[pos]);
                entry.1 -= 1;
                if entry.1 == 0 {
                    self.excl.remove(&h);
                }
                Ok(b)
            }
        }
    }
}

/// The backward variable on every node, from forward values stored under
/// any policy (pruned values are replayed). Arc values follow from
/// [`arc_beta`].
pub fn backward_with<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    alpha: &ForwardResult<S::Elem>,
) -> Result<Vec<S::Elem>, EngineError> {
    let mut pass = BetaPass {
        g,
        s,
        alpha: Replay::new(g, s, alpha),
        excl: HashMap::new(),
    };
    let mut beta: Vec<Option<S::Elem>> = vec![None; g.num_nodes()];
    for &x in g.schedule().iter().rev() {
        let Element::Node(v) = x else { continue };
        let b = if g.is_sink(v) {
            s.one()
        } else {
            let mut acc: Option<S::Elem> = None;
            for &e in g.out_arcs(v) {
                let bh = beta[g.head(e).index()]
                    .clone()
                    .expect("heads come later in the schedule");
                let be = pass.arc_beta(&bh, e)?;
                acc = Some(match acc {
                    None => be,
                    Some(a) => s.add(&a, &be),
                });
            }
            acc.expect("non-sink has out-arcs")
        };
        beta[v.index()] = Some(b);
    }
    Ok(beta
        .into_iter()
        .map(|b| b.expect("every node visited"))
        .collect())
}

/// `β(e)`: `β(head)` for ADD heads, and `β(head)` times the forward values
/// of the other in-arcs of the head for MUL heads.
pub fn arc_beta<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    alpha: &ForwardResult<S::Elem>,
    beta: &[S::Elem],
    e: ArcId,
) -> Result<S::Elem, EngineError> {
    g.check(Element::Arc(e))?;
    let mut pass = BetaPass {
        g,
        s,
        alpha: Replay::new(g, s, alpha),
        excl: HashMap::new(),
    };
    pass.arc_beta(&beta[g.head(e).index()], e)
}

/// Forward values over `A` and backward values on every node.
#[derive(Clone, Debug)]
pub struct ScalarBackward<T> {
    pub alpha: ForwardResult<T>,
    pub beta: Vec<T>,
}

/// One forward pass with `xi0` and one backward pass, over any semiring.
pub fn forward_backward_with<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    xi0: &[S::Elem],
    policy: CheckpointPolicy,
) -> Result<ScalarBackward<S::Elem>, EngineError> {
    let alpha = forward(g, s, xi0, policy)?;
    let beta = backward_with(g, s, &alpha)?;
    Ok(ScalarBackward { alpha, beta })
}

/// Result of the forward-backward algorithm over `A ⊗ BC¹`.
#[derive(Clone, Debug)]
pub struct BackwardResult<S: Semiring> {
    /// `A ⊗ BC¹`.
    pub spec: SemialgebraSpec<S>,
    /// Forward values over `A` with sources `P₀(ξ)`.
    pub alpha0: ForwardResult<TensorValue<S::Elem>>,
    /// Backward values per node.
    pub beta: Vec<TensorValue<S::Elem>>,
    /// `Σ_snk α(v) ⊗ ê₀ + Σ_src P₁(ξ(v))·β(v) ⊗ ê₁`.
    pub combined: TensorValue<S::Elem>,
}

/// Forward-backward over `A ⊗ BC¹`: `xi[i]` is the `A ⊗ BC¹` value of the
/// `i`-th source. The `ê₁` part of `combined` equals the `ê₁` part of the
/// sink sum of a forward pass over `A ⊗ BC¹`, at the cost of one forward
/// and one backward pass over `A`.
pub fn forward_backward<S: Semiring + Clone>(
    g: &ComputationGraph,
    a: &SemialgebraSpec<S>,
    xi: &[TensorValue<S::Elem>],
    policy: CheckpointPolicy,
) -> Result<BackwardResult<S>, EngineError> {
    if !a.is_cancellative() {
        return Err(EngineError::NotCancellative(a.scalar().name()));
    }
    let full = tensor_product(a, &bc_semialgebra(a.scalar().clone(), 1)?)?;
    if xi.len() != g.sources().len() {
        return Err(EngineError::SourceValueMissing {
            expected: g.sources().len(),
            got: xi.len(),
        });
    }
    let xi0 = xi
        .iter()
        .map(|x| project0(&full, x))
        .collect::<Result<Vec<_>, _>>()?;
    let xi1 = xi
        .iter()
        .map(|x| project1(&full, x))
        .collect::<Result<Vec<_>, _>>()?;
    let ScalarBackward { alpha, beta } = forward_backward_with(g, a, &xi0, policy)?;
    let mut source_sum: Option<TensorValue<S::Elem>> = None;
    for (k, v) in g.sources().iter().enumerate() {
        let term = a.mul(&xi1[k], &beta[v.index()]);
        source_sum = Some(match source_sum {
            None => term,
            Some(acc) => a.add(&acc, &term),
        });
    }
    let source_sum = source_sum.unwrap_or_else(|| a.zero());
    let combined = full.add(
        &inject(&full, alpha.sink_sum(), 0)?,
        &inject(&full, &source_sum, 1)?,
    );
    Ok(BackwardResult {
        spec: full,
        alpha0: alpha,
        beta,
        combined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Real;
    use crate::graph::GraphBuilder;
    use crate::semialgebra::semialgebra_from_semiring;

    fn real_full() -> (SemialgebraSpec<Real>, SemialgebraSpec<Real>) {
        let a = semialgebra_from_semiring(Real).unwrap();
        let full = tensor_product(&a, &bc_semialgebra(Real, 1).unwrap()).unwrap();
        (a, full)
    }

    #[test]
    fn exclusive_products_skip_one_factor() {
        let p = exclusive_products(&[2.0, 3.0, 5.0, 7.0], &Real);
        assert_eq!(p, vec![105.0, 70.0, 42.0, 30.0]);
        assert_eq!(exclusive_products(&[2.0, 3.0], &Real), vec![3.0, 2.0]);
    }

    #[test]
    fn projections() {
        let (_, full) = real_full();
        let x = full.from_dense(vec![4.0, 0.0]);
        assert_eq!(project0(&full, &x).unwrap().coeffs(), &[(0, 4.0)]);
        assert!(project1(&full, &x).unwrap().coeffs().is_empty());
        let bad = bc_semialgebra(Real, 2).unwrap();
        assert!(matches!(
            project0(&bad, &bad.one()),
            Err(EngineError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn chain_beta_is_one() {
        let mut b = GraphBuilder::new();
        let s = b.add_source();
        b.add_op(Op::Add, &[s]);
        let g = b.build().unwrap();
        let r = forward_backward_with(&g, &Real, &[3.0], CheckpointPolicy::AllElements).unwrap();
        assert_eq!(r.beta, vec![1.0, 1.0]);
    }

    #[test]
    fn product_rule() {
        // v = s0 * s1 * s0 (two arcs from s0)
        let mut b = GraphBuilder::new();
        let s0 = b.add_source();
        let s1 = b.add_source();
        b.add_op(Op::Mul, &[s0, s1, s0]);
        let g = b.build().unwrap();
        let (a, full) = real_full();
        let xi = vec![
            full.from_dense(vec![2.0, 1.0]),
            full.from_dense(vec![3.0, 0.0]),
        ];
        let r = forward_backward(&g, &a, &xi, CheckpointPolicy::AllElements).unwrap();
        // d/ds0 (s0² s1) = 2 s0 s1 = 12
        assert_eq!(full.to_dense(&r.combined), vec![12.0, 12.0]);
        assert_eq!(a.to_dense(&r.beta[0]), vec![12.0]);
        let arc = arc_beta(&g, &a, &r.alpha0, &r.beta, ArcId(0)).unwrap();
        assert_eq!(a.to_dense(&arc), vec![6.0]);
    }
}
