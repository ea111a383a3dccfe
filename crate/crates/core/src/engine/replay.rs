use std::collections::HashMap;

use crate::algebra::Semiring;
use crate::graph::{ComputationGraph, Element};

use super::{combine, EngineError, ForwardResult};

/// Recomputes pruned forward values from the nearest stored ones, caching
/// everything it recomputes.
pub(crate) struct Replay<'a, S: Semiring> {
    g: &'a ComputationGraph,
    s: &'a S,
    stored: &'a ForwardResult<S::Elem>,
    memo: HashMap<usize, S::Elem>,
}

impl<'a, S: Semiring> Replay<'a, S> {
    pub(crate) fn new(
        g: &'a ComputationGraph,
        s: &'a S,
        stored: &'a ForwardResult<S::Elem>,
    ) -> Self {
        Self {
            g,
            s,
            stored,
            memo: HashMap::new(),
        }
    }

    fn known(&self, i: usize) -> Option<&S::Elem> {
        self.stored.raw()[i].as_ref().or_else(|| self.memo.get(&i))
    }

    pub(crate) fn value(&mut self, x: Element) -> Result<S::Elem, EngineError> {
        self.g.check(x)?;
        let g = self.g;
        let mut stack = vec![(x, false)];
        while let Some((y, expanded)) = stack.pop() {
            let i = g.element_index(y);
            if self.known(i).is_some() {
                continue;
            }
            match y {
                Element::Arc(e) => {
                    let t = g.element_index(Element::Node(g.tail(e)));
                    if let Some(v) = self.known(t).cloned() {
                        self.memo.insert(i, v);
                    } else if !expanded {
                        stack.push((y, true));
                        stack.push((Element::Node(g.tail(e)), false));
                    }
                }
                Element::Node(v) => {
                    if g.is_source(v) {
                        return Err(EngineError::InsufficientCheckpoints(y));
                    }
                    if expanded {
                        let val = combine(g, self.s, v, |e| {
                            self.known(g.element_index(Element::Arc(e)))
                                .cloned()
                                .expect("in-arc resolved before its head")
                        });
                        self.memo.insert(i, val);
                    } else {
                        stack.push((y, true));
                        for &e in g.in_arcs(v) {
                            stack.push((Element::Arc(e), false));
                        }
                    }
                }
            }
        }
        Ok(self
            .known(g.element_index(x))
            .cloned()
            .expect("value resolved"))
    }
}

/// The forward value at `x`, recomputed from the values kept in `stored`.
/// Recomputation folds in the same order as [`super::forward`], so the
/// result is bit-identical to an unpruned run.
pub fn checkpointed_replay<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    stored: &ForwardResult<S::Elem>,
    x: Element,
) -> Result<S::Elem, EngineError> {
    Replay::new(g, s, stored).value(x)
}

/// Every forward value, indexed by element, recomputed where pruned.
pub fn replay_all<S: Semiring>(
    g: &ComputationGraph,
    s: &S,
    stored: &ForwardResult<S::Elem>,
) -> Result<Vec<S::Elem>, EngineError> {
    let mut dense: Vec<Option<S::Elem>> = stored.raw().to_vec();
    for &x in g.schedule() {
        let i = g.element_index(x);
        if dense[i].is_some() {
            continue;
        }
        let val = match x {
            Element::Arc(e) => dense[g.tail(e).index()].clone(),
            Element::Node(v) if g.is_source(v) => None,
            Element::Node(v) => Some(combine(g, s, v, |e| {
                dense[g.element_index(Element::Arc(e))]
                    .clone()
                    .expect("schedule order")
            })),
        };
        dense[i] = Some(val.ok_or(EngineError::InsufficientCheckpoints(x))?);
    }
    Ok(dense.into_iter().map(|v| v.expect("filled")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Real;
    use crate::engine::{forward, CheckpointPolicy};
    use crate::graph::{ArcId, GraphBuilder, NodeId, Op};

    /// s -> a1 -> n1 -> ... -> n5, each ADD node also fed by s directly.
    fn ladder() -> ComputationGraph {
        let mut b = GraphBuilder::new();
        let s = b.add_source();
        let mut prev = s;
        for _ in 0..5 {
            prev = b.add_op(Op::Add, &[prev, s]);
        }
        b.build().unwrap()
    }

    #[test]
    fn replay_matches_full_run() {
        let g = ladder();
        let full = forward(&g, &Real, &[1.25], CheckpointPolicy::AllElements).unwrap();
        for policy in [
            CheckpointPolicy::NodesOnly,
            CheckpointPolicy::Cutsets(2),
            CheckpointPolicy::Cutsets(4),
        ] {
            let pruned = forward(&g, &Real, &[1.25], policy).unwrap();
            assert!(pruned.stored_count() < full.stored_count());
            for x in g.elements() {
                let want = full.get(&g, x).unwrap();
                let got = checkpointed_replay(&g, &Real, &pruned, x).unwrap();
                assert_eq!(got.to_bits(), want.to_bits(), "{policy} {x}");
            }
            let dense = replay_all(&g, &Real, &pruned).unwrap();
            assert_eq!(dense.len(), g.num_elements());
        }
    }

    #[test]
    fn nodes_only_arc_equals_tail() {
        let g = ladder();
        let pruned = forward(&g, &Real, &[2.0], CheckpointPolicy::NodesOnly).unwrap();
        let e = ArcId(3);
        assert_eq!(
            checkpointed_replay(&g, &Real, &pruned, Element::Arc(e)).unwrap(),
            *pruned.node(g.tail(e)).unwrap()
        );
    }

    #[test]
    fn insufficient_store() {
        let g = ladder();
        let full = forward(&g, &Real, &[1.0], CheckpointPolicy::AllElements).unwrap();
        let mut values = full.clone().into_values();
        for v in values.iter_mut() {
            *v = None;
        }
        let empty = ForwardResult::from_parts(values, 0.0, CheckpointPolicy::AllElements);
        assert_eq!(
            checkpointed_replay(&g, &Real, &empty, Element::Node(NodeId(3))).unwrap_err(),
            EngineError::InsufficientCheckpoints(Element::Node(NodeId(0)))
        );
        assert!(replay_all(&g, &Real, &empty).is_err());
    }
}
