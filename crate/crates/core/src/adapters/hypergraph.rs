//! Weighted acyclic B-hypergraphs (derivation forests).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AdapterError, Built, Recorder};
use crate::graph::{NodeId, Op};

/// A hyperedge deriving `head` from `tails`. Edges sharing a `tag` share one
/// weight source, so the free polynomial counts tag uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperedge {
    #[serde(default)]
    pub tails: Vec<usize>,
    pub head: usize,
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hypergraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Hyperedge>,
    pub weights: BTreeMap<String, f64>,
    pub target: usize,
}

/// Builds the inside computation for `h.target`. Only vertices and edges
/// the target depends on are included. Each included tag becomes one
/// source (in tag order) valued by `h.weights`; each edge is a MUL of its
/// tag source and its tail vertices; each vertex is an ADD over its edges.
/// Single-input MULs and ADDs are elided.
pub fn hypergraph_to_cg(h: &Hypergraph) -> Result<Built, AdapterError> {
    let nv = h.vertices.len();
    if h.target >= nv {
        return Err(AdapterError::InvalidModel(format!(
            "target {} is not a vertex",
            h.target
        )));
    }
    for e in &h.edges {
        if let Some(v) = e.tails.iter().chain([&e.head]).find(|&&v| v >= nv) {
            return Err(AdapterError::InvalidModel(format!(
                "edge `{}` refers to vertex {v}",
                e.tag
            )));
        }
        if !h.weights.contains_key(&e.tag) {
            return Err(AdapterError::InvalidModel(format!(
                "tag `{}` has no weight",
                e.tag
            )));
        }
    }
    let mut incoming = vec![Vec::new(); nv];
    for (i, e) in h.edges.iter().enumerate() {
        incoming[e.head].push(i);
    }

    // Depth-first from the target; a vertex met again while still open
    // closes a cycle. Post-order is a valid evaluation order.
    let mut state = vec![0u8; nv];
    let mut order = Vec::new();
    let mut stack = vec![(h.target, 0usize)];
    state[h.target] = 1;
    while let Some(&(v, next)) = stack.last() {
        let mut deps = incoming[v]
            .iter()
            .flat_map(|&i| h.edges[i].tails.iter().copied());
        if let Some(u) = deps.nth(next) {
            stack.last_mut().expect("nonempty").1 += 1;
            match state[u] {
                0 => {
                    state[u] = 1;
                    stack.push((u, 0));
                }
                1 => return Err(AdapterError::CyclicHypergraph(h.vertices[u].clone())),
                _ => {}
            }
        } else {
            if incoming[v].is_empty() {
                return Err(AdapterError::UnderivableVertex(h.vertices[v].clone()));
            }
            state[v] = 2;
            order.push(v);
            stack.pop();
        }
    }

    let mut r = Recorder::default();
    let mut tags: BTreeMap<&str, Option<NodeId>> = BTreeMap::new();
    for &v in &order {
        for &i in &incoming[v] {
            tags.insert(&h.edges[i].tag, None);
        }
    }
    for (tag, node) in tags.iter_mut() {
        *node = Some(r.source(h.weights[*tag], (*tag).to_string()));
    }
    let mut value: Vec<Option<NodeId>> = vec![None; nv];
    for &v in &order {
        let derivations: Vec<NodeId> = incoming[v]
            .iter()
            .map(|&i| {
                let e = &h.edges[i];
                let mut inputs = vec![tags[e.tag.as_str()].expect("tag source")];
                inputs.extend(e.tails.iter().map(|&u| value[u].expect("tails come first")));
                r.op(Op::Mul, &inputs)
            })
            .collect();
        value[v] = Some(r.op(Op::Add, &derivations));
    }
    r.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Real;
    use crate::engine::{forward, CheckpointPolicy};

    fn edge(tails: &[usize], head: usize, tag: &str) -> Hyperedge {
        Hyperedge {
            tails: tails.to_vec(),
            head,
            tag: tag.into(),
        }
    }

    fn inside(h: &Hypergraph) -> f64 {
        let b = hypergraph_to_cg(h).unwrap();
        *forward(&b.graph, &Real, &b.xi, CheckpointPolicy::AllElements)
            .unwrap()
            .sink_sum()
    }

    #[test]
    fn axiom_and_two_derivations() {
        let mut h = Hypergraph {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![edge(&[], 0, "w0")],
            weights: [
                ("w0".to_string(), 0.5),
                ("w1".to_string(), 2.0),
                ("w2".to_string(), 3.0),
            ]
            .into(),
            target: 0,
        };
        assert_eq!(inside(&h), 0.5);
        h.edges.push(edge(&[0], 1, "w1"));
        h.edges.push(edge(&[0, 0], 1, "w2"));
        h.target = 1;
        assert_eq!(inside(&h), 2.0 * 0.5 + 3.0 * 0.25);
    }

    #[test]
    fn errors() {
        let h = Hypergraph {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![edge(&[1], 0, "w"), edge(&[0], 1, "w")],
            weights: [("w".to_string(), 1.0)].into(),
            target: 0,
        };
        assert!(matches!(
            hypergraph_to_cg(&h),
            Err(AdapterError::CyclicHypergraph(_))
        ));
        let h = Hypergraph {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![edge(&[1], 0, "w")],
            weights: [("w".to_string(), 1.0)].into(),
            target: 0,
        };
        assert_eq!(
            hypergraph_to_cg(&h).unwrap_err(),
            AdapterError::UnderivableVertex("b".into())
        );
    }
}
