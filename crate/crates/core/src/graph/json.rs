use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ComputationGraph, GraphError, NodeId, Op};

/// Serialized form of a computation graph.
///
/// `xi` optionally attaches a source labelling, keyed by source node id,
/// whose values are parsed by whichever semiring the caller selects.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub nodes: Vec<NodeDoc>,
    pub arcs: Vec<ArcDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_order: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: u32,
    #[serde(default)]
    pub op: Option<Op>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDoc {
    pub id: u32,
    pub tail: u32,
    pub head: u32,
}

fn check_dense(
    kind: &'static str,
    ids: impl Iterator<Item = u32>,
    count: usize,
) -> Result<(), GraphError> {
    let mut seen = vec![false; count];
    for id in ids {
        let slot = seen.get_mut(id as usize);
        match slot {
            Some(s) if !*s => *s = true,
            _ => {
                return Err(GraphError::NonDenseIds {
                    kind,
                    count,
                    found: id,
                })
            }
        }
    }
    Ok(())
}

impl GraphDoc {
    pub fn from_graph(g: &ComputationGraph) -> Self {
        Self {
            nodes: g
                .node_ids()
                .map(|v| NodeDoc {
                    id: v.0,
                    op: g.op(v),
                })
                .collect(),
            arcs: g
                .arc_ids()
                .map(|e| ArcDoc {
                    id: e.0,
                    tail: g.tail(e).0,
                    head: g.head(e).0,
                })
                .collect(),
            source_order: Some(g.sources().iter().map(|v| v.0).collect()),
            xi: None,
        }
    }

    pub fn to_graph(&self) -> Result<ComputationGraph, GraphError> {
        check_dense("node", self.nodes.iter().map(|n| n.id), self.nodes.len())?;
        check_dense("arc", self.arcs.iter().map(|a| a.id), self.arcs.len())?;
        let mut ops = vec![None; self.nodes.len()];
        for n in &self.nodes {
            ops[n.id as usize] = n.op;
        }
        let mut arcs = vec![(NodeId(0), NodeId(0)); self.arcs.len()];
        for a in &self.arcs {
            arcs[a.id as usize] = (NodeId(a.tail), NodeId(a.head));
        }
        let order = self
            .source_order
            .as_ref()
            .map(|o| o.iter().map(|&v| NodeId(v)).collect());
        ComputationGraph::build(ops, arcs, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{
            "nodes": [{"id": 0}, {"id": 1}, {"id": 2, "op": "mul"}],
            "arcs": [{"id": 0, "tail": 0, "head": 2}, {"id": 1, "tail": 1, "head": 2}],
            "source_order": [1, 0]
        }"#;
        let doc: GraphDoc = serde_json::from_str(text).unwrap();
        let g = doc.to_graph().unwrap();
        let back = g.to_doc();
        let again = back.to_graph().unwrap();
        assert_eq!(g, again);
        assert_eq!(again.sources(), &[NodeId(1), NodeId(0)]);
    }

    #[test]
    fn ids_must_be_dense() {
        let doc = GraphDoc {
            nodes: vec![NodeDoc { id: 0, op: None }, NodeDoc { id: 2, op: None }],
            arcs: vec![],
            source_order: None,
            xi: None,
        };
        assert!(matches!(
            doc.to_graph(),
            Err(GraphError::NonDenseIds { .. })
        ));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"nodes": [{"id": 0, "kind": "x"}], "arcs": []}"#;
        assert!(serde_json::from_str::<GraphDoc>(text).is_err());
    }
}
