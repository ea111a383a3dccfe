//! Computation graphs: finite DAGs with parallel arcs, an operation tag on
//! every non-source node, and a fixed ordering of the source nodes.
//!
//! Nodes and arcs are both first-class *elements*. The forward and backward
//! variables live on elements, and the partial order induced by reachability
//! over nodes and arcs drives cutset-to-cutset evaluation.

mod cutset;
mod json;
mod poset;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cutset::{
    advance_cutset, is_antichain_cutset, maximal_chains, Cutset, CutsetStep, CutsetWalker,
    Direction, DEFAULT_CHAIN_CAP,
};
pub use json::{ArcDoc, GraphDoc, NodeDoc};

use poset::Reachability;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A node or an arc of a computation graph.
///
/// The derived ordering (all nodes before all arcs, then by id) is the
/// tie-break used by [`ComputationGraph::schedule`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Node(NodeId),
    Arc(ArcId),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Node(v) => write!(f, "node:{}", v.0),
            Element::Arc(e) => write!(f, "arc:{}", e.0),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Add,
    Mul,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph contains a directed cycle")]
    CycleDetected,
    #[error("internal node {} has no op tag", .0 .0)]
    MissingOpTag(NodeId),
    #[error("source node {} carries an op tag", .0 .0)]
    OpOnSource(NodeId),
    #[error("arc {} refers to undeclared node {}", .arc.0, .node.0)]
    UnknownEndpoint { arc: ArcId, node: NodeId },
    #[error("element {0} does not belong to the graph")]
    UnknownElement(Element),
    #[error("{kind} ids must be exactly 0..{count}, found {found}")]
    NonDenseIds {
        kind: &'static str,
        count: usize,
        found: u32,
    },
    #[error("source_order must list every source exactly once: {0}")]
    BadSourceOrder(String),
    #[error("cutset is already terminal for this direction")]
    AtTerminalCutset,
    #[error("maximal-chain enumeration exceeded the cap of {0} chains")]
    TooLarge(usize),
}

/// A validated, immutable computation graph `(G, op)`.
pub struct ComputationGraph {
    ops: Vec<Option<Op>>,
    arcs: Vec<Edge>,
    in_arcs: Vec<Vec<ArcId>>,
    out_arcs: Vec<Vec<ArcId>>,
    sources: Vec<NodeId>,
    source_pos: Vec<Option<usize>>,
    sinks: Vec<NodeId>,
    schedule: Vec<Element>,
    reach: OnceLock<Reachability>,
}

impl fmt::Debug for ComputationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComputationGraph")
            .field("nodes", &self.ops.len())
            .field("arcs", &self.arcs.len())
            .field("sources", &self.sources)
            .field("sinks", &self.sinks)
            .finish()
    }
}

impl PartialEq for ComputationGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ops == other.ops && self.arcs == other.arcs && self.sources == other.sources
    }
}

impl Clone for ComputationGraph {
    fn clone(&self) -> Self {
        Self {
            ops: self.ops.clone(),
            arcs: self.arcs.clone(),
            in_arcs: self.in_arcs.clone(),
            out_arcs: self.out_arcs.clone(),
            sources: self.sources.clone(),
            source_pos: self.source_pos.clone(),
            sinks: self.sinks.clone(),
            schedule: self.schedule.clone(),
            reach: OnceLock::new(),
        }
    }
}

impl ComputationGraph {
    /// Validates and indexes a graph. Node `i` carries `ops[i]`; arc `j`
    /// is `arcs[j] = (tail, head)`. When `source_order` is `None` the
    /// sources are ordered by ascending id.
    pub fn build(
        ops: Vec<Option<Op>>,
        arcs: Vec<(NodeId, NodeId)>,
        source_order: Option<Vec<NodeId>>,
    ) -> Result<Self, GraphError> {
        let n = ops.len();
        let mut in_arcs = vec![Vec::new(); n];
        let mut out_arcs = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(arcs.len());
        for (j, &(tail, head)) in arcs.iter().enumerate() {
            let arc = ArcId(j as u32);
            for node in [tail, head] {
                if node.index() >= n {
                    return Err(GraphError::UnknownEndpoint { arc, node });
                }
            }
            out_arcs[tail.index()].push(arc);
            in_arcs[head.index()].push(arc);
            edges.push(Edge { tail, head });
        }

        let mut natural_sources = Vec::new();
        for (i, op) in ops.iter().enumerate() {
            let v = NodeId(i as u32);
            match (in_arcs[i].is_empty(), op) {
                (true, Some(_)) => return Err(GraphError::OpOnSource(v)),
                (false, None) => return Err(GraphError::MissingOpTag(v)),
                (true, None) => natural_sources.push(v),
                (false, Some(_)) => {}
            }
        }

        let sources = match source_order {
            None => natural_sources,
            Some(order) => {
                let mut seen = vec![false; n];
                for &v in &order {
                    if v.index() >= n || !in_arcs[v.index()].is_empty() {
                        return Err(GraphError::BadSourceOrder(format!(
                            "node {} is not a source",
                            v.0
                        )));
                    }
                    if std::mem::replace(&mut seen[v.index()], true) {
                        return Err(GraphError::BadSourceOrder(format!(
                            "node {} listed twice",
                            v.0
                        )));
                    }
                }
                if order.len() != natural_sources.len() {
                    return Err(GraphError::BadSourceOrder(format!(
                        "expected {} sources, got {}",
                        natural_sources.len(),
                        order.len()
                    )));
                }
                order
            }
        };
        let mut source_pos = vec![None; n];
        for (k, v) in sources.iter().enumerate() {
            source_pos[v.index()] = Some(k);
        }
        let sinks = (0..n)
            .filter(|&i| out_arcs[i].is_empty())
            .map(|i| NodeId(i as u32))
            .collect();

        let mut g = Self {
            ops,
            arcs: edges,
            in_arcs,
            out_arcs,
            sources,
            source_pos,
            sinks,
            schedule: Vec::new(),
            reach: OnceLock::new(),
        };
        g.schedule = g.linear_extension()?;
        Ok(g)
    }

    /// Kahn's algorithm over `V ∪ E`, always emitting the smallest ready
    /// element. Fails if some node never becomes ready.
    fn linear_extension(&self) -> Result<Vec<Element>, GraphError> {
        let mut pending: Vec<usize> = self.in_arcs.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<Element>> = self
            .node_ids()
            .filter(|v| pending[v.index()] == 0)
            .map(|v| Reverse(Element::Node(v)))
            .collect();
        let mut order = Vec::with_capacity(self.num_elements());
        while let Some(Reverse(x)) = heap.pop() {
            order.push(x);
            match x {
                Element::Node(v) => {
                    for &e in &self.out_arcs[v.index()] {
                        heap.push(Reverse(Element::Arc(e)));
                    }
                }
                Element::Arc(e) => {
                    let h = self.arcs[e.index()].head;
                    pending[h.index()] -= 1;
                    if pending[h.index()] == 0 {
                        heap.push(Reverse(Element::Node(h)));
                    }
                }
            }
        }
        if order.len() != self.num_elements() {
            return Err(GraphError::CycleDetected);
        }
        Ok(order)
    }

    pub fn num_nodes(&self) -> usize {
        self.ops.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_elements(&self) -> usize {
        self.ops.len() + self.arcs.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.ops.len()).map(|i| NodeId(i as u32))
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> + '_ {
        (0..self.arcs.len()).map(|i| ArcId(i as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.node_ids()
            .map(Element::Node)
            .chain(self.arc_ids().map(Element::Arc))
    }

    /// Dense index of an element: nodes first, then arcs.
    pub fn element_index(&self, x: Element) -> usize {
        match x {
            Element::Node(v) => v.index(),
            Element::Arc(e) => self.ops.len() + e.index(),
        }
    }

    pub fn element_at(&self, index: usize) -> Element {
        if index < self.ops.len() {
            Element::Node(NodeId(index as u32))
        } else {
            Element::Arc(ArcId((index - self.ops.len()) as u32))
        }
    }

    pub fn contains(&self, x: Element) -> bool {
        match x {
            Element::Node(v) => v.index() < self.ops.len(),
            Element::Arc(e) => e.index() < self.arcs.len(),
        }
    }

    pub(crate) fn check(&self, x: Element) -> Result<(), GraphError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GraphError::UnknownElement(x))
        }
    }

    /// `None` for source nodes.
    pub fn op(&self, v: NodeId) -> Option<Op> {
        self.ops[v.index()]
    }

    pub fn edge(&self, e: ArcId) -> Edge {
        self.arcs[e.index()]
    }

    pub fn tail(&self, e: ArcId) -> NodeId {
        self.arcs[e.index()].tail
    }

    pub fn head(&self, e: ArcId) -> NodeId {
        self.arcs[e.index()].head
    }

    /// `E⁻(v)`, in arc-id order.
    pub fn in_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.in_arcs[v.index()]
    }

    /// `E⁺(v)`, in arc-id order.
    pub fn out_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.out_arcs[v.index()]
    }

    /// Sources in `source_order`; position `i` is indeterminate `x_i`.
    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    pub fn sinks(&self) -> &[NodeId] {
        &self.sinks
    }

    pub fn is_source(&self, v: NodeId) -> bool {
        self.source_pos[v.index()].is_some()
    }

    pub fn is_sink(&self, v: NodeId) -> bool {
        self.out_arcs[v.index()].is_empty()
    }

    /// Position of `v` in `source_order`.
    pub fn source_position(&self, v: NodeId) -> Option<usize> {
        self.source_pos[v.index()]
    }

    /// Deterministic linear extension of the induced poset on `V ∪ E`.
    pub fn schedule(&self) -> &[Element] {
        &self.schedule
    }

    pub fn source_cutset(&self) -> Cutset {
        Cutset::new(self.sources.iter().map(|&v| Element::Node(v)))
    }

    pub fn sink_cutset(&self) -> Cutset {
        Cutset::new(self.sinks.iter().map(|&v| Element::Node(v)))
    }

    /// `x ≤ y` in the poset induced on `V ∪ E`: `y` is reachable from `x`
    /// along a directed path, counting both nodes and arcs.
    pub fn poset_leq(&self, x: Element, y: Element) -> Result<bool, GraphError> {
        self.check(x)?;
        self.check(y)?;
        let reach = self.reach.get_or_init(|| Reachability::new(self));
        Ok(match (x, y) {
            (Element::Node(u), Element::Node(v)) => reach.reaches(u, v),
            (Element::Arc(e), Element::Arc(f)) => {
                e == f || reach.reaches(self.head(e), self.tail(f))
            }
            (Element::Node(u), Element::Arc(f)) => reach.reaches(u, self.tail(f)),
            (Element::Arc(e), Element::Node(v)) => reach.reaches(self.head(e), v),
        })
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc::from_graph(self)
    }
}

/// Incremental construction with dense ids. Used by the adapters.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ops: Vec<Option<Op>>,
    arcs: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_source(&mut self) -> NodeId {
        self.ops.push(None);
        NodeId(self.ops.len() as u32 - 1)
    }

    pub fn add_node(&mut self, op: Op) -> NodeId {
        self.ops.push(Some(op));
        NodeId(self.ops.len() as u32 - 1)
    }

    pub fn add_arc(&mut self, tail: NodeId, head: NodeId) -> ArcId {
        self.arcs.push((tail, head));
        ArcId(self.arcs.len() as u32 - 1)
    }

    /// Adds `op` fed by one arc from each of `inputs`.
    pub fn add_op(&mut self, op: Op, inputs: &[NodeId]) -> NodeId {
        let v = self.add_node(op);
        for &u in inputs {
            self.add_arc(u, v);
        }
        v
    }

    pub fn num_nodes(&self) -> usize {
        self.ops.len()
    }

    pub fn build(self) -> Result<ComputationGraph, GraphError> {
        ComputationGraph::build(self.ops, self.arcs, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn diamond() -> ComputationGraph {
        // s -e0-> v, s -e1-> v
        ComputationGraph::build(
            vec![None, Some(Op::Add)],
            vec![(NodeId(0), NodeId(1)), (NodeId(0), NodeId(1))],
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_node_is_source_and_sink() {
        let g = ComputationGraph::build(vec![None], vec![], None).unwrap();
        assert_eq!(g.sources(), &[NodeId(0)]);
        assert_eq!(g.sinks(), &[NodeId(0)]);
    }

    #[test]
    fn parallel_arcs_are_distinct() {
        let g = diamond();
        assert_eq!(g.in_arcs(NodeId(1)).len(), 2);
        assert_ne!(g.in_arcs(NodeId(1))[0], g.in_arcs(NodeId(1))[1]);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = ComputationGraph::build(
            vec![Some(Op::Add), Some(Op::Add)],
            vec![(NodeId(0), NodeId(1)), (NodeId(1), NodeId(0))],
            None,
        )
        .unwrap_err();
        assert_eq!(err, GraphError::CycleDetected);
    }

    #[test]
    fn cycle_behind_a_source_is_rejected() {
        let err = ComputationGraph::build(
            vec![None, Some(Op::Add), Some(Op::Mul)],
            vec![
                (NodeId(0), NodeId(1)),
                (NodeId(1), NodeId(2)),
                (NodeId(2), NodeId(1)),
            ],
            None,
        )
        .unwrap_err();
        assert_eq!(err, GraphError::CycleDetected);
    }

    #[test]
    fn op_tag_rules() {
        assert_eq!(
            ComputationGraph::build(vec![Some(Op::Add)], vec![], None).unwrap_err(),
            GraphError::OpOnSource(NodeId(0))
        );
        assert_eq!(
            ComputationGraph::build(vec![None, None], vec![(NodeId(0), NodeId(1))], None)
                .unwrap_err(),
            GraphError::MissingOpTag(NodeId(1))
        );
    }

    #[test]
    fn unknown_endpoint() {
        let err =
            ComputationGraph::build(vec![None], vec![(NodeId(0), NodeId(3))], None).unwrap_err();
        assert!(matches!(err, GraphError::UnknownEndpoint { .. }));
    }

    #[test]
    fn source_order_is_validated() {
        let ops = vec![None, None, Some(Op::Mul)];
        let arcs = vec![(NodeId(0), NodeId(2)), (NodeId(1), NodeId(2))];
        let g =
            ComputationGraph::build(ops.clone(), arcs.clone(), Some(vec![NodeId(1), NodeId(0)]))
                .unwrap();
        assert_eq!(g.sources(), &[NodeId(1), NodeId(0)]);
        assert_eq!(g.source_position(NodeId(0)), Some(1));
        for bad in [
            vec![NodeId(0)],
            vec![NodeId(0), NodeId(2)],
            vec![NodeId(0), NodeId(0)],
        ] {
            assert!(matches!(
                ComputationGraph::build(ops.clone(), arcs.clone(), Some(bad)),
                Err(GraphError::BadSourceOrder(_))
            ));
        }
    }

    #[test]
    fn disconnected_and_empty_graphs_are_legal() {
        let g = ComputationGraph::build(vec![None, None], vec![], None).unwrap();
        assert_eq!(g.sources().len(), 2);
        assert_eq!(g.sinks().len(), 2);
        let empty = ComputationGraph::build(vec![], vec![], None).unwrap();
        assert_eq!(empty.num_elements(), 0);
    }

    #[test]
    fn schedule_of_chain_and_isolated_nodes() {
        let chain = ComputationGraph::build(
            vec![None, Some(Op::Add)],
            vec![(NodeId(0), NodeId(1))],
            None,
        )
        .unwrap();
        assert_eq!(
            chain.schedule(),
            &[
                Element::Node(NodeId(0)),
                Element::Arc(ArcId(0)),
                Element::Node(NodeId(1))
            ]
        );
        let iso = ComputationGraph::build(vec![None, None], vec![], None).unwrap();
        assert_eq!(
            iso.schedule(),
            &[Element::Node(NodeId(0)), Element::Node(NodeId(1))]
        );
    }

    #[test]
    fn schedule_respects_order_on_diamond() {
        let g = diamond();
        let pos: Vec<usize> = {
            let mut p = vec![0; g.num_elements()];
            for (i, &x) in g.schedule().iter().enumerate() {
                p[g.element_index(x)] = i;
            }
            p
        };
        for x in g.elements() {
            for y in g.elements() {
                if g.poset_leq(x, y).unwrap() {
                    assert!(pos[g.element_index(x)] <= pos[g.element_index(y)]);
                }
            }
        }
    }

    #[test]
    fn poset_basics() {
        let g = diamond();
        let s = Element::Node(NodeId(0));
        let v = Element::Node(NodeId(1));
        let e0 = Element::Arc(ArcId(0));
        let e1 = Element::Arc(ArcId(1));
        assert!(g.poset_leq(s, e0).unwrap());
        assert!(g.poset_leq(e0, v).unwrap());
        assert!(g.poset_leq(s, v).unwrap());
        assert!(g.poset_leq(e0, e0).unwrap());
        assert!(!g.poset_leq(e0, e1).unwrap());
        assert!(!g.poset_leq(v, s).unwrap());
        assert_eq!(
            g.poset_leq(s, Element::Arc(ArcId(7))).unwrap_err(),
            GraphError::UnknownElement(Element::Arc(ArcId(7)))
        );
    }

    #[test]
    fn distinct_sources_are_incomparable() {
        // three sources feeding one product
        let g = ComputationGraph::build(
            vec![None, None, None, Some(Op::Mul)],
            vec![
                (NodeId(0), NodeId(3)),
                (NodeId(1), NodeId(3)),
                (NodeId(2), NodeId(3)),
            ],
            None,
        )
        .unwrap();
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    let x = Element::Node(NodeId(a));
                    let y = Element::Node(NodeId(b));
                    assert!(!g.poset_leq(x, y).unwrap());
                }
            }
        }
    }
}
