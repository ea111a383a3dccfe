//! Random computation graphs for property tests and benches.

use rand::Rng;

use crate::graph::{ComputationGraph, GraphBuilder, NodeId, Op};

/// Size limits for [`random_graph`].
#[derive(Copy, Clone, Debug)]
pub struct GraphShape {
    pub max_sources: usize,
    /// Bound on nodes plus arcs.
    pub max_elements: usize,
    pub max_in_degree: usize,
}

impl Default for GraphShape {
    fn default() -> Self {
        Self {
            max_sources: 10,
            max_elements: 30,
            max_in_degree: 3,
        }
    }
}

/// A random DAG with between one and `max_sources` sources. Each internal
/// node draws its in-arcs from earlier nodes (parallel arcs allowed) and a
/// random op tag. Recent nodes are preferred as tails, so graphs tend to be
/// deep rather than flat.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, shape: GraphShape) -> ComputationGraph {
    let n_src = rng.gen_range(1..=shape.max_sources.max(1));
    let mut b = GraphBuilder::new();
    let mut nodes: Vec<NodeId> = (0..n_src).map(|_| b.add_source()).collect();
    let mut elements = n_src;
    loop {
        let k = rng.gen_range(1..=shape.max_in_degree.max(1));
        if elements + 1 + k > shape.max_elements {
            break;
        }
        let inputs: Vec<NodeId> = (0..k)
            .map(|_| {
                let lo = nodes.len().saturating_sub(6);
                if rng.gen_bool(0.6) {
                    nodes[rng.gen_range(lo..nodes.len())]
                } else {
                    nodes[rng.gen_range(0..nodes.len())]
                }
            })
            .collect();
        let op = if rng.gen_bool(0.5) { Op::Add } else { Op::Mul };
        nodes.push(b.add_op(op, &inputs));
        elements += 1 + k;
    }
    b.build().expect("generated graph is a valid DAG")
}

/// Large layered graphs for benchmarks: `width` nodes per layer, each fed
/// by `fan_in` nodes of the previous layer.
pub fn layered_graph<R: Rng + ?Sized>(
    rng: &mut R,
    width: usize,
    depth: usize,
    fan_in: usize,
) -> ComputationGraph {
    let mut b = GraphBuilder::new();
    let mut layer: Vec<NodeId> = (0..width).map(|_| b.add_source()).collect();
    for _ in 0..depth {
        layer = (0..width)
            .map(|_| {
                let inputs: Vec<NodeId> = (0..fan_in)
                    .map(|_| layer[rng.gen_range(0..layer.len())])
                    .collect();
                let op = if rng.gen_bool(0.5) { Op::Add } else { Op::Mul };
                b.add_op(op, &inputs)
            })
            .collect();
    }
    b.build().expect("layered graph is a valid DAG")
}
