use super::{ComputationGraph, Element, NodeId};

/// Node-to-node reachability as one bit row per node.
pub(super) struct Reachability {
    words: usize,
    rows: Vec<u64>,
}

impl Reachability {
    pub(super) fn new(g: &ComputationGraph) -> Self {
        let n = g.num_nodes();
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; words * n];
        // reverse schedule visits every node after all of its successors
        for &x in g.schedule().iter().rev() {
            let Element::Node(u) = x else { continue };
            let base = u.index() * words;
            rows[base + u.index() / 64] |= 1 << (u.index() % 64);
            for &e in g.out_arcs(u) {
                let h = g.head(e).index() * words;
                for w in 0..words {
                    rows[base + w] |= rows[h + w];
                }
            }
        }
        Self { words, rows }
    }

    pub(super) fn reaches(&self, u: NodeId, v: NodeId) -> bool {
        let row = u.index() * self.words;
        self.rows[row + v.index() / 64] >> (v.index() % 64) & 1 == 1
    }
}
