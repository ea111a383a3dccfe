use std::collections::BTreeSet;

use super::{ComputationGraph, Element, GraphError, NodeId};

/// Default cap on the number of maximal chains enumerated by
/// [`maximal_chains`] and [`is_antichain_cutset`].
pub const DEFAULT_CHAIN_CAP: usize = 1_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A set of elements, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cutset(Vec<Element>);

impl Cutset {
    pub fn new(elements: impl IntoIterator<Item = Element>) -> Self {
        let set: BTreeSet<Element> = elements.into_iter().collect();
        Self(set.into_iter().collect())
    }

    pub fn elements(&self) -> &[Element] {
        &self.0
    }

    pub fn contains(&self, x: Element) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One cutset transition `C -> (C ∪ D') \ D`.
///
/// Forward: every element of `covered` (D) is covered by every element of
/// `covering` (D'), and `pivot ∈ C` is the element whose covers are D'.
/// Backward is the mirror image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutsetStep {
    pub pivot: Element,
    pub covering: Vec<Element>,
    pub covered: Vec<Element>,
}

fn step_at(g: &ComputationGraph, dir: Direction, y: Element) -> CutsetStep {
    let arcs = |a: &[super::ArcId]| a.iter().map(|&e| Element::Arc(e)).collect::<Vec<_>>();
    match (dir, y) {
        (Direction::Forward, Element::Arc(e)) => {
            let x = g.tail(e);
            CutsetStep {
                pivot: Element::Node(x),
                covering: arcs(g.out_arcs(x)),
                covered: vec![Element::Node(x)],
            }
        }
        (Direction::Forward, Element::Node(v)) => CutsetStep {
            pivot: Element::Arc(g.in_arcs(v)[0]),
            covering: vec![Element::Node(v)],
            covered: arcs(g.in_arcs(v)),
        },
        (Direction::Backward, Element::Arc(e)) => {
            let x = g.head(e);
            CutsetStep {
                pivot: Element::Node(x),
                covering: arcs(g.in_arcs(x)),
                covered: vec![Element::Node(x)],
            }
        }
        (Direction::Backward, Element::Node(v)) => CutsetStep {
            pivot: Element::Arc(g.out_arcs(v)[0]),
            covering: vec![Element::Node(v)],
            covered: arcs(g.out_arcs(v)),
        },
    }
}

/// Marks `↓C` (forward) or `↑C` (backward).
fn closure(g: &ComputationGraph, c: &Cutset, dir: Direction) -> Vec<bool> {
    let mut done = vec![false; g.num_elements()];
    let mut stack: Vec<Element> = c.elements().to_vec();
    while let Some(x) = stack.pop() {
        let i = g.element_index(x);
        if std::mem::replace(&mut done[i], true) {
            continue;
        }
        match (dir, x) {
            (Direction::Forward, Element::Node(v)) => {
                stack.extend(g.in_arcs(v).iter().map(|&e| Element::Arc(e)))
            }
            (Direction::Forward, Element::Arc(e)) => stack.push(Element::Node(g.tail(e))),
            (Direction::Backward, Element::Node(v)) => {
                stack.extend(g.out_arcs(v).iter().map(|&e| Element::Arc(e)))
            }
            (Direction::Backward, Element::Arc(e)) => stack.push(Element::Node(g.head(e))),
        }
    }
    done
}

fn next_pending(g: &ComputationGraph, done: &[bool], dir: Direction) -> Option<Element> {
    let pick = |x: &&Element| !done[g.element_index(**x)];
    match dir {
        Direction::Forward => g.schedule().iter().find(pick).copied(),
        Direction::Backward => g.schedule().iter().rev().find(pick).copied(),
    }
}

/// Computes the successor of the antichain cutset `c` in direction `dir`.
///
/// The pivot is determined by the first pending element of the graph's
/// schedule (last, going backward), so repeated calls from the source
/// cutset reproduce [`CutsetWalker`] exactly.
pub fn advance_cutset(
    g: &ComputationGraph,
    c: &Cutset,
    dir: Direction,
) -> Result<(CutsetStep, Cutset), GraphError> {
    for &x in c.elements() {
        g.check(x)?;
    }
    let done = closure(g, c, dir);
    let y = next_pending(g, &done, dir).ok_or(GraphError::AtTerminalCutset)?;
    let step = step_at(g, dir, y);
    let next = Cutset::new(
        c.elements()
            .iter()
            .copied()
            .filter(|x| !step.covered.contains(x))
            .chain(step.covering.iter().copied()),
    );
    Ok((step, next))
}

/// Walks a sequence of antichain cutsets from `src` to `snk` (or back).
///
/// Keeps the closure as a bitmap and a monotone cursor into the schedule,
/// so a full walk costs `O(|V| + |E|)` plus the size of each step.
pub struct CutsetWalker<'g> {
    graph: &'g ComputationGraph,
    dir: Direction,
    done: Vec<bool>,
    in_cut: Vec<bool>,
    cursor: usize,
}

impl<'g> CutsetWalker<'g> {
    pub fn new(graph: &'g ComputationGraph, dir: Direction) -> Self {
        let n = graph.num_elements();
        let mut done = vec![false; n];
        let start: &[NodeId] = match dir {
            Direction::Forward => graph.sources(),
            Direction::Backward => graph.sinks(),
        };
        for v in start {
            done[v.index()] = true;
        }
        Self {
            graph,
            dir,
            in_cut: done.clone(),
            done,
            cursor: 0,
        }
    }

    pub fn direction(&self) -> Direction {
        self.dir
    }

    /// The current cutset.
    pub fn current(&self) -> Cutset {
        Cutset(
            (0..self.in_cut.len())
                .filter(|&i| self.in_cut[i])
                .map(|i| self.graph.element_at(i))
                .collect(),
        )
    }

    pub fn is_terminal(&self) -> bool {
        self.peek().is_none()
    }

    fn peek(&self) -> Option<Element> {
        let sched = self.graph.schedule();
        let mut k = self.cursor;
        while k < sched.len() {
            let x = match self.dir {
                Direction::Forward => sched[k],
                Direction::Backward => sched[sched.len() - 1 - k],
            };
            if !self.done[self.graph.element_index(x)] {
                return Some(x);
            }
            k += 1;
        }
        None
    }

    /// Applies one transition and returns it, or `None` at the terminal cutset.
    pub fn advance(&mut self) -> Option<CutsetStep> {
        let sched = self.graph.schedule();
        let y = loop {
            if self.cursor >= sched.len() {
                return None;
            }
            let x = match self.dir {
                Direction::Forward => sched[self.cursor],
                Direction::Backward => sched[sched.len() - 1 - self.cursor],
            };
            if !self.done[self.graph.element_index(x)] {
                break x;
            }
            self.cursor += 1;
        };
        let step = step_at(self.graph, self.dir, y);
        for &x in &step.covered {
            self.in_cut[self.graph.element_index(x)] = false;
        }
        for &x in &step.covering {
            let i = self.graph.element_index(x);
            self.in_cut[i] = true;
            self.done[i] = true;
        }
        Some(step)
    }
}

impl Iterator for CutsetWalker<'_> {
    type Item = CutsetStep;

    fn next(&mut self) -> Option<CutsetStep> {
        self.advance()
    }
}

/// All maximal chains of the induced poset, i.e. the source-to-sink paths
/// written as alternating node/arc sequences. Errors once more than `cap`
/// chains have been produced.
pub fn maximal_chains(g: &ComputationGraph, cap: usize) -> Result<Vec<Vec<Element>>, GraphError> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    for &s in g.sources() {
        walk_chains(g, s, &mut path, &mut out, cap)?;
    }
    Ok(out)
}

fn walk_chains(
    g: &ComputationGraph,
    v: NodeId,
    path: &mut Vec<Element>,
    out: &mut Vec<Vec<Element>>,
    cap: usize,
) -> Result<(), GraphError> {
    path.push(Element::Node(v));
    if g.is_sink(v) {
        if out.len() >= cap {
            return Err(GraphError::TooLarge(cap));
        }
        out.push(path.clone());
    } else {
        for &e in g.out_arcs(v) {
            path.push(Element::Arc(e));
            walk_chains(g, g.head(e), path, out, cap)?;
            path.pop();
        }
    }
    path.pop();
    Ok(())
}

/// Whether `c` is an antichain meeting every maximal chain.
pub fn is_antichain_cutset(
    g: &ComputationGraph,
    c: &Cutset,
    cap: usize,
) -> Result<bool, GraphError> {
    let xs = c.elements();
    for &x in xs {
        g.check(x)?;
    }
    for (i, &x) in xs.iter().enumerate() {
        for &y in &xs[i + 1..] {
            if g.poset_leq(x, y)? || g.poset_leq(y, x)? {
                return Ok(false);
            }
        }
    }
    let chains = maximal_chains(g, cap)?;
    Ok(chains
        .iter()
        .all(|chain| chain.iter().any(|&x| c.contains(x))))
}
