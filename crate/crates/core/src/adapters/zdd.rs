//! Zero-suppressed decision diagrams.

use serde::{Deserialize, Serialize};

use super::{AdapterError, Built, Recorder};
use crate::algebra::{NatPoly, NatPolySemiring};
use crate::engine::{free_forward, EngineError};
use crate::graph::{NodeId, Op};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    Bot,
    Top,
}

/// A child pointer: a terminal (`"bot"`/`"top"` in JSON) or a node index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZddRef {
    Terminal(Terminal),
    Node(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZddNode {
    pub var: usize,
    pub lo: ZddRef,
    pub hi: ZddRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zdd {
    pub num_vars: usize,
    pub nodes: Vec<ZddNode>,
    pub root: ZddRef,
}

impl Zdd {
    pub fn validate(&self) -> Result<(), AdapterError> {
        let check = |r: ZddRef, parent_var: Option<usize>| -> Result<(), AdapterError> {
            if let ZddRef::Node(i) = r {
                let n = self.nodes.get(i).ok_or_else(|| {
                    AdapterError::InvalidModel(format!("reference to missing node {i}"))
                })?;
                if parent_var.is_some_and(|p| n.var <= p) {
                    return Err(AdapterError::InvalidModel(format!(
                        "node {i} (variable {}) breaks the variable order",
                        n.var
                    )));
                }
            }
            Ok(())
        };
        check(self.root, None)?;
        for n in &self.nodes {
            if n.var >= self.num_vars {
                return Err(AdapterError::InvalidModel(format!(
                    "variable {} outside 0..{}",
                    n.var, self.num_vars
                )));
            }
            check(n.lo, Some(n.var))?;
            check(n.hi, Some(n.var))?;
        }
        Ok(())
    }

    /// Whether the assignment (bit `i` = variable `i`) is in the family.
    pub fn contains(&self, assignment: &[bool]) -> bool {
        let mut cur = self.root;
        let mut next_var = 0;
        loop {
            match cur {
                ZddRef::Terminal(t) => {
                    return t == Terminal::Top && assignment[next_var..].iter().all(|b| !b)
                }
                ZddRef::Node(i) => {
                    let n = &self.nodes[i];
                    if assignment[next_var..n.var].iter().any(|&b| b) {
                        return false;
                    }
                    cur = if assignment[n.var] { n.hi } else { n.lo };
                    next_var = n.var + 1;
                }
            }
        }
    }
}

/// The diagram's graph. `source_var[k]` is the variable of the `k`-th
/// source, or `None` for the constant source standing for `⊤` in a sum.
#[derive(Clone, Debug)]
pub struct ZddBuilt {
    pub built: Built,
    pub source_var: Vec<Option<usize>>,
}

impl ZddBuilt {
    /// Source values from per-variable weights; the constant source gets 1.
    pub fn xi(&self, weights: &[f64]) -> Vec<f64> {
        self.source_var
            .iter()
            .map(|v| v.map_or(1.0, |v| weights[v]))
            .collect()
    }
}

#[derive(Copy, Clone)]
enum Poly {
    Zero,
    One,
    Node(NodeId),
}

struct Unroll<'a> {
    z: &'a Zdd,
    r: Recorder,
    var_source: Vec<Option<NodeId>>,
    constant: Option<NodeId>,
    source_var: Vec<Option<usize>>,
    memo: Vec<Option<Poly>>,
}

impl Unroll<'_> {
    fn is_zero(&self, r: ZddRef, zero: &[bool]) -> bool {
        match r {
            ZddRef::Terminal(t) => t == Terminal::Bot,
            ZddRef::Node(i) => zero[i],
        }
    }

    fn node_of(&mut self, p: Poly) -> NodeId {
        match p {
            Poly::Node(n) => n,
            Poly::One => *self.constant.get_or_insert_with(|| {
                self.source_var.push(None);
                self.r.source(1.0, "constant 1".into())
            }),
            Poly::Zero => unreachable!("zero branches are omitted"),
        }
    }

    fn poly(&mut self, r: ZddRef) -> Poly {
        let i = match r {
            ZddRef::Terminal(Terminal::Bot) => return Poly::Zero,
            ZddRef::Terminal(Terminal::Top) => return Poly::One,
            ZddRef::Node(i) => i,
        };
        if let Some(p) = self.memo[i] {
            return p;
        }
        let n = &self.z.nodes[i];
        let (var, lo, hi) = (n.var, n.lo, n.hi);
        let lo = self.poly(lo);
        let hi = match self.poly(hi) {
            Poly::Zero => Poly::Zero,
            Poly::One => Poly::Node(self.var_source[var].expect("variable used on a hi-edge")),
            Poly::Node(h) => {
                let x = self.var_source[var].expect("variable used on a hi-edge");
                Poly::Node(self.r.fresh(Op::Mul, &[x, h]))
            }
        };
        let p = match (lo, hi) {
            (Poly::Zero, t) | (t, Poly::Zero) => t,
            (a, b) => {
                let a = self.node_of(a);
                let b = self.node_of(b);
                Poly::Node(self.r.fresh(Op::Add, &[a, b]))
            }
        };
        self.memo[i] = Some(p);
        p
    }
}

/// Builds the graph of the diagram's polynomial
/// `P(node) = P(lo) + x_var·P(hi)`, with `P(⊥) = 0` realized by omitting
/// the branch and `P(⊤) = 1` by dropping the factor. A `⊤` that has to be
/// added (a lo-child next to a nonzero hi-branch, or a `⊤` root) is a
/// constant source, created after the variable sources. Variable sources
/// exist only for variables that appear on a nonzero hi-branch and are
/// created in variable order.
pub fn zdd_to_cg(z: &Zdd) -> Result<ZddBuilt, AdapterError> {
    z.validate()?;
    // Nodes appear after their parents in variable order, so processing in
    // decreasing variable order sees children first.
    let mut order: Vec<usize> = (0..z.nodes.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(z.nodes[i].var));
    let mut zero = vec![false; z.nodes.len()];
    let mut unroll = Unroll {
        z,
        r: Recorder::default(),
        var_source: vec![None; z.num_vars],
        constant: None,
        source_var: Vec::new(),
        memo: vec![None; z.nodes.len()],
    };
    for &i in &order {
        let n = &z.nodes[i];
        zero[i] = unroll.is_zero(n.lo, &zero) && unroll.is_zero(n.hi, &zero);
    }
    let mut reachable = vec![false; z.nodes.len()];
    let mut stack: Vec<ZddRef> = vec![z.root];
    let mut used = vec![false; z.num_vars];
    while let Some(r) = stack.pop() {
        if let ZddRef::Node(i) = r {
            if std::mem::replace(&mut reachable[i], true) {
                continue;
            }
            let n = &z.nodes[i];
            if !unroll.is_zero(n.hi, &zero) {
                used[n.var] = true;
            }
            stack.push(n.lo);
            stack.push(n.hi);
        }
    }
    for (v, &u) in used.iter().enumerate() {
        if u {
            unroll.source_var.push(Some(v));
            unroll.var_source[v] = Some(unroll.r.source(1.0, format!("x{v}")));
        }
    }
    if let Poly::One = unroll.poly(z.root) {
        unroll.node_of(Poly::One);
    }
    Ok(ZddBuilt {
        built: unroll.r.finish()?,
        source_var: unroll.source_var,
    })
}

/// The polynomial over `x₀ … x_{num_vars-1}` represented by the diagram:
/// the free forward variable at the sink, with each source renamed to its
/// ZDD variable and the constant source set to 1.
pub fn zdd_polynomial(z: &Zdd) -> Result<NatPoly, AdapterError> {
    let b = zdd_to_cg(z)?;
    let g = &b.built.graph;
    let free = free_forward(g)?;
    let n = z.num_vars;
    let values: Vec<NatPoly> = b
        .source_var
        .iter()
        .map(|v| v.map_or_else(|| NatPoly::one(n), |v| NatPoly::var(n, v)))
        .collect();
    free.sink_sum()
        .eval(&NatPolySemiring::new(n), &values)
        .map_err(|e| AdapterError::Engine(EngineError::ShapeMismatch(e.to_string())))
}
