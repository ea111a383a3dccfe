//! Acyclic factor graphs, unrolled along a rooted message-passing schedule.

use serde::{Deserialize, Serialize};

use super::{AdapterError, Built, Recorder};
use crate::graph::{NodeId, Op};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FgVariable {
    pub name: String,
    pub domain: usize,
}

/// A factor over an ordered scope. The table is row-major: the last scope
/// variable varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FgFactor {
    pub name: String,
    pub scope: Vec<usize>,
    pub table: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorGraph {
    pub variables: Vec<FgVariable>,
    pub factors: Vec<FgFactor>,
    /// Variable the schedule is rooted at; the last variable if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl FactorGraph {
    pub fn validate(&self) -> Result<(), AdapterError> {
        let nv = self.variables.len();
        if nv == 0 {
            return Err(AdapterError::InvalidModel(
                "factor graph has no variables".into(),
            ));
        }
        if let Some(v) = self.variables.iter().find(|v| v.domain == 0) {
            return Err(AdapterError::InvalidModel(format!(
                "variable `{}` has an empty domain",
                v.name
            )));
        }
        if let Some(r) = self.root {
            if r >= nv {
                return Err(AdapterError::InvalidModel(format!(
                    "root {r} is not a variable"
                )));
            }
        }
        for f in &self.factors {
            if f.scope.is_empty() {
                return Err(AdapterError::InvalidModel(format!(
                    "factor `{}` has an empty scope",
                    f.name
                )));
            }
            if let Some(v) = f.scope.iter().find(|&&v| v >= nv) {
                return Err(AdapterError::InvalidModel(format!(
                    "factor `{}` refers to variable {v}",
                    f.name
                )));
            }
            let size: usize = f.scope.iter().map(|&v| self.variables[v].domain).product();
            if f.table.len() != size {
                return Err(AdapterError::InvalidModel(format!(
                    "factor `{}` needs {size} table entries, found {}",
                    f.name,
                    f.table.len()
                )));
            }
            if f.table.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(AdapterError::InvalidModel(format!(
                    "factor `{}` has a negative entry",
                    f.name
                )));
            }
        }
        let mut parent: Vec<usize> = (0..nv + self.factors.len()).collect();
        for (i, f) in self.factors.iter().enumerate() {
            for &v in &f.scope {
                let (a, b) = (find(&mut parent, v), find(&mut parent, nv + i));
                if a == b {
                    return Err(AdapterError::CyclicFactorGraph(f.name.clone()));
                }
                parent[a] = b;
            }
        }
        Ok(())
    }

    /// Product of all factor entries under a full configuration.
    pub fn weight(&self, config: &[usize]) -> f64 {
        self.factors
            .iter()
            .map(|f| f.table[self.table_index(f, |v| config[v])])
            .product()
    }

    fn table_index(&self, f: &FgFactor, value: impl Fn(usize) -> usize) -> usize {
        f.scope
            .iter()
            .fold(0, |acc, &v| acc * self.variables[v].domain + value(v))
    }

    fn digits(&self, f: &FgFactor, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; f.scope.len()];
        for (pos, &v) in f.scope.iter().enumerate().rev() {
            let k = self.variables[v].domain;
            d[pos] = idx % k;
            idx /= k;
        }
        d
    }
}

/// The unrolled graph and the source position of every variable
/// assignment, `assignment[v][x]`.
#[derive(Clone, Debug)]
pub struct FactorGraphBuilt {
    pub built: Built,
    pub assignment: Vec<Vec<usize>>,
}

struct Unroll<'a> {
    fg: &'a FactorGraph,
    var_factors: Vec<Vec<usize>>,
    r: Recorder,
    assignment: Vec<Vec<usize>>,
    visited: Vec<bool>,
}

impl Unroll<'_> {
    /// Message from variable `v` towards `parent`, one node per value.
    fn variable(&mut self, v: usize, parent: Option<usize>) -> Vec<NodeId> {
        self.visited[v] = true;
        let children: Vec<usize> = self.var_factors[v]
            .iter()
            .copied()
            .filter(|&f| Some(f) != parent)
            .collect();
        let msgs: Vec<Vec<NodeId>> = children.iter().map(|&f| self.factor(f, v)).collect();
        let name = &self.fg.variables[v].name;
        (0..self.fg.variables[v].domain)
            .map(|x| {
                self.assignment[v][x] = self.r.next_source();
                let mut inputs = vec![self.r.source(1.0, format!("{name}={x}"))];
                inputs.extend(msgs.iter().map(|m| m[x]));
                self.r.op(Op::Mul, &inputs)
            })
            .collect()
    }

    /// Message from factor `f` towards variable `p`, one node per value of `p`.
    fn factor(&mut self, f: usize, p: usize) -> Vec<NodeId> {
        let fac = &self.fg.factors[f];
        let p_pos = fac
            .scope
            .iter()
            .position(|&v| v == p)
            .expect("parent in scope");
        let msgs: Vec<Option<Vec<NodeId>>> = fac
            .scope
            .iter()
            .enumerate()
            .map(|(pos, &c)| (pos != p_pos).then(|| self.variable(c, Some(f))))
            .collect();
        let mut terms = vec![Vec::new(); self.fg.variables[p].domain];
        for (idx, &entry) in fac.table.iter().enumerate() {
            let d = self.fg.digits(fac, idx);
            let args: Vec<String> = fac
                .scope
                .iter()
                .zip(&d)
                .map(|(&v, x)| format!("{}={x}", self.fg.variables[v].name))
                .collect();
            let mut inputs = vec![self
                .r
                .source(entry, format!("{}({})", fac.name, args.join(",")))];
            for (pos, m) in msgs.iter().enumerate() {
                if let Some(m) = m {
                    inputs.push(m[d[pos]]);
                }
            }
            terms[d[p_pos]].push(self.r.op(Op::Mul, &inputs));
        }
        terms.iter().map(|t| self.r.op(Op::Add, t)).collect()
    }
}

/// Builds the message-passing graph of an acyclic factor graph. Every
/// variable value and every table entry gets its own source (value 1 and
/// the entry, respectively). Variables send the product of their
/// assignment source and incoming messages; factors send, per value of the
/// receiving variable, the sum over the other scope variables of the entry
/// times the incoming messages. Each connected component is rooted at
/// `fg.root` or its last variable, and components are multiplied, so the
/// sink is the partition sum.
pub fn factor_graph_to_cg(fg: &FactorGraph) -> Result<FactorGraphBuilt, AdapterError> {
    fg.validate()?;
    let nv = fg.variables.len();
    let mut var_factors = vec![Vec::new(); nv];
    for (i, f) in fg.factors.iter().enumerate() {
        for &v in &f.scope {
            var_factors[v].push(i);
        }
    }
    let mut u = Unroll {
        fg,
        var_factors,
        r: Recorder::default(),
        assignment: fg.variables.iter().map(|v| vec![0; v.domain]).collect(),
        visited: vec![false; nv],
    };
    let mut roots = vec![fg.root.unwrap_or(nv - 1)];
    roots.extend((0..nv).rev());
    let mut components = Vec::new();
    for r in roots {
        if u.visited[r] {
            continue;
        }
        let msgs = u.variable(r, None);
        components.push(u.r.op(Op::Add, &msgs));
    }
    u.r.op(Op::Mul, &components);
    Ok(FactorGraphBuilt {
        built: u.r.finish()?,
        assignment: u.assignment,
    })
}
