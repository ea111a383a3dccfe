//! Input documents. Every document is a JSON object; the `kind` field picks
//! the schema and defaults to `graph`.

use std::collections::BTreeMap;

use semifb::adapters::{
    factor_graph_to_cg, hypergraph_to_cg, trellis_to_cg, zdd_to_cg, AdTape, AdTapeDoc, FactorGraph,
    Hypergraph, Trellis, Zdd,
};
use semifb::algebra::format_f64;
use semifb::graph::{ComputationGraph, GraphDoc};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::CliError;

/// A graph ready to run, with source values as text for the chosen semiring
/// to parse.
pub struct Loaded {
    pub kind: &'static str,
    pub graph: ComputationGraph,
    pub xi: Option<Vec<String>>,
    pub legend: Vec<String>,
    pub tape: Option<AdTape>,
}

impl Loaded {
    pub fn xi(&self) -> Result<&[String], CliError> {
        self.xi
            .as_deref()
            .ok_or_else(|| CliError::Parse("input: no source values (field `xi`)".into()))
    }

    /// Source values as reals, for the pipelines that only run over ℝ.
    pub fn xi_real(&self) -> Result<Vec<f64>, CliError> {
        self.xi()?
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Parse(format!("xi[{i}]: `{t}` is not a real number")))
            })
            .collect()
    }

    /// The graph as a `graph` document carrying this input's source values.
    pub fn graph_doc(&self) -> GraphDoc {
        let mut doc = self.graph.to_doc();
        doc.xi = self.xi.as_ref().map(|xi| {
            self.graph
                .sources()
                .iter()
                .zip(xi)
                .map(|(v, x)| (v.0.to_string(), x.clone()))
                .collect()
        });
        doc
    }
}

fn typed<T: DeserializeOwned>(kind: &str, v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse(format!("{kind}: {e}")))
}

fn reals(xi: &[f64]) -> Option<Vec<String>> {
    Some(xi.iter().map(|&x| format_f64(x)).collect())
}

fn from_graph_doc(doc: GraphDoc) -> Result<Loaded, CliError> {
    let graph = doc.to_graph()?;
    let xi = match &doc.xi {
        None => None,
        Some(map) => Some(graph_xi(&graph, map)?),
    };
    let legend = graph
        .sources()
        .iter()
        .map(|v| format!("node {}", v.0))
        .collect();
    Ok(Loaded {
        kind: "graph",
        graph,
        xi,
        legend,
        tape: None,
    })
}

fn graph_xi(g: &ComputationGraph, map: &BTreeMap<String, String>) -> Result<Vec<String>, CliError> {
    for key in map.keys() {
        let known = key
            .parse::<u32>()
            .ok()
            .is_some_and(|id| g.sources().iter().any(|v| v.0 == id));
        if !known {
            return Err(CliError::Parse(format!(
                "xi: `{key}` is not a source node id"
            )));
        }
    }
    g.sources()
        .iter()
        .map(|v| {
            map.get(&v.0.to_string())
                .cloned()
                .ok_or_else(|| CliError::Parse(format!("xi: no value for source node {}", v.0)))
        })
        .collect()
}

pub fn parse(text: &str) -> Result<Loaded, CliError> {
    let mut v: Value =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("input: {e}")))?;
    let Some(obj) = v.as_object_mut() else {
        return Err(CliError::Parse("input: expected a JSON object".into()));
    };
    let kind = match obj.remove("kind") {
        None => "graph".to_string(),
        Some(Value::String(k)) => k,
        Some(other) => {
            return Err(CliError::Parse(format!(
                "kind: expected a string, found {other}"
            )))
        }
    };
    match kind.as_str() {
        "graph" => from_graph_doc(typed("graph", v)?),
        "trellis" => {
            let t: Trellis = typed("trellis", v)?;
            let b = trellis_to_cg(&t)?;
            Ok(Loaded {
                kind: "trellis",
                xi: reals(&b.built.xi),
                graph: b.built.graph,
                legend: b.built.legend,
                tape: None,
            })
        }
        "factor_graph" => {
            let fg: FactorGraph = typed("factor_graph", v)?;
            let b = factor_graph_to_cg(&fg)?;
            Ok(Loaded {
                kind: "factor_graph",
                xi: reals(&b.built.xi),
                graph: b.built.graph,
                legend: b.built.legend,
                tape: None,
            })
        }
        "zdd" => {
            let weights: Option<Vec<f64>> = match obj_remove(&mut v, "weights") {
                None => None,
                Some(w) => Some(typed("zdd.weights", w)?),
            };
            let z: Zdd = typed("zdd", v)?;
            let weights = weights.unwrap_or_else(|| vec![1.0; z.num_vars]);
            if weights.len() != z.num_vars {
                return Err(CliError::Parse(format!(
                    "zdd.weights: expected {} weights, found {}",
                    z.num_vars,
                    weights.len()
                )));
            }
            let b = zdd_to_cg(&z)?;
            Ok(Loaded {
                kind: "zdd",
                xi: reals(&b.xi(&weights)),
                graph: b.built.graph,
                legend: b.built.legend,
                tape: None,
            })
        }
        "hypergraph" => {
            let h: Hypergraph = typed("hypergraph", v)?;
            let b = hypergraph_to_cg(&h)?;
            Ok(Loaded {
                kind: "hypergraph",
                xi: reals(&b.xi),
                graph: b.graph,
                legend: b.legend,
                tape: None,
            })
        }
        "tape" => {
            let doc: AdTapeDoc = typed("tape", v)?;
            let tape = AdTape::from_doc(doc)?;
            Ok(Loaded {
                kind: "tape",
                xi: reals(&tape.values()),
                graph: tape.graph.clone(),
                legend: tape.tags.iter().map(|t| serde_json::to_string(t).unwrap_or_default()).collect(),
                tape: Some(tape),
            })
        }
        other => Err(CliError::Parse(format!(
            "kind: unknown input kind `{other}` (expected graph, trellis, factor_graph, zdd, hypergraph or tape)"
        ))),
    }
}

fn obj_remove(v: &mut Value, key: &str) -> Option<Value> {
    v.as_object_mut().and_then(|o| o.remove(key))
}

/// Feature vectors, one value per source: either a JSON array of arrays or
/// an object from feature name to array.
pub fn parse_features(text: &str, n_sources: usize) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Doc {
        List(Vec<Vec<f64>>),
        Named(BTreeMap<String, Vec<f64>>),
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!(
            "features: expected an array of arrays or an object of arrays of numbers ({e})"
        ))
    })?;
    let named: Vec<(String, Vec<f64>)> = match doc {
        Doc::List(l) => l
            .into_iter()
            .enumerate()
            .map(|(i, f)| (i.to_string(), f))
            .collect(),
        Doc::Named(m) => m.into_iter().collect(),
    };
    for (name, f) in &named {
        if f.len() != n_sources {
            return Err(CliError::Parse(format!(
                "features.{name}: expected {n_sources} values, found {}",
                f.len()
            )));
        }
    }
    Ok(named)
}
