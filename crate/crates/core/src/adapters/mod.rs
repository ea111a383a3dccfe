//! Builders that express classical dynamic programs as computation graphs,
//! and the pipelines that run on them.

pub mod ad;
pub mod expectations;
pub mod factor_graph;
pub mod hypergraph;
pub mod trellis;
pub mod zdd;

use thiserror::Error;

use crate::engine::EngineError;
use crate::graph::{ComputationGraph, GraphBuilder, GraphError, NodeId, Op};
use crate::semialgebra::SemialgebraError;

pub use ad::{
    ad_forward_grad, ad_forward_grad_counted, ad_reverse_grad, ad_reverse_grad_counted,
    random_tape, AdTape, AdTapeDoc, SourceTag,
};
pub use expectations::{
    expectations_fb, expectations_npass, second_order_expectation, ExpectationReport,
};
pub use factor_graph::{factor_graph_to_cg, FactorGraph, FactorGraphBuilt, FgFactor, FgVariable};
pub use hypergraph::{hypergraph_to_cg, Hyperedge, Hypergraph};
pub use trellis::{trellis_to_cg, Trellis, TrellisBuilt};
pub use zdd::{zdd_polynomial, zdd_to_cg, Terminal, Zdd, ZddBuilt, ZddNode, ZddRef};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdapterError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("factor graph has a cycle through factor `{0}`")]
    CyclicFactorGraph(String),
    #[error("hypergraph has a cycle through vertex `{0}`")]
    CyclicHypergraph(String),
    #[error("vertex `{0}` has no derivation")]
    UnderivableVertex(String),
    #[error("source {source_index} is not differentiable at the evaluation point: {reason}")]
    NonDifferentiableTag { source_index: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Semialgebra(#[from] SemialgebraError),
}

/// A computation graph with real source values and a legend, both in source
/// order.
#[derive(Clone, Debug)]
pub struct Built {
    pub graph: ComputationGraph,
    pub xi: Vec<f64>,
    pub legend: Vec<String>,
}

/// Graph builder that records a value and a label per source. Node ids are
/// handed out in increasing order, so creation order is source order.
#[derive(Debug, Default)]
pub(crate) struct Recorder {
    b: GraphBuilder,
    xi: Vec<f64>,
    legend: Vec<String>,
}

impl Recorder {
    pub(crate) fn source(&mut self, value: f64, label: String) -> NodeId {
        self.xi.push(value);
        self.legend.push(label);
        self.b.add_source()
    }

    /// Source position of the next source to be created.
    pub(crate) fn next_source(&self) -> usize {
        self.xi.len()
    }

    /// `op` over `inputs`, or the single input itself.
    pub(crate) fn op(&mut self, op: Op, inputs: &[NodeId]) -> NodeId {
        assert!(!inputs.is_empty());
        if inputs.len() == 1 {
            inputs[0]
        } else {
            self.b.add_op(op, inputs)
        }
    }

    /// `op` over `inputs` as a fresh node, even for one input.
    pub(crate) fn fresh(&mut self, op: Op, inputs: &[NodeId]) -> NodeId {
        self.b.add_op(op, inputs)
    }

    pub(crate) fn finish(self) -> Result<Built, AdapterError> {
        Ok(Built {
            graph: self.b.build()?,
            xi: self.xi,
            legend: self.legend,
        })
    }
}
