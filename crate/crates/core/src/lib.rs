//! Forward and forward-backward evaluation of computation graphs over
//! commutative semirings.
//!
//! A computation graph is a DAG whose sources carry semiring values and
//! whose other nodes add or multiply the values on their in-arcs. The
//! [`engine`] evaluates such graphs cutset by cutset, over any
//! [`algebra::Semiring`], and computes backward variables over tensor
//! products built by [`semialgebra`]. The [`adapters`] express HMMs,
//! tree factor graphs, ZDDs, hypergraphs and differentiable tapes as
//! computation graphs.

pub mod adapters;
pub mod algebra;
pub mod engine;
pub mod gen;
pub mod graph;
pub mod par;
pub mod semialgebra;
