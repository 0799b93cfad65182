//! Multi-level graph sparsification toolkit.
//!
//! Builds multiplicative and subsetwise spanners, Steiner trees, and their
//! multi-level (grade-of-service) variants: single-level kernels and exact
//! oracles, a rounding algorithm over level quantizers, the composite
//! strategy, a-priori approximation-guarantee computations, and a seeded
//! experiment harness with CSV/SVG reporting.
//!
//! Everything numeric is exact rational arithmetic unless stated otherwise;
//! floats only appear in reports and plots.

#![forbid(unsafe_code)]

pub mod distortion;
pub mod experiments;
pub mod graph;
pub mod multilevel;
pub mod oracle;
pub mod ratio;
pub mod shortest;
pub mod spanner;
pub mod steiner;
pub mod util;
pub mod weight;

pub use distortion::DistortionFn;
pub use graph::{EdgeSet, Graph, VertexId};
pub use multilevel::{LevelCostFn, MultiLevelSolution, Quantizer, TerminalHierarchy};
pub use weight::Weight;
