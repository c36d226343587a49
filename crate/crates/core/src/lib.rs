//! Bottleneck detection for modular (composite) systems.
//!
//! A modular system is examined from four angles, each with its own detector
//! family:
//!
//! * [`screening`] — classic quality-control screening over a component ×
//!   criterion estimate table: Pareto-chart thresholding, Pareto-efficient
//!   selection, and outranking-based layer ranking.
//! * [`morph`] — composite solutions assembled from design alternatives, one
//!   per slot, graded by the quality vector `N = (w; η₁..η_k)`; detects
//!   composite bottlenecks as Pareto-efficient low-quality/high-compatibility
//!   subsystems and enumerates improvement actions.
//! * [`network`] — structural bottlenecks in undirected networks: maximum-leaf
//!   spanning trees, connected dominating sets, and two-level (primary path +
//!   secondary trees) network design, each as a greedy heuristic paired with
//!   an exact enumerator for small instances.
//! * [`predict`] — forecast-driven detection: extrapolate a snapshot series
//!   and re-run any detector on the forecast state, yielding a bottleneck
//!   trajectory.
//!
//! Shared domain types live in [`model`]. Everything is immutable after
//! construction and safe to share across threads; all detectors are pure
//! functions with documented deterministic tie-breaking.
//!
//! Value-typed data (estimates, weights, edge costs) is generic over the
//! scalar type via [`Scalar`]; the `*64`/`*32` aliases at the crate root pick
//! a concrete float.

pub mod model;
pub mod morph;
pub mod network;
pub mod predict;
pub mod scalar;
pub mod screening;

pub use model::{
    ComponentRecord, CompositeSolution, CriterionSpec, DesignAlternative, EstimateTable, Graph,
    GraphEdge, MorphSystem, QualityVector, Violation,
};
pub use morph::{ImprovementAction, QualityOrdering, Subsystem};
pub use network::{SpanningTreeResult, TwoLevelDesign};
pub use predict::{BottleneckTrajectory, Detector, Forecaster, SnapshotSeries};
pub use scalar::Scalar;
pub use screening::{LayerRanking, OutrankParams, ParetoChart};

/// `f64`-backed estimate table, the default for file I/O.
pub type EstimateTable64 = model::EstimateTable<f64>;
/// `f32`-backed estimate table.
pub type EstimateTable32 = model::EstimateTable<f32>;
/// `f64`-backed graph.
pub type Graph64 = model::Graph<f64>;
/// `f32`-backed graph.
pub type Graph32 = model::Graph<f32>;
/// `f64`-backed outranking parameters.
pub type OutrankParams64 = screening::OutrankParams<f64>;
/// `f64`-backed snapshot series.
pub type SnapshotSeries64 = predict::SnapshotSeries<f64>;
