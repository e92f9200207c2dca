//! Design, generate and verify power-law Kronecker graphs built from stars.
//!
//! [`design`] predicts exact properties of the full graph from its factors,
//! [`generator`] materializes it as sharded edge lists with no coordination
//! between workers, and [`verifier`] measures shards and diffs them against
//! the prediction.

pub mod cli;
pub mod config;
pub mod design;
pub mod distribution;
pub mod generator;
pub mod sparse;
pub mod verifier;

pub use design::{
    design_report, predict_degree_distribution, predict_edges, predict_triangles,
    predict_vertices, power_law_alpha, star_matrix, validate_power_law, AlphaReport,
    DesignError, DesignReport, FactorSpec, GraphDesign, LoopPlacement, PowerLawValidity,
};
pub use distribution::DegreeDistribution;
pub use sparse::{IncidencePair, SparseError, SparseMatrix};
