//! Zero-free regions for ferromagnetic 2-spin partition functions and the
//! interpolation-based approximation algorithm built on them.
//!
//! Modules, bottom-up:
//! - [`graph`]: graphs, field vectors, leaf pruning, random instances;
//! - [`poly`] and [`roots`]: complex polynomials, log-series, root finding;
//! - [`spin`]: exact partition functions, ray coefficients, connected-subgraph log-series;
//! - [`geometry`] and [`oracle`]: the circular region `K`, its signed products `K_d`
//!   and a symmetry-free numerical optimiser for the product programs;
//! - [`verify`]: root-locus and stability checks;
//! - [`barvinok`]: covering map, composition and truncated-log approximation.

pub mod barvinok;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod oracle;
pub mod poly;
pub mod roots;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{build_geometry, thresholds, CircularRegion, ContractionGeometry, Thresholds};
pub use graph::{prune_leaves, random_min2_graph, FieldVector, Graph, PruneResult};
pub use poly::{ComplexPoly, LogSeries};
pub use spin::SpinParams;
