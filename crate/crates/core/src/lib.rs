//! Dirichlet-to-Neumann matrices of compact metric graphs.
//!
//! * [`graph`]: the metric-graph model and the gluing operations.
//! * [`dtn`]: exact assembly of `R(λ)` by Schur-complement elimination.
//! * [`oracle`]: finite-element eigenvalue counting used to cross-check
//!   the counts read off `R(λ)`.
//! * [`synthesis`]: builds a graph whose DtN matrix at a given `λ > 0` is a
//!   prescribed symmetric matrix.
//! * [`io`]: graph and matrix files, DOT export.

pub mod dtn;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod synthesis;

pub use dtn::{dtn_matrix, edge_kernel, harmonic_extension, DtnError, SpectrumHit};
pub use graph::{attach, concatenate, glue, glue_aligned, Block, MetricGraph};
pub use linalg::{count_in_interval, count_negative, eigenvalues_sym, SymMatrix};
