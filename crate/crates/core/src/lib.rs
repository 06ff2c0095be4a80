//! Krylov approximation of `f(A + D) - f(A)` for a low-rank modification `D`.
//!
//! The crate is `no_std` with `alloc`. File formats and the command-line
//! front-end live in the `lrup` companion crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod scalar;
pub mod error;
pub mod dense;
pub mod sparse;
pub mod operator;
pub mod graph;
pub mod generators;
pub mod eigh;
pub mod eig;
pub mod svd;
pub mod expm;
pub mod funcs;
pub mod krylov;
pub mod update;
pub mod bounds;
pub mod oracle;
pub mod centrality;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use scalar::{Scalar, C64};
pub use bounds::{DecayParams, SpectralRegion};
pub use centrality::{CentralityUpdater, EdgeOp};
pub use funcs::FunctionSpec;
pub use graph::Graph;
pub use operator::LinearOperator;
pub use sparse::SparseMatrix;
pub use update::{LowRankModification, SolveOptions, UpdateFactor};
