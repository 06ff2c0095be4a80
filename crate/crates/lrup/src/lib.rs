//! File formats, reports, experiments and the command-line front-end for
//! [`lrup_core`].

pub mod boundspec;
pub mod cli;
pub mod demos;
pub mod error;
pub mod experiments;
pub mod mm;
pub mod report;
pub mod vecspec;

pub use error::{Error, Result};
pub use lrup_core as core;
