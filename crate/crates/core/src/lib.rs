//! Quantum state discrimination, LOCC protocol constructions and
//! majorization-based feasibility analysis on small dense matrices.

#![forbid(unsafe_code)]

pub mod error;
pub mod casebook;
pub mod cli;
pub mod discriminate;
pub mod locc;
pub mod majorize;
pub mod measure;
pub mod numkernel;
pub mod random;
pub mod states;

pub use error::{Error, Result};
