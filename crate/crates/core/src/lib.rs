#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod bruhat;
pub mod cli;
pub mod dieudonne;
pub mod error;
pub mod gmatrix;
pub mod grading;
pub mod oracle;
pub mod scalars;
pub mod sk;

pub use error::{GdaError, Result};
