#![no_std]
//! Bi-non-crossing partitions and the cumulant machinery built on them.

extern crate alloc;

pub mod algebra;
pub mod bnc;
pub mod cumulants;
pub mod error;
pub mod fock;
pub mod limits;
pub mod matrix;
pub mod sample;
pub mod scalar;
pub mod series;

pub use error::{CbfError, Result};
