//! Exact computation of bases of solutions of linear Mahler equations.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod constants;
pub mod error;
pub mod fields;
pub mod hahn;
pub mod linalg;
pub mod newton;
pub mod poly;
pub mod series;
pub mod solver;
pub mod window;

pub use error::{Error, Result};
