//! Two exchange-coupled electron spins with a DM term and a nuclear field
//! gradient: thermal dense-coding capacity and swap-gate timing.

// `!(x <= tol)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dense_coding;
pub mod error;
pub mod model;
pub mod numerics;
pub mod selftest;
pub mod swap;
pub mod sweep;
pub mod thermal;

pub use error::{Error, Result};
