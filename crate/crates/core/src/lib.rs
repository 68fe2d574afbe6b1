//! Optimal prepayment boundary and contract value for a fixed-rate mortgage
//! with continuous payment when the short rate follows a CIR diffusion.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod model;
pub mod numerics;
pub mod oracles;
pub mod par;
pub mod specfun;

pub use error::{Error, Result};
