#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod canonical;
pub mod error;
pub mod fixed_point;
pub mod harness;
pub mod io;
mod par;
pub mod risk;
pub mod thresholding;
pub mod wavelet;

pub use error::{Result, SbiteError};
