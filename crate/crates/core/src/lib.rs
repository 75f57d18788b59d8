// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod contour;
pub mod error;
pub mod hankel;
pub mod ode;
pub mod riemann;
pub mod spectral;
pub mod unroll;

pub use error::{Error, PathLocation, Result};
