//! Numerical core for fully nonlinear complex Hessian equations on flat
//! products `X × S`.
//!
//! The crate is `no_std` (with `alloc`). File formats, configuration and the
//! command line live in the `dirlab` companion crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod arrowspec;
pub mod dirichlet;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod prodgrid;
pub mod symcone;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
