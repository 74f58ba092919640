//! Computational probability toolkit.
//!
//! Distributions and their CDFs, characteristic functions with Lévy
//! inversion, weak-convergence diagnostics, finite probability spaces and a
//! central limit theorem harness built on exact convolution.

// negated float comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfun;
pub mod clt;
pub mod distribution;
pub mod error;
pub mod finite_space;
pub mod numerics;
pub mod weak_convergence;

pub use distribution::{DiscreteDist, Dist, NormalParams};
pub use error::{Error, Result};
