//! Degree-truncated projective extremal functions, projective-hull evidence
//! and the Jensen-measure duality for sampled compacta in `P^n`.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acceptance;
pub mod cli;
pub mod compacta;
pub mod error;
pub mod extremal;
pub mod families;
pub mod jensen;
pub mod optimizer;
pub mod poly;
pub mod rng;
pub mod scanner;
pub mod spectrum;

pub use error::{Error, Result};
