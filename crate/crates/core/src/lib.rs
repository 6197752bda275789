//! Sylow 2-subgroups of `GL2(F_p)`, the Vol'vachev conditions over `F_p(i)`,
//! and finite-sample transfer evidence for families of primes.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: primality, factorisation and valuations on machine integers.
//! - [`field`]: `F_p` and the quadratic extension `F_p(i)` for `p ≡ 3 (mod 4)`.
//! - [`matrix`]: `GL2(F_p)` elements, enumeration, subgroup closure, the torus embedding.
//! - [`sylow`]: Sylow subgroup construction, counting, conjugacy and the two
//!   first-order sentences about `p`-subgroups.
//! - [`families`]: arithmetic-progression prime families.
//! - [`harness`]: per-prime evaluation and cofinite/mixed verdict aggregation.
//! - [`volvachev`]: the V1/V2/V3 conditions and the conjugacy classification.
//! - [`dsl`]: a small statement language compiled to per-prime predicates.
//! - [`cache`], [`report`], [`cli`]: the command-line front end.

pub mod arith;
pub mod cache;
pub mod cli;
pub mod dsl;
mod error;
pub mod families;
pub mod field;
pub mod harness;
pub mod matrix;
pub mod report;
pub mod sylow;
pub mod volvachev;

pub use error::{Error, Result};

/// Version string stamped into cache records.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
