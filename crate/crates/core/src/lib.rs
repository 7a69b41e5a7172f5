//! Non-negative L1-approximating polynomials for sets of finite Gaussian
//! surface area.
//!
//! The pipeline takes a set `H`, forms `f = 2·1_H − 1`, smooths it with the
//! Ornstein–Uhlenbeck operator `T_ρ`, truncates its Hermite expansion to total
//! degree `t`, and returns `q = ¼(1 + p)²`, which is non-negative everywhere and
//! approximates `1_H` in `L1(γ_d)`.
//!
//! Modules:
//! - [`hermite`]: orthonormal Hermite basis, sparse expansions, OU action, products.
//! - [`sets`]: concept sets, membership, Gaussian surface area.
//! - [`construction`]: parameter selection and coefficient acquisition.
//! - [`verification`]: Monte Carlo and exact checks of every inequality in the construction.

pub mod construction;
pub mod error;
pub mod hermite;
pub mod rng;
pub mod sets;
pub mod stats;
pub mod verification;

pub use error::{Error, Result};
pub use hermite::{EvalForm, HermiteExpansion, MultiIndex};
pub use sets::{ConceptSet, GsaEstimate, GsaMethod, SetKind};
pub use stats::ErrorEstimate;
