#![cfg_attr(not(test), no_std)]

//! Orbit dynamics of bounded linear operators at desk scale.
//!
//! The crate materializes a handful of operator families on finitely
//! supported complex vectors (bilateral and unilateral weighted shifts,
//! diagonal operators, Jordan blocks, finite matrices, and lazily generated
//! block-diagonal direct sums), computes orbit statistics on them
//! (distance series, distributional functions, Li-Yorke evidence) and
//! verifies growth/decay certificates:
//!
//! * norm-unimodality: `‖Tⁱ x_m‖ ≥ rⁱ ‖x_m‖` for `i ≤ m` together with
//!   `‖Tᵏ x_m‖ → 0`;
//! * the weak criterion: per-witness decay plus a fraction of the first `N_m`
//!   iterates exceeding `C_m ‖x_m‖`;
//! * transfer of a growth certificate through a similarity `C⁻¹TC`.
//!
//! Everything here depends only on `core` and `alloc`. File formats, spec
//! loading and the command-line tool live in the `opdyn` crate.
//!
//! Index conventions: shifts and diagonal operators act on `ℤ`; finite
//! matrices, Jordan blocks and block-diagonal operators use 1-based
//! coordinates (`e_1, …, e_n`), and block `k` of a block-diagonal operator
//! is numbered from 1.

extern crate alloc;

pub mod constructions;
pub mod criteria;
pub mod dynamics;
mod error;
pub mod numlin;
pub mod operators;

pub use error::{Error, Result};
pub use numlin::{ComplexScalar, DenseMatrix, SparseVector};
pub use operators::OperatorDescription;
