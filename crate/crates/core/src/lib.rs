//! Finite-volume solver for spherically symmetric isothermal gas flow with
//! self-gravity outside a unit ball.
//!
//! The gas dynamics are written in weighted variables (density and momentum
//! scaled by `x^(N-1)`), which turn the geometric terms of spherical symmetry
//! into a nonlocal zeroth-order source. Time stepping alternates exact Riemann
//! evolution with staggered conservative averaging, a fractional source step,
//! and a density floor that keeps the scheme away from vacuum.
//!
//! Modules:
//! - [`state`]: state variables, Riemann invariants, invariant-region predicate
//! - [`riemann`]: exact interior and reflecting-wall Riemann solvers
//! - [`gravity`]: prefix-mass integrals and the geometric + gravity source
//! - [`scheme`]: the staggered Lax-Friedrichs time stepper
//! - [`entropy`]: entropy pairs, runtime bound monitors, weak-form residuals
//!
//! The crate is `no_std` (with `alloc`); all floating-point transcendentals
//! go through `libm` so results are identical with or without the host libm.

#![cfg_attr(not(test), no_std)]
// Negated comparisons are deliberate: they reject NaN alongside the
// out-of-range values. The quadrature constants keep their full tabulated
// digits.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

extern crate alloc;

pub mod entropy;
pub mod error;
pub mod gravity;
pub(crate) mod math;
pub mod quad;
pub mod riemann;
pub mod scheme;
pub mod state;

pub use error::Error;
pub use state::State;
