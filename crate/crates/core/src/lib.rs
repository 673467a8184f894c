//! Fractional powers of backward-difference operators on uniform grids over
//! `[0, 1]`, together with the Hölder-seminorm machinery used to measure
//! their approximation error.
//!
//! The crate is organised around a handful of small modules:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`specfn`] | log-gamma, digamma, Riemann zeta, fractional binomial weights |
//! | [`grid`] | uniform grids, sampled grid functions, Hölder seminorms |
//! | [`ops`] | backward difference, linear-spline interpolant, resolvents, sectorial audits |
//! | [`frac`] | fractional backward differences, closed-form fractional derivatives, quadrature oracles |
//! | [`fode`] | implicit solver for fractional ODEs and convergence tables |
//!
//! Everything is `no_std` + `alloc`. All operations are pure functions of
//! their inputs and safe to call from any number of threads.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod fode;
pub mod frac;
pub mod grid;
pub mod ops;
mod quad;
pub mod rng;
pub mod specfn;

pub use frac::FracOrder;
pub use grid::{GridFn, HolderExponent, UniformGrid};
