//! A-posteriori existence intervals and error tubes for semilinear evolution
//! equations `φ' = 𝒜φ + 𝒫(φ)`, with the 1-D nonlinear heat equation
//! `φ_t = φ_xx + φ^p` on `(0, π)` as the worked case.
//!
//! * [`control`]: the scalar control inequality and its closed forms.
//! * [`ode`]: adaptive Dormand–Prince integration with blow-up detection.
//! * [`galerkin`]: sine-basis Galerkin models, residual and growth estimators.
//! * [`heat`]: the coupled Galerkin/control system and its sweeps.
//! * [`kaplan`]: Kaplan's upper bound on the blow-up time.
//! * [`picard`]: Picard iteration inside the control tube.
//! * [`fd`]: finite-difference reference blow-up times.
//! * [`sobolev`]: multiplication constants of `H¹₀(0, π)`.
//! * [`wave`]: the first-order wave example with a known exact solution.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod control;
pub mod ext;
pub mod fd;
pub mod galerkin;
pub mod heat;
pub mod kaplan;
pub mod ode;
pub mod picard;
pub mod quad;
pub mod sobolev;
pub mod wave;
