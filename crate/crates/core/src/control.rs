//! The scalar control equation and the closed-form bounds from the zero
//! approximate solution.
//!
//! Given a semigroup estimator `u(t) = U e^{-Bt}`, a datum error `δ`, a
//! differential error `ε(t)` and a polynomial growth estimator
//! `ℓ(r, t) = Σ_j c_j(t) r^j`, a solution of
//!
//! ```text
//! R'(t) = U ε(t) + U ℓ(R(t), t) − B R(t),   R(t0) = U δ
//! ```
//!
//! bounds the distance between the approximate and the exact solution for as
//! long as it exists.

use std::sync::Arc;

use thiserror::Error;

use crate::ext::ExtReal;
use crate::ode::{self, IvpOutcome, IvpSpec, OdeError, OutcomeKind};
use crate::quad::{self, QuadError};

/// Quadrature tolerance for the integral estimator.
pub const INTEGRAL_ABS_TOL: f64 = 1e-12;
/// Below this size of `B/u` (resp. `B·u`) the logarithmic and exponential
/// factors switch to their series forms.
const SERIES_SWITCH: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("semigroup estimator requires U >= 1 (got {0})")]
    InvalidSemigroup(f64),
    #[error("invalid control problem: {0}")]
    InvalidProblem(String),
    #[error("R = {r} is outside the growth estimator's domain (radius {radius})")]
    DomainExceeded { r: f64, radius: ExtReal },
    #[error("t = {t} is outside the existence interval [0, {tn})")]
    OutOfDomain { t: f64, tn: ExtReal },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// `u(t) = U e^{-Bt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupEstimator {
    u: f64,
    b: f64,
}

impl SemigroupEstimator {
    pub fn new(u: f64, b: f64) -> Result<Self, ControlError> {
        if !(u >= 1.0) || !u.is_finite() || !b.is_finite() {
            return Err(ControlError::InvalidSemigroup(u));
        }
        Ok(Self { u, b })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.u * (-self.b * t).exp()
    }
}

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type CoeffFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Datum error bound `δ` and differential error bound `ε(t)`.
#[derive(Clone)]
pub struct ErrorEstimators {
    pub delta: f64,
    pub eps: TimeFn,
}

impl ErrorEstimators {
    pub fn new(delta: f64, eps: TimeFn) -> Result<Self, ControlError> {
        if !(delta >= 0.0) {
            return Err(ControlError::InvalidProblem(format!("datum error must be >= 0 (got {delta})")));
        }
        Ok(Self { delta, eps })
    }

    /// `δ` with a vanishing differential error.
    pub fn datum_only(delta: f64) -> Result<Self, ControlError> {
        Self::new(delta, Arc::new(|_| 0.0))
    }
}

/// `ℓ(r, t) = Σ_{j≥1} c_j(t) r^j` on `r < radius`; `coeffs(t)[j-1] = c_j(t)`.
#[derive(Clone)]
pub struct PolynomialGrowth {
    pub coeffs: CoeffFn,
    pub radius: ExtReal,
}

impl PolynomialGrowth {
    pub fn new(coeffs: CoeffFn, radius: ExtReal) -> Self {
        Self { coeffs, radius }
    }

    /// Time-independent coefficients, unbounded radius.
    pub fn constant(coeffs: Vec<f64>) -> Self {
        Self { coeffs: Arc::new(move |_| coeffs.clone()), radius: ExtReal::PosInf }
    }

    /// `ℓ(r) = P r^p`.
    pub fn monomial(scale: f64, p: usize) -> Self {
        let mut c = vec![0.0; p];
        c[p - 1] = scale;
        Self::constant(c)
    }

    pub fn eval(&self, r: f64, t: f64) -> f64 {
        eval_poly(&(self.coeffs)(t), r)
    }
}

/// `Σ_j c[j-1] r^j` by Horner.
pub fn eval_poly(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, cj| (acc + cj) * r)
}

#[derive(Clone)]
pub struct ControlProblem {
    pub semigroup: SemigroupEstimator,
    pub errors: ErrorEstimators,
    pub growth: PolynomialGrowth,
    pub t0: f64,
    pub horizon: f64,
}

impl ControlProblem {
    pub fn new(
        semigroup: SemigroupEstimator,
        errors: ErrorEstimators,
        growth: PolynomialGrowth,
        t0: f64,
        horizon: f64,
    ) -> Result<Self, ControlError> {
        if !(horizon > t0) {
            return Err(ControlError::InvalidProblem("horizon must exceed t0".into()));
        }
        Ok(Self { semigroup, errors, growth, t0, horizon })
    }

    /// The zero-approximation problem `R' = U P R^p − B R`, `R(0) = U‖f0‖`.
    pub fn zero_approximation(
        semigroup: SemigroupEstimator,
        scale: f64,
        p: usize,
        norm_f0: f64,
        horizon: f64,
    ) -> Result<Self, ControlError> {
        Self::new(semigroup, ErrorEstimators::datum_only(norm_f0)?, PolynomialGrowth::monomial(scale, p), 0.0, horizon)
    }

    pub fn initial_value(&self) -> f64 {
        self.semigroup.u * self.errors.delta
    }
}

/// Right-hand side of the control equation at `(R, t)`.
pub fn control_rhs(problem: &ControlProblem, r: f64, t: f64) -> Result<f64, ControlError> {
    if !problem.growth.radius.exceeds(r) {
        return Err(ControlError::DomainExceeded { r, radius: problem.growth.radius });
    }
    let u = problem.semigroup.u;
    Ok(u * (problem.errors.eps)(t) + u * problem.growth.eval(r, t) - problem.semigroup.b * r)
}

/// `ℰ(t) = u(t − t0) δ + ∫_{t0}^t u(t − s) ε(s) ds`.
pub fn integral_estimator_eval(problem: &ControlProblem, t: f64) -> Result<f64, ControlError> {
    if t < problem.t0 {
        return Err(ControlError::InvalidProblem(format!("t = {t} precedes t0 = {}", problem.t0)));
    }
    let sg = problem.semigroup;
    let datum = sg.eval(t - problem.t0) * problem.errors.delta;
    let eps = problem.errors.eps.clone();
    let conv = quad::adaptive(|s| sg.eval(t - s) * eps(s), problem.t0, t, INTEGRAL_ABS_TOL, 0.0, 4000)?;
    Ok(datum + conv.value)
}

/// `L_B(u)`: `−log(1 − B/u)/B` for `B ≠ 0`, `1/u` at `B = 0`.
pub fn log_factor(b: f64, u: f64) -> f64 {
    let x = b / u;
    if x.abs() < SERIES_SWITCH {
        (1.0 + 0.5 * x) / u
    } else {
        -(-x).ln_1p() / b
    }
}

/// `E_B(u)`: `(e^{Bu} − 1)/B` for `B ≠ 0`, `u` at `B = 0`.
pub fn exp_factor(b: f64, u: f64) -> f64 {
    let x = b * u;
    if x.abs() < SERIES_SWITCH {
        u * (1.0 + 0.5 * x)
    } else {
        x.exp_m1() / b
    }
}

/// Existence time of the zero-approximation control problem with `ℓ(r) = P r^p`.
pub fn tn_closed(u: f64, b: f64, scale: f64, p: usize, norm_f0: f64) -> ExtReal {
    let drive = scale * u.powi(p as i32) * norm_f0.powi(p as i32 - 1);
    if drive <= b || drive <= 0.0 {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(log_factor(b, drive) / (p as f64 - 1.0))
    }
}

/// The closed-form bound `R(t)` on `[0, t_N)`.
pub fn r_closed(u: f64, b: f64, scale: f64, p: usize, norm_f0: f64, t: f64) -> Result<f64, ControlError> {
    let tn = tn_closed(u, b, scale, p, norm_f0);
    if t < 0.0 || !tn.exceeds(t) {
        return Err(ControlError::OutOfDomain { t, tn });
    }
    let q = p as f64 - 1.0;
    let drive = scale * u.powi(p as i32) * norm_f0.powi(p as i32 - 1);
    let denom = 1.0 - (drive - b) * exp_factor(b, q * t);
    if denom <= 0.0 {
        return Err(ControlError::OutOfDomain { t, tn });
    }
    Ok(u * norm_f0 / denom.powf(1.0 / q))
}

/// `t_N` together with the curve it terminates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormBound {
    pub u: f64,
    pub b: f64,
    pub scale: f64,
    pub p: usize,
    pub norm_f0: f64,
    pub tn: ExtReal,
}

impl ClosedFormBound {
    pub fn new(u: f64, b: f64, scale: f64, p: usize, norm_f0: f64) -> Self {
        Self { u, b, scale, p, norm_f0, tn: tn_closed(u, b, scale, p, norm_f0) }
    }

    pub fn r(&self, t: f64) -> Result<f64, ControlError> {
        r_closed(self.u, self.b, self.scale, self.p, self.norm_f0, t)
    }
}

/// Outcome of integrating the control equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlOutcome {
    /// Reached the horizon with `R` non-increasing at the end.
    GlobalWithinHorizon,
    /// Reached the horizon without settling; the horizon is a certified lower bound.
    HorizonReached,
    BlowUp {
        t_end: f64,
    },
    DomainExit {
        t_end: f64,
    },
}

#[derive(Debug, Clone)]
pub struct ControlSolution {
    pub outcome: ControlOutcome,
    pub ivp: IvpOutcome,
}

impl ControlSolution {
    /// Dense `R(t)`.
    pub fn r_at(&self, t: f64) -> Option<f64> {
        self.ivp.interpolate(t).map(|y| y[0])
    }

    /// Certified existence time: `+∞` for global, the horizon when undetermined.
    pub fn existence_time(&self) -> ExtReal {
        match self.outcome {
            ControlOutcome::GlobalWithinHorizon => ExtReal::PosInf,
            ControlOutcome::HorizonReached => ExtReal::Finite(self.ivp.horizon),
            ControlOutcome::BlowUp { t_end } | ControlOutcome::DomainExit { t_end } => ExtReal::Finite(t_end),
        }
    }
}

/// Builds the scalar IVP for the control equation. Values of `R` beyond the
/// growth radius make the right-hand side non-finite, which the integrator
/// reports as a domain exit.
pub fn control_ivp(problem: &ControlProblem) -> IvpSpec {
    let p = problem.clone();
    IvpSpec::new(
        move |t, y, dy| {
            dy[0] = control_rhs(&p, y[0], t).unwrap_or(f64::NAN);
        },
        vec![problem.initial_value()],
        problem.t0,
        problem.horizon,
    )
}

pub fn classify(ivp: &IvpOutcome) -> ControlOutcome {
    match ivp.kind {
        OutcomeKind::ReachedHorizon if ivp.is_global() => ControlOutcome::GlobalWithinHorizon,
        OutcomeKind::ReachedHorizon => ControlOutcome::HorizonReached,
        OutcomeKind::BlowUp { t_end } => ControlOutcome::BlowUp { t_end },
        OutcomeKind::DomainExit { t_end } => ControlOutcome::DomainExit { t_end },
    }
}

pub fn solve_control(problem: &ControlProblem, rtol: f64, atol: f64) -> Result<ControlSolution, ControlError> {
    let spec = control_ivp(problem).with_tolerances(rtol, atol);
    let ivp = ode::integrate(&spec)?;
    Ok(ControlSolution { outcome: classify(&ivp), ivp })
}

/// Largest deviation from the control integral equation over the recorded
/// samples up to `t_max`:
/// `sup_t |ℰ(t) + ∫_{t0}^t u(t − s) ℓ(R(s), s) ds − R(t)|`.
pub fn integral_identity_residual(
    problem: &ControlProblem,
    solution: &ControlSolution,
    t_max: f64,
) -> Result<f64, ControlError> {
    let sg = problem.semigroup;
    let mut worst: f64 = 0.0;
    for sample in solution.ivp.samples.iter().filter(|s| s.t <= t_max) {
        let t = sample.t;
        let e = integral_estimator_eval(problem, t)?;
        let growth = problem.growth.clone();
        let conv = quad::adaptive(
            |s| {
                let r = solution.r_at(s).unwrap_or(f64::NAN);
                sg.eval(t - s) * growth.eval(r, s)
            },
            problem.t0,
            t,
            INTEGRAL_ABS_TOL,
            1e-13,
            4000,
        )?;
        worst = worst.max((e + conv.value - sample.y[0]).abs());
    }
    Ok(worst)
}
