//! Method-of-lines reference solver for `φ_t = φ_xx + φ^p` on `(0, π)` with
//! homogeneous Dirichlet data and `f0 = A s₁`.
//!
//! Results are reference estimates of the blow-up time, not bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ext::ExtReal;
use crate::galerkin::sine_mode;
use crate::ode::{self, IvpOutcome, IvpSpec, OdeError, OutcomeKind};

pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_THRESHOLD: f64 = 1e6;
/// Allowed relative disagreement between the `N` and `2N` runs.
pub const RICHARDSON_TOLERANCE: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdError {
    #[error("invalid finite-difference configuration: {0}")]
    Invalid(String),
    #[error("the semidiscrete system left its domain at t = {0}")]
    DomainExit(f64),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Interior grid points; spacing `π/(N+1)`.
    pub points: usize,
    pub amplitude: f64,
    pub p: usize,
    pub blowup_threshold: f64,
    pub horizon: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl FdConfig {
    pub fn new(amplitude: f64, p: usize) -> Self {
        Self {
            points: DEFAULT_POINTS,
            amplitude,
            p,
            blowup_threshold: DEFAULT_THRESHOLD,
            horizon: 10.0,
            rtol: 1e-8,
            atol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<(), FdError> {
        if self.points < 64 {
            return Err(FdError::Invalid(format!("need at least 64 points (got {})", self.points)));
        }
        if self.p < 2 || !(self.amplitude >= 0.0) || !(self.horizon > 0.0) {
            return Err(FdError::Invalid("need p >= 2, A >= 0, horizon > 0".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        PI / (self.points + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.points).map(|i| i as f64 * self.spacing()).collect()
    }

    fn refined(&self) -> Self {
        Self { points: 2 * self.points + 1, ..self.clone() }
    }

    pub fn spec(&self) -> IvpSpec {
        let n = self.points;
        let inv = 1.0 / (self.spacing() * self.spacing());
        let p = self.p as i32;
        let y0 = self.nodes().iter().map(|&x| self.amplitude * sine_mode(1, x)).collect();
        IvpSpec::new(
            move |_, u, du| {
                for i in 0..n {
                    let left = if i == 0 { 0.0 } else { u[i - 1] };
                    let right = if i + 1 == n { 0.0 } else { u[i + 1] };
                    du[i] = (left - 2.0 * u[i] + right) * inv + u[i].powi(p);
                }
            },
            y0,
            0.0,
            self.horizon,
        )
        .with_tolerances(self.rtol, self.atol)
        .with_blowup_threshold(self.blowup_threshold)
        .with_record_every(8)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdRun {
    pub points: usize,
    /// Escape time, or `+∞` when the run reached the horizon.
    pub theta: ExtReal,
    /// Smallest grid value over all accepted steps.
    pub min_value: f64,
    /// `(t, max_i |u_i|)` on the recorded steps.
    pub max_norm_curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub amplitude: f64,
    pub p: usize,
    /// Reference estimate from the refined grid.
    pub theta: ExtReal,
    pub coarse: FdRun,
    pub fine: FdRun,
    /// Relative difference of the two grids.
    pub grid_difference: Option<f64>,
    pub richardson_ok: bool,
    pub positivity_ok: bool,
}

pub fn run_fd(config: &FdConfig) -> Result<(FdRun, IvpOutcome), FdError> {
    config.validate()?;
    let out = ode::integrate(&config.spec())?;
    let theta = match out.kind {
        OutcomeKind::ReachedHorizon => ExtReal::PosInf,
        OutcomeKind::BlowUp { t_end } => ExtReal::Finite(t_end),
        OutcomeKind::DomainExit { t_end } => return Err(FdError::DomainExit(t_end)),
    };
    let max_norm_curve = out.samples.iter().map(|s| (s.t, ode::max_norm(&s.y))).collect();
    let run = FdRun { points: config.points, theta, min_value: out.stats.min_component, max_norm_curve };
    Ok((run, out))
}

/// Blow-up time estimate on `N` and `2N + 1` interior points (the refined grid
/// halves the spacing).
pub fn fd_blowup_time(config: &FdConfig) -> Result<FdEstimate, FdError> {
    let (coarse, _) = run_fd(config)?;
    let (fine, _) = run_fd(&config.refined())?;
    let grid_difference = match (coarse.theta, fine.theta) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => Some((a - b).abs() / b),
        _ => None,
    };
    let richardson_ok = match grid_difference {
        Some(d) => d <= RICHARDSON_TOLERANCE,
        None => coarse.theta == fine.theta,
    };
    let positivity_ok = coarse.min_value >= -1e-10 && fine.min_value >= -1e-10;
    Ok(FdEstimate {
        amplitude: config.amplitude,
        p: config.p,
        theta: fine.theta,
        coarse,
        fine,
        grid_difference,
        richardson_ok,
        positivity_ok,
    })
}

/// Solution of `χ' = χ^p`, `χ(0) = s₁`, at rescaled time `τ`.
pub fn chi_profile(tau: f64, x: f64, p: usize) -> f64 {
    let s = sine_mode(1, x);
    let q = p as f64 - 1.0;
    s / (1.0 - q * s.powf(q) * tau).powf(1.0 / q)
}

/// Max-norm deviation between the rescaled grid solution `φ(τ / A^{p−1}) / A`
/// and `χ(τ)` at the grid nodes.
pub fn limit_profile_check(config: &FdConfig, tau: f64) -> Result<f64, FdError> {
    config.validate()?;
    let a = config.amplitude;
    if !(a > 0.0) {
        return Err(FdError::Invalid("the rescaling needs A > 0".into()));
    }
    let nodes = config.nodes();
    let u = if tau == 0.0 {
        nodes.iter().map(|&x| a * sine_mode(1, x)).collect::<Vec<_>>()
    } else {
        let mut spec = config.spec();
        spec.horizon = tau / a.powi(config.p as i32 - 1);
        spec.min_step = 1e-12 * spec.horizon;
        let out = ode::integrate(&spec)?;
        if out.kind != OutcomeKind::ReachedHorizon {
            return Err(FdError::Invalid(format!("grid solution escaped before rescaled time {tau}")));
        }
        out.last().y.clone()
    };
    Ok(nodes.iter().zip(&u).map(|(&x, v)| (v / a - chi_profile(tau, x, config.p)).abs()).fold(0.0, f64::max))
}
