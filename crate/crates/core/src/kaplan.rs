//! Kaplan's upper bound on the blow-up time of `φ_t = φ_xx + φ^p` on `(0, π)`.
//!
//! For nonnegative data, `Q(f) = ½ ∫₀^π sin(x) f(x) dx` satisfies
//! `Q(φ(t)) ≥ S(t)` where `S' = S(S^{p−1} − 1)`, `S(0) = Q(f0)`. When
//! `Q(f0) > 1` the comparison solution escapes at
//! `t_K = −log(1 − Q(f0)^{1−p}) / (p − 1)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::galerkin::sine_mode;
use crate::ode::{self, IvpSpec, OdeError, OutcomeKind};
use crate::quad::{self, convolve_exp, GaussLegendre, QuadError};

/// Grid used for the nonnegativity check on `[0, π]`.
pub const NONNEG_GRID: usize = 4096;
/// Subintervals of the `S_n` quadrature grid.
pub const SN_GRID: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KaplanError {
    #[error("Kaplan's criterion needs Q(f0) > 1 (got {0})")]
    NotApplicable(f64),
    #[error("t = {t} is past the comparison blow-up time {t_k}")]
    OutOfDomain { t: f64, t_k: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaplanInput {
    pub q0: f64,
    pub p: usize,
}

impl KaplanInput {
    pub fn new(q0: f64, p: usize) -> Result<Self, KaplanError> {
        if p < 2 || !q0.is_finite() || q0 < 0.0 {
            return Err(KaplanError::Invalid(format!("q0 = {q0}, p = {p}")));
        }
        Ok(Self { q0, p })
    }

    fn q(&self) -> f64 {
        self.p as f64 - 1.0
    }
}

/// `Q(f)` for `f = Σ c_k s_k`; only the first mode pairs with `sin`.
pub fn q_of_sine_coeffs(coeffs: &BTreeMap<usize, f64>) -> f64 {
    coeffs.get(&1).copied().unwrap_or(0.0) * (2.0 * PI).sqrt() / 4.0
}

/// `Q(f)` by Gauss–Legendre quadrature of `½ sin(x) f(x)`.
pub fn q_by_quadrature<F: Fn(f64) -> f64>(f: F, nodes: usize) -> f64 {
    0.5 * GaussLegendre::new(nodes).integrate(0.0, PI, |x| x.sin() * f(x))
}

/// `Σ c_k s_k(x)`.
pub fn sine_series(coeffs: &BTreeMap<usize, f64>, x: f64) -> f64 {
    coeffs.iter().map(|(&k, &c)| c * sine_mode(k, x)).sum()
}

/// Resolution-limited nonnegativity check of a sine series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonnegativityCheck {
    pub grid_points: usize,
    pub min_value: f64,
    pub nonnegative: bool,
}

pub fn check_nonnegative(coeffs: &BTreeMap<usize, f64>) -> NonnegativityCheck {
    let min_value = (0..=NONNEG_GRID)
        .map(|i| sine_series(coeffs, PI * i as f64 / NONNEG_GRID as f64))
        .fold(f64::INFINITY, f64::min);
    NonnegativityCheck { grid_points: NONNEG_GRID + 1, min_value, nonnegative: min_value >= -1e-14 }
}

/// `1 − Q0^{1−p}`, accurate for `Q0` close to 1.
fn gap(input: &KaplanInput) -> f64 {
    -(-input.q() * (input.q0 - 1.0).ln_1p()).exp_m1()
}

pub fn kaplan_time(input: &KaplanInput) -> Result<f64, KaplanError> {
    if !(input.q0 > 1.0) {
        return Err(KaplanError::NotApplicable(input.q0));
    }
    let x = (-input.q() * input.q0.ln()).exp();
    let log_gap = if x < 0.5 { (-x).ln_1p() } else { gap(input).ln() };
    Ok(-log_gap / input.q())
}

/// `t_K = ∫_{Q0}^∞ dr / (r (r^{p−1} − 1))`, compactified by `r = Q0 / v`:
/// `∫₀¹ v^{p−2} dv / (Q0^{p−1} − v^{p−1})`. The denominator is split as
/// `(Q0^{p−1} − 1) + (1 − v^{p−1})` so that near-critical `Q0` keeps its digits.
pub fn kaplan_time_by_quadrature(input: &KaplanInput) -> Result<f64, KaplanError> {
    if !(input.q0 > 1.0) {
        return Err(KaplanError::NotApplicable(input.q0));
    }
    let q = input.q();
    let excess = (q * (input.q0 - 1.0).ln_1p()).exp_m1();
    let f = |v: f64| {
        let tail = if v > 0.0 { -(q * v.ln()).exp_m1() } else { 1.0 };
        v.powi(input.p as i32 - 2) / (excess + tail)
    };
    Ok(quad::adaptive(f, 0.0, 1.0, 1e-12, 1e-12, 20_000)?.value)
}

fn comparison_spec(input: &KaplanInput, horizon: f64) -> IvpSpec {
    let q = input.q();
    IvpSpec::new(move |_, y, dy| dy[0] = y[0] * (y[0].powf(q) - 1.0), vec![input.q0], 0.0, horizon)
}

/// `S(t)` from the comparison ODE.
pub fn comparison_solution(input: &KaplanInput, t: f64) -> Result<f64, KaplanError> {
    if t < 0.0 {
        return Err(KaplanError::Invalid(format!("negative time {t}")));
    }
    if input.q0 > 1.0 {
        let t_k = kaplan_time(input)?;
        if t >= t_k {
            return Err(KaplanError::OutOfDomain { t, t_k });
        }
    }
    if t == 0.0 {
        return Ok(input.q0);
    }
    let out = ode::integrate(&comparison_spec(input, t))?;
    match out.kind {
        OutcomeKind::ReachedHorizon => Ok(out.last().y[0]),
        OutcomeKind::BlowUp { t_end } | OutcomeKind::DomainExit { t_end } => {
            Err(KaplanError::OutOfDomain { t, t_k: t_end })
        }
    }
}

/// Escape time of the comparison ODE found by the integrator.
pub fn comparison_blowup_time(input: &KaplanInput) -> Result<Option<f64>, KaplanError> {
    let horizon = match kaplan_time(input) {
        Ok(t) => 2.0 * t + 1.0,
        Err(_) => 50.0,
    };
    let out = ode::integrate(&comparison_spec(input, horizon))?;
    Ok(match out.kind {
        OutcomeKind::BlowUp { t_end } => Some(t_end),
        _ => None,
    })
}

/// `S_0, …, S_n` on a uniform grid of `SN_GRID` subintervals over `[0, t]`:
/// `S_0(t) = e^{−t} Q0`, `S_{n+1}(t) = e^{−t} Q0 + ∫₀^t e^{−(t−s)} S_n(s)^p ds`.
pub fn sn_iterates(input: &KaplanInput, n: usize, t: f64) -> Vec<Vec<f64>> {
    let h = t / SN_GRID as f64;
    let base: Vec<f64> = (0..=SN_GRID).map(|i| (-(i as f64) * h).exp() * input.q0).collect();
    let mut out = vec![base.clone()];
    for _ in 0..n {
        let prev = out.last().expect("non-empty");
        let g: Vec<f64> = prev.iter().map(|s| s.powi(input.p as i32)).collect();
        let conv = convolve_exp(-1.0, h, &g);
        out.push(base.iter().zip(conv).map(|(b, c)| b + c).collect());
    }
    out
}

/// `S_n(t)`.
pub fn sn_iteration(input: &KaplanInput, n: usize, t: f64) -> f64 {
    if t == 0.0 {
        return input.q0;
    }
    *sn_iterates(input, n, t)[n].last().expect("non-empty grid")
}
