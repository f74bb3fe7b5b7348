//! Picard iteration for the mild formulation on a truncated sine space.
//!
//! The Galerkin trajectory `φ_ap` and its control radius `R(t)` are sampled on
//! a uniform grid. The Volterra operator
//! `(𝒥ψ)(t) = e^{Λ(t−t0)} f0 + ∫_{t0}^t e^{Λ(t−s)} 𝒫(ψ(s)) ds`
//! is applied mode-wise on modes `1..=K`, and the iterates are checked to stay
//! in the tube of radius `R` and to contract at the factorial rate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::galerkin::{epsilon_hat, GalerkinModel};
use crate::heat::{self, HeatError, HeatScenario};
use crate::ode::{self, OutcomeKind};
use crate::quad::convolve_exp;

/// Composite Simpson subintervals.
pub const DEFAULT_GRID: usize = 2048;
/// Sine modes kept by the truncation.
pub const DEFAULT_TRUNCATION: usize = 12;
pub const TUBE_TOLERANCE: f64 = 1e-8;
/// Slack on the factorial and Cauchy bounds for grid quadrature error.
pub const BOUND_SLACK: f64 = 1e-10;

/// Diagonal generator `λ_k = −k²` plus the projected nonlinearity on a span of
/// sine modes.
#[derive(Debug, Clone)]
pub struct FiniteVolterraProblem {
    pub model: Arc<GalerkinModel>,
    /// `0` switches the nonlinearity off.
    pub nonlinear_scale: f64,
    pub datum: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
    pub grid: usize,
}

impl FiniteVolterraProblem {
    pub fn new(model: Arc<GalerkinModel>, datum: Vec<f64>, t0: f64, t1: f64, grid: usize) -> Self {
        assert!(t1 > t0 && t1.is_finite(), "need a finite interval");
        assert!(grid >= 2, "grid too coarse");
        assert_eq!(datum.len(), model.dim());
        Self { model, nonlinear_scale: 1.0, datum, t0, t1, grid }
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.grid as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.grid).map(|i| self.t0 + i as f64 * self.step()).collect()
    }
}

/// Coordinates on the uniform grid, `coords[i]` at `times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryGrid {
    pub times: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
}

impl TrajectoryGrid {
    pub fn constant(times: Vec<f64>, value: &[f64]) -> Self {
        let coords = vec![value.to_vec(); times.len()];
        Self { times, coords }
    }

    /// `‖self(t) − other(t)‖` in the `H¹₀` metric at every grid time.
    pub fn distances(&self, other: &TrajectoryGrid, model: &GalerkinModel) -> Vec<f64> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                model.basis.norm(&d)
            })
            .collect()
    }

    pub fn sup_distance(&self, other: &TrajectoryGrid, model: &GalerkinModel) -> f64 {
        self.distances(other, model).into_iter().fold(0.0, f64::max)
    }

    pub fn sup_norm(&self, model: &GalerkinModel) -> f64 {
        self.coords.iter().map(|a| model.basis.norm(a)).fold(0.0, f64::max)
    }
}

/// `𝒥ψ` on the grid, by composite Simpson convolution per mode.
pub fn volterra_apply(problem: &FiniteVolterraProblem, psi: &TrajectoryGrid) -> TrajectoryGrid {
    let model = &problem.model;
    let n = model.dim();
    let h = problem.step();
    let m = psi.times.len();
    let mut coords = vec![vec![0.0; n]; m];
    for k in 0..n {
        let lambda = model.basis.eigenvalues()[k];
        let forcing: Vec<f64> =
            psi.coords.iter().map(|a| problem.nonlinear_scale * model.tensor.contract(k, a)).collect();
        let conv = convolve_exp(lambda, h, &forcing);
        for (i, c) in coords.iter_mut().enumerate() {
            c[k] = (lambda * (psi.times[i] - problem.t0)).exp() * problem.datum[k] + conv[i];
        }
    }
    TrajectoryGrid { times: psi.times.clone(), coords }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// `sup_t ‖φ_{k+1}(t) − φ_k(t)‖`.
    pub k: usize,
    pub sup_step: f64,
    /// `Σ (Λ (t1 − t0))^k / k!`.
    pub factorial_bound: f64,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeRecord {
    pub k: usize,
    /// `min_{t > t0} R(t) − ‖φ_k(t) − φ_ap(t)‖`.
    pub min_margin: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyRecord {
    pub k: usize,
    pub k2: usize,
    pub sup_distance: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub amplitude: f64,
    pub p: usize,
    pub galerkin_modes: Vec<usize>,
    pub truncation: usize,
    pub t0: f64,
    pub t1: f64,
    pub grid: usize,
    pub k_max: usize,
    /// Lipschitz rule used on the closed tube.
    pub lipschitz_rule: String,
    pub lipschitz: f64,
    /// `Λ = U·L`.
    pub lambda: f64,
    /// `Σ = max ℰ(t)`.
    pub sigma: f64,
    /// `ϱ = max R(t)`.
    pub rho: f64,
    /// `‖𝒥(φ_ap)(t) − φ_ap(t)‖ ≤ ℰ(t)` at every grid time.
    pub integral_error_ok: bool,
    pub steps: Vec<StepRecord>,
    pub tubes: Vec<TubeRecord>,
    pub cauchy: Vec<CauchyRecord>,
    pub tube_ok: bool,
    pub factorial_ok: bool,
    pub cauchy_ok: bool,
}

impl PicardReport {
    pub fn all_ok(&self) -> bool {
        self.integral_error_ok && self.tube_ok && self.factorial_ok && self.cauchy_ok
    }
}

fn factorial_term(x: f64, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * x / j as f64)
}

/// Runs `φ_0 = φ_ap, φ_{k+1} = 𝒥φ_k` for `k ≤ k_max` and checks it against
/// the sampled control radius `r`. `eps_integral` is `ℰ` on the grid.
pub fn iterate_and_check(
    problem: &FiniteVolterraProblem,
    approx: &TrajectoryGrid,
    r: &[f64],
    eps_integral: &[f64],
    k_max: usize,
) -> PicardReport {
    let model = &problem.model;
    let p = model.p();
    let rho = r.iter().cloned().fold(0.0, f64::max);
    let sigma = eps_integral.iter().cloned().fold(0.0, f64::max);
    let lipschitz =
        approx.coords.iter().map(|a| p as f64 * (model.basis.norm(a) + rho).powi(p as i32 - 1)).fold(0.0, f64::max);
    let lambda = lipschitz;
    let tau = problem.t1 - problem.t0;

    let mut iterates = vec![approx.clone()];
    for _ in 0..=k_max {
        let next = volterra_apply(problem, iterates.last().expect("non-empty"));
        iterates.push(next);
    }

    let first = iterates[1].distances(approx, model);
    let integral_error_ok = first.iter().zip(eps_integral).all(|(d, e)| *d <= e + BOUND_SLACK);

    let steps: Vec<StepRecord> = (0..=k_max)
        .map(|k| {
            let sup_step = iterates[k + 1].sup_distance(&iterates[k], model);
            let factorial_bound = sigma * factorial_term(lambda * tau, k);
            StepRecord { k, sup_step, factorial_bound, bound_ok: sup_step <= factorial_bound + BOUND_SLACK }
        })
        .collect();

    let tubes: Vec<TubeRecord> = iterates
        .iter()
        .enumerate()
        .map(|(k, it)| {
            let margins: Vec<f64> = it.distances(approx, model).iter().zip(r).map(|(d, r)| r - d).collect();
            // at t0 both sides vanish by construction
            let min_margin = margins[1..].iter().cloned().fold(f64::INFINITY, f64::min);
            TubeRecord { k, min_margin, ok: margins.iter().all(|m| *m >= -TUBE_TOLERANCE) }
        })
        .collect();

    let mut cauchy = Vec::new();
    for k in 3..iterates.len() {
        for k2 in k + 1..iterates.len() {
            let sup_distance = iterates[k2].sup_distance(&iterates[k], model);
            let bound = sigma * (k..k2).map(|j| factorial_term(lambda * tau, j)).sum::<f64>();
            cauchy.push(CauchyRecord { k, k2, sup_distance, bound, ok: sup_distance <= bound + BOUND_SLACK });
        }
    }

    PicardReport {
        amplitude: problem.datum.first().copied().unwrap_or(0.0),
        p,
        galerkin_modes: Vec::new(),
        truncation: model.dim(),
        t0: problem.t0,
        t1: problem.t1,
        grid: problem.grid,
        k_max,
        lipschitz_rule: "p (|phi_ap(t)| + rho)^(p-1), maximized over the grid".to_string(),
        lipschitz,
        lambda,
        sigma,
        rho,
        integral_error_ok,
        tube_ok: tubes.iter().all(|t| t.ok),
        factorial_ok: steps.iter().all(|s| s.bound_ok),
        cauchy_ok: cauchy.iter().all(|c| c.ok),
        steps,
        tubes,
        cauchy,
    }
}

/// Verification set-up for the heat equation: the Galerkin run on
/// `galerkin_modes` with datum `A s₁`, embedded into the first `truncation`
/// sine modes, on `[0, t1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatVerification {
    pub amplitude: f64,
    pub p: usize,
    pub galerkin_modes: Vec<usize>,
    pub truncation: usize,
    pub t1: f64,
    pub grid: usize,
    pub k_max: usize,
}

impl HeatVerification {
    pub fn new(amplitude: f64, t1: f64, k_max: usize) -> Self {
        Self {
            amplitude,
            p: 2,
            galerkin_modes: vec![1, 3],
            truncation: DEFAULT_TRUNCATION,
            t1,
            grid: DEFAULT_GRID,
            k_max,
        }
    }

    pub fn run(&self) -> Result<PicardReport, HeatError> {
        if self.galerkin_modes.iter().any(|&k| k > self.truncation) {
            return Err(HeatError::Invalid("Galerkin modes must lie inside the truncation".into()));
        }
        let mut scenario = HeatScenario::new(self.p, self.amplitude, &self.galerkin_modes);
        scenario.horizon = self.t1;
        let spec = heat::assemble_coupled_system(&scenario)?;
        let out = ode::integrate(&spec)?;
        if let OutcomeKind::BlowUp { t_end } | OutcomeKind::DomainExit { t_end } = out.kind {
            return Err(HeatError::Invalid(format!("control solution escapes at {t_end} before t1")));
        }
        let galerkin = scenario.model();
        let big = Arc::new(GalerkinModel::new(&(1..=self.truncation).collect::<Vec<_>>(), self.p));
        let mut datum = vec![0.0; self.truncation];
        datum[0] = self.amplitude;
        let problem = FiniteVolterraProblem::new(big, datum, 0.0, self.t1, self.grid);

        let n = galerkin.dim();
        let times = problem.times();
        let mut coords = Vec::with_capacity(times.len());
        let mut r = Vec::with_capacity(times.len());
        let mut eps = Vec::with_capacity(times.len());
        for &t in &times {
            let y = out.interpolate(t.min(out.t_last())).expect("inside the integrated range");
            let mut c = vec![0.0; self.truncation];
            for (pos, &k) in galerkin.basis.indices().iter().enumerate() {
                c[k - 1] = y[pos];
            }
            eps.push(epsilon_hat(&galerkin, &y[..n]));
            coords.push(c);
            r.push(y[n]);
        }
        // δ = 0: the datum lies in the Galerkin span.
        let eps_integral = convolve_exp(-1.0, problem.step(), &eps);
        let approx = TrajectoryGrid { times, coords };
        let mut report = iterate_and_check(&problem, &approx, &r, &eps_integral, self.k_max);
        report.amplitude = self.amplitude;
        report.galerkin_modes = self.galerkin_modes.clone();
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_problem() -> FiniteVolterraProblem {
        let model = Arc::new(GalerkinModel::new(&[1, 2, 3], 2));
        FiniteVolterraProblem::new(model, vec![0.5, 0.0, -0.2], 0.0, 1.0, 256)
    }

    #[test]
    fn linear_flow_ignores_the_argument() {
        let mut prob = small_problem();
        prob.nonlinear_scale = 0.0;
        let psi = TrajectoryGrid::constant(prob.times(), &[3.0, -1.0, 2.0]);
        let out = volterra_apply(&prob, &psi);
        for (t, c) in out.times.iter().zip(&out.coords) {
            assert!((c[0] - 0.5 * (-t).exp()).abs() < 1e-15);
            assert_eq!(c[1], 0.0);
            assert!((c[2] + 0.2 * (-9.0 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn fixed_point_is_stable_under_the_operator() {
        let prob = small_problem();
        let mut psi = TrajectoryGrid::constant(prob.times(), &prob.datum);
        for _ in 0..30 {
            psi = volterra_apply(&prob, &psi);
        }
        let again = volterra_apply(&prob, &psi);
        assert!(again.sup_distance(&psi, &prob.model) < 1e-12);
        // agrees with the Galerkin ODE on the same modes
        let model = prob.model.clone();
        let spec = ode::IvpSpec::new(
            move |_, y, dy| crate::galerkin::vector_field_into(&model, y, dy),
            prob.datum.clone(),
            0.0,
            1.0,
        )
        .with_tolerances(1e-12, 1e-14);
        let end = ode::integrate(&spec).unwrap().last().y.clone();
        let grid_end = psi.coords.last().unwrap();
        for (a, b) in end.iter().zip(grid_end) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn k_max_zero_reports_the_base_case() {
        let rep = HeatVerification { grid: 512, ..HeatVerification::new(1.0, 1.0, 0) }.run().unwrap();
        assert_eq!(rep.steps.len(), 1);
        assert!(rep.steps[0].sup_step <= rep.sigma + BOUND_SLACK);
        assert!(rep.cauchy.is_empty());
        assert!(rep.all_ok());
    }

    #[test]
    fn factorial_terms() {
        assert_eq!(factorial_term(3.0, 0), 1.0);
        assert!((factorial_term(3.0, 4) - 81.0 / 24.0).abs() < 1e-15);
    }
}
