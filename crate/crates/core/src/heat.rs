//! The nonlinear heat equation `φ_t = φ_xx + φ^p` on `(0, π)` with Dirichlet
//! data and `f0 = A s₁`.
//!
//! The Galerkin trajectory on a set of sine modes is coupled with the control
//! equation `R' = ε̂(a) + ℓ̂(R; a) − R` (`U = B = 1`); its existence time `t_G`
//! is a lower bound on the blow-up time of the PDE, Kaplan's time `t_K` an
//! upper one.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{ClosedFormBound, ControlError, SemigroupEstimator};
use crate::ext::ExtReal;
use crate::galerkin::{binomial, epsilon_hat, initial_coords, vector_field_into, GalerkinModel};
use crate::kaplan::{kaplan_time, KaplanError, KaplanInput};
use crate::ode::{self, IvpOutcome, IvpSpec, OdeError, OutcomeKind};

pub const DEFAULT_HORIZON: f64 = 50.0;
/// Uniform output points before the geometric refinement near blow-up.
pub const TRAJECTORY_POINTS: usize = 512;
const REFINE_POINTS: i32 = 24;

/// `C_N = √2/2`: `‖A s₁‖ = A / C_N`.
pub fn c_n() -> f64 {
    2f64.sqrt() / 2.0
}

/// `C_K = 2√(2/π)`: `Q(A s₁) = A / C_K`.
pub fn c_k() -> f64 {
    2.0 * (2.0 / PI).sqrt()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeatError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("the coupled system left its domain at t = {0}")]
    DomainExit(f64),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Kaplan(#[from] KaplanError),
}

/// `u(t) = e^{−t}`: the Dirichlet heat semigroup contracts at the rate of its
/// slowest mode.
pub fn semigroup_estimator_heat() -> SemigroupEstimator {
    SemigroupEstimator::new(1.0, 1.0).expect("U = 1 is valid")
}

/// Bounds from the zero approximate solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicBounds {
    pub norm_f0: f64,
    pub tn: ExtReal,
    pub curve: ClosedFormBound,
}

pub fn basic_bounds(amplitude: f64, p: usize) -> BasicBounds {
    let norm_f0 = amplitude / c_n();
    let sg = semigroup_estimator_heat();
    let curve = ClosedFormBound::new(sg.u(), sg.b(), 1.0, p, norm_f0);
    BasicBounds { norm_f0, tn: curve.tn, curve }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatScenario {
    pub p: usize,
    pub amplitude: f64,
    pub modes: Vec<usize>,
    pub horizon: f64,
    pub rtol: f64,
    pub atol: f64,
    pub blowup_threshold: f64,
}

impl HeatScenario {
    pub fn new(p: usize, amplitude: f64, modes: &[usize]) -> Self {
        Self {
            p,
            amplitude,
            modes: modes.to_vec(),
            horizon: DEFAULT_HORIZON,
            rtol: ode::DEFAULT_RTOL,
            atol: ode::DEFAULT_ATOL,
            blowup_threshold: ode::DEFAULT_BLOWUP_THRESHOLD,
        }
    }

    /// The two-mode quadratic case.
    pub fn two_mode(amplitude: f64) -> Self {
        Self::new(2, amplitude, &[1, 3])
    }

    pub fn validate(&self) -> Result<(), HeatError> {
        let bad = |m: String| Err(HeatError::Invalid(m));
        if self.p < 2 {
            return bad(format!("p must be at least 2 (got {})", self.p));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return bad(format!("amplitude must be finite and >= 0 (got {})", self.amplitude));
        }
        if !self.modes.contains(&1) {
            return bad("the mode set must contain 1".into());
        }
        if self.modes.windows(2).any(|w| w[0] >= w[1]) || self.modes[0] == 0 {
            return bad("modes must be positive and strictly increasing".into());
        }
        if !(self.horizon > 0.0) {
            return bad("horizon must be positive".into());
        }
        Ok(())
    }

    pub fn model(&self) -> GalerkinModel {
        GalerkinModel::new(&self.modes, self.p)
    }
}

/// `Σ_j binom(p, j) n^{p−j} r^j`.
fn growth_at(p: usize, norm: f64, r: f64) -> f64 {
    (1..=p).map(|j| binomial(p, j) * norm.powi((p - j) as i32) * r.powi(j as i32)).sum()
}

/// State `(a, R)`; with `linear = false` the terms `−k² a^k` and `−R` are dropped.
fn coupled_rhs(model: Arc<GalerkinModel>, linear: bool) -> impl Fn(f64, &[f64], &mut [f64]) + Send + Sync {
    move |_, y, dy| {
        let n = model.dim();
        let (a, r) = (&y[..n], y[n]);
        if linear {
            vector_field_into(&model, a, &mut dy[..n]);
        } else {
            for (k, d) in dy[..n].iter_mut().enumerate() {
                *d = model.tensor.contract(k, a);
            }
        }
        let mut dr = epsilon_hat(&model, a) + growth_at(model.p(), model.basis.norm(a), r);
        if linear {
            dr -= r;
        }
        dy[n] = dr;
    }
}

fn initial_state(model: &GalerkinModel, amplitude: f64) -> Vec<f64> {
    let (mut y, datum_error) = initial_coords(&model.basis, &BTreeMap::from([(1, amplitude)]));
    y.push(datum_error);
    y
}

fn coupled_spec(scenario: &HeatScenario, model: Arc<GalerkinModel>) -> IvpSpec {
    let y0 = initial_state(&model, scenario.amplitude);
    IvpSpec::new(coupled_rhs(model, true), y0, 0.0, scenario.horizon)
        .with_tolerances(scenario.rtol, scenario.atol)
        .with_blowup_threshold(scenario.blowup_threshold)
}

/// The Galerkin coordinates coupled with the control equation.
pub fn assemble_coupled_system(scenario: &HeatScenario) -> Result<IvpSpec, HeatError> {
    scenario.validate()?;
    Ok(coupled_spec(scenario, Arc::new(scenario.model())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub a: Vec<f64>,
    pub norm_phi_ap: f64,
    pub r: f64,
    /// `R / ‖φ_ap‖`.
    pub ratio: ExtReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioOutcome {
    Global,
    BlowUp,
    /// The horizon was reached without settling; `t_G` is the horizon.
    HorizonReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub amplitude: f64,
    pub p: usize,
    pub modes: Vec<usize>,
    pub t_n: ExtReal,
    pub t_g: ExtReal,
    /// Present when Kaplan's criterion applies (`A > C_K`).
    pub t_k: Option<ExtReal>,
    pub eta: Option<f64>,
    pub outcome: ScenarioOutcome,
    pub trajectory: Vec<TrajectoryPoint>,
}

fn ratio(r: f64, norm: f64) -> ExtReal {
    if norm > 0.0 {
        ExtReal::Finite(r / norm)
    } else if r == 0.0 {
        ExtReal::Finite(0.0)
    } else {
        ExtReal::PosInf
    }
}

/// Dense output: uniform points on `[0, T)`, a geometric refinement towards
/// `T` when the run escaped, and the final state at `T`.
pub fn sample_trajectory(model: &GalerkinModel, out: &IvpOutcome) -> Vec<TrajectoryPoint> {
    let n = model.dim();
    let t_end = out.t_last();
    let mut times: Vec<f64> = (0..TRAJECTORY_POINTS).map(|i| t_end * i as f64 / TRAJECTORY_POINTS as f64).collect();
    if matches!(out.kind, OutcomeKind::BlowUp { .. }) {
        let step = t_end / TRAJECTORY_POINTS as f64;
        times.extend((1..=REFINE_POINTS).map(|j| t_end - step * 0.5f64.powi(j)));
    }
    times.push(t_end);
    times.dedup();
    times
        .into_iter()
        .filter_map(|t| {
            let y = out.interpolate(t)?;
            let norm = model.basis.norm(&y[..n]);
            Some(TrajectoryPoint { t, a: y[..n].to_vec(), norm_phi_ap: norm, r: y[n], ratio: ratio(y[n], norm) })
        })
        .collect()
}

pub fn kaplan_bound(amplitude: f64, p: usize) -> Result<Option<ExtReal>, HeatError> {
    if amplitude > c_k() {
        let input = KaplanInput::new(amplitude / c_k(), p)?;
        Ok(Some(ExtReal::Finite(kaplan_time(&input)?)))
    } else {
        Ok(None)
    }
}

pub fn eta(t_g: ExtReal, t_k: Option<ExtReal>) -> Option<f64> {
    match (t_g, t_k) {
        (ExtReal::Finite(g), Some(ExtReal::Finite(k))) => Some((k - g) / (k + g)),
        _ => None,
    }
}

pub fn run_scenario(scenario: &HeatScenario) -> Result<ScenarioResult, HeatError> {
    scenario.validate()?;
    let model = Arc::new(scenario.model());
    let out = ode::integrate(&coupled_spec(scenario, model.clone()))?;
    let (outcome, t_g) = match out.kind {
        OutcomeKind::ReachedHorizon if out.is_global() => (ScenarioOutcome::Global, ExtReal::PosInf),
        OutcomeKind::ReachedHorizon => (ScenarioOutcome::HorizonReached, ExtReal::Finite(scenario.horizon)),
        OutcomeKind::BlowUp { t_end } => (ScenarioOutcome::BlowUp, ExtReal::Finite(t_end)),
        OutcomeKind::DomainExit { t_end } => return Err(HeatError::DomainExit(t_end)),
    };
    let t_k = kaplan_bound(scenario.amplitude, scenario.p)?;
    Ok(ScenarioResult {
        amplitude: scenario.amplitude,
        p: scenario.p,
        modes: scenario.modes.clone(),
        t_n: basic_bounds(scenario.amplitude, scenario.p).tn,
        t_g,
        t_k,
        eta: eta(t_g, t_k),
        outcome,
        trajectory: sample_trajectory(&model, &out),
    })
}

/// Smallest amplitude whose coupled system fails to exist globally within
/// `horizon`, located by bisection on `[lo, hi]` to within `tol`.
pub fn critical_amplitude(
    p: usize,
    modes: &[usize],
    horizon: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, HeatError> {
    let mut base = HeatScenario::new(p, lo, modes);
    base.horizon = horizon;
    base.validate()?;
    let model = Arc::new(base.model());
    let family = |a: f64| {
        let mut s = base.clone();
        s.amplitude = a;
        coupled_spec(&s, model.clone())
    };
    Ok(ode::bisect_parameter(family, lo, hi, tol)?)
}

/// The amplitude-independent system in rescaled time `A^{p−1} t`.
#[derive(Debug, Clone)]
pub struct RescaledLimit {
    pub c_g: f64,
    pub outcome: IvpOutcome,
}

pub fn rescaled_limit(p: usize, modes: &[usize]) -> Result<RescaledLimit, HeatError> {
    HeatScenario::new(p, 1.0, modes).validate()?;
    let model = Arc::new(GalerkinModel::new(modes, p));
    let y0 = initial_state(&model, 1.0);
    let spec = IvpSpec::new(coupled_rhs(model, false), y0, 0.0, 10.0);
    let out = ode::integrate(&spec)?;
    match out.kind {
        OutcomeKind::BlowUp { t_end } => Ok(RescaledLimit { c_g: t_end, outcome: out }),
        OutcomeKind::DomainExit { t_end } => Err(HeatError::DomainExit(t_end)),
        OutcomeKind::ReachedHorizon => Err(HeatError::Invalid("rescaled system did not escape".into())),
    }
}

/// `lim A^{p−1} t_K = C_K^{p−1} / (p − 1)`.
pub fn kaplan_limit(p: usize) -> f64 {
    c_k().powi(p as i32 - 1) / (p as f64 - 1.0)
}

/// `(K − C_G)/(K + C_G)` with `K` the Kaplan limit.
pub fn limit_eta(c_g: f64, p: usize) -> f64 {
    let k = kaplan_limit(p);
    (k - c_g) / (k + c_g)
}

/// `−(C_G / 𝒞_G) log(1 − 𝒞_G / A)`.
pub fn empirical_lower_curve(amplitude: f64, critical: f64, c_g: f64) -> Result<f64, HeatError> {
    if !(amplitude > critical) {
        return Err(HeatError::Invalid(format!("amplitude {amplitude} must exceed {critical}")));
    }
    Ok(-(c_g / critical) * (-critical / amplitude).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_from_definitions() {
        assert!((c_n() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        assert!((c_k() - 1.5957691216057308).abs() < 1e-15);
    }

    #[test]
    fn semigroup_examples() {
        let sg = semigroup_estimator_heat();
        assert_eq!((sg.u(), sg.b()), (1.0, 1.0));
        // mode-wise decay e^{−k² t}; the estimator is sharp on s₁
        assert_eq!(sg.eval(0.7), (-0.7f64).exp());
        let decay2 = (-4.0f64).exp();
        assert!(decay2 < sg.eval(1.0));
    }

    #[test]
    fn basic_bound_examples() {
        assert!(basic_bounds(0.5, 2).tn.is_infinite());
        let b = basic_bounds(c_n(), 2);
        assert!((b.norm_f0 - 1.0).abs() < 1e-15);
        assert!((b.curve.r(3.0).unwrap() - 1.0).abs() < 1e-14);
        let t = basic_bounds(2.0, 2).tn.finite().unwrap();
        assert!((t + (1.0 - c_n() / 2.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn coupled_rhs_matches_two_mode_display() {
        let spec = assemble_coupled_system(&HeatScenario::two_mode(2.0)).unwrap();
        assert_eq!(spec.y0, vec![2.0, 0.0, 0.0]);
        let c = (2.0 / PI.powi(3)).sqrt();
        let pi3 = PI.powi(3);
        let (al, ga, r) = (0.8, -0.3, 0.25);
        let mut dy = [0.0; 3];
        (spec.rhs)(0.0, &[al, ga, r], &mut dy);
        let xa = -al + c * (8.0 / 3.0 * al * al - 16.0 / 15.0 * al * ga + 72.0 / 35.0 * ga * ga);
        let xg = -9.0 * ga + c * (-8.0 / 15.0 * al * al + 144.0 / 35.0 * al * ga + 8.0 / 9.0 * ga * ga);
        let e2 = (7.0 / (2.0 * PI) - 512.0 / (15.0 * pi3)) * al.powi(4)
            + (34816.0 / (315.0 * pi3) - 10.0 / PI) * al.powi(3) * ga
            + (46.0 / PI - 12172288.0 / (33075.0 * pi3)) * al * al * ga * ga
            - 22528.0 / (175.0 * pi3) * al * ga.powi(3)
            + (39.0 / (2.0 * PI) - 3247616.0 / (99225.0 * pi3)) * ga.powi(4);
        let rd = e2.sqrt() + r * r + 2.0 * (2.0 * al * al + 10.0 * ga * ga).sqrt() * r - r;
        assert!((dy[0] - xa).abs() < 1e-14);
        assert!((dy[1] - xg).abs() < 1e-14);
        assert!((dy[2] - rd).abs() < 1e-13);
    }

    #[test]
    fn zero_amplitude_is_stationary() {
        let res = run_scenario(&HeatScenario::two_mode(0.0)).unwrap();
        assert_eq!(res.outcome, ScenarioOutcome::Global);
        assert!(res.trajectory.iter().all(|p| p.r == 0.0 && p.a.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn unit_amplitude_decays() {
        let res = run_scenario(&HeatScenario::two_mode(1.0)).unwrap();
        assert_eq!(res.t_g, ExtReal::PosInf);
        assert_eq!(res.t_k, None);
        let last = res.trajectory.last().unwrap();
        assert!(last.norm_phi_ap < 1e-10 && last.r < 1e-10);
        for p in &res.trajectory {
            let n = (2.0 * p.a[0] * p.a[0] + 10.0 * p.a[1] * p.a[1]).sqrt();
            assert!((p.norm_phi_ap - n).abs() <= 1e-15 * n.max(1.0));
        }
    }

    #[test]
    fn table_row_a2() {
        let res = run_scenario(&HeatScenario::two_mode(2.0)).unwrap();
        assert_eq!(res.outcome, ScenarioOutcome::BlowUp);
        let tg = res.t_g.finite().unwrap();
        assert!((tg / 0.7730 - 1.0).abs() < 5e-3, "{tg}");
        let tk = res.t_k.unwrap().finite().unwrap();
        assert!((tk / 1.598 - 1.0).abs() < 1e-3);
        assert!((res.eta.unwrap() / 0.3481 - 1.0).abs() < 5e-3);
        let rs: Vec<f64> = res.trajectory.iter().map(|p| p.r).collect();
        assert!(rs.last().unwrap() > &1e6);
        assert!(res.trajectory.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn validation() {
        assert!(HeatScenario::new(2, 1.0, &[2, 3]).validate().is_err());
        assert!(HeatScenario::new(1, 1.0, &[1]).validate().is_err());
        assert!(HeatScenario::new(2, -1.0, &[1]).validate().is_err());
        assert!(HeatScenario::new(2, 1.0, &[1, 1]).validate().is_err());
    }

    #[test]
    fn empirical_curve() {
        assert!(empirical_lower_curve(1.0, 1.056, 1.026).is_err());
        let big = 1e6;
        let v = empirical_lower_curve(big, 1.056, 1.026).unwrap();
        assert!((v * big / 1.026 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn ratio_handles_the_origin() {
        assert_eq!(ratio(0.0, 0.0), ExtReal::Finite(0.0));
        assert_eq!(ratio(1.0, 0.0), ExtReal::PosInf);
        assert_eq!(ratio(1.0, 2.0), ExtReal::Finite(0.5));
    }
}
