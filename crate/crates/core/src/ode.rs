//! Adaptive explicit Runge–Kutta integration with finite-time escape detection.
//!
//! The stepper is the Dormand–Prince 5(4) pair with FSAL. A run ends in one of
//! three ways: the horizon is reached, the state escapes (max-norm above the
//! blow-up threshold, or the accepted step collapses below `min_step`), or the
//! right-hand side stops producing finite values.

use std::sync::Arc;

use thiserror::Error;

/// Right-hand side `f(t, y, dy)`; writes the derivative into `dy`.
pub type Rhs = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e8;
const DEFAULT_MAX_STEPS: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("invalid initial value problem: {0}")]
    InvalidSpec(String),
    #[error("step budget of {0} steps exhausted at t = {1}")]
    StepLimit(usize, f64),
    #[error("bisection endpoints do not bracket a change of outcome (both {0})")]
    Bracket(&'static str),
}

#[derive(Clone)]
pub struct IvpSpec {
    pub rhs: Arc<Rhs>,
    pub y0: Vec<f64>,
    pub t0: f64,
    pub horizon: f64,
    pub rtol: f64,
    pub atol: f64,
    pub blowup_threshold: f64,
    pub min_step: f64,
    /// Upper bound on the step size.
    pub max_step: Option<f64>,
    /// Integrate with this constant step and no error control.
    pub fixed_step: Option<f64>,
    /// Keep every n-th accepted step in the sample list (the final state is always kept).
    pub record_every: usize,
    pub max_steps: usize,
}

impl std::fmt::Debug for IvpSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IvpSpec")
            .field("dimension", &self.dimension())
            .field("t0", &self.t0)
            .field("horizon", &self.horizon)
            .field("rtol", &self.rtol)
            .field("atol", &self.atol)
            .field("blowup_threshold", &self.blowup_threshold)
            .field("min_step", &self.min_step)
            .finish_non_exhaustive()
    }
}

impl IvpSpec {
    pub fn new<F>(rhs: F, y0: Vec<f64>, t0: f64, horizon: f64) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self {
            rhs: Arc::new(rhs),
            y0,
            t0,
            horizon,
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            min_step: 1e-12 * (horizon - t0).abs().max(f64::MIN_POSITIVE),
            max_step: None,
            fixed_step: None,
            record_every: 1,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_blowup_threshold(mut self, threshold: f64) -> Self {
        self.blowup_threshold = threshold;
        self
    }

    pub fn with_fixed_step(mut self, h: f64) -> Self {
        self.fixed_step = Some(h);
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }

    pub fn with_record_every(mut self, n: usize) -> Self {
        self.record_every = n.max(1);
        self
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        let bad = |m: &str| Err(OdeError::InvalidSpec(m.to_string()));
        if self.y0.is_empty() {
            return bad("dimension must be positive");
        }
        if !(self.horizon > self.t0) {
            return bad("horizon must exceed t0");
        }
        if !(self.rtol > 0.0 && self.rtol < 1.0 && self.atol > 0.0 && self.atol < 1.0) {
            return bad("rtol and atol must lie in (0, 1)");
        }
        if !(self.min_step > 0.0) {
            return bad("min_step must be positive");
        }
        if !(self.blowup_threshold > max_norm(&self.y0)) {
            return bad("blow-up threshold must exceed the initial max-norm");
        }
        if let Some(h) = self.fixed_step {
            if !(h > 0.0) {
                return bad("fixed step must be positive");
            }
        }
        if self.y0.iter().any(|v| !v.is_finite()) {
            return bad("initial state must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutcomeKind {
    ReachedHorizon,
    /// Escape detected; the escape time of the numerical solution lies in
    /// `[t_end - 1e-6, t_end]`.
    BlowUp {
        t_end: f64,
    },
    DomainExit {
        t_end: f64,
    },
}

impl OutcomeKind {
    pub fn label(&self) -> &'static str {
        match self {
            OutcomeKind::ReachedHorizon => "reached_horizon",
            OutcomeKind::BlowUp { .. } => "blow_up",
            OutcomeKind::DomainExit { .. } => "domain_exit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub y: Vec<f64>,
}

/// Extremes observed over every accepted step (not only the recorded ones).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_component: f64,
    pub max_norm: f64,
}

#[derive(Debug, Clone)]
pub struct IvpOutcome {
    pub kind: OutcomeKind,
    pub samples: Vec<Sample>,
    /// `f(t, y)` at each sample, used for Hermite dense output.
    pub derivatives: Vec<Vec<f64>>,
    pub stats: StepStats,
    pub horizon: f64,
    /// Absolute size below which changes of the state are integration noise
    /// (ten times `atol`).
    pub noise_floor: f64,
}

impl IvpOutcome {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("an outcome always holds the initial sample")
    }

    pub fn t_last(&self) -> f64 {
        self.last().t
    }

    /// Cubic Hermite interpolation between recorded samples; `None` outside
    /// the integrated range.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        let first = self.samples.first()?;
        let last = self.last();
        if t < first.t || t > last.t {
            return None;
        }
        let idx = match self.samples.binary_search_by(|s| s.t.total_cmp(&t)) {
            Ok(i) => return Some(self.samples[i].y.clone()),
            Err(i) => i,
        };
        let (a, b) = (&self.samples[idx - 1], &self.samples[idx]);
        let (da, db) = (&self.derivatives[idx - 1], &self.derivatives[idx]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Some((0..a.y.len()).map(|i| h00 * a.y[i] + h10 * h * da[i] + h01 * b.y[i] + h11 * h * db[i]).collect())
    }

    /// Operational global existence: the horizon was reached and the state
    /// max-norm is non-increasing, up to the noise floor, over the final 10%
    /// of the time span.
    pub fn is_global(&self) -> bool {
        if self.kind != OutcomeKind::ReachedHorizon {
            return false;
        }
        let t0 = self.samples[0].t;
        let start = self.horizon - 0.1 * (self.horizon - t0);
        let tail: Vec<f64> = self.samples.iter().filter(|s| s.t >= start).map(|s| max_norm(&s.y)).collect();
        tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + self.noise_floor)
    }
}

pub fn max_norm(y: &[f64]) -> f64 {
    y.iter().fold(0.0, |m, v| m.max(v.abs()))
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n], y_new: vec![0.0; n], err: vec![0.0; n] }
    }

    /// One DP5 step from `(t, y)` with `k[0] = f(t, y)` already set. Leaves the
    /// 5th-order solution in `y_new`, `f(t+h, y_new)` in `k[6]`, and the
    /// embedded error vector in `err`. Returns `false` if any stage is non-finite.
    fn step(&mut self, rhs: &Rhs, t: f64, y: &[f64], h: f64) -> bool {
        let n = y.len();
        let Stages { k, tmp, y_new, err } = self;
        macro_rules! stage {
            ($dst:expr, $c:expr, $($a:expr => $src:expr),+) => {{
                for i in 0..n {
                    tmp[i] = y[i] + h * (0.0 $(+ $a * k[$src][i])+);
                }
                let (head, tail) = k.split_at_mut($dst);
                let _ = head;
                rhs(t + $c * h, tmp, &mut tail[0]);
            }};
        }
        stage!(1, C2, A21 => 0);
        stage!(2, C3, A31 => 0, A32 => 1);
        stage!(3, C4, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, C5, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, 1.0, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for i in 0..n {
            y_new[i] = y[i] + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        }
        if y_new.iter().any(|v| !v.is_finite()) {
            return false;
        }
        {
            let (head, tail) = k.split_at_mut(6);
            let _ = head;
            rhs(t + h, y_new, &mut tail[0]);
        }
        for i in 0..n {
            err[i] = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
        }
        k.iter().all(|v| v.iter().all(|x| x.is_finite()))
    }
}

fn initial_step(spec: &IvpSpec, f0: &[f64], stages: &mut Stages) -> f64 {
    let span = spec.horizon - spec.t0;
    let scale: Vec<f64> = spec.y0.iter().map(|v| spec.atol + spec.rtol * v.abs()).collect();
    let d0 = rms(spec.y0.iter().zip(&scale).map(|(v, s)| v / s));
    let d1 = rms(f0.iter().zip(&scale).map(|(v, s)| v / s));
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<f64> = spec.y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let f1 = &mut stages.tmp;
    (spec.rhs)(spec.t0 + h0, &y1, f1);
    let d2 = rms(f1.iter().zip(f0).zip(&scale).map(|((a, b), s)| (a - b) / s)) / h0;
    let h1 = if !d2.is_finite() {
        h0 * 1e-3
    } else if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(span).max(spec.min_step)
}

fn rms<I: Iterator<Item = f64>>(it: I) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    (s / n.max(1) as f64).sqrt()
}

/// Integrates `spec`. Identical inputs give bit-identical outcomes.
pub fn integrate(spec: &IvpSpec) -> Result<IvpOutcome, OdeError> {
    spec.validate()?;
    let n = spec.dimension();
    let rhs: &Rhs = spec.rhs.as_ref();
    let mut stages = Stages::new(n);
    let mut t = spec.t0;
    let mut y = spec.y0.clone();
    let mut f = vec![0.0; n];
    rhs(t, &y, &mut f);

    let mut samples = vec![Sample { t, y: y.clone() }];
    let mut derivatives = vec![f.clone()];
    let mut stats = StepStats {
        accepted: 0,
        rejected: 0,
        min_component: y.iter().cloned().fold(f64::INFINITY, f64::min),
        max_norm: max_norm(&y),
    };
    let finish = |kind, samples, derivatives, stats| IvpOutcome {
        kind,
        samples,
        derivatives,
        stats,
        horizon: spec.horizon,
        noise_floor: 10.0 * spec.atol,
    };
    if f.iter().any(|v| !v.is_finite()) {
        return Ok(finish(OutcomeKind::DomainExit { t_end: t }, samples, derivatives, stats));
    }

    let mut h = match spec.fixed_step {
        Some(h) => h,
        None => initial_step(spec, &f, &mut stages),
    };
    let mut last_rejected = false;
    let mut since_record = 0usize;

    while t < spec.horizon {
        if stats.accepted + stats.rejected >= spec.max_steps {
            return Err(OdeError::StepLimit(spec.max_steps, t));
        }
        if let Some(hm) = spec.max_step {
            h = h.min(hm);
        }
        let remaining = spec.horizon - t;
        let last_step = h >= remaining;
        let h_try = if last_step { remaining } else { h };

        stages.k[0].copy_from_slice(&f);
        let finite = stages.step(rhs, t, &y, h_try);

        let err_norm = if !finite {
            f64::INFINITY
        } else if spec.fixed_step.is_some() {
            0.0
        } else {
            y.iter()
                .zip(&stages.y_new)
                .zip(&stages.err)
                .map(|((a, b), e)| e.abs() / (spec.atol + spec.rtol * a.abs().max(b.abs())))
                .fold(0.0, f64::max)
        };

        if err_norm <= 1.0 {
            t = if last_step { spec.horizon } else { t + h_try };
            std::mem::swap(&mut y, &mut stages.y_new);
            f.copy_from_slice(&stages.k[6]);
            stats.accepted += 1;
            let norm = max_norm(&y);
            stats.max_norm = stats.max_norm.max(norm);
            stats.min_component = y.iter().cloned().fold(stats.min_component, f64::min);

            since_record += 1;
            let escaped = norm > spec.blowup_threshold;
            if since_record >= spec.record_every || escaped || t >= spec.horizon {
                samples.push(Sample { t, y: y.clone() });
                derivatives.push(f.clone());
                since_record = 0;
            }
            if escaped {
                let t_end = t + escape_remainder(&y, &f);
                return Ok(finish(OutcomeKind::BlowUp { t_end }, samples, derivatives, stats));
            }
            if spec.fixed_step.is_none() {
                let fac = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
                let fac = if last_rejected { fac.min(1.0) } else { fac };
                if !last_step {
                    h = h_try * fac;
                }
            }
            last_rejected = false;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            let fac = if err_norm.is_finite() { (0.9 * err_norm.powf(-0.2)).clamp(0.1, 1.0) } else { 0.25 };
            h = h_try * fac;
            if spec.fixed_step.is_some() && !finite {
                return Ok(finish(OutcomeKind::DomainExit { t_end: t }, samples, derivatives, stats));
            }
            if h < spec.min_step {
                if samples.last().map(|s| s.t) != Some(t) {
                    samples.push(Sample { t, y: y.clone() });
                    derivatives.push(f.clone());
                }
                return Ok(finish(OutcomeKind::BlowUp { t_end: t }, samples, derivatives, stats));
            }
        }
    }
    Ok(finish(OutcomeKind::ReachedHorizon, samples, derivatives, stats))
}

/// Time left before escape, estimated from the dominant component as
/// `|y_i| / |f_i|`. For polynomial growth of degree `q ≥ 2` the true remainder
/// is `|y_i| / ((q - 1)|f_i|) ≤` this estimate, so `t + remainder` bounds the
/// escape time from above.
fn escape_remainder(y: &[f64], f: &[f64]) -> f64 {
    let (i, _) = y.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).expect("non-empty state");
    let rate = f[i].abs() / y[i].abs();
    if rate.is_finite() && rate > 0.0 {
        1.0 / rate
    } else {
        0.0
    }
}

/// Bisection on the global-existence predicate over a one-parameter family.
///
/// Exactly one endpoint must yield global existence. Returns a parameter
/// within `tol` of the switch point.
pub fn bisect_parameter<F>(family: F, lo: f64, hi: f64, tol: f64) -> Result<f64, OdeError>
where
    F: Fn(f64) -> IvpSpec,
{
    if lo == hi {
        return Ok(lo);
    }
    let global_at = |c: f64| -> Result<bool, OdeError> { Ok(integrate(&family(c))?.is_global()) };
    let g_lo = global_at(lo)?;
    let g_hi = global_at(hi)?;
    if g_lo == g_hi {
        return Err(OdeError::Bracket(if g_lo { "global" } else { "non-global" }));
    }
    let (mut a, mut b) = (lo, hi);
    while (b - a).abs() > 2.0 * tol {
        let mid = 0.5 * (a + b);
        if global_at(mid)? == g_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};

    fn decay() -> IvpSpec {
        IvpSpec::new(|_, y, dy| dy[0] = -y[0], vec![1.0], 0.0, 1.0)
    }

    fn power(p: i32, r0: f64) -> IvpSpec {
        IvpSpec::new(move |_, y, dy| dy[0] = y[0].powi(p), vec![r0], 0.0, 10.0)
    }

    #[test]
    fn linear_decay_reaches_horizon_accurately() {
        let out = integrate(&decay()).unwrap();
        assert_eq!(out.kind, OutcomeKind::ReachedHorizon);
        assert_eq!(out.t_last(), 1.0);
        assert!((out.last().y[0] - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn quadratic_blow_up_time_is_bracketed() {
        let out = integrate(&power(2, 1.0)).unwrap();
        match out.kind {
            OutcomeKind::BlowUp { t_end } => assert!((t_end - 1.0).abs() < 1e-4, "{t_end}"),
            k => panic!("unexpected {k:?}"),
        }
    }

    #[test]
    fn power_law_escape_times_match_closed_form() {
        for p in 2..=4 {
            for &r0 in &[0.5f64, 1.0, 2.0] {
                let exact = 1.0 / ((p as f64 - 1.0) * r0.powi(p - 1));
                let mut spec = power(p, r0);
                spec.horizon = 10.0 * exact;
                spec.min_step = 1e-12 * spec.horizon;
                let out = integrate(&spec).unwrap();
                let OutcomeKind::BlowUp { t_end } = out.kind else { panic!("no blow-up for p={p}") };
                assert!((t_end - exact).abs() < 1e-4, "p={p} r0={r0}: {t_end} vs {exact}");
                assert!(t_end >= exact - 1e-6 && t_end - 1e-6 <= exact + 1e-12);
            }
        }
    }

    #[test]
    fn fixed_step_convergence_order_at_least_four() {
        let exact = (-1f64).exp();
        let err = |h: f64| {
            let out = integrate(&decay().with_fixed_step(h)).unwrap();
            (out.last().y[0] - exact).abs()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn non_finite_rhs_is_a_domain_exit() {
        let spec = IvpSpec::new(|t, _, dy| dy[0] = if t > 0.5 { f64::NAN } else { 1.0 }, vec![0.0], 0.0, 1.0);
        let out = integrate(&spec).unwrap();
        match out.kind {
            OutcomeKind::DomainExit { .. } | OutcomeKind::BlowUp { .. } => {}
            k => panic!("unexpected {k:?}"),
        }
        let spec = IvpSpec::new(|_, _, dy| dy[0] = f64::INFINITY, vec![0.0], 0.0, 1.0);
        assert_eq!(integrate(&spec).unwrap().kind, OutcomeKind::DomainExit { t_end: 0.0 });
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = decay();
        s.horizon = 0.0;
        assert!(integrate(&s).is_err());
        let s = decay().with_tolerances(0.0, 1e-12);
        assert!(integrate(&s).is_err());
        let s = decay().with_blowup_threshold(0.5);
        assert!(integrate(&s).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let hash = |o: &IvpOutcome| {
            let mut h = DefaultHasher::new();
            for s in &o.samples {
                s.t.to_bits().hash(&mut h);
                for v in &s.y {
                    v.to_bits().hash(&mut h);
                }
            }
            h.finish()
        };
        let spec = IvpSpec::new(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0] + 0.1 * y[0] * y[0];
            },
            vec![1.0, 0.0],
            0.0,
            20.0,
        );
        let a = integrate(&spec).unwrap();
        let b = integrate(&spec).unwrap();
        assert_eq!(hash(&a), hash(&b));
    }

    #[test]
    fn hermite_dense_output_is_accurate() {
        let out = integrate(&decay()).unwrap();
        for i in 0..=50 {
            let t = i as f64 / 50.0;
            let y = out.interpolate(t).unwrap()[0];
            assert!((y - (-t).exp()).abs() < 1e-7, "t={t}");
        }
        assert!(out.interpolate(1.5).is_none());
    }

    #[test]
    fn bisection_recovers_scalar_threshold() {
        // r' = r² - c r, r(0) = 1: global iff c ≥ 1.
        let family = |c: f64| IvpSpec::new(move |_, y, dy| dy[0] = y[0] * y[0] - c * y[0], vec![1.0], 0.0, 50.0);
        let c = bisect_parameter(family, 0.5, 1.5, 1e-6).unwrap();
        assert!((c - 1.0).abs() <= 1e-6, "{c}");
        assert_eq!(bisect_parameter(family, 0.7, 0.7, 1e-6).unwrap(), 0.7);
        assert!(matches!(bisect_parameter(family, 1.2, 1.5, 1e-6), Err(OdeError::Bracket(_))));
    }

    #[test]
    fn record_stride_keeps_stats_over_all_steps() {
        let spec = IvpSpec::new(|_, y, dy| dy[0] = -y[0], vec![1.0], 0.0, 5.0).with_record_every(10);
        let out = integrate(&spec).unwrap();
        assert!(out.samples.len() < out.stats.accepted);
        assert_eq!(out.t_last(), 5.0);
        assert!(out.stats.min_component > 0.0);
    }
}
