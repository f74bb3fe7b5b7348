//! `φ_t = φ_x + φ^p` on `C₀(ℝ)`: the zero-approximation bound against the
//! exact maximal solution `f0(x+t) / [1 − (p−1) f0(x+t)^{p−1} t]^{1/(p−1)}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{r_closed, tn_closed, ControlError};
use crate::ext::ExtReal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("invalid wave datum: {0}")]
    Invalid(String),
    #[error(transparent)]
    Control(#[from] ControlError),
}

/// A datum summarized by `sup f0` and `sup |f0|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveDatum {
    pub sup_pos: f64,
    pub sup_abs: f64,
    pub p: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveCase {
    /// `ϑ = t_N`.
    Sharp,
    /// `t_N < ϑ < ∞`.
    Longer,
    /// `ϑ = ∞ > t_N`.
    Global,
}

impl WaveCase {
    pub fn roman(self) -> &'static str {
        match self {
            WaveCase::Sharp => "i",
            WaveCase::Longer => "ii",
            WaveCase::Global => "iii",
        }
    }
}

/// A datum extracted from grid samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledWaveDatum {
    pub datum: WaveDatum,
    pub spacing: f64,
    pub points: usize,
}

impl WaveDatum {
    pub fn new(sup_pos: f64, sup_abs: f64, p: usize) -> Result<Self, WaveError> {
        if p < 2 {
            return Err(WaveError::Invalid(format!("p must be at least 2 (got {p})")));
        }
        if !(0.0..=sup_abs).contains(&sup_pos) || !sup_abs.is_finite() {
            return Err(WaveError::Invalid(format!("need 0 <= sup_pos <= sup_abs (got {sup_pos}, {sup_abs})")));
        }
        Ok(Self { sup_pos, sup_abs, p })
    }

    /// Samples of a function vanishing at infinity; `sup f0` is at least `0`.
    pub fn from_samples(values: &[f64], spacing: f64, p: usize) -> Result<SampledWaveDatum, WaveError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(WaveError::Invalid("need finite samples".into()));
        }
        let sup_pos = values.iter().cloned().fold(0.0, f64::max);
        let sup_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        Ok(SampledWaveDatum { datum: Self::new(sup_pos, sup_abs, p)?, spacing, points: values.len() })
    }

    pub fn case(&self) -> WaveCase {
        if self.p % 2 == 1 || self.sup_pos == self.sup_abs {
            WaveCase::Sharp
        } else if self.sup_pos > 0.0 {
            WaveCase::Longer
        } else {
            WaveCase::Global
        }
    }
}

fn blowup_time(level: f64, p: usize) -> ExtReal {
    if level == 0.0 {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(1.0 / ((p as f64 - 1.0) * level.powi(p as i32 - 1)))
    }
}

/// `t_N = 1/((p−1) ‖f0‖^{p−1})`.
pub fn wave_tn(datum: &WaveDatum) -> ExtReal {
    blowup_time(datum.sup_abs, datum.p)
}

/// Exact maximal existence time.
pub fn wave_theta(datum: &WaveDatum) -> ExtReal {
    match datum.case() {
        WaveCase::Sharp => wave_tn(datum),
        WaveCase::Longer => blowup_time(datum.sup_pos, datum.p),
        WaveCase::Global => ExtReal::PosInf,
    }
}

/// `R(t) = ‖f0‖ / [1 − (p−1) ‖f0‖^{p−1} t]^{1/(p−1)}` for `t < t_N`.
pub fn wave_growth_bound(datum: &WaveDatum, t: f64) -> Result<f64, WaveError> {
    if !wave_tn(datum).exceeds(t) || t < 0.0 {
        return Err(ControlError::OutOfDomain { t, tn: wave_tn(datum) }.into());
    }
    let q = datum.p as f64 - 1.0;
    Ok(datum.sup_abs / (1.0 - q * datum.sup_abs.powi(datum.p as i32 - 1) * t).powf(1.0 / q))
}

/// The same bound through the general closed form with `U = 1`, `B = 0`, `P = 1`.
pub fn wave_growth_bound_general(datum: &WaveDatum, t: f64) -> Result<f64, WaveError> {
    debug_assert_eq!(tn_closed(1.0, 0.0, 1.0, datum.p, datum.sup_abs), wave_tn(datum));
    Ok(r_closed(1.0, 0.0, 1.0, datum.p, datum.sup_abs, t)?)
}

/// Exact solution at a point where the shifted datum is `f0(x + t) = value`.
pub fn wave_exact(value: f64, t: f64, p: usize) -> f64 {
    let q = p as f64 - 1.0;
    value / (1.0 - q * value.powi(p as i32 - 1) * t).powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(pos: f64, abs: f64, p: usize) -> WaveDatum {
        WaveDatum::new(pos, abs, p).unwrap()
    }

    #[test]
    fn tn_values() {
        assert_eq!(wave_tn(&d(0.0, 0.0, 2)), ExtReal::PosInf);
        assert_eq!(wave_tn(&d(1.0, 1.0, 2)), ExtReal::Finite(1.0));
        assert_eq!(wave_tn(&d(0.0, 2.0, 3)), ExtReal::Finite(0.125));
    }

    #[test]
    fn case_table() {
        for pos in [0.0, 0.3, 1.0] {
            let x = d(pos, 1.0, 3);
            assert_eq!(x.case(), WaveCase::Sharp);
            assert_eq!(wave_theta(&x), ExtReal::Finite(0.5));
        }
        let ii = d(0.5, 1.0, 2);
        assert_eq!(ii.case(), WaveCase::Longer);
        assert_eq!(wave_theta(&ii), ExtReal::Finite(2.0));
        let iii = d(0.0, 1.0, 2);
        assert_eq!(iii.case(), WaveCase::Global);
        assert_eq!(wave_theta(&iii), ExtReal::PosInf);
        assert_eq!(d(1.0, 1.0, 4).case(), WaveCase::Sharp);
    }

    #[test]
    fn theta_never_below_tn() {
        for p in 2..=6 {
            for &abs in &[0.0, 0.2, 1.0, 3.0] {
                for k in 0..=10 {
                    let x = d(abs * k as f64 / 10.0, abs, p);
                    let (theta, tn) = (wave_theta(&x), wave_tn(&x));
                    match (theta, tn) {
                        (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                            assert!(a >= b);
                            assert_eq!(a == b, x.case() == WaveCase::Sharp);
                        }
                        (ExtReal::PosInf, ExtReal::Finite(_)) => assert_eq!(x.case(), WaveCase::Global),
                        (ExtReal::PosInf, ExtReal::PosInf) => assert_eq!(abs, 0.0),
                        _ => panic!("theta below t_N"),
                    }
                }
            }
        }
    }

    #[test]
    fn growth_bound_values() {
        let x = d(1.0, 1.0, 2);
        assert_eq!(wave_growth_bound(&x, 0.0).unwrap(), 1.0);
        assert!((wave_growth_bound(&x, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(wave_growth_bound(&x, 1.0).is_err());
        for p in 2..=5 {
            let y = d(0.4, 1.7, p);
            let tn = wave_tn(&y).finite().unwrap();
            for i in 0..20 {
                let t = 0.95 * tn * i as f64 / 20.0;
                let (a, b) = (wave_growth_bound(&y, t).unwrap(), wave_growth_bound_general(&y, t).unwrap());
                assert!((a - b).abs() <= 1e-14 * a, "p={p} t={t}");
            }
        }
    }

    #[test]
    fn exact_solution_stays_below_the_bound() {
        // signed bump 1.5 e^{−x²} − e^{−(x−2)²} on a fine grid
        let h = 1e-3;
        let xs: Vec<f64> = (-8000..=10000).map(|i| i as f64 * h).collect();
        let f0 = |x: f64| 1.5 * (-x * x).exp() - (-(x - 2.0) * (x - 2.0)).exp();
        let samples: Vec<f64> = xs.iter().map(|&x| f0(x)).collect();
        for p in [2, 3] {
            let s = WaveDatum::from_samples(&samples, h, p).unwrap();
            assert_eq!(s.points, xs.len());
            let tn = wave_tn(&s.datum).finite().unwrap();
            for i in 0..64 {
                let t = tn * i as f64 / 64.0;
                let sup = samples.iter().map(|&v| wave_exact(v, t, p).abs()).fold(0.0, f64::max);
                assert!(sup <= wave_growth_bound(&s.datum, t).unwrap() * (1.0 + 1e-14), "p={p} t={t}");
            }
        }
    }

    #[test]
    fn exact_solution_solves_the_ode_along_characteristics() {
        let (v, t, h) = (0.7, 0.4, 1e-5);
        let d = (wave_exact(v, t + h, 3) - wave_exact(v, t - h, 3)) / (2.0 * h);
        assert!((d - wave_exact(v, t, 3).powi(3)).abs() < 1e-8);
    }

    #[test]
    fn invalid_data() {
        assert!(WaveDatum::new(2.0, 1.0, 2).is_err());
        assert!(WaveDatum::new(0.5, 1.0, 1).is_err());
        assert!(WaveDatum::from_samples(&[], 0.1, 2).is_err());
    }
}
