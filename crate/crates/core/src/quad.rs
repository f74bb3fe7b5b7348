//! Quadrature primitives shared by the assembly and verification code.
//!
//! * fixed Gauss–Legendre rules (nodes by Newton iteration on `P_n`);
//! * a globally adaptive Gauss–Kronrod (7, 15) integrator;
//! * composite Simpson convolution with an exponential kernel on a uniform grid.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("adaptive quadrature did not reach tolerance {requested:e} (achieved {achieved:e}, value {value})")]
    NotConverged { requested: f64, achieved: f64, value: f64 },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let xs = self.nodes.iter().map(|&x| mid + half * x).collect();
        let ws = self.weights.iter().map(|&w| half * w).collect();
        (xs, ws)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>() * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre node count for products of sines/cosines on `(0, π)` whose
/// combined frequency is at most `degree`. The truncation error of the rule
/// falls below `1e-16` relative once the node count exceeds the frequency by a
/// fixed margin.
pub fn trig_rule_size(degree: usize) -> usize {
    degree + 32
}

// Kronrod 15-point extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite(c - x));
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite(c + x));
        }
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((kron * h, ((kron - gauss) * h).abs()))
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod (7, 15) quadrature of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate is below `max(abs_tol, rel_tol·|I|)` or `max_intervals` is hit.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral, QuadError> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, intervals: 0 });
    }
    let (v, e) = gk15(&f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            return Ok(Integral { value, error, intervals: parts.len() });
        }
        if parts.len() >= max_intervals {
            return Err(QuadError::NotConverged { requested: target, achieved: error, value });
        }
        let (idx, _) = parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty partition");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval cannot be split further in floating point.
            return Err(QuadError::NotConverged { requested: target, achieved: error, value });
        }
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Composite Simpson weight of grid point `j` in `∫_{t_0}^{t_i}` on a uniform grid
/// (Simpson 1/3 on an even prefix, Simpson 3/8 on the last three panels when
/// `i` is odd, trapezoid when `i = 1`). Weights are in units of the step.
pub fn simpson_weight(i: usize, j: usize) -> f64 {
    debug_assert!(j <= i);
    match i {
        0 => 0.0,
        1 => 0.5,
        _ if i.is_multiple_of(2) => {
            if j == 0 || j == i {
                1.0 / 3.0
            } else if j % 2 == 1 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            }
        }
        _ => {
            let split = i - 3;
            let mut w = 0.0;
            if j <= split && split > 0 {
                w += if j == 0 || j == split {
                    1.0 / 3.0
                } else if j % 2 == 1 {
                    4.0 / 3.0
                } else {
                    2.0 / 3.0
                };
            }
            if j >= split {
                let local = j - split;
                w += match local {
                    0 | 3 => 3.0 / 8.0,
                    _ => 9.0 / 8.0,
                };
            }
            w
        }
    }
}

/// `c_i = ∫_{t_0}^{t_i} e^{rate (t_i - s)} g(s) ds` for every grid point of a
/// uniform grid with spacing `h`, by composite Simpson. O(n²).
pub fn convolve_exp(rate: f64, h: f64, g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let decay: Vec<f64> = (0..n).map(|m| (rate * h * m as f64).exp()).collect();
    let mut out = vec![0.0; n];
    for i in 1..n {
        let mut acc = 0.0;
        for j in 0..=i {
            acc += simpson_weight(i, j) * decay[i - j] * g[j];
        }
        out[i] = acc * h;
    }
    out
}
