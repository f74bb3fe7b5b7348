//! Multiplication constants of `H¹₀(0, π)` with the norm `‖f‖² = ∫ f² + f'²`.
//!
//! * a lower bound on the sharp constant `L` in `‖f²‖ ≤ L ‖f‖²` from the
//!   family `f_λ(x) = e^{−λ|x−π/2|} − e^{−λπ/2}`;
//! * the Fourier-side convolution constant `C(k) = 1/(4 + k²)`;
//! * randomized checks of `‖fg‖ ≤ ‖f‖ ‖g‖` on sine polynomials.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::galerkin::{sine_mode, sine_mode_dx};
use crate::quad::{self, trig_rule_size, GaussLegendre, QuadError};

const HALF: f64 = PI / 2.0;
/// Gauss–Legendre nodes per half interval.
const HALF_NODES: usize = 80;
pub const GOLDEN_TOL: f64 = 1e-4;
/// Largest sine frequency in the random polynomials.
pub const ALGEBRA_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaFamily {
    pub lambda: f64,
}

impl LambdaFamily {
    pub fn new(lambda: f64) -> Self {
        assert!(lambda > 0.0, "lambda must be positive");
        Self { lambda }
    }

    /// `f_λ(x) = e^{−λπ/2} expm1(λ d)` with `d = π/2 − |x − π/2|`.
    pub fn eval(&self, x: f64) -> f64 {
        let d = HALF - (x - HALF).abs();
        (-self.lambda * HALF).exp() * (self.lambda * d).exp_m1()
    }

    pub fn eval_dx(&self, x: f64) -> f64 {
        let s = if x < HALF { 1.0 } else { -1.0 };
        s * self.lambda * (-self.lambda * (x - HALF).abs()).exp()
    }

    /// `f_λ / (λ e^{−λπ/2})` and its derivative on the left half, as a
    /// function of `d`. Scale-free and finite as `λ → 0`.
    fn normalized(&self, d: f64) -> (f64, f64) {
        let l = self.lambda;
        ((l * d).exp_m1() / l, (l * d).exp())
    }

    /// `(‖f‖², ‖f²‖²)` of the normalized function over `[0, π]`.
    fn normalized_norms(&self) -> (f64, f64) {
        let (d, w) = GaussLegendre::new(HALF_NODES).on_interval(0.0, HALF);
        let (mut n2, mut n4) = (0.0, 0.0);
        for (&d, &w) in d.iter().zip(&w) {
            let (g, dg) = self.normalized(d);
            n2 += w * (g * g + dg * dg);
            n4 += w * (g.powi(4) + (2.0 * g * dg).powi(2));
        }
        // the two halves are mirror images
        (2.0 * n2, 2.0 * n4)
    }

    /// `(∫ f², ∫ f'²)` by quadrature split at the kink.
    pub fn norm_parts_by_quadrature(&self) -> (f64, f64) {
        let rule = GaussLegendre::new(HALF_NODES);
        let l2 =
            rule.integrate(0.0, HALF, |x| self.eval(x).powi(2)) + rule.integrate(HALF, PI, |x| self.eval(x).powi(2));
        let h1 = rule.integrate(0.0, HALF, |x| self.eval_dx(x).powi(2))
            + rule.integrate(HALF, PI, |x| self.eval_dx(x).powi(2));
        (l2, h1)
    }

    /// `(∫ f², ∫ f'²)` in closed form.
    pub fn norm_parts_closed(&self) -> (f64, f64) {
        let l = self.lambda;
        let c = (-l * HALF).exp();
        let e2 = -(-2.0 * l * HALF).exp_m1();
        let e1 = -(-l * HALF).exp_m1();
        let l2 = e2 / (2.0 * l) - 2.0 * c * e1 / l + c * c * HALF;
        let h1 = l * e2 / 2.0;
        (2.0 * l2, 2.0 * h1)
    }
}

/// `‖f_λ²‖ / ‖f_λ‖²`.
pub fn ratio_lower_bound(lambda: f64) -> f64 {
    let (n2, n4) = LambdaFamily::new(lambda).normalized_norms();
    n4.sqrt() / n2
}

/// `lim_{λ→0} ‖f_λ²‖/‖f_λ‖²`: the same ratio for the tent `π/2 − |x − π/2|`.
pub fn ratio_small_lambda_limit() -> f64 {
    let h = HALF;
    (2.0 * (h.powi(5) / 5.0 + 4.0 * h.powi(3) / 3.0)).sqrt() / (2.0 * (h.powi(3) / 3.0 + h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioMaximum {
    pub lambda: f64,
    pub ratio: f64,
}

/// Golden-section maximization of `ratio_lower_bound` on `[lo, hi]`.
pub fn maximize_ratio(lo: f64, hi: f64, tol: f64) -> RatioMaximum {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (ratio_lower_bound(c), ratio_lower_bound(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = ratio_lower_bound(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = ratio_lower_bound(d);
        }
    }
    let lambda = 0.5 * (a + b);
    RatioMaximum { lambda, ratio: ratio_lower_bound(lambda) }
}

/// `C(k) = (1/2π) ∫ dh / ((1 + (k − h)²)(1 + h²))`, compactified by
/// `h = tan θ` to `(1/2π) ∫_{−π/2}^{π/2} dθ / (1 + (k − tan θ)²)`.
pub fn convolution_constant(k: f64) -> Result<f64, QuadError> {
    let f = |theta: f64| 1.0 / (1.0 + (k - theta.tan()).powi(2));
    let r = quad::adaptive(f, -HALF, HALF, 1e-13, 1e-13, 10_000)?;
    Ok(r.value / (2.0 * PI))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub seed: u64,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed `‖fg‖ / (‖f‖ ‖g‖)`.
    pub max_ratio: f64,
}

/// Sine-polynomial values and derivatives at fixed nodes.
pub struct SineQuadrature {
    weights: Vec<f64>,
    sin: Vec<Vec<f64>>,
    dsin: Vec<Vec<f64>>,
}

impl SineQuadrature {
    pub fn new(max_mode: usize) -> Self {
        let (x, weights) = GaussLegendre::new(trig_rule_size(4 * max_mode + 2)).on_interval(0.0, PI);
        let sin = (0..=max_mode).map(|k| x.iter().map(|&x| sine_mode(k, x)).collect()).collect();
        let dsin = (0..=max_mode).map(|k| x.iter().map(|&x| sine_mode_dx(k, x)).collect()).collect();
        Self { weights, sin, dsin }
    }

    /// `Σ c_k s_{k+1}` and its derivative at the nodes.
    pub fn eval(&self, coeffs: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.weights.len();
        let (mut v, mut d) = (vec![0.0; n], vec![0.0; n]);
        for (k, c) in coeffs.iter().enumerate() {
            for i in 0..n {
                v[i] += c * self.sin[k + 1][i];
                d[i] += c * self.dsin[k + 1][i];
            }
        }
        (v, d)
    }

    pub fn norm(&self, f: &(Vec<f64>, Vec<f64>)) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| w * (f.0[i] * f.0[i] + f.1[i] * f.1[i])).sum::<f64>().sqrt()
    }

    pub fn product(&self, f: &(Vec<f64>, Vec<f64>), g: &(Vec<f64>, Vec<f64>)) -> (Vec<f64>, Vec<f64>) {
        let v = f.0.iter().zip(&g.0).map(|(a, b)| a * b).collect();
        let d = (0..f.0.len()).map(|i| f.1[i] * g.0[i] + f.0[i] * g.1[i]).collect();
        (v, d)
    }
}

/// Checks `‖fg‖ ≤ ‖f‖ ‖g‖ (1 + 1e−12)` on random sine polynomials of degree
/// at most eight with coefficients in `[−1, 1]`.
pub fn algebra_property_test(seed: u64, trials: usize) -> AlgebraReport {
    let quad = SineQuadrature::new(ALGEBRA_DEGREE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let degree = rng.gen_range(1..=ALGEBRA_DEGREE);
        (0..degree).map(|_| rng.gen_range(-1.0..=1.0)).collect::<Vec<f64>>()
    };
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let f = quad.eval(&draw(&mut rng));
        let g = quad.eval(&draw(&mut rng));
        let (nf, ng) = (quad.norm(&f), quad.norm(&g));
        let nfg = quad.norm(&quad.product(&f, &g));
        if nfg > nf * ng * (1.0 + 1e-12) {
            violations += 1;
        }
        if nf * ng > 0.0 {
            max_ratio = max_ratio.max(nfg / (nf * ng));
        }
    }
    AlgebraReport { seed, trials, violations, max_ratio }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_vanishes_at_the_boundary() {
        for &l in &[0.1, 1.55, 9.0] {
            let f = LambdaFamily::new(l);
            assert!(f.eval(0.0).abs() < 1e-15 && f.eval(PI).abs() < 1e-15);
            let direct = (-l * (1.0 - HALF).abs()).exp() - (-l * HALF).exp();
            assert!((f.eval(1.0) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for &l in &[0.05, 0.5, 1.55, 4.0, 10.0] {
            let f = LambdaFamily::new(l);
            let (a, b) = f.norm_parts_by_quadrature();
            let (c, d) = f.norm_parts_closed();
            assert!((a - c).abs() < 1e-10 && (b - d).abs() < 1e-10, "λ={l}");
        }
    }

    #[test]
    fn ratio_matches_unnormalized_evaluation() {
        let f = LambdaFamily::new(2.0);
        let rule = GaussLegendre::new(HALF_NODES);
        let half = |g: &dyn Fn(f64) -> f64| rule.integrate(0.0, HALF, g) + rule.integrate(HALF, PI, g);
        let n2 = half(&|x| f.eval(x).powi(2) + f.eval_dx(x).powi(2));
        let n4 = half(&|x| f.eval(x).powi(4) + (2.0 * f.eval(x) * f.eval_dx(x)).powi(2));
        assert!((n4.sqrt() / n2 - ratio_lower_bound(2.0)).abs() < 1e-13);
    }

    #[test]
    fn small_lambda_limit() {
        let lim = ratio_small_lambda_limit();
        assert!((ratio_lower_bound(1e-7) - lim).abs() < 1e-6);
        assert!((ratio_lower_bound(1e-12) - lim).abs() < 1e-10);
    }

    #[test]
    fn ratio_never_exceeds_one() {
        for i in 1..=200 {
            assert!(ratio_lower_bound(0.05 * i as f64) <= 1.0);
        }
    }

    #[test]
    fn maximum_near_one_point_five_five() {
        let m = maximize_ratio(0.1, 10.0, GOLDEN_TOL);
        assert!(m.ratio > 0.811 && m.ratio <= 1.0, "{m:?}");
        assert!((m.lambda - 1.55).abs() <= 0.05, "{m:?}");
    }

    #[test]
    fn convolution_constant_closed_form() {
        for &k in &[0.0, 1.0, 3.0, 10.0, 25.0] {
            let c = convolution_constant(k).unwrap();
            assert!((c - 1.0 / (4.0 + k * k)).abs() < 1e-10, "k={k}");
        }
        let scaled: Vec<f64> = (0..40).map(|k| (1.0 + (k * k) as f64) / (4.0 + (k * k) as f64)).collect();
        assert!(scaled.windows(2).all(|w| w[1] > w[0]) && scaled.iter().all(|&v| v < 1.0));
    }

    #[test]
    fn algebra_examples() {
        let q = SineQuadrature::new(ALGEBRA_DEGREE);
        let s1 = q.eval(&[1.0]);
        assert!((q.norm(&s1).powi(2) - 2.0).abs() < 1e-13);
        assert!(q.norm(&q.product(&s1, &s1)) <= 2.0);
        let zero = q.eval(&[]);
        assert_eq!(q.norm(&q.product(&zero, &s1)), 0.0);
    }

    #[test]
    fn seeded_algebra_trials() {
        let rep = algebra_property_test(42, 2000);
        assert_eq!(rep.violations, 0);
        assert!(rep.max_ratio < 1.0);
        assert_eq!(rep, algebra_property_test(42, 2000));
    }
}
