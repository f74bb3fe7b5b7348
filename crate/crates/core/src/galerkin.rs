//! Classical Galerkin reduction on a span of sine modes in `H¹₀(0, π)`.
//!
//! The basis is `s_k(x) = √(2/π) sin(kx)`, with `‖s_k‖² = 1 + k²` in the
//! `H¹₀` inner product `⟨f|g⟩ = ∫ f g + f' g'` and `s_k'' = −k² s_k`. The
//! nonlinearity is `𝒫(f) = f^p`.
//!
//! All pairings are assembled by Gauss–Legendre quadrature on `(0, π)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::control::PolynomialGrowth;
use crate::quad::{trig_rule_size, GaussLegendre};

fn norm_const() -> f64 {
    (2.0 / PI).sqrt()
}

/// `s_k(x)`.
pub fn sine_mode(k: usize, x: f64) -> f64 {
    norm_const() * (k as f64 * x).sin()
}

/// `s_k'(x)`.
pub fn sine_mode_dx(k: usize, x: f64) -> f64 {
    norm_const() * k as f64 * (k as f64 * x).cos()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinBasis {
    indices: Vec<usize>,
    metric_diag: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl GalerkinBasis {
    /// Panics unless `indices` is non-empty, strictly increasing and ≥ 1.
    pub fn new(indices: &[usize]) -> Self {
        assert!(!indices.is_empty(), "empty index set");
        assert!(indices[0] >= 1, "sine indices start at 1");
        assert!(indices.windows(2).all(|w| w[0] < w[1]), "indices must be strictly increasing");
        let metric_diag = indices.iter().map(|&k| 1.0 + (k * k) as f64).collect();
        let eigenvalues = indices.iter().map(|&k| -((k * k) as f64)).collect();
        Self { indices: indices.to_vec(), metric_diag, eigenvalues }
    }

    /// `{1, …, n}`.
    pub fn first(n: usize) -> Self {
        Self::new(&(1..=n).collect::<Vec<_>>())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn metric_diag(&self) -> &[f64] {
        &self.metric_diag
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, k: usize) -> Option<usize> {
        self.indices.binary_search(&k).ok()
    }

    pub fn max_index(&self) -> usize {
        *self.indices.last().expect("non-empty basis")
    }

    /// `a_k a^k = Σ (1 + k²)(a^k)²`, the squared norm of `a^k s_k`.
    pub fn norm_sq(&self, a: &[f64]) -> f64 {
        a.iter().zip(&self.metric_diag).map(|(x, g)| g * x * x).sum()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.norm_sq(a).sqrt()
    }
}

/// A non-decreasing multi-index over basis positions together with the
/// number of distinct orderings it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiIndex {
    pub positions: Vec<usize>,
    pub multiplicity: f64,
}

impl MultiIndex {
    pub fn monomial(&self, a: &[f64]) -> f64 {
        self.positions.iter().map(|&i| a[i]).product()
    }

    /// Exponent vector over `n` basis positions.
    pub fn exponents(&self, n: usize) -> Vec<usize> {
        let mut e = vec![0; n];
        for &i in &self.positions {
            e[i] += 1;
        }
        e
    }
}

/// All sorted multi-indices of length `p` over `n` positions.
pub fn sorted_multi_indices(n: usize, p: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if cur.len() == p {
            out.push(MultiIndex { positions: cur.clone(), multiplicity: multinomial(cur) });
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, p, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, 0, &mut Vec::with_capacity(p), &mut out);
    out
}

fn multinomial(sorted: &[usize]) -> f64 {
    let fact = |m: usize| (1..=m).fold(1.0, |a, i| a * i as f64);
    let mut denom = 1.0;
    let mut run = 1;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            denom *= fact(run);
            run = 1;
        }
    }
    denom *= fact(run);
    fact(sorted.len()) / denom
}

/// Nodes, weights and mode tables for trig-polynomial quadrature on `(0, π)`.
struct ModeTable {
    weights: Vec<f64>,
    sin: Vec<Vec<f64>>,
    dsin: Vec<Vec<f64>>,
}

impl ModeTable {
    fn new(max_mode: usize, degree: usize) -> Self {
        let (x, weights) = GaussLegendre::new(trig_rule_size(degree)).on_interval(0.0, PI);
        let sin = (0..=max_mode).map(|k| x.iter().map(|&x| sine_mode(k, x)).collect()).collect();
        let dsin = (0..=max_mode).map(|k| x.iter().map(|&x| sine_mode_dx(k, x)).collect()).collect();
        Self { weights, sin, dsin }
    }

    /// `Π s_{l}` and its derivative at the nodes.
    fn product(&self, modes: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let n = self.weights.len();
        let mut val = vec![1.0; n];
        let mut der = vec![0.0; n];
        for &l in modes {
            for i in 0..n {
                der[i] = der[i] * self.sin[l][i] + val[i] * self.dsin[l][i];
                val[i] *= self.sin[l][i];
            }
        }
        (val, der)
    }

    fn l2(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights.iter().zip(f.iter().zip(g)).map(|(w, (a, b))| w * a * b).sum()
    }

    fn h1(&self, f: &(Vec<f64>, Vec<f64>), g: &(Vec<f64>, Vec<f64>)) -> f64 {
        self.l2(&f.0, &g.0) + self.l2(&f.1, &g.1)
    }
}

/// `⟨s^k | s_{l1}⋯s_{lp}⟩`: the `H¹₀` pairing with the index raised by `1/(1+k²)`.
pub fn sine_product_pairing(k: usize, ls: &[usize]) -> f64 {
    assert!(k >= 1 && ls.iter().all(|&l| l >= 1), "sine indices start at 1");
    let max = ls.iter().copied().chain([k]).max().unwrap_or(1);
    let table = ModeTable::new(max, k + ls.iter().sum::<usize>());
    let sk = (table.sin[k].clone(), table.dsin[k].clone());
    let prod = table.product(ls);
    table.h1(&sk, &prod) / (1.0 + (k * k) as f64)
}

/// `T^k_L = ⟨s^k | s_L⟩` for every basis index `k` and sorted multi-index `L`.
#[derive(Debug, Clone)]
pub struct NonlinearTensor {
    pub p: usize,
    pub multi: Vec<MultiIndex>,
    /// `entries[k][j] = T^{k}_{multi[j]}` with `k` a basis position; one ordering only.
    pub entries: Vec<Vec<f64>>,
}

impl NonlinearTensor {
    /// `Σ_L T^k_L a^L` summed over all orderings of `L`.
    pub fn contract(&self, k: usize, a: &[f64]) -> f64 {
        self.multi.iter().zip(&self.entries[k]).map(|(m, t)| m.multiplicity * t * m.monomial(a)).sum()
    }

    /// Coefficient of the monomial with the given exponent vector in `Σ_L T^k_L a^L`.
    pub fn monomial_coeff(&self, k: usize, exponents: &[usize]) -> f64 {
        self.multi
            .iter()
            .zip(&self.entries[k])
            .filter(|(m, _)| m.exponents(exponents.len()) == exponents)
            .map(|(m, t)| m.multiplicity * t)
            .sum()
    }
}

/// `ε̂(a)²` as a form in the coordinates:
/// `Σ main[J][L] a^J a^L + Σ cross[k][L] a^k a^L + Σ quadratic[k][l] a^k a^l`,
/// with multiplicities folded into the coefficients.
#[derive(Debug, Clone)]
pub struct EpsilonForm {
    pub p: usize,
    pub multi: Vec<MultiIndex>,
    pub main: Vec<Vec<f64>>,
    pub cross: Vec<Vec<f64>>,
    pub quadratic: Vec<Vec<f64>>,
}

impl EpsilonForm {
    pub fn eval(&self, a: &[f64]) -> f64 {
        let mono: Vec<f64> = self.multi.iter().map(|m| m.monomial(a)).collect();
        let mut s = 0.0;
        for (i, row) in self.main.iter().enumerate() {
            s += mono[i] * row.iter().zip(&mono).map(|(c, m)| c * m).sum::<f64>();
        }
        for (k, row) in self.cross.iter().enumerate() {
            s += a[k] * row.iter().zip(&mono).map(|(c, m)| c * m).sum::<f64>();
        }
        for (k, row) in self.quadratic.iter().enumerate() {
            s += a[k] * row.iter().zip(a).map(|(c, x)| c * x).sum::<f64>();
        }
        s
    }

    /// Main-block coefficients collected by monomial exponent vector.
    pub fn monomials(&self, n: usize) -> BTreeMap<Vec<usize>, f64> {
        let mut out = BTreeMap::new();
        for (i, mi) in self.multi.iter().enumerate() {
            for (j, mj) in self.multi.iter().enumerate() {
                let e: Vec<usize> = mi.exponents(n).iter().zip(mj.exponents(n)).map(|(x, y)| x + y).collect();
                *out.entry(e).or_insert(0.0) += self.main[i][j];
            }
        }
        out
    }

    /// Largest absolute coefficient in the degree-2 and degree-(p+1) blocks.
    pub fn linear_blocks_max(&self) -> f64 {
        self.cross.iter().chain(&self.quadratic).flatten().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone)]
pub struct GalerkinModel {
    pub basis: GalerkinBasis,
    pub tensor: NonlinearTensor,
    pub eps_form: EpsilonForm,
}

impl GalerkinModel {
    pub fn new(indices: &[usize], p: usize) -> Self {
        assert!(p >= 2, "nonlinearity degree must be at least 2");
        let basis = GalerkinBasis::new(indices);
        let n = basis.len();
        let kmax = basis.max_index();
        let table = ModeTable::new(kmax, 2 * p * kmax + 2);
        let multi = sorted_multi_indices(n, p);
        let modes: Vec<(Vec<f64>, Vec<f64>)> =
            basis.indices.iter().map(|&k| (table.sin[k].clone(), table.dsin[k].clone())).collect();

        // Removes the H¹₀-orthogonal projection onto the span; also returns the
        // raised coordinates of the projection.
        let residual = |f: (Vec<f64>, Vec<f64>)| -> ((Vec<f64>, Vec<f64>), Vec<f64>) {
            let coords: Vec<f64> = modes.iter().zip(&basis.metric_diag).map(|(s, g)| table.h1(s, &f) / g).collect();
            let (mut v, mut d) = f;
            for (c, s) in coords.iter().zip(&modes) {
                for i in 0..v.len() {
                    v[i] -= c * s.0[i];
                    d[i] -= c * s.1[i];
                }
            }
            ((v, d), coords)
        };

        let mut entries = vec![vec![0.0; multi.len()]; n];
        let mut r_multi = Vec::with_capacity(multi.len());
        for (j, m) in multi.iter().enumerate() {
            let ls: Vec<usize> = m.positions.iter().map(|&i| basis.indices[i]).collect();
            let (r, coords) = residual(table.product(&ls));
            for k in 0..n {
                entries[k][j] = coords[k];
            }
            r_multi.push(r);
        }
        // 𝒜 s_k = s_k'' = −k² s_k, differentiated once more for the H¹ part.
        let r_lin: Vec<(Vec<f64>, Vec<f64>)> = basis
            .indices
            .iter()
            .map(|&k| {
                let k2 = (k * k) as f64;
                let v = table.sin[k].iter().map(|s| -k2 * s).collect();
                let d = table.dsin[k].iter().map(|s| -k2 * s).collect();
                residual((v, d)).0
            })
            .collect();

        let main = multi
            .iter()
            .zip(&r_multi)
            .map(|(mi, ri)| {
                multi
                    .iter()
                    .zip(&r_multi)
                    .map(|(mj, rj)| mi.multiplicity * mj.multiplicity * table.h1(ri, rj))
                    .collect()
            })
            .collect();
        let cross = r_lin
            .iter()
            .map(|rk| multi.iter().zip(&r_multi).map(|(m, rl)| 2.0 * m.multiplicity * table.h1(rk, rl)).collect())
            .collect();
        let quadratic = r_lin.iter().map(|rk| r_lin.iter().map(|rl| table.h1(rk, rl)).collect()).collect();

        let tensor = NonlinearTensor { p, multi: multi.clone(), entries };
        let eps_form = EpsilonForm { p, multi, main, cross, quadratic };
        Self { basis, tensor, eps_form }
    }

    pub fn p(&self) -> usize {
        self.tensor.p
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// `X^k(a) = −k² a^k + Σ_L T^k_L a^L`.
pub fn vector_field(model: &GalerkinModel, a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; model.dim()];
    vector_field_into(model, a, &mut out);
    out
}

pub fn vector_field_into(model: &GalerkinModel, a: &[f64], out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = model.basis.eigenvalues[k] * a[k] + model.tensor.contract(k, a);
    }
}

/// Differential error of the Galerkin trajectory through `a`.
pub fn epsilon_hat(model: &GalerkinModel, a: &[f64]) -> f64 {
    model.eps_form.eval(a).max(0.0).sqrt()
}

/// `ℓ̂(r; a) = Σ_j binom(p, j) (a_k a^k)^{(p−j)/2} r^j`, coefficients `c_1..c_p`.
pub fn growth_coeffs(model: &GalerkinModel, a: &[f64]) -> Vec<f64> {
    growth_coeffs_from_norm(model.p(), model.basis.norm(a))
}

pub fn growth_coeffs_from_norm(p: usize, norm: f64) -> Vec<f64> {
    (1..=p).map(|j| binomial(p, j) * norm.powi((p - j) as i32)).collect()
}

/// The growth estimator at fixed coordinates.
pub fn growth_estimator(model: &GalerkinModel, a: &[f64]) -> PolynomialGrowth {
    PolynomialGrowth::constant(growth_coeffs(model, a))
}

/// Galerkin coordinates of `f0 = Σ c_k s_k` and the datum error `‖f0 − a^k s_k‖`.
pub fn initial_coords(basis: &GalerkinBasis, f0_coeffs: &BTreeMap<usize, f64>) -> (Vec<f64>, f64) {
    let mut a = vec![0.0; basis.len()];
    let mut err2 = 0.0;
    for (&k, &c) in f0_coeffs {
        match basis.position(k) {
            Some(i) => a[i] = c,
            None => err2 += (1.0 + (k * k) as f64) * c * c,
        }
    }
    (a, err2.sqrt())
}

/// `‖𝒜𝒢(a) + 𝒫(𝒢(a)) − v^k s_k‖` evaluated directly by quadrature.
pub fn residual_norm(model: &GalerkinModel, a: &[f64], v: &[f64]) -> f64 {
    let kmax = model.basis.max_index();
    let p = model.p();
    let table = ModeTable::new(kmax, 2 * p * kmax + 2);
    let n = table.weights.len();
    let (mut g, mut dg) = (vec![0.0; n], vec![0.0; n]);
    for (pos, &k) in model.basis.indices.iter().enumerate() {
        for i in 0..n {
            g[i] += a[pos] * table.sin[k][i];
            dg[i] += a[pos] * table.dsin[k][i];
        }
    }
    let mut r = vec![0.0; n];
    let mut dr = vec![0.0; n];
    for i in 0..n {
        r[i] = g[i].powi(p as i32);
        dr[i] = p as f64 * g[i].powi(p as i32 - 1) * dg[i];
    }
    for (pos, &k) in model.basis.indices.iter().enumerate() {
        let c = model.basis.eigenvalues[pos] * a[pos] - v[pos];
        for i in 0..n {
            r[i] += c * table.sin[k][i];
            dr[i] += c * table.dsin[k][i];
        }
    }
    (table.l2(&r, &r) + table.l2(&dr, &dr)).max(0.0).sqrt()
}
