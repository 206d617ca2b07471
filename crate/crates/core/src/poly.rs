//! Dense complex polynomials over the graded monomial basis.
//!
//! A section of `O(d)` on `P^n` is stored as a homogeneous polynomial in
//! `Z_0..Z_n`; its Fubini–Study norm at `[Z]` is `|P(Z)| / ‖Z‖^d`.
//! Inhomogeneous polynomials (affine charts, mixed-degree value oracles) use
//! [`AffinePolynomial`], which is indexed by every multi-index of total degree
//! at most `d`.
//!
//! Monomials of a fixed degree are ordered lexicographically descending in
//! the exponent vector, so `(2,0) < (1,1) < (0,2)` in position. Affine
//! coefficient vectors list degree 0 first, then degree 1, and so on.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Highest degree any polynomial may reach.
pub const DEGREE_CAP: usize = 64;
/// Largest dense coefficient vector we allow.
pub const COEFF_CAP: usize = 1_000_000;
/// Default cap on torus sample points for [`HomogeneousPolynomial::polydisk_sup_lower`].
pub const DEFAULT_TORUS_BUDGET: u128 = 20_000_000;

/// `C(n, k)`, saturating at `usize::MAX`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex { exponents }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }

    pub fn num_vars(&self) -> usize {
        self.exponents.len()
    }

    /// Position of this index among all indices of the same degree and arity.
    pub fn rank(&self) -> usize {
        rank_fixed(&self.exponents, self.degree())
    }

    /// Position among all indices of degree at most the index's own grade,
    /// in the graded order used by [`AffinePolynomial`].
    pub fn graded_rank(&self) -> usize {
        let k = self.num_vars();
        let g = self.degree();
        let below = if g == 0 { 0 } else { binomial(g - 1 + k, k) };
        below + self.rank()
    }
}

fn rank_fixed(e: &[u32], d: usize) -> usize {
    let k = e.len();
    if k <= 1 {
        return 0;
    }
    let e0 = e[0] as usize;
    let ahead = if e0 < d { binomial(d - e0 - 1 + k - 1, k - 1) } else { 0 };
    ahead + rank_fixed(&e[1..], d - e0)
}

fn push_fixed(vars: usize, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if vars == 1 {
        prefix.push(d as u32);
        out.push(MultiIndex::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for a in (0..=d).rev() {
        prefix.push(a as u32);
        push_fixed(vars - 1, d - a, prefix, out);
        prefix.pop();
    }
}

/// All exponent vectors of length `n + 1` and total degree `d`, in graded-lex order.
pub fn enumerate_monomials(n: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(n + d, d));
    push_fixed(n + 1, d, &mut Vec::with_capacity(n + 1), &mut out);
    out
}

/// All exponent vectors in `vars` variables of total degree at most `d`,
/// degree 0 first.
pub fn enumerate_graded(vars: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(vars + d, d));
    for g in 0..=d {
        push_fixed(vars, g, &mut Vec::with_capacity(vars), &mut out);
    }
    out
}

fn check_caps(degree: usize, count: usize) -> Result<()> {
    if degree > DEGREE_CAP {
        return Err(Error::DegreeCap { degree, cap: DEGREE_CAP });
    }
    if count > COEFF_CAP {
        return Err(Error::CoefficientCap { count, cap: COEFF_CAP });
    }
    Ok(())
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: C64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub(crate) fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// `powers[v][e] = z_v^e` for `e <= d`.
fn power_table(z: &[C64], d: usize) -> Vec<Vec<C64>> {
    z.iter()
        .map(|&zv| {
            let mut row = Vec::with_capacity(d + 1);
            let mut acc = C64::new(1.0, 0.0);
            for _ in 0..=d {
                row.push(acc);
                acc *= zv;
            }
            row
        })
        .collect()
}

/// Values of every monomial in `basis` at `z`.
pub fn monomial_values(basis: &[MultiIndex], z: &[C64]) -> Vec<C64> {
    let dmax = basis.iter().map(|m| m.degree()).max().unwrap_or(0);
    let powers = power_table(z, dmax);
    basis
        .iter()
        .map(|m| {
            m.exponents()
                .iter()
                .enumerate()
                .fold(C64::new(1.0, 0.0), |acc, (v, &e)| acc * powers[v][e as usize])
        })
        .collect()
}

fn dot_compensated(coeffs: &[C64], values: &[C64]) -> C64 {
    let mut acc = CompensatedSum::default();
    for (c, v) in coeffs.iter().zip(values) {
        acc.add(c * v);
    }
    acc.value()
}

fn euclidean_norm(z: &[C64]) -> f64 {
    // scaled to avoid overflow for huge representatives
    let scale = z.iter().map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    scale * z.iter().map(|c| (c / scale).norm_sqr()).sum::<f64>().sqrt()
}

/// Something whose value at a point of `C^{n+1}` can be sampled, with a known
/// bound on its total degree.
pub trait ValueOracle {
    fn num_vars(&self) -> usize;
    fn total_degree(&self) -> usize;
    fn value(&self, z: &[C64]) -> Result<C64>;
}

/// A section of `O(d)` on `P^n`: homogeneous of degree `d` in `n + 1` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct HomogeneousPolynomial {
    n: usize,
    d: usize,
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    n: usize,
    d: usize,
    coeffs: Vec<C64>,
}

impl TryFrom<PolyRepr> for HomogeneousPolynomial {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        HomogeneousPolynomial::new(r.n, r.d, r.coeffs)
    }
}

impl From<HomogeneousPolynomial> for PolyRepr {
    fn from(p: HomogeneousPolynomial) -> Self {
        PolyRepr { n: p.n, d: p.d, coeffs: p.coeffs }
    }
}

impl HomogeneousPolynomial {
    pub fn new(n: usize, d: usize, coeffs: Vec<C64>) -> Result<Self> {
        let expected = binomial(n + d, d);
        check_caps(d, expected)?;
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: coeffs.len() });
        }
        Ok(HomogeneousPolynomial { n, d, coeffs })
    }

    pub fn zero(n: usize, d: usize) -> Result<Self> {
        let len = binomial(n + d, d);
        check_caps(d, len)?;
        Ok(HomogeneousPolynomial { n, d, coeffs: vec![C64::new(0.0, 0.0); len] })
    }

    /// Build from `(exponents, coefficient)` terms; repeated terms accumulate.
    pub fn from_terms(n: usize, d: usize, terms: &[(&[u32], C64)]) -> Result<Self> {
        let mut p = Self::zero(n, d)?;
        for (exps, c) in terms {
            let m = MultiIndex::new(exps.to_vec());
            if m.num_vars() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, got: m.num_vars() });
            }
            if m.degree() != d {
                return Err(Error::InvalidArgument(format!(
                    "term of degree {} in a degree-{d} polynomial",
                    m.degree()
                )));
            }
            p.coeffs[m.rank()] += c;
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn basis(&self) -> Vec<MultiIndex> {
        enumerate_monomials(self.n, self.d)
    }

    pub fn scaled(&self, s: C64) -> Self {
        HomogeneousPolynomial {
            n: self.n,
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn check_point(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: z.len() });
        }
        Ok(())
    }

    /// `P(Z)` with compensated summation over the monomial terms.
    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        self.check_point(z)?;
        let vals = monomial_values(&self.basis(), z);
        Ok(dot_compensated(&self.coeffs, &vals))
    }

    /// `|P(Z)| / ‖Z‖^d` for any nonzero representative `Z`.
    pub fn fs_section_norm(&self, z: &[C64]) -> Result<f64> {
        self.check_point(z)?;
        let norm = euclidean_norm(z);
        if norm == 0.0 {
            return Err(Error::ZeroRepresentative);
        }
        let unit: Vec<C64> = z.iter().map(|c| c / norm).collect();
        Ok(self.eval(&unit)?.norm())
    }

    /// `Σ |c_α|`.
    pub fn coeff_l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Maximum of `|P|` over the distinguished boundary torus of the unit
    /// polydisk, sampled at `samples_per_angle` equispaced phases per
    /// coordinate. The true polydisk sup lives on that torus, so this is a
    /// certified lower bound.
    pub fn polydisk_sup_lower(&self, samples_per_angle: usize) -> Result<f64> {
        self.polydisk_sup_lower_with_budget(samples_per_angle, DEFAULT_TORUS_BUDGET)
    }

    pub fn polydisk_sup_lower_with_budget(&self, samples_per_angle: usize, budget: u128) -> Result<f64> {
        if self.d == 0 {
            return Ok(self.coeffs[0].norm());
        }
        let required = 4 * self.d + 1;
        if samples_per_angle < required {
            return Err(Error::InsufficientSamples { got: samples_per_angle, required });
        }
        let s = samples_per_angle;
        // |P| is invariant under a common phase, so Z_0 = 1 loses nothing.
        let requested = (s as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX);
        if requested > budget {
            return Err(Error::SampleBudget { requested, cap: budget });
        }
        let roots: Vec<C64> = (0..s).map(|j| C64::from_polar(1.0, TAU * j as f64 / s as f64)).collect();
        let basis = self.basis();
        let mut best = 0.0f64;
        let mut phase = vec![0usize; self.n];
        loop {
            let mut acc = CompensatedSum::default();
            for (m, c) in basis.iter().zip(&self.coeffs) {
                let e = m.exponents();
                let mut k = 0usize;
                for v in 0..self.n {
                    k += phase[v] * e[v + 1] as usize;
                }
                acc.add(c * roots[k % s]);
            }
            best = best.max(acc.value().norm());
            // odometer
            let mut v = 0;
            loop {
                if v == self.n {
                    return Ok(best);
                }
                phase[v] += 1;
                if phase[v] < s {
                    break;
                }
                phase[v] = 0;
                v += 1;
            }
        }
    }

    pub fn mul(&self, other: &HomogeneousPolynomial) -> Result<HomogeneousPolynomial> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut out = Self::zero(self.n, self.d + other.d)?;
        let ba = self.basis();
        let bb = other.basis();
        let mut scratch = vec![0u32; self.n + 1];
        for (ma, ca) in ba.iter().zip(&self.coeffs) {
            if *ca == C64::new(0.0, 0.0) {
                continue;
            }
            for (mb, cb) in bb.iter().zip(&other.coeffs) {
                for v in 0..=self.n {
                    scratch[v] = ma.exponents()[v] + mb.exponents()[v];
                }
                out.coeffs[rank_fixed(&scratch, out.d)] += ca * cb;
            }
        }
        Ok(out)
    }

    /// `P^k`, the pullback of `P` under the degree-`k` Veronese re-embedding.
    pub fn veronese_power(&self, k: usize) -> Result<HomogeneousPolynomial> {
        if k == 0 {
            return Err(Error::InvalidArgument("veronese power needs k >= 1".into()));
        }
        let degree = self.d.saturating_mul(k);
        if degree > DEGREE_CAP {
            return Err(Error::DegreeCap { degree, cap: DEGREE_CAP });
        }
        check_caps(degree, binomial(self.n + degree, degree))?;
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Inhomogeneous view in the same `n + 1` variables (only degree-`d` terms).
    pub fn to_mixed(&self) -> AffinePolynomial {
        let mut out = AffinePolynomial::zero(self.n + 1, self.d).expect("caps already checked");
        for (m, c) in self.basis().iter().zip(&self.coeffs) {
            out.coeffs[m.graded_rank()] = *c;
        }
        out
    }
}

impl ValueOracle for HomogeneousPolynomial {
    fn num_vars(&self) -> usize {
        self.n + 1
    }
    fn total_degree(&self) -> usize {
        self.d
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        self.eval(z)
    }
}

/// A polynomial of degree at most `d` in `n` variables.
///
/// In a chart it is `p(z_1..z_n)`; with `n + 1` variables it also serves as a
/// mixed-degree polynomial in homogeneous coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct AffinePolynomial {
    n: usize,
    d: usize,
    coeffs: Vec<C64>,
}

impl TryFrom<PolyRepr> for AffinePolynomial {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        AffinePolynomial::new(r.n, r.d, r.coeffs)
    }
}

impl From<AffinePolynomial> for PolyRepr {
    fn from(p: AffinePolynomial) -> Self {
        PolyRepr { n: p.n, d: p.d, coeffs: p.coeffs }
    }
}

impl AffinePolynomial {
    pub fn new(n: usize, d: usize, coeffs: Vec<C64>) -> Result<Self> {
        let expected = binomial(n + d, d);
        check_caps(d, expected)?;
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: coeffs.len() });
        }
        Ok(AffinePolynomial { n, d, coeffs })
    }

    pub fn zero(n: usize, d: usize) -> Result<Self> {
        let len = binomial(n + d, d);
        check_caps(d, len)?;
        Ok(AffinePolynomial { n, d, coeffs: vec![C64::new(0.0, 0.0); len] })
    }

    pub fn from_terms(n: usize, d: usize, terms: &[(&[u32], C64)]) -> Result<Self> {
        let mut p = Self::zero(n, d)?;
        for (exps, c) in terms {
            let m = MultiIndex::new(exps.to_vec());
            if m.num_vars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.num_vars() });
            }
            if m.degree() > d {
                return Err(Error::InvalidArgument(format!("term of degree {} exceeds cap degree {d}", m.degree())));
            }
            p.coeffs[m.graded_rank()] += c;
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree_cap(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn basis(&self) -> Vec<MultiIndex> {
        enumerate_graded(self.n, self.d)
    }

    /// Coefficient of the monomial with the given exponents (zero if absent).
    pub fn coeff(&self, exps: &[u32]) -> C64 {
        let m = MultiIndex::new(exps.to_vec());
        if m.num_vars() != self.n || m.degree() > self.d {
            return C64::new(0.0, 0.0);
        }
        self.coeffs[m.graded_rank()]
    }

    /// Actual degree (highest grade carrying a nonzero coefficient).
    pub fn degree(&self) -> usize {
        self.basis()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(|(m, _)| m.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: z.len() });
        }
        let vals = monomial_values(&self.basis(), z);
        Ok(dot_compensated(&self.coeffs, &vals))
    }

    /// Multiply by `Z_0^{d - |α|}` to get the degree-`d` section on `P^n`.
    pub fn homogenize(&self) -> HomogeneousPolynomial {
        let mut out = HomogeneousPolynomial::zero(self.n, self.d).expect("caps already checked");
        for (m, c) in self.basis().iter().zip(&self.coeffs) {
            let mut e = Vec::with_capacity(self.n + 1);
            e.push((self.d - m.degree()) as u32);
            e.extend_from_slice(m.exponents());
            out.coeffs[rank_fixed(&e, self.d)] = *c;
        }
        out
    }

    /// Inverse of [`homogenize`](Self::homogenize): set `Z_0 = 1`.
    pub fn dehomogenize(p: &HomogeneousPolynomial) -> AffinePolynomial {
        let mut out = AffinePolynomial::zero(p.n, p.d).expect("caps already checked");
        for (m, c) in p.basis().iter().zip(&p.coeffs) {
            let tail = MultiIndex::new(m.exponents()[1..].to_vec());
            out.coeffs[tail.graded_rank()] = *c;
        }
        out
    }

    /// The degree-`m` homogeneous part, read off the coefficients directly.
    pub fn component(&self, m: usize) -> Result<HomogeneousPolynomial> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("component needs at least one variable".into()));
        }
        let mut out = HomogeneousPolynomial::zero(self.n - 1, m)?;
        if m <= self.d {
            for (idx, c) in self.basis().iter().zip(&self.coeffs) {
                if idx.degree() == m {
                    out.coeffs[idx.rank()] = *c;
                }
            }
        }
        Ok(out)
    }

    /// `|p(z)| / (1 + ‖z‖²)^{d/2}`, the norm of the degree-`d` section `p`
    /// defines at the chart point `[1 : z]`.
    pub fn affine_section_norm(&self, z: &[C64], d: usize) -> Result<f64> {
        if self.degree() > d {
            return Err(Error::InvalidArgument(format!("degree {} exceeds section degree {d}", self.degree())));
        }
        let v = self.eval(z)?.norm();
        let w = 1.0 + z.iter().map(|c| c.norm_sqr()).sum::<f64>();
        Ok(v / w.powf(d as f64 / 2.0))
    }
}

impl ValueOracle for AffinePolynomial {
    fn num_vars(&self) -> usize {
        self.n
    }
    fn total_degree(&self) -> usize {
        self.degree()
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        self.eval(z)
    }
}

/// The degree-`m` homogeneous component of `oracle` at `z`, via the exact
/// `n_points`-point discrete circle average
/// `(1/N) Σ_j P(ω^j Z) ω^{-jm}`, `ω = e^{2πi/N}`.
///
/// Exact whenever `N` exceeds the total degree of the oracle.
pub fn extract_degree_component<O: ValueOracle + ?Sized>(
    oracle: &O,
    z: &[C64],
    m: usize,
    n_points: usize,
) -> Result<C64> {
    let degree = oracle.total_degree();
    if n_points <= degree {
        return Err(Error::Aliasing { points: n_points, degree });
    }
    if z.len() != oracle.num_vars() {
        return Err(Error::DimensionMismatch { expected: oracle.num_vars(), got: z.len() });
    }
    let mut acc = CompensatedSum::default();
    let mut scaled = z.to_vec();
    for j in 0..n_points {
        let w = C64::from_polar(1.0, TAU * j as f64 / n_points as f64);
        for (s, zi) in scaled.iter_mut().zip(z) {
            *s = zi * w;
        }
        let back = C64::from_polar(1.0, -TAU * ((j * m) % n_points) as f64 / n_points as f64);
        acc.add(oracle.value(&scaled)? * back);
    }
    Ok(acc.value() / n_points as f64)
}
