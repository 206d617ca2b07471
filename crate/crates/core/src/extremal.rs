//! Degree-truncated extremal functions `Λ_K^{(d)}`, best constants and radii.
//!
//! For homogeneous `P` of degree `d` and `|ω| = 1`, `|P(ωZ)| = |P(Z)|`, so the
//! whole orbit `{ω^j Z}` of a sample imposes the same modulus constraint as `Z`.
//! The programs below therefore carry one constraint per sample of `K`.

use serde::Serialize;

use crate::compacta::{ProjectivePoint, SampledCompactum};
use crate::error::{Error, Result};
use crate::optimizer::{solve_modulus_program, BracketStatus, ModulusProgram, SolverConfig};
use crate::poly::{binomial, enumerate_graded, enumerate_monomials, monomial_values, HomogeneousPolynomial, MultiIndex, C64, DEGREE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalStatus {
    Bracketed,
    InterpolationRegime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalResult {
    pub x: ProjectivePoint,
    pub d: usize,
    pub lam_lo: f64,
    pub lam_hi: f64,
    /// Normalized to `sup_K ‖P‖ = 1`; absent in the interpolation regime.
    pub witness: Option<HomogeneousPolynomial>,
    pub status: ExtremalStatus,
}

impl ExtremalResult {
    pub fn lam_mid(&self) -> f64 {
        0.5 * (self.lam_lo + self.lam_hi)
    }

    pub fn width(&self) -> f64 {
        self.lam_hi - self.lam_lo
    }

    pub fn is_bracketed(&self) -> bool {
        self.status == ExtremalStatus::Bracketed
    }

    fn interpolation(x: ProjectivePoint, d: usize) -> Self {
        ExtremalResult {
            x,
            d,
            lam_lo: f64::INFINITY,
            lam_hi: f64::INFINITY,
            witness: None,
            status: ExtremalStatus::InterpolationRegime,
        }
    }
}

/// A closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.lo - slack && v <= self.hi + slack
    }
}

fn ln_factorials(d: usize) -> Vec<f64> {
    let mut t = vec![0.0; d + 1];
    for k in 1..=d {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

/// `sqrt(d! / α!)`: rescales monomials so that a unit vector has unit
/// coefficient-space image, which keeps the LP well conditioned.
fn unitary_weights(basis: &[MultiIndex], d: usize) -> Vec<f64> {
    let lf = ln_factorials(d);
    basis
        .iter()
        .map(|m| {
            let rest: f64 = m.exponents().iter().map(|&e| lf[e as usize]).sum();
            (0.5 * (lf[d] - rest)).exp()
        })
        .collect()
}

fn weighted_values(basis: &[MultiIndex], weights: &[f64], z: &[C64]) -> Vec<C64> {
    monomial_values(basis, z).into_iter().zip(weights).map(|(v, w)| v * w).collect()
}

fn check_degree(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if d > DEGREE_CAP {
        return Err(Error::DegreeCap { degree: d, cap: DEGREE_CAP });
    }
    Ok(())
}

fn check_point(k: &SampledCompactum, x: &ProjectivePoint) -> Result<()> {
    if x.n() != k.n() {
        return Err(Error::DimensionMismatch { expected: k.n() + 1, got: x.n() + 1 });
    }
    Ok(())
}

fn finish(
    x: ProjectivePoint,
    d: usize,
    n: usize,
    prog: &ModulusProgram,
    weights: &[f64],
    config: &SolverConfig,
) -> Result<ExtremalResult> {
    let bracket = solve_modulus_program(prog, config)?;
    if bracket.status == BracketStatus::Unbounded {
        return Ok(ExtremalResult::interpolation(x, d));
    }
    let coeffs: Vec<C64> = bracket.witness.iter().zip(weights).map(|(c, w)| c * w).collect();
    let witness = HomogeneousPolynomial::new(n, d, coeffs)?;
    let df = d as f64;
    Ok(ExtremalResult {
        x,
        d,
        lam_lo: bracket.lo.ln() / df,
        lam_hi: bracket.hi.ln() / df,
        witness: Some(witness),
        status: ExtremalStatus::Bracketed,
    })
}

/// The degree-`d` modulus program for `K` with the objective evaluated at `rep`
/// (any representative, not necessarily unit), plus the basis weights that
/// map program coefficients back to monomial coefficients.
pub(crate) fn homogeneous_program(
    k: &SampledCompactum,
    rep: &[C64],
    d: usize,
    config: &SolverConfig,
) -> Result<(ModulusProgram, Vec<f64>)> {
    check_degree(d)?;
    config.validate()?;
    if rep.len() != k.n() + 1 {
        return Err(Error::DimensionMismatch { expected: k.n() + 1, got: rep.len() });
    }
    let basis = enumerate_monomials(k.n(), d);
    let weights = unitary_weights(&basis, d);
    let objective = weighted_values(&basis, &weights, rep);
    let constraints = k.points().iter().map(|p| weighted_values(&basis, &weights, p.rep())).collect();
    let prog = ModulusProgram::new(objective, constraints, config.m_con, config.m_obj)?;
    Ok((prog, weights))
}

/// Bracket `Λ_K^{(d)}(x) = (1/d)·log sup{‖P(x)‖ : P ∈ C[Z]_d, sup_K ‖P‖ <= 1}`.
pub fn truncated_extremal(
    k: &SampledCompactum,
    x: &ProjectivePoint,
    d: usize,
    config: &SolverConfig,
) -> Result<ExtremalResult> {
    check_point(k, x)?;
    let (prog, weights) = homogeneous_program(k, x.rep(), d, config)?;
    finish(x.clone(), d, k.n(), &prog, &weights, config)
}

/// The same program posed on the affine chart `Z_0 != 0` in the graded basis
/// `z^α`, `|α| <= d`, with each value divided by `(1 + ‖z‖²)^{d/2}`.
pub fn affine_extremal(k: &SampledCompactum, z: &[C64], d: usize, config: &SolverConfig) -> Result<ExtremalResult> {
    check_degree(d)?;
    config.validate()?;
    let n = k.n();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    let charts = k.points().iter().map(|p| p.affine(0)).collect::<Result<Vec<_>>>()?;
    let basis = enumerate_graded(n, d);
    // weights of the homogenized monomials Z_0^{d-|α|} Z^α
    let full: Vec<MultiIndex> = basis
        .iter()
        .map(|m| {
            let mut e = vec![(d - m.degree()) as u32];
            e.extend_from_slice(m.exponents());
            MultiIndex::new(e)
        })
        .collect();
    let weights = unitary_weights(&full, d);
    let row = |w: &[C64]| -> Vec<C64> {
        let damp = (1.0 + w.iter().map(|c| c.norm_sqr()).sum::<f64>()).powf(-(d as f64) / 2.0);
        weighted_values(&basis, &weights, w).into_iter().map(|v| v * damp).collect()
    };
    let objective = row(z);
    let constraints = charts.iter().map(|w| row(w)).collect();
    let prog = ModulusProgram::new(objective, constraints, config.m_con, config.m_obj)?;
    let x = ProjectivePoint::from_affine(0, z)?;
    let bracket = solve_modulus_program(&prog, config)?;
    if bracket.status == BracketStatus::Unbounded {
        return Ok(ExtremalResult::interpolation(x, d));
    }
    // reorder graded-affine coefficients into the homogeneous basis
    let mut coeffs = vec![C64::new(0.0, 0.0); binomial(n + d, d)];
    for ((m, c), w) in full.iter().zip(&bracket.witness).zip(&weights) {
        coeffs[m.rank()] = c * w;
    }
    let df = d as f64;
    Ok(ExtremalResult {
        x,
        d,
        lam_lo: bracket.lo.ln() / df,
        lam_hi: bracket.hi.ln() / df,
        witness: Some(HomogeneousPolynomial::new(n, d, coeffs)?),
        status: ExtremalStatus::Bracketed,
    })
}

/// `C_K(x) = exp Λ`.
pub fn best_constant(res: &ExtremalResult) -> Result<Interval> {
    if !res.is_bracketed() {
        return Err(Error::InterpolationRegime);
    }
    Ok(Interval { lo: res.lam_lo.exp(), hi: res.lam_hi.exp() })
}

/// `ρ(x) = 1/C_K(x)`.
pub fn radius(res: &ExtremalResult) -> Result<Interval> {
    let c = best_constant(res)?;
    Ok(Interval { lo: 1.0 / c.hi, hi: 1.0 / c.lo })
}

/// One bracket per degree; `degrees` must be strictly ascending.
pub fn extremal_profile(
    k: &SampledCompactum,
    x: &ProjectivePoint,
    degrees: &[usize],
    config: &SolverConfig,
) -> Result<Vec<ExtremalResult>> {
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("empty degree list".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("degrees must be strictly ascending".into()));
    }
    degrees.iter().map(|&d| truncated_extremal(k, x, d, config)).collect()
}

/// Sup-over-degrees bracket of a ladder: `[max lam_lo, max lam_hi]`.
pub fn ladder_bracket(results: &[ExtremalResult]) -> Interval {
    let lo = results.iter().map(|r| r.lam_lo).fold(f64::NEG_INFINITY, f64::max);
    let hi = results.iter().map(|r| r.lam_hi).fold(f64::NEG_INFINITY, f64::max);
    Interval { lo, hi }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VeroneseReport {
    pub d: usize,
    pub k: usize,
    /// Ladder `{1, …, dk}`.
    pub full: Interval,
    /// Ladder `{k, 2k, …, dk}`, i.e. degrees `1..=d` of the `k`-th Veronese re-embedding.
    pub multiples: Interval,
    pub slack: f64,
    pub consistent: bool,
}

/// Compare the extremal ladder of `K ⊂ P^n` with that of its image under the
/// degree-`k` Veronese map, whose degree-`j` sections are the degree-`jk` ones.
pub fn veronese_consistency(
    k_set: &SampledCompactum,
    x: &ProjectivePoint,
    d: usize,
    k: usize,
    config: &SolverConfig,
) -> Result<VeroneseReport> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidArgument("d and k must be at least 1".into()));
    }
    let top = d * k;
    check_degree(top)?;
    let all: Vec<usize> = (1..=top).collect();
    let full_res = extremal_profile(k_set, x, &all, config)?;
    if full_res.iter().any(|r| !r.is_bracketed()) {
        return Err(Error::InterpolationRegime);
    }
    let mult_res: Vec<ExtremalResult> = full_res.iter().filter(|r| r.d % k == 0).cloned().collect();
    let full = ladder_bracket(&full_res);
    let multiples = ladder_bracket(&mult_res);
    let slack = config.log_slack(1).max(full.hi - full.lo).max(multiples.hi - multiples.lo) + 1e-9;
    let consistent = multiples.hi + slack >= full.lo && full.hi + 1e-9 >= multiples.lo;
    Ok(VeroneseReport { d, k, full, multiples, slack, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compacta::{sample, CurveGenerator};

    fn circle_oracle(r: f64) -> f64 {
        r.max(1.0).ln() - 0.5 * ((1.0 + r * r) / 2.0).ln()
    }

    fn at(z: C64) -> ProjectivePoint {
        ProjectivePoint::from_affine(0, &[z]).unwrap()
    }

    #[test]
    fn circle_center_and_outside() {
        let k = sample(&CurveGenerator::unit_circle(), 256).unwrap();
        let cfg = SolverConfig::default();
        for (z, d) in [(0.0, 4), (2.0, 4), (0.5, 3)] {
            let r = truncated_extremal(&k, &at(C64::new(z, 0.0)), d, &cfg).unwrap();
            let oracle = circle_oracle(z);
            assert!(r.lam_lo <= oracle + 1e-9 && r.lam_hi >= oracle - 1e-9, "z={z} d={d} {r:?}");
            assert!(r.width() <= cfg.log_slack(d) + 1e-9);
        }
    }

    #[test]
    fn single_point_is_zero() {
        let p = vec![C64::new(0.3, 0.0), C64::new(0.1, 0.7)];
        let k = SampledCompactum::from_points(1, std::slice::from_ref(&p)).unwrap();
        let x = ProjectivePoint::new(&p).unwrap();
        let r = truncated_extremal(&k, &x, 3, &SolverConfig::default()).unwrap();
        assert!(r.lam_lo <= 1e-12 && r.lam_hi >= -1e-12);
        let other = at(C64::new(2.0, 0.0));
        let r = truncated_extremal(&k, &other, 1, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, ExtremalStatus::InterpolationRegime);
        assert!(best_constant(&r).is_err());
    }

    #[test]
    fn witness_is_normalized() {
        let k = sample(&CurveGenerator::unit_circle(), 64).unwrap();
        let x = at(C64::new(0.4, 0.9));
        let r = truncated_extremal(&k, &x, 5, &SolverConfig::default()).unwrap();
        let w = r.witness.as_ref().unwrap();
        let sup = k.points().iter().map(|p| w.fs_section_norm(p.rep()).unwrap()).fold(0.0, f64::max);
        assert!(sup <= 1.0 + 1e-9);
        let at_x = w.fs_section_norm(x.rep()).unwrap();
        assert!((at_x.ln() / 5.0 - r.lam_lo).abs() < 1e-8);
    }

    #[test]
    fn constants_and_radius() {
        let r = ExtremalResult {
            x: at(C64::new(0.0, 0.0)),
            d: 1,
            lam_lo: 2f64.ln(),
            lam_hi: 2f64.ln(),
            witness: None,
            status: ExtremalStatus::Bracketed,
        };
        let c = best_constant(&r).unwrap();
        assert!((c.lo - 2.0).abs() < 1e-15 && (c.hi - 2.0).abs() < 1e-15);
        let rho = radius(&r).unwrap();
        assert!((rho.lo - 0.5).abs() < 1e-15);
    }

    #[test]
    fn affine_matches_homogeneous() {
        let k = sample(&CurveGenerator::unit_circle(), 128).unwrap();
        let cfg = SolverConfig::default();
        let z = C64::new(0.0, 0.0);
        let a = affine_extremal(&k, &[z], 6, &cfg).unwrap();
        let h = truncated_extremal(&k, &at(z), 6, &cfg).unwrap();
        assert!((a.lam_lo - h.lam_lo).abs() < 1e-6 + h.width());
        assert!((a.lam_hi - h.lam_hi).abs() < 1e-6 + h.width());
    }

    #[test]
    fn profile_rejects_bad_ladders() {
        let k = sample(&CurveGenerator::unit_circle(), 32).unwrap();
        let x = at(C64::new(0.0, 0.0));
        assert!(extremal_profile(&k, &x, &[], &SolverConfig::default()).is_err());
        assert!(extremal_profile(&k, &x, &[2, 2], &SolverConfig::default()).is_err());
        assert!(truncated_extremal(&k, &x, 0, &SolverConfig::default()).is_err());
    }
}
