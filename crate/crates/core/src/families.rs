//! Example families: graphs of entire functions and lacunary series over a
//! circle in `C^2 ⊂ P^2`, their truncation polynomials and finite exclusion
//! certificates, plus the ladder probe on the torus exp-curve.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compacta::{CurveGenerator, ProjectivePoint, SampledCompactum};
use crate::error::{Error, Result};
use crate::extremal::extremal_profile;
use crate::optimizer::SolverConfig;
use crate::poly::{AffinePolynomial, C64, DEGREE_CAP};
use crate::scanner::{classify, Classification, LadderEntry, Thresholds};

/// Relative distance `|w - f(z)|` below which a point counts as lying on the graph.
pub const GRAPH_RESOLUTION: f64 = 1e-12;

/// Growth factor of `c` over the top two rungs that reads as divergence.
pub const GROWTH_FACTOR: f64 = 1.2;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `w = f(z)` with `f` a finite power series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `f = Σ_{n<=T} a_n z^n`; rung `d` truncates at degree `d`.
    Entire { coeffs: Vec<C64> },
    /// `f = Σ_k c_k z^{n_k}`; rung `k` keeps the first `k` terms.
    Gap { exponents: Vec<u64>, coeffs: Vec<C64>, lambda: f64 },
}

impl Family {
    pub fn exp(terms: usize) -> Self {
        match CurveGenerator::exp_graph(1.0, terms) {
            CurveGenerator::EntireGraph { coeffs, .. } => Family::Entire { coeffs },
            _ => unreachable!(),
        }
    }

    /// `n_k = k!`, `c_k = 1/k²`.
    pub fn factorial_gap(terms: usize) -> Self {
        match CurveGenerator::factorial_gap_series(1.0, terms) {
            CurveGenerator::GapSeriesGraph { exponents, coeffs, lambda, .. } => Family::Gap { exponents, coeffs, lambda },
            _ => unreachable!(),
        }
    }

    pub fn from_generator(g: &CurveGenerator) -> Option<Self> {
        match g {
            CurveGenerator::EntireGraph { coeffs, .. } => Some(Family::Entire { coeffs: coeffs.clone() }),
            CurveGenerator::GapSeriesGraph { exponents, coeffs, lambda, .. } => {
                Some(Family::Gap { exponents: exponents.clone(), coeffs: coeffs.clone(), lambda: *lambda })
            }
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Family::Entire { .. } => "entire",
            Family::Gap { .. } => "gap",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let generator = match self {
            Family::Entire { coeffs } => CurveGenerator::EntireGraph { coeffs: coeffs.clone(), radius: 1.0 },
            Family::Gap { exponents, coeffs, lambda } => CurveGenerator::GapSeriesGraph {
                exponents: exponents.clone(),
                coeffs: coeffs.clone(),
                radius: 1.0,
                lambda: *lambda,
            },
        };
        generator.validate()
    }

    fn terms(&self) -> Vec<(u64, C64)> {
        match self {
            Family::Entire { coeffs } => coeffs.iter().enumerate().map(|(n, a)| (n as u64, *a)).collect(),
            Family::Gap { exponents, coeffs, .. } => exponents.iter().copied().zip(coeffs.iter().copied()).collect(),
        }
    }

    fn max_rung(&self) -> usize {
        match self {
            Family::Entire { coeffs } => coeffs.len() - 1,
            Family::Gap { exponents, .. } => exponents.len(),
        }
    }

    /// Index into `terms()` where the tail of rung `rung` begins.
    fn split(&self, rung: usize) -> Result<usize> {
        if rung > self.max_rung() {
            return Err(Error::InvalidArgument(format!("rung {rung} exceeds the {} available", self.max_rung())));
        }
        Ok(match self {
            Family::Entire { .. } => rung + 1,
            Family::Gap { .. } => rung,
        })
    }

    /// Total degree of the truncation polynomial at `rung`.
    pub fn degree(&self, rung: usize) -> Result<usize> {
        let split = self.split(rung)?;
        let top = self.terms()[..split].iter().map(|(e, _)| *e).max().unwrap_or(0);
        Ok(top.max(1) as usize)
    }

    pub fn value(&self, z: C64) -> C64 {
        self.terms().iter().map(|(e, a)| a * pow(z, *e)).sum()
    }

    /// `Σ_{tail} a_n z^n` as `(s, w)` with value `e^s · w`, safe against underflow.
    fn tail(&self, rung: usize, z: C64) -> Result<(f64, C64)> {
        let terms = self.terms();
        let tail = &terms[self.split(rung)?..];
        let Some(&(e0, _)) = tail.first() else {
            return Ok((f64::NEG_INFINITY, ZERO));
        };
        let r = z.norm();
        if r == 0.0 {
            return Ok(if e0 == 0 { (0.0, tail[0].1) } else { (f64::NEG_INFINITY, ZERO) });
        }
        let phase = pow(z / r, e0);
        let w: C64 = tail.iter().map(|(e, a)| a * pow(z, e - e0)).sum();
        Ok((e0 as f64 * r.ln(), phase * w))
    }

    /// `log Σ_{tail} |a_n| r^n`.
    fn log_tail_majorant(&self, rung: usize, r: f64) -> Result<f64> {
        let terms = self.terms();
        let tail = &terms[self.split(rung)?..];
        let Some(&(e0, _)) = tail.first() else {
            return Ok(f64::NEG_INFINITY);
        };
        if r == 0.0 {
            return Ok(if e0 == 0 { tail[0].1.norm().ln() } else { f64::NEG_INFINITY });
        }
        let s: f64 = tail.iter().map(|(e, a)| a.norm() * r.powf((e - e0) as f64)).sum();
        Ok(e0 as f64 * r.ln() + s.ln())
    }

    /// `log |P_rung(z, w)|`, evaluated as `(w - f(z)) + tail(z)` so that points
    /// on the graph do not drown in cancellation.
    fn log_abs_truncation(&self, rung: usize, z: C64, w: C64) -> Result<f64> {
        let f = self.value(z);
        let mut delta = w - f;
        if delta.norm() <= GRAPH_RESOLUTION * f.norm().max(1.0) {
            delta = ZERO;
        }
        let (s, t) = self.tail(rung, z)?;
        let log_tail = s + t.norm().ln();
        if delta == ZERO {
            return Ok(log_tail);
        }
        if log_tail < delta.norm().ln() - 80.0 {
            return Ok(delta.norm().ln());
        }
        Ok((delta + t * s.exp()).norm().ln())
    }
}

fn pow(z: C64, e: u64) -> C64 {
    if e == 0 {
        ONE
    } else {
        z.powi(e as i32)
    }
}

fn truncation_polynomial(terms: &[(u64, C64)], degree: u64) -> Result<AffinePolynomial> {
    let d = degree.max(1);
    if d > DEGREE_CAP as u64 {
        return Err(Error::DegreeCap { degree: d as usize, cap: DEGREE_CAP });
    }
    let mut p: Vec<(Vec<u32>, C64)> = vec![(vec![0, 1], ONE)];
    p.extend(terms.iter().map(|(e, a)| (vec![*e as u32, 0], -a)));
    let refs: Vec<(&[u32], C64)> = p.iter().map(|(e, a)| (e.as_slice(), *a)).collect();
    AffinePolynomial::from_terms(2, d as usize, &refs)
}

/// `P_d(z, w) = w - Σ_{n<=d} a_n z^n`.
pub fn entire_truncation_family(coeffs: &[C64], d: usize) -> Result<AffinePolynomial> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("no Taylor coefficients".into()));
    }
    if d >= coeffs.len() {
        return Err(Error::InvalidArgument(format!("truncation degree {d} exceeds available terms {}", coeffs.len() - 1)));
    }
    let terms: Vec<(u64, C64)> = coeffs[..=d].iter().enumerate().map(|(n, a)| (n as u64, *a)).collect();
    truncation_polynomial(&terms, d as u64)
}

/// `P_{n_k}(z, w) = w - Σ_{j<=k} c_j z^{n_j}`.
pub fn gap_truncation_family(exponents: &[u64], coeffs: &[C64], lambda: f64, k: usize) -> Result<AffinePolynomial> {
    let family = Family::Gap { exponents: exponents.to_vec(), coeffs: coeffs.to_vec(), lambda };
    family.validate()?;
    if k > exponents.len() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the {} gap terms", exponents.len())));
    }
    let terms: Vec<(u64, C64)> = exponents[..k].iter().copied().zip(coeffs[..k].iter().copied()).collect();
    truncation_polynomial(&terms, exponents[..k].last().copied().unwrap_or(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Diverging,
    Bounded,
}

/// One rung. Linear fields may underflow to zero; the log fields are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub rung: usize,
    pub d: usize,
    pub abs_p_x: f64,
    pub sup_k: f64,
    pub c: f64,
    pub log_abs_p_x: f64,
    pub log_sup_k: f64,
    /// `log Σ_{tail} |a_n| r^n`, an upper bound for `log sup_K |P_d|`.
    pub log_analytic_sup: f64,
    pub log_c: f64,
    pub log_c_analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionCertificate {
    pub x: [C64; 2],
    pub family: String,
    pub radius: f64,
    pub resolution: f64,
    pub records: Vec<CertificateRecord>,
    pub sampled_growth: bool,
    pub analytic_growth: bool,
    pub verdict: Verdict,
}

impl ExclusionCertificate {
    /// Recompute every `c` from the stored table; returns the worst relative discrepancy.
    pub fn recheck(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.log_c.is_finite())
            .map(|r| {
                let c = ((r.log_abs_p_x - r.log_sup_k) / r.d as f64).exp();
                (c / r.c - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn grows(prev: f64, top: f64) -> bool {
    if prev == f64::NEG_INFINITY || top == f64::NEG_INFINITY {
        return false;
    }
    top == f64::INFINITY || top - prev >= GROWTH_FACTOR.ln()
}

/// Finite exclusion certificate for the affine point `x = (z, w)`.
///
/// `ladder` lists rungs (degrees for entire families, term counts for gap
/// families) in ascending order. `sup_K` is taken over the sample cloud; the
/// verdict is `Diverging` only if the analytic majorant version grows too.
pub fn certify_exclusion(k: &SampledCompactum, x: [C64; 2], family: &Family, ladder: &[usize]) -> Result<ExclusionCertificate> {
    family.validate()?;
    if k.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: k.n() });
    }
    if ladder.len() < 2 {
        return Err(Error::InvalidArgument("certificate ladder needs at least two rungs".into()));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("ladder must be strictly ascending".into()));
    }
    let samples = k
        .points()
        .iter()
        .map(|p| p.affine(0).map(|a| (a[0], a[1])))
        .collect::<Result<Vec<_>>>()?;
    let radius = match k.generator() {
        CurveGenerator::EntireGraph { radius, .. } | CurveGenerator::GapSeriesGraph { radius, .. } => *radius,
        _ => samples.iter().map(|(z, _)| z.norm()).fold(0.0, f64::max),
    };

    let mut records = Vec::with_capacity(ladder.len());
    for &rung in ladder {
        let d = family.degree(rung)?;
        let log_abs_p_x = family.log_abs_truncation(rung, x[0], x[1])?;
        let log_sup_k = samples
            .iter()
            .map(|&(z, w)| family.log_abs_truncation(rung, z, w))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let log_analytic_sup = family.log_tail_majorant(rung, radius)?.max(log_sup_k);
        let ratio = |den: f64| {
            if log_abs_p_x == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                (log_abs_p_x - den) / d as f64
            }
        };
        let log_c = ratio(log_sup_k);
        records.push(CertificateRecord {
            rung,
            d,
            abs_p_x: log_abs_p_x.exp(),
            sup_k: log_sup_k.exp(),
            c: log_c.exp(),
            log_abs_p_x,
            log_sup_k,
            log_analytic_sup,
            log_c,
            log_c_analytic: ratio(log_analytic_sup),
        });
    }
    if records.iter().all(|r| r.log_abs_p_x == f64::NEG_INFINITY) {
        return Err(Error::CertificateInapplicable("the truncations vanish at x on every rung".into()));
    }
    let (prev, top) = (&records[records.len() - 2], &records[records.len() - 1]);
    let sampled_growth = grows(prev.log_c, top.log_c);
    let analytic_growth = grows(prev.log_c_analytic, top.log_c_analytic);
    let verdict = if sampled_growth && analytic_growth { Verdict::Diverging } else { Verdict::Bounded };
    Ok(ExclusionCertificate {
        x,
        family: family.id().to_string(),
        radius,
        resolution: GRAPH_RESOLUTION,
        records,
        sampled_growth,
        analytic_growth,
        verdict,
    })
}

/// `[1 : z : w : zw]`, the Segre image of `(z, w)`.
pub fn segre_point(z: C64, w: C64) -> Result<ProjectivePoint> {
    ProjectivePoint::new(&[ONE, z, w, z * w])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusProbeEntry {
    pub z: C64,
    pub w: C64,
    pub on_curve: bool,
    pub ladder: Vec<LadderEntry>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusProbeReport {
    pub degrees: Vec<usize>,
    pub entries: Vec<TorusProbeEntry>,
}

/// Probe points for the torus exp-curve `w = exp(z + z̄)`, `|z| = 1`: curve
/// samples, then points over the unit circle with the wrong fiber coordinate,
/// then points over `|z| = 1/2`.
pub fn default_torus_probes() -> Vec<(C64, C64)> {
    let mut out = Vec::new();
    for j in 0..3 {
        let z = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 3.0);
        out.push((z, C64::new((2.0 * z.re).exp(), 0.0)));
    }
    for &(theta, w) in &[(0.0, C64::new(1.0, 0.0)), (std::f64::consts::FRAC_PI_2, C64::new(0.0, 2.0))] {
        out.push((C64::from_polar(1.0, theta), w));
    }
    out.push((C64::new(0.5, 0.0), C64::new(1.0, 0.0)));
    out
}

/// Extremal ladders at Segre images of the probes on a sampled torus curve. Evidence only.
pub fn torus_exp_curve_probe(
    k: &SampledCompactum,
    probes: &[(C64, C64)],
    degrees: &[usize],
    config: &SolverConfig,
) -> Result<TorusProbeReport> {
    if k.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: k.n() });
    }
    let thresholds = Thresholds::default();
    let entries = probes
        .par_iter()
        .map(|&(z, w)| {
            let x = segre_point(z, w)?;
            let results = extremal_profile(k, &x, degrees, config)?;
            let ladder: Vec<LadderEntry> = results
                .iter()
                .map(|r| LadderEntry { d: r.d, lam_lo: r.lam_lo, lam_hi: r.lam_hi, interpolation: !r.is_bracketed() })
                .collect();
            let on_curve = (z.norm() - 1.0).abs() < 1e-12 && (w - C64::new((2.0 * z.re).exp(), 0.0)).norm() < 1e-12;
            let classification = classify(&ladder, &thresholds);
            Ok(TorusProbeEntry { z, w, on_curve, ladder, classification })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorusProbeReport { degrees: degrees.to_vec(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compacta::sample;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn exp_k() -> SampledCompactum {
        sample(&CurveGenerator::exp_graph(0.5, 40), 256).unwrap()
    }

    #[test]
    fn exp_truncation_d2() {
        let p = entire_truncation_family(&[c(1.0), c(1.0), c(0.5), c(1.0 / 6.0)], 2).unwrap();
        assert_eq!(p.coeff(&[0, 1]), c(1.0));
        assert_eq!(p.coeff(&[0, 0]), c(-1.0));
        assert_eq!(p.coeff(&[1, 0]), c(-1.0));
        assert_eq!(p.coeff(&[2, 0]), c(-0.5));
        assert_eq!(p.degree(), 2);
        assert!(entire_truncation_family(&[c(1.0)], 1).is_err());
    }

    #[test]
    fn polynomial_graph_vanishes() {
        let coeffs = [c(1.0), c(-2.0), c(0.5)];
        let p = entire_truncation_family(&coeffs, 2).unwrap();
        for j in 0..10 {
            let z = C64::from_polar(0.7, j as f64);
            let w = coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a);
            assert!(p.eval(&[z, w]).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn gap_truncation_k3() {
        let f = Family::factorial_gap(5);
        let Family::Gap { exponents, coeffs, lambda } = &f else { unreachable!() };
        let p = gap_truncation_family(exponents, coeffs, *lambda, 3).unwrap();
        assert_eq!(p.degree_cap(), 6);
        assert_eq!(p.coeff(&[1, 0]), c(-1.0));
        assert_eq!(p.coeff(&[2, 0]), c(-0.25));
        assert_eq!(p.coeff(&[6, 0]), c(-1.0 / 9.0));
        assert_eq!(p.coeff(&[0, 1]), c(1.0));
        let p0 = gap_truncation_family(exponents, coeffs, *lambda, 0).unwrap();
        assert_eq!(p0.coeffs().iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert_eq!(p0.coeff(&[0, 1]), c(1.0));
        assert!(gap_truncation_family(&[1, 2, 2], &[c(1.0); 3], 1.5, 2).is_err());
        assert!(matches!(gap_truncation_family(exponents, coeffs, *lambda, 5), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn stable_evaluation_matches_polynomial() {
        let f = Family::exp(30);
        let Family::Entire { coeffs } = &f else { unreachable!() };
        for d in [1, 3, 6] {
            let p = entire_truncation_family(coeffs, d).unwrap();
            for (z, w) in [(c(0.3), c(2.0)), (C64::new(0.1, -0.4), C64::new(1.0, 1.0)), (c(1.0), c(0.0))] {
                let direct = p.eval(&[z, w]).unwrap().norm().ln();
                assert!((f.log_abs_truncation(d, z, w).unwrap() - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn on_graph_value_is_tail() {
        let f = Family::exp(40);
        let z = C64::new(0.2, 0.3);
        let tail: C64 = (6..=40).map(|n| pow(z, n) / (1..=n).map(|k| k as f64).product::<f64>()).sum();
        let v = f.log_abs_truncation(5, z, z.exp()).unwrap();
        assert!((v - tail.norm().ln()).abs() < 1e-10);
    }

    #[test]
    fn exp_off_graph_certificate() {
        let k = exp_k();
        let cert = certify_exclusion(&k, [c(0.0), c(2.0)], &Family::exp(40), &[1, 2, 5, 10]).unwrap();
        assert_eq!(cert.verdict, Verdict::Diverging);
        let r10 = &cert.records[3];
        assert!((r10.abs_p_x - 1.0).abs() < 1e-15);
        assert!((r10.sup_k / 1.2762489e-11 - 1.0).abs() < 1e-6, "{}", r10.sup_k);
        assert!((r10.c - 12.2859).abs() < 1e-3);
        assert!(cert.recheck() < 1e-10);
    }

    #[test]
    fn exp_on_graph_bounded() {
        let k = exp_k();
        let x = [c(0.3), c(0.3f64.exp())];
        let cert = certify_exclusion(&k, x, &Family::exp(40), &[1, 2, 5, 10, 20]).unwrap();
        assert_eq!(cert.verdict, Verdict::Bounded);
        assert!(cert.records.iter().all(|r| r.c > 0.0 && r.c < 1.0));
    }

    #[test]
    fn inapplicable_on_limit_object() {
        let k = exp_k();
        let zero_tail = Family::Entire { coeffs: vec![c(1.0), c(1.0), c(0.0)] };
        assert!(matches!(
            certify_exclusion(&k, [c(0.25), c(1.25)], &zero_tail, &[1, 2]),
            Err(Error::CertificateInapplicable(_))
        ));
    }

    #[test]
    fn gap_certificate() {
        let k = sample(&CurveGenerator::factorial_gap_series(0.5, 6), 256).unwrap();
        let f = Family::factorial_gap(6);
        let x = [c(0.5), f.value(c(0.5)) + 1.0];
        let cert = certify_exclusion(&k, x, &f, &[2, 3, 4, 5]).unwrap();
        assert_eq!(cert.verdict, Verdict::Diverging);
        assert_eq!(cert.records.iter().map(|r| r.d).collect::<Vec<_>>(), vec![2, 6, 24, 120]);
        assert!(cert.records[3].log_sup_k < -400.0);
        assert!(cert.recheck() < 1e-10);
    }

    #[test]
    fn torus_probe_signature() {
        let k = sample(&CurveGenerator::TorusExpCurve {}, 96).unwrap();
        let probes = [(C64::new(1.0, 0.0), c(2f64.exp())), (C64::new(0.0, 1.0), C64::new(0.0, 2.0))];
        let rep = torus_exp_curve_probe(&k, &probes, &[1, 2, 3], &SolverConfig::default()).unwrap();
        assert!(rep.entries[0].on_curve && !rep.entries[1].on_curve);
        assert!(rep.entries[0].ladder.iter().all(|l| l.lam_hi <= 1e-9));
        assert_eq!(rep.entries[1].classification, Classification::Diverging);
    }
}
