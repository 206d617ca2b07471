//! The graded algebra `A_*(K)` of sections restricted to `K`, point-evaluation
//! homomorphisms `m_z(P) = P(z)`, their degree norms and the triple norm.

use serde::Serialize;

use crate::compacta::{ProjectivePoint, SampledCompactum};
use crate::error::{Error, Result};
use crate::extremal::{homogeneous_program, truncated_extremal, ExtremalResult};
use crate::optimizer::{solve_modulus_program, BracketStatus, SolverConfig};
use crate::poly::{HomogeneousPolynomial, C64};
use crate::scanner::{classify, Classification, LadderEntry, Thresholds};

#[derive(Debug, Clone)]
pub struct GradedAlgebraOnK {
    pub k: SampledCompactum,
    pub config: SolverConfig,
}

/// Bracket on `‖m_z‖_d = sup{|P(z)| : sup_{S(K)} |P| <= 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomNorm {
    pub d: usize,
    pub lo: f64,
    pub hi: f64,
}

impl HomNorm {
    /// `[lo^{1/d}, hi^{1/d}]`.
    pub fn root(&self) -> (f64, f64) {
        let e = 1.0 / self.d as f64;
        (self.lo.powf(e), self.hi.powf(e))
    }
}

fn norm(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

impl GradedAlgebraOnK {
    pub fn new(k: SampledCompactum, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(GradedAlgebraOnK { k, config })
    }

    /// `‖P‖_d = max over the unit lift of K of |P|`.
    pub fn degree_norm(&self, p: &HomogeneousPolynomial) -> Result<f64> {
        if p.n() != self.k.n() {
            return Err(Error::DimensionMismatch { expected: self.k.n(), got: p.n() });
        }
        self.k.points().iter().try_fold(0.0f64, |acc, x| Ok(acc.max(p.eval(x.rep())?.norm())))
    }

    /// The modulus program with objective `P ↦ P(z)` at `|z|·[z]_unit`; `|P(z)|`
    /// does not depend on the phase of `z`, so this is `‖m_z‖_d` itself.
    pub fn hom_norm(&self, z: &[C64], d: usize) -> Result<HomNorm> {
        if z.len() != self.k.n() + 1 {
            return Err(Error::DimensionMismatch { expected: self.k.n() + 1, got: z.len() });
        }
        let scale = norm(z);
        if scale == 0.0 {
            return Err(Error::ZeroRepresentative);
        }
        let unit = ProjectivePoint::new(z)?;
        let rep: Vec<C64> = unit.rep().iter().map(|c| c * scale).collect();
        let (prog, _) = homogeneous_program(&self.k, &rep, d, &self.config)?;
        let b = solve_modulus_program(&prog, &self.config)?;
        if b.status == BracketStatus::Unbounded {
            return Err(Error::InterpolationRegime);
        }
        Ok(HomNorm { d, lo: b.lo, hi: b.hi })
    }

    pub fn triple_norm(&self, z: &[C64], ladder: &[usize]) -> Result<TripleNormReport> {
        if ladder.is_empty() {
            return Err(Error::InvalidArgument("empty degree ladder".into()));
        }
        if ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("ladder must be strictly ascending".into()));
        }
        let norms = ladder.iter().map(|&d| self.hom_norm(z, d)).collect::<Result<Vec<_>>>()?;
        let roots: Vec<(f64, f64)> = norms.iter().map(|h| h.root()).collect();
        let estimate_lo = roots.iter().map(|r| r.0).fold(0.0, f64::max);
        let estimate_hi = roots.iter().map(|r| r.1).fold(0.0, f64::max);
        let zn = norm(z);
        let entries: Vec<LadderEntry> = norms
            .iter()
            .zip(&roots)
            .map(|(h, r)| LadderEntry { d: h.d, lam_lo: (r.0 / zn).ln(), lam_hi: (r.1 / zn).ln(), interpolation: false })
            .collect();
        let growth = classify(&entries, &Thresholds::default()) == Classification::Diverging;
        let strictly_increasing = roots.windows(2).all(|w| w[1].0 > w[0].1);
        let comparison = if (zn - 1.0).abs() <= 1e-12 {
            let x = ProjectivePoint::new(z)?;
            let results = ladder
                .iter()
                .map(|&d| truncated_extremal(&self.k, &x, d, &self.config))
                .collect::<Result<Vec<ExtremalResult>>>()?;
            let c_lo = results.iter().map(|r| r.lam_lo.exp()).fold(0.0, f64::max);
            let c_hi = results.iter().map(|r| r.lam_hi.exp()).fold(0.0, f64::max);
            let slack = (estimate_hi - estimate_lo) + (c_hi - c_lo) + 2e-2;
            Some(ConstantComparison {
                c_lo,
                c_hi,
                agrees: estimate_lo <= c_hi + slack && estimate_hi >= c_lo - slack,
            })
        } else {
            None
        };
        Ok(TripleNormReport { z: z.to_vec(), ladder: norms, estimate_lo, estimate_hi, growth, strictly_increasing, comparison })
    }

    /// Evidence that the best-constant function is bounded on the hull samples.
    pub fn stability_probe(&self, hull: &[ProjectivePoint], ladder: &[usize]) -> Result<StabilityReport> {
        if hull.is_empty() {
            return Err(Error::InvalidArgument("no hull samples".into()));
        }
        let mut samples = Vec::with_capacity(hull.len());
        for x in hull {
            let results = ladder
                .iter()
                .map(|&d| truncated_extremal(&self.k, x, d, &self.config))
                .collect::<Result<Vec<_>>>()?;
            let entries: Vec<LadderEntry> = results
                .iter()
                .map(|r| LadderEntry { d: r.d, lam_lo: r.lam_lo, lam_hi: r.lam_hi, interpolation: !r.is_bracketed() })
                .collect();
            let class = classify(&entries, &Thresholds::default());
            let c_hi = results.iter().map(|r| r.lam_hi.exp()).fold(0.0, f64::max);
            samples.push(StabilitySample { x: x.clone(), c_hi, classification: class });
        }
        let sup_c_hi = samples.iter().map(|s| s.c_hi).fold(0.0, f64::max);
        let growth = samples.iter().any(|s| s.classification == Classification::Diverging);
        let passed = sup_c_hi.is_finite() && !growth;
        Ok(StabilityReport { sup_c_hi, growth, passed, samples })
    }

    /// Check `‖P(x)‖ <= C_hi(x)^d · sup_K ‖P‖ + 1e-9` for each section and hull sample,
    /// with `C_hi(x)^d` taken from the degree-`d` bracket at `x`.
    pub fn gelfand_norm_check(&self, sections: &[HomogeneousPolynomial], hull: &[HullSample]) -> Result<GelfandReport> {
        let mut checks = 0;
        let mut violations = Vec::new();
        let mut max_ratio = 0.0f64;
        for (si, p) in sections.iter().enumerate() {
            let sup_k = self
                .k
                .points()
                .iter()
                .try_fold(0.0f64, |acc, x| Ok::<_, Error>(acc.max(p.fs_section_norm(x.rep())?)))?;
            for (hi, h) in hull.iter().enumerate() {
                let r = h
                    .brackets
                    .iter()
                    .find(|r| r.d == p.degree())
                    .ok_or_else(|| Error::InvalidArgument(format!("hull sample {hi} has no degree-{} bracket", p.degree())))?;
                if !r.is_bracketed() {
                    return Err(Error::InterpolationRegime);
                }
                let lhs = p.fs_section_norm(h.x.rep())?;
                let rhs = (r.lam_hi * p.degree() as f64).exp() * sup_k;
                checks += 1;
                if rhs > 0.0 {
                    max_ratio = max_ratio.max(lhs / rhs);
                }
                if lhs > rhs + 1e-9 {
                    violations.push(GelfandViolation { section: si, sample: hi, lhs, rhs });
                }
            }
        }
        Ok(GelfandReport { checks, max_ratio, violations })
    }

    /// Brackets at a hull sample for every degree in `degrees`.
    pub fn hull_sample(&self, x: &ProjectivePoint, degrees: &[usize]) -> Result<HullSample> {
        let brackets = degrees
            .iter()
            .map(|&d| truncated_extremal(&self.k, x, d, &self.config))
            .collect::<Result<Vec<_>>>()?;
        Ok(HullSample { x: x.clone(), brackets })
    }
}

/// Pairs `(d, d′)` in the ladder with `d + d′` also present where
/// `hi_{d+d′} < lo_d · lo_{d′} − 1e-9`.
pub fn super_multiplicativity_violations(ladder: &[HomNorm]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in ladder {
        for b in ladder {
            if a.d > b.d {
                continue;
            }
            if let Some(s) = ladder.iter().find(|h| h.d == a.d + b.d) {
                if s.hi < a.lo * b.lo * (1.0 - 1e-9) - 1e-9 {
                    out.push((a.d, b.d));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantComparison {
    pub c_lo: f64,
    pub c_hi: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleNormReport {
    pub z: Vec<C64>,
    pub ladder: Vec<HomNorm>,
    /// `max_d lo_d^{1/d}`: lower evidence for `|||m_z|||`.
    pub estimate_lo: f64,
    pub estimate_hi: f64,
    pub growth: bool,
    pub strictly_increasing: bool,
    /// Present for unit `z`: comparison with the best-constant ladder at `[z]`.
    pub comparison: Option<ConstantComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilitySample {
    pub x: ProjectivePoint,
    pub c_hi: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub sup_c_hi: f64,
    pub growth: bool,
    pub passed: bool,
    pub samples: Vec<StabilitySample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullSample {
    pub x: ProjectivePoint,
    pub brackets: Vec<ExtremalResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GelfandViolation {
    pub section: usize,
    pub sample: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GelfandReport {
    pub checks: usize,
    pub max_ratio: f64,
    pub violations: Vec<GelfandViolation>,
}
