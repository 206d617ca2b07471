//! Finite sample clouds standing in for compact subsets of `P^n`, the curve
//! generators used throughout the crate, and the homogeneous lift `S(K)`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::poly::C64;

const CANONICAL_EPS: f64 = 1e-14;
const DUPLICATE_EPS: f64 = 1e-12;

/// A point of `P^n`, stored as a unit representative whose first
/// non-negligible coordinate is real and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct ProjectivePoint {
    rep: Vec<C64>,
}

impl TryFrom<Vec<C64>> for ProjectivePoint {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        ProjectivePoint::new(&v)
    }
}

impl From<ProjectivePoint> for Vec<C64> {
    fn from(p: ProjectivePoint) -> Self {
        p.rep
    }
}

impl ProjectivePoint {
    pub fn new(z: &[C64]) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        let scale = z.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::ZeroRepresentative);
        }
        if Self::is_canonical(z) {
            return Ok(ProjectivePoint { rep: z.to_vec() });
        }
        let scaled: Vec<C64> = z.iter().map(|c| c / scale).collect();
        let norm = scaled.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut rep: Vec<C64> = scaled.iter().map(|c| c / norm).collect();
        let lead = rep.iter().find(|c| c.norm() > CANONICAL_EPS).copied().expect("nonzero vector");
        let phase = lead.conj() / lead.norm();
        for c in rep.iter_mut() {
            *c *= phase;
        }
        Ok(ProjectivePoint { rep })
    }

    fn is_canonical(z: &[C64]) -> bool {
        let norm2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let lead = z.iter().find(|c| c.norm() > CANONICAL_EPS);
        (norm2 - 1.0).abs() <= 1e-13 && lead.is_some_and(|c| c.im == 0.0 && c.re > 0.0)
    }

    /// The point `[1 : z]` with the 1 inserted at coordinate `chart`.
    pub fn from_affine(chart: usize, z: &[C64]) -> Result<Self> {
        if chart > z.len() {
            return Err(Error::InvalidArgument(format!("chart {chart} out of range for dimension {}", z.len())));
        }
        let mut full = z.to_vec();
        full.insert(chart, C64::new(1.0, 0.0));
        Self::new(&full)
    }

    pub fn rep(&self) -> &[C64] {
        &self.rep
    }

    /// Projective dimension.
    pub fn n(&self) -> usize {
        self.rep.len() - 1
    }

    /// Affine coordinates in the chart `Z_chart != 0`.
    pub fn affine(&self, chart: usize) -> Result<Vec<C64>> {
        let pivot = *self.rep.get(chart).ok_or(Error::ChartViolation { chart })?;
        if pivot.norm() < 1e-12 {
            return Err(Error::ChartViolation { chart });
        }
        Ok(self
            .rep
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != chart)
            .map(|(_, c)| c / pivot)
            .collect())
    }

    /// Fubini–Study chordal distance `sin θ`, where `cos θ = |<a, b>|`.
    pub fn chordal_distance(&self, other: &ProjectivePoint) -> f64 {
        let inner: C64 = self.rep.iter().zip(&other.rep).map(|(a, b)| a.conj() * b).sum();
        let m = inner.norm();
        // s = ‖a − e^{iφ} b‖ = 2 sin(θ/2) stays accurate for tiny θ
        let phase = if m > 0.0 { inner.conj() / m } else { C64::new(1.0, 0.0) };
        let s = self
            .rep
            .iter()
            .zip(&other.rep)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            .min(2.0);
        if m == 0.0 {
            return 1.0;
        }
        (s * (1.0 - s * s / 4.0).max(0.0).sqrt()).min(1.0)
    }
}

/// How a compactum was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveGenerator {
    /// The circle `center + r e^{iθ} direction` in the chart `Z_0 != 0`.
    CircleInLine {
        radius: f64,
        #[serde(default = "default_center")]
        center: Vec<C64>,
        #[serde(default = "default_center_dir")]
        direction: Vec<C64>,
    },
    /// `[1 : z : f(z)]` over `|z| = r`, `f = Σ a_n z^n`.
    EntireGraph { coeffs: Vec<C64>, radius: f64 },
    /// `[1 : z : f(z)]` over `|z| = r`, `f = Σ_k c_k z^{n_k}` with `n_{k+1} > λ n_k`.
    GapSeriesGraph { exponents: Vec<u64>, coeffs: Vec<C64>, radius: f64, lambda: f64 },
    /// `(z, exp(z + z̄))` on `|z| = 1`, Segre-embedded as `[1 : z : w : zw]` in `P^3`.
    TorusExpCurve {},
    ExplicitCloud { n: usize, points: Vec<Vec<C64>> },
}

fn default_center() -> Vec<C64> {
    vec![C64::new(0.0, 0.0)]
}

fn default_center_dir() -> Vec<C64> {
    vec![C64::new(1.0, 0.0)]
}

impl CurveGenerator {
    pub fn unit_circle() -> Self {
        CurveGenerator::CircleInLine { radius: 1.0, center: default_center(), direction: default_center_dir() }
    }

    /// Taylor coefficients of `exp` up to `z^terms`.
    pub fn exp_graph(radius: f64, terms: usize) -> Self {
        let mut coeffs = Vec::with_capacity(terms + 1);
        let mut a = 1.0;
        for k in 0..=terms {
            if k > 0 {
                a /= k as f64;
            }
            coeffs.push(C64::new(a, 0.0));
        }
        CurveGenerator::EntireGraph { coeffs, radius }
    }

    /// `n_k = k!`, `c_{n_k} = 1/k²` for `k = 1..=terms`.
    pub fn factorial_gap_series(radius: f64, terms: usize) -> Self {
        let mut exponents = Vec::with_capacity(terms);
        let mut f: u64 = 1;
        for k in 1..=terms as u64 {
            f *= k;
            exponents.push(f);
        }
        let coeffs = (1..=terms).map(|k| C64::new(1.0 / (k * k) as f64, 0.0)).collect();
        CurveGenerator::GapSeriesGraph { exponents, coeffs, radius, lambda: 1.5 }
    }

    /// Projective dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        match self {
            CurveGenerator::CircleInLine { center, .. } => center.len(),
            CurveGenerator::EntireGraph { .. } | CurveGenerator::GapSeriesGraph { .. } => 2,
            CurveGenerator::TorusExpCurve {} => 3,
            CurveGenerator::ExplicitCloud { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidGenerator(s.to_string()));
        match self {
            CurveGenerator::CircleInLine { radius, center, direction } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("radius must be positive");
                }
                if center.is_empty() || center.len() != direction.len() {
                    return bad("center and direction must have equal nonzero length");
                }
                if direction.iter().all(|c| c.norm() == 0.0) {
                    return bad("direction must be nonzero");
                }
            }
            CurveGenerator::EntireGraph { coeffs, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("radius must be positive");
                }
                if coeffs.is_empty() {
                    return bad("at least one Taylor coefficient required");
                }
            }
            CurveGenerator::GapSeriesGraph { exponents, coeffs, radius, lambda } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("radius must be positive");
                }
                if exponents.is_empty() || exponents.len() != coeffs.len() {
                    return bad("exponents and coefficients must have equal nonzero length");
                }
                if !(*lambda > 1.0) {
                    return bad("gap ratio lambda must exceed 1");
                }
                if exponents[0] == 0 {
                    return bad("gap exponents must be positive");
                }
                for w in exponents.windows(2) {
                    if !((w[1] as f64) > lambda * w[0] as f64) {
                        return Err(Error::InvalidGenerator(format!(
                            "gap condition n_(k+1) > lambda n_k fails at {} -> {}",
                            w[0], w[1]
                        )));
                    }
                }
                if exponents.iter().any(|&e| e > i32::MAX as u64) {
                    return bad("gap exponent too large");
                }
            }
            CurveGenerator::TorusExpCurve {} => {}
            CurveGenerator::ExplicitCloud { n, points } => {
                if points.is_empty() {
                    return bad("explicit cloud is empty");
                }
                if points.iter().any(|p| p.len() != n + 1) {
                    return bad("point length must be n + 1");
                }
            }
        }
        Ok(())
    }

    /// Curve parameters `z_j` of an equispaced sampling (none for explicit clouds).
    pub fn parameters(&self, count: usize) -> Option<Vec<C64>> {
        let radius = match self {
            CurveGenerator::CircleInLine { radius, .. }
            | CurveGenerator::EntireGraph { radius, .. }
            | CurveGenerator::GapSeriesGraph { radius, .. } => *radius,
            CurveGenerator::TorusExpCurve {} => 1.0,
            CurveGenerator::ExplicitCloud { .. } => return None,
        };
        Some((0..count).map(|j| C64::from_polar(radius, TAU * j as f64 / count as f64)).collect())
    }

    /// The graph function `f` at `z`, for graph generators.
    pub fn graph_value(&self, z: C64) -> Option<C64> {
        match self {
            CurveGenerator::EntireGraph { coeffs, .. } => {
                Some(coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a))
            }
            CurveGenerator::GapSeriesGraph { exponents, coeffs, .. } => {
                Some(exponents.iter().zip(coeffs).map(|(&e, c)| c * z.powi(e as i32)).sum())
            }
            _ => None,
        }
    }

    fn homogeneous_point(&self, z: C64) -> Vec<C64> {
        let one = C64::new(1.0, 0.0);
        match self {
            CurveGenerator::CircleInLine { center, direction, .. } => {
                let mut v = vec![one];
                v.extend(center.iter().zip(direction).map(|(c, d)| c + z * d));
                v
            }
            CurveGenerator::EntireGraph { .. } | CurveGenerator::GapSeriesGraph { .. } => {
                vec![one, z, self.graph_value(z).expect("graph generator")]
            }
            CurveGenerator::TorusExpCurve {} => {
                let w = C64::new((2.0 * z.re).exp(), 0.0);
                vec![one, z, w, z * w]
            }
            CurveGenerator::ExplicitCloud { .. } => unreachable!("explicit clouds have no parameter"),
        }
    }
}

/// A finite sample of `K ⊂ P^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CompactumRepr", into = "CompactumRepr")]
pub struct SampledCompactum {
    n: usize,
    generator: CurveGenerator,
    orbit_size: usize,
    points: Vec<ProjectivePoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompactumRepr {
    n: usize,
    generator: CurveGenerator,
    orbit_size: usize,
    points: Vec<Vec<C64>>,
}

impl TryFrom<CompactumRepr> for SampledCompactum {
    type Error = Error;
    fn try_from(r: CompactumRepr) -> Result<Self> {
        let points = r.points.iter().map(|p| ProjectivePoint::new(p)).collect::<Result<Vec<_>>>()?;
        SampledCompactum::new(r.n, points, r.generator, r.orbit_size)
    }
}

impl From<SampledCompactum> for CompactumRepr {
    fn from(k: SampledCompactum) -> Self {
        CompactumRepr {
            n: k.n,
            generator: k.generator,
            orbit_size: k.orbit_size,
            points: k.points.into_iter().map(|p| p.rep).collect(),
        }
    }
}

/// `N = 2·(max degree) + 1`, enough for exact DFT extraction of every degree.
pub fn default_orbit_size(max_degree: usize) -> usize {
    2 * max_degree + 1
}

impl SampledCompactum {
    pub fn new(n: usize, points: Vec<ProjectivePoint>, generator: CurveGenerator, orbit_size: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("compactum must be nonempty".into()));
        }
        if orbit_size == 0 {
            return Err(Error::InvalidArgument("orbit size must be at least 1".into()));
        }
        if let Some(p) = points.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch { expected: n + 1, got: p.rep.len() });
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i].chordal_distance(&points[j]) <= DUPLICATE_EPS {
                    return Err(Error::InvalidArgument(format!("duplicate sample points {j} and {i}")));
                }
            }
        }
        Ok(SampledCompactum { n, generator, orbit_size, points })
    }

    /// A cloud given directly by homogeneous representatives.
    pub fn from_points(n: usize, reps: &[Vec<C64>]) -> Result<Self> {
        let generator = CurveGenerator::ExplicitCloud { n, points: reps.to_vec() };
        generator.validate()?;
        let points = reps.iter().map(|p| ProjectivePoint::new(p)).collect::<Result<Vec<_>>>()?;
        Self::new(n, points, generator, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn generator(&self) -> &CurveGenerator {
        &self.generator
    }

    pub fn orbit_size(&self) -> usize {
        self.orbit_size
    }

    pub fn with_orbit_size(mut self, orbit_size: usize) -> Result<Self> {
        if orbit_size == 0 {
            return Err(Error::InvalidArgument("orbit size must be at least 1".into()));
        }
        self.orbit_size = orbit_size;
        Ok(self)
    }

    /// Curve parameters of the samples, when the generator has them.
    pub fn parameters(&self) -> Option<Vec<C64>> {
        self.generator.parameters(self.points.len())
    }

    /// Smallest chordal distance from `x` to a sample.
    pub fn distance_to(&self, x: &ProjectivePoint) -> f64 {
        self.points.iter().map(|p| p.chordal_distance(x)).fold(f64::INFINITY, f64::min)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("compactum serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Unit vectors `ω^j · rep` for every sample, `ω = e^{2πi/N}`; orbit-major.
    pub fn homogeneous_lift(&self, orbit_size: usize) -> Result<HomogeneousLift> {
        if orbit_size == 0 {
            return Err(Error::InvalidArgument("orbit size must be at least 1".into()));
        }
        let roots: Vec<C64> = (0..orbit_size).map(|j| C64::from_polar(1.0, TAU * j as f64 / orbit_size as f64)).collect();
        let vectors = self
            .points
            .iter()
            .flat_map(|p| roots.iter().map(move |w| p.rep.iter().map(|c| c * w).collect::<Vec<_>>()))
            .collect();
        Ok(HomogeneousLift { orbit_size, vectors })
    }

    /// Image under a unitary `(n+1)×(n+1)` matrix.
    pub fn apply_unitary(&self, u: &DMatrix<C64>) -> Result<SampledCompactum> {
        let size = self.n + 1;
        if u.nrows() != size || u.ncols() != size {
            return Err(Error::DimensionMismatch { expected: size, got: u.nrows().max(u.ncols()) });
        }
        let defect = unitary_defect(u);
        if defect > 1e-12 {
            return Err(Error::NotUnitary { defect });
        }
        let points = self.points.iter().map(|p| apply_matrix(u, p)).collect::<Result<Vec<_>>>()?;
        let generator = CurveGenerator::ExplicitCloud { n: self.n, points: points.iter().map(|p| p.rep.clone()).collect() };
        SampledCompactum::new(self.n, points, generator, self.orbit_size)
    }

    /// Restrict to a subset of samples (keeps the generator tag).
    pub fn subset(&self, indices: &[usize]) -> Result<SampledCompactum> {
        let points = indices
            .iter()
            .map(|&i| self.points.get(i).cloned().ok_or_else(|| Error::InvalidArgument(format!("index {i} out of range"))))
            .collect::<Result<Vec<_>>>()?;
        let generator = CurveGenerator::ExplicitCloud { n: self.n, points: points.iter().map(|p| p.rep.clone()).collect() };
        SampledCompactum::new(self.n, points, generator, self.orbit_size)
    }
}

/// `max |(U†U − I)_{ij}|`.
pub fn unitary_defect(u: &DMatrix<C64>) -> f64 {
    let g = u.adjoint() * u;
    let mut defect = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((g[(i, j)] - target).norm());
        }
    }
    defect
}

/// `U·x`, re-canonicalized.
pub fn apply_matrix(u: &DMatrix<C64>, x: &ProjectivePoint) -> Result<ProjectivePoint> {
    let size = x.rep.len();
    let image: Vec<C64> = (0..size).map(|i| (0..size).map(|j| u[(i, j)] * x.rep[j]).sum()).collect();
    ProjectivePoint::new(&image)
}

/// The homogeneous lift of a sample cloud: `N` unit vectors per point.
#[derive(Debug, Clone)]
pub struct HomogeneousLift {
    pub orbit_size: usize,
    pub vectors: Vec<Vec<C64>>,
}

impl HomogeneousLift {
    pub fn orbits(&self) -> impl Iterator<Item = &[Vec<C64>]> {
        self.vectors.chunks(self.orbit_size)
    }
}

/// Equispaced sampling of a generator.
pub fn sample(generator: &CurveGenerator, count: usize) -> Result<SampledCompactum> {
    if count < 8 {
        return Err(Error::InvalidArgument(format!("sample count {count} < 8")));
    }
    generator.validate()?;
    let n = generator.ambient_dim();
    let points = match generator {
        CurveGenerator::ExplicitCloud { points, .. } => {
            points.iter().map(|p| ProjectivePoint::new(p)).collect::<Result<Vec<_>>>()?
        }
        _ => {
            let params = generator.parameters(count).expect("parametrized generator");
            params
                .into_iter()
                .map(|z| ProjectivePoint::new(&generator.homogeneous_point(z)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    SampledCompactum::new(n, points, generator.clone(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn canonicalization_is_idempotent_and_unit() {
        let p = ProjectivePoint::new(&[c(0.0, 2.0), c(1.0, -1.0)]).unwrap();
        let norm: f64 = p.rep().iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        assert!(p.rep()[0].im.abs() < 1e-16 && p.rep()[0].re > 0.0);
        let q = ProjectivePoint::new(p.rep()).unwrap();
        assert_eq!(p, q);
        let r = ProjectivePoint::new(&[c(0.0, 0.0), c(0.0, -3.0)]).unwrap();
        assert_eq!(r.rep()[1], c(1.0, 0.0));
        assert_eq!(ProjectivePoint::new(&[c(0.0, 0.0)]), Err(Error::ZeroRepresentative));
    }

    #[test]
    fn circle_sampling() {
        let k = sample(&CurveGenerator::unit_circle(), 256).unwrap();
        assert_eq!(k.len(), 256);
        assert_eq!(k.n(), 1);
        for (p, z) in k.points().iter().zip(k.parameters().unwrap()) {
            let a = p.affine(0).unwrap();
            assert!((a[0] - z).norm() < 1e-14);
            assert!((z.norm() - 1.0).abs() < 1e-14);
        }
        assert!(sample(&CurveGenerator::unit_circle(), 7).is_err());
    }

    #[test]
    fn exp_graph_sampling() {
        let k = sample(&CurveGenerator::exp_graph(0.5, 40), 200).unwrap();
        for (p, z) in k.points().iter().zip(k.parameters().unwrap()) {
            let a = p.affine(0).unwrap();
            assert!((a[0] - z).norm() < 1e-14);
            assert!((a[1] - z.exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn gap_series_sampling_and_validation() {
        let g = CurveGenerator::factorial_gap_series(0.9, 6);
        let k = sample(&g, 400).unwrap();
        assert_eq!(k.len(), 400);
        // the series converges absolutely: |f| <= Σ 1/k² < π²/6
        for p in k.points() {
            let a = p.affine(0).unwrap();
            assert!(a[1].norm() < std::f64::consts::PI.powi(2) / 6.0);
        }
        let bad = CurveGenerator::GapSeriesGraph {
            exponents: vec![1, 2, 3],
            coeffs: vec![c(1.0, 0.0); 3],
            radius: 0.5,
            lambda: 1.5,
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidGenerator(_))));
    }

    #[test]
    fn lift_orbits() {
        let k = SampledCompactum::from_points(1, &[vec![c(0.6, 0.0), c(0.0, 0.8)]]).unwrap();
        let lift = k.homogeneous_lift(4).unwrap();
        assert_eq!(lift.vectors.len(), 4);
        for (j, v) in lift.vectors.iter().enumerate() {
            let w = C64::i().powi(j as i32);
            for (a, b) in v.iter().zip(k.points()[0].rep()) {
                assert!((a - w * b).norm() < 1e-15);
            }
        }
        let k3 = sample(&CurveGenerator::unit_circle(), 16).unwrap();
        assert_eq!(k3.homogeneous_lift(5).unwrap().vectors.len(), 80);
    }

    #[test]
    fn unitary_actions() {
        let k = sample(&CurveGenerator::exp_graph(0.5, 30), 32).unwrap();
        let id = DMatrix::<C64>::identity(3, 3);
        assert_eq!(k.apply_unitary(&id).unwrap().points(), k.points());

        let mut perm = DMatrix::<C64>::zeros(3, 3);
        perm[(0, 1)] = c(1.0, 0.0);
        perm[(1, 0)] = c(1.0, 0.0);
        perm[(2, 2)] = c(1.0, 0.0);
        let kp = k.apply_unitary(&perm).unwrap();
        for (a, b) in kp.points().iter().zip(k.points()) {
            let expect = ProjectivePoint::new(&[b.rep()[1], b.rep()[0], b.rep()[2]]).unwrap();
            assert!(a.chordal_distance(&expect) < 1e-14);
        }

        let mut r = rng::stream(3, "unitary-test");
        let u = rng::unitary(&mut r, 3);
        let ku = k.apply_unitary(&u).unwrap();
        for i in 0..k.len() {
            for j in 0..i {
                let before = k.points()[i].chordal_distance(&k.points()[j]);
                let after = ku.points()[i].chordal_distance(&ku.points()[j]);
                assert!((before - after).abs() < 1e-10);
            }
        }
        let mut skew = id.clone();
        skew[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(k.apply_unitary(&skew), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn sampling_is_deterministic_and_json_roundtrips() {
        let g = CurveGenerator::factorial_gap_series(0.9, 5);
        let a = sample(&g, 64).unwrap();
        let b = sample(&g, 64).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let back: SampledCompactum = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn duplicates_rejected() {
        let p = vec![c(1.0, 0.0), c(0.5, 0.0)];
        let q = vec![c(2.0, 0.0), c(1.0, 0.0)];
        assert!(SampledCompactum::from_points(1, &[p, q]).is_err());
        assert!(SampledCompactum::from_points(1, &[]).is_err());
    }

    #[test]
    fn chordal_distance_small_angles() {
        let a = ProjectivePoint::new(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = ProjectivePoint::new(&[c(1.0, 0.0), c(1e-9, 0.0)]).unwrap();
        assert!((a.chordal_distance(&b) - 1e-9).abs() < 1e-20);
        let e = ProjectivePoint::new(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((a.chordal_distance(&e) - 1.0).abs() < 1e-15);
    }
}
