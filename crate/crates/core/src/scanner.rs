//! Grid scans of extremal ladders, divergence classification and the
//! harmonicity residual probe along complex lines.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compacta::{ProjectivePoint, SampledCompactum};
use crate::error::{Error, Result};
use crate::extremal::{extremal_profile, truncated_extremal, ExtremalStatus};
use crate::optimizer::SolverConfig;
use crate::poly::C64;

/// The complex line `origin + t·direction` in the affine chart `Z_chart != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineChart {
    pub chart: usize,
    pub origin: Vec<C64>,
    pub direction: Vec<C64>,
}

impl LineChart {
    /// The coordinate line `z_1 = t` of `P^1`.
    pub fn p1() -> Self {
        LineChart { chart: 0, origin: vec![C64::new(0.0, 0.0)], direction: vec![C64::new(1.0, 0.0)] }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.chart > n {
            return Err(Error::InvalidArgument(format!("chart {} out of range for P^{n}", self.chart)));
        }
        if self.origin.len() != n || self.direction.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.origin.len().max(self.direction.len()) });
        }
        if self.direction.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidArgument("line direction must be nonzero".into()));
        }
        Ok(())
    }

    pub fn affine(&self, t: C64) -> Vec<C64> {
        self.origin.iter().zip(&self.direction).map(|(o, v)| o + t * v).collect()
    }

    pub fn point(&self, t: C64) -> Result<ProjectivePoint> {
        ProjectivePoint::from_affine(self.chart, &self.affine(t))
    }
}

/// Parameter grid on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Rect { re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize },
    Polar { r_min: f64, r_max: f64, nr: usize, ntheta: usize },
    Points { points: Vec<C64> },
}

impl GridSpec {
    pub fn nodes(&self) -> Result<Vec<C64>> {
        let lin = |a: f64, b: f64, k: usize, i: usize| if k == 1 { a } else { a + (b - a) * i as f64 / (k - 1) as f64 };
        let nodes: Vec<C64> = match self {
            GridSpec::Rect { re_min, re_max, im_min, im_max, nx, ny } => {
                if *nx == 0 || *ny == 0 || re_min > re_max || im_min > im_max {
                    return Err(Error::InvalidArgument("empty rectangular grid".into()));
                }
                (0..*ny)
                    .flat_map(|j| (0..*nx).map(move |i| C64::new(lin(*re_min, *re_max, *nx, i), lin(*im_min, *im_max, *ny, j))))
                    .collect()
            }
            GridSpec::Polar { r_min, r_max, nr, ntheta } => {
                if *nr == 0 || *ntheta == 0 || !(*r_min >= 0.0 && r_min <= r_max) {
                    return Err(Error::InvalidArgument("empty polar grid".into()));
                }
                (0..*nr)
                    .flat_map(|i| {
                        let r = lin(*r_min, *r_max, *nr, i);
                        (0..*ntheta).map(move |j| C64::from_polar(r, std::f64::consts::TAU * j as f64 / *ntheta as f64))
                    })
                    .collect()
            }
            GridSpec::Points { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidArgument("empty point list".into()));
                }
                points.clone()
            }
        };
        if nodes.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite grid node".into()));
        }
        Ok(nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub tau_conv: f64,
    pub tau_grow: f64,
    /// Chordal distance below which a cell counts as lying on `K`.
    pub on_k: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { tau_conv: 0.02, tau_grow: 0.1, on_k: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Converged,
    Diverging,
    Inconclusive,
    InterpolationRegime,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Converged => "converged",
            Classification::Diverging => "diverging",
            Classification::Inconclusive => "inconclusive",
            Classification::InterpolationRegime => "interpolation_regime",
        }
    }
}

/// One degree of a cell's ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub d: usize,
    pub lam_lo: f64,
    pub lam_hi: f64,
    pub interpolation: bool,
}

/// Classify a ladder by its top half (at least two rungs).
pub fn classify(ladder: &[LadderEntry], thresholds: &Thresholds) -> Classification {
    if ladder.len() < 2 {
        return Classification::Inconclusive;
    }
    let take = ladder.len().div_ceil(2).max(2);
    let top = &ladder[ladder.len() - take..];
    if top.iter().any(|e| e.interpolation) {
        return Classification::InterpolationRegime;
    }
    let lo_max = top.iter().map(|e| e.lam_lo).fold(f64::NEG_INFINITY, f64::max);
    let lo_min = top.iter().map(|e| e.lam_lo).fold(f64::INFINITY, f64::min);
    let hi_finite = top.iter().all(|e| e.lam_hi.is_finite());
    if hi_finite && lo_max - lo_min <= thresholds.tau_conv {
        return Classification::Converged;
    }
    let (first, last) = (top[0], top[top.len() - 1]);
    let doublings = (last.d as f64 / first.d as f64).log2();
    if doublings > 0.0 && (last.lam_lo - first.lam_lo) / doublings >= thresholds.tau_grow {
        return Classification::Diverging;
    }
    Classification::Inconclusive
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell {
    pub index: usize,
    pub t: C64,
    /// Affine coordinates in the chart.
    pub z: Vec<C64>,
    pub ladder: Vec<LadderEntry>,
    pub on_k: bool,
    pub classification: Classification,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanField {
    pub line: LineChart,
    pub grid: GridSpec,
    pub degrees: Vec<usize>,
    pub thresholds: Thresholds,
    pub k_fingerprint: String,
    pub cells: Vec<ScanCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub line: LineChart,
    pub grid: GridSpec,
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn scan_cell(k: &SampledCompactum, spec: &ScanSpec, index: usize, t: C64, config: &SolverConfig) -> ScanCell {
    let z = spec.line.affine(t);
    let mut cell = ScanCell {
        index,
        t,
        z,
        ladder: Vec::new(),
        on_k: false,
        classification: Classification::Inconclusive,
        error: None,
    };
    let x = match spec.line.point(t) {
        Ok(x) => x,
        Err(e) => {
            cell.error = Some(e.to_string());
            return cell;
        }
    };
    cell.on_k = k.distance_to(&x) <= spec.thresholds.on_k;
    match extremal_profile(k, &x, &spec.degrees, config) {
        Ok(results) => {
            cell.ladder = results
                .iter()
                .map(|r| LadderEntry {
                    d: r.d,
                    lam_lo: r.lam_lo,
                    lam_hi: r.lam_hi,
                    interpolation: r.status == ExtremalStatus::InterpolationRegime,
                })
                .collect();
            cell.classification =
                if cell.on_k { Classification::Converged } else { classify(&cell.ladder, &spec.thresholds) };
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

/// Evaluate the extremal ladder at every grid node. Cells run in parallel and
/// are stored in node order.
pub fn scan(k: &SampledCompactum, spec: &ScanSpec, config: &SolverConfig) -> Result<ScanField> {
    spec.line.validate(k.n())?;
    config.validate()?;
    if spec.degrees.is_empty() {
        return Err(Error::InvalidArgument("empty degree list".into()));
    }
    if spec.degrees.windows(2).any(|w| w[0] >= w[1]) || spec.degrees[0] == 0 {
        return Err(Error::InvalidArgument("degrees must be positive and strictly ascending".into()));
    }
    let nodes = spec.grid.nodes()?;
    let cells: Vec<ScanCell> =
        nodes.par_iter().enumerate().map(|(i, &t)| scan_cell(k, spec, i, t, config)).collect();
    Ok(ScanField {
        line: spec.line.clone(),
        grid: spec.grid.clone(),
        degrees: spec.degrees.clone(),
        thresholds: spec.thresholds,
        k_fingerprint: k.fingerprint(),
        cells,
    })
}

impl ScanField {
    pub fn failed_cells(&self) -> Vec<usize> {
        self.cells.iter().filter(|c| c.error.is_some()).map(|c| c.index).collect()
    }

    /// One row per (cell, degree): `re_z*, im_z*, d, lam_lo, lam_hi, status`,
    /// where `status` is the cell classification (or `failed`).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.line.origin.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=n).map(|i| format!("re_z{i}")).collect();
        header.extend((1..=n).map(|i| format!("im_z{i}")));
        header.extend(["d", "lam_lo", "lam_hi", "status"].map(String::from));
        w.write_record(&header)?;
        for cell in &self.cells {
            let status = if cell.error.is_some() { "failed" } else { cell.classification.as_str() };
            let coords: Vec<String> =
                cell.z.iter().map(|c| c.re.to_string()).chain(cell.z.iter().map(|c| c.im.to_string())).collect();
            if cell.ladder.is_empty() {
                for &d in &self.degrees {
                    let mut row = coords.clone();
                    row.extend([d.to_string(), "nan".into(), "nan".into(), status.into()]);
                    w.write_record(&row)?;
                }
            }
            for e in &cell.ladder {
                let mut row = coords.clone();
                row.extend([e.d.to_string(), e.lam_lo.to_string(), e.lam_hi.to_string(), status.into()]);
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Sidecar manifest: `{chart, grid, degrees, thresholds, k_fingerprint, cells}`.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "chart": self.line,
            "grid": self.grid,
            "degrees": self.degrees,
            "thresholds": self.thresholds,
            "k_fingerprint": self.k_fingerprint,
            "cells": self.cells.iter().map(|c| serde_json::json!({
                "index": c.index,
                "t": c.t,
                "on_k": c.on_k,
                "classification": c.classification,
                "error": c.error,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StencilNode {
    pub t: C64,
    pub v0: f64,
    pub laplacian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicityReport {
    pub h: f64,
    pub d: usize,
    pub nodes: Vec<StencilNode>,
    pub max_residual: f64,
}

/// `V⁰(t) = lam_mid + ½·log(1 + ‖z(t)‖²)`, the affine-class extremal value.
fn affine_extremal_value(k: &SampledCompactum, line: &LineChart, t: C64, d: usize, config: &SolverConfig) -> Result<f64> {
    let x = line.point(t)?;
    let r = truncated_extremal(k, &x, d, config)?;
    if !r.is_bracketed() {
        return Err(Error::InterpolationRegime);
    }
    let z = line.affine(t);
    Ok(r.lam_mid() + 0.5 * (1.0 + z.iter().map(|c| c.norm_sqr()).sum::<f64>()).ln())
}

/// Five-point Laplacian `Δ_h V⁰` at each stencil center. The centers are
/// fixed so successive step sizes probe the same interior nodes.
pub fn harmonicity_residual(
    k: &SampledCompactum,
    line: &LineChart,
    centers: &[C64],
    h: f64,
    d: usize,
    config: &SolverConfig,
    on_k: f64,
) -> Result<HarmonicityReport> {
    line.validate(k.n())?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument("stencil step must be positive".into()));
    }
    if centers.is_empty() {
        return Err(Error::InvalidArgument("no stencil centers".into()));
    }
    let offsets = [C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0), C64::new(0.0, h), C64::new(0.0, -h)];
    for c in centers {
        for o in &offsets {
            let x = line.point(c + o)?;
            if k.distance_to(&x) <= on_k {
                return Err(Error::InvalidArgument(format!("stencil node {} touches K", c + o)));
            }
        }
    }
    let nodes = centers
        .par_iter()
        .map(|&c| {
            let v: Vec<f64> =
                offsets.iter().map(|o| affine_extremal_value(k, line, c + o, d, config)).collect::<Result<_>>()?;
            Ok(StencilNode { t: c, v0: v[0], laplacian: (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h) })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = nodes.iter().map(|n| n.laplacian.abs()).fold(0.0, f64::max);
    Ok(HarmonicityReport { h, d, nodes, max_residual })
}

/// Five-point residual of a field given as a closure (used for checks on
/// closed-form inputs).
pub fn stencil_residual<F: Fn(C64) -> f64>(f: F, centers: &[C64], h: f64) -> f64 {
    centers
        .iter()
        .map(|&c| {
            let s = f(c + h) + f(c - h) + f(c + C64::new(0.0, h)) + f(c - C64::new(0.0, h)) - 4.0 * f(c);
            (s / (h * h)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compacta::{sample, CurveGenerator};

    fn entry(d: usize, lo: f64) -> LadderEntry {
        LadderEntry { d, lam_lo: lo, lam_hi: lo + 1e-4, interpolation: false }
    }

    #[test]
    fn classify_examples() {
        let th = Thresholds::default();
        let flat: Vec<_> = [1, 2, 4, 8].iter().map(|&d| entry(d, 0.3466)).collect();
        assert_eq!(classify(&flat, &th), Classification::Converged);
        let growing: Vec<_> = [1, 2, 4, 8, 16].iter().map(|&d| entry(d, 0.1 * (d as f64).log2())).collect();
        assert_eq!(classify(&growing, &Thresholds { tau_grow: 0.05, ..th }), Classification::Diverging);
        assert_eq!(classify(&flat[..1], &th), Classification::Inconclusive);
        let mut interp = flat.clone();
        interp[3].interpolation = true;
        assert_eq!(classify(&interp, &th), Classification::InterpolationRegime);
    }

    #[test]
    fn circle_scan_matches_oracle() {
        let k = sample(&CurveGenerator::unit_circle(), 128).unwrap();
        let spec = ScanSpec {
            line: LineChart::p1(),
            grid: GridSpec::Polar { r_min: 0.0, r_max: 3.0, nr: 4, ntheta: 3 },
            degrees: vec![2, 4, 8],
            thresholds: Thresholds::default(),
        };
        let field = scan(&k, &spec, &SolverConfig::default()).unwrap();
        assert_eq!(field.cells.len(), 12);
        for c in &field.cells {
            assert_eq!(c.classification, Classification::Converged, "{c:?}");
            let r = c.t.norm();
            let oracle = r.max(1.0).ln() - 0.5 * ((1.0 + r * r) / 2.0).ln();
            let last = c.ladder.last().unwrap();
            assert!((0.5 * (last.lam_lo + last.lam_hi) - oracle).abs() < 1e-2);
        }
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 12 * 3);
        assert!(text.starts_with("re_z1,im_z1,d,lam_lo,lam_hi,status"));
    }

    #[test]
    fn empty_degrees_rejected() {
        let k = sample(&CurveGenerator::unit_circle(), 16).unwrap();
        let spec = ScanSpec {
            line: LineChart::p1(),
            grid: GridSpec::Points { points: vec![C64::new(0.0, 0.0)] },
            degrees: vec![],
            thresholds: Thresholds::default(),
        };
        assert!(scan(&k, &spec, &SolverConfig::default()).is_err());
    }

    #[test]
    fn constant_field_has_zero_residual() {
        let centers = [C64::new(1.5, 0.0), C64::new(0.0, -1.7)];
        assert_eq!(stencil_residual(|_| 0.25, &centers, 0.1), 0.0);
        assert!(stencil_residual(|t| t.norm().ln(), &centers, 0.05) < 1e-3);
    }

    #[test]
    fn stencil_touching_k_rejected() {
        let k = sample(&CurveGenerator::unit_circle(), 16).unwrap();
        let r = harmonicity_residual(&k, &LineChart::p1(), &[C64::new(1.1, 0.0)], 0.1, 2, &SolverConfig::default(), 1e-6);
        assert!(r.is_err());
    }
}
