//! Discrete Green currents on `P^1` and the mass/extremal-value duality.
//!
//! Conventions: `dd^c log|z| = δ_0`, `∫_{P^1} ω = 1`, so in the chart
//! `dd^c u = (1/2π)·Δu·dA` and `ω = dA / (π(1+|z|²)²)`.
//!
//! The chart disk `|z| <= R` is discretized by a polar finite-volume grid: a
//! centre node plus rings `r_i = i·h` carrying `n_θ` nodes each. Cell weights
//! are the exact Fubini–Study areas of the control volumes.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::Serialize;

use crate::compacta::SampledCompactum;
use crate::error::{Error, Result};
use crate::extremal::truncated_extremal;
use crate::optimizer::SolverConfig;
use crate::poly::{HomogeneousPolynomial, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSurface {
    pub h: f64,
    pub rings: usize,
    pub n_theta: usize,
}

impl DiscreteSurface {
    /// Grid of step `h` covering `|z| <= radius`; `n_θ ≈ 2π/h`, rounded to a multiple of 8.
    pub fn new(h: f64, radius: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite() && radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument("grid step and radius must be positive".into()));
        }
        let rings = (radius / h - 1e-9).ceil().max(2.0) as usize;
        let n_theta = (((TAU / h) / 8.0).round().max(1.0) as usize) * 8;
        if (rings as u128) * (n_theta as u128) > 20_000_000 {
            return Err(Error::InvalidArgument(format!("grid too large: {rings} rings x {n_theta} angles")));
        }
        Ok(DiscreteSurface { h, rings, n_theta })
    }

    pub fn radius(&self) -> f64 {
        self.rings as f64 * self.h
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    pub fn node_count(&self) -> usize {
        1 + self.rings * self.n_theta
    }

    pub fn node(&self, ring: usize, j: usize) -> usize {
        if ring == 0 {
            0
        } else {
            1 + (ring - 1) * self.n_theta + (j % self.n_theta)
        }
    }

    /// `(ring, angular index)`.
    pub fn ring_of(&self, idx: usize) -> (usize, usize) {
        if idx == 0 {
            (0, 0)
        } else {
            (1 + (idx - 1) / self.n_theta, (idx - 1) % self.n_theta)
        }
    }

    pub fn position(&self, idx: usize) -> C64 {
        let (i, j) = self.ring_of(idx);
        C64::from_polar(i as f64 * self.h, self.dtheta() * j as f64)
    }

    /// Fubini–Study area of each control volume; they sum to `R²/(1+R²)`.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.h;
        let f = |r: f64| 1.0 / (1.0 + r * r);
        let mut w = Vec::with_capacity(self.node_count());
        w.push(1.0 - f(0.5 * h));
        for i in 1..=self.rings {
            let r1 = (i as f64 - 0.5) * h;
            let r2 = if i == self.rings { i as f64 * h } else { (i as f64 + 0.5) * h };
            let ring = (f(r1) - f(r2)) / self.n_theta as f64;
            w.extend(std::iter::repeat_n(ring, self.n_theta));
        }
        w
    }

    /// Neighbours with their symmetric finite-volume coupling coefficients.
    pub fn neighbors(&self, idx: usize) -> Vec<(usize, f64)> {
        let h = self.h;
        let dt = self.dtheta();
        if idx == 0 {
            return (0..self.n_theta).map(|j| (self.node(1, j), 0.5 * dt)).collect();
        }
        let (i, j) = self.ring_of(idx);
        let r = i as f64 * h;
        let mut out = Vec::with_capacity(4);
        let inner = if i == 1 { 0.5 * dt } else { (r - 0.5 * h) * dt / h };
        out.push((self.node(i - 1, j), inner));
        if i < self.rings {
            out.push((self.node(i + 1, j), (r + 0.5 * h) * dt / h));
        }
        let ang = h / (r * dt);
        out.push((self.node(i, j + 1), ang));
        out.push((self.node(i, j + self.n_theta - 1), ang));
        out
    }

    /// `(L u)_i = Σ_nb a (u_i − u_nb)`, the negative finite-volume Laplacian integrated over cells.
    pub fn apply_laplacian(&self, u: &[f64]) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| self.neighbors(i).iter().map(|&(nb, a)| a * (u[i] - u[nb])).sum())
            .collect()
    }

    pub fn nearest_node(&self, z: C64) -> usize {
        let i = (z.norm() / self.h).round() as usize;
        if i == 0 {
            return 0;
        }
        let i = i.min(self.rings);
        let mut theta = z.arg();
        if theta < 0.0 {
            theta += TAU;
        }
        let j = (theta / self.dtheta()).round() as usize % self.n_theta;
        self.node(i, j)
    }

    /// Nodes within `tol·max(h, r·Δθ)` of the closed polyline through `points`.
    pub fn nodes_near_closed_curve(&self, points: &[C64], tol: f64) -> Vec<usize> {
        let segs: Vec<(C64, C64)> =
            (0..points.len()).map(|k| (points[k], points[(k + 1) % points.len()])).collect();
        (0..self.node_count())
            .filter(|&idx| {
                let p = self.position(idx);
                let local = tol * self.h.max(p.norm() * self.dtheta());
                segs.iter().any(|&(a, b)| segment_distance(p, a, b) <= local)
            })
            .collect()
    }
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenProblem {
    pub surface: DiscreteSurface,
    pub k_nodes: Vec<usize>,
    pub pole: usize,
    /// Node values, zero on `K` and outside the enclosed region.
    pub u: Vec<f64>,
    /// Boundary measure on `K` nodes (discrete harmonic measure from the pole).
    pub mu: Vec<f64>,
    pub weights: Vec<f64>,
    pub mass: f64,
    /// `‖(1/2π)Δ_h u − (μ − δ_x)‖₁`.
    pub residual: f64,
    pub iterations: usize,
}

const SOLVE_TOL: f64 = 1e-10;

/// Solve `dd^c u = μ − δ_x` with `u = 0` on `K` and outside the component of
/// the complement of `K` containing the pole; `μ` is the resulting flux into `K`.
pub fn solve_green(surface: &DiscreteSurface, k_nodes: &[usize], pole: usize) -> Result<GreenProblem> {
    let count = surface.node_count();
    if pole >= count || k_nodes.iter().any(|&k| k >= count) {
        return Err(Error::InvalidArgument("node index out of range".into()));
    }
    let mut is_k = vec![false; count];
    for &k in k_nodes {
        is_k[k] = true;
    }
    if is_k[pole] {
        return Err(Error::PoleOnK);
    }
    // flood fill the pole's component
    let mut interior = vec![false; count];
    let mut stack = vec![pole];
    interior[pole] = true;
    while let Some(i) = stack.pop() {
        if surface.ring_of(i).0 == surface.rings {
            return Err(Error::NonEnclosing);
        }
        for (nb, _) in surface.neighbors(i) {
            if !is_k[nb] && !interior[nb] {
                interior[nb] = true;
                stack.push(nb);
            }
        }
    }
    let unknowns: Vec<usize> = (0..count).filter(|&i| interior[i]).collect();
    let mut slot = vec![usize::MAX; count];
    for (s, &i) in unknowns.iter().enumerate() {
        slot[i] = s;
    }
    let adj: Vec<Vec<(usize, f64)>> = unknowns.iter().map(|&i| surface.neighbors(i)).collect();
    let diag: Vec<f64> = adj.iter().map(|nbs| nbs.iter().map(|&(_, a)| a).sum()).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for (s, nbs) in adj.iter().enumerate() {
            let mut acc = diag[s] * x[s];
            for &(nb, a) in nbs {
                let t = slot[nb];
                if t != usize::MAX {
                    acc -= a * x[t];
                }
            }
            out[s] = acc;
        }
    };
    let m = unknowns.len();
    let mut b = vec![0.0; m];
    b[slot[pole]] = TAU;
    let (x, iterations) = pcg(&apply, &diag, &b, SOLVE_TOL, 20 * m + 1000)?;

    let mut u = vec![0.0; count];
    for (s, &i) in unknowns.iter().enumerate() {
        u[i] = x[s];
    }
    let lu = surface.apply_laplacian(&u);
    let mut mu = vec![0.0; count];
    let mut residual = 0.0;
    for i in 0..count {
        let delta = if i == pole { 1.0 } else { 0.0 };
        if is_k[i] {
            mu[i] = -lu[i] / TAU;
        } else {
            residual += (lu[i] / TAU - delta).abs();
        }
    }
    let weights = surface.weights();
    let mass = u.iter().zip(&weights).map(|(a, b)| a * b).sum();
    Ok(GreenProblem {
        surface: surface.clone(),
        k_nodes: k_nodes.to_vec(),
        pole,
        u,
        mu,
        weights,
        mass,
        residual,
        iterations,
    })
}

/// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
fn pcg<F: Fn(&[f64], &mut [f64])>(apply: &F, diag: &[f64], b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let m = b.len();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; m];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; m];
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NumericalFailure(format!("CG breakdown at iteration {it}")));
        }
        let alpha = rz / pap;
        for k in 0..m {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Ok((x, it + 1));
        }
        for k in 0..m {
            z[k] = r[k] / diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..m {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::NumericalFailure(format!("CG did not reach {tol:e} in {max_iter} iterations")))
}

impl GreenProblem {
    pub fn min_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mu_total(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// Green field rows: `re, im, u, weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im", "u", "weight"])?;
        for i in 0..self.u.len() {
            let p = self.surface.position(i);
            w.write_record([p.re.to_string(), p.im.to_string(), self.u[i].to_string(), self.weights[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Affine chart-0 sample curve of a compactum in `P^1`.
fn chart_curve(k: &SampledCompactum) -> Result<Vec<C64>> {
    if k.n() != 1 {
        return Err(Error::InvalidArgument(format!("Jensen problems live on P^1, got P^{}", k.n())));
    }
    k.points().iter().map(|p| p.affine(0).map(|a| a[0])).collect()
}

/// Build the surface and solve the Green problem for `K ⊂ P^1` and an affine pole.
pub fn green_for_compactum(k: &SampledCompactum, pole: C64, h: f64) -> Result<GreenProblem> {
    let curve = chart_curve(k)?;
    let extent = curve.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = (1.25 * extent).max(pole.norm() + 2.0 * h);
    let surface = DiscreteSurface::new(h, radius)?;
    let k_nodes = surface.nodes_near_closed_curve(&curve, 0.5);
    let pole_node = surface.nearest_node(pole);
    solve_green(&surface, &k_nodes, pole_node)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub x: C64,
    /// The grid node used as the pole.
    pub pole: C64,
    pub h: f64,
    pub d_max: usize,
    pub enclosing: bool,
    pub mass: Option<f64>,
    pub lam_lo: Option<f64>,
    pub lam_hi: Option<f64>,
    pub gap: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

/// Compare the Green mass at `x` with the degree-`d_max` extremal bracket.
pub fn duality_check(k: &SampledCompactum, x: C64, d_max: usize, h: f64, config: &SolverConfig) -> Result<DualityReport> {
    let mut report = DualityReport {
        x,
        pole: x,
        h,
        d_max,
        enclosing: false,
        mass: None,
        lam_lo: None,
        lam_hi: None,
        gap: None,
        tolerance: None,
        pass: false,
    };
    let problem = match green_for_compactum(k, x, h) {
        Ok(p) => p,
        Err(Error::NonEnclosing) => return Ok(report),
        Err(e) => return Err(e),
    };
    let pole = problem.surface.position(problem.pole);
    let lam = truncated_extremal(k, &crate::compacta::ProjectivePoint::from_affine(0, &[pole])?, d_max, config)?;
    if !lam.is_bracketed() {
        return Err(Error::InterpolationRegime);
    }
    let gap = (problem.mass - lam.lam_mid()).abs();
    let tolerance = 1e-2 + lam.width() + 4.0 * h * h;
    report.pole = pole;
    report.enclosing = true;
    report.mass = Some(problem.mass);
    report.lam_lo = Some(lam.lam_lo);
    report.lam_hi = Some(lam.lam_hi);
    report.gap = Some(gap);
    report.tolerance = Some(tolerance);
    report.pass = gap <= tolerance;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakEntry {
    pub d: usize,
    /// `max_K fs_section_norm <= 1 + 1e-9`.
    pub feasible: bool,
    /// `∫ φ dμ − φ(x)`.
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakReport {
    pub mass: f64,
    pub tolerance: f64,
    pub entries: Vec<WeakEntry>,
    pub failures: Vec<usize>,
}

/// Check `∫ φ dμ − φ(x) >= −mass − tol` for `φ = (1/d)·log‖P‖`.
pub fn weak_inequality_check(problem: &GreenProblem, sections: &[HomogeneousPolynomial], tol: f64) -> Result<WeakReport> {
    let fs = |p: &HomogeneousPolynomial, z: C64| p.fs_section_norm(&[C64::new(1.0, 0.0), z]);
    let mut entries = Vec::with_capacity(sections.len());
    for p in sections {
        if p.n() != 1 || p.degree() == 0 {
            return Err(Error::InvalidArgument("test sections must be degree >= 1 sections on P^1".into()));
        }
        let d = p.degree() as f64;
        let mut sup_k = 0.0f64;
        let mut integral = 0.0;
        for &k in &problem.k_nodes {
            let v = fs(p, problem.surface.position(k))?;
            sup_k = sup_k.max(v);
            if problem.mu[k] > 0.0 {
                integral += problem.mu[k] * v.ln() / d;
            }
        }
        let phi_x = fs(p, problem.surface.position(problem.pole))?.ln() / d;
        let lhs = integral - phi_x;
        let bound = -problem.mass - tol;
        let lhs = if lhs.is_nan() { f64::NEG_INFINITY } else { lhs };
        entries.push(WeakEntry { d: p.degree(), feasible: sup_k <= 1.0 + 1e-9, lhs, bound, pass: lhs >= bound });
    }
    let failures = entries.iter().enumerate().filter(|(_, e)| !e.pass).map(|(i, _)| i).collect();
    Ok(WeakReport { mass: problem.mass, tolerance: tol, entries, failures })
}

/// `∫_{|z|<=1} −log|z| ω_FS = ½ ln 2`.
pub const DISK_GREEN_MASS: f64 = 0.5 * std::f64::consts::LN_2;

/// Analytic Green function of the unit disk with pole `a`.
pub fn disk_green(z: C64, a: C64) -> f64 {
    if z.norm() >= 1.0 {
        return 0.0;
    }
    -(z - a).norm().ln() + (C64::new(1.0, 0.0) - a.conj() * z).norm().ln()
}

/// FS density `1/(π(1+|z|²)²)`.
pub fn fs_density(z: C64) -> f64 {
    1.0 / (PI * (1.0 + z.norm_sqr()).powi(2))
}
