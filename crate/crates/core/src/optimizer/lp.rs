//! Dense linear programs `max c·x  s.t.  A x <= b`, `x` free, `b >= 0`.
//!
//! The constraint matrices produced by the modulus programs are tall
//! (thousands of rows, tens of columns), so the solver works on the dual
//! `min b·y  s.t.  Aᵀ y = c, y >= 0`, whose basis is only `n × n`. A two-phase
//! revised simplex with an explicit basis inverse runs on that form: Dantzig
//! pricing, a Harris-style ratio test, Bland's rule after a run of degenerate
//! pivots, and periodic reinversion. The primal optimum is read off the
//! simplex multipliers.

use serde::Serialize;

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix { rows: rows.len(), cols, data })
    }

    pub fn with_capacity(cols: usize, rows: usize) -> Self {
        DenseMatrix { rows: 0, cols, data: Vec::with_capacity(rows * cols) }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpOptions {
    /// Feasibility tolerance on reported residuals.
    pub feasibility_tol: f64,
    /// Pivot magnitude below which entries are treated as zero.
    pub pivot_tol: f64,
    /// Reduced-cost optimality tolerance (relative).
    pub optimality_tol: f64,
    pub max_iterations: usize,
    /// Reinvert the basis after this many updates.
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feasibility_tol: 1e-9,
            pivot_tol: 1e-11,
            optimality_tol: 1e-11,
            max_iterations: 50_000,
            refactor_every: 50,
            bland_after: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Unbounded,
    NumericalFailure,
}

/// Condition diagnostics attached to every solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpDiagnostics {
    pub iterations: usize,
    pub refactorizations: usize,
    pub bland_pivots: usize,
    /// `max_i (A x − b)_i`, positive when infeasible.
    pub max_violation: f64,
    /// `|c·x − b·y|`.
    pub duality_gap: f64,
    /// Smallest pivot magnitude accepted.
    pub min_pivot: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub x: Vec<f64>,
    pub diagnostics: LpDiagnostics,
}

fn check_inputs(a: &DenseMatrix, b: &[f64], c: &[f64]) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.len() });
    }
    if c.len() != a.cols() {
        return Err(Error::DimensionMismatch { expected: a.cols(), got: c.len() });
    }
    if let Some(bad) = b.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("right-hand side must be finite and nonnegative, found {bad}")));
    }
    if a.data.iter().chain(c).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite LP data".into()));
    }
    Ok(())
}

/// Solve `max c·x s.t. A x <= b` with `x` free and `b >= 0`.
pub fn solve_lp(a: &DenseMatrix, b: &[f64], c: &[f64], opts: &LpOptions) -> Result<LpSolution> {
    let mut session = LpSession::new(a.clone(), b.to_vec(), c.to_vec(), *opts)?;
    Ok(session.solve())
}

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Stage {
    Fresh,
    Optimal,
    Final,
}

/// An LP that can be re-solved after appending constraint rows.
///
/// Appended rows are new dual columns, so the previous optimal basis stays
/// dual feasible and phase two resumes from it.
#[derive(Debug, Clone)]
pub struct LpSession {
    a: DenseMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    opts: LpOptions,
    n: usize,
    /// sign of the artificial column for each equality row
    art_sign: Vec<f64>,
    /// basis[p] = column index: `j < n` artificial, `j >= n` row `j - n` of A
    basis: Vec<usize>,
    /// position in basis, or NONE
    where_in_basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    phase_one: bool,
    updates_since_refactor: usize,
    diag: LpDiagnostics,
    c_scale: f64,
    /// `c` is stored divided by this, so solutions are exactly scale equivariant.
    c_norm: f64,
    stage: Stage,
    last: Option<LpSolution>,
}

impl LpSession {
    pub fn new(a: DenseMatrix, b: Vec<f64>, c: Vec<f64>, opts: LpOptions) -> Result<Self> {
        check_inputs(&a, &b, &c)?;
        let c_norm = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let c_norm = if c_norm > 0.0 { c_norm } else { 1.0 };
        let c: Vec<f64> = c.iter().map(|v| v / c_norm).collect();
        let m = a.rows();
        let n = a.cols();
        let art_sign: Vec<f64> = c.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let basis: Vec<usize> = (0..n).collect();
        let mut where_in_basis = vec![NONE; m + n];
        for (p, &j) in basis.iter().enumerate() {
            where_in_basis[j] = p;
        }
        let mut binv = vec![0.0; n * n];
        for r in 0..n {
            binv[r * n + r] = art_sign[r];
        }
        let xb = c.iter().map(|v| v.abs()).collect();
        let c_scale = 1.0 + c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Ok(LpSession {
            a,
            b,
            c,
            opts,
            n,
            art_sign,
            basis,
            where_in_basis,
            binv,
            xb,
            phase_one: true,
            updates_since_refactor: 0,
            diag: LpDiagnostics {
                iterations: 0,
                refactorizations: 0,
                bland_pivots: 0,
                max_violation: 0.0,
                duality_gap: 0.0,
                min_pivot: f64::INFINITY,
                message: String::new(),
            },
            c_scale,
            c_norm,
            stage: Stage::Fresh,
            last: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    /// Append constraints `row · x <= rhs`.
    pub fn add_row(&mut self, row: &[f64], rhs: f64) -> Result<()> {
        if row.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: row.len() });
        }
        if !(rhs >= 0.0 && rhs.is_finite()) || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("appended row must be finite with nonnegative right-hand side".into()));
        }
        self.a.push_row(row);
        self.b.push(rhs);
        self.where_in_basis.push(NONE);
        Ok(())
    }

    /// Solve (or re-solve after appended rows).
    pub fn solve(&mut self) -> LpSolution {
        match self.stage {
            Stage::Final => return self.last.clone().expect("final stage stores its solution"),
            Stage::Fresh => {
                if self.n == 0 {
                    return self.settle(LpSolution {
                        status: LpStatus::Optimal,
                        value: 0.0,
                        x: vec![],
                        diagnostics: self.diag.clone(),
                    });
                }
                if let Err(msg) = self.iterate() {
                    return self.fail(format!("phase one: {msg}"));
                }
                if !self.refactor() {
                    return self.fail("singular basis after phase one".into());
                }
                let infeasibility = self.objective();
                if infeasibility > self.opts.feasibility_tol * self.c_scale {
                    self.diag.message = format!("dual infeasible (phase-one residual {infeasibility:.3e}): primal unbounded");
                    return self.settle(LpSolution {
                        status: LpStatus::Unbounded,
                        value: f64::INFINITY,
                        x: vec![f64::NAN; self.n],
                        diagnostics: self.diag.clone(),
                    });
                }
                self.expel_artificials();
                self.phase_one = false;
            }
            Stage::Optimal => {}
        }
        if let Err(msg) = self.iterate() {
            return self.fail(format!("phase two: {msg}"));
        }
        if !self.refactor() {
            return self.fail("singular basis at optimum".into());
        }
        let x = self.multipliers();
        let value: f64 = self.c.iter().zip(&x).map(|(a, b)| a * b).sum();
        let dual_value: f64 = self.objective();
        let mut max_violation = f64::NEG_INFINITY;
        for i in 0..self.a.rows() {
            let lhs: f64 = self.a.row(i).iter().zip(&x).map(|(a, b)| a * b).sum();
            max_violation = max_violation.max(lhs - self.b[i]);
        }
        self.diag.max_violation = max_violation;
        self.diag.duality_gap = (value - dual_value).abs() * self.c_norm;
        let scale = 1.0 + value.abs();
        if max_violation > self.opts.feasibility_tol * scale.max(self.c_scale) {
            return self.fail(format!("primal residual {max_violation:.3e} exceeds tolerance"));
        }
        self.stage = Stage::Optimal;
        LpSolution { status: LpStatus::Optimal, value: value * self.c_norm, x, diagnostics: self.diag.clone() }
    }

    fn settle(&mut self, sol: LpSolution) -> LpSolution {
        self.stage = Stage::Final;
        self.last = Some(sol.clone());
        sol
    }

    fn fail(&mut self, msg: String) -> LpSolution {
        self.diag.message = msg;
        let sol = LpSolution {
            status: LpStatus::NumericalFailure,
            value: f64::NAN,
            x: vec![f64::NAN; self.n],
            diagnostics: self.diag.clone(),
        };
        self.settle(sol)
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        if j >= self.n {
            out.copy_from_slice(self.a.row(j - self.n));
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = self.art_sign[j];
        }
    }

    fn cost(&self, j: usize) -> f64 {
        if self.phase_one {
            if j < self.n {
                1.0
            } else {
                0.0
            }
        } else if j >= self.n {
            self.b[j - self.n]
        } else {
            0.0
        }
    }

    fn multipliers(&self) -> Vec<f64> {
        let n = self.n;
        let mut pi = vec![0.0; n];
        for (p, &j) in self.basis.iter().enumerate() {
            let cb = self.cost(j);
            if cb != 0.0 {
                let row = &self.binv[p * n..(p + 1) * n];
                for r in 0..n {
                    pi[r] += cb * row[r];
                }
            }
        }
        pi
    }

    fn objective(&self) -> f64 {
        self.basis.iter().zip(&self.xb).map(|(&j, &v)| self.cost(j) * v).sum()
    }

    /// Rebuild `B^{-1}` and `x_B` from scratch with partial pivoting.
    fn refactor(&mut self) -> bool {
        let n = self.n;
        let mut bmat = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for (p, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for r in 0..n {
                bmat[r * n + p] = col[r];
            }
        }
        let Some(inv) = invert(&bmat, n) else {
            return false;
        };
        self.binv = inv;
        for p in 0..n {
            let row = &self.binv[p * n..(p + 1) * n];
            self.xb[p] = row.iter().zip(&self.c).map(|(x, y)| x * y).sum();
        }
        self.updates_since_refactor = 0;
        self.diag.refactorizations += 1;
        true
    }

    /// Choose an entering column. Artificials never re-enter once they leave.
    fn price(&self, pi: &[f64], bland: bool) -> Option<usize> {
        let pi_scale = 1.0 + pi.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tol = self.opts.optimality_tol * pi_scale.max(self.c_scale);
        let n = self.n;
        let mut best = NONE;
        let mut best_val = -tol;
        for j in n..n + self.a.rows() {
            if self.where_in_basis[j] != NONE {
                continue;
            }
            let rc = if j >= n {
                let row = self.a.row(j - n);
                self.cost(j) - row.iter().zip(pi).map(|(x, y)| x * y).sum::<f64>()
            } else {
                self.cost(j) - self.art_sign[j] * pi[j]
            };
            if rc < best_val {
                best = j;
                best_val = rc;
                if bland {
                    break;
                }
            }
        }
        (best != NONE).then_some(best)
    }

    fn direction(&self, j: usize) -> Vec<f64> {
        let n = self.n;
        let mut col = vec![0.0; n];
        self.column(j, &mut col);
        (0..n)
            .map(|p| self.binv[p * n..(p + 1) * n].iter().zip(&col).map(|(x, y)| x * y).sum())
            .collect()
    }

    /// Two-pass Harris ratio test; Bland mode breaks ties by smallest column index.
    fn ratio_test(&self, d: &[f64], bland: bool) -> Option<usize> {
        let dmax = d.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let piv_tol = self.opts.pivot_tol * dmax.max(1.0);
        if !self.phase_one {
            // a rank-deficient system leaves artificials basic at zero; they must not move
            let stuck = (0..d.len()).filter(|&p| self.basis[p] < self.n && d[p].abs() > piv_tol);
            if let Some(p) = stuck.max_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs())) {
                return Some(p);
            }
        }
        let delta = self.opts.feasibility_tol * 1e-3;
        let mut theta_max = f64::INFINITY;
        for (p, &dp) in d.iter().enumerate() {
            if dp > piv_tol {
                theta_max = theta_max.min((self.xb[p].max(0.0) + delta) / dp);
            }
        }
        if !theta_max.is_finite() {
            return None;
        }
        let mut best = NONE;
        let mut best_piv = 0.0;
        for (p, &dp) in d.iter().enumerate() {
            if dp > piv_tol && self.xb[p].max(0.0) / dp <= theta_max {
                let better = if bland {
                    best == NONE || self.basis[p] < self.basis[best]
                } else {
                    dp > best_piv
                };
                if better {
                    best = p;
                    best_piv = dp;
                }
            }
        }
        (best != NONE).then_some(best)
    }

    fn pivot(&mut self, p: usize, q: usize, d: &[f64]) {
        let n = self.n;
        let dp = d[p];
        self.diag.min_pivot = self.diag.min_pivot.min(dp.abs());
        let theta = self.xb[p].max(0.0) / dp;
        for i in 0..n {
            if i != p {
                self.xb[i] -= theta * d[i];
                if self.xb[i] < 0.0 && self.xb[i] > -self.opts.feasibility_tol {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[p] = theta;
        let prow: Vec<f64> = self.binv[p * n..(p + 1) * n].iter().map(|v| v / dp).collect();
        for i in 0..n {
            if i == p {
                continue;
            }
            let f = d[i];
            if f != 0.0 {
                let row = &mut self.binv[i * n..(i + 1) * n];
                for r in 0..n {
                    row[r] -= f * prow[r];
                }
            }
        }
        self.binv[p * n..(p + 1) * n].copy_from_slice(&prow);
        let leaving = self.basis[p];
        self.where_in_basis[leaving] = NONE;
        self.basis[p] = q;
        self.where_in_basis[q] = p;
        self.updates_since_refactor += 1;
    }

    /// Iterate the current phase to optimality. `Err` carries a failure message.
    fn iterate(&mut self) -> std::result::Result<(), String> {
        let mut degenerate_run = 0usize;
        loop {
            if self.diag.iterations >= self.opts.max_iterations {
                return Err(format!("iteration limit {} reached", self.opts.max_iterations));
            }
            if self.updates_since_refactor >= self.opts.refactor_every && !self.refactor() {
                return Err("singular basis on reinversion".into());
            }
            let bland = degenerate_run >= self.opts.bland_after;
            let pi = self.multipliers();
            let Some(q) = self.price(&pi, bland) else {
                return Ok(());
            };
            let d = self.direction(q);
            let Some(p) = self.ratio_test(&d, bland) else {
                // b >= 0 bounds both phase objectives below by zero
                return Err("unbounded dual ray (inconsistent with b >= 0)".into());
            };
            if self.basis[p] < self.n && !self.phase_one {
                self.xb[p] = 0.0;
            }
            if self.xb[p].max(0.0) / d[p].abs() <= self.opts.feasibility_tol * 1e-2 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            if bland {
                self.diag.bland_pivots += 1;
            }
            self.pivot(p, q, &d);
            self.diag.iterations += 1;
        }
    }

    /// Pivot zero-level artificials out of the basis where possible.
    fn expel_artificials(&mut self) {
        let n = self.n;
        for p in 0..n {
            if self.basis[p] >= n {
                continue;
            }
            let row: Vec<f64> = self.binv[p * n..(p + 1) * n].to_vec();
            let mut best = NONE;
            let mut best_mag = self.opts.pivot_tol.max(1e-9);
            for i in 0..self.a.rows() {
                if self.where_in_basis[n + i] != NONE {
                    continue;
                }
                let v: f64 = self.a.row(i).iter().zip(&row).map(|(x, y)| x * y).sum();
                if v.abs() > best_mag {
                    best = n + i;
                    best_mag = v.abs();
                }
            }
            if best != NONE {
                let d = self.direction(best);
                // degenerate pivot: x_B[p] is (numerically) zero
                self.xb[p] = 0.0;
                self.pivot(p, best, &d);
                self.diag.iterations += 1;
            }
        }
    }
}

/// Gauss–Jordan inverse with partial pivoting (row-major, `n × n`).
fn invert(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let p = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f != 0.0 {
                for k in 0..n {
                    a[r * n + k] -= f * a[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(rows: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpSolution {
        let a = DenseMatrix::from_rows(rows).unwrap();
        solve_lp(&a, b, c, &LpOptions::default()).unwrap()
    }

    #[test]
    fn one_variable_box() {
        let s = solve(&[vec![1.0], vec![-1.0]], &[1.0, 0.0], &[1.0]);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square() {
        let s = solve(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            &[1.0, 1.0, 0.0, 0.0],
            &[1.0, 1.0],
        );
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let s = solve(&[vec![-1.0]], &[1.0], &[1.0]);
        assert_eq!(s.status, LpStatus::Unbounded);
        assert!(s.value.is_infinite());
    }

    #[test]
    fn degenerate_polygon() {
        // many constraints through the optimum vertex (1, 1)
        let mut rows = Vec::new();
        let mut b = Vec::new();
        for k in 0..12 {
            let t = k as f64 / 11.0;
            rows.push(vec![t, 1.0 - t]);
            b.push(1.0);
        }
        rows.push(vec![-1.0, 0.0]);
        b.push(0.0);
        rows.push(vec![0.0, -1.0]);
        b.push(0.0);
        let s = solve(&rows, &b, &[1.0, 1.0]);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-10, "{}", s.value);
    }

    #[test]
    fn warm_start_after_added_rows() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mut s = LpSession::new(a, vec![2.0, 2.0], vec![1.0, 1.0], LpOptions::default()).unwrap();
        assert!((s.solve().value - 4.0).abs() < 1e-12);
        s.add_row(&[1.0, 1.0], 3.0).unwrap();
        let sol = s.solve();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 3.0).abs() < 1e-12);
        s.add_row(&[1.0, 2.0], 3.0).unwrap();
        let sol = s.solve();
        assert!((sol.value - 2.5).abs() < 1e-12);
        assert!(sol.x[0] * 1.0 + sol.x[1] * 2.0 <= 3.0 + 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(solve_lp(&a, &[-1.0], &[1.0], &LpOptions::default()).is_err());
        assert!(solve_lp(&a, &[1.0, 2.0], &[1.0], &LpOptions::default()).is_err());
    }

    #[test]
    fn regular_polygon_value() {
        // max x over the 16-gon circumscribing the unit disk, vertex-free direction
        let m = 16;
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / m as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let s = solve(&rows, &vec![1.0; m], &[1.0, 0.0]);
        assert!((s.value - 1.0).abs() < 1e-12);
        // vertex direction
        let t = std::f64::consts::PI / m as f64;
        let s = solve(&rows, &vec![1.0; m], &[t.cos(), t.sin()]);
        assert!((s.value - 1.0 / t.cos()).abs() < 1e-12);
    }
}
