//! Modulus-constrained complex programs reduced to LP brackets.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::lp::{DenseMatrix, LpSession, LpStatus};
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::poly::C64;

/// `sup |<c, objective>|` subject to `|<c, constraints[j]>| <= 1` for all `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusProgram {
    pub objective: Vec<C64>,
    pub constraints: Vec<Vec<C64>>,
    pub m_con: usize,
    pub m_obj: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketStatus {
    Bracketed,
    /// The constraints do not bound the objective: value `+∞`.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketedValue {
    pub lo: f64,
    pub hi: f64,
    /// Feasible for the true modulus constraints, objective modulus `>= lo`.
    pub witness: Vec<C64>,
    pub status: BracketStatus,
    pub lp_solves: usize,
    pub cuts: usize,
}

impl BracketedValue {
    /// `sec(π/M_con)·sec(π/M_obj)`.
    pub fn certified_ratio(m_con: usize, m_obj: usize) -> f64 {
        1.0 / ((PI / m_con as f64).cos() * (PI / m_obj as f64).cos())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn dot(c: &[C64], v: &[C64]) -> C64 {
    c.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Row encoding `Re(e^{iφ} <c, v>)` in the real variables `(Re c, Im c)`.
fn realified_row(v: &[C64], phase: C64, out: &mut [f64]) {
    let len = v.len();
    for (k, vk) in v.iter().enumerate() {
        let r = phase * vk;
        out[k] = r.re;
        out[len + k] = -r.im;
    }
}

impl ModulusProgram {
    pub fn new(objective: Vec<C64>, constraints: Vec<Vec<C64>>, m_con: usize, m_obj: usize) -> Result<Self> {
        let p = ModulusProgram { objective, constraints, m_con, m_obj };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("M_con", self.m_con), ("M_obj", self.m_obj)] {
            if m < 8 || m % 2 != 0 {
                return Err(Error::InvalidArgument(format!("{name} = {m} must be even and at least 8")));
            }
        }
        if self.constraints.is_empty() {
            return Err(Error::InvalidArgument("modulus program needs at least one constraint".into()));
        }
        let len = self.objective.len();
        if len == 0 {
            return Err(Error::InvalidArgument("empty coefficient space".into()));
        }
        if let Some(row) = self.constraints.iter().find(|r| r.len() != len) {
            return Err(Error::DimensionMismatch { expected: len, got: row.len() });
        }
        let finite = |c: &C64| c.re.is_finite() && c.im.is_finite();
        if !self.objective.iter().all(finite) || !self.constraints.iter().flatten().all(finite) {
            return Err(Error::InvalidArgument("non-finite program data".into()));
        }
        Ok(())
    }

    fn polygon(&self) -> DenseMatrix {
        let len = self.objective.len();
        let mut a = DenseMatrix::with_capacity(2 * len, self.constraints.len() * self.m_con);
        let mut row = vec![0.0; 2 * len];
        let phases: Vec<C64> = (0..self.m_con).map(|k| C64::from_polar(1.0, TAU * k as f64 / self.m_con as f64)).collect();
        for v in &self.constraints {
            for &ph in &phases {
                realified_row(v, ph, &mut row);
                a.push_row(&row);
            }
        }
        a
    }
}

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-12;
/// Floor for the relative size of the objective's component on the null space
/// that reads as unbounded. The working tolerance also covers the angle error
/// `~ ε σ_max / σ_min` of the computed null space.
pub const NULL_TOL: f64 = 1e-8;

/// The program in whitened coordinates `u = Σ W* c`, where `V = U Σ W*` is the
/// thin SVD of the constraint matrix. Constraint vectors become rows of `U`.
struct Whitened {
    program: ModulusProgram,
    /// `c = back · u`
    back: DMatrix<C64>,
}

fn whiten(prog: &ModulusProgram) -> Result<Option<Whitened>> {
    let m = prog.constraints.len();
    let len = prog.objective.len();
    let v = DMatrix::from_fn(m, len, |i, k| prog.constraints[i][k]);
    let svd = v.svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::NumericalFailure("SVD of the constraint matrix failed".into()));
    };
    let sigma = &svd.singular_values;
    let smax = sigma.iter().fold(0.0f64, |acc, s| acc.max(*s));
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > RANK_TOL * smax).collect();
    let a = DVector::from_column_slice(&prog.objective);
    let a_norm = a.norm();
    let w_r = v_t.select_rows(&keep);
    let conj_a = a.conjugate();
    let residual = &conj_a - w_r.adjoint() * (&w_r * &conj_a);
    let smin = keep.iter().map(|&i| sigma[i]).fold(f64::INFINITY, f64::min);
    let tol = NULL_TOL.max(64.0 * f64::EPSILON * smax / smin);
    if a_norm > 0.0 && residual.norm() > tol * a_norm {
        return Ok(None);
    }
    let inv: Vec<f64> = keep.iter().map(|&i| 1.0 / sigma[i]).collect();
    let back = DMatrix::from_fn(len, keep.len(), |k, j| w_r[(j, k)].conj() * inv[j]);
    let objective: Vec<C64> = (0..keep.len()).map(|j| (0..len).map(|k| prog.objective[k] * back[(k, j)]).sum()).collect();
    let constraints: Vec<Vec<C64>> = (0..m).map(|i| keep.iter().map(|&j| u[(i, j)]).collect()).collect();
    Ok(Some(Whitened {
        program: ModulusProgram { objective, constraints, m_con: prog.m_con, m_obj: prog.m_obj },
        back,
    }))
}

fn unbounded(lp_solves: usize, cuts: usize) -> BracketedValue {
    BracketedValue { lo: f64::INFINITY, hi: f64::INFINITY, witness: Vec::new(), status: BracketStatus::Unbounded, lp_solves, cuts }
}

struct Probe {
    lp_value: f64,
    witness: Vec<C64>,
    ratio: f64,
}

/// Bracket the modulus program value.
///
/// The program is first rewritten in whitened coordinates (a complex-linear
/// change of variables, so the phase polygons are unchanged). An objective
/// with a component on the null space of the constraints is unbounded.
pub fn solve_modulus_program(prog: &ModulusProgram, config: &SolverConfig) -> Result<BracketedValue> {
    prog.validate()?;
    let Some(w) = whiten(prog)? else {
        return Ok(unbounded(0, 0));
    };
    let mut r = solve_whitened(&w.program, config)?;
    if r.status == BracketStatus::Bracketed {
        let u = DVector::from_column_slice(&r.witness);
        let c = &w.back * u;
        let scale = prog.constraints.iter().map(|v| dot(c.as_slice(), v).norm()).fold(0.0, f64::max);
        let obj = dot(c.as_slice(), &prog.objective).norm();
        if scale > 0.0 {
            r.witness = c.iter().map(|x| x / scale).collect();
            r.lo = (obj / scale).min(r.hi);
        } else {
            r.witness = c.iter().copied().collect();
        }
    }
    Ok(r)
}

///
/// The constraint polygon is invariant under `c ↦ e^{2πi/M_con} c`, so the
/// directional LP values repeat with that period and only
/// `M_obj / gcd(M_obj, M_con)` directions need solving. Every directional LP
/// value is an upper bound; `hi` is their minimum. Each LP optimum rescaled
/// into the true disks is a feasible witness; `lo` is the best of them.
/// `config.refine_rounds > 0` adds tangent cuts at violated samples and re-solves.
fn solve_whitened(prog: &ModulusProgram, config: &SolverConfig) -> Result<BracketedValue> {
    let len = prog.objective.len();
    let base = prog.polygon();
    let directions = prog.m_obj / gcd(prog.m_obj, prog.m_con);
    let opts = config.with_lp_tol().lp;

    let mut hi = f64::INFINITY;
    let mut best: Option<Probe> = None;
    let mut lp_solves = 0;
    let mut cuts = 0;

    for k in 0..directions {
        let theta = C64::from_polar(1.0, TAU * k as f64 / prog.m_obj as f64);
        let mut c = vec![0.0; 2 * len];
        realified_row(&prog.objective, theta, &mut c);
        let rows = base.rows();
        let mut session = LpSession::new(base.clone(), vec![1.0; rows], c, opts)?;
        let mut round = 0;
        loop {
            let sol = session.solve();
            lp_solves += 1;
            match sol.status {
                LpStatus::Unbounded => return Ok(unbounded(lp_solves, cuts)),
                LpStatus::NumericalFailure => {
                    return Err(Error::NumericalFailure(format!(
                        "modulus LP: {} (iterations {}, min pivot {:.3e})",
                        sol.diagnostics.message, sol.diagnostics.iterations, sol.diagnostics.min_pivot
                    )))
                }
                LpStatus::Optimal => {}
            }
            hi = hi.min(sol.value);
            let coeffs: Vec<C64> = (0..len).map(|i| C64::new(sol.x[i], sol.x[len + i])).collect();
            let values: Vec<C64> = prog.constraints.iter().map(|v| dot(&coeffs, v)).collect();
            let scale = values.iter().map(|w| w.norm()).fold(0.0, f64::max);
            let obj = dot(&coeffs, &prog.objective).norm();
            let ratio = if scale > 0.0 { obj / scale } else { f64::INFINITY };
            if best.as_ref().is_none_or(|p| ratio > p.ratio) {
                best = Some(Probe { lp_value: sol.value, witness: coeffs.clone(), ratio });
            }
            let lo_now = best.as_ref().map_or(0.0, |p| p.ratio);
            if round >= config.refine_rounds || hi - lo_now <= config.refine_tol * lo_now.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            let mut row = vec![0.0; 2 * len];
            let mut added = 0;
            for (v, w) in prog.constraints.iter().zip(&values) {
                if w.norm() > 1.0 + 1e-13 {
                    realified_row(v, w.conj() / w.norm(), &mut row);
                    session.add_row(&row, 1.0)?;
                    added += 1;
                }
            }
            cuts += added;
            if added == 0 {
                break;
            }
            round += 1;
        }
    }

    let probe = best.expect("at least one direction solved");
    let scale = if probe.ratio.is_finite() && probe.ratio > 0.0 {
        let s = prog.constraints.iter().map(|v| dot(&probe.witness, v).norm()).fold(0.0, f64::max);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    } else {
        1.0
    };
    let witness: Vec<C64> = probe.witness.iter().map(|c| c / scale).collect();
    let lo = if probe.ratio.is_finite() { probe.ratio } else { probe.lp_value };
    Ok(BracketedValue { lo: lo.min(hi), hi, witness, status: BracketStatus::Bracketed, lp_solves, cuts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: usize) -> SolverConfig {
        SolverConfig { m_con: m, m_obj: m, ..SolverConfig::default() }
    }

    #[test]
    fn single_disk() {
        for m in [8, 16, 64] {
            let prog = ModulusProgram::new(vec![C64::new(1.0, 0.0)], vec![vec![C64::new(1.0, 0.0)]], m, m).unwrap();
            let r = solve_modulus_program(&prog, &cfg(m)).unwrap();
            let sec = 1.0 / (PI / m as f64).cos();
            assert!(r.lo >= 1.0 / sec - 1e-12 && r.lo <= 1.0 + 1e-12, "{r:?}");
            assert!(r.hi >= 1.0 - 1e-12 && r.hi <= sec + 1e-12, "{r:?}");
            assert!(r.hi / r.lo <= BracketedValue::certified_ratio(m, m) + 1e-9);
        }
    }

    #[test]
    fn doubled_objective() {
        let prog = ModulusProgram::new(vec![C64::new(0.0, 2.0)], vec![vec![C64::new(1.0, 0.0)]], 64, 64).unwrap();
        let r = solve_modulus_program(&prog, &cfg(64)).unwrap();
        assert!(r.lo <= 2.0 + 1e-12 && r.hi >= 2.0 - 1e-12);
        assert!(r.hi / r.lo <= BracketedValue::certified_ratio(64, 64) + 1e-9);
        let w = r.witness[0].norm();
        assert!(w <= 1.0 + 1e-9 && 2.0 * w >= r.lo - 1e-9);
    }

    #[test]
    fn unbounded_when_unconstrained_direction() {
        let prog = ModulusProgram::new(
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]],
            16,
            16,
        )
        .unwrap();
        let r = solve_modulus_program(&prog, &cfg(16)).unwrap();
        assert_eq!(r.status, BracketStatus::Unbounded);
        assert!(r.hi.is_infinite());
    }

    #[test]
    fn rejects_bad_phase_counts() {
        assert!(ModulusProgram::new(vec![C64::new(1.0, 0.0)], vec![vec![C64::new(1.0, 0.0)]], 6, 8).is_err());
        assert!(ModulusProgram::new(vec![C64::new(1.0, 0.0)], vec![vec![C64::new(1.0, 0.0)]], 8, 9).is_err());
        assert!(ModulusProgram::new(vec![C64::new(1.0, 0.0)], vec![], 8, 8).is_err());
    }

    #[test]
    fn refinement_tightens() {
        // sup |a + b/2| s.t. |a + b e^{iθ_j}| <= 1 on a coarse circle sample
        let constraints: Vec<Vec<C64>> =
            (0..24).map(|j| vec![C64::new(1.0, 0.0), C64::from_polar(1.0, TAU * j as f64 / 24.0)]).collect();
        let objective = vec![C64::new(1.0, 0.0), C64::new(0.5, 0.0)];
        let prog = ModulusProgram::new(objective, constraints, 16, 16).unwrap();
        let coarse = solve_modulus_program(&prog, &cfg(16)).unwrap();
        let fine = solve_modulus_program(&prog, &SolverConfig { refine_rounds: 30, refine_tol: 1e-12, ..cfg(16) }).unwrap();
        assert!(fine.hi - fine.lo <= coarse.hi - coarse.lo + 1e-12);
        assert!(fine.hi - fine.lo < 1e-7, "{fine:?}");
        assert!(fine.lo >= coarse.lo - 1e-12 && fine.hi <= coarse.hi + 1e-12);
    }
}
