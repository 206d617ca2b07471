//! Dense LP engine and the phase-polygon reduction of modulus programs.

pub mod lp;
pub mod modulus;

use serde::{Deserialize, Serialize};

pub use lp::{solve_lp, DenseMatrix, LpDiagnostics, LpOptions, LpSolution, LpStatus};
pub use modulus::{solve_modulus_program, BracketStatus, BracketedValue, ModulusProgram};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub m_con: usize,
    pub m_obj: usize,
    /// LP feasibility tolerance.
    pub lp_tol: f64,
    /// Cutting-plane rounds after the polygon solve (0 = plain polygon bracket).
    pub refine_rounds: usize,
    /// Relative bracket gap at which refinement stops.
    pub refine_tol: f64,
    #[serde(skip)]
    pub lp: LpOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { m_con: 64, m_obj: 64, lp_tol: 1e-9, refine_rounds: 0, refine_tol: 1e-10, lp: LpOptions::default() }
    }
}

impl SolverConfig {
    pub fn refined(rounds: usize) -> Self {
        SolverConfig { refine_rounds: rounds, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("m_con", self.m_con), ("m_obj", self.m_obj)] {
            if m < 8 || m % 2 != 0 {
                return Err(Error::Config(format!("{name} = {m} must be even and at least 8")));
            }
        }
        if !(self.lp_tol > 0.0 && self.lp_tol < 1e-3) {
            return Err(Error::Config(format!("lp_tol = {} out of range (0, 1e-3)", self.lp_tol)));
        }
        if !(self.refine_tol >= 0.0) {
            return Err(Error::Config("refine_tol must be nonnegative".into()));
        }
        Ok(())
    }

    /// `(1/d)·log(sec(π/M_con)·sec(π/M_obj))`.
    pub fn log_slack(&self, d: usize) -> f64 {
        BracketedValue::certified_ratio(self.m_con, self.m_obj).ln() / d.max(1) as f64
    }

    pub(crate) fn with_lp_tol(mut self) -> Self {
        self.lp.feasibility_tol = self.lp_tol;
        self
    }
}
