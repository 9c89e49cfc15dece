//! Shared optimization machinery: solver settings, the multi-start ascent
//! engine, Lagrangian forms of the μ-sum problems, brute-force grid oracles,
//! the minimax interchange check and sum-power water-filling.

mod alpha;
mod ascent;
mod kyfan;
mod lagrange;
mod oracle;
mod waterfill;

pub use alpha::{minimize_over_alpha, AlphaSearch};
pub use ascent::golden_min;
pub(crate) use ascent::{maximize, BallGroup, Problem};
pub use kyfan::{kyfan_gap, KyFanReport};
pub use lagrange::{
    lagrangian_g, lagrangian_g1, lagrangian_l, lagrangian_l1, Extended, LagrangeMultipliers,
};
pub use oracle::{
    grid_oracle, grid_oracle_point, oracle_free_params, OracleMode, ORACLE_PARAM_LIMIT,
};
pub use waterfill::{waterfill, WaterFilling};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Random restarts per solve (start 0 is a fixed equal-power point).
    pub starts: usize,
    pub max_iters: usize,
    /// Relative central-difference step.
    pub grad_step: f64,
    /// Stop once per-iteration gains stay below `rel_tol·max(1, |f|)`.
    pub rel_tol: f64,
    pub seed: u64,
    /// Accepted optimality gap in bits (μ-normalized).
    pub gap: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iters: 2000,
            grad_step: 1e-5,
            rel_tol: 1e-9,
            seed: 0,
            gap: 1e-3,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.starts > 0
            && self.max_iters > 0
            && self.grad_step > 0.0
            && self.rel_tol > 0.0
            && self.gap > 0.0
            && self.gap >= self.rel_tol;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "bad solver settings: {self:?}"
            )))
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// μ-sum scaled to "bits of the dominant rate": divides by `max(μ, 1)` so a
/// tolerance means the same thing at μ = 1 and at the μ → ∞ surrogate.
pub fn normalized(value: f64, mu: f64) -> f64 {
    value / mu.max(1.0)
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu >= 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidMu(mu))
    }
}

/// `n` points log-spaced on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` points evenly spaced on `[lo, hi]`.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
