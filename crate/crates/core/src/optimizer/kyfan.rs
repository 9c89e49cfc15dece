//! Numerical check that the α-infimum and the allocation-supremum of the
//! α-weighted μ-sum problem can be swapped.
//!
//! * inf-sup: for fixed α the supremum over allocations under the weighted
//!   power constraint is the partial outer bound value `N(α)`; minimize it
//!   over α.
//! * sup-inf: score every allocation by the infimum of `g1` over α on the
//!   compactified range `{0} ∪ (0, ∞) ∪ {∞}`, then maximize the score.

use serde::Serialize;

use super::alpha::minimize_over_alpha;
use super::oracle::{
    grid_oracle, grid_sup_inf, oracle_free_params, OracleMode, ORACLE_PARAM_LIMIT,
};
use super::{check_mu, log_space, normalized, SolverSettings};
use crate::achievable::mu_sum_achievable;
use crate::channel::CognitiveChannel;
use crate::error::Result;
use crate::outer::mu_sum_partial_outer;

/// Grid resolution of the inner searches when the oracle applies.
const INNER_RESOLUTION: usize = 200;
const SUP_INF_RESOLUTION: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KyFanReport {
    pub mu: f64,
    pub sup_inf: f64,
    pub inf_sup: f64,
    /// `|inf_sup − sup_inf| / max(μ, 1)`
    pub gap: f64,
    pub alpha_star: f64,
    /// Whether the inner problems were solved by grid search (`true`) or by
    /// the gradient solvers.
    pub grid: bool,
}

pub fn kyfan_gap(ch: &CognitiveChannel, mu: f64, opts: &SolverSettings) -> Result<KyFanReport> {
    check_mu(mu)?;
    let grid = oracle_free_params(ch) <= ORACLE_PARAM_LIMIT;
    let search = if grid {
        minimize_over_alpha(
            |alpha| grid_oracle(ch, mu, INNER_RESOLUTION, OracleMode::PartialOuter { alpha }),
            1e-3,
            1e3,
        )?
    } else {
        minimize_over_alpha(
            |alpha| mu_sum_partial_outer(ch, alpha, mu, opts).map(|s| s.value),
            1e-3,
            1e3,
        )?
    };

    let sup_inf = if grid {
        let mut alphas = vec![0.0];
        alphas.extend(log_space(1e-4, 1e4, 33));
        alphas.push(f64::INFINITY);
        grid_sup_inf(ch, mu, SUP_INF_RESOLUTION, &alphas)?
    } else {
        // With α ranging over the compactified half-line the infimum of g1 is
        // the μ-sum on the doubly feasible set and −∞ elsewhere.
        mu_sum_achievable(ch, mu, opts)?.value
    };

    Ok(KyFanReport {
        mu,
        sup_inf,
        inf_sup: search.value,
        gap: normalized((search.value - sup_inf).abs(), mu),
        alpha_star: search.alpha_star,
        grid,
    })
}
