//! Lagrangian forms of the achievable μ-sum problem.
//!
//! Minimizing the Lagrangian over nonnegative multipliers either returns the
//! plain μ-sum (all constraints hold) or runs off to −∞ (some multiplier can
//! grow without bound). [`Extended`] carries that −∞ as a value.

use std::cmp::Ordering;

use serde::Serialize;

use crate::achievable::{DpcAllocation, RatePair};
use crate::channel::CognitiveChannel;
use crate::error::{Error, Result};

/// Relative slack on trace comparisons, so that allocations scaled onto the
/// power boundary are not rejected over rounding.
const TRACE_SLACK: f64 = 1e-12;

fn over(used: f64, budget: f64) -> bool {
    used > budget + TRACE_SLACK * budget.abs().max(1.0)
}

/// A real number or −∞. Only comparison is defined.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub enum Extended {
    NegInfinity,
    Finite(f64),
}

impl Extended {
    pub fn is_neg_infinity(self) -> bool {
        self == Extended::NegInfinity
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::NegInfinity => None,
        }
    }

    pub fn min(self, other: Extended) -> Extended {
        match self.partial_cmp(&other) {
            Some(Ordering::Greater) => other,
            _ => self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangeMultipliers {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl LagrangeMultipliers {
    pub fn new(lambda1: f64, lambda2: f64, lambda: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda1", lambda1),
            ("lambda2", lambda2),
            ("lambda", lambda),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self {
            lambda1,
            lambda2,
            lambda,
            alpha,
        })
    }
}

/// `μR_p + R_c − λ1(Tr Σ_p − P_p) − λ2(Tr(Σ_cp + Σ_cc) − P_c)`.
pub fn lagrangian_l(
    ch: &CognitiveChannel,
    mu: f64,
    a: &DpcAllocation,
    rate: &RatePair,
    m: &LagrangeMultipliers,
) -> f64 {
    rate.mu_sum(mu)
        - m.lambda1 * (a.licensed_power() - ch.p_p())
        - m.lambda2 * (a.cognitive_power() - ch.p_c())
}

/// `μR_p + R_c − λ(Tr Σ_p + α Tr(Σ_cp + Σ_cc) − P_p − αP_c)`.
pub fn lagrangian_l1(
    ch: &CognitiveChannel,
    mu: f64,
    a: &DpcAllocation,
    rate: &RatePair,
    m: &LagrangeMultipliers,
) -> f64 {
    rate.mu_sum(mu) - m.lambda * weighted_excess(ch, a, m.alpha)
}

fn weighted_excess(ch: &CognitiveChannel, a: &DpcAllocation, alpha: f64) -> f64 {
    (a.licensed_power() - ch.p_p()) + alpha * (a.cognitive_power() - ch.p_c())
}

/// Infimum of [`lagrangian_l`] over `λ1, λ2 ≥ 0`.
pub fn lagrangian_g(
    ch: &CognitiveChannel,
    mu: f64,
    a: &DpcAllocation,
    rate: &RatePair,
) -> Extended {
    let licensed_over = over(a.licensed_power(), ch.p_p());
    let cognitive_over = over(a.cognitive_power(), ch.p_c());
    if licensed_over || cognitive_over {
        Extended::NegInfinity
    } else {
        Extended::Finite(rate.mu_sum(mu))
    }
}

/// Infimum of [`lagrangian_l1`] over `λ ≥ 0` at a fixed α.
///
/// `α = 0` and `α = ∞` are accepted as the endpoints of the compactified
/// range: they keep only the licensed or only the cognitive constraint.
pub fn lagrangian_g1(
    ch: &CognitiveChannel,
    mu: f64,
    a: &DpcAllocation,
    rate: &RatePair,
    alpha: f64,
) -> Extended {
    assert!(alpha >= 0.0, "alpha must be in [0, inf], got {alpha}");
    let violated = if alpha == f64::INFINITY {
        over(a.cognitive_power(), ch.p_c())
    } else {
        over(
            a.licensed_power() + alpha * a.cognitive_power(),
            ch.p_p() + alpha * ch.p_c(),
        )
    };
    if violated {
        Extended::NegInfinity
    } else {
        Extended::Finite(rate.mu_sum(mu))
    }
}
