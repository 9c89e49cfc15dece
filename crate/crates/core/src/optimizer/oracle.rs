//! Exhaustive grid search for channels with single-antenna transmitters in
//! real mode.
//!
//! Both rate formulas only grow when PSD mass is added to the joint
//! licensed block, so the optimum spends the whole budget there and the
//! search runs over the remaining free coordinates: the cognitive private
//! power `t`, the power split `s` (outer bound only) and the correlation
//! coefficient `ρ`. Resolution `r` puts `r + 1` evenly spaced points on each
//! axis, so doubling `r` refines the grid without dropping any point.
//!
//! For the rank-one interference `h t h†` the determinant lemma reduces
//! every log-det to a 2×2 problem:
//! `|C + G Σ G†| / |C| = det(I + Σ W)` with `W = G† C⁻¹ G`.

use crate::achievable::{DpcAllocation, RatePair};
use crate::channel::{check_alpha, CognitiveChannel};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, CholeskyParam};

use super::check_mu;
use super::lagrange::{lagrangian_g1, Extended};

/// Largest number of free real parameters the oracle will grid over.
pub const ORACLE_PARAM_LIMIT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMode {
    Achievable,
    PartialOuter { alpha: f64 },
}

/// Free real parameters of the covariance search for this channel.
pub fn oracle_free_params(ch: &CognitiveChannel) -> usize {
    let a = ch.antennas();
    let real = ch.mode().is_real();
    CholeskyParam::len_for(a.n_joint(), real) + CholeskyParam::len_for(a.n_ct, real)
}

/// Grid maximum of `μR_p + R_c`.
pub fn grid_oracle(
    ch: &CognitiveChannel,
    mu: f64,
    resolution: usize,
    mode: OracleMode,
) -> Result<f64> {
    grid_oracle_point(ch, mu, resolution, mode).map(|(v, _)| v)
}

/// Grid maximum together with the rate pair attaining it.
pub fn grid_oracle_point(
    ch: &CognitiveChannel,
    mu: f64,
    resolution: usize,
    mode: OracleMode,
) -> Result<(f64, RatePair)> {
    check_mu(mu)?;
    let params = oracle_free_params(ch);
    if params > ORACLE_PARAM_LIMIT {
        return Err(Error::OracleTooLarge {
            params,
            limit: ORACLE_PARAM_LIMIT,
        });
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument(
            "oracle resolution must be positive".into(),
        ));
    }
    let alpha = match mode {
        OracleMode::Achievable => 1.0,
        OracleMode::PartialOuter { alpha } => {
            check_alpha(alpha)?;
            alpha
        }
    };
    let s = ScalarChannel::new(ch, alpha);
    let scale = ch.mode().rate_scale();
    let r = resolution as f64;

    let mut best = (f64::NEG_INFINITY, RatePair::default());
    let t_max = match mode {
        OracleMode::Achievable => ch.p_c(),
        OracleMode::PartialOuter { .. } => ch.p_p() + alpha * ch.p_c(),
    };
    for i in 0..=resolution {
        let t = t_max * i as f64 / r;
        let w = s.w(t);
        let det = match mode {
            OracleMode::Achievable => {
                let (a, b) = (ch.p_p(), ch.p_c() - t);
                best_over_rho(a, b, &w, resolution)
            }
            OracleMode::PartialOuter { .. } => (0..=resolution)
                .map(|k| {
                    let split = k as f64 / r;
                    let rest = t_max - t;
                    best_over_rho(rest * split, rest * (1.0 - split), &w, resolution)
                })
                .fold(f64::NEG_INFINITY, f64::max),
        };
        let rate = RatePair {
            r_p: (scale * det.log2()).max(0.0),
            r_c: (scale * (1.0 + t * s.hcc_sq / alpha).log2()).max(0.0),
        };
        let value = rate.mu_sum(mu);
        if value > best.0 {
            best = (value, rate);
        }
    }
    Ok(best)
}

/// Grid maximum over an enlarged box of allocations (each transmit power up
/// to 1.5× its budget, in quarter-budget steps) of the infimum of `g1` over
/// the given α values.
pub(crate) fn grid_sup_inf(
    ch: &CognitiveChannel,
    mu: f64,
    resolution: usize,
    alphas: &[f64],
) -> Result<f64> {
    check_mu(mu)?;
    let params = oracle_free_params(ch);
    if params > ORACLE_PARAM_LIMIT {
        return Err(Error::OracleTooLarge {
            params,
            limit: ORACLE_PARAM_LIMIT,
        });
    }
    let s = ScalarChannel::new(ch, 1.0);
    let scale = ch.mode().rate_scale();
    let r = resolution as f64;
    let steps: Vec<f64> = (0..=6).map(|k| 0.25 * k as f64).collect();
    let cells: Vec<(f64, f64)> = steps
        .iter()
        .flat_map(|&a| steps.iter().map(move |&b| (a * ch.p_p(), b * ch.p_c())))
        .collect();
    let per_cell = crate::parallel::map_ordered(cells, |(sp, total)| {
        let mut best = Extended::NegInfinity;
        for i in 0..=resolution {
            let t = total * i as f64 / r;
            let w = s.w(t);
            let r_c = (scale * (1.0 + t * s.hcc_sq).log2()).max(0.0);
            for j in 0..=resolution {
                let rho = -1.0 + 2.0 * j as f64 / r;
                let scp = total - t;
                let q = rho * (sp * scp).max(0.0).sqrt();
                let det = 1.0
                    + sp * w[0]
                    + scp * w[2]
                    + 2.0 * q * w[1]
                    + (sp * scp - q * q) * (w[0] * w[2] - w[1] * w[1]);
                let rate = RatePair {
                    r_p: (scale * det.log2()).max(0.0),
                    r_c,
                };
                let a = DpcAllocation::scalar(sp, scp, t, q).expect("nonnegative grid");
                let inner = alphas
                    .iter()
                    .map(|&alpha| lagrangian_g1(ch, mu, &a, &rate, alpha))
                    .fold(Extended::Finite(f64::INFINITY), Extended::min);
                if inner > best {
                    best = inner;
                }
            }
        }
        best
    });
    Ok(per_cell
        .into_iter()
        .filter_map(Extended::finite)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `max_ρ det(I + Σ W)` over the grid, `Σ = [[a, x], [x, b]]`,
/// `x = ρ√(ab)`, `det = 1 + tr(ΣW) + det Σ · det W`.
fn best_over_rho(a: f64, b: f64, w: &[f64; 3], resolution: usize) -> f64 {
    let [w11, w12, w22] = *w;
    let det_w = w11 * w22 - w12 * w12;
    let root = (a * b).max(0.0).sqrt();
    let base = 1.0 + a * w11 + b * w22;
    let mut best = f64::NEG_INFINITY;
    for j in 0..=resolution {
        let rho = -1.0 + 2.0 * j as f64 / resolution as f64;
        let x = rho * root;
        let d = base + 2.0 * x * w12 + (a * b - x * x) * det_w;
        best = best.max(d);
    }
    best
}

/// Column vectors of a real channel with single-antenna transmitters; the
/// cognitive-to-licensed gain already divided by √α.
struct ScalarChannel {
    gtg: [f64; 3],
    gth: [f64; 2],
    h_sq: f64,
    hcc_sq: f64,
}

impl ScalarChannel {
    fn new(ch: &CognitiveChannel, alpha: f64) -> Self {
        let col = |m: &CMatrix| m.column(0).iter().map(|z| z.re).collect::<Vec<f64>>();
        let g1 = col(ch.h_pp());
        let g2: Vec<f64> = col(ch.h_cp()).iter().map(|v| v / alpha.sqrt()).collect();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let hcc = col(ch.h_cc());
        Self {
            gtg: [dot(&g1, &g1), dot(&g1, &g2), dot(&g2, &g2)],
            gth: [dot(&g1, &g2), dot(&g2, &g2)],
            h_sq: dot(&g2, &g2),
            hcc_sq: dot(&hcc, &hcc),
        }
    }

    /// `G†(I + t h h†)⁻¹G` by Sherman-Morrison, packed as `[w11, w12, w22]`.
    fn w(&self, t: f64) -> [f64; 3] {
        let k = t / (1.0 + t * self.h_sq);
        let [u, v] = self.gth;
        [
            self.gtg[0] - k * u * u,
            self.gtg[1] - k * u * v,
            self.gtg[2] - k * v * v,
        ]
    }
}
