//! Outer bounds on the cognitive channel's capacity region.
//!
//! For a scaling α > 0 the cognitive transmitter's gains are divided by √α
//! and its power multiplied by α, and both transmitters are allowed to
//! cooperate under the sum budget `P_p + αP_c`. That gives a two-user
//! broadcast channel `(G_α, K)`. The full bound additionally hands the
//! cognitive receiver a copy of the licensed output whose noise is coupled
//! to its own through `Σ_z`; the partial bound restricts the cognitive
//! covariance to `diag(0, Σ_cc)`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::achievable::{tag_mu, MuSumSolution, RatePair};
use crate::boundary::{matrix_json, BoundaryPoint, RegionBoundary, Witness};
use crate::channel::{check_alpha, composite_matrices, CognitiveChannel};
use crate::error::{Error, Result};
use crate::matrix::{
    gram, log_det_id_plus, log_det_pd, lower_from_values, CMatrix, CholeskyParam, HermitianMatrix,
    PsdMatrix, PSD_TOL,
};
use crate::optimizer::{
    check_mu, golden_min, maximize, minimize_over_alpha, normalized, AlphaSearch, BallGroup,
    Problem, SolverSettings,
};
use crate::parallel;

/// Σ_z must keep this much definiteness during the coupling search.
pub const SIGMA_Z_MARGIN: f64 = 1e-6;

/// Cross-covariance between the genie copy of the licensed noise and the
/// cognitive receiver's noise.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCoupling {
    pub q_z: CMatrix,
}

impl NoiseCoupling {
    pub fn new(q_z: CMatrix) -> Result<Self> {
        let nz = Self { q_z };
        let min = nz.sigma_z().min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidArgument(format!(
                "noise coupling leaves Σ_z indefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(nz)
    }

    pub fn zero(n_pr: usize, n_cr: usize) -> Self {
        Self {
            q_z: CMatrix::zeros(n_pr, n_cr),
        }
    }

    /// `[[I, Q_z], [Q_z†, I]]`
    pub fn sigma_z(&self) -> HermitianMatrix {
        let (p, c) = self.q_z.shape();
        let mut m = CMatrix::identity(p + c, p + c);
        m.view_mut((0, p), (p, c)).copy_from(&self.q_z);
        m.view_mut((p, 0), (c, p)).copy_from(&self.q_z.adjoint());
        HermitianMatrix::new(m).expect("square")
    }
}

/// Joint covariances for the licensed and cognitive codewords of the
/// cooperating transmitter, both `(n_pt + n_ct)`-square.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterAllocation {
    pub q_p: PsdMatrix,
    pub q_c: PsdMatrix,
}

impl Witness for OuterAllocation {
    fn to_json(&self) -> Value {
        json!({
            "q_p": matrix_json(self.q_p.as_matrix()),
            "q_c": matrix_json(self.q_c.as_matrix()),
        })
    }
}

/// The partial bound's allocation: a joint licensed covariance and the
/// cognitive private covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialOuterAllocation {
    pub q_p: PsdMatrix,
    pub sigma_cc: PsdMatrix,
}

impl PartialOuterAllocation {
    /// `diag(0, Σ_cc)` in the joint transmit space.
    pub fn structured_q_c(&self) -> PsdMatrix {
        let n = self.q_p.dim();
        let c = self.sigma_cc.dim();
        let mut m = CMatrix::zeros(n, n);
        m.view_mut((n - c, n - c), (c, c))
            .copy_from(self.sigma_cc.as_matrix());
        PsdMatrix::from_trusted(HermitianMatrix::new(m).expect("square"))
    }

    pub fn to_outer(&self) -> OuterAllocation {
        OuterAllocation {
            q_p: self.q_p.clone(),
            q_c: self.structured_q_c(),
        }
    }
}

impl Witness for PartialOuterAllocation {
    fn to_json(&self) -> Value {
        json!({
            "q_p": matrix_json(self.q_p.as_matrix()),
            "sigma_cc": matrix_json(self.sigma_cc.as_matrix()),
        })
    }
}

fn check_sum_power(ch: &CognitiveChannel, alpha: f64, used: f64) -> Result<()> {
    let budget = ch.p_p() + alpha * ch.p_c();
    if used > budget + PSD_TOL * budget.max(1.0) {
        return Err(Error::InfeasibleAllocation(format!(
            "sum power {used} exceeds P_p + αP_c = {budget}"
        )));
    }
    Ok(())
}

fn check_dims(expected: usize, blocks: &[(&str, usize)]) -> Result<()> {
    for (name, d) in blocks {
        if *d != expected {
            return Err(Error::DimensionMismatch(format!(
                "{name} is {d}-square, expected {expected}"
            )));
        }
    }
    Ok(())
}

struct PartialKernel {
    g_alpha: CMatrix,
    h_cp: CMatrix,
    h_cc: CMatrix,
    scale: f64,
}

impl PartialKernel {
    fn new(ch: &CognitiveChannel, alpha: f64) -> Result<Self> {
        let m = composite_matrices(ch, alpha)?;
        let s = crate::matrix::c(1.0 / alpha.sqrt());
        Ok(Self {
            g_alpha: m.g_alpha,
            h_cp: ch.h_cp() * s,
            h_cc: ch.h_cc() * s,
            scale: ch.mode().rate_scale(),
        })
    }

    fn rates(&self, q_p: &HermitianMatrix, sigma_cc: &HermitianMatrix) -> Result<RatePair> {
        let interference = HermitianMatrix::congruence(&self.h_cp, sigma_cc)?;
        let signal = HermitianMatrix::congruence(&self.g_alpha, q_p)?;
        let r_p = log_det_id_plus(&signal.add(&interference)?)? - log_det_id_plus(&interference)?;
        let r_c = log_det_id_plus(&HermitianMatrix::congruence(&self.h_cc, sigma_cc)?)?;
        Ok(RatePair {
            r_p: (self.scale * r_p).max(0.0),
            r_c: (self.scale * r_c).max(0.0),
        })
    }
}

/// Broadcast rates with the licensed message encoded first; `k_bar` and
/// `sigma_z` switch on the genie-aided cognitive receiver.
struct BcKernel {
    g_alpha: CMatrix,
    k: CMatrix,
    genie: Option<(HermitianMatrix, f64)>,
    scale: f64,
}

impl BcKernel {
    fn new(ch: &CognitiveChannel, alpha: f64, nz: Option<&NoiseCoupling>) -> Result<Self> {
        let m = composite_matrices(ch, alpha)?;
        let (k, genie) = match nz {
            None => (m.k, None),
            Some(nz) => {
                let sz = nz.sigma_z();
                let a = ch.antennas();
                if sz.dim() != a.n_pr + a.n_cr {
                    return Err(Error::DimensionMismatch(format!(
                        "Q_z is {}x{}, expected {}x{}",
                        nz.q_z.nrows(),
                        nz.q_z.ncols(),
                        a.n_pr,
                        a.n_cr
                    )));
                }
                if sz.min_eigenvalue() <= PSD_TOL {
                    return Err(Error::SingularSigmaZ);
                }
                let ld = log_det_pd(&sz).map_err(|_| Error::SingularSigmaZ)?;
                (m.k_bar, Some((sz, ld)))
            }
        };
        Ok(Self {
            g_alpha: m.g_alpha,
            k,
            genie,
            scale: ch.mode().rate_scale(),
        })
    }

    fn rates(&self, q_p: &HermitianMatrix, q_c: &HermitianMatrix) -> Result<RatePair> {
        let gc = HermitianMatrix::congruence(&self.g_alpha, q_c)?;
        let gp = HermitianMatrix::congruence(&self.g_alpha, q_p)?;
        let r_p = log_det_id_plus(&gp.add(&gc)?)? - log_det_id_plus(&gc)?;
        let kc = HermitianMatrix::congruence(&self.k, q_c)?;
        let r_c = match &self.genie {
            None => log_det_id_plus(&kc)?,
            Some((sz, ld)) => log_det_pd(&sz.add(&kc)?)? - ld,
        };
        Ok(RatePair {
            r_p: (self.scale * r_p).max(0.0),
            r_c: (self.scale * r_c).max(0.0),
        })
    }
}

/// Rate pair of the partial outer bound for `(Q_p, Σ_cc)`.
pub fn partial_outer_rates(
    ch: &CognitiveChannel,
    alpha: f64,
    q_p: &PsdMatrix,
    sigma_cc: &PsdMatrix,
) -> Result<RatePair> {
    check_alpha(alpha)?;
    let a = ch.antennas();
    check_dims(a.n_joint(), &[("Q_p", q_p.dim())])?;
    check_dims(a.n_ct, &[("Σ_cc", sigma_cc.dim())])?;
    check_sum_power(ch, alpha, q_p.trace() + sigma_cc.trace())?;
    PartialKernel::new(ch, alpha)?.rates(q_p.hermitian(), sigma_cc.hermitian())
}

/// Rate pair of the genie-aided outer bound for a given noise coupling.
pub fn outer_rates(
    ch: &CognitiveChannel,
    alpha: f64,
    nz: &NoiseCoupling,
    a: &OuterAllocation,
) -> Result<RatePair> {
    check_alpha(alpha)?;
    let kernel = BcKernel::new(ch, alpha, Some(nz))?;
    check_dims(
        ch.antennas().n_joint(),
        &[("Q_p", a.q_p.dim()), ("Q_c", a.q_c.dim())],
    )?;
    check_sum_power(ch, alpha, a.q_p.trace() + a.q_c.trace())?;
    kernel.rates(a.q_p.hermitian(), a.q_c.hermitian())
}

/// Rate pair of the scaled broadcast channel `(G_α, K)` with the licensed
/// message encoded first.
pub fn bc_rates(ch: &CognitiveChannel, alpha: f64, a: &OuterAllocation) -> Result<RatePair> {
    check_alpha(alpha)?;
    check_dims(
        ch.antennas().n_joint(),
        &[("Q_p", a.q_p.dim()), ("Q_c", a.q_c.dim())],
    )?;
    check_sum_power(ch, alpha, a.q_p.trace() + a.q_c.trace())?;
    BcKernel::new(ch, alpha, None)?.rates(a.q_p.hermitian(), a.q_c.hermitian())
}

/// Concatenated Cholesky parameters of several covariance blocks sharing a
/// single power ball.
struct SumPowerLayout {
    dims: Vec<usize>,
    real: bool,
}

impl SumPowerLayout {
    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.dims
            .iter()
            .map(|&d| {
                let o = acc;
                acc += CholeskyParam::len_for(d, self.real);
                o
            })
            .collect()
    }

    fn len(&self) -> usize {
        self.dims
            .iter()
            .map(|&d| CholeskyParam::len_for(d, self.real))
            .sum()
    }

    fn decode(&self, x: &[f64]) -> Vec<HermitianMatrix> {
        self.dims
            .iter()
            .zip(self.offsets())
            .map(|(&d, o)| {
                gram(&lower_from_values(
                    d,
                    self.real,
                    &x[o..o + CholeskyParam::len_for(d, self.real)],
                ))
            })
            .collect()
    }

    fn encode(&self, blocks: &[&PsdMatrix]) -> Vec<f64> {
        blocks
            .iter()
            .flat_map(|b| CholeskyParam::encode(b, self.real).values)
            .collect()
    }

    fn anchor(&self) -> Vec<f64> {
        self.dims
            .iter()
            .flat_map(|&d| CholeskyParam::identity(d, self.real).values)
            .collect()
    }

    fn solve(
        &self,
        budget: f64,
        objective: &(dyn Fn(&[HermitianMatrix]) -> f64 + Sync),
        opts: &SolverSettings,
        warm: &[Vec<f64>],
    ) -> Result<Vec<HermitianMatrix>> {
        let f = |x: &[f64]| objective(&self.decode(x));
        let problem = Problem {
            dim: self.len(),
            groups: vec![BallGroup {
                indices: (0..self.len()).collect(),
                budget,
            }],
            objective: &f,
        };
        let best = maximize(&problem, opts, &self.anchor(), warm)?;
        Ok(self.decode(&best.x))
    }
}

/// Maximizes `μR_p + R_c` over the partial outer bound at scaling α; the
/// value is `N(α)`.
pub fn mu_sum_partial_outer(
    ch: &CognitiveChannel,
    alpha: f64,
    mu: f64,
    opts: &SolverSettings,
) -> Result<MuSumSolution<PartialOuterAllocation>> {
    check_alpha(alpha)?;
    check_mu(mu)?;
    opts.validate()?;
    let a = ch.antennas();
    let layout = SumPowerLayout {
        dims: vec![a.n_joint(), a.n_ct],
        real: ch.mode().is_real(),
    };
    let kernel = PartialKernel::new(ch, alpha)?;
    let objective = |b: &[HermitianMatrix]| {
        kernel
            .rates(&b[0], &b[1])
            .map_or(f64::NAN, |r| r.mu_sum(mu))
    };
    let blocks = layout
        .solve(ch.p_p() + alpha * ch.p_c(), &objective, opts, &[])
        .map_err(|e| tag_mu(e, mu))?;
    let rate = kernel.rates(&blocks[0], &blocks[1])?;
    let mut blocks = blocks.into_iter().map(PsdMatrix::from_trusted);
    Ok(MuSumSolution {
        mu,
        value: rate.mu_sum(mu),
        rate,
        witness: PartialOuterAllocation {
            q_p: blocks.next().expect("two blocks"),
            sigma_cc: blocks.next().expect("two blocks"),
        },
    })
}

fn mu_sum_bc_kernel(
    ch: &CognitiveChannel,
    alpha: f64,
    mu: f64,
    opts: &SolverSettings,
    nz: Option<&NoiseCoupling>,
    warm: &[OuterAllocation],
) -> Result<MuSumSolution<OuterAllocation>> {
    check_alpha(alpha)?;
    check_mu(mu)?;
    opts.validate()?;
    let n = ch.antennas().n_joint();
    let layout = SumPowerLayout {
        dims: vec![n, n],
        real: ch.mode().is_real(),
    };
    let kernel = BcKernel::new(ch, alpha, nz)?;
    let objective = |b: &[HermitianMatrix]| {
        kernel
            .rates(&b[0], &b[1])
            .map_or(f64::NAN, |r| r.mu_sum(mu))
    };
    let warm: Vec<Vec<f64>> = warm
        .iter()
        .map(|w| layout.encode(&[&w.q_p, &w.q_c]))
        .collect();
    let blocks = layout
        .solve(ch.p_p() + alpha * ch.p_c(), &objective, opts, &warm)
        .map_err(|e| tag_mu(e, mu))?;
    let rate = kernel.rates(&blocks[0], &blocks[1])?;
    let mut blocks = blocks.into_iter().map(PsdMatrix::from_trusted);
    Ok(MuSumSolution {
        mu,
        value: rate.mu_sum(mu),
        rate,
        witness: OuterAllocation {
            q_p: blocks.next().expect("two blocks"),
            q_c: blocks.next().expect("two blocks"),
        },
    })
}

/// Maximizes `μR_p + R_c` over the broadcast channel `(G_α, K)` with an
/// unstructured cognitive covariance. The search also starts from the
/// partial bound's optimum, so the result never falls below it.
pub fn bc_mu_sum(
    ch: &CognitiveChannel,
    alpha: f64,
    mu: f64,
    opts: &SolverSettings,
) -> Result<MuSumSolution<OuterAllocation>> {
    if mu < 1.0 {
        return Err(Error::UnsupportedMu(mu));
    }
    let partial = mu_sum_partial_outer(ch, alpha, mu, opts)?;
    mu_sum_bc_kernel(ch, alpha, mu, opts, None, &[partial.witness.to_outer()])
}

/// Maximizes `μR_p + R_c` over the genie-aided bound for a fixed coupling.
pub fn mu_sum_outer(
    ch: &CognitiveChannel,
    alpha: f64,
    nz: &NoiseCoupling,
    mu: f64,
    opts: &SolverSettings,
) -> Result<MuSumSolution<OuterAllocation>> {
    mu_sum_bc_kernel(ch, alpha, mu, opts, Some(nz), &[])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaZSearch {
    pub coupling: NoiseCoupling,
    pub value: f64,
    pub value_at_zero: f64,
}

/// Searches the noise coupling for the smallest genie-aided μ-sum.
///
/// Real-mode entries of `Q_z` are tuned one at a time by golden section on
/// `(−1, 1)` for `sweeps` passes; couplings that bring Σ_z within
/// [`SIGMA_Z_MARGIN`] of singular are skipped. Complex mode tunes the real
/// parts only.
pub fn inf_sigma_z(
    ch: &CognitiveChannel,
    alpha: f64,
    mu: f64,
    sweeps: usize,
    opts: &SolverSettings,
) -> Result<SigmaZSearch> {
    let a = ch.antennas();
    let zero = NoiseCoupling::zero(a.n_pr, a.n_cr);
    let value_at_zero = mu_sum_outer(ch, alpha, &zero, mu, opts)?.value;
    let mut best = (zero, value_at_zero);
    let mut failure = None;
    for _ in 0..sweeps {
        for i in 0..a.n_pr {
            for j in 0..a.n_cr {
                let base = best.0.q_z.clone();
                let eval = |v: f64| -> f64 {
                    let mut q = base.clone();
                    q[(i, j)] = crate::matrix::c(v);
                    let nz = NoiseCoupling { q_z: q };
                    if nz.sigma_z().min_eigenvalue() < SIGMA_Z_MARGIN {
                        return f64::INFINITY;
                    }
                    match mu_sum_outer(ch, alpha, &nz, mu, opts) {
                        Ok(s) => s.value,
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::INFINITY
                        }
                    }
                };
                let (v, fv) = golden_min(eval, -1.0, 1.0, 1e-3);
                if let Some(e) = failure.take() {
                    return Err(e);
                }
                if fv < best.1 {
                    best.0.q_z[(i, j)] = crate::matrix::c(v);
                    best.1 = fv;
                }
            }
        }
    }
    Ok(SigmaZSearch {
        coupling: best.0,
        value: best.1,
        value_at_zero,
    })
}

/// Minimizes `N(α)` over a bracket, widening it when the minimizer sits on
/// an edge.
pub fn inf_alpha_partial_outer(
    ch: &CognitiveChannel,
    mu: f64,
    bracket: (f64, f64),
    opts: &SolverSettings,
) -> Result<AlphaSearch> {
    check_mu(mu)?;
    let search = minimize_over_alpha(
        |alpha| mu_sum_partial_outer(ch, alpha, mu, opts).map(|s| s.value),
        bracket.0,
        bracket.1,
    )?;
    if search.at_edge {
        return Err(Error::BracketUnbounded {
            lo: search.bracket.0,
            hi: search.bracket.1,
        });
    }
    Ok(search)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub alpha: f64,
    pub mu: f64,
    pub partial: f64,
    pub bc: f64,
    /// `|bc − partial| / max(μ, 1)`
    pub gap: f64,
    pub tol: f64,
    pub holds: bool,
}

/// Whether restricting the cognitive covariance to `diag(0, Σ_cc)` costs
/// nothing in μ-sum at this α.
pub fn condition_check(
    ch: &CognitiveChannel,
    alpha: f64,
    mu: f64,
    tol: f64,
    opts: &SolverSettings,
) -> Result<ConditionCheck> {
    if mu < 1.0 {
        return Err(Error::UnsupportedMu(mu));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let partial = mu_sum_partial_outer(ch, alpha, mu, opts)?;
    let bc = mu_sum_bc_kernel(ch, alpha, mu, opts, None, &[partial.witness.to_outer()])?;
    let gap = normalized((bc.value - partial.value).abs(), mu);
    Ok(ConditionCheck {
        alpha,
        mu,
        partial: partial.value,
        bc: bc.value,
        gap,
        tol,
        holds: gap <= tol,
    })
}

/// One supporting point of the partial outer bound per μ.
pub fn trace_outer_boundary(
    ch: &CognitiveChannel,
    alpha: f64,
    mu_grid: &[f64],
    opts: &SolverSettings,
) -> Result<RegionBoundary<PartialOuterAllocation>> {
    check_alpha(alpha)?;
    if mu_grid.is_empty() {
        return Err(Error::InvalidArgument("empty mu grid".into()));
    }
    mu_grid.iter().try_for_each(|&m| check_mu(m))?;
    let solved = parallel::map_ordered(mu_grid.to_vec(), |mu| {
        mu_sum_partial_outer(ch, alpha, mu, opts)
    });
    let points = solved
        .into_iter()
        .map(|s| {
            s.map(|s| BoundaryPoint {
                mu: s.mu,
                rate: s.rate,
                witness: s.witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionBoundary::from_points(
        points,
        ch,
        opts,
        "partial_outer",
        Some(alpha),
    ))
}

/// Summary of an α sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub schema: u32,
    pub mu: f64,
    pub alpha_star: f64,
    pub n_value: f64,
    /// `n_value / max(μ, 1)`
    pub n_value_normalized: f64,
    pub flagged: bool,
    pub bracket: (f64, f64),
    pub condition_check: Option<ConditionCheck>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub condition: f64,
    pub solver_gap: f64,
    pub rel_tol: f64,
}

/// Minimizes `N(α)` and, for `μ ≥ 1`, runs the condition check at the
/// minimizer.
pub fn bound_report(
    ch: &CognitiveChannel,
    mu: f64,
    bracket: (f64, f64),
    condition_tol: f64,
    opts: &SolverSettings,
) -> Result<BoundReport> {
    let search = inf_alpha_partial_outer(ch, mu, bracket, opts)?;
    let condition = if mu >= 1.0 {
        Some(condition_check(
            ch,
            search.alpha_star,
            mu,
            condition_tol,
            opts,
        )?)
    } else {
        None
    };
    Ok(BoundReport {
        schema: crate::boundary::SCHEMA_VERSION,
        mu,
        alpha_star: search.alpha_star,
        n_value: search.value,
        n_value_normalized: normalized(search.value, mu),
        flagged: search.flagged,
        bracket: search.bracket,
        condition_check: condition,
        tolerances: Tolerances {
            condition: condition_tol,
            solver_gap: opts.gap,
            rel_tol: opts.rel_tol,
        },
    })
}
