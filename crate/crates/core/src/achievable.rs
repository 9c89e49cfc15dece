//! Dirty-paper-coding achievable region.
//!
//! The licensed user's codeword and the cognitive transmitter's relay
//! component form `X_p,net` with covariance `Σ_p,net = [[Σ_p, Q], [Q†, Σ_cp]]`;
//! the cognitive private stream (`Σ_cc`) is dirty-paper coded against
//! everything the cognitive receiver sees from `X_p,net`.

use serde_json::{json, Value};

use crate::boundary::{BoundaryPoint, RegionBoundary, Witness};
use crate::channel::{composite_matrices, CognitiveChannel};
use crate::error::{Error, Result};
use crate::matrix::{
    c, gram, log_det_id_plus, lower_from_values, CMatrix, CholeskyParam, HermitianMatrix,
    PsdMatrix, PSD_TOL,
};
use crate::optimizer::{check_mu, maximize, BallGroup, Problem, SolverSettings};
use crate::parallel;

/// Rates in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct RatePair {
    pub r_p: f64,
    pub r_c: f64,
}

impl RatePair {
    pub fn new(r_p: f64, r_c: f64) -> Self {
        Self { r_p, r_c }
    }

    pub fn mu_sum(&self, mu: f64) -> f64 {
        mu * self.r_p + self.r_c
    }
}

/// Covariances of the DPC scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct DpcAllocation {
    pub sigma_p: PsdMatrix,
    pub sigma_cp: PsdMatrix,
    pub sigma_cc: PsdMatrix,
    /// Cross-covariance `E[X_p X_cp†]`, `n_pt × n_ct`.
    pub q: CMatrix,
}

impl DpcAllocation {
    pub fn new(
        sigma_p: PsdMatrix,
        sigma_cp: PsdMatrix,
        sigma_cc: PsdMatrix,
        q: CMatrix,
    ) -> Result<Self> {
        if sigma_cp.dim() != sigma_cc.dim() || q.shape() != (sigma_p.dim(), sigma_cp.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "allocation blocks: Σ_p {}, Σ_cp {}, Σ_cc {}, Q {}x{}",
                sigma_p.dim(),
                sigma_cp.dim(),
                sigma_cc.dim(),
                q.nrows(),
                q.ncols()
            )));
        }
        Ok(Self {
            sigma_p,
            sigma_cp,
            sigma_cc,
            q,
        })
    }

    /// Single-antenna transmitters: all blocks are scalars.
    pub fn scalar(sigma_p: f64, sigma_cp: f64, sigma_cc: f64, q: f64) -> Result<Self> {
        Self::new(
            PsdMatrix::scalar(sigma_p)?,
            PsdMatrix::scalar(sigma_cp)?,
            PsdMatrix::scalar(sigma_cc)?,
            CMatrix::from_element(1, 1, c(q)),
        )
    }

    pub fn zeros(n_pt: usize, n_ct: usize) -> Self {
        Self {
            sigma_p: PsdMatrix::zeros(n_pt),
            sigma_cp: PsdMatrix::zeros(n_ct),
            sigma_cc: PsdMatrix::zeros(n_ct),
            q: CMatrix::zeros(n_pt, n_ct),
        }
    }

    /// Splits a joint `(n_pt + n_ct)`-square covariance into its blocks.
    pub fn from_net(net: &HermitianMatrix, sigma_cc: PsdMatrix, n_pt: usize) -> Self {
        let m = net.as_matrix();
        let n = m.nrows();
        let n_ct = n - n_pt;
        let block = |r, cc, rows, cols| {
            HermitianMatrix::new(m.view((r, cc), (rows, cols)).into_owned()).expect("square block")
        };
        Self {
            sigma_p: PsdMatrix::from_trusted(block(0, 0, n_pt, n_pt)),
            sigma_cp: PsdMatrix::from_trusted(block(n_pt, n_pt, n_ct, n_ct)),
            sigma_cc,
            q: m.view((0, n_pt), (n_pt, n_ct)).into_owned(),
        }
    }

    pub fn sigma_p_net(&self) -> HermitianMatrix {
        let (np, nc) = (self.sigma_p.dim(), self.sigma_cp.dim());
        let mut m = CMatrix::zeros(np + nc, np + nc);
        m.view_mut((0, 0), (np, np))
            .copy_from(self.sigma_p.as_matrix());
        m.view_mut((np, np), (nc, nc))
            .copy_from(self.sigma_cp.as_matrix());
        m.view_mut((0, np), (np, nc)).copy_from(&self.q);
        m.view_mut((np, 0), (nc, np)).copy_from(&self.q.adjoint());
        HermitianMatrix::new(m).expect("square")
    }

    pub fn licensed_power(&self) -> f64 {
        self.sigma_p.trace()
    }

    pub fn cognitive_power(&self) -> f64 {
        self.sigma_cp.trace() + self.sigma_cc.trace()
    }

    /// The allocation that produces the same rates on `scaled_channel(ch, α)`:
    /// `(Σ_p, α·Σ_cp, α·Σ_cc, √α·Q)`.
    pub fn mapped_for_scaling(&self, alpha: f64) -> Self {
        Self {
            sigma_p: self.sigma_p.clone(),
            sigma_cp: self.sigma_cp.scaled(alpha),
            sigma_cc: self.sigma_cc.scaled(alpha),
            q: &self.q * c(alpha.sqrt()),
        }
    }
}

impl Witness for DpcAllocation {
    fn to_json(&self) -> Value {
        json!({
            "sigma_p": crate::boundary::matrix_json(self.sigma_p.as_matrix()),
            "sigma_cp": crate::boundary::matrix_json(self.sigma_cp.as_matrix()),
            "sigma_cc": crate::boundary::matrix_json(self.sigma_cc.as_matrix()),
            "q": crate::boundary::matrix_json(&self.q),
        })
    }
}

fn trace_slack(budget: f64, tol: f64) -> f64 {
    tol * budget.max(1.0)
}

/// Names the first violated constraint, if any.
pub fn feasibility_violation(ch: &CognitiveChannel, a: &DpcAllocation, tol: f64) -> Option<String> {
    let ant = ch.antennas();
    if a.sigma_p.dim() != ant.n_pt || a.sigma_cp.dim() != ant.n_ct {
        return Some(format!(
            "allocation sized for ({}, {}) transmit antennas, channel has ({}, {})",
            a.sigma_p.dim(),
            a.sigma_cp.dim(),
            ant.n_pt,
            ant.n_ct
        ));
    }
    for (name, m) in [
        ("Σ_p", &a.sigma_p),
        ("Σ_cp", &a.sigma_cp),
        ("Σ_cc", &a.sigma_cc),
    ] {
        let min = m.hermitian().min_eigenvalue();
        if min < -tol {
            return Some(format!("{name} is not PSD (min eigenvalue {min:e})"));
        }
    }
    let min = a.sigma_p_net().min_eigenvalue();
    if min < -tol {
        return Some(format!("Σ_p,net is not PSD (min eigenvalue {min:e})"));
    }
    if a.licensed_power() > ch.p_p() + trace_slack(ch.p_p(), tol) {
        return Some(format!(
            "licensed power Tr(Σ_p) = {} exceeds P_p = {}",
            a.licensed_power(),
            ch.p_p()
        ));
    }
    if a.cognitive_power() > ch.p_c() + trace_slack(ch.p_c(), tol) {
        return Some(format!(
            "cognitive power Tr(Σ_cp + Σ_cc) = {} exceeds P_c = {}",
            a.cognitive_power(),
            ch.p_c()
        ));
    }
    None
}

pub fn is_feasible(ch: &CognitiveChannel, a: &DpcAllocation, tol: f64) -> bool {
    feasibility_violation(ch, a, tol).is_none()
}

/// Evaluates the DPC rate formulas without feasibility checks.
pub(crate) struct DpcKernel {
    g: CMatrix,
    h_cp: CMatrix,
    h_cc: CMatrix,
    scale: f64,
}

impl DpcKernel {
    pub fn new(ch: &CognitiveChannel) -> Self {
        Self {
            g: composite_matrices(ch, 1.0).expect("alpha 1 is valid").g,
            h_cp: ch.h_cp().clone(),
            h_cc: ch.h_cc().clone(),
            scale: ch.mode().rate_scale(),
        }
    }

    pub fn rates(&self, net: &HermitianMatrix, cc: &HermitianMatrix) -> Result<RatePair> {
        let interference = HermitianMatrix::congruence(&self.h_cp, cc)?;
        let signal = HermitianMatrix::congruence(&self.g, net)?;
        let r_p = log_det_id_plus(&signal.add(&interference)?)? - log_det_id_plus(&interference)?;
        let r_c = log_det_id_plus(&HermitianMatrix::congruence(&self.h_cc, cc)?)?;
        Ok(RatePair {
            r_p: (self.scale * r_p).max(0.0),
            r_c: (self.scale * r_c).max(0.0),
        })
    }
}

/// The largest rate pair the DPC scheme supports with allocation `a`.
pub fn dpc_rates(ch: &CognitiveChannel, a: &DpcAllocation) -> Result<RatePair> {
    if let Some(why) = feasibility_violation(ch, a, PSD_TOL) {
        return Err(Error::InfeasibleAllocation(why));
    }
    DpcKernel::new(ch).rates(&a.sigma_p_net(), a.sigma_cc.hermitian())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuSumSolution<W> {
    pub mu: f64,
    /// `μ·r_p + r_c`
    pub value: f64,
    pub rate: RatePair,
    pub witness: W,
}

/// Parameter layout `[chol(Σ_p,net) | chol(Σ_cc)]` with one power ball per
/// transmitter.
struct DpcLayout {
    n_pt: usize,
    n_joint: usize,
    n_ct: usize,
    real: bool,
}

impl DpcLayout {
    fn new(ch: &CognitiveChannel) -> Self {
        let a = ch.antennas();
        Self {
            n_pt: a.n_pt,
            n_joint: a.n_joint(),
            n_ct: a.n_ct,
            real: ch.mode().is_real(),
        }
    }

    fn net_len(&self) -> usize {
        CholeskyParam::len_for(self.n_joint, self.real)
    }

    fn len(&self) -> usize {
        self.net_len() + CholeskyParam::len_for(self.n_ct, self.real)
    }

    fn groups(&self, p_p: f64, p_c: f64) -> Vec<BallGroup> {
        let rows = |i| CholeskyParam::row_range(self.n_joint, self.real, i);
        let licensed = (0..self.n_pt).flat_map(rows).collect();
        let cognitive = (self.n_pt..self.n_joint)
            .flat_map(rows)
            .chain(self.net_len()..self.len())
            .collect();
        vec![
            BallGroup {
                indices: licensed,
                budget: p_p,
            },
            BallGroup {
                indices: cognitive,
                budget: p_c,
            },
        ]
    }

    fn anchor(&self) -> Vec<f64> {
        let mut v = CholeskyParam::identity(self.n_joint, self.real).values;
        v.extend(CholeskyParam::identity(self.n_ct, self.real).values);
        v
    }

    fn decode(&self, x: &[f64]) -> (HermitianMatrix, HermitianMatrix) {
        let (net, cc) = x.split_at(self.net_len());
        (
            gram(&lower_from_values(self.n_joint, self.real, net)),
            gram(&lower_from_values(self.n_ct, self.real, cc)),
        )
    }

    fn allocation(&self, x: &[f64]) -> DpcAllocation {
        let (net, cc) = self.decode(x);
        DpcAllocation::from_net(&net, PsdMatrix::from_trusted(cc), self.n_pt)
    }

    fn encode(&self, a: &DpcAllocation) -> Vec<f64> {
        let net = PsdMatrix::from_trusted(a.sigma_p_net());
        let mut v = CholeskyParam::encode(&net, self.real).values;
        v.extend(CholeskyParam::encode(&a.sigma_cc, self.real).values);
        v
    }
}

pub(crate) fn mu_sum_achievable_with(
    ch: &CognitiveChannel,
    mu: f64,
    opts: &SolverSettings,
    warm: &[DpcAllocation],
) -> Result<MuSumSolution<DpcAllocation>> {
    check_mu(mu)?;
    opts.validate()?;
    let layout = DpcLayout::new(ch);
    let kernel = DpcKernel::new(ch);
    let objective = |x: &[f64]| {
        let (net, cc) = layout.decode(x);
        kernel.rates(&net, &cc).map_or(f64::NAN, |r| r.mu_sum(mu))
    };
    let problem = Problem {
        dim: layout.len(),
        groups: layout.groups(ch.p_p(), ch.p_c()),
        objective: &objective,
    };
    let warm: Vec<Vec<f64>> = warm.iter().map(|a| layout.encode(a)).collect();
    let best = maximize(&problem, opts, &layout.anchor(), &warm).map_err(|e| tag_mu(e, mu))?;
    let witness = layout.allocation(&best.x);
    let rate = kernel.rates(&witness.sigma_p_net(), witness.sigma_cc.hermitian())?;
    Ok(MuSumSolution {
        mu,
        value: rate.mu_sum(mu),
        rate,
        witness,
    })
}

pub(crate) fn tag_mu(e: Error, mu: f64) -> Error {
    match e {
        Error::SolverDiverged(msg) => Error::SolverDiverged(format!("mu = {mu}: {msg}")),
        other => other,
    }
}

/// Maximizes `μ·R_p + R_c` over all feasible DPC allocations.
pub fn mu_sum_achievable(
    ch: &CognitiveChannel,
    mu: f64,
    opts: &SolverSettings,
) -> Result<MuSumSolution<DpcAllocation>> {
    mu_sum_achievable_with(ch, mu, opts, &[])
}

/// One supporting point of the achievable region per μ.
pub fn trace_boundary(
    ch: &CognitiveChannel,
    mu_grid: &[f64],
    opts: &SolverSettings,
) -> Result<RegionBoundary<DpcAllocation>> {
    if mu_grid.is_empty() {
        return Err(Error::InvalidArgument("empty mu grid".into()));
    }
    mu_grid.iter().try_for_each(|&m| check_mu(m))?;
    let solved = parallel::map_ordered(mu_grid.to_vec(), |mu| mu_sum_achievable(ch, mu, opts));
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
        "achievable",
        None,
    ))
}
