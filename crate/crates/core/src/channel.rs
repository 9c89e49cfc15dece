//! The two-user MIMO cognitive channel and its α-scaled relatives.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::{c, CMatrix};

/// Whether inputs and channel gains are real or circularly-symmetric complex.
///
/// Real signalling carries the ½ in front of every `log det`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalMode {
    Real,
    Complex,
}

impl SignalMode {
    pub fn rate_scale(self) -> f64 {
        match self {
            SignalMode::Real => 0.5,
            SignalMode::Complex => 1.0,
        }
    }

    pub fn is_real(self) -> bool {
        self == SignalMode::Real
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Antennas {
    pub n_pt: usize,
    pub n_pr: usize,
    pub n_ct: usize,
    pub n_cr: usize,
}

impl Antennas {
    /// Dimension of the joint (licensed, cognitive) transmit vector.
    pub fn n_joint(&self) -> usize {
        self.n_pt + self.n_ct
    }
}

/// `Y_p = H_pp X_p + H_cp X_c + Z_p`, `Y_c = H_pc X_p + H_cc X_c + Z_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CognitiveChannel {
    h_pp: CMatrix,
    h_pc: CMatrix,
    h_cp: CMatrix,
    h_cc: CMatrix,
    p_p: f64,
    p_c: f64,
    mode: SignalMode,
}

impl CognitiveChannel {
    pub fn new(
        h_pp: CMatrix,
        h_pc: CMatrix,
        h_cp: CMatrix,
        h_cc: CMatrix,
        p_p: f64,
        p_c: f64,
        mode: SignalMode,
    ) -> Result<Self> {
        for (name, v) in [("p_p", p_p), ("p_c", p_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositivePower { name, value: v });
            }
        }
        let (n_pr, n_pt) = h_pp.shape();
        let (n_cr, n_ct) = h_cc.shape();
        let check = |name: &str, m: &CMatrix, rows: usize, cols: usize| {
            if m.shape() != (rows, cols) {
                Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {rows}x{cols}",
                    m.nrows(),
                    m.ncols()
                )))
            } else {
                Ok(())
            }
        };
        check("h_pc", &h_pc, n_cr, n_pt)?;
        check("h_cp", &h_cp, n_pr, n_ct)?;
        if n_pt == 0 || n_pr == 0 || n_ct == 0 || n_cr == 0 {
            return Err(Error::DimensionMismatch("empty channel matrix".into()));
        }
        let mut ch = Self {
            h_pp,
            h_pc,
            h_cp,
            h_cc,
            p_p,
            p_c,
            mode,
        };
        if mode.is_real() {
            for m in [&mut ch.h_pp, &mut ch.h_pc, &mut ch.h_cp, &mut ch.h_cc] {
                m.iter_mut().for_each(|z| z.im = 0.0);
            }
        }
        Ok(ch)
    }

    /// Convenience constructor for real channels given as row slices.
    pub fn real(
        h_pp: &[&[f64]],
        h_pc: &[&[f64]],
        h_cp: &[&[f64]],
        h_cc: &[&[f64]],
        p_p: f64,
        p_c: f64,
    ) -> Result<Self> {
        use crate::matrix::real_matrix;
        Self::new(
            real_matrix(h_pp),
            real_matrix(h_pc),
            real_matrix(h_cp),
            real_matrix(h_cc),
            p_p,
            p_c,
            SignalMode::Real,
        )
    }

    /// The two-user real channel used as the standard worked example.
    pub fn reference_example() -> Self {
        Self::real(
            &[&[1.4435]],
            &[&[-0.3510], &[0.6232]],
            &[&[0.799]],
            &[&[0.9409], &[-0.9921]],
            5.0,
            5.0,
        )
        .expect("fixture is consistent")
    }

    pub fn h_pp(&self) -> &CMatrix {
        &self.h_pp
    }
    pub fn h_pc(&self) -> &CMatrix {
        &self.h_pc
    }
    pub fn h_cp(&self) -> &CMatrix {
        &self.h_cp
    }
    pub fn h_cc(&self) -> &CMatrix {
        &self.h_cc
    }
    pub fn p_p(&self) -> f64 {
        self.p_p
    }
    pub fn p_c(&self) -> f64 {
        self.p_c
    }
    pub fn mode(&self) -> SignalMode {
        self.mode
    }

    pub fn antennas(&self) -> Antennas {
        Antennas {
            n_pt: self.h_pp.ncols(),
            n_pr: self.h_pp.nrows(),
            n_ct: self.h_cc.ncols(),
            n_cr: self.h_cc.nrows(),
        }
    }

    pub fn with_powers(&self, p_p: f64, p_c: f64) -> Result<Self> {
        Self::new(
            self.h_pp.clone(),
            self.h_pc.clone(),
            self.h_cp.clone(),
            self.h_cc.clone(),
            p_p,
            p_c,
            self.mode,
        )
    }

    pub fn to_spec(&self) -> ChannelSpec {
        ChannelSpec {
            h_pp: MatrixSpec::from_matrix(&self.h_pp, self.mode),
            h_pc: MatrixSpec::from_matrix(&self.h_pc, self.mode),
            h_cp: MatrixSpec::from_matrix(&self.h_cp, self.mode),
            h_cc: MatrixSpec::from_matrix(&self.h_cc, self.mode),
            p_p: self.p_p,
            p_c: self.p_c,
            real_mode: self.mode.is_real(),
        }
    }

    /// Short stable fingerprint of the channel (SHA-256 of its JSON form).
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(&self.to_spec()).expect("spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Divides the cognitive transmitter's gains by `√α` and multiplies its
/// power budget by `α`.
pub fn scaled_channel(ch: &CognitiveChannel, alpha: f64) -> Result<CognitiveChannel> {
    check_alpha(alpha)?;
    let s = c(1.0 / alpha.sqrt());
    CognitiveChannel::new(
        ch.h_pp.clone(),
        ch.h_pc.clone(),
        &ch.h_cp * s,
        &ch.h_cc * s,
        ch.p_p,
        alpha * ch.p_c,
        ch.mode,
    )
}

/// The stacked channels seen by the cooperating transmitters.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeMatrices {
    /// `[H_pp  H_cp]`
    pub g: CMatrix,
    /// `[H_pp  H_cp/√α]`
    pub g_alpha: CMatrix,
    /// `[0  H_cc/√α]`
    pub k: CMatrix,
    /// `[[H_pp, H_cp/√α], [0, H_cc/√α]]`
    pub k_bar: CMatrix,
    pub alpha: f64,
}

pub fn composite_matrices(ch: &CognitiveChannel, alpha: f64) -> Result<CompositeMatrices> {
    check_alpha(alpha)?;
    let a = ch.antennas();
    let s = c(1.0 / alpha.sqrt());
    let n = a.n_joint();

    let mut g = CMatrix::zeros(a.n_pr, n);
    g.view_mut((0, 0), (a.n_pr, a.n_pt)).copy_from(&ch.h_pp);
    g.view_mut((0, a.n_pt), (a.n_pr, a.n_ct))
        .copy_from(&ch.h_cp);

    let mut g_alpha = g.clone();
    g_alpha
        .view_mut((0, a.n_pt), (a.n_pr, a.n_ct))
        .copy_from(&(&ch.h_cp * s));

    let mut k = CMatrix::zeros(a.n_cr, n);
    k.view_mut((0, a.n_pt), (a.n_cr, a.n_ct))
        .copy_from(&(&ch.h_cc * s));

    let mut k_bar = CMatrix::zeros(a.n_pr + a.n_cr, n);
    k_bar.view_mut((0, 0), (a.n_pr, n)).copy_from(&g_alpha);
    k_bar.view_mut((a.n_pr, 0), (a.n_cr, n)).copy_from(&k);

    Ok(CompositeMatrices {
        g,
        g_alpha,
        k,
        k_bar,
        alpha,
    })
}

// ---------------------------------------------------------------------------
// JSON ingestion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntrySpec {
    Real(f64),
    Complex([f64; 2]),
}

impl EntrySpec {
    fn value(self) -> Complex64 {
        match self {
            EntrySpec::Real(re) => c(re),
            EntrySpec::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A matrix as row-major nested arrays; a bare number is read as 1x1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Scalar(EntrySpec),
    Rows(Vec<Vec<EntrySpec>>),
}

impl MatrixSpec {
    fn to_matrix(&self, name: &str) -> Result<CMatrix> {
        match self {
            MatrixSpec::Scalar(e) => Ok(CMatrix::from_element(1, 1, e.value())),
            MatrixSpec::Rows(rows) => {
                let nrows = rows.len();
                let ncols = rows.first().map_or(0, Vec::len);
                if nrows == 0 || ncols == 0 {
                    return Err(Error::DimensionMismatch(format!("{name} is empty")));
                }
                if rows.iter().any(|r| r.len() != ncols) {
                    return Err(Error::DimensionMismatch(format!("{name} has ragged rows")));
                }
                Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j].value()))
            }
        }
    }

    fn from_matrix(m: &CMatrix, mode: SignalMode) -> Self {
        MatrixSpec::Rows(
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| {
                            let z = m[(i, j)];
                            if mode.is_real() {
                                EntrySpec::Real(z.re)
                            } else {
                                EntrySpec::Complex([z.re, z.im])
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

/// On-disk channel description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub h_pp: MatrixSpec,
    pub h_pc: MatrixSpec,
    pub h_cp: MatrixSpec,
    pub h_cc: MatrixSpec,
    pub p_p: f64,
    pub p_c: f64,
    #[serde(default)]
    pub real_mode: bool,
}

impl ChannelSpec {
    pub fn into_channel(self) -> Result<CognitiveChannel> {
        let mode = if self.real_mode {
            SignalMode::Real
        } else {
            SignalMode::Complex
        };
        CognitiveChannel::new(
            self.h_pp.to_matrix("h_pp")?,
            self.h_pc.to_matrix("h_pc")?,
            self.h_cp.to_matrix("h_cp")?,
            self.h_cc.to_matrix("h_cc")?,
            self.p_p,
            self.p_c,
            mode,
        )
    }
}

pub fn load_channel(text: &str) -> Result<CognitiveChannel> {
    let spec: ChannelSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.into_channel()
}
