//! Small dense Hermitian / PSD kernels.
//!
//! Everything is stored as `DMatrix<Complex64>`; real-signal problems simply
//! carry zero imaginary parts. Antenna counts are tiny, so the routines favour
//! clarity over blocking or in-place tricks.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Default eigenvalue tolerance for PSD certification.
pub const PSD_TOL: f64 = 1e-9;

/// Smallest eigenvalue of `I + m` accepted by the log-det kernels.
const DET_TOL: f64 = 1e-12;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Builds a complex matrix from real row-major rows.
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j]))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Symmetrizes `m` as `(m + m†)/2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Self(symmetrize(&m)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(diag[i])
            } else {
                c(0.0)
            }
        }))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(real_matrix(rows))
    }

    /// `h · x · h†` for any conformable `h`.
    pub fn congruence(h: &CMatrix, x: &HermitianMatrix) -> Result<Self> {
        if h.ncols() != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "congruence: {}x{} times {}x{}",
                h.nrows(),
                h.ncols(),
                x.dim(),
                x.dim()
            )));
        }
        Self::new(h * &x.0 * h.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * c(s))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "add: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self(&self.0 + &other.0))
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }
}

/// A Hermitian matrix certified positive semidefinite up to `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    base: HermitianMatrix,
    tol: f64,
}

impl PsdMatrix {
    pub fn new(base: HermitianMatrix, tol: f64) -> Result<Self> {
        let min = base.min_eigenvalue();
        if min < -tol {
            return Err(Error::InfeasibleAllocation(format!(
                "matrix is not PSD (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { base, tol })
    }

    /// Skips certification; callers guarantee PSD by construction.
    pub(crate) fn from_trusted(base: HermitianMatrix) -> Self {
        Self { base, tol: PSD_TOL }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_trusted(HermitianMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(HermitianMatrix::identity(dim))
    }

    /// Diagonal PSD matrix; negative entries are rejected.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(diag), PSD_TOL)
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Self::from_diagonal(&[v])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(rows)?, PSD_TOL)
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.base.as_matrix()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    /// Multiplies by a nonnegative scalar.
    pub fn scaled(&self, s: f64) -> Self {
        assert!(s >= 0.0, "PSD scaling must be nonnegative");
        Self::from_trusted(self.base.scaled(s))
    }
}

/// `log2 det(I + m)`.
pub fn log_det_id_plus(m: &HermitianMatrix) -> Result<f64> {
    let n = m.dim();
    if n == 0 {
        return Ok(0.0);
    }
    log_det_pd_raw(m.as_matrix() + CMatrix::identity(n, n))
}

/// `log2 det(m)` for a positive definite `m`.
pub fn log_det_pd(m: &HermitianMatrix) -> Result<f64> {
    if m.dim() == 0 {
        return Ok(0.0);
    }
    log_det_pd_raw(m.as_matrix().clone())
}

fn log_det_pd_raw(a: CMatrix) -> Result<f64> {
    if let Some(chol) = Cholesky::new(a.clone()) {
        let l = chol.l_dirty();
        let mut acc = 0.0;
        let mut ok = true;
        for i in 0..a.nrows() {
            let d = l[(i, i)].re;
            if d * d <= DET_TOL {
                ok = false;
                break;
            }
            acc += d.ln();
        }
        if ok {
            return Ok(2.0 * acc / LN_2);
        }
    }
    let ev = SymmetricEigen::new(symmetrize(&a)).eigenvalues;
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min <= DET_TOL {
        return Err(Error::NonPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(ev.iter().map(|v| v.ln()).sum::<f64>() / LN_2)
}

pub fn is_psd(m: &HermitianMatrix, tol: f64) -> bool {
    m.dim() == 0 || m.min_eigenvalue() >= -tol
}

/// Clips negative eigenvalues to zero.
pub fn project_psd(m: &HermitianMatrix) -> PsdMatrix {
    let n = m.dim();
    if n == 0 {
        return PsdMatrix::zeros(0);
    }
    let eig = SymmetricEigen::new(m.as_matrix().clone());
    if eig.eigenvalues.iter().all(|&v| v >= 0.0) {
        return PsdMatrix::from_trusted(m.clone());
    }
    let v = &eig.eigenvectors;
    let clipped = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(eig.eigenvalues[i].max(0.0))
        } else {
            c(0.0)
        }
    });
    let out = v * clipped * v.adjoint();
    PsdMatrix::from_trusted(HermitianMatrix(symmetrize(&out)))
}

/// Unconstrained coordinates for a PSD matrix `L·L†`, `L` lower triangular.
///
/// Values are laid out row by row. In real mode row `i` holds
/// `L[i,0..=i]`; in complex mode it holds the `(re, im)` pairs of
/// `L[i,0..i]` followed by the real diagonal `L[i,i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyParam {
    pub dim: usize,
    pub real: bool,
    pub values: Vec<f64>,
}

impl CholeskyParam {
    pub fn len_for(dim: usize, real: bool) -> usize {
        if real {
            dim * (dim + 1) / 2
        } else {
            dim * dim
        }
    }

    /// Index range of row `i` inside `values`.
    pub fn row_range(dim: usize, real: bool, i: usize) -> std::ops::Range<usize> {
        debug_assert!(i < dim);
        if real {
            let start = i * (i + 1) / 2;
            start..start + i + 1
        } else {
            let start = i * i;
            start..start + 2 * i + 1
        }
    }

    pub fn new(dim: usize, real: bool, values: Vec<f64>) -> Result<Self> {
        let want = Self::len_for(dim, real);
        if values.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "cholesky param for dim {dim} needs {want} values, got {}",
                values.len()
            )));
        }
        Ok(Self { dim, real, values })
    }

    pub fn zeros(dim: usize, real: bool) -> Self {
        Self {
            dim,
            real,
            values: vec![0.0; Self::len_for(dim, real)],
        }
    }

    pub fn identity(dim: usize, real: bool) -> Self {
        let mut p = Self::zeros(dim, real);
        for i in 0..dim {
            let r = Self::row_range(dim, real, i);
            p.values[r.end - 1] = 1.0;
        }
        p
    }

    pub fn lower(&self) -> CMatrix {
        lower_from_values(self.dim, self.real, &self.values)
    }

    /// Factorizes a PSD matrix into parameters (zero pivots are clamped).
    pub fn encode(m: &PsdMatrix, real: bool) -> Self {
        let l = semidefinite_cholesky(m.as_matrix());
        let n = m.dim();
        let mut values = Vec::with_capacity(Self::len_for(n, real));
        for i in 0..n {
            for j in 0..i {
                values.push(l[(i, j)].re);
                if !real {
                    values.push(l[(i, j)].im);
                }
            }
            values.push(l[(i, i)].re);
        }
        Self {
            dim: n,
            real,
            values,
        }
    }
}

pub(crate) fn lower_from_values(dim: usize, real: bool, values: &[f64]) -> CMatrix {
    let mut l = CMatrix::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in 0..i {
            if real {
                l[(i, j)] = c(values[k]);
                k += 1;
            } else {
                l[(i, j)] = Complex64::new(values[k], values[k + 1]);
                k += 2;
            }
        }
        l[(i, i)] = c(values[k]);
        k += 1;
    }
    l
}

pub(crate) fn gram(l: &CMatrix) -> HermitianMatrix {
    HermitianMatrix(symmetrize(&(l * l.adjoint())))
}

/// `L·L†` from the packed parameters.
pub fn decode_param(p: &CholeskyParam) -> PsdMatrix {
    PsdMatrix::from_trusted(gram(&p.lower()))
}

fn semidefinite_cholesky(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let scale = max_abs(a).max(1.0);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 1e-14 * scale {
            continue;
        }
        let ljj = d.sqrt();
        l[(j, j)] = c(ljj);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn log_det_identity_and_diagonal() {
        assert_eq!(log_det_id_plus(&HermitianMatrix::zeros(2)).unwrap(), 0.0);
        let d = HermitianMatrix::from_diagonal(&[1.0, 3.0]);
        assert_abs_diff_eq!(log_det_id_plus(&d).unwrap(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn log_det_of_rank_one_cognitive_gain() {
        // det(I + 5 h h^T) = 1 + 5 |h|^2 for a column h.
        let h = real_matrix(&[&[0.9409], &[-0.9921]]);
        let m = HermitianMatrix::congruence(&h, &HermitianMatrix::from_diagonal(&[5.0])).unwrap();
        let oracle = (1.0 + 5.0 * (0.9409f64.powi(2) + 0.9921f64.powi(2))).log2();
        assert_abs_diff_eq!(log_det_id_plus(&m).unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, 3.371249, epsilon = 1e-6);
    }

    #[test]
    fn log_det_rejects_singular() {
        let m = HermitianMatrix::from_diagonal(&[-1.0, 0.0]);
        assert!(matches!(
            log_det_id_plus(&m),
            Err(Error::NonPositiveDefinite { .. })
        ));
    }

    #[test]
    fn log_det_complex_hermitian() {
        // [[2, i],[-i, 2]] has determinant 3.
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(2.0);
        a[(1, 1)] = c(2.0);
        a[(0, 1)] = Complex64::new(0.0, 1.0);
        a[(1, 0)] = Complex64::new(0.0, -1.0);
        let h = HermitianMatrix::new(a).unwrap();
        assert_abs_diff_eq!(log_det_pd(&h).unwrap(), 3f64.log2(), epsilon = 1e-13);
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&HermitianMatrix::identity(3), 0.0));
        assert!(!is_psd(&HermitianMatrix::from_diagonal(&[1.0, -0.1]), 1e-9));
        let m = HermitianMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(!is_psd(&m, 1e-9));
    }

    #[test]
    fn projection_clips_negative_modes() {
        let p = project_psd(&HermitianMatrix::from_diagonal(&[2.0, -1.0]));
        assert_abs_diff_eq!(p.as_matrix()[(0, 0)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.as_matrix()[(1, 1)].re, 0.0, epsilon = 1e-14);

        let x = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let p = project_psd(&x);
        for z in p.as_matrix().iter() {
            assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn decode_examples() {
        let z = decode_param(&CholeskyParam::zeros(2, true));
        assert_eq!(max_abs(z.as_matrix()), 0.0);
        let id = decode_param(&CholeskyParam::identity(3, false));
        assert_abs_diff_eq!(max_abs(&(id.as_matrix() - CMatrix::identity(3, 3))), 0.0);
        let p = CholeskyParam::new(2, true, vec![2.0, 1.0, 1.0]).unwrap();
        let m = decode_param(&p);
        let want = real_matrix(&[&[4.0, 2.0], &[2.0, 2.0]]);
        assert_abs_diff_eq!(max_abs(&(m.as_matrix() - want)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn param_lengths_and_rows() {
        assert_eq!(CholeskyParam::len_for(3, true), 6);
        assert_eq!(CholeskyParam::len_for(3, false), 9);
        assert_eq!(CholeskyParam::row_range(3, true, 2), 3..6);
        assert_eq!(CholeskyParam::row_range(3, false, 2), 4..9);
        assert!(CholeskyParam::new(2, true, vec![1.0]).is_err());
    }

    #[test]
    fn encode_round_trips_semidefinite() {
        let m = PsdMatrix::from_real_rows(&[&[5.0, 5.0], &[5.0, 5.0]]).unwrap();
        let back = decode_param(&CholeskyParam::encode(&m, true));
        assert_abs_diff_eq!(
            max_abs(&(back.as_matrix() - m.as_matrix())),
            0.0,
            epsilon = 1e-12
        );
    }
}
