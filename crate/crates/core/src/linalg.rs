//! Dense complex matrix primitives: Hermitian eigendecomposition, PSD tests,
//! Kronecker products and partial transposes.
//!
//! Bipartite index convention: on `C^{d_A} ⊗ C^{d_B}` the first factor is the
//! slow index, so row `i * d_B + s` is basis vector `e_i ⊗ e_s`. Every module
//! in the crate relies on this layout.

use std::ops::{Add, Deref, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for PSD decisions (scaled by `max(1, ‖H‖₂)`).
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Largest anti-Hermitian part (relative to `max(1, ‖X‖_F)`) that the
/// Hermitian constructor will silently symmetrize away.
pub const HERMITIAN_REPAIR_LIMIT: f64 = 1e-8;

const EIGH_RESIDUAL: f64 = 1e-10;
const EIGH_MAX_SWEEPS: usize = 10_000;

/// A dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by arithmetic on already-validated inputs.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        debug_assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_row_major(r, c, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Matrix unit `e_ij` in `M_n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        Self(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self(m)
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &DVector<C64>) -> Self {
        Self(v * v.adjoint())
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols(), other.rows());
        assert_eq!(self.rows(), other.cols());
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn block(&self, i: usize, j: usize, block_rows: usize, block_cols: usize) -> Self {
        Self(
            self.0
                .view((i * block_rows, j * block_cols), (block_rows, block_cols))
                .into_owned(),
        )
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;
    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<[f64; 2]>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let data = (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| [self.0[(i, j)].re, self.0[(i, j)].im])
                    .collect()
            })
            .collect();
        MatrixJson { rows: self.rows(), cols: self.cols(), data }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.data.len() != raw.rows || raw.data.iter().any(|r| r.len() != raw.cols) {
            return Err(D::Error::custom(format!(
                "matrix data does not match declared shape {}x{}",
                raw.rows, raw.cols
            )));
        }
        let entries = raw
            .data
            .into_iter()
            .flatten()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(raw.rows, raw.cols, entries).map_err(D::Error::custom)
    }
}

/// A Hermitian matrix. Construction symmetrizes small anti-Hermitian
/// round-off and keeps the size of what was removed.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    matrix: ComplexMatrix,
    defect: f64,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let adj = m.0.adjoint();
        let defect = (&m.0 - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > HERMITIAN_REPAIR_LIMIT * m.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        let sym = (&m.0 + adj).scale(0.5);
        Ok(Self { matrix: ComplexMatrix(sym), defect })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n), defect: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Largest `|X_ij − conj(X_ji)|` before symmetrization.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// An orthogonal projection `E = E² = E*`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    matrix: HermitianMatrix,
    rank: usize,
}

impl Projection {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let e = m.matrix().as_dmatrix();
        let idem = (e * e - e).norm();
        if idem > 1e-10 {
            return Err(Error::NotProjection(format!("‖E² − E‖_F = {idem:.3e}")));
        }
        if m.defect() > 1e-12 {
            return Err(Error::NotProjection(format!("‖E − E*‖ = {:.3e}", m.defect())));
        }
        let tr = m.trace();
        let rank = tr.round();
        if (tr - rank).abs() > 1e-10 {
            return Err(Error::NotProjection(format!("trace {tr} is not an integer")));
        }
        Ok(Self { matrix: m, rank: rank as usize })
    }

    /// Projection onto the span of the given orthonormal columns.
    pub fn from_orthonormal_columns(cols: &DMatrix<C64>) -> Result<Self> {
        let p = cols * cols.adjoint();
        Self::new(HermitianMatrix::new(ComplexMatrix::from_dmatrix(p)?)?)
    }

    /// Spectral projection of `H` onto eigenvalues above `tol · max(1, ‖H‖₂)`.
    pub fn spectral(h: &HermitianMatrix, tol: f64) -> Result<Self> {
        let eig = eigh(h)?;
        let thresh = tol * eig.spectral_norm().max(1.0);
        let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > thresh).collect();
        let n = h.dim();
        let mut cols = DMatrix::zeros(n, keep.len());
        for (c, &k) in keep.iter().enumerate() {
            cols.set_column(c, &eig.vectors.column(k));
        }
        Self::from_orthonormal_columns(&cols)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    /// An orthonormal basis of the range, as `dim × rank` columns ordered by
    /// eigenvalue index.
    pub fn range_basis(&self) -> Result<DMatrix<C64>> {
        let eig = eigh(&self.matrix)?;
        let n = self.dim();
        let mut cols = DMatrix::zeros(n, self.rank);
        for c in 0..self.rank {
            cols.set_column(c, &eig.vectors.column(n - self.rank + c));
        }
        Ok(cols)
    }
}

/// Eigendecomposition `H = U diag(λ) U*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Eigh {
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let lambda = self.values[k];
            scaled.column_mut(k).scale_mut(lambda);
        }
        scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition, checked by reconstruction.
pub fn eigh(h: &HermitianMatrix) -> Result<Eigh> {
    let m = h.matrix().as_dmatrix();
    eigh_raw(m)
}

pub(crate) fn eigh_raw(m: &DMatrix<C64>) -> Result<Eigh> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigh { values: vec![], vectors: DMatrix::zeros(0, 0) });
    }
    let scale = m.norm().max(1.0);
    let Some(dec) = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGH_MAX_SWEEPS) else {
        return Err(Error::EigenFailure { residual: f64::INFINITY });
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &k) in order.iter().enumerate() {
        vectors.set_column(c, &dec.eigenvectors.column(k));
    }
    let out = Eigh { values, vectors };
    let residual = (out.reconstruct() - m).norm();
    if !residual.is_finite() || residual > EIGH_RESIDUAL * scale {
        return Err(Error::EigenFailure { residual });
    }
    Ok(out)
}

/// Result of [`is_psd`].
#[derive(Clone, Debug)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector `x` with `x* H x = min_eigenvalue`, present when the
    /// test fails.
    pub witness: Option<DVector<C64>>,
    pub spectrum: Vec<f64>,
}

/// PSD test with relative tolerance: passes iff `λ_min ≥ −tol · max(1, ‖H‖₂)`.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<PsdCheck> {
    assert!(tol >= 0.0, "tolerance must be non-negative");
    let eig = eigh(h)?;
    Ok(psd_from_eigh(&eig, tol))
}

pub(crate) fn psd_from_eigh(eig: &Eigh, tol: f64) -> PsdCheck {
    let min = eig.min();
    let ok = min >= -tol * eig.spectral_norm().max(1.0);
    PsdCheck {
        is_psd: ok,
        min_eigenvalue: min,
        witness: (!ok).then(|| eig.vectors.column(0).into_owned()),
        spectrum: eig.values.clone(),
    }
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clamped to 0).
pub fn psd_part(h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let eig = eigh_raw(&hermitize(h))?;
    let mut scaled = eig.vectors.clone();
    for k in 0..eig.values.len() {
        let lambda = eig.values[k].max(0.0);
        scaled.column_mut(k).scale_mut(lambda);
    }
    Ok(scaled * eig.vectors.adjoint())
}

pub(crate) fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Which tensor factor a partial transpose acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

/// Partial transpose of `X` on `C^{d_A} ⊗ C^{d_B}`.
pub fn partial_transpose(x: &ComplexMatrix, d_a: usize, d_b: usize, side: Side) -> Result<ComplexMatrix> {
    let d = d_a * d_b;
    if x.rows() != d || x.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose on {d_a}x{d_b} needs a {d}x{d} matrix, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(ComplexMatrix(partial_transpose_raw(x.as_dmatrix(), d_a, d_b, side)))
}

pub(crate) fn partial_transpose_raw(x: &DMatrix<C64>, d_a: usize, d_b: usize, side: Side) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(d_a * d_b, d_a * d_b);
    for i in 0..d_a {
        for j in 0..d_a {
            for s in 0..d_b {
                for t in 0..d_b {
                    let (bi, bj, bs, bt) = match side {
                        Side::Second => (i, j, t, s),
                        Side::First => (j, i, s, t),
                    };
                    out[(i * d_b + s, j * d_b + t)] = x[(bi * d_b + bs, bj * d_b + bt)];
                }
            }
        }
    }
    out
}

/// Kronecker product `A ⊗ B`, first factor slow.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// `SWAP` on `C^n ⊗ C^n`.
pub fn swap(n: usize) -> ComplexMatrix {
    let mut m = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + j, j * n + i)] = C64::new(1.0, 0.0);
        }
    }
    ComplexMatrix(m)
}

/// Unnormalized maximally entangled vector `Ω = Σ_i e_i ⊗ e_i`.
pub fn omega(n: usize) -> DVector<C64> {
    let mut v = DVector::zeros(n * n);
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    v
}
