//! Dense complex linear-algebra kernels and the Gaussian Q-function.
//!
//! Matrices here are small, at most `(M+1)×(M+1)` with `M` a few hundred, so
//! the eigensolver favours robustness: it delegates to nalgebra's Hermitian
//! tridiagonalisation with implicit symmetric QR sweeps and then sorts the
//! spectrum in descending order.

use nalgebra::{DVector, SymmetricEigen};

use crate::{CMatrix, Error, Result, C64};

/// Relative tolerance used by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const EIG_MAX_SWEEPS: usize = 10_000;

/// A square complex matrix equal to its conjugate transpose (within tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Wraps `m` after checking `max|A - Aᴴ| ≤ 1e-10·(1 + max|A|)`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_deviation(&m);
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > HERMITIAN_TOL * (1.0 + scale) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self(m))
    }

    /// Replaces `m` by its Hermitian part `(m + mᴴ)/2`.
    pub fn symmetrized(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(hermitian_part(&m)))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
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

    /// Real trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.0[(k, k)].re).sum()
    }

    /// `Re tr(self · other)` for Hermitian `other`, without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> f64 {
        trace_product(&self.0, other).re
    }
}

impl From<HermitianMatrix> for CMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.0
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    /// Unitary matrix whose k-th column pairs with `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Largest eigenvalue.
    pub fn top_value(&self) -> f64 {
        self.values[0]
    }

    /// Unit eigenvector of the largest eigenvalue (any vector of the top
    /// eigenspace when it is degenerate).
    pub fn top_vector(&self) -> crate::CVector {
        self.vectors.column(0).into_owned()
    }

    /// `U·diag(f(λ))·Uᴴ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::from(f(self.values[k]));
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition `A = U·diag(λ)·Uᴴ` with `λ` descending.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<HermitianEigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(HermitianEigen {
            values: DVector::zeros(0),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(a.0.clone(), f64::EPSILON, EIG_MAX_SWEEPS)
        .ok_or(Error::EigenNonConvergence(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&k| eig.eigenvectors.column(k))
            .collect::<Vec<_>>(),
    );
    Ok(HermitianEigen { values, vectors })
}

/// Frobenius-nearest positive semidefinite matrix: negative eigenvalues are
/// clamped to zero.
pub fn psd_project(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(HermitianMatrix(hermitian_part(
        &eig.reconstruct_with(|l| l.max(0.0)),
    )))
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `(m + mᴴ)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::from(0.5)
}

/// `max |m - mᴴ|` entrywise.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `tr(a·b)` in O(n²).
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
