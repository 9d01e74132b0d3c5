//! Dense symmetric matrices, difference-noise covariances, the DCT-VIII
//! basis and the whitening transform.

mod dct;
mod whiten;

use faer::{Mat, MatRef, Side};

pub use dct::{dct_diagonalize_noise, dn_matrix, DctBasis, NoiseDiagonalization};
pub use whiten::{whiten, WhitenedSystem, NEGATIVE_EIGENVALUE_TOLERANCE};

use crate::error::{Error, Result};
use crate::model::NoiseConvention;

/// A dense symmetric matrix; `set` writes both triangles so symmetry is exact.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    inner: Mat<f64>,
}

impl PartialEq for SymMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { inner: Mat::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: Mat::identity(n, n) }
    }

    /// Build from the lower triangle `f(i, j)`, `j <= i`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            for i in j..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetrise an arbitrary square matrix as (M + Mᵗ)/2.
    pub fn from_mat(m: MatRef<'_, f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        let n = m.nrows();
        Self::from_lower_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn order(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.inner[(i, j)] = v;
        self.inner[(j, i)] = v;
    }

    pub fn as_mat(&self) -> MatRef<'_, f64> {
        self.inner.as_ref()
    }

    pub fn into_mat(self) -> Mat<f64> {
        self.inner
    }

    pub fn scale(&mut self, c: f64) {
        let n = self.order();
        for j in 0..n {
            for i in 0..n {
                self.inner[(i, j)] *= c;
            }
        }
    }

    pub fn add_assign(&mut self, other: &SymMatrix) {
        assert_eq!(self.order(), other.order(), "order mismatch");
        let n = self.order();
        for j in 0..n {
            for i in 0..n {
                self.inner[(i, j)] += other.inner[(i, j)];
            }
        }
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.order(), other.order(), "order mismatch");
        let n = self.order();
        let mut d: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                d = d.max((self.inner[(i, j)] - other.inner[(i, j)]).abs());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::zeros(self.order()))
    }

    /// y = M x, summed in a fixed order.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(self.as_mat(), x)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut ev = self
            .inner
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        ev.reverse();
        Ok(ev)
    }

    /// Lower Cholesky factor L with L Lᵗ = M.
    pub fn cholesky(&self) -> Result<Mat<f64>> {
        let llt = self
            .inner
            .llt(Side::Lower)
            .map_err(|e| Error::NotPositiveDefinite(format!("Cholesky failed for order {}: {e:?}", self.order())))?;
        Ok(llt.L().to_owned())
    }
}

/// y = A x for a dense matrix, summed by column in a fixed order.
pub fn mat_vec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len(), "dimension mismatch");
    let mut y = vec![0.0; a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += a[(i, j)] * xj;
        }
    }
    y
}

/// T_n(γ) with entries γ_{|i−j|}.
pub fn toeplitz(gammas: &[f64]) -> SymMatrix {
    SymMatrix::from_lower_fn(gammas.len(), |i, j| gammas[i - j])
}

/// τ² (ΔΔᵗ)^K or τ² (ΔᵗΔ)^K, with Δ the backward difference (x₀ = 0).
///
/// The integer matrix is formed first and scaled once, so entries are exact
/// whenever they are representable.
pub fn diff_cov(n: usize, k: u32, tau: f64, convention: NoiseConvention) -> SymMatrix {
    let mut m = Mat::<f64>::identity(n, n);
    // Diagonal of the tridiagonal factor; off-diagonals are −1.
    let diag = |i: usize| -> f64 {
        match convention {
            NoiseConvention::DeltaTDelta if i == n - 1 => 1.0,
            NoiseConvention::DeltaDeltaT if i == 0 => 1.0,
            _ => 2.0,
        }
    };
    for _ in 0..k {
        let mut next = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let mut v = diag(i) * m[(i, j)];
                if i > 0 {
                    v -= m[(i - 1, j)];
                }
                if i + 1 < n {
                    v -= m[(i + 1, j)];
                }
                next[(i, j)] = v;
            }
        }
        m = next;
    }
    let t2 = tau * tau;
    SymMatrix::from_lower_fn(n, |i, j| t2 * m[(i, j)])
}
