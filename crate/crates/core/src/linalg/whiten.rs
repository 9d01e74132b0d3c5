use faer::{Mat, Side};

use super::SymMatrix;
use crate::error::{Error, Result};

/// Eigenvalues of the whitened signal covariance down to
/// −NEGATIVE_EIGENVALUE_TOLERANCE · λ₁ are treated as rounding and set to zero.
pub const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-8;

/// Joint diagonalisation of (Cov(X), Cov(Y)).
///
/// With Cov(Y) = L Lᵗ (so A = Lᵗ) and L⁻¹ Cov(X) L⁻ᵗ = D Λ Dᵗ, the map
/// z ↦ Dᵗ L⁻¹ z sends the noise covariance to I and the signal covariance to Λ.
#[derive(Debug, Clone)]
pub struct WhitenedSystem {
    chol: Mat<f64>,
    basis: Mat<f64>,
    eigenvalues: Vec<f64>,
}

impl WhitenedSystem {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// λ₁ ≥ … ≥ λₙ ≥ 0.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Lower Cholesky factor L of Cov(Y).
    pub fn cholesky_lower(&self) -> &Mat<f64> {
        &self.chol
    }

    /// Upper triangular A with AᵗA = Cov(Y).
    pub fn a_factor(&self) -> Mat<f64> {
        self.chol.transpose().to_owned()
    }

    /// Orthogonal D; column i pairs with eigenvalue i.
    pub fn basis(&self) -> &Mat<f64> {
        &self.basis
    }

    /// (A⁻¹D)ᵗ z via one triangular solve and a product with Dᵗ.
    pub fn transform(&self, z: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        if z.len() != n {
            return Err(Error::InvalidData(format!("expected {n} observations, got {}", z.len())));
        }
        if let Some(i) = z.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("observation {} is not finite", i + 1)));
        }
        let mut w = Mat::from_fn(n, 1, |i, _| z[i]);
        self.chol.solve_lower_triangular_in_place(&mut w);
        let out = self.basis.transpose() * &w;
        Ok((0..n).map(|i| out[(i, 0)]).collect())
    }
}

/// Whiten `cov_x` against `cov_y`.
pub fn whiten(cov_x: &SymMatrix, cov_y: &SymMatrix) -> Result<WhitenedSystem> {
    let n = cov_y.order();
    if cov_x.order() != n {
        return Err(Error::InvalidData(format!(
            "covariance orders differ: {} vs {n}",
            cov_x.order()
        )));
    }
    let chol = cov_y.cholesky()?;
    // W = L⁻¹ Cov(X) L⁻ᵗ, formed as L⁻¹ (L⁻¹ Cov(X))ᵗ using symmetry of Cov(X).
    let mut b = cov_x.as_mat().to_owned();
    chol.solve_lower_triangular_in_place(&mut b);
    let mut w = b.transpose().to_owned();
    chol.solve_lower_triangular_in_place(&mut w);
    let w = SymMatrix::from_mat(w.as_ref());

    let eig = w
        .as_mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    // Ascending from the solver; flip to descending.
    let mut eigenvalues: Vec<f64> = (0..n).rev().map(|i| s[i]).collect();
    let basis = Mat::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);

    let largest = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    for v in eigenvalues.iter_mut() {
        if *v < 0.0 {
            if *v < -NEGATIVE_EIGENVALUE_TOLERANCE * largest {
                return Err(Error::NegativeEigenvalue { value: *v, largest });
            }
            *v = 0.0;
        }
    }
    Ok(WhitenedSystem { chol, basis, eigenvalues })
}
