use std::f64::consts::PI;

use faer::Mat;

use super::SymMatrix;
use crate::error::{domain, Result};
use crate::model::NoiseConvention;

/// Orthonormal DCT-VIII matrix C_{ij} = 2/√(2n+1) · cos((i − 1/2) u_j),
/// u_j = π(2j − 1)/(2n + 1). It is symmetric and diagonalises ΔΔᵗ for the
/// backward difference Δ; reversing its rows diagonalises ΔᵗΔ.
#[derive(Debug, Clone)]
pub struct DctBasis {
    matrix: Mat<f64>,
    nodes: Vec<f64>,
}

impl DctBasis {
    pub fn new(n: usize) -> Self {
        let m = (2 * n + 1) as f64;
        let nodes: Vec<f64> = (1..=n).map(|j| PI * (2 * j - 1) as f64 / m).collect();
        let norm = 2.0 / m.sqrt();
        // Integer phase (2i+1)(2j+1) keeps the matrix exactly symmetric.
        let matrix = Mat::from_fn(n, n, |i, j| {
            norm * (PI * ((2 * i + 1) * (2 * j + 1)) as f64 / (2.0 * m)).cos()
        });
        Self { matrix, nodes }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// The frequencies u_1, …, u_n.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    /// The basis for a convention: C for ΔΔᵗ, C with its rows reversed for ΔᵗΔ.
    pub fn basis_for(&self, convention: NoiseConvention) -> Mat<f64> {
        let n = self.order();
        match convention {
            NoiseConvention::DeltaDeltaT => self.matrix.clone(),
            NoiseConvention::DeltaTDelta => Mat::from_fn(n, n, |i, j| self.matrix[(n - 1 - i, j)]),
        }
    }
}

/// Spectral decomposition Cov(Y) = basis · diag(eigenvalues) · basisᵗ.
#[derive(Debug, Clone)]
pub struct NoiseDiagonalization {
    pub eigenvalues: Vec<f64>,
    pub basis: Mat<f64>,
}

/// Eigenvalues 4^K τ² sin^{2K}(u_i/2) with the DCT-VIII basis (rows reversed for ΔᵗΔ).
pub fn dct_diagonalize_noise(n: usize, k: u32, tau: f64, convention: NoiseConvention) -> NoiseDiagonalization {
    let dct = DctBasis::new(n);
    let eigenvalues = dct
        .nodes()
        .iter()
        .map(|&u| tau * tau * (2.0 * (0.5 * u).sin()).powi(2 * k as i32))
        .collect();
    NoiseDiagonalization { eigenvalues, basis: dct.basis_for(convention) }
}

/// D_n(g) = C · diag(g(u_1), …, g(u_n)) · C.
pub fn dn_matrix(g: impl Fn(f64) -> f64, n: usize) -> Result<SymMatrix> {
    let dct = DctBasis::new(n);
    let values: Vec<f64> = dct.nodes().iter().map(|&u| g(u)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return domain(format!("g is not finite at u_{} = {}", i + 1, dct.nodes()[i]));
    }
    let c = dct.matrix();
    let scaled = Mat::from_fn(n, n, |i, j| c[(i, j)] * values[j]);
    let product = &scaled * c;
    Ok(SymMatrix::from_mat(product.as_ref()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diff_cov;

    fn orthonormality_error(n: usize) -> f64 {
        let c = DctBasis::new(n);
        let ctc = c.matrix().transpose() * c.matrix();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((ctc[(i, j)] - target).abs());
            }
        }
        err
    }

    #[test]
    fn basis_is_orthonormal_and_symmetric() {
        for n in [1, 7, 64, 257] {
            assert!(orthonormality_error(n) <= 1e-12, "n = {n}");
        }
        let c = DctBasis::new(9);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(c.matrix()[(i, j)], c.matrix()[(j, i)]);
            }
        }
    }

    #[test]
    fn single_node_case() {
        let d = dct_diagonalize_noise(1, 1, 1.0, NoiseConvention::DeltaTDelta);
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reconstructs_difference_covariance() {
        for convention in [NoiseConvention::DeltaTDelta, NoiseConvention::DeltaDeltaT] {
            let n = 20;
            let d = dct_diagonalize_noise(n, 2, 1.3, convention);
            let scaled = Mat::from_fn(n, n, |i, j| d.basis[(i, j)] * d.eigenvalues[j]);
            let rebuilt = SymMatrix::from_mat((&scaled * d.basis.transpose()).as_ref());
            assert!(rebuilt.max_abs_diff(&diff_cov(n, 2, 1.3, convention)) < 1e-12);
        }
    }

    #[test]
    fn dn_of_one_is_identity() {
        let d = dn_matrix(|_| 1.0, 16).unwrap();
        assert!(d.max_abs_diff(&SymMatrix::identity(16)) < 1e-13);
    }

    #[test]
    fn dn_is_multiplicative() {
        let n = 24;
        let g1 = |u: f64| 1.0 + u;
        let g2 = |u: f64| u.cos() + 2.0;
        let a = dn_matrix(g1, n).unwrap();
        let b = dn_matrix(g2, n).unwrap();
        let ab = SymMatrix::from_mat((a.as_mat() * b.as_mat()).as_ref());
        let direct = dn_matrix(|u| g1(u) * g2(u), n).unwrap();
        assert!(ab.max_abs_diff(&direct) < 1e-10);
    }

    #[test]
    fn dn_of_noise_symbol_is_second_difference() {
        let d = dn_matrix(|u| 4.0 * (0.5 * u).sin().powi(2), 30).unwrap();
        assert!(d.max_abs_diff(&diff_cov(30, 1, 1.0, NoiseConvention::DeltaDeltaT)) < 1e-10);
        // The unreversed basis does not diagonalise the other ordering.
        assert!(d.max_abs_diff(&diff_cov(30, 1, 1.0, NoiseConvention::DeltaTDelta)) > 0.5);
    }

    #[test]
    fn non_finite_symbol_rejected() {
        assert!(dn_matrix(|u| 1.0 / (u - PI / 3.0), 1).is_err());
    }
}
