use faer::linalg::solvers::Solve;
use faer::Side;

use crate::error::{Error, Result};
use crate::linalg::{whiten, WhitenedSystem};
use crate::model::ModelSpec;
use crate::special::CompensatedSum;

/// ½ Σᵢ λᵢ² n^{−4β} / (σ² λᵢ n^{−2β} + 1)², summed in index order.
pub fn fisher_from_eigenvalues(eigenvalues: &[f64], n: usize, beta: f64, sigma: f64) -> f64 {
    let s = (n as f64).powf(-2.0 * beta);
    let u = sigma * sigma;
    let total: CompensatedSum = eigenvalues
        .iter()
        .map(|&l| {
            let d = u * l * s + 1.0;
            let r = l * s / d;
            r * r
        })
        .collect();
    0.5 * total.value()
}

/// Whiten the model's covariances.
pub fn whiten_spec(spec: &ModelSpec) -> Result<WhitenedSystem> {
    spec.validate()?;
    whiten(&spec.cov_x()?, &spec.cov_y())
}

/// Largest n accepted by the dense exact method.
pub const MAX_EXACT_ORDER: usize = 16_384;

/// Exact finite-n Fisher information for σ².
pub fn fisher_exact(spec: &ModelSpec) -> Result<f64> {
    if spec.n > MAX_EXACT_ORDER {
        return Err(Error::Domain(format!(
            "exact method needs a dense n x n eigendecomposition; n = {} exceeds {MAX_EXACT_ORDER}",
            spec.n
        )));
    }
    let system = whiten_spec(spec)?;
    let value = fisher_from_system(spec, &system);
    #[cfg(debug_assertions)]
    if spec.n <= 256 {
        let trace = fisher_trace(spec)?;
        debug_assert!(
            (value - trace).abs() <= 1e-6 * trace.abs().max(f64::MIN_POSITIVE),
            "eigenvalue form {value} disagrees with trace form {trace}"
        );
    }
    Ok(value)
}

pub fn fisher_from_system(spec: &ModelSpec, system: &WhitenedSystem) -> f64 {
    fisher_from_eigenvalues(system.eigenvalues(), spec.n, spec.beta, spec.sigma)
}

/// ½ tr([n^{−2β} Cov(X) Cov(Z)⁻¹]²), the textbook form; O(n³) and only
/// meant as a cross-check.
pub fn fisher_trace(spec: &ModelSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    let mut sx = spec.cov_x()?;
    sx.scale(spec.scale_factor());
    let cz = spec.cov_z()?;
    let llt = cz
        .as_mat()
        .llt(Side::Lower)
        .map_err(|e| Error::NotPositiveDefinite(format!("Cov(Z): {e:?}")))?;
    // B = Cov(Z)⁻¹ n^{−2β} Cov(X) = Mᵗ, and tr(M²) = tr(B²).
    let mut b = sx.into_mat();
    llt.solve_in_place(&mut b);
    let mut tr = CompensatedSum::new();
    for i in 0..n {
        for j in 0..n {
            tr.add(b[(i, j)] * b[(j, i)]);
        }
    }
    Ok(0.5 * tr.value())
}
