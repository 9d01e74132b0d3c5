//! Oracle and sample-splitting estimators of σ² in the whitened model.
//!
//! After whitening, Z̃ᵢ are independent with E Z̃ᵢ² = σ² n^{−2β} λᵢ + 1. Every
//! estimator here is an instance of
//!
//! ```text
//! (2 I_u^B)⁻¹ Σ_{i∈B} λᵢ n^{−2β} (qᵢ − 1) / (u n^{−2β} λᵢ + 1)²
//! ```
//!
//! with qᵢ = Z̃ᵢ², a weight parameter u and an index set B.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fisher::whiten_spec;
use crate::linalg::WhitenedSystem;
use crate::model::ModelSpec;
use crate::special::CompensatedSum;

/// Smallest full-sample I₁ⁿ for which a split is attempted.
pub const DEFAULT_MIN_INFORMATION: f64 = 1.0;

/// I_u^B = ½ Σ_{i∈B} λᵢ² n^{−4β} / (u λᵢ n^{−2β} + 1)².
pub fn partial_fisher(
    u: f64,
    indices: impl IntoIterator<Item = usize>,
    eigenvalues: &[f64],
    n: usize,
    beta: f64,
) -> f64 {
    debug_assert!(u > 0.0, "weight parameter must be positive");
    let s = (n as f64).powf(-2.0 * beta);
    let total: CompensatedSum = indices
        .into_iter()
        .map(|i| {
            let r = eigenvalues[i] * s / (u * eigenvalues[i] * s + 1.0);
            r * r
        })
        .collect();
    0.5 * total.value()
}

/// The weighted estimator on index set B with weight parameter u, given
/// squared whitened observations (or their expectations).
///
/// Returns NaN when I_u^B = 0.
pub fn plug_in_estimate(
    u: f64,
    indices: Range<usize>,
    eigenvalues: &[f64],
    squares: &[f64],
    n: usize,
    beta: f64,
) -> f64 {
    let s = (n as f64).powf(-2.0 * beta);
    let info = partial_fisher(u, indices.clone(), eigenvalues, n, beta);
    let total: CompensatedSum = indices
        .map(|i| {
            let d = u * eigenvalues[i] * s + 1.0;
            eigenvalues[i] * s * (squares[i] - 1.0) / (d * d)
        })
        .collect();
    if info > 0.0 {
        total.value() / (2.0 * info)
    } else {
        f64::NAN
    }
}

/// Tuning knobs for the split and the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitOptions {
    /// Refuse to split when I₁ⁿ falls below this.
    pub min_information: f64,
    /// Fixed truncation level δ in (0, 1]; default (I₁^{Aₙ})^{−1/8}.
    pub delta: Option<f64>,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { min_information: DEFAULT_MIN_INFORMATION, delta: None }
    }
}

/// Aₙ = the first k* indices in descending-eigenvalue order; Aₙᶜ is the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub n: usize,
    pub k_star: usize,
    /// I₁ restricted to Aₙ.
    pub i1_an: f64,
    /// I₁ over all indices.
    pub i1_n: f64,
    pub delta_n: f64,
}

impl SplitPlan {
    pub fn a_n(&self) -> Range<usize> {
        0..self.k_star
    }

    pub fn complement(&self) -> Range<usize> {
        self.k_star..self.n
    }
}

/// Choose Aₙ as the shortest prefix with I₁^{Aₙ} ≥ √I₁ⁿ.
///
/// `eigenvalues` must be sorted in descending order. Each term of I₁ is
/// below ½, so √I₁ⁿ ≤ I₁^{Aₙ} < √I₁ⁿ + 1.
pub fn make_split(eigenvalues: &[f64], n: usize, beta: f64) -> Result<SplitPlan> {
    make_split_with(eigenvalues, n, beta, &SplitOptions::default())
}

pub fn make_split_with(eigenvalues: &[f64], n: usize, beta: f64, opts: &SplitOptions) -> Result<SplitPlan> {
    if eigenvalues.len() != n {
        return domain(format!("expected {n} eigenvalues, got {}", eigenvalues.len()));
    }
    if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
        return domain("eigenvalues must be sorted in descending order");
    }
    if let Some(d) = opts.delta {
        if !(d > 0.0 && d <= 1.0) {
            return domain(format!("truncation level must lie in (0, 1], got {d}"));
        }
    }
    let i1_n = partial_fisher(1.0, 0..n, eigenvalues, n, beta);
    let insufficient = || Error::InsufficientInformation { information: i1_n, required: opts.min_information };
    if !(i1_n >= opts.min_information) {
        return Err(insufficient());
    }
    let target = i1_n.sqrt();
    let s = (n as f64).powf(-2.0 * beta);
    let mut running = CompensatedSum::new();
    let mut k_star = n;
    for (i, &l) in eigenvalues.iter().enumerate() {
        let r = l * s / (l * s + 1.0);
        running.add(0.5 * r * r);
        if running.value() >= target {
            k_star = i + 1;
            break;
        }
    }
    // The complement must carry information for the final step.
    if k_star >= n || eigenvalues[k_star] <= 0.0 {
        return Err(insufficient());
    }
    let i1_an = partial_fisher(1.0, 0..k_star, eigenvalues, n, beta);
    let delta_n = opts.delta.unwrap_or_else(|| i1_an.powf(-0.125).min(1.0));
    Ok(SplitPlan { n, k_star, i1_an, i1_n, delta_n })
}

/// Eigenvalue range and set sizes, for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub a_n_size: usize,
    pub complement_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    /// V, the unweighted-by-σ preliminary estimate on Aₙ.
    pub preliminary_v: f64,
    /// V clamped to [δₙ, 1/δₙ].
    pub sigma2_tilde: f64,
    pub sigma2_hat: f64,
    /// I^{Aₙᶜ} evaluated at σ̃².
    pub plugin_fisher: f64,
    pub split: SplitPlan,
    pub diagnostics: Diagnostics,
}

/// The oracle estimator from already whitened observations, using the true σ.
pub fn oracle_from_whitened(z_tilde: &[f64], eigenvalues: &[f64], spec: &ModelSpec) -> f64 {
    let squares: Vec<f64> = z_tilde.iter().map(|z| z * z).collect();
    plug_in_estimate(spec.sigma * spec.sigma, 0..spec.n, eigenvalues, &squares, spec.n, spec.beta)
}

/// The oracle estimator; needs the true σ and is meant for testing.
pub fn oracle_estimate(z: &[f64], system: &WhitenedSystem, spec: &ModelSpec) -> Result<f64> {
    let z_tilde = system.transform(z)?;
    Ok(oracle_from_whitened(&z_tilde, system.eigenvalues(), spec))
}

/// Two-step estimate from squared whitened observations and a split.
pub fn estimate_from_squares(
    squares: &[f64],
    eigenvalues: &[f64],
    plan: &SplitPlan,
    beta: f64,
) -> Result<EstimateResult> {
    let n = plan.n;
    if squares.len() != n || eigenvalues.len() != n {
        return Err(Error::InvalidData(format!(
            "expected {n} values, got {} squares and {} eigenvalues",
            squares.len(),
            eigenvalues.len()
        )));
    }
    let v = plug_in_estimate(1.0, plan.a_n(), eigenvalues, squares, n, beta);
    let tilde = v.max(plan.delta_n).min(1.0 / plan.delta_n);
    let plugin_fisher = partial_fisher(tilde, plan.complement(), eigenvalues, n, beta);
    let hat = plug_in_estimate(tilde, plan.complement(), eigenvalues, squares, n, beta);
    if !hat.is_finite() || !v.is_finite() {
        return Err(Error::InvalidData(format!("estimate is not finite (V = {v}, final = {hat})")));
    }
    Ok(EstimateResult {
        preliminary_v: v,
        sigma2_tilde: tilde,
        sigma2_hat: hat,
        plugin_fisher,
        split: plan.clone(),
        diagnostics: Diagnostics {
            lambda_max: eigenvalues[0],
            lambda_min: eigenvalues[n - 1],
            a_n_size: plan.k_star,
            complement_size: n - plan.k_star,
        },
    })
}

/// Estimate σ² from raw observations with a precomputed whitening and split.
pub fn estimate_with_system(z: &[f64], system: &WhitenedSystem, plan: &SplitPlan, beta: f64) -> Result<EstimateResult> {
    let squares: Vec<f64> = system.transform(z)?.into_iter().map(|v| v * v).collect();
    estimate_from_squares(&squares, system.eigenvalues(), plan, beta)
}

/// Estimate σ² from raw observations. The σ field of `spec` is ignored.
pub fn estimate(z: &[f64], spec: &ModelSpec) -> Result<EstimateResult> {
    estimate_with(z, spec, &SplitOptions::default())
}

pub fn estimate_with(z: &[f64], spec: &ModelSpec, opts: &SplitOptions) -> Result<EstimateResult> {
    if z.len() != spec.n {
        return Err(Error::InvalidData(format!("expected {} observations, got {}", spec.n, z.len())));
    }
    // Whitening does not depend on σ; fix it at one so any value is accepted.
    let unit = spec.with_noise(1.0, spec.tau);
    let system = whiten_spec(&unit)?;
    let plan = make_split_with(system.eigenvalues(), spec.n, spec.beta, opts)?;
    estimate_with_system(z, &system, &plan, spec.beta)
}

/// E Z̃ᵢ² = σ² n^{−2β} λᵢ + 1 for each index.
pub fn expected_squares(eigenvalues: &[f64], spec: &ModelSpec) -> Vec<f64> {
    let s = spec.signal_factor();
    eigenvalues.iter().map(|&l| s * l + 1.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::fisher_exact;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn system(spec: &ModelSpec) -> WhitenedSystem {
        whiten_spec(spec).unwrap()
    }

    #[test]
    fn partial_fisher_basics() {
        let ev = [3.0, 2.0, 0.5];
        assert_eq!(partial_fisher(1.0, 0..0, &ev, 3, 0.2), 0.0);
        let c = 2.0;
        let (n, beta, u) = (10usize, 0.3, 0.7);
        let flat = vec![c; n];
        let s = (n as f64).powf(-2.0 * beta);
        let expected = 4.0 * c * c * s * s / (2.0 * (u * c * s + 1.0).powi(2));
        assert_relative_eq!(partial_fisher(u, 2..6, &flat, n, beta), expected, max_relative = 1e-14);
    }

    #[test]
    fn full_set_matches_exact_information() {
        let spec = ModelSpec::fbm_wn(0.4, 1.3, 0.8, 128).unwrap();
        let sys = system(&spec);
        let i = partial_fisher(spec.sigma * spec.sigma, 0..spec.n, sys.eigenvalues(), spec.n, spec.beta);
        assert_relative_eq!(i, fisher_exact(&spec).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn flat_split_arithmetic() {
        // With β = 0 and λ ≡ 1 every term of I₁ is c = ⅛, so I₁ⁿ = nc.
        let n = 200usize;
        let c = 0.125;
        let plan = make_split(&vec![1.0; n], n, 0.0).unwrap();
        let i1 = n as f64 * c;
        assert_relative_eq!(plan.i1_n, i1, max_relative = 1e-14);
        assert_eq!(plan.k_star, (i1.sqrt() / c).ceil() as usize);
        assert!(plan.i1_an >= i1.sqrt() && plan.i1_an <= i1.sqrt() + 1.0);
    }

    #[test]
    fn split_is_additive() {
        let spec = ModelSpec::fbm_wn(0.5, 1.0, 1.0, 512).unwrap();
        let sys = system(&spec);
        let plan = make_split(sys.eigenvalues(), spec.n, spec.beta).unwrap();
        let rest = partial_fisher(1.0, plan.complement(), sys.eigenvalues(), spec.n, spec.beta);
        assert_relative_eq!(plan.i1_an + rest, plan.i1_n, max_relative = 1e-12);
        assert!(plan.delta_n > 0.0 && plan.delta_n <= 1.0);
    }

    #[test]
    fn little_information_is_refused() {
        let ev = vec![1e-3; 16];
        match make_split(&ev, 16, 0.0) {
            Err(Error::InsufficientInformation { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsorted_eigenvalues_are_rejected() {
        assert!(make_split(&[1.0, 2.0], 2, 0.0).is_err());
    }

    #[test]
    fn oracle_at_zero_data() {
        let spec = ModelSpec::fbm_wn(0.5, 1.1, 1.0, 64).unwrap();
        let sys = system(&spec);
        let got = oracle_estimate(&vec![0.0; 64], &sys, &spec).unwrap();
        let s = spec.scale_factor();
        let u = spec.sigma * spec.sigma;
        let sum: f64 = sys.eigenvalues().iter().map(|&l| l * s / (u * s * l + 1.0).powi(2)).sum();
        let i = fisher_exact(&spec).unwrap();
        // Every term contributes −wᵢ; there is no separate σ² offset.
        assert_relative_eq!(got, -sum / (2.0 * i), max_relative = 1e-12);
    }

    #[test]
    fn substitution_returns_sigma_squared() {
        let spec = ModelSpec::fbm_wn(0.3, 1.4, 0.9, 256).unwrap();
        let sys = system(&spec);
        let ev = sys.eigenvalues();
        let q = expected_squares(ev, &spec);
        let truth = spec.sigma * spec.sigma;
        let oracle = plug_in_estimate(truth, 0..spec.n, ev, &q, spec.n, spec.beta);
        assert_relative_eq!(oracle, truth, max_relative = 1e-10);
        // Any plug-in weight and any index set.
        for u in [0.1, 1.0, 7.5] {
            let v = plug_in_estimate(u, 37..201, ev, &q, spec.n, spec.beta);
            assert_relative_eq!(v, truth, max_relative = 1e-10);
        }
    }

    #[test]
    fn clamping_hits_the_lower_level() {
        let n = 400usize;
        let ev = vec![1.0; n];
        let plan = make_split(&ev, n, 0.0).unwrap();
        // All-zero data drives V far below δₙ.
        let r = estimate_from_squares(&vec![0.0; n], &ev, &plan, 0.0).unwrap();
        assert!(r.preliminary_v < plan.delta_n);
        assert_eq!(r.sigma2_tilde, plan.delta_n);
    }

    #[test]
    fn estimate_rejects_bad_input() {
        let spec = ModelSpec::fbm_wn(0.5, 1.0, 1.0, 64).unwrap();
        assert!(estimate(&[1.0; 10], &spec).is_err());
        let mut z = vec![0.5; 64];
        z[3] = f64::NAN;
        assert!(matches!(estimate(&z, &spec), Err(Error::InvalidData(_))));
    }

    proptest! {
        #[test]
        fn final_step_is_order_invariant(seed in 0u64..1000) {
            let n = 64usize;
            let ev: Vec<f64> = (0..n).map(|i| 50.0 / (1.0 + i as f64)).collect();
            let sq: Vec<f64> = (0..n).map(|i| (((i as u64 + seed) * 2654435761 % 1000) as f64) / 250.0).collect();
            let plan = make_split(&ev, n, 0.1).unwrap();
            let a = estimate_from_squares(&sq, &ev, &plan, 0.1).unwrap().sigma2_hat;
            // Reverse the complement and re-evaluate with the same weights.
            let mut ev2 = ev.clone();
            let mut sq2 = sq.clone();
            ev2[plan.k_star..].reverse();
            sq2[plan.k_star..].reverse();
            let u = estimate_from_squares(&sq, &ev, &plan, 0.1).unwrap().sigma2_tilde;
            let b = plug_in_estimate(u, plan.complement(), &ev2, &sq2, n, 0.1);
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
        }

        #[test]
        fn partial_fisher_is_additive(split in 1usize..63, u in 0.01f64..10.0) {
            let n = 64usize;
            let ev: Vec<f64> = (0..n).map(|i| 10.0 / (1.0 + i as f64).powf(1.5)).collect();
            let whole = partial_fisher(u, 0..n, &ev, n, 0.2);
            let parts = partial_fisher(u, 0..split, &ev, n, 0.2) + partial_fisher(u, split..n, &ev, n, 0.2);
            prop_assert!((whole - parts).abs() <= 1e-13 * whole);
        }
    }
}
