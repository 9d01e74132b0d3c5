//! Exact simulation of Z and replicated estimation studies.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::estimator::{estimate_with_system, make_split, oracle_from_whitened, SplitPlan};
use crate::fisher::{fisher_from_system, whiten_spec};
use crate::linalg::{dct_diagonalize_noise, mat_vec};
use crate::model::ModelSpec;
use crate::special::CompensatedSum;

/// Draws Z = σ n^{−β} X + Y exactly: X through the dense Cholesky factor of
/// Cov(X), Y through the cosine basis that diagonalises Cov(Y).
#[derive(Debug, Clone)]
pub struct Sampler {
    n: usize,
    signal_scale: f64,
    chol_x: Mat<f64>,
    /// basis · diag(2^K τ sin^K(uᵢ/2)).
    noise_root: Mat<f64>,
}

impl Sampler {
    /// σ = 0 is accepted here (pure noise); everything else must validate.
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
            return domain(format!("sigma must be nonnegative, got {}", spec.sigma));
        }
        let unit = spec.with_noise(1.0, spec.tau);
        unit.validate()?;
        let chol_x = spec
            .cov_x()?
            .cholesky()
            .map_err(|e| Error::NotPositiveDefinite(format!("Cov(X): {e}")))?;
        let noise = dct_diagonalize_noise(spec.n, spec.k, spec.tau, spec.noise_convention);
        let roots: Vec<f64> = noise.eigenvalues.iter().map(|v| v.sqrt()).collect();
        let noise_root = Mat::from_fn(spec.n, spec.n, |i, j| noise.basis[(i, j)] * roots[j]);
        Ok(Self {
            n: spec.n,
            signal_scale: spec.sigma * (spec.n as f64).powf(-spec.beta),
            chol_x,
            noise_root,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn rng(seed: u64, rep: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(rep);
        rng
    }

    /// Signal X and noise Y for replicate `rep`. ξ is drawn before ξ′.
    pub fn sample_parts(&self, seed: u64, rep: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = Self::rng(seed, rep);
        let xi: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let xi2: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(&mut rng)).collect();
        (mat_vec(self.chol_x.as_ref(), &xi), mat_vec(self.noise_root.as_ref(), &xi2))
    }

    pub fn sample(&self, seed: u64, rep: u64) -> Vec<f64> {
        let (x, y) = self.sample_parts(seed, rep);
        x.iter().zip(&y).map(|(x, y)| self.signal_scale * x + y).collect()
    }
}

/// One draw of Z for (seed, rep); identical inputs give identical output.
pub fn sample_z(spec: &ModelSpec, seed: u64, rep: u64) -> Result<Vec<f64>> {
    Ok(Sampler::new(spec)?.sample(seed, rep))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Uses the true σ in its weights.
    Oracle,
    /// The two-step sample-splitting estimator.
    Efficient,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Oracle => "oracle",
            EstimatorKind::Efficient => "efficient",
        })
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(EstimatorKind::Oracle),
            "efficient" => Ok(EstimatorKind::Efficient),
            other => domain(format!("unknown estimator '{other}' (expected oracle or efficient)")),
        }
    }
}

/// Per-replicate outcome. The preliminary fields are absent for the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateEstimate {
    pub rep: u64,
    pub preliminary_v: Option<f64>,
    pub sigma2_tilde: Option<f64>,
    pub sigma2_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McStudy {
    pub spec: ModelSpec,
    pub reps: usize,
    pub seed: u64,
    pub estimator: EstimatorKind,
    /// Shared by every replicate of the efficient estimator.
    pub split: Option<SplitPlan>,
    pub estimates: Vec<ReplicateEstimate>,
    pub mean: f64,
    pub mse: f64,
    pub fisher_exact: f64,
    /// fisher_exact · mse; one for an efficient estimator.
    pub normalized: f64,
}

impl McStudy {
    /// Per-replicate CSV with columns rep, V, sigma2_tilde, sigma2_hat.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "rep,V,sigma2_tilde,sigma2_hat")?;
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for e in &self.estimates {
            writeln!(
                out,
                "{},{},{},{:.16e}",
                e.rep,
                cell(e.preliminary_v),
                cell(e.sigma2_tilde),
                e.sigma2_hat
            )?;
        }
        Ok(())
    }
}

/// Replicated estimation at the spec's true σ. Deterministic in
/// (spec, reps, seed) whatever the size of the current rayon pool.
pub fn run_study(spec: &ModelSpec, reps: usize, seed: u64, estimator: EstimatorKind) -> Result<McStudy> {
    if reps < 2 {
        return domain(format!("reps must be at least 2, got {reps}"));
    }
    let system = whiten_spec(spec)?;
    let sampler = Sampler::new(spec)?;
    let fisher = fisher_from_system(spec, &system);
    let split = match estimator {
        EstimatorKind::Efficient => Some(make_split(system.eigenvalues(), spec.n, spec.beta)?),
        EstimatorKind::Oracle => None,
    };

    let estimates = (0..reps as u64)
        .into_par_iter()
        .map(|rep| -> Result<ReplicateEstimate> {
            let z = sampler.sample(seed, rep);
            match &split {
                Some(plan) => {
                    let r = estimate_with_system(&z, &system, plan, spec.beta)?;
                    Ok(ReplicateEstimate {
                        rep,
                        preliminary_v: Some(r.preliminary_v),
                        sigma2_tilde: Some(r.sigma2_tilde),
                        sigma2_hat: r.sigma2_hat,
                    })
                }
                None => {
                    let zt = system.transform(&z)?;
                    Ok(ReplicateEstimate {
                        rep,
                        preliminary_v: None,
                        sigma2_tilde: None,
                        sigma2_hat: oracle_from_whitened(&zt, system.eigenvalues(), spec),
                    })
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    // Merged in replicate order, so the totals do not depend on scheduling.
    let truth = spec.sigma * spec.sigma;
    let mut sum = CompensatedSum::new();
    let mut sq = CompensatedSum::new();
    for e in &estimates {
        sum.add(e.sigma2_hat);
        sq.add((e.sigma2_hat - truth).powi(2));
    }
    let mse = sq.value() / reps as f64;
    Ok(McStudy {
        spec: spec.clone(),
        reps,
        seed,
        estimator,
        split,
        estimates,
        mean: sum.value() / reps as f64,
        mse,
        fisher_exact: fisher,
        normalized: fisher * mse,
    })
}
