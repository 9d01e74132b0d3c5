//! Autocovariance kernels of the signal process and their large-lag expansions.

use serde::{Deserialize, Serialize};

use super::expansion::{PowerLogSeries, PowerLogTerm};
use super::SlowlyVaryingSpec;
use crate::error::{domain, Error, Result};
use crate::special::{binomial, CompensatedSum};

/// Which stationary sequence drives the signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AutocovarianceKind {
    /// Unit-variance fractional Gaussian noise.
    Fgn { hurst: f64 },
    /// Explicit values γ₀, γ₁, …; lags past the end follow the power-law tail.
    UserSequence { gammas: Vec<f64> },
    /// Increments of integrated fBM; lag 0 is the first observation, which is
    /// not part of the stationary sequence.
    IntegratedFbmIncrement { hurst: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocovarianceSpec {
    #[serde(flatten)]
    pub kind: AutocovarianceKind,
    /// Multiplies every γ_k.
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl AutocovarianceSpec {
    pub fn fgn(hurst: f64) -> Self {
        Self { kind: AutocovarianceKind::Fgn { hurst }, scale: 1.0 }
    }

    pub fn integrated_fbm(hurst: f64) -> Self {
        Self { kind: AutocovarianceKind::IntegratedFbmIncrement { hurst }, scale: 1.0 }
    }

    pub fn user(gammas: Vec<f64>) -> Self {
        Self { kind: AutocovarianceKind::UserSequence { gammas }, scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn hurst(&self) -> Option<f64> {
        match self.kind {
            AutocovarianceKind::Fgn { hurst } | AutocovarianceKind::IntegratedFbmIncrement { hurst } => Some(hurst),
            AutocovarianceKind::UserSequence { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return domain(format!("autocovariance scale must be positive, got {}", self.scale));
        }
        match &self.kind {
            AutocovarianceKind::Fgn { hurst } => check_fgn_hurst(*hurst),
            AutocovarianceKind::IntegratedFbmIncrement { hurst } => check_integrated_hurst(*hurst),
            AutocovarianceKind::UserSequence { gammas } => {
                if gammas.is_empty() {
                    return Err(Error::InvalidData("user autocovariance sequence is empty".into()));
                }
                if let Some(i) = gammas.iter().position(|g| !g.is_finite()) {
                    return Err(Error::InvalidData(format!("gamma_{i} is not finite")));
                }
                if gammas[0] <= 0.0 {
                    return Err(Error::InvalidData(format!("gamma_0 must be positive, got {}", gammas[0])));
                }
                Ok(())
            }
        }
    }
}

fn check_fgn_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        domain(format!("fGn Hurst index must lie in (0, 1), got {h}"))
    }
}

fn check_integrated_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 0.25 {
        Ok(())
    } else {
        domain(format!("integrated-fBM Hurst index must lie in (0, 1/4), got {h}"))
    }
}

const FGN_SWITCH: usize = 8;
const FGN_SERIES_TERMS: usize = 12;
const IFBM_SWITCH: usize = 16;
const IFBM_SERIES_TERMS: usize = 13;

fn fgn_direct(h: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).powf(e))
}

/// γ(x) = Σ_{m≥1} C(2H, 2m) x^{2H−2m}, convergent for x > 1.
fn fgn_expansion(h: f64) -> PowerLogSeries {
    let e = 2.0 * h;
    PowerLogSeries::new(
        (1..=FGN_SERIES_TERMS)
            .map(|m| PowerLogTerm {
                coef: binomial(e, 2 * m),
                power: e - 2.0 * m as f64,
                log_power: 0.0,
            })
            .collect(),
    )
}

/// Fourth central difference of |x|^p over 2p(p−1).
fn ifbm_direct(h: f64, k: usize) -> f64 {
    let p = 2.0 * h + 2.0;
    let phi = |x: f64| x.abs().powf(p);
    let k = k as f64;
    let d4 = phi(k + 2.0) - 4.0 * phi(k + 1.0) + 6.0 * phi(k) - 4.0 * phi(k - 1.0) + phi(k - 2.0);
    d4 / (2.0 * p * (p - 1.0))
}

fn ifbm_expansion(h: f64) -> PowerLogSeries {
    let p = 2.0 * h + 2.0;
    let norm = 2.0 * p * (p - 1.0);
    PowerLogSeries::new(
        (2..2 + IFBM_SERIES_TERMS)
            .map(|m| {
                let j = 2 * m;
                PowerLogTerm {
                    coef: binomial(p, j) * (2f64.powi(j as i32 + 1) - 8.0) / norm,
                    power: p - j as f64,
                    log_power: 0.0,
                }
            })
            .collect(),
    )
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
pub fn gamma_fgn(h: f64, k: usize) -> Result<f64> {
    check_fgn_hurst(h)?;
    Ok(if k < FGN_SWITCH {
        fgn_direct(h, k)
    } else {
        fgn_expansion(h).eval(k as f64)
    })
}

/// Stationary autocovariance Cov(X_i, X_{i+k}), i ≥ 2, of the increments of
/// integrated fBM on the unit grid.
pub fn gamma_integrated_fbm(h: f64, k: usize) -> Result<f64> {
    check_integrated_hurst(h)?;
    Ok(if k < IFBM_SWITCH {
        ifbm_direct(h, k)
    } else {
        ifbm_expansion(h).eval(k as f64)
    })
}

/// Cov(X_1, X_j) for the integrated-fBM increments, `j ≥ 1`.
///
/// X_1 is the integral of B over [0, 1] and is not stationary with the rest.
pub fn integrated_fbm_boundary(h: f64, j: usize) -> Result<f64> {
    check_integrated_hurst(h)?;
    if j == 0 {
        return domain("boundary covariance is indexed from 1");
    }
    let q = 2.0 * h + 1.0;
    let p = q + 1.0;
    if j == 1 {
        return Ok(1.0 / p);
    }
    // S(a) = ∫_{a-1}^a s^{2H} ds, G(m) = ∫∫ |s - t|^{2H} over unit squares at offset m.
    let s = |a: f64| (a.powf(q) - (a - 1.0).powf(q)) / q;
    let g = |m: f64| {
        let phi = |x: f64| x.abs().powf(p);
        (phi(m + 1.0) - 2.0 * phi(m) + phi(m - 1.0)) / (p * (p - 1.0))
    };
    let j = j as f64;
    Ok(0.5 * (s(j) - s(j - 1.0) - g(j - 1.0) + g(j - 2.0)))
}

#[derive(Debug, Clone)]
enum Kernel {
    Fgn(f64),
    IntegratedFbm(f64),
    Table(Vec<f64>),
}

/// A ready-to-evaluate autocovariance sequence with its large-lag expansion.
#[derive(Debug, Clone)]
pub struct Autocovariance {
    kernel: Kernel,
    scale: f64,
    tail: PowerLogSeries,
    switch: usize,
}

impl Autocovariance {
    /// Build the evaluator. `alpha` and `ell` only matter for user sequences,
    /// whose lags beyond the table follow sign(−α)·k^{−2α−1}·ℓ(k).
    pub fn new(spec: &AutocovarianceSpec, alpha: f64, ell: &SlowlyVaryingSpec) -> Result<Self> {
        spec.validate()?;
        let (kernel, tail, switch) = match &spec.kind {
            AutocovarianceKind::Fgn { hurst } => (Kernel::Fgn(*hurst), fgn_expansion(*hurst), FGN_SWITCH),
            AutocovarianceKind::IntegratedFbmIncrement { hurst } => {
                (Kernel::IntegratedFbm(*hurst), ifbm_expansion(*hurst), IFBM_SWITCH)
            }
            AutocovarianceKind::UserSequence { gammas } => {
                let sign = if alpha < 0.0 {
                    1.0
                } else if alpha > 0.0 {
                    -1.0
                } else {
                    0.0
                };
                let (c, rho) = ell.coefficients();
                let tail = PowerLogSeries::single(sign * c, -2.0 * alpha - 1.0, rho);
                (Kernel::Table(gammas.clone()), tail, gammas.len().max(2))
            }
        };
        Ok(Self { kernel, scale: spec.scale, tail: tail.scaled(spec.scale), switch })
    }

    pub fn gamma(&self, k: usize) -> f64 {
        if k >= self.switch {
            return self.tail.eval(k as f64);
        }
        let raw = match &self.kernel {
            Kernel::Fgn(h) => fgn_direct(*h, k),
            Kernel::IntegratedFbm(h) => ifbm_direct(*h, k),
            Kernel::Table(t) => match t.get(k) {
                Some(v) => *v,
                None => return self.tail.eval(k as f64),
            },
        };
        self.scale * raw
    }

    /// γ₀, …, γ_{len−1}.
    pub fn sequence(&self, len: usize) -> Vec<f64> {
        (0..len).map(|k| self.gamma(k)).collect()
    }

    /// Large-lag expansion of γ, valid for `k >= first_tail_lag()`.
    pub fn tail(&self) -> &PowerLogSeries {
        &self.tail
    }

    pub fn first_tail_lag(&self) -> usize {
        self.switch
    }

    /// Covariances of the first observation with observations 1..=n, when the
    /// first observation is not part of the stationary sequence.
    pub fn boundary(&self, n: usize) -> Option<Vec<f64>> {
        match self.kernel {
            Kernel::IntegratedFbm(h) => Some(
                (1..=n)
                    .map(|j| self.scale * integrated_fbm_boundary(h, j).expect("hurst validated"))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Σ_{k∈ℤ} γ_k², with the tail beyond the direct range summed by
    /// Euler–Maclaurin on the expansion.
    pub fn sum_of_squares(&self) -> Result<f64> {
        const BERNOULLI: [f64; 3] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0];
        let m = self.switch.max(64);
        let mut head = CompensatedSum::new();
        for k in (1..m).rev() {
            head.add(2.0 * self.gamma(k).powi(2));
        }
        head.add(self.gamma(0).powi(2));
        let sq = self.tail.square();
        if sq.is_zero() {
            return Ok(head.value());
        }
        let x = m as f64;
        let integral = sq.integral_to_infinity(x).ok_or_else(|| {
            Error::Domain("Σγ_k² diverges: the autocovariance decays too slowly (needs α > −1/4)".into())
        })?;
        let mut tail = integral + 0.5 * sq.eval(x);
        let mut fact = 1.0;
        for (j, b) in BERNOULLI.iter().enumerate() {
            let order = 2 * j + 1;
            fact *= (order as f64) * (order as f64 + 1.0);
            tail -= b / fact * sq.nth_derivative(order).eval(x);
        }
        head.add(2.0 * tail);
        Ok(head.value())
    }
}
