//! Spectral densities f(λ) = Σ_k γ_k cos(kλ) of the signal and h_n of the data.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::expansion::PowerLogSeries;
use super::{AutocovarianceKind, ModelSpec, SlowlyVaryingSpec};
use crate::error::{domain, Result};
use crate::special::{gamma, hurwitz_zeta, CompensatedSum};

pub const DEFAULT_K_MAX: usize = 100_000;

/// Number of Abel-summation corrections applied past the truncation point.
const ABEL_TERMS: usize = 10;
/// Below `CONTINUATION / k_max` the truncated series is replaced by the
/// power-law asymptote matched at that frequency.
const CONTINUATION: f64 = 50.0;
/// The cosine recurrence is re-anchored this often to bound drift.
const RESYNC: usize = 1024;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= PI {
        Ok(())
    } else {
        domain(format!("frequency must lie in (0, pi], got {lambda}"))
    }
}

/// Truncated cosine series with an asymptotic correction for the remainder.
#[derive(Debug, Clone)]
pub struct SeriesSpectrum {
    gammas: Vec<f64>,
    tail_derivatives: Vec<PowerLogSeries>,
    alpha: f64,
    ell: SlowlyVaryingSpec,
    lambda_floor: f64,
    value_at_floor: f64,
}

impl SeriesSpectrum {
    pub fn new(spec: &ModelSpec, k_max: usize) -> Result<Self> {
        if k_max < 16 {
            return domain(format!("k_max must be at least 16, got {k_max}"));
        }
        let acv = spec.autocovariance()?;
        let m = k_max.max(acv.first_tail_lag());
        let tail_derivatives = (0..=ABEL_TERMS).map(|j| acv.tail().nth_derivative(j)).collect();
        let lambda_floor = (CONTINUATION / m as f64).min(PI);
        let mut s = Self {
            gammas: acv.sequence(m),
            tail_derivatives,
            alpha: spec.alpha,
            ell: spec.ell,
            lambda_floor,
            value_at_floor: 0.0,
        };
        s.value_at_floor = s.series(lambda_floor);
        Ok(s)
    }

    pub fn truncation(&self) -> usize {
        self.gammas.len()
    }

    fn series(&self, lambda: f64) -> f64 {
        let m = self.gammas.len();
        let (sin1, cos1) = lambda.sin_cos();
        let mut sum = CompensatedSum::new();
        sum.add(self.gammas[0]);
        let (mut s, mut c) = (sin1, cos1);
        for (k, g) in self.gammas.iter().enumerate().skip(1) {
            if k % RESYNC == 0 {
                (s, c) = (k as f64 * lambda).sin_cos();
            }
            sum.add(2.0 * g * c);
            (s, c) = (s * cos1 + c * sin1, c * cos1 - s * sin1);
        }
        // Σ_{k≥M} a_k z^k = z^M/(1−z) Σ_j (Δ^j a)_M w^j with w = z/(1−z), and
        // the forward differences of a smooth tail are its derivatives at M + j/2.
        let z = Complex64::from_polar(1.0, lambda);
        let one_minus = Complex64::new(1.0, 0.0) - z;
        let w = z / one_minus;
        let mf = m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut wp = Complex64::new(1.0, 0.0);
        for (j, d) in self.tail_derivatives.iter().enumerate() {
            acc += wp * d.eval(mf + 0.5 * j as f64);
            wp *= w;
        }
        let zm = Complex64::from_polar(1.0, (mf * lambda) % (2.0 * PI));
        sum.add(2.0 * (zm / one_minus * acc).re);
        sum.value()
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        if lambda >= self.lambda_floor {
            return self.series(lambda);
        }
        let lf = self.lambda_floor;
        let ratio = (lambda / lf).powf(2.0 * self.alpha);
        let log_ratio = self.ell.eval(1.0 / lambda) / self.ell.eval(1.0 / lf);
        self.value_at_floor * ratio * log_ratio
    }
}

/// Closed-form fGn spectrum via the aliased power law
/// 2 sin(πH) Γ(2H+1) (1 − cos λ) Σ_j |2πj + λ|^{−2H−1}.
#[derive(Debug, Clone, Copy)]
pub struct AliasedFgnSpectrum {
    hurst: f64,
    prefactor: f64,
}

impl AliasedFgnSpectrum {
    pub fn new(hurst: f64, scale: f64) -> Self {
        let s = 2.0 * hurst + 1.0;
        let prefactor = scale * 2.0 * (PI * hurst).sin() * gamma(s) * (2.0 * PI).powf(-s);
        Self { hurst, prefactor }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let s = 2.0 * self.hurst + 1.0;
        let a = lambda / (2.0 * PI);
        let half = (0.5 * lambda).sin();
        // Split off the j = 0 image so tiny λ does not overflow a^{−s}.
        let nearest = half * a.powf(-0.5 * s);
        let rest = half * half * (hurwitz_zeta(s, 1.0 + a) + hurwitz_zeta(s, 1.0 - a));
        self.prefactor * 2.0 * (nearest * nearest + rest)
    }
}

/// A spectral density evaluator for X.
#[derive(Debug, Clone)]
pub enum XSpectrum {
    Series(SeriesSpectrum),
    Aliased(AliasedFgnSpectrum),
}

impl XSpectrum {
    /// The closed form for fGn, the corrected series otherwise.
    pub fn for_spec(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        match spec.x_cov.kind {
            AutocovarianceKind::Fgn { hurst } => Ok(Self::Aliased(AliasedFgnSpectrum::new(hurst, spec.x_cov.scale))),
            _ => Ok(Self::Series(SeriesSpectrum::new(spec, spec.k_max)?)),
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            Self::Series(s) => s.eval(lambda),
            Self::Aliased(a) => a.eval(lambda),
        }
    }
}

/// 4^K τ² sin^{2K}(λ/2), the spectral density of the difference noise.
pub fn noise_spectrum(k: u32, tau: f64, lambda: f64) -> f64 {
    let s = 2.0 * (0.5 * lambda).sin();
    tau * tau * s.powi(2 * k as i32)
}

/// f(λ) from the cosine series truncated at `k_max` plus a tail correction.
pub fn spectral_density_x(spec: &ModelSpec, lambda: f64, k_max: usize) -> Result<f64> {
    check_lambda(lambda)?;
    spec.validate()?;
    Ok(SeriesSpectrum::new(spec, k_max)?.eval(lambda))
}

/// f(λ) from the aliased power-law closed form; fGn signals only.
pub fn spectral_density_x_aliased(spec: &ModelSpec, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    spec.validate()?;
    match spec.x_cov.kind {
        AutocovarianceKind::Fgn { hurst } => Ok(AliasedFgnSpectrum::new(hurst, spec.x_cov.scale).eval(lambda)),
        _ => domain("the aliased evaluator applies to fGn signals only"),
    }
}

/// h_n(λ) = σ² n^{−2β} f(λ) + 4^K τ² sin^{2K}(λ/2).
pub fn spectral_density_z(spec: &ModelSpec, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let f = XSpectrum::for_spec(spec)?.eval(lambda);
    Ok(spec.signal_factor() * f + noise_spectrum(spec.k, spec.tau, lambda))
}
