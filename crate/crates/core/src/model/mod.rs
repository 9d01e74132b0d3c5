//! Model specifications: Z = σ n^{−β} X + Y with Cov(Y) = τ² (ΔΔᵗ)^K or τ² (ΔᵗΔ)^K.

mod autocov;
mod expansion;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use autocov::{
    gamma_fgn, gamma_integrated_fbm, integrated_fbm_boundary, Autocovariance, AutocovarianceKind,
    AutocovarianceSpec,
};
pub use expansion::{PowerLogSeries, PowerLogTerm};
pub use spectral::{
    noise_spectrum, spectral_density_x, spectral_density_x_aliased, spectral_density_z, AliasedFgnSpectrum,
    SeriesSpectrum, XSpectrum, DEFAULT_K_MAX,
};

use crate::error::{domain, Error, Result};
use crate::linalg::{diff_cov, toeplitz, SymMatrix};

/// Slowly varying factor ℓ in γ_k ∼ sign(−α) k^{−2α−1} ℓ(k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlowlyVaryingSpec {
    Constant { c: f64 },
    LogPower { c: f64, rho: f64 },
}

impl SlowlyVaryingSpec {
    /// ℓ(x) for x > 1.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Constant { c } => c,
            Self::LogPower { c, rho } => c * x.ln().abs().powf(rho),
        }
    }

    /// (c, ρ), with ρ = 0 for a constant.
    pub fn coefficients(&self) -> (f64, f64) {
        match *self {
            Self::Constant { c } => (c, 0.0),
            Self::LogPower { c, rho } => (c, rho),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (c, rho) = self.coefficients();
        if !(c.is_finite() && c > 0.0) {
            return domain(format!("slowly varying constant must be positive, got {c}"));
        }
        if !(rho.is_finite() && rho > -0.5) {
            return domain(format!("log power rho must exceed -1/2, got {rho}"));
        }
        Ok(())
    }
}

/// Which of the two difference-noise covariances Y has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConvention {
    /// τ² (ΔΔᵗ)^K
    #[default]
    DeltaDeltaT,
    /// τ² (ΔᵗΔ)^K
    DeltaTDelta,
}

impl FromStr for NoiseConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta_deltaT" | "delta-deltaT" | "delta_delta_t" => Ok(Self::DeltaDeltaT),
            "deltaT_delta" | "deltaT-delta" | "delta_t_delta" => Ok(Self::DeltaTDelta),
            other => domain(format!("unknown noise convention {other:?} (expected delta_deltaT or deltaT_delta)")),
        }
    }
}

impl fmt::Display for NoiseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DeltaDeltaT => "delta_deltaT",
            Self::DeltaTDelta => "deltaT_delta",
        })
    }
}

/// Named model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// fBM observed under white noise, taken in increments.
    FbmWn,
    /// Long-memory fGn under noise growing like n^β.
    LargeError,
    /// Integrated fBM under white noise, second differences.
    IntegratedFbm,
    User,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::FbmWn, Preset::LargeError, Preset::IntegratedFbm, Preset::User];

    pub fn id(&self) -> &'static str {
        match self {
            Preset::FbmWn => "fbm-wn",
            Preset::LargeError => "large-error",
            Preset::IntegratedFbm => "integrated-fbm",
            Preset::User => "user",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::Domain(format!("unknown preset {s:?}")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One fully specified instance of the observation model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub beta: f64,
    pub sigma: f64,
    pub tau: f64,
    #[serde(rename = "K")]
    pub k: u32,
    pub noise_convention: NoiseConvention,
    pub x_cov: AutocovarianceSpec,
    pub ell: SlowlyVaryingSpec,
    pub alpha: f64,
    /// Truncation point of the cosine series for non-fGn spectra.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
}

fn default_k_max() -> usize {
    DEFAULT_K_MAX
}

impl ModelSpec {
    /// fBM + white noise in increments: K = 1, β = H, α = 1/2 − H.
    pub fn fbm_wn(hurst: f64, sigma: f64, tau: f64, n: usize) -> Result<Self> {
        let c = hurst * (2.0 * hurst - 1.0).abs();
        let spec = Self {
            n,
            beta: hurst,
            sigma,
            tau,
            k: 1,
            noise_convention: NoiseConvention::DeltaDeltaT,
            x_cov: AutocovarianceSpec::fgn(hurst),
            // At H = 1/2 the tail vanishes and ℓ never enters; keep it valid.
            ell: SlowlyVaryingSpec::Constant { c: if c > 0.0 { c } else { 1.0 } },
            alpha: 0.5 - hurst,
            k_max: DEFAULT_K_MAX,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Long-memory fGn with white noise of size τ n^β, rescaled by n^β.
    ///
    /// For H < 3/4 the sequence is normalised to Σγ_k² = 1; at H = 3/4 it is
    /// scaled so that γ_k ∼ k^{−1/2} exactly; above 3/4 it is left as is.
    /// The default β is the midpoint of the admissible range (0, H − 1/2).
    pub fn large_error(hurst: f64, sigma: f64, tau: f64, n: usize, beta: Option<f64>) -> Result<Self> {
        if !(hurst > 0.5 && hurst < 1.0) {
            return domain(format!("large-error preset needs H in (1/2, 1), got {hurst}"));
        }
        let a = hurst * (2.0 * hurst - 1.0);
        let ell_unit = SlowlyVaryingSpec::Constant { c: a };
        let alpha = 0.5 - hurst;
        let scale = if hurst < 0.75 {
            let raw = Autocovariance::new(&AutocovarianceSpec::fgn(hurst), alpha, &ell_unit)?;
            1.0 / raw.sum_of_squares()?.sqrt()
        } else if hurst == 0.75 {
            1.0 / a
        } else {
            1.0
        };
        let spec = Self {
            n,
            beta: beta.unwrap_or(0.5 * (hurst - 0.5)),
            sigma,
            tau,
            k: 0,
            noise_convention: NoiseConvention::DeltaDeltaT,
            x_cov: AutocovarianceSpec::fgn(hurst).with_scale(scale),
            ell: SlowlyVaryingSpec::Constant { c: scale * a },
            alpha,
            k_max: DEFAULT_K_MAX,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Integrated fBM under white noise after applying ΔΔᵗ: K = 2, β = 1 + H.
    pub fn integrated_fbm(hurst: f64, sigma: f64, tau: f64, n: usize) -> Result<Self> {
        let spec = Self {
            n,
            beta: 1.0 + hurst,
            sigma,
            tau,
            k: 2,
            noise_convention: NoiseConvention::DeltaDeltaT,
            x_cov: AutocovarianceSpec::integrated_fbm(hurst),
            ell: SlowlyVaryingSpec::Constant { c: hurst * (1.0 - 2.0 * hurst) },
            alpha: 0.5 - hurst,
            k_max: DEFAULT_K_MAX,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn with_noise(&self, sigma: f64, tau: f64) -> Self {
        Self { sigma, tau, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("n must be a positive integer");
        }
        // Kernel parameters first: a bad H also makes α and β invalid.
        self.x_cov.validate()?;
        for (name, v) in [("beta", self.beta), ("sigma", self.sigma), ("tau", self.tau)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be a positive real, got {v}"));
            }
        }
        if !(self.alpha > -0.5 && self.alpha < 0.5) {
            return domain(format!("alpha must lie in (-1/2, 1/2), got {}", self.alpha));
        }
        // K = α (only K = 0, α = 0) is the flat-spectrum limit with ◇ = ∞.
        if f64::from(self.k) < self.alpha {
            return domain(format!(
                "K - alpha must be nonnegative (K = {}, alpha = {})",
                self.k, self.alpha
            ));
        }
        if self.k_max < 16 {
            return domain(format!("k_max must be at least 16, got {}", self.k_max));
        }
        self.ell.validate()
    }

    /// ◇ = 1/(K − α); infinite when K = α = 0.
    pub fn diamond(&self) -> f64 {
        1.0 / (f64::from(self.k) - self.alpha)
    }

    /// Multiplier σ² n^{−2β} of Cov(X) in Cov(Z).
    pub fn signal_factor(&self) -> f64 {
        self.sigma * self.sigma * (self.n as f64).powf(-2.0 * self.beta)
    }

    /// n^{−2β}.
    pub fn scale_factor(&self) -> f64 {
        (self.n as f64).powf(-2.0 * self.beta)
    }

    pub fn autocovariance(&self) -> Result<Autocovariance> {
        Autocovariance::new(&self.x_cov, self.alpha, &self.ell)
    }

    /// True when the spec is the fBM + white-noise family in increments.
    pub fn is_fbm_wn(&self) -> Option<f64> {
        match self.x_cov.kind {
            AutocovarianceKind::Fgn { hurst }
                if self.k == 1
                    && self.x_cov.scale == 1.0
                    && self.beta == hurst
                    && (self.alpha - (0.5 - hurst)).abs() < 1e-15 =>
            {
                Some(hurst)
            }
            _ => None,
        }
    }

    /// Cov(X) as a dense n × n matrix (unit σ, no n^{−β} factor).
    pub fn cov_x(&self) -> Result<SymMatrix> {
        let acv = self.autocovariance()?;
        let mut m = toeplitz(&acv.sequence(self.n));
        if let Some(first) = acv.boundary(self.n) {
            for (j, v) in first.into_iter().enumerate() {
                m.set(0, j, v);
            }
        }
        Ok(m)
    }

    pub fn cov_y(&self) -> SymMatrix {
        diff_cov(self.n, self.k, self.tau, self.noise_convention)
    }

    /// Cov(Z) = σ² n^{−2β} Cov(X) + Cov(Y).
    pub fn cov_z(&self) -> Result<SymMatrix> {
        let mut m = self.cov_x()?;
        m.scale(self.signal_factor());
        m.add_assign(&self.cov_y());
        Ok(m)
    }

    /// The spectral density of X, choosing the aliased closed form for fGn.
    pub fn x_spectrum(&self) -> Result<XSpectrum> {
        XSpectrum::for_spec(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fbm_wn_diamond() {
        for h in [0.2, 0.5, 0.8] {
            let s = ModelSpec::fbm_wn(h, 1.0, 1.0, 64).unwrap();
            assert_relative_eq!(s.diamond(), 2.0 / (2.0 * h + 1.0), max_relative = 1e-14);
            assert_eq!(s.is_fbm_wn(), Some(h));
        }
    }

    #[test]
    fn k_not_above_alpha_is_rejected() {
        let mut s = ModelSpec::fbm_wn(0.3, 1.0, 1.0, 64).unwrap();
        s.k = 0;
        assert!(matches!(s.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn large_error_normalisation() {
        let s = ModelSpec::large_error(0.6, 1.0, 1.0, 64, None).unwrap();
        assert_relative_eq!(s.autocovariance().unwrap().sum_of_squares().unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.diamond(), 10.0, max_relative = 1e-12);
        let s = ModelSpec::large_error(0.75, 1.0, 1.0, 64, None).unwrap();
        assert_eq!(s.ell, SlowlyVaryingSpec::Constant { c: 1.0 });
        assert_relative_eq!(s.diamond(), 4.0, max_relative = 1e-12);
        assert!(ModelSpec::large_error(0.4, 1.0, 1.0, 64, None).is_err());
    }

    #[test]
    fn integrated_fbm_first_row_is_nonstationary() {
        let s = ModelSpec::integrated_fbm(0.1, 1.0, 1.0, 8).unwrap();
        let m = s.cov_x().unwrap();
        assert_relative_eq!(m.get(0, 0), 1.0 / 2.2, max_relative = 1e-14);
        assert_relative_eq!(m.get(1, 1), gamma_integrated_fbm(0.1, 0).unwrap(), max_relative = 1e-14);
        assert_eq!(m.get(0, 3), m.get(3, 0));
    }

    #[test]
    fn preset_ids_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.id().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = ModelSpec::integrated_fbm(0.2, 1.5, 0.5, 100).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
