use std::f64::consts::PI;

use num_rational::BigRational;

use super::Regime;
use crate::error::{domain, Result};
use crate::model::{ModelSpec, SlowlyVaryingSpec};
use crate::quad::{integrate, QuadOptions};
use crate::special::{gamma, x_over_sin};

/// c_H = H sin^{1/(2H+1)}(πH) Γ(2H+1)^{1/(2H+1)} / ((2H+1)² sin(π/(2H+1))).
pub fn closed_form_constant_ch(hurst: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
    }
    let q = 2.0 * hurst + 1.0;
    let e = 1.0 / q;
    Ok(hurst * (PI * hurst).sin().powf(e) * gamma(q).powf(e) / (q * q * (PI / q).sin()))
}

/// C_α = 2 sign(−α) Γ(−2α) cos(πα), the low-frequency constant in
/// f(λ) ∼ C_α ℓ(1/λ) λ^{2α}. Positive for every α ∈ (−1/2, 1/2) \ {0}.
pub fn spectral_constant(alpha: f64) -> f64 {
    let sign = if alpha < 0.0 { 1.0 } else { -1.0 };
    2.0 * sign * gamma(-2.0 * alpha) * (PI * alpha).cos()
}

/// C(◇, α) = (2 − ◇)◇ / (8 sin(◇π/2)) · C_α^{◇/2}; the removable
/// singularity at ◇ = 2 is handled through x/sin x.
pub fn closed_form_constant_c(diamond: f64, alpha: f64) -> Result<f64> {
    if !(diamond > 0.0 && diamond < 4.0) {
        return domain(format!("diamond must lie in (0, 4), got {diamond}"));
    }
    if alpha == 0.0 {
        return domain("alpha = 0 makes the constant diverge");
    }
    if !(alpha > -0.5 && alpha < 0.5) {
        return domain(format!("alpha must lie in (-1/2, 1/2), got {alpha}"));
    }
    // (2 − ◇)/sin(◇π/2) = (2/π) · x/sin x with x = (2 − ◇)π/2.
    let x = 0.5 * (2.0 - diamond) * PI;
    let prefactor = diamond / 8.0 * (2.0 / PI) * x_over_sin(x);
    Ok(prefactor * spectral_constant(alpha).powf(0.5 * diamond))
}

/// Regime of ◇ with exact detection of the critical value.
///
/// K − α = 1/4 is tested in exact rational arithmetic on the binary value of α,
/// then with a 10⁻¹² tolerance on ◇ for inputs that are not exactly dyadic.
pub fn classify(k: u32, alpha: f64) -> Regime {
    let diamond = 1.0 / (f64::from(k) - alpha);
    if let Some(a) = BigRational::from_float(alpha) {
        let gap = BigRational::from_integer(k.into()) - a;
        if gap == BigRational::new(1.into(), 4.into()) {
            return Regime::Critical;
        }
    }
    if (diamond - 4.0).abs() < 1e-12 {
        Regime::Critical
    } else if diamond < 4.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

/// Leading term for ◇ < 4:
/// n^{1−◇β} ℓ(n^{◇β})^{◇/2} σ^{◇−4} τ^{−◇} C(◇, α).
pub fn subcritical_information(spec: &ModelSpec) -> Result<f64> {
    let d = spec.diamond();
    let n = spec.n as f64;
    let c = closed_form_constant_c(d, spec.alpha)?;
    let ell = spec.ell.eval(n.powf(d * spec.beta));
    Ok(n.powf(1.0 - d * spec.beta) * ell.powf(0.5 * d) * spec.sigma.powf(d - 4.0) * spec.tau.powf(-d) * c)
}

/// Leading term for the fBM + white-noise family:
/// c_H n^{1/(2H+1)} σ^{−(8H+2)/(2H+1)} τ^{−2/(2H+1)}.
pub fn fbm_wn_information(hurst: f64, sigma: f64, tau: f64, n: usize) -> Result<f64> {
    let q = 2.0 * hurst + 1.0;
    Ok(closed_form_constant_ch(hurst)?
        * (n as f64).powf(1.0 / q)
        * sigma.powf(-(8.0 * hurst + 2.0) / q)
        * tau.powf(-2.0 / q))
}

/// Leading term for ◇ > 4: n^{1−4β}/(2τ⁴) Σ_k γ_k².
pub fn supercritical_information(spec: &ModelSpec) -> Result<f64> {
    let sum = spec.autocovariance()?.sum_of_squares()?;
    Ok((spec.n as f64).powf(1.0 - 4.0 * spec.beta) / (2.0 * spec.tau.powi(4)) * sum)
}

/// Leading term for ◇ = 4 with ℓ = c |log|^ρ:
/// n^{1−4β} (log n)^{2ρ+1} τ^{−4} c² (4β)^{2ρ+1} / (2ρ+1).
pub fn critical_information(spec: &ModelSpec) -> f64 {
    let (c, rho) = spec.ell.coefficients();
    let n = spec.n as f64;
    let p = 2.0 * rho + 1.0;
    n.powf(1.0 - 4.0 * spec.beta) * n.ln().powf(p) * spec.tau.powi(-4) * c * c * (4.0 * spec.beta).powf(p) / p
}

/// ◇ = 4 in integral form, n^{1−4β} τ^{−4} ∫_{q_n}^1 ℓ²(1/λ) dλ/λ with
/// q_n = n^{−4β} ℓ²(n^{4β}); valid for any slowly varying ℓ.
pub fn critical_information_integral(spec: &ModelSpec) -> Result<f64> {
    let n = spec.n as f64;
    let m = n.powf(4.0 * spec.beta);
    let q = spec.ell.eval(m).powi(2) / m;
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("lower limit q_n = {q} is outside (0, 1); n is too small"));
    }
    let ell = spec.ell;
    // Substitute λ = e^{−t}: ∫_0^{−ln q} ℓ²(e^t) dt.
    let upper = -q.ln();
    let value = match ell {
        SlowlyVaryingSpec::Constant { c } => c * c * upper,
        SlowlyVaryingSpec::LogPower { .. } => {
            integrate(|t: f64| ell.eval(t.exp()).powi(2), 0.0, upper, QuadOptions::default())?.value
        }
    };
    Ok(n.powf(1.0 - 4.0 * spec.beta) * spec.tau.powi(-4) * value)
}
