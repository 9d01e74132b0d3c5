//! Fisher information for σ²: exact, spectral integral and leading-order
//! closed forms, plus scans over n.

mod closed_form;
mod exact;
mod integral;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use closed_form::{
    classify, closed_form_constant_c, closed_form_constant_ch, critical_information, critical_information_integral,
    fbm_wn_information, spectral_constant, subcritical_information, supercritical_information,
};
pub use exact::{fisher_exact, MAX_EXACT_ORDER, fisher_from_eigenvalues, fisher_from_system, fisher_trace, whiten_spec};
pub use integral::{
    fisher_integral, fisher_integral_bounds, fisher_integral_with, spectral_crossover, INTEGRAL_REL_TOL,
};

use crate::error::{domain, Error, Result};
use crate::model::ModelSpec;

/// Position of ◇ relative to the phase transition at 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

/// Pairwise relative differences |a − b| / |b| between computed values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct RelativeDifferences {
    pub exact_vs_integral: Option<f64>,
    pub exact_vs_closed_form: Option<f64>,
    pub integral_vs_closed_form: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub n: usize,
    pub exact: Option<f64>,
    pub integral: Option<f64>,
    pub closed_form: Option<f64>,
    /// ◇ = 1/(K − α); written as null when infinite.
    #[serde(with = "extended_real")]
    pub diamond: f64,
    pub regime: Regime,
    /// Exponent of n in the leading term.
    pub rate_exponent: f64,
    /// True when the leading term carries a power of log n.
    pub log_factor: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_differences: Option<RelativeDifferences>,
}

mod extended_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Which Fisher computations to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherMethod {
    Exact,
    Integral,
    ClosedForm,
    All,
}

impl FromStr for FisherMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "integral" => Ok(Self::Integral),
            "closed-form" | "closed_form" => Ok(Self::ClosedForm),
            "all" => Ok(Self::All),
            other => domain(format!("unknown method {other:?} (expected exact, integral, closed-form or all)")),
        }
    }
}

pub fn rate_exponent(spec: &ModelSpec, regime: Regime) -> f64 {
    match regime {
        Regime::Subcritical => 1.0 - spec.diamond() * spec.beta,
        _ => 1.0 - 4.0 * spec.beta,
    }
}

fn regime_warnings(spec: &ModelSpec, regime: Regime) -> Vec<String> {
    let mut w = Vec::new();
    let gap = f64::from(spec.k) - spec.alpha;
    let need = spec.beta.max((4.0 * spec.alpha + 1.0) * spec.beta).max(0.25);
    if gap <= need {
        w.push(format!(
            "K - alpha = {gap} does not exceed max(beta, (4 alpha + 1) beta, 1/4) = {need}; \
             the spectral integral is not guaranteed to be first-order exact"
        ));
    }
    let d = spec.diamond();
    if regime != Regime::Critical && (d - 4.0).abs() < 0.1 {
        w.push(format!(
            "near-critical diamond {d}: the critical log-n formula would give {:e}",
            critical_information(spec)
        ));
    }
    w
}

/// The leading-order closed form for the regime of `spec`.
pub fn fisher_closed_form(spec: &ModelSpec) -> Result<FisherReport> {
    spec.validate()?;
    let regime = classify(spec.k, spec.alpha);
    let warnings = regime_warnings(spec, regime);
    let value = match regime {
        Regime::Subcritical => match spec.is_fbm_wn() {
            Some(h) => fbm_wn_information(h, spec.sigma, spec.tau, spec.n)?,
            None => subcritical_information(spec)?,
        },
        Regime::Supercritical => supercritical_information(spec)?,
        Regime::Critical => critical_information(spec),
    };
    Ok(FisherReport {
        n: spec.n,
        exact: None,
        integral: None,
        closed_form: Some(value),
        diamond: spec.diamond(),
        regime,
        rate_exponent: rate_exponent(spec, regime),
        log_factor: regime == Regime::Critical,
        warnings,
        relative_differences: None,
    })
}

fn rel_diff(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if b != 0.0 => Some((a - b).abs() / b.abs()),
        _ => None,
    }
}

/// Run the selected computations and assemble one report.
pub fn fisher_report(spec: &ModelSpec, method: FisherMethod) -> Result<FisherReport> {
    spec.validate()?;
    let regime = classify(spec.k, spec.alpha);
    let mut report = match method {
        FisherMethod::ClosedForm | FisherMethod::All => fisher_closed_form(spec)?,
        _ => FisherReport {
            n: spec.n,
            exact: None,
            integral: None,
            closed_form: None,
            diamond: spec.diamond(),
            regime,
            rate_exponent: rate_exponent(spec, regime),
            log_factor: regime == Regime::Critical,
            warnings: Vec::new(),
            relative_differences: None,
        },
    };
    match method {
        FisherMethod::Exact => report.exact = Some(fisher_exact(spec)?),
        FisherMethod::All if spec.n <= MAX_EXACT_ORDER => report.exact = Some(fisher_exact(spec)?),
        FisherMethod::All => report
            .warnings
            .push(format!("exact method skipped: n = {} exceeds {MAX_EXACT_ORDER}", spec.n)),
        _ => {}
    }
    if matches!(method, FisherMethod::Integral | FisherMethod::All) {
        report.integral = Some(fisher_integral(spec)?);
    }
    if method == FisherMethod::All {
        report.relative_differences = Some(RelativeDifferences {
            exact_vs_integral: rel_diff(report.exact, report.integral),
            exact_vs_closed_form: rel_diff(report.exact, report.closed_form),
            integral_vs_closed_form: rel_diff(report.integral, report.closed_form),
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub integral: f64,
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateScan {
    pub rows: Vec<RateRow>,
    pub regime: Regime,
    /// Least-squares slope of log I (spectral integral) against log n.
    pub fitted_slope: Option<f64>,
    /// Slope predicted by the leading term (ignores log factors).
    pub predicted_slope: f64,
}

/// Least-squares slope of y on x.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Spectral-integral and closed-form Fisher information over a grid of n.
///
/// Grid points are evaluated in parallel and collected in grid order.
pub fn rate_scan(template: &ModelSpec, n_grid: &[usize]) -> Result<RateScan> {
    if n_grid.is_empty() {
        return domain("n grid is empty");
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("n grid must be strictly increasing");
    }
    template.validate()?;
    let rows: Vec<RateRow> = n_grid
        .par_iter()
        .map(|&n| -> Result<RateRow> {
            let spec = template.with_n(n);
            Ok(RateRow {
                n,
                integral: fisher_integral(&spec)?,
                closed_form: fisher_closed_form(&spec).ok().and_then(|r| r.closed_form),
            })
        })
        .collect::<Result<_>>()?;
    let regime = classify(template.k, template.alpha);
    let x: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.integral.ln()).collect();
    Ok(RateScan {
        fitted_slope: least_squares_slope(&x, &y),
        predicted_slope: rate_exponent(template, regime),
        regime,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fbm_wn_closed_form_h_half() {
        let spec = ModelSpec::fbm_wn(0.5, 2.0, 0.5, 1_000_000).unwrap();
        let r = fisher_closed_form(&spec).unwrap();
        let expected = 1e3 * 2f64.powi(-3) * 2.0 * 0.125;
        assert_relative_eq!(r.closed_form.unwrap(), expected, max_relative = 1e-12);
        assert_eq!(r.regime, Regime::Subcritical);
    }

    #[test]
    fn large_error_closed_forms() {
        let n = 1_000_000usize;
        let s = ModelSpec::large_error(0.6, 1.0, 1.3, n, None).unwrap();
        let r = fisher_closed_form(&s).unwrap();
        assert_eq!(r.regime, Regime::Supercritical);
        let expected = (n as f64).powf(1.0 - 4.0 * s.beta) / (2.0 * 1.3f64.powi(4));
        assert_relative_eq!(r.closed_form.unwrap(), expected, max_relative = 1e-10);

        let s = ModelSpec::large_error(0.75, 1.0, 1.0, n, None).unwrap();
        let r = fisher_closed_form(&s).unwrap();
        assert_eq!(r.regime, Regime::Critical);
        assert!(r.log_factor);
        let expected = 4.0 * s.beta * (n as f64).powf(1.0 - 4.0 * s.beta) * (n as f64).ln();
        assert_relative_eq!(r.closed_form.unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn report_json_round_trip_with_infinite_diamond() {
        let mut spec = ModelSpec::fbm_wn(0.5, 1.0, 1.0, 16).unwrap();
        spec.k = 0;
        let r = fisher_report(&spec, FisherMethod::All).unwrap();
        assert!(r.diamond.is_infinite());
        let text = serde_json::to_string(&r).unwrap();
        let back: FisherReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn slope_of_a_line() {
        assert_relative_eq!(least_squares_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap(), 2.0);
        assert!(least_squares_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn rate_scan_rejects_unsorted_grid() {
        let spec = ModelSpec::fbm_wn(0.5, 1.0, 1.0, 16).unwrap();
        assert!(rate_scan(&spec, &[100, 10]).is_err());
    }

    #[test]
    fn white_noise_scan_slope() {
        let mut spec = ModelSpec::fbm_wn(0.5, 1.0, 1.0, 16).unwrap();
        spec.k = 0;
        spec.beta = 0.3;
        let grid = [1000usize, 10_000, 100_000];
        let scan = rate_scan(&spec, &grid).unwrap();
        // I(n) = (n/2) s²/(s+1)², s = n^{−2β}.
        let i = |n: f64| {
            let s = n.powf(-0.6);
            0.5 * n * s * s / (s + 1.0).powi(2)
        };
        let x: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
        let y: Vec<f64> = grid.iter().map(|&n| i(n as f64).ln()).collect();
        assert_relative_eq!(scan.fitted_slope.unwrap(), least_squares_slope(&x, &y).unwrap(), max_relative = 1e-6);
    }
}
