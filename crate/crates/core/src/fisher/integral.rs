use std::f64::consts::PI;

use crate::error::Result;
use crate::model::{noise_spectrum, ModelSpec, XSpectrum};
use crate::quad::{gk15, integrate, QuadOptions};

/// Relative accuracy targeted by the spectral integral.
pub const INTEGRAL_REL_TOL: f64 = 1e-6;

/// Integrand f²/h² together with the pieces needed to place panels.
struct Integrand {
    spectrum: XSpectrum,
    signal: f64,
    k: u32,
    tau: f64,
}

impl Integrand {
    fn new(spec: &ModelSpec, spectrum: XSpectrum) -> Self {
        Self { spectrum, signal: spec.signal_factor(), k: spec.k, tau: spec.tau }
    }

    fn eval(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return self.ceiling();
        }
        let f = self.spectrum.eval(lambda);
        let h = self.signal * f + noise_spectrum(self.k, self.tau, lambda);
        let r = f / h;
        r * r
    }

    /// f²/h² never exceeds 1/(σ² n^{−2β})².
    fn ceiling(&self) -> f64 {
        self.signal.powi(-2)
    }

    /// ln(signal part) − ln(noise part).
    fn balance(&self, lambda: f64) -> f64 {
        (self.signal * self.spectrum.eval(lambda)).ln() - noise_spectrum(self.k, self.tau, lambda).ln()
    }
}

/// Frequency where σ² n^{−2β} f = 4^K τ² sin^{2K}(λ/2), if the two cross.
pub fn spectral_crossover(spec: &ModelSpec) -> Result<Option<f64>> {
    let g = Integrand::new(spec, spec.x_spectrum()?);
    Ok(find_crossover(&g))
}

fn find_crossover(g: &Integrand) -> Option<f64> {
    if g.balance(PI) >= 0.0 {
        return None;
    }
    // Walk down until the signal dominates, then bisect in log frequency.
    let mut hi = PI;
    let mut lo = PI / 16.0;
    while g.balance(lo) < 0.0 {
        hi = lo;
        lo /= 16.0;
        if lo < 1e-250 {
            return None;
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g.balance(m.exp()) >= 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    Some((0.5 * (a + b)).exp())
}

/// Panel edges: doubling away from `anchor` up to π and halving down to
/// `floor`.
fn panels(anchor: f64, floor: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = anchor;
    while a > floor {
        out.push((0.5 * a, a));
        a *= 0.5;
    }
    out.reverse();
    let mut a = anchor;
    while a < PI {
        let b = (2.0 * a).min(PI);
        out.push((a, b));
        a = b;
    }
    out
}

/// n^{1−4β}/(2π) ∫₀^π f²/h² dλ, by adaptive quadrature on log-spaced panels
/// anchored at the spectral crossover.
pub fn fisher_integral(spec: &ModelSpec) -> Result<f64> {
    let spectrum = spec.x_spectrum()?;
    fisher_integral_with(spec, spectrum)
}

/// As [`fisher_integral`] with an explicit signal spectrum.
pub fn fisher_integral_with(spec: &ModelSpec, spectrum: XSpectrum) -> Result<f64> {
    spec.validate()?;
    let g = Integrand::new(spec, spectrum);
    let value = spectral_integral(&g)?;
    Ok((spec.n as f64).powf(1.0 - 4.0 * spec.beta) / (2.0 * PI) * value)
}

fn spectral_integral(g: &Integrand) -> Result<f64> {
    let crossover = find_crossover(g);
    let crossed = crossover.is_some();
    let anchor = crossover.unwrap_or(PI);
    let ceiling = g.ceiling();

    // Coarse pass for the overall scale, then push the floor down until the
    // neglected [0, floor] piece is negligible. Below the crossover the
    // integrand rises towards its ceiling, so that is the bound used there.
    let mut eval = |x: f64| g.eval(x);
    let mut scale: f64 = panels(anchor, anchor / 64.0)
        .into_iter()
        .map(|(a, b)| gk15(&mut eval, a, b).0)
        .sum();
    let mut floor = anchor / 64.0;
    let local_bound = |floor: f64| {
        if crossed {
            floor * ceiling
        } else {
            2.0 * floor * g.eval(floor)
        }
    };
    while local_bound(floor) > 1e-3 * INTEGRAL_REL_TOL * scale && floor > 1e-300 {
        floor *= 0.5;
        scale += gk15(&mut eval, floor, 2.0 * floor).0;
    }

    let pieces = panels(anchor, floor);
    let opts = QuadOptions {
        abs_tol: 0.1 * INTEGRAL_REL_TOL * scale / pieces.len() as f64,
        rel_tol: 1e-3 * INTEGRAL_REL_TOL,
        max_intervals: 200,
    };
    let mut total = 0.0;
    for &(a, b) in pieces.iter().rev() {
        total += integrate(|x| g.eval(x), a, b, opts)?.value;
    }
    // The integrand is nearly flat on [0, floor].
    total += floor * g.eval(floor);
    Ok(total)
}

/// Integral computed with h replaced by a lower or an upper envelope of the
/// noise spectrum, 4^{−K}τ²λ^{2K} ≤ 4^K τ² sin^{2K}(λ/2) ≤ τ²λ^{2K}.
///
/// Returns (upper bound on the Fisher integral, lower bound).
pub fn fisher_integral_bounds(spec: &ModelSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let spectrum = spec.x_spectrum()?;
    let signal = spec.signal_factor();
    let tau2 = spec.tau * spec.tau;
    let k2 = 2 * spec.k as i32;
    let opts = QuadOptions { rel_tol: 1e-9, max_intervals: 5000, ..Default::default() };
    let pref = (spec.n as f64).powf(1.0 - 4.0 * spec.beta) / (2.0 * PI);
    let bound = |noise_factor: f64| -> Result<f64> {
        let integrand = |l: f64| {
            if l <= 0.0 {
                return signal.powi(-2);
            }
            let f = spectrum.eval(l);
            let h = signal * f + noise_factor * tau2 * l.powi(k2);
            (f / h).powi(2)
        };
        let anchor = spectral_crossover(spec)?.unwrap_or(PI);
        let mut total = 0.0;
        for (a, b) in panels(anchor, anchor * 1e-12) {
            total += integrate(integrand, a, b, opts)?.value;
        }
        Ok(pref * total)
    };
    let upper = bound(4f64.powi(-(spec.k as i32)))?;
    let lower = bound(1.0)?;
    Ok((upper, lower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::fisher_exact;
    use approx::assert_relative_eq;

    #[test]
    fn flat_spectra_reduce_to_white_noise_formula() {
        let (n, sigma, tau, beta) = (400usize, 1.2, 0.8, 0.3);
        let mut spec = ModelSpec::fbm_wn(0.5, sigma, tau, n).unwrap();
        spec.k = 0;
        spec.beta = beta;
        let exact = fisher_exact(&spec).unwrap();
        assert_relative_eq!(fisher_integral(&spec).unwrap(), exact, max_relative = 1e-6);
    }

    #[test]
    fn white_noise_fbm_benchmark() {
        let n = 100_000_000usize;
        let spec = ModelSpec::fbm_wn(0.5, 1.0, 1.0, n).unwrap();
        let i = fisher_integral(&spec).unwrap();
        let ratio = (n as f64).sqrt() / i;
        assert!((ratio / 8.0 - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn quarter_hurst_benchmark() {
        let n = 100_000_000usize;
        let spec = ModelSpec::fbm_wn(0.25, 1.0, 1.0, n).unwrap();
        let i = fisher_integral(&spec).unwrap();
        let v = (n as f64).powf(2.0 / 3.0) / i;
        assert!((v / 10.64 - 1.0).abs() < 0.02, "{v}");
    }

    #[test]
    fn sandwich_brackets_the_integral() {
        let spec = ModelSpec::fbm_wn(0.35, 1.0, 1.0, 10_000).unwrap();
        let mid = fisher_integral(&spec).unwrap();
        let (upper, lower) = fisher_integral_bounds(&spec).unwrap();
        assert!(lower <= mid && mid <= upper, "{lower} {mid} {upper}");
    }

    #[test]
    fn crossover_balances_the_two_spectra() {
        let spec = ModelSpec::fbm_wn(0.6, 1.0, 1.0, 1_000_000).unwrap();
        let l = spectral_crossover(&spec).unwrap().unwrap();
        let f = spec.x_spectrum().unwrap().eval(l);
        assert_relative_eq!(spec.signal_factor() * f, noise_spectrum(1, 1.0, l), max_relative = 1e-9);
    }
}
