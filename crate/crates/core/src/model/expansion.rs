//! Finite sums of power/log terms `c · x^p · (ln x)^q`, used to represent the
//! large-lag behaviour of autocovariance sequences.

use statrs::function::gamma::{gamma, gamma_ur};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogTerm {
    pub coef: f64,
    pub power: f64,
    pub log_power: f64,
}

impl PowerLogTerm {
    pub fn eval(&self, x: f64) -> f64 {
        let base = self.coef * x.powf(self.power);
        if self.log_power == 0.0 {
            base
        } else {
            base * x.ln().abs().powf(self.log_power)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerLogSeries {
    terms: Vec<PowerLogTerm>,
}

impl PowerLogSeries {
    pub fn new(terms: Vec<PowerLogTerm>) -> Self {
        let mut s = Self { terms: Vec::new() };
        for t in terms {
            s.push(t);
        }
        s
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(coef: f64, power: f64, log_power: f64) -> Self {
        Self::new(vec![PowerLogTerm { coef, power, log_power }])
    }

    pub fn terms(&self) -> &[PowerLogTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, t: PowerLogTerm) {
        if t.coef == 0.0 {
            return;
        }
        if let Some(existing) = self
            .terms
            .iter_mut()
            .find(|e| e.power == t.power && e.log_power == t.log_power)
        {
            existing.coef += t.coef;
        } else {
            self.terms.push(t);
        }
    }

    /// Evaluate at `x > 1`; terms are summed from the smallest magnitude up.
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().rev().map(|t| t.eval(x)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| PowerLogTerm { coef: t.coef * factor, ..*t })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            out.push(PowerLogTerm {
                coef: t.coef * t.power,
                power: t.power - 1.0,
                log_power: t.log_power,
            });
            if t.log_power != 0.0 {
                out.push(PowerLogTerm {
                    coef: t.coef * t.log_power,
                    power: t.power - 1.0,
                    log_power: t.log_power - 1.0,
                });
            }
        }
        out
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |acc, _| acc.derivative())
    }

    pub fn square(&self) -> Self {
        let mut out = Self::zero();
        for a in &self.terms {
            for b in &self.terms {
                out.push(PowerLogTerm {
                    coef: a.coef * b.coef,
                    power: a.power + b.power,
                    log_power: a.log_power + b.log_power,
                });
            }
        }
        out
    }

    /// Largest power among the terms (the dominant decay rate).
    pub fn leading_power(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.power).max_by(|a, b| a.total_cmp(b))
    }

    /// ∫_{x0}^∞ of the series; `None` if some term is not integrable.
    pub fn integral_to_infinity(&self, x0: f64) -> Option<f64> {
        let mut total = 0.0;
        for t in self.terms.iter().rev() {
            if t.power >= -1.0 {
                return None;
            }
            let r = -(t.power + 1.0);
            let value = if t.log_power == 0.0 {
                x0.powf(-r) / r
            } else {
                // Substituting x = e^v gives r^{-q-1} Γ(q+1, r ln x0).
                let a = t.log_power + 1.0;
                if a <= 0.0 || x0 <= 1.0 {
                    return None;
                }
                r.powf(-a) * gamma_ur(a, r * x0.ln()) * gamma(a)
            };
            total += t.coef * value;
        }
        Some(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};
    use approx::assert_relative_eq;

    #[test]
    fn derivative_matches_finite_difference() {
        let s = PowerLogSeries::new(vec![
            PowerLogTerm { coef: 0.3, power: -1.4, log_power: 0.5 },
            PowerLogTerm { coef: -0.1, power: -3.4, log_power: 0.0 },
        ]);
        let x = 37.0;
        let h = 1e-4;
        let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
        assert_relative_eq!(s.derivative().eval(x), fd, max_relative = 1e-7);
    }

    #[test]
    fn square_matches_pointwise_square() {
        let s = PowerLogSeries::new(vec![
            PowerLogTerm { coef: 0.3, power: -0.8, log_power: 1.0 },
            PowerLogTerm { coef: 0.2, power: -2.8, log_power: 0.0 },
        ]);
        for x in [2.0, 10.0, 1e4] {
            assert_relative_eq!(s.square().eval(x), s.eval(x).powi(2), max_relative = 1e-13);
        }
    }

    #[test]
    fn integral_with_log_factor_matches_quadrature() {
        let s = PowerLogSeries::single(1.0, -1.7, 0.6);
        let x0 = 5.0;
        // Map [x0, ∞) to (0, 1] with x = x0 / t.
        let num = integrate(
            |t: f64| if t == 0.0 { 0.0 } else { s.eval(x0 / t) * x0 / (t * t) },
            0.0,
            1.0,
            QuadOptions { rel_tol: 1e-11, ..Default::default() },
        )
        .unwrap();
        assert_relative_eq!(s.integral_to_infinity(x0).unwrap(), num.value, max_relative = 1e-8);
    }

    #[test]
    fn non_integrable_term_is_rejected() {
        assert!(PowerLogSeries::single(1.0, -0.5, 0.0).integral_to_infinity(2.0).is_none());
    }
}
