//! Special functions and summation helpers shared by the numerical modules.

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Bernoulli numbers B_2, B_4, ..., B_24.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Hurwitz zeta function ζ(s, a) = Σ_{k≥0} (k + a)^{-s} for s > 1, a > 0.
///
/// Direct summation of the first terms followed by the Euler–Maclaurin
/// remainder; accurate to a few ulps over the ranges used here.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0, "hurwitz_zeta({s}, {a})");
    const DIRECT: usize = 16;
    let mut head = CompensatedSum::new();
    for k in 0..DIRECT {
        head.add((k as f64 + a).powf(-s));
    }
    let x = DIRECT as f64 + a;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Rising factorial s(s+1)...(s+2j-2) / (2j)! times x^{-s-2j+1}.
    let mut factor = s / x.powf(s + 1.0) / 2.0;
    let x2 = x * x;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b * factor;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        factor *= (s + m - 1.0) * (s + m) / ((m + 1.0) * (m + 2.0)) / x2;
    }
    head.add(tail);
    head.value()
}

/// Generalised binomial coefficient C(p, j) for real p.
pub fn binomial(p: f64, j: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c *= (p - i as f64) / (i as f64 + 1.0);
    }
    c
}

/// `x / sin(x)`, continuous through zero.
pub fn x_over_sin(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    } else {
        x / x.sin()
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn hurwitz_matches_riemann_values() {
        assert_relative_eq!(hurwitz_zeta(2.0, 1.0), PI * PI / 6.0, max_relative = 1e-14);
        assert_relative_eq!(hurwitz_zeta(4.0, 1.0), PI.powi(4) / 90.0, max_relative = 1e-14);
        // ζ(2, 1/2) = (2^2 - 1) ζ(2)
        assert_relative_eq!(hurwitz_zeta(2.0, 0.5), 3.0 * PI * PI / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn hurwitz_against_brute_force_near_one() {
        // s close to 1 converges slowly; compare against a long direct sum with
        // an integral tail.
        let s = 1.2;
        let a = 0.37;
        let n = 2_000_000usize;
        let direct: f64 = sum_compensated((0..n).map(|k| (k as f64 + a).powf(-s)));
        let x = n as f64 + a;
        let tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
        assert_relative_eq!(hurwitz_zeta(s, a), direct + tail, max_relative = 1e-12);
    }

    #[test]
    fn hurwitz_small_argument_is_dominated_by_first_term() {
        let a = 1e-9;
        let z = hurwitz_zeta(2.0, a);
        assert_relative_eq!(z, a.powi(-2) + PI * PI / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn gamma_reflection_branch() {
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn binomial_integer_and_fractional() {
        assert_eq!(binomial(5.0, 2), 10.0);
        assert_eq!(binomial(1.0, 2), 0.0);
        assert_relative_eq!(binomial(0.5, 2), -0.125, max_relative = 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum_compensated(v), 2.0);
    }
}
