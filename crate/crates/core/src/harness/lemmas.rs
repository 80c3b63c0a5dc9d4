use serde::{Deserialize, Serialize};

use crate::quadrature::dmn_integral;

/// Absolute tolerance for every constant check.
pub const LEMMA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub abs_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
    pub all_passed: bool,
}

/// `n!!`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

fn d0n_formula(n: i64) -> f64 {
    2.0 * double_factorial(n - 3) / double_factorial(n - 2)
}

/// `d_mn` from `τ^m = ((τ²+1) - 1)^(m/2)`:
/// `Σ_k (-1)^k C(m/2, k) d_{0, n-m+2k}`, with each `d_0n` from the
/// double-factorial formula.
fn binomial_expansion(m: i64, n: i64) -> f64 {
    let half = m / 2;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=half {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * d0n_formula(n - m + 2 * k);
        binom = binom * (half - k) as f64 / (k + 1) as f64;
    }
    sum
}

fn check(name: String, expected: f64, computed: f64) -> LemmaCheck {
    let abs_error = (computed - expected).abs();
    LemmaCheck {
        name,
        expected,
        computed,
        abs_error,
        passed: abs_error <= LEMMA_TOL,
    }
}

/// Compares the quadrature values of `d_mn = ∫ τ^m (τ²+1)^(-n/2) dτ` with
/// the tabulated constants and with `d_0n = 2 (n-3)!! / (n-2)!!`.
pub fn verify_lemmas() -> LemmaReport {
    let table = [
        (0, 3, 2.0),
        (0, 5, 4.0 / 3.0),
        (0, 7, 16.0 / 15.0),
        (2, 5, 2.0 / 3.0),
        (2, 7, 4.0 / 15.0),
    ];
    let mut checks: Vec<LemmaCheck> = table
        .iter()
        .map(|&(m, n, v)| check(format!("d_{m}{n}"), v, dmn_integral(m, n)))
        .collect();
    for n in [3i64, 5, 7, 9] {
        checks.push(check(format!("d_0{n} double factorial"), d0n_formula(n), dmn_integral(0, n as u32)));
    }
    for (m, n) in [(2, 5), (2, 7), (4, 7), (4, 9)] {
        checks.push(check(format!("d_{m}{n} binomial"), binomial_expansion(m, n), dmn_integral(m as u32, n as u32)));
    }
    let all_passed = checks.iter().all(|c| c.passed);
    LemmaReport { checks, all_passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(0), 1.0);
        assert_eq!(double_factorial(-1), 1.0);
        assert_eq!(double_factorial(6), 48.0);
        assert_eq!(double_factorial(7), 105.0);
    }

    #[test]
    fn binomial_expansion_reproduces_table() {
        assert!((binomial_expansion(2, 5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((binomial_expansion(2, 7) - 4.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn all_constants_pass() {
        let r = verify_lemmas();
        assert!(r.all_passed, "{r:?}");
        let d09 = r.checks.iter().find(|c| c.name.starts_with("d_09")).unwrap();
        assert!((d09.expected - 32.0 / 35.0).abs() < 1e-15);
    }
}
