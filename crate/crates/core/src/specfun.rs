//! Real-argument special functions: log Γ, log n!, log Barnes G and ζ′(−1).

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};
use crate::numerics::euler_maclaurin::bernoulli_even;

/// ζ′(−1), the derivative of the Riemann zeta function at −1.
#[allow(clippy::excessive_precision)]
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_213_919_660_242_78;

/// Arguments below this are shifted upward before the Barnes G asymptotic series is applied.
const BARNES_SHIFT_THRESHOLD: f64 = 10.0;

/// Number of Bernoulli corrections kept in the Barnes G series; the first omitted term is
/// below 1e-18 at the shift threshold.
const BARNES_SERIES_TERMS: usize = 8;

/// Mathematical constants shared by the expansion formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialConstants {
    pub zeta_prime_minus_one: f64,
    pub log_two_pi: f64,
    pub log_pi: f64,
}

impl SpecialConstants {
    pub fn get() -> &'static SpecialConstants {
        static CONSTANTS: OnceLock<SpecialConstants> = OnceLock::new();
        CONSTANTS.get_or_init(|| SpecialConstants {
            zeta_prime_minus_one: ZETA_PRIME_MINUS_ONE,
            log_two_pi: (2.0 * PI).ln(),
            log_pi: PI.ln(),
        })
    }
}

/// ζ′(−1).
pub fn zeta_prime_minus_one() -> f64 {
    ZETA_PRIME_MINUS_ONE
}

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("log_gamma", format!("argument {x} must be positive and finite")));
    }
    Ok(libm::lgamma(x))
}

/// `log(n!)`.
pub fn log_factorial(n: u64) -> f64 {
    // n + 1 is exact in f64 up to 2^53, far beyond where log(n!) stays meaningful.
    debug_assert!(n < (1u64 << 53));
    libm::lgamma(n as f64 + 1.0)
}

/// Stirling's approximation `n log n − n + ½ log n + ½ log 2π` without the `1/(12n)` correction.
pub fn stirling_log_factorial(n: f64) -> f64 {
    n * n.ln() - n + 0.5 * n.ln() + 0.5 * SpecialConstants::get().log_two_pi
}

/// `log G(x)` for the Barnes G-function, `x > 0`.
///
/// For `x − 1 ≥ 10` the large-argument series of `log G(z + 1)` is summed directly; smaller
/// arguments are first lifted with `log G(x) = log G(x + m) − Σ_{i<m} log Γ(x + i)`.
pub fn log_barnes_g(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(
            "log_barnes_g",
            format!("argument {x} must be positive and finite"),
        ));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    let mut shifted = x;
    let mut gamma_terms = Vec::new();
    while shifted - 1.0 < BARNES_SHIFT_THRESHOLD {
        gamma_terms.push(libm::lgamma(shifted));
        shifted += 1.0;
    }
    let correction = crate::numerics::compensated_sum(gamma_terms.iter().copied());
    Ok(barnes_asymptotic(shifted - 1.0) - correction)
}

/// `log G(z + 1)` by its asymptotic series; accurate for `z ≥ 10`.
fn barnes_asymptotic(z: f64) -> f64 {
    let constants = SpecialConstants::get();
    let log_z = z.ln();
    let z2 = z * z;
    let mut tail = 0.0;
    let mut inv_power = 1.0;
    for k in 1..=BARNES_SERIES_TERMS {
        inv_power /= z2;
        let kf = k as f64;
        tail += bernoulli_even(k + 1) / (4.0 * kf * (kf + 1.0)) * inv_power;
    }
    0.5 * z2 * log_z - 0.75 * z2 + 0.5 * constants.log_two_pi * z - log_z / 12.0 + constants.zeta_prime_minus_one + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_gamma_known_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-14);
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
        assert!(log_gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn log_gamma_half_matches_integral() {
        // ∫₀^∞ t^{-1/2} e^{-t} dt with t = u²: 2∫₀^∞ e^{-u²} du, by the half-line quadrature.
        let q = crate::numerics::integrate_half_line(|u| 2.0 * (-u * u).exp(), 1.0, 1e-14).unwrap();
        assert!((q.value.ln() - log_gamma(0.5).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn log_factorial_small() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert!((log_factorial(4) - 24f64.ln()).abs() < 1e-14);
        let direct: f64 = (1..=20).map(|k| (k as f64).ln()).sum();
        assert!((log_factorial(20) - direct).abs() < 1e-12);
    }

    #[test]
    fn log_factorial_stirling() {
        let gap = log_factorial(100) - stirling_log_factorial(100.0);
        assert!(gap > 0.0 && gap <= 1.01 / 1200.0, "gap {gap}");
        for n in [1_000_000u64, 5_000_000, 20_000_000] {
            let gap = log_factorial(n) - stirling_log_factorial(n as f64);
            assert!(gap.abs() <= 1e-7, "n = {n}: {gap}");
        }
    }

    #[test]
    fn barnes_small_integers() {
        assert_eq!(log_barnes_g(1.0).unwrap(), 0.0);
        assert_eq!(log_barnes_g(2.0).unwrap(), 0.0);
        assert!((log_barnes_g(3.0).unwrap()).abs() < 1e-12);
        assert!((log_barnes_g(5.0).unwrap() - 12f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn barnes_three_halves() {
        let c = SpecialConstants::get();
        let expected = 2f64.ln() / 24.0 + 1.5 * c.zeta_prime_minus_one + 0.25 * c.log_pi;
        let got = log_barnes_g(1.5).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!((got - 0.066_931_9).abs() < 1e-7);
    }

    #[test]
    fn barnes_rejects_nonpositive() {
        assert!(log_barnes_g(0.0).is_err());
        assert!(log_barnes_g(-2.0).is_err());
    }

    #[test]
    fn barnes_large_argument_relative() {
        // G(n) = Π_{k=1}^{n-2} k!, so log G(n) = Σ_{k=1}^{n-2} log k!.
        for n in [200u64, 1000, 10_000] {
            let direct = crate::numerics::compensated_sum((1..=n - 2).map(log_factorial));
            let got = log_barnes_g(n as f64).unwrap();
            assert!(((got - direct) / direct).abs() < 1e-13, "n = {n}: {got} vs {direct}");
        }
    }

    #[test]
    fn constants_are_sane() {
        let c = SpecialConstants::get();
        assert!(c.zeta_prime_minus_one > -0.17 && c.zeta_prime_minus_one < -0.16);
        let glaisher = (1.0 / 12.0 - zeta_prime_minus_one()).exp();
        assert!(glaisher > 1.28 && glaisher < 1.29);
        assert_eq!(c.log_two_pi, (2.0 * PI).ln());
    }
}
