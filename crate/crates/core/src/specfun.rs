//! Gamma function and the normalizing constant of the integral fractional
//! Laplacian.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;

// Lanczos coefficients for g = 7, n = 9 (the set used by the GNU Scientific Library).
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive real arguments.
///
/// Arguments below one half go through the reflection formula so that the
/// rational approximation is only ever evaluated on `[0.5, inf)`.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!(
            "gamma requires a positive finite argument, got {x}"
        )));
    }
    if x > 171.0 {
        return Err(Error::domain(format!("gamma({x}) overflows f64")));
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx), with 1 - x in (0.5, 1)
        return PI / ((PI * x).sin() * gamma_positive(1.0 - x));
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so that t^(z+1/2) e^{-t} does not overflow before x ~ 171
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * sum
}

/// The constant `C_{N,s}` in front of the principal-value integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracConstant {
    pub dim: u32,
    pub order: f64,
    pub value: f64,
}

/// `C_{N,s} = s 2^{2s} Γ((N+2s)/2) / (π^{N/2} Γ(1-s))`.
pub fn frac_constant(dim: u32, s: f64) -> Result<FracConstant> {
    if dim == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!(
            "fractional order must lie in (0, 1), got {s}"
        )));
    }
    let n = f64::from(dim);
    let value =
        s * 4f64.powf(s) * gamma((n + 2.0 * s) / 2.0)? / (PI.powf(n / 2.0) * gamma(1.0 - s)?);
    Ok(FracConstant {
        dim,
        order: s,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_known_values() {
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-13);
        assert!(rel(gamma(0.5).unwrap(), 1.772_453_850_905_516) < 1e-13);
        // Γ(1.5) = √π / 2
        assert!(rel(gamma(1.5).unwrap(), PI.sqrt() / 2.0) < 1e-13);
    }

    #[test]
    fn gamma_factorials() {
        let mut fact = 1.0_f64;
        for n in 1..=15u32 {
            // Γ(n) = (n-1)!
            assert!(rel(gamma(f64::from(n)).unwrap(), fact) < 1e-12, "n = {n}");
            fact *= f64::from(n);
        }
    }

    #[test]
    fn gamma_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(0.5..20.0);
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs, "x = {x}");
        }
    }

    #[test]
    fn gamma_small_and_large_arguments() {
        // reflection branch: Γ(0.25) Γ(0.75) = π √2
        let prod = gamma(0.25).unwrap() * gamma(0.75).unwrap();
        assert!(rel(prod, PI * 2f64.sqrt()) < 1e-13);
        // Γ(30) = 29!
        let f29: f64 = (1..=29).map(f64::from).product();
        assert!(rel(gamma(30.0).unwrap(), f29) < 1e-12);
    }

    #[test]
    fn gamma_rejects_bad_input() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
        assert!(gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn constant_closed_forms() {
        let c = frac_constant(1, 0.5).unwrap();
        assert!(rel(c.value, 1.0 / PI) < 1e-13);
        let c2 = frac_constant(2, 0.5).unwrap();
        assert!(rel(c2.value, 1.0 / (2.0 * PI)) < 1e-13);
    }

    #[test]
    fn constant_vanishes_linearly_near_one() {
        let c = frac_constant(1, 0.999).unwrap();
        assert!((c.value / 0.001 - 2.0).abs() < 0.02);
    }

    #[test]
    fn constant_endpoint_behavior() {
        let mut prev_hi = f64::INFINITY;
        let mut prev_lo = f64::INFINITY;
        for k in 1..=12 {
            let eps = 10f64.powi(-k);
            let hi = frac_constant(1, 1.0 - eps).unwrap().value;
            let lo = frac_constant(1, eps).unwrap().value;
            assert!(hi > 0.0 && lo > 0.0);
            assert!(hi < prev_hi && lo < prev_lo);
            prev_hi = hi;
            prev_lo = lo;
        }
        assert!(prev_hi < 1e-11 && prev_lo < 1e-11);
    }

    #[test]
    fn constant_domain_errors() {
        assert!(frac_constant(1, 0.0).is_err());
        assert!(frac_constant(1, 1.0).is_err());
        assert!(frac_constant(0, 0.5).is_err());
        assert!(frac_constant(3, 0.7).unwrap().value > 0.0);
    }
}
