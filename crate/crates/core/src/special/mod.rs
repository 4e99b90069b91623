//! Complex gamma, log-gamma and the modified Bessel function `K_0`, plus the
//! handful of mathematical constants the transform formulas need.
//!
//! All routines use the principal branch: `Log z` has imaginary part in
//! `(-pi, pi]` and `a^b := exp(b Log a)`.

mod bessel;
mod gamma;

pub use bessel::{bessel_i0, bessel_k0, bessel_k0_large, bessel_k0_series, K0_SERIES_RADIUS};
pub use gamma::{gamma, log_gamma, log_gamma_unchecked};

use num_complex::Complex64;

/// Complex number with principal-branch conventions for logarithms and powers.
pub type ComplexValue = Complex64;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// `zeta'(2)`.
pub const ZETA_PRIME_2: f64 = -0.937_548_254_315_843_8;
/// `zeta(3)` (Apery's constant).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;
pub const PI: f64 = std::f64::consts::PI;

/// The constants referenced by the closed-form expansions, bundled so they can
/// be echoed in reports.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Constants {
    pub euler_gamma: f64,
    pub zeta_prime_2: f64,
    pub pi: f64,
}

impl Constants {
    pub const fn new() -> Self {
        Self {
            euler_gamma: EULER_GAMMA,
            zeta_prime_2: ZETA_PRIME_2,
            pi: PI,
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::new()
    }
}

/// `a^b` on the principal branch.
pub fn cpow(a: ComplexValue, b: ComplexValue) -> ComplexValue {
    (b * a.ln()).exp()
}

pub(crate) fn finite(z: ComplexValue, what: &str) -> crate::Result<ComplexValue> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(crate::Error::NonFinite(format!("{what} = {z}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_in_range() {
        let c = Constants::new();
        assert!(c.euler_gamma > 0.577_215_6 && c.euler_gamma < 0.577_215_7);
        assert!(c.zeta_prime_2 > -0.937_55 && c.zeta_prime_2 < -0.937_54);
    }

    #[test]
    fn zeta_prime_2_closed_form() {
        // zeta'(2) = pi^2/6 (gamma + log(2 pi) - 12 log A), A = Glaisher-Kinkelin
        let glaisher: f64 = 1.282_427_129_100_622_6;
        let v = PI * PI / 6.0 * (EULER_GAMMA + (2.0 * PI).ln() - 12.0 * glaisher.ln());
        assert!((v - ZETA_PRIME_2).abs() < 1e-14);
    }

    #[test]
    fn cpow_principal_branch() {
        let s = ComplexValue::new(0.5, 0.0);
        let w = ComplexValue::new(0.0, -3.0);
        let v = cpow(s, w);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert!((v.arg() + 3.0 * 0.5f64.ln()).abs() < 1e-15);
    }
}
