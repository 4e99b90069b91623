//! Riemann-Siegel evaluation of `Z(t)` and `zeta(1/2 + it)`.

use super::rs_coeffs::{C0, C1, C2, C3, C4};
use crate::special::{log_gamma_unchecked, ComplexValue, PI};

/// Riemann-Siegel theta function, `Im log Gamma(1/4 + it/2) - (t/2) log pi`.
pub fn theta(t: f64) -> f64 {
    log_gamma_unchecked(ComplexValue::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Hardy's `Z(t)` from the main sum and the corrections `C_0 .. C_4`.
pub(crate) fn hardy_z_rs(t: f64) -> f64 {
    let th = theta(t);
    let tau = (t / (2.0 * PI)).sqrt();
    let n = tau.floor() as usize;
    let mut main = 0.0;
    for k in (1..=n).rev() {
        let kf = k as f64;
        main += (th - t * kf.ln()).cos() / kf.sqrt();
    }
    let x = tau - n as f64 - 0.5;
    let inv = 1.0 / tau;
    let rem = horner(&C0, x)
        + inv * (horner(&C1, x) + inv * (horner(&C2, x) + inv * (horner(&C3, x) + inv * horner(&C4, x))));
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * main + sign * rem / tau.sqrt()
}
