//! `zeta(1/2 + it)` on the critical line: an Euler-Maclaurin reference
//! evaluator and a Riemann-Siegel fast path, plus the integrand `|zeta|^4`.

mod em;
mod rs;
#[rustfmt::skip]
mod rs_coeffs;

pub use em::{zeta_half_em, EM_MAX_T, EM_MIN_TOL};
pub use rs::theta;

use crate::special::ComplexValue;
use crate::{Error, Result};

/// Lowest height accepted by [`zeta_half_rs`].
pub const RS_MIN_T: f64 = 10.0;

/// Below this height the Riemann-Siegel remainder series (five correction
/// terms) is not accurate to 1e-8, so [`zeta_half_rs`] answers from the
/// Euler-Maclaurin sum instead, which is cheap at such heights.
pub const RS_SWITCH_T: f64 = 200.0;

/// Tolerance requested from the Euler-Maclaurin path when it stands in for
/// the fast path.
const FAST_EM_TOL: f64 = 1e-12;

/// One sample of the critical-line integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalLineSample {
    pub t: f64,
    pub zeta: ComplexValue,
    /// `|zeta(1/2 + it)|^4`
    pub z4: f64,
}

impl CriticalLineSample {
    pub fn at(t: f64) -> Result<Self> {
        let zeta = zeta_half(t)?;
        let n2 = zeta.re * zeta.re + zeta.im * zeta.im;
        Ok(Self {
            t,
            zeta,
            z4: n2 * n2,
        })
    }
}

/// Hardy's function `Z(t) = e^{i theta(t)} zeta(1/2 + it)`, real for real `t`.
pub fn hardy_z(t: f64) -> Result<f64> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Range(format!("t = {t} must be >= 0")));
    }
    if t >= RS_SWITCH_T {
        Ok(rs::hardy_z_rs(t))
    } else {
        let z = zeta_half_em(t, FAST_EM_TOL)?;
        Ok((ComplexValue::from_polar(1.0, theta(t)) * z).re)
    }
}

/// Fast evaluation of `zeta(1/2 + it)` for `t >= 10`.
///
/// Riemann-Siegel main sum with the remainder corrections `C_0 .. C_4` for
/// `t >= RS_SWITCH_T`; Euler-Maclaurin below that.
pub fn zeta_half_rs(t: f64) -> Result<ComplexValue> {
    if !(t >= RS_MIN_T) || !t.is_finite() {
        return Err(Error::Range(format!("t = {t} below {RS_MIN_T}")));
    }
    if t < RS_SWITCH_T {
        return zeta_half_em(t, FAST_EM_TOL);
    }
    let z = rs::hardy_z_rs(t);
    Ok(ComplexValue::from_polar(z, -theta(t)))
}

/// Riemann-Siegel formula without the low-height fallback. Exposed for the
/// accuracy study in the tests and the CLI.
pub fn zeta_half_rs_raw(t: f64) -> Result<ComplexValue> {
    if !(t >= RS_MIN_T) || !t.is_finite() {
        return Err(Error::Range(format!("t = {t} below {RS_MIN_T}")));
    }
    let z = rs::hardy_z_rs(t);
    Ok(ComplexValue::from_polar(z, -theta(t)))
}

/// `zeta(1/2 + it)` for any `t >= 0`, choosing the evaluator by height.
pub fn zeta_half(t: f64) -> Result<ComplexValue> {
    if t >= RS_MIN_T {
        zeta_half_rs(t)
    } else if t >= 0.0 {
        zeta_half_em(t, FAST_EM_TOL)
    } else {
        Err(Error::Range(format!("t = {t} must be >= 0")))
    }
}

/// `|zeta(1/2 + it)|^2`.
pub fn abs_zeta_sq(t: f64) -> Result<f64> {
    if t >= RS_SWITCH_T {
        let z = rs::hardy_z_rs(t);
        return Ok(z * z);
    }
    Ok(zeta_half(t)?.norm_sqr())
}

/// `|zeta(1/2 + it)|^4`.
pub fn abs_zeta_pow4(t: f64) -> Result<f64> {
    let a = abs_zeta_sq(t)?;
    Ok(a * a)
}
