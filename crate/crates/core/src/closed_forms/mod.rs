//! Closed-form and asymptotic expansions of `L_1` and `L_2`: Kober's
//! expansion at real arguments, Atkinson's series in `d(n)` and in
//! `d_4(n) K_0`, and the degree-four main term in `log(1/s)`.

mod lstsq;

use serde::Serialize;

pub use lstsq::{least_squares, LeastSquares};

use crate::arithmetic::DivisorTable;
use crate::special::{bessel_k0, ComplexValue, EULER_GAMMA, PI, ZETA_PRIME_2};
use crate::transforms::{
    gamma_derivatives_at_one, laplace_quadrature, LaplaceResult, Method, QuadratureConfig, P4,
};
use crate::{Error, Result};

/// Where the main-term constants came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Fitted,
}

/// `A .. E` in `(1/s)(A L^4 + B L^3 + C L^2 + D L + E)`, `L = Log(1/s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainTermCoeffs {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub provenance: Provenance,
}

/// `A = 1/(2 pi^2)`.
pub fn exact_a() -> f64 {
    1.0 / (2.0 * PI * PI)
}

/// `B = pi^{-2} (2 log(2 pi) - 6 gamma + 24 zeta'(2) pi^{-2})`.
pub fn exact_b() -> f64 {
    (2.0 * (2.0 * PI).ln() - 6.0 * EULER_GAMMA + 24.0 * ZETA_PRIME_2 / (PI * PI)) / (PI * PI)
}

impl MainTermCoeffs {
    /// Exact `A` and `B`; `C = D = E = 0` until fitted.
    pub fn closed_form() -> Self {
        Self {
            a: exact_a(),
            b: exact_b(),
            c: 0.0,
            d: 0.0,
            e: 0.0,
            provenance: Provenance::ClosedForm,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }

    /// Main-term coefficients generated by `d(T P_4(log T))` under the
    /// Laplace transform. The map is triangular: `A = a_4`,
    /// `B = a_3 + (4 - 4 gamma) a_4`, and so on.
    pub fn from_p4(p4: &P4, provenance: Provenance) -> Self {
        let m = p4_to_main_matrix();
        let b = p4.a;
        let mut out = [0.0; 5];
        for (row, slot) in out.iter_mut().enumerate() {
            *slot = (0..5).map(|j| m[row][j] * b[j]).sum();
        }
        // out[0] is the L^4 coefficient
        Self {
            a: out[0],
            b: out[1],
            c: out[2],
            d: out[3],
            e: out[4],
            provenance,
        }
    }

    /// Inverse of [`MainTermCoeffs::from_p4`].
    pub fn to_p4(&self) -> P4 {
        let m = p4_to_main_matrix();
        let y = self.as_array();
        // upper-triangular in the (L^4..L^0) x (a_4..a_0) ordering
        let mut a = [0.0; 5];
        for row in 0..5 {
            let j = 4 - row;
            let mut rhs = y[row];
            for (jj, &aj) in a.iter().enumerate().skip(j + 1) {
                rhs -= m[row][jj] * aj;
            }
            a[j] = rhs / m[row][j];
        }
        P4 { a }
    }
}

/// `m[r][j]`: coefficient of `L^{4-r}/s` contributed by `a_j`.
fn p4_to_main_matrix() -> [[f64; 5]; 5] {
    let g = gamma_derivatives_at_one();
    // d(T P_4(log T)) = sum_j (a_j + (j+1) a_{j+1}) log^j T
    // int log^j T e^{-sT} dT = s^{-1} sum_i C(j,i) g_i L^{j-i}
    let mut m = [[0.0; 5]; 5];
    for j in 0..5 {
        // a_j feeds b_j with weight 1 and b_{j-1} with weight j
        let feeds: [(usize, f64); 2] = [(j, 1.0), (j.wrapping_sub(1), j as f64)];
        for (bj, wgt) in feeds {
            if bj > 4 || wgt == 0.0 {
                continue;
            }
            for (i, gi) in g.iter().enumerate().take(bj + 1) {
                let power = bj - i;
                m[4 - power][j] += wgt * crate::transforms::binomial(bj, i) * gi;
            }
        }
    }
    m
}

/// `(1/s)(A L^4 + B L^3 + C L^2 + D L + E)` with `L = Log(1/s)`.
pub fn main_term(s: ComplexValue, coeffs: &MainTermCoeffs) -> Result<ComplexValue> {
    check_theorem_region(s)?;
    let l = -s.ln();
    let l2 = l * l;
    let l3 = l2 * l;
    let l4 = l2 * l2;
    let poly = l4 * coeffs.a + l3 * coeffs.b + l2 * coeffs.c + l * coeffs.d + coeffs.e;
    Ok(poly / s)
}

/// `0 < |s| <= 1` and `|arg s| < pi/2`.
pub fn check_theorem_region(s: ComplexValue) -> Result<()> {
    let r = s.norm();
    if !(r > 0.0 && r <= 1.0) || !(s.re > 0.0) {
        return Err(Error::Domain(format!(
            "s = {s} outside 0 < |s| <= 1, |arg s| < pi/2"
        )));
    }
    Ok(())
}

/// `(gamma - log(4 pi sigma)) / (2 sin sigma)`.
pub fn kober_main(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < PI / 2.0) {
        return Err(Error::Domain(format!("sigma = {sigma} outside (0, pi/2)")));
    }
    Ok((EULER_GAMMA - (4.0 * PI * sigma).ln()) / (2.0 * sigma.sin()))
}

/// Fitted `c_0 .. c_N` in `L_1(2 sigma) - kober_main(sigma) ~ sum c_n sigma^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoberCoeffs {
    pub c: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    /// root-mean-square residual on the fitting points
    pub residual: f64,
}

impl KoberCoeffs {
    pub fn eval(&self, sigma: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &c| acc * sigma + c)
    }
}

/// Quadrature tolerance used for the fits, relative to a rough size of
/// `L_k(sigma)`.
fn fit_config(k: u32, sigma: f64) -> QuadratureConfig {
    let l = (1.0 / sigma).ln().max(1.0);
    let size = if k == 1 { (l + 1.0) / sigma } else { (0.06 * l.powi(4) + 1.0) / sigma };
    QuadratureConfig::with_tol(1e-8 * size)
}

/// `L_k(sigma)` at real points with the tolerance policy of the fits.
pub fn laplace_real(k: u32, sigmas: &[f64]) -> Result<Vec<LaplaceResult>> {
    sigmas
        .iter()
        .map(|&s| laplace_quadrature(k, ComplexValue::new(s, 0.0), &fit_config(k, s)))
        .collect()
}

/// `L_1(2 sigma) - kober_main(sigma)` from the quadrature oracle.
pub fn kober_remainder(sigmas: &[f64]) -> Result<Vec<f64>> {
    let doubled: Vec<f64> = sigmas.iter().map(|s| 2.0 * s).collect();
    let l1 = laplace_real(1, &doubled)?;
    sigmas
        .iter()
        .zip(l1)
        .map(|(&s, r)| Ok(r.value.re - kober_main(s)?))
        .collect()
}

/// Least-squares fit of `L_1(2 sigma) - kober_main(sigma)` by a degree-`N`
/// polynomial in `sigma`.
pub fn kober_fit(sigmas: &[f64], n: usize) -> Result<KoberCoeffs> {
    check_kober_grid(sigmas, n)?;
    let rem = kober_remainder(sigmas)?;
    kober_fit_values(sigmas, &rem, n)
}

fn check_kober_grid(sigmas: &[f64], n: usize) -> Result<()> {
    let mut sorted = sigmas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < n + 3 {
        return Err(Error::Validation(format!(
            "need at least {} distinct sigma values, got {}",
            n + 3,
            sorted.len()
        )));
    }
    if sorted.iter().any(|&s| !(s > 0.0 && s < 0.5)) {
        return Err(Error::Validation("sigma values must lie in (0, 0.5)".into()));
    }
    Ok(())
}

/// Polynomial fit of precomputed remainders.
pub fn kober_fit_values(sigmas: &[f64], values: &[f64], n: usize) -> Result<KoberCoeffs> {
    check_kober_grid(sigmas, n)?;
    let rows: Vec<Vec<f64>> = sigmas
        .iter()
        .map(|&s| (0..=n).map(|j| s.powi(j as i32)).collect())
        .collect();
    let fit = least_squares(&rows, values)?;
    Ok(KoberCoeffs {
        c: fit.coeffs,
        n,
        residual: fit.rms_residual,
    })
}

/// Held-out error of degree-`n` fits on windows `[lo, lo + w]`.
///
/// Points inside each window alternate between the fit and the held-out
/// set. Returns `(w, max held-out |residual|)` per width; for a smooth
/// remainder the error scales like `w^{n+1}`.
pub fn kober_window_scaling(
    sigmas: &[f64],
    values: &[f64],
    lo: f64,
    widths: &[f64],
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    if sigmas.len() != values.len() {
        return Err(Error::Validation("sigma and value lengths differ".into()));
    }
    widths
        .iter()
        .map(|&w| {
            let inside: Vec<(f64, f64)> = sigmas
                .iter()
                .zip(values)
                .filter(|(&s, _)| s >= lo && s <= lo + w * (1.0 + 1e-12))
                .map(|(&s, &v)| (s, v))
                .collect();
            let (fit, held): (Vec<_>, Vec<_>) = inside.iter().enumerate().partition(|(i, _)| i % 2 == 0);
            let (fs, fv): (Vec<f64>, Vec<f64>) = fit.into_iter().map(|(_, p)| *p).unzip();
            let coeffs = kober_fit_values(&fs, &fv, n)?;
            if held.is_empty() {
                return Err(Error::Validation(format!("window of width {w} has no held-out points")));
            }
            let worst = held
                .iter()
                .map(|(_, (s, v))| (coeffs.eval(*s) - v).abs())
                .fold(0.0, f64::max);
            Ok((w, worst))
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`; points with
/// nonpositive coordinates are skipped. `NaN` if fewer than two remain.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return f64::NAN;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx > 1e-12 {
        sxy / sxx
    } else {
        f64::NAN
    }
}

/// Bound on `sum_{n > N} d(n) e^{-rho n}` using `d(n) <= 2 sqrt(n)`.
fn divisor_tail(rho: f64, n: usize) -> f64 {
    let m = (n + 1) as f64;
    if rho * m <= 0.5 {
        return f64::INFINITY;
    }
    // sqrt(x) e^{-rho x} decreases for x > 1/(2 rho); ratio of consecutive
    // terms at most sqrt(1 + 1/m) e^{-rho}
    let q = (1.0 + 1.0 / m).sqrt() * (-rho).exp();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    2.0 * m.sqrt() * (-rho * m).exp() / (1.0 - q)
}

/// Absolute tolerance the Atkinson series must reach with the given terms.
pub const SERIES_TOL: f64 = 1e-10;

/// `-i e^{is/2}(log 2pi - gamma + (pi/2 - s) i) + 2 pi e^{-is/2} sum_{n<=N} d(n) exp(-2 pi i n e^{-is})`.
///
/// `err_estimate` bounds the dropped tail; the remainder `lambda_1(s)` is not
/// modelled.
pub fn atkinson_l1(s: ComplexValue, n_terms: usize, dtable: &DivisorTable) -> Result<LaplaceResult> {
    if !(s.re > 0.0 && s.re < PI) || !s.im.is_finite() {
        return Err(Error::Domain(format!("s = {s} outside the strip 0 < Re s < pi")));
    }
    check_table(dtable, 2, n_terms)?;
    let i = ComplexValue::i();
    let half = (i * s * 0.5).exp();
    let main = -i * half * ((2.0 * PI).ln() - EULER_GAMMA + (PI / 2.0 - s) * i);
    let q = (-i * s).exp();
    let mut sum = ComplexValue::new(0.0, 0.0);
    for n in 1..=n_terms {
        let arg = -2.0 * PI * i * (n as f64) * q;
        sum += arg.exp() * dtable.get(n) as f64;
    }
    let pref = 2.0 * PI / half;
    let rho = l1_decay_rate(s);
    let tail = pref.norm() * divisor_tail(rho, n_terms);
    if !(tail <= SERIES_TOL) {
        return Err(Error::Convergence(format!(
            "tail bound {tail:e} at N = {n_terms} exceeds {SERIES_TOL:e} for s = {s}"
        )));
    }
    Ok(LaplaceResult {
        s,
        k: 1,
        value: main + pref * sum,
        method: Method::AtkinsonSeries,
        err_estimate: tail,
    })
}

/// `|exp(-2 pi i n e^{-is})| = exp(-n rho)` with `rho = 2 pi e^{Im s} sin(Re s)`.
pub fn l1_decay_rate(s: ComplexValue) -> f64 {
    2.0 * PI * s.im.exp() * s.re.sin()
}

/// Smallest `N` for which [`atkinson_l1`] certifies `SERIES_TOL`.
pub fn atkinson_l1_terms(s: ComplexValue) -> Result<usize> {
    let rho = l1_decay_rate(s);
    let pref = 2.0 * PI * (0.5 * s.im).exp();
    let mut n = 1usize;
    while !(pref * divisor_tail(rho, n) <= SERIES_TOL) {
        n = n + n / 8 + 1;
        if n > crate::arithmetic::MAX_LIMIT {
            return Err(Error::Convergence(format!("no admissible N for s = {s}")));
        }
    }
    Ok(n)
}

fn check_table(t: &DivisorTable, order: u32, n_terms: usize) -> Result<()> {
    if t.order() != order {
        return Err(Error::Validation(format!("expected a d_{order} table, got d_{}", t.order())));
    }
    if n_terms == 0 || n_terms > t.limit() {
        return Err(Error::Capacity(format!(
            "n_terms = {n_terms} outside 1..={}",
            t.limit()
        )));
    }
    Ok(())
}

/// Argument `4 pi i sqrt(n) e^{-is/2}` of the `K_0` terms.
fn k0_argument(s: ComplexValue, n: usize) -> ComplexValue {
    let i = ComplexValue::i();
    i * (-i * s * 0.5).exp() * (4.0 * PI * (n as f64).sqrt())
}

/// Bound on `|K_0(z)|` for `Re z > 0`: `sqrt(pi / (2|z|)) e^{-Re z}`.
fn k0_envelope(z: ComplexValue) -> f64 {
    (PI / (2.0 * z.norm())).sqrt() * (-z.re).exp()
}

/// Bound on `sum_{n > N} d_4(n) |K_0(z_n)|` with `d_4(n) <= 8 n^{3/2}` and
/// `Re z_n = beta sqrt(n)`.
fn d4_tail(beta: f64, modulus_scale: f64, n: usize) -> f64 {
    // terms 8 n^{3/2} sqrt(pi/(2 m sqrt n)) e^{-beta sqrt n} = c n^{5/4} e^{-beta sqrt n};
    // compare with the integral from N
    let c = 8.0 * (PI / (2.0 * modulus_scale)).sqrt();
    let x = n as f64;
    let u = x.sqrt();
    // n^{5/4} e^{-beta sqrt n} is decreasing for sqrt n > 5/(2 beta)
    if beta * u <= 5.0 {
        return f64::INFINITY;
    }
    // int_N^inf x^{5/4} e^{-beta sqrt x} dx = 2 int_u^inf v^{7/2} e^{-beta v} dv
    //   <= 2 u^{7/2} e^{-beta u} / (beta - 7/(2u))
    let rate = beta - 3.5 / u;
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    c * (x.powf(1.25) * (-beta * u).exp() + 2.0 * u.powf(3.5) * (-beta * u).exp() / rate)
}

/// `4 pi e^{-is/2} sum_{n<=N} d_4(n) K_0(4 pi i sqrt(n) e^{-is/2})`.
///
/// The rotation `e^{-is/2}` inside the Bessel argument is what makes the
/// terms decay like `exp(-4 pi sqrt(n) e^{Im s/2} sin(Re s / 2))`. The
/// analytic remainder `phi(s)` is not modelled.
pub fn atkinson_l2_k0(s: ComplexValue, n_terms: usize, d4table: &DivisorTable) -> Result<LaplaceResult> {
    if !(s.re > 0.0) || !(s.norm() < PI) {
        return Err(Error::Domain(format!("s = {s} outside Re s > 0, |s| < pi")));
    }
    check_table(d4table, 4, n_terms)?;
    let i = ComplexValue::i();
    let rot = (-i * s * 0.5).exp();
    let mut sum = ComplexValue::new(0.0, 0.0);
    for n in 1..=n_terms {
        sum += bessel_k0(k0_argument(s, n))? * d4table.get(n) as f64;
    }
    let pref = rot * (4.0 * PI);
    let beta = l2_decay_rate(s);
    let tail = pref.norm() * d4_tail(beta, 4.0 * PI * rot.norm(), n_terms);
    if !(tail <= SERIES_TOL) {
        return Err(Error::Convergence(format!(
            "tail bound {tail:e} at N = {n_terms} exceeds {SERIES_TOL:e} for s = {s}"
        )));
    }
    Ok(LaplaceResult {
        s,
        k: 2,
        value: pref * sum,
        method: Method::K0Series,
        err_estimate: tail,
    })
}

/// `Re(4 pi i sqrt(n) e^{-is/2}) = beta sqrt(n)`.
pub fn l2_decay_rate(s: ComplexValue) -> f64 {
    4.0 * PI * (0.5 * s.im).exp() * (0.5 * s.re).sin()
}

/// Smallest `N` for which [`atkinson_l2_k0`] certifies `SERIES_TOL`.
pub fn atkinson_l2_terms(s: ComplexValue) -> Result<usize> {
    let beta = l2_decay_rate(s);
    let rot = (0.5 * s.im).exp();
    let mut n = 1usize;
    while !(4.0 * PI * rot * d4_tail(beta, 4.0 * PI * rot, n) <= SERIES_TOL) {
        n = n + n / 8 + 1;
        if n > crate::arithmetic::MAX_LIMIT {
            return Err(Error::Convergence(format!("no admissible N for s = {s}")));
        }
    }
    Ok(n)
}

/// `|K_0(4 pi i sqrt(n) e^{-i sigma/2})|` against the envelope
/// `sqrt(pi/(2|z|)) exp(-4 pi sqrt(n) sin(sigma/2))`; returns the ratio.
pub fn k0_term_envelope_ratio(sigma: f64, n: usize) -> Result<f64> {
    let z = k0_argument(ComplexValue::new(sigma, 0.0), n);
    Ok(bessel_k0(z)?.norm() / k0_envelope(z))
}

fn check_main_grid(sigmas: &[f64]) -> Result<()> {
    if sigmas.len() < 8 {
        return Err(Error::Validation(format!("need at least 8 sigma values, got {}", sigmas.len())));
    }
    if sigmas.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
        return Err(Error::Validation("sigma values must lie in (0, 1]".into()));
    }
    Ok(())
}

/// Fit `C, D, E` with `A, B` frozen at their exact values.
pub fn fit_main_coeffs(sigmas: &[f64]) -> Result<MainTermCoeffs> {
    check_main_grid(sigmas)?;
    let l2: Vec<f64> = laplace_real(2, sigmas)?.iter().map(|r| r.value.re).collect();
    fit_main_coeffs_values(sigmas, &l2)
}

/// As [`fit_main_coeffs`] with `L_2(sigma)` supplied.
pub fn fit_main_coeffs_values(sigmas: &[f64], l2: &[f64]) -> Result<MainTermCoeffs> {
    fit_main_cde(sigmas, l2, exact_a(), exact_b())
}

/// Fit `C, D, E` to `sigma L_2(sigma)` with caller-chosen `A, B`.
pub fn fit_main_cde(sigmas: &[f64], l2: &[f64], a: f64, b: f64) -> Result<MainTermCoeffs> {
    check_main_grid(sigmas)?;
    if sigmas.len() != l2.len() {
        return Err(Error::Validation("sigma and L_2 lengths differ".into()));
    }
    let mut rows = Vec::with_capacity(sigmas.len());
    let mut rhs = Vec::with_capacity(sigmas.len());
    for (&s, &v) in sigmas.iter().zip(l2) {
        let l = (1.0 / s).ln();
        rows.push(vec![l * l, l, 1.0]);
        rhs.push(s * v - a * l.powi(4) - b * l.powi(3));
    }
    let fit = least_squares(&rows, &rhs)?;
    Ok(MainTermCoeffs {
        a,
        b,
        c: fit.coeffs[0],
        d: fit.coeffs[1],
        e: fit.coeffs[2],
        provenance: Provenance::Fitted,
    })
}

/// All five coefficients fitted freely to `sigma L_2(sigma)`.
pub fn fit_main_free_values(sigmas: &[f64], l2: &[f64]) -> Result<MainTermCoeffs> {
    check_main_grid(sigmas)?;
    let rows: Vec<Vec<f64>> = sigmas
        .iter()
        .map(|&s| {
            let l = (1.0 / s).ln();
            vec![l.powi(4), l.powi(3), l * l, l, 1.0]
        })
        .collect();
    let rhs: Vec<f64> = sigmas.iter().zip(l2).map(|(&s, &v)| s * v).collect();
    let fit = least_squares(&rows, &rhs)?;
    let c = &fit.coeffs;
    Ok(MainTermCoeffs {
        a: c[0],
        b: c[1],
        c: c[2],
        d: c[3],
        e: c[4],
        provenance: Provenance::Fitted,
    })
}

#[cfg(test)]
mod tests;
