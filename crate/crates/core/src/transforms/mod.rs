//! Quadrature oracle for `L_k(s) = int_0^inf |zeta(1/2 + ix)|^{2k} e^{-sx} dx`,
//! the moments `I_k(T)`, the error term `E_2(T)`, the Mellin transform
//! `Z_2(w)` and the elementary identities between them.

mod gauss;
mod grid;
pub mod romberg;

use rayon::prelude::*;
use serde::Serialize;

pub use gauss::GaussRule;
pub use grid::{shared_grid, zeta_abs_error, GridIntegral, LineGrid};

use crate::special::{cpow, ComplexValue, EULER_GAMMA, PI, ZETA_3};
use crate::zeta_line::abs_zeta_sq;
use crate::{Error, Result};

/// Largest `T` accepted by [`moment_integral`].
pub const MAX_MOMENT_T: f64 = 5e4;

/// Truncation and panel policy shared by every oscillatory integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// target for panel error plus certified tail
    pub tol: f64,
    /// `X >= cutoff_factor * log(1/tol) / Re s`
    pub cutoff_factor: f64,
    pub max_panels: usize,
    /// Gauss nodes per panel
    pub panel_points: usize,
    /// `c` in the tail majorant `|zeta(1/2 + it)|^4 <= c (1 + t)^{2/3}`
    pub majorant_c: f64,
    /// hard cap on the truncation point
    pub max_x: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            cutoff_factor: 1.5,
            max_panels: 2_000_000,
            panel_points: 16,
            majorant_c: 1000.0,
            max_x: MAX_MOMENT_T,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.cutoff_factor > 0.0) || self.max_panels == 0 {
            return Err(Error::Validation(format!("bad quadrature config {self:?}")));
        }
        if self.panel_points < 8 {
            return Err(Error::Validation("panel_points must be at least 8".into()));
        }
        Ok(())
    }
}

/// Which route produced a [`LaplaceResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Kober,
    AtkinsonSeries,
    K0Series,
    TheoremSpectral,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Kober => "kober",
            Method::AtkinsonSeries => "atkinson_series",
            Method::K0Series => "k0_series",
            Method::TheoremSpectral => "theorem_spectral",
        }
    }
}

/// One evaluation of `L_k(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceResult {
    pub s: ComplexValue,
    pub k: u32,
    pub value: ComplexValue,
    pub method: Method,
    /// bound on truncation and tail error claimed by the method
    pub err_estimate: f64,
}

/// A value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: ComplexValue,
    pub err_estimate: f64,
}

/// `I_k(T) = int_0^T |zeta(1/2 + it)|^{2k} dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRecord {
    #[serde(rename = "T")]
    pub t: f64,
    pub value: f64,
    pub k: u32,
    pub err_estimate: f64,
}

/// Coefficients `a_0 .. a_4` of `P_4(x) = sum a_j x^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P4 {
    pub a: [f64; 5],
}

impl P4 {
    pub const LEADING: f64 = 1.0 / (2.0 * PI * PI);

    pub fn zero() -> Self {
        Self { a: [0.0; 5] }
    }

    /// `a_4 = 1/(2 pi^2)` with the given lower coefficients.
    pub fn with_lower(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self {
            a: [a0, a1, a2, a3, Self::LEADING],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> [f64; 4] {
        [self.a[1], 2.0 * self.a[2], 3.0 * self.a[3], 4.0 * self.a[4]]
    }

    /// Coefficients of `d/dT [T P_4(log T)] = P_4(log T) + P_4'(log T)`.
    pub fn density(&self) -> [f64; 5] {
        let d = self.derivative();
        let mut b = self.a;
        for j in 0..4 {
            b[j] += d[j];
        }
        b
    }
}

pub(crate) fn pairwise_sum(xs: &[ComplexValue]) -> ComplexValue {
    match xs.len() {
        0 => ComplexValue::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// `int_X^inf coef (1 + t)^p e^{-sigma t} dt`, bounded through the
/// log-concavity of the integrand: past `X` it decays at least like
/// `exp(-(sigma - p/(1+X)) (t - X))`. Infinite when that rate is not positive.
pub fn tail_bound(coef: f64, p: f64, sigma: f64, x: f64) -> f64 {
    let rate = sigma - p.max(0.0) / (1.0 + x);
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    coef * ((1.0 + x).ln() * p - sigma * x).exp() / rate
}

fn majorant(k: u32, cfg: &QuadratureConfig) -> (f64, f64) {
    // |zeta|^{2k} <= c^{k/2} (1 + t)^{k/3}
    (cfg.majorant_c.powf(k as f64 / 2.0), k as f64 / 3.0)
}

/// Smallest `X >= x0` with `tail(X) <= budget`, searched geometrically.
fn certified_cutoff(x0: f64, budget: f64, max_x: f64, tail: impl Fn(f64) -> f64) -> Result<f64> {
    let mut x = x0.max(1.0);
    while tail(x) > budget {
        x *= 1.02;
        if x > max_x {
            return Err(Error::Convergence(format!(
                "tail cannot be certified below {budget} before X = {max_x}"
            )));
        }
    }
    Ok(x)
}

fn check_k(k: u32) -> Result<()> {
    if k == 1 || k == 2 {
        Ok(())
    } else {
        Err(Error::Domain(format!("k = {k} not in {{1, 2}}")))
    }
}

/// `L_k(s)` by adaptive Gauss-Legendre panels on `[0, X]` plus a certified
/// tail.
///
/// `err_estimate` is the sum of the panel disagreements, the tail bound and
/// the propagated zeta-evaluator error; `tol` must be met by the first two,
/// the panel layout being refined until it is or `max_panels` is exceeded.
pub fn laplace_quadrature(k: u32, s: ComplexValue, cfg: &QuadratureConfig) -> Result<LaplaceResult> {
    check_k(k)?;
    cfg.validate()?;
    if !(s.re > 0.0) || !s.im.is_finite() {
        return Err(Error::Domain(format!("Re s must be positive, got {s}")));
    }
    let sigma = s.re;
    let (coef, p) = majorant(k, cfg);
    let x0 = cfg.cutoff_factor * (1.0 / cfg.tol).ln().max(1.0) / sigma;
    let tail_at = |x: f64| tail_bound(coef, p, sigma, x);
    let x = certified_cutoff(x0, 0.5 * cfg.tol, cfg.max_x, tail_at)?;
    let blocks = x.ceil() as usize;
    let tail = tail_at(blocks as f64);
    let kernel = |t: f64| (-s * t).exp();
    let mut divisor = ((s.im.abs() / 4.0).ceil() as u32).max(1);
    loop {
        let grid = shared_grid(blocks, cfg.panel_points, divisor, cfg.max_panels)?;
        let r = grid.integrate(k, 0, blocks, kernel);
        if r.panel_err + tail <= cfg.tol {
            return Ok(LaplaceResult {
                s,
                k,
                value: r.value,
                method: Method::Quadrature,
                err_estimate: r.panel_err + tail + r.eval_err,
            });
        }
        divisor *= 2;
    }
}

/// `L_k(s)` from the independent Romberg scheme on `[0, X]` with the same
/// tail certificate.
pub fn laplace_romberg(k: u32, s: ComplexValue, cfg: &QuadratureConfig) -> Result<LaplaceResult> {
    check_k(k)?;
    cfg.validate()?;
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("Re s must be positive, got {s}")));
    }
    let (coef, p) = majorant(k, cfg);
    let x0 = cfg.cutoff_factor * (1.0 / cfg.tol).ln().max(1.0) / s.re;
    let tail_at = |x: f64| tail_bound(coef, p, s.re, x);
    let x = certified_cutoff(x0, 0.5 * cfg.tol, cfg.max_x, tail_at)?.ceil();
    let f = |t: f64| -> Result<ComplexValue> {
        let z2 = abs_zeta_sq(t)?;
        Ok((-s * t).exp() * if k == 1 { z2 } else { z2 * z2 })
    };
    let r = romberg::romberg_blocks(&f, 0.0, x, 1e-13, 0.1 * cfg.tol / x)?;
    Ok(LaplaceResult {
        s,
        k,
        value: r.value,
        method: Method::Quadrature,
        err_estimate: r.err_estimate + tail_at(x),
    })
}

/// Shared grid covering `[0, x]` with the default panel layout.
fn moment_grid(x: f64) -> Result<std::sync::Arc<LineGrid>> {
    let cfg = QuadratureConfig::default();
    shared_grid(x.ceil() as usize + 1, cfg.panel_points, 1, cfg.max_panels)
}

/// Cumulative moments at every integer point up to `x`, plus the grid.
struct MomentTable {
    grid: std::sync::Arc<LineGrid>,
    /// `cum[m] = I_k(m)`
    cum: Vec<f64>,
    cum_err: Vec<f64>,
    k: u32,
}

impl MomentTable {
    fn new(k: u32, x: f64) -> Result<Self> {
        let grid = moment_grid(x)?;
        let blocks = x.floor() as usize + 1;
        let parts = grid.block_moments(k, blocks);
        let mut cum = Vec::with_capacity(blocks + 1);
        let mut cum_err = Vec::with_capacity(blocks + 1);
        let (mut acc, mut acc_err) = (0.0, 0.0);
        cum.push(0.0);
        cum_err.push(0.0);
        for p in &parts {
            acc += p.value.re;
            acc_err += p.panel_err + p.eval_err;
            cum.push(acc);
            cum_err.push(acc_err);
        }
        Ok(Self { grid, cum, cum_err, k })
    }

    fn at(&self, t: f64) -> Result<(f64, f64)> {
        let m = t.floor() as usize;
        if t == m as f64 {
            return Ok((self.cum[m], self.cum_err[m]));
        }
        let part = self.grid.partial_block(self.k, m, t)?;
        Ok((
            self.cum[m] + part.value.re,
            self.cum_err[m] + part.panel_err + part.eval_err,
        ))
    }
}

/// `I_k(T)` for `0 < T <= 5e4`.
pub fn moment_integral(k: u32, t: f64) -> Result<MomentRecord> {
    check_k(k)?;
    if !(t > 0.0 && t <= MAX_MOMENT_T) {
        return Err(Error::Range(format!("T = {t} outside (0, {MAX_MOMENT_T}]")));
    }
    let table = MomentTable::new(k, t)?;
    let (value, err) = table.at(t)?;
    Ok(MomentRecord {
        t,
        value,
        k,
        err_estimate: err,
    })
}

/// `I_k` at many points from one cumulative table.
pub fn moment_integrals(k: u32, ts: &[f64]) -> Result<Vec<MomentRecord>> {
    check_k(k)?;
    let t_max = ts.iter().cloned().fold(0.0, f64::max);
    if ts.iter().any(|&t| !(t > 0.0 && t <= MAX_MOMENT_T)) {
        return Err(Error::Range(format!("moment points must lie in (0, {MAX_MOMENT_T}]")));
    }
    let table = MomentTable::new(k, t_max)?;
    ts.par_iter()
        .map(|&t| {
            let (value, err) = table.at(t)?;
            Ok(MomentRecord {
                t,
                value,
                k,
                err_estimate: err,
            })
        })
        .collect()
}

/// `E_2(T) = I_2(T) - T P_4(log T)`.
pub fn e2_error_term(t: f64, p4: &P4) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::Range(format!("T = {t} must exceed 1")));
    }
    let i2 = moment_integral(2, t)?;
    Ok(i2.value - t * p4.eval(t.ln()))
}

/// `E_2` at many points from one cumulative table.
pub fn e2_error_terms(ts: &[f64], p4: &P4) -> Result<Vec<f64>> {
    if ts.iter().any(|&t| !(t > 1.0)) {
        return Err(Error::Range("T must exceed 1".into()));
    }
    Ok(moment_integrals(2, ts)?
        .into_iter()
        .map(|r| r.value - r.t * p4.eval(r.t.ln()))
        .collect())
}

/// `|L_k(1/T) - (1/T) int_0^inf I_k(t) e^{-t/T} dt|`, both sides by
/// quadrature, the right one from tabulated `I_k`.
pub fn laplace_identity_residual(k: u32, t: f64) -> Result<f64> {
    Ok(laplace_identity(k, t)?.residual)
}

/// Both sides of the integration-by-parts identity with their error budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub err_estimate: f64,
}

pub fn laplace_identity(k: u32, t: f64) -> Result<IdentityCheck> {
    check_k(k)?;
    if !(1.0..=100.0).contains(&t) {
        return Err(Error::Range(format!("T = {t} outside [1, 100]")));
    }
    let cfg = QuadratureConfig::with_tol(1e-9);
    let sigma = 1.0 / t;
    let lhs = laplace_quadrature(k, ComplexValue::new(sigma, 0.0), &cfg)?;

    let (coef, p) = majorant(k, &cfg);
    // I_k(t) <= c^{k/2} (1 + t)^{1 + k/3}
    let tail_at = |x: f64| sigma * tail_bound(coef, p + 1.0, sigma, x);
    let x = certified_cutoff(cfg.cutoff_factor * t * 20.0, 1e-3 * cfg.tol, MAX_MOMENT_T, tail_at)?.ceil();
    let table = MomentTable::new(k, x)?;
    let rule = GaussRule::new(cfg.panel_points);
    let panels_per_unit = 4usize;
    let n_panels = x as usize * panels_per_unit;
    let parts: Vec<Result<(f64, f64)>> = (0..n_panels)
        .into_par_iter()
        .map(|j| {
            let a = j as f64 / panels_per_unit as f64;
            let b = (j + 1) as f64 / panels_per_unit as f64;
            let mut v = 0.0;
            let mut e = 0.0;
            for (u, w) in rule.mapped(a, b) {
                let (i, ie) = table.at(u)?;
                let g = (-sigma * u).exp();
                v += w * i * g;
                e += w * ie * g;
            }
            Ok((v, e))
        })
        .collect();
    let parts: Vec<(f64, f64)> = parts.into_iter().collect::<Result<_>>()?;
    let vals: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let rhs = sigma * grid::pairwise_sum_real(&vals);
    let rhs_err = sigma * parts.iter().map(|p| p.1).sum::<f64>() + tail_at(x);
    Ok(IdentityCheck {
        lhs: lhs.value.re,
        rhs,
        residual: (lhs.value.re - rhs).abs(),
        err_estimate: lhs.err_estimate + rhs_err,
    })
}

/// `I_k(T) <= e L_k(1/T)`, allowing for both error estimates.
pub fn trivial_bound_check(k: u32, t: f64) -> Result<bool> {
    check_k(k)?;
    if !(t >= 1.0) {
        return Err(Error::Range(format!("T = {t} must be at least 1")));
    }
    let i = moment_integral(k, t)?;
    let l = laplace_quadrature(k, ComplexValue::new(1.0 / t, 0.0), &QuadratureConfig::default())?;
    Ok(i.value <= std::f64::consts::E * l.value.re + i.err_estimate + std::f64::consts::E * l.err_estimate)
}

/// `int_X^inf log^j(t) t^{-w} dt` for `j = 0..=4`, `Re w > 1`.
fn log_power_tails(w: ComplexValue, x: f64) -> [ComplexValue; 5] {
    let l = x.ln();
    let a = w - 1.0;
    let base = (-a * l).exp();
    let mut out = [ComplexValue::new(0.0, 0.0); 5];
    for (j, slot) in out.iter_mut().enumerate() {
        // sum_i j!/(j-i)! L^{j-i} / a^{i+1}
        let mut acc = ComplexValue::new(0.0, 0.0);
        let mut falling = 1.0;
        let mut apow = a;
        for i in 0..=j {
            acc += falling * l.powi((j - i) as i32) / apow;
            falling *= (j - i) as f64;
            apow *= a;
        }
        *slot = base * acc;
    }
    out
}

/// Constant `B` in the working bound `|E_2(t)| <= B t^{1/2}` used to size
/// the [`mellin_z2`] tail estimate.
pub const E2_SCALE: f64 = 50.0;

/// `Z_2(w) = int_1^inf |zeta(1/2 + it)|^4 t^{-w} dt` for `Re w > 1`.
///
/// Quadrature on `[1, X]`; beyond `X` the main term `d(T P_4(log T))` is
/// integrated exactly and the remainder `int t^{-w} dE_2` is estimated from
/// `|E_2(t)| <= E2_SCALE t^{1/2}`. `X` is the smallest point at which that
/// estimate drops below `cfg.tol`, capped at `cfg.max_x`; the estimate is
/// what `err_estimate` reports.
pub fn mellin_z2(w: ComplexValue, p4: &P4, cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    if !(w.re > 1.0) || !w.im.is_finite() {
        return Err(Error::Domain(format!("Re w must exceed 1, got {w}")));
    }
    let (x, tail_err) = mellin_cutoff(w, cfg);
    let blocks = x as usize;
    let kernel = |t: f64| cpow(ComplexValue::new(t, 0.0), -w);
    let mut divisor = ((w.im.abs() / 4.0).ceil() as u32).max(1);
    let head = loop {
        let grid = shared_grid(blocks, cfg.panel_points, divisor, cfg.max_panels)?;
        let r = grid.integrate(2, 1, blocks, kernel);
        if r.panel_err <= 0.5 * cfg.tol {
            break r;
        }
        divisor *= 2;
    };
    let tail = mellin_main_tail(w, p4, x);
    Ok(Estimate {
        value: head.value + tail,
        err_estimate: head.panel_err + head.eval_err + tail_err,
    })
}

fn mellin_cutoff(w: ComplexValue, cfg: &QuadratureConfig) -> (f64, f64) {
    let est = |x: f64| {
        let r = x.powf(0.5 - w.re);
        E2_SCALE * r * (1.0 + w.norm() / (w.re - 0.5))
    };
    let mut x = 100.0f64;
    while est(x) > 0.5 * cfg.tol && x < cfg.max_x {
        x *= 1.05;
    }
    let x = x.min(cfg.max_x).ceil();
    (x, est(x))
}

fn mellin_main_tail(w: ComplexValue, p4: &P4, x: f64) -> ComplexValue {
    let tails = log_power_tails(w, x);
    p4.density()
        .iter()
        .zip(tails)
        .map(|(&b, t)| t * b)
        .sum()
}

/// Independent Romberg evaluation of [`mellin_z2`] with the same cutoff and
/// tail model.
pub fn mellin_z2_romberg(w: ComplexValue, p4: &P4, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(w.re > 1.0) {
        return Err(Error::Domain(format!("Re w must exceed 1, got {w}")));
    }
    let (x, tail_err) = mellin_cutoff(w, cfg);
    let f = |t: f64| -> Result<ComplexValue> {
        let z2 = abs_zeta_sq(t)?;
        Ok(cpow(ComplexValue::new(t, 0.0), -w) * (z2 * z2))
    };
    let r = romberg::romberg_blocks(&f, 1.0, x, 1e-12, 1e-3 * cfg.tol / x)?;
    Ok(Estimate {
        value: r.value + mellin_main_tail(w, p4, x),
        err_estimate: r.err_estimate + tail_err,
    })
}

/// `Gamma^{(i)}(1)` for `i = 0..=4`.
pub fn gamma_derivatives_at_one() -> [f64; 5] {
    let g = EULER_GAMMA;
    let z2 = PI * PI / 6.0;
    let z4 = PI.powi(4) / 90.0;
    [
        1.0,
        -g,
        g * g + z2,
        -(g.powi(3) + 3.0 * g * z2 + 2.0 * ZETA_3),
        g.powi(4) + 6.0 * g * g * z2 + 8.0 * g * ZETA_3 + 3.0 * z2 * z2 + 6.0 * z4,
    ]
}

/// `int_0^inf log^j(T) e^{-sT} dT = s^{-1} sum_i C(j,i) Gamma^{(i)}(1) L^{j-i}`
/// with `L = Log(1/s)`, for `j = 0..=4`.
pub fn log_moments(s: ComplexValue) -> [ComplexValue; 5] {
    let g = gamma_derivatives_at_one();
    let l = -s.ln();
    let inv = s.inv();
    let mut out = [ComplexValue::new(0.0, 0.0); 5];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = ComplexValue::new(0.0, 0.0);
        for (i, gi) in g.iter().enumerate().take(j + 1) {
            acc += binomial(j, i) * gi * l.powi((j - i) as i32);
        }
        *slot = acc * inv;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `int_0^inf d(T P_4(log T)) e^{-sT}`.
pub fn p4_laplace(s: ComplexValue, p4: &P4) -> ComplexValue {
    let m = log_moments(s);
    p4.density().iter().zip(m).map(|(&b, mj)| mj * b).sum()
}

/// `int_0^inf E_2(T) e^{-sT} dT = (L_2(s) - M(s)) / s`.
pub fn e2_laplace(s: ComplexValue, p4: &P4, cfg: &QuadratureConfig) -> Result<Estimate> {
    let l2 = laplace_quadrature(2, s, cfg)?;
    let m = p4_laplace(s, p4);
    Ok(Estimate {
        value: (l2.value - m) / s,
        err_estimate: l2.err_estimate / s.norm(),
    })
}

#[cfg(test)]
mod tests;
