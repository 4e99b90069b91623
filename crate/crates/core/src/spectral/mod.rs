//! Maass spectral data and the spectral part of the `L_2(s)` expansion.
//!
//! A table holds pairs `(kappa_j, w_j)` with `w_j = alpha_j H_j^3(1/2)`.
//! The sum
//!
//! ```text
//! s^{-1/2} sum_j w_j (s^{-i k} R(k) Gamma(1/2 + i k) + s^{i k} R(-k) Gamma(1/2 - i k))
//! ```
//!
//! is added to the main term to form `theorem_l2`.

mod synthetic;

use std::io::BufRead;

use serde::Serialize;

pub use synthetic::{counterexample_table, synthetic_table, synthetic_table_text, SYNTHETIC_SEED};

use crate::closed_forms::{check_theorem_region, loglog_slope, main_term, MainTermCoeffs};
use crate::special::{finite, log_gamma, ComplexValue, PI};
use crate::transforms::{laplace_quadrature, LaplaceResult, Method, QuadratureConfig};
use crate::{Error, Result};

/// Kappas closer than this are one eigenvalue with merged weight.
pub const MERGE_TOL: f64 = 1e-9;

/// Default constant in the `G_2` comparison envelope.
pub const DEFAULT_ENVELOPE_C: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralDatum {
    pub kappa: f64,
    pub weight: f64,
}

/// Sorted, duplicate-free spectral data. Immutable once built.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralTable {
    data: Vec<SpectralDatum>,
    kappa_max: f64,
}

impl SpectralTable {
    /// Validates, sorts and merges near-equal kappas.
    pub fn new(mut data: Vec<SpectralDatum>) -> Result<Self> {
        for d in &data {
            if !(d.kappa > 0.0) || !d.kappa.is_finite() {
                return Err(Error::Validation(format!("kappa {} must be positive", d.kappa)));
            }
            if !(d.weight >= 0.0) || !d.weight.is_finite() {
                return Err(Error::Validation(format!(
                    "weight {} at kappa {} must be nonnegative",
                    d.weight, d.kappa
                )));
            }
        }
        data.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
        let mut merged: Vec<SpectralDatum> = Vec::with_capacity(data.len());
        for d in data {
            match merged.last_mut() {
                Some(last) if d.kappa - last.kappa <= MERGE_TOL => last.weight += d.weight,
                _ => merged.push(d),
            }
        }
        let kappa_max = merged.last().map_or(0.0, |d| d.kappa);
        Ok(Self { data: merged, kappa_max })
    }

    /// A table with no eigenvalues; the spectral sum is then zero.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn data(&self) -> &[SpectralDatum] {
        &self.data
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa_max
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// The first `n` entries.
    pub fn truncated(&self, n: usize) -> Self {
        let data = self.data[..n.min(self.data.len())].to_vec();
        let kappa_max = data.last().map_or(0.0, |d| d.kappa);
        Self { data, kappa_max }
    }

    /// Merged weight at `kappa`.
    pub fn weight_at(&self, kappa: f64) -> Option<f64> {
        let i = self.data.partition_point(|d| d.kappa < kappa - MERGE_TOL);
        self.data
            .get(i)
            .filter(|d| (d.kappa - kappa).abs() <= MERGE_TOL)
            .map(|d| d.weight)
    }

    /// `S(K)`: total weight with `kappa <= K`.
    pub fn partial_sum(&self, k: f64) -> f64 {
        let n = self.data.partition_point(|d| d.kappa <= k);
        self.data[..n].iter().map(|d| d.weight).sum()
    }
}

/// Parses `kappa,weight` lines. `#` starts a comment, blank lines are
/// skipped and fields may carry surrounding spaces or tabs.
pub fn parse_spectral_table<R: BufRead>(input: R) -> Result<SpectralTable> {
    let mut data = Vec::new();
    let mut seen_record = false;
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let first = !seen_record;
        seen_record = true;
        if first && body.replace(' ', "").eq_ignore_ascii_case("kappa,weight") {
            continue;
        }
        let mut fields = body.split(',');
        let (Some(k), Some(w), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `kappa,weight`, found {body:?}"),
            });
        };
        let kappa = parse_decimal(k.trim(), lineno)?;
        let weight = parse_decimal(w.trim(), lineno)?;
        data.push(SpectralDatum { kappa, weight });
    }
    if data.is_empty() {
        return Err(Error::Validation("spectral table has no records".into()));
    }
    SpectralTable::new(data)
}

pub fn parse_spectral_str(text: &str) -> Result<SpectralTable> {
    parse_spectral_table(text.as_bytes())
}

// sign, digits with optional point, optional exponent; no inf/nan
fn parse_decimal(field: &str, line: usize) -> Result<f64> {
    let bad = || Error::Parse { line, msg: format!("malformed number {field:?}") };
    let bytes = field.as_bytes();
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let mut digits = 0;
    let mut seen_point = false;
    while i < bytes.len() {
        match bytes[i] {
            b'0'..=b'9' => digits += 1,
            b'.' if !seen_point => seen_point = true,
            _ => break,
        }
        i += 1;
    }
    if digits == 0 {
        return Err(bad());
    }
    if i < bytes.len() {
        if !matches!(bytes[i], b'e' | b'E') {
            return Err(bad());
        }
        i += 1;
        if matches!(bytes.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == start || i != bytes.len() {
            return Err(bad());
        }
    }
    let v: f64 = field.parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// `log R(y)`, assembled from log-gamma values so that neither `Gamma(2iy)`
/// nor `cosh(pi y)` is ever formed on its own.
pub fn log_r_function(y: f64) -> Result<ComplexValue> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::Domain(format!("R(y) undefined at y = {y}")));
    }
    let i = ComplexValue::i();
    let quarter = ComplexValue::new(0.25, 0.0);
    let ratio = -i * y * std::f64::consts::LN_2 + log_gamma(quarter - i * (y / 2.0))?
        - log_gamma(quarter + i * (y / 2.0))?;
    let a = PI * y.abs();
    let log_cosh = a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2;
    Ok(0.5 * (PI / 2.0).ln() + 3.0 * ratio + log_gamma(ComplexValue::new(0.0, 2.0 * y))? + log_cosh)
}

/// `R(y) = sqrt(pi/2) (2^{-iy} Gamma(1/4 - iy/2) / Gamma(1/4 + iy/2))^3 Gamma(2iy) cosh(pi y)`.
pub fn r_function(y: f64) -> Result<ComplexValue> {
    finite(log_r_function(y)?.exp(), "R(y)")
}

/// Residue of `Z_2` at `1/2 + i kappa`: `R(kappa)` times the merged weight.
pub fn residue_r0(kappa: f64, table: &SpectralTable) -> Result<ComplexValue> {
    let w = table
        .weight_at(kappa)
        .ok_or_else(|| Error::NotFound(format!("kappa {kappa} not in spectral table")))?;
    if w == 0.0 {
        return Ok(ComplexValue::new(0.0, 0.0));
    }
    Ok(r_function(kappa)? * w)
}

/// The unweighted pair `s^{-ik} R(k) Gamma(1/2+ik) + s^{ik} R(-k) Gamma(1/2-ik)`.
/// Each half is computed from its own log-space expression.
pub fn spectral_term(s: ComplexValue, kappa: f64) -> Result<ComplexValue> {
    let log_s = s.ln();
    let i = ComplexValue::i();
    let half = ComplexValue::new(0.5, 0.0);
    let plus = -i * kappa * log_s + log_r_function(kappa)? + log_gamma(half + i * kappa)?;
    let minus = i * kappa * log_s + log_r_function(-kappa)? + log_gamma(half - i * kappa)?;
    finite(plus.exp() + minus.exp(), "spectral term")
}

/// The spectral series with an estimate of the error made by stopping at
/// `kappa_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSum {
    pub value: ComplexValue,
    /// weight of the top decile plus an exponential extrapolation past `kappa_max`
    pub truncation_envelope: f64,
}

pub fn spectral_sum(s: ComplexValue, table: &SpectralTable) -> Result<SpectralSum> {
    check_theorem_region(s)?;
    if table.is_empty() {
        return Ok(SpectralSum { value: ComplexValue::new(0.0, 0.0), truncation_envelope: 0.0 });
    }
    let terms: Vec<ComplexValue> = table
        .data()
        .iter()
        .map(|d| Ok(spectral_term(s, d.kappa)? * d.weight))
        .collect::<Result<_>>()?;
    let prefactor = s.powf(-0.5);
    let mut value = ComplexValue::new(0.0, 0.0);
    for t in &terms {
        value += t;
    }
    value *= prefactor;

    let n = terms.len();
    let decile_start = if n >= 10 { n - n / 10 } else { n - 1 };
    let decile = terms[decile_start..].iter().map(|t| t.norm()).sum::<f64>();
    let rate = PI / 2.0 - s.arg().abs();
    let span = table.kappa_max() - table.data()[decile_start].kappa;
    let density = if span > 0.0 { (n - decile_start) as f64 / span } else { 1.0 };
    let extrapolated = terms[n - 1].norm() * density / rate;
    Ok(SpectralSum {
        value,
        truncation_envelope: prefactor.norm() * (decile + extrapolated),
    })
}

/// `main_term(s) + spectral_sum(s)`.
pub fn theorem_l2(s: ComplexValue, coeffs: &MainTermCoeffs, table: &SpectralTable) -> Result<LaplaceResult> {
    let main = main_term(s, coeffs)?;
    let spec = spectral_sum(s, table)?;
    Ok(LaplaceResult {
        s,
        k: 2,
        value: main + spec.value,
        method: Method::TheoremSpectral,
        err_estimate: spec.truncation_envelope,
    })
}

/// `|s|^{-1/2} exp(-C l / ((log l)^{2/3} (log log l)^{1/3}))`, `l = log(|s|^{-1} + 20)`.
pub fn g2_envelope(s: ComplexValue, c: f64) -> f64 {
    let r = s.norm();
    let l = (1.0 / r + 20.0).ln();
    let ll = l.ln();
    let lll = ll.ln();
    r.powf(-0.5) * (-c * l / (ll.powf(2.0 / 3.0) * lll.powf(1.0 / 3.0))).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct G2Report {
    pub residual: f64,
    pub envelope: f64,
    /// `residual |s|^{1/2}`
    pub scaled: f64,
    /// error estimate of the quadrature value the residual is measured against
    pub quadrature_err: f64,
}

/// `|L_2(s) - theorem_l2(s)|` measured against the quadrature oracle.
pub fn g2_residual(
    s: ComplexValue,
    coeffs: &MainTermCoeffs,
    table: &SpectralTable,
    cfg: &QuadratureConfig,
    envelope_c: f64,
) -> Result<G2Report> {
    let l2 = laplace_quadrature(2, s, cfg)?;
    g2_residual_from(&l2, coeffs, table, envelope_c)
}

/// As [`g2_residual`] with the quadrature value supplied.
pub fn g2_residual_from(
    l2: &LaplaceResult,
    coeffs: &MainTermCoeffs,
    table: &SpectralTable,
    envelope_c: f64,
) -> Result<G2Report> {
    let th = theorem_l2(l2.s, coeffs, table)?;
    let residual = (l2.value - th.value).norm();
    Ok(G2Report {
        residual,
        envelope: g2_envelope(l2.s, envelope_c),
        scaled: residual * l2.s.norm().sqrt(),
        quadrature_err: l2.err_estimate,
    })
}

/// Partial sums of the weights against `K^2 log^C K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSumReport {
    pub c_exponent: f64,
    /// `(K, S(K) / (K^2 log^C K))` on a geometric grid
    pub ratios: Vec<(f64, f64)>,
    pub max_ratio: f64,
    /// least-squares slope of `log ratio` against `log K` over the top decade
    pub top_decade_slope: f64,
    pub bounded: bool,
}

/// Slope above which the ratio counts as growing.
pub const TREND_SLOPE: f64 = 0.25;
const GRID_POINTS: usize = 64;

pub fn partial_sum_bound(table: &SpectralTable, c_exponent: f64) -> Result<PartialSumReport> {
    if table.is_empty() {
        return Err(Error::Validation("partial_sum_bound needs a nonempty table".into()));
    }
    let hi = table.kappa_max();
    let lo = table.data()[0].kappa.max(std::f64::consts::E).min(hi);
    let ratios: Vec<(f64, f64)> = (0..GRID_POINTS)
        .map(|i| {
            let k = if hi > lo {
                lo * (hi / lo).powf(i as f64 / (GRID_POINTS - 1) as f64)
            } else {
                hi
            };
            let k = if i == GRID_POINTS - 1 { hi } else { k };
            let denom = k * k * k.ln().max(1.0).powf(c_exponent);
            (k, table.partial_sum(k) / denom)
        })
        .collect();
    let max_ratio = ratios.iter().map(|r| r.1).fold(0.0, f64::max);

    let top: Vec<(f64, f64)> = ratios.iter().copied().filter(|(k, _)| *k >= hi / 10.0).collect();
    let slope = loglog_slope(&top);
    let slope = if slope.is_nan() { 0.0 } else { slope };
    Ok(PartialSumReport {
        c_exponent,
        bounded: max_ratio.is_finite() && slope <= TREND_SLOPE,
        ratios,
        max_ratio,
        top_decade_slope: slope,
    })
}
