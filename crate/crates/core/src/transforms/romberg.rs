//! Romberg integration on unit blocks, an oracle independent of the
//! Gauss-Legendre grid.

use rayon::prelude::*;

use super::pairwise_sum;
use crate::special::ComplexValue;
use crate::{Error, Result};

const MAX_LEVEL: usize = 14;

/// Romberg result with the difference of the last two diagonal entries as
/// error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RombergValue {
    pub value: ComplexValue,
    pub err_estimate: f64,
}

/// Romberg on `[a, b]`, halving the step until two successive extrapolants
/// agree to `rel_tol` (relative to the value, floored by `abs_floor`).
pub fn romberg<F>(f: &F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> Result<RombergValue>
where
    F: Fn(f64) -> Result<ComplexValue>,
{
    let h0 = b - a;
    let mut rows: Vec<Vec<ComplexValue>> = Vec::new();
    let mut trap = (f(a)? + f(b)?) * (0.5 * h0);
    rows.push(vec![trap]);
    for level in 1..=MAX_LEVEL {
        let n_new = 1usize << (level - 1);
        let h = h0 / (1usize << level) as f64;
        let mut mid = ComplexValue::new(0.0, 0.0);
        for j in 0..n_new {
            mid += f(a + (2 * j + 1) as f64 * h)?;
        }
        trap = trap * 0.5 + mid * h;
        let prev = &rows[level - 1];
        let mut row = vec![trap];
        let mut factor = 1.0;
        for m in 1..=level {
            factor *= 4.0;
            let r = row[m - 1] + (row[m - 1] - prev[m - 1]) / (factor - 1.0);
            row.push(r);
        }
        let diff = (row[level] - prev[level - 1]).norm();
        let best = row[level];
        rows.push(row);
        if level >= 4 && diff <= rel_tol * best.norm() + abs_floor {
            return Ok(RombergValue {
                value: best,
                err_estimate: diff,
            });
        }
    }
    Err(Error::Convergence(format!("Romberg on [{a}, {b}] did not settle")))
}

/// Romberg over `[a, b]` cut into unit blocks evaluated in parallel and
/// summed pairwise in block order.
pub fn romberg_blocks<F>(f: &F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> Result<RombergValue>
where
    F: Fn(f64) -> Result<ComplexValue> + Sync,
{
    let n = (b - a).ceil().max(1.0) as usize;
    let parts: Vec<Result<RombergValue>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let lo = a + m as f64;
            let hi = (lo + 1.0).min(b);
            romberg(f, lo, hi, rel_tol, abs_floor)
        })
        .collect();
    let parts: Vec<RombergValue> = parts.into_iter().collect::<Result<_>>()?;
    let value = pairwise_sum(&parts.iter().map(|p| p.value).collect::<Vec<_>>());
    let err_estimate = parts.iter().map(|p| p.err_estimate).sum();
    Ok(RombergValue { value, err_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_oscillatory_exponential() {
        let f = |x: f64| Ok(ComplexValue::new(-0.5 * x, 9.0 * x).exp());
        let got = romberg_blocks(&f, 0.0, 7.0, 1e-13, 1e-15).unwrap();
        let s = ComplexValue::new(-0.5, 9.0);
        let exact = ((s * 7.0).exp() - 1.0) / s;
        assert!((got.value - exact).norm() < 1e-12);
    }
}
