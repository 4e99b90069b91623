use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Condition number (after column equilibration) above which a system is
/// rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    pub rms_residual: f64,
    pub residuals: Vec<f64>,
    pub condition: f64,
}

/// Minimises `|M x - y|` by SVD with columns scaled to unit norm.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || n == 0 || m < n || y.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Validation(format!("bad least-squares shape {m} x {n}")));
    }
    if rows.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares input".into()));
    }
    let mut a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let mut scale = vec![1.0; n];
    for (j, sc) in scale.iter_mut().enumerate() {
        let norm = a.column(j).norm();
        if norm == 0.0 {
            return Err(Error::IllConditioned(format!("column {j} is zero")));
        }
        *sc = norm;
        a.column_mut(j).scale_mut(1.0 / norm);
    }
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(format!("condition number {condition:e}")));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let r = &a * &x - &b;
    let residuals: Vec<f64> = r.iter().copied().collect();
    let rms_residual = (r.norm_squared() / m as f64).sqrt();
    let coeffs = x.iter().zip(&scale).map(|(v, s)| v / s).collect();
    Ok(LeastSquares {
        coeffs,
        rms_residual,
        residuals,
        condition,
    })
}
