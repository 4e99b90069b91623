//! Divisor-function tables `d(n)` and `d_4(n)`.

use crate::{Error, Result};

/// Largest table length accepted by [`divisor_sieve`].
pub const MAX_LIMIT: usize = 100_000_000;

/// Dense table of `d_k(n)` for `n = 1..=limit`, with `k` in {2, 4}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    order: u32,
    values: Vec<u64>,
}

impl DivisorTable {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    /// `d_k(n)`; panics for `n = 0` or `n > limit`.
    pub fn get(&self, n: usize) -> u64 {
        assert!(n >= 1 && n <= self.limit(), "index {n} outside 1..={}", self.limit());
        self.values[n]
    }

    /// Values indexed from 1; slot 0 holds 0.
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Builds `d(n)` (order 2) or `d_4(n)` (order 4) for `n <= limit`.
///
/// `d` comes from the harmonic sieve; `d_4 = d * d` is then a Dirichlet
/// self-convolution, `O(N log N)` in both cases.
pub fn divisor_sieve(order: u32, limit: usize) -> Result<DivisorTable> {
    if order != 2 && order != 4 {
        return Err(Error::Domain(format!("divisor order {order} not in {{2, 4}}")));
    }
    if limit == 0 {
        return Err(Error::Domain("limit must be at least 1".into()));
    }
    if limit > MAX_LIMIT {
        return Err(Error::Capacity(format!("limit {limit} exceeds {MAX_LIMIT}")));
    }
    let d = harmonic_sieve(limit);
    let values = if order == 2 { d } else { dirichlet_convolve(&d, &d) };
    Ok(DivisorTable { order, values })
}

fn harmonic_sieve(limit: usize) -> Vec<u64> {
    let mut d = vec![0u64; limit + 1];
    for m in 1..=limit {
        for slot in d[m..].iter_mut().step_by(m) {
            *slot += 1;
        }
    }
    d
}

/// `(f * g)(n) = sum_{ab = n} f(a) g(b)` on `1..=N`; slot 0 is ignored.
pub fn dirichlet_convolve(f: &[u64], g: &[u64]) -> Vec<u64> {
    let n = f.len().min(g.len()) - 1;
    let mut out = vec![0u64; n + 1];
    for a in 1..=n {
        let fa = f[a];
        if fa == 0 {
            continue;
        }
        let mut m = a;
        let mut b = 1;
        while m <= n {
            out[m] += fa * g[b];
            m += a;
            b += 1;
        }
    }
    out
}
