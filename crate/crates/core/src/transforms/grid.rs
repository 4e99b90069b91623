//! Cached samples of `|zeta(1/2 + it)|^2` on a Gauss-Legendre panel layout.
//!
//! The line is cut into unit blocks `[start + m, start + m + 1]`. Each block
//! is split into panels no wider than `min(1, 2 pi / log(2 + t)) / divisor`,
//! and a panel is halved again while its coarse and fine rules disagree on
//! `|zeta|^4`. Every panel stores `|zeta|^2` at `n` coarse nodes and at `n`
//! nodes on each half, so any kernel can be integrated later with a
//! coarse-versus-fine error estimate and without new zeta evaluations.
//!
//! A block's layout depends only on the block itself, so a grid built to a
//! larger end point agrees bit for bit with a shorter one on the common
//! prefix. Grids are cached per `(start, points, divisor)` and extended on
//! demand.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::gauss::GaussRule;
use super::pairwise_sum;
use crate::special::{ComplexValue, PI};
use crate::zeta_line::{abs_zeta_sq, RS_SWITCH_T};
use crate::{Error, Result};

/// Relative agreement between the coarse and fine rules on `|zeta|^4`
/// required before a panel is accepted. Rounding in the phases of the
/// Riemann-Siegel sum leaves noise near 1e-10 relative at `t ~ 10^4`, which
/// no amount of splitting removes, so the target sits above it.
const PANEL_REL_TOL: f64 = 1e-9;
const MAX_SPLIT_DEPTH: u32 = 4;

/// Absolute error bound for `zeta(1/2 + it)` from the evaluator in use.
pub fn zeta_abs_error(t: f64) -> f64 {
    if t >= RS_SWITCH_T {
        1e-8
    } else {
        1e-11
    }
}

#[derive(Debug)]
struct Block {
    /// panel end points, `bounds[i]..bounds[i+1]`
    bounds: Vec<f64>,
    /// per panel: `n` coarse samples followed by `2n` fine samples
    z2: Vec<f64>,
}

/// Sum of a kernel-weighted integral over a grid prefix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridIntegral {
    pub value: ComplexValue,
    /// sum over panels of `|fine - coarse|`
    pub panel_err: f64,
    /// propagated evaluator error of `|zeta|^{2k}`
    pub eval_err: f64,
}

#[derive(Debug, Clone)]
pub struct LineGrid {
    start: f64,
    divisor: u32,
    rule: Arc<GaussRule>,
    blocks: Vec<Arc<Block>>,
}

fn width_cap(t: f64) -> f64 {
    (2.0 * PI / (2.0 + t).ln()).min(1.0)
}

impl LineGrid {
    /// Builds a grid on `[start, start + blocks]`.
    pub fn build(start: f64, blocks: usize, points: usize, divisor: u32) -> Result<Self> {
        let mut g = Self {
            start,
            divisor,
            rule: Arc::new(GaussRule::new(points)),
            blocks: Vec::new(),
        };
        g.extend_to(blocks)?;
        Ok(g)
    }

    fn extend_to(&mut self, blocks: usize) -> Result<()> {
        let have = self.blocks.len();
        if blocks <= have {
            return Ok(());
        }
        let new: Vec<Result<Block>> = (have..blocks)
            .into_par_iter()
            .map(|m| self.build_block(m))
            .collect();
        for b in new {
            self.blocks.push(Arc::new(b?));
        }
        Ok(())
    }

    fn build_block(&self, m: usize) -> Result<Block> {
        let a = self.start + m as f64;
        let b = a + 1.0;
        let pieces = (self.divisor as f64 / width_cap(b)).ceil() as usize;
        let mut bounds = vec![a];
        let mut z2 = Vec::new();
        for i in 0..pieces {
            let lo = a + i as f64 / pieces as f64;
            let hi = if i + 1 == pieces { b } else { a + (i + 1) as f64 / pieces as f64 };
            self.refine(lo, hi, 0, &mut bounds, &mut z2)?;
        }
        Ok(Block { bounds, z2 })
    }

    fn sample(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let mid = 0.5 * (a + b);
        let mut out = Vec::with_capacity(3 * self.rule.nodes.len());
        for (lo, hi) in [(a, b), (a, mid), (mid, b)] {
            for (x, _) in self.rule.mapped(lo, hi) {
                out.push(abs_zeta_sq(x)?);
            }
        }
        Ok(out)
    }

    fn refine(&self, a: f64, b: f64, depth: u32, bounds: &mut Vec<f64>, z2: &mut Vec<f64>) -> Result<()> {
        let vals = self.sample(a, b)?;
        let n = self.rule.nodes.len();
        let w = &self.rule.weights;
        let half = 0.5 * (b - a);
        let coarse: f64 = (0..n).map(|i| w[i] * vals[i] * vals[i]).sum::<f64>() * half;
        let fine: f64 = (0..2 * n).map(|i| w[i % n] * vals[n + i] * vals[n + i]).sum::<f64>() * 0.5 * half;
        let scale = fine.abs().max(b - a);
        if (fine - coarse).abs() <= PANEL_REL_TOL * scale || depth >= MAX_SPLIT_DEPTH {
            bounds.push(b);
            z2.extend(vals);
            return Ok(());
        }
        let mid = 0.5 * (a + b);
        self.refine(a, mid, depth + 1, bounds, z2)?;
        self.refine(mid, b, depth + 1, bounds, z2)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.blocks.len() as f64
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn panel_count(&self, blocks: usize) -> usize {
        self.blocks[..blocks].iter().map(|b| b.bounds.len() - 1).sum()
    }

    /// `int |zeta|^{2k} kernel(x) dx` over blocks `first..last`.
    pub fn integrate<K>(&self, k: u32, first: usize, last: usize, kernel: K) -> GridIntegral
    where
        K: Fn(f64) -> ComplexValue + Sync,
    {
        assert!(first <= last && last <= self.blocks.len());
        let parts: Vec<GridIntegral> = self.blocks[first..last]
            .par_iter()
            .map(|blk| self.integrate_block(blk, k, &kernel))
            .collect();
        combine(&parts)
    }

    /// `int_{start + m}^{start + m + 1} |zeta|^{2k}` for every block `m < blocks`.
    pub fn block_moments(&self, k: u32, blocks: usize) -> Vec<GridIntegral> {
        self.blocks[..blocks]
            .par_iter()
            .map(|blk| self.integrate_block(blk, k, &|_| ComplexValue::new(1.0, 0.0)))
            .collect()
    }

    /// `int_{start + m}^{x} |zeta|^{2k}` for `x` inside block `m`: stored
    /// panels left of `x` plus fresh samples on the panel containing `x`.
    pub fn partial_block(&self, k: u32, m: usize, x: f64) -> Result<GridIntegral> {
        let blk = &self.blocks[m];
        let n = self.rule.nodes.len();
        let w = &self.rule.weights;
        let mut full = 0;
        while full + 1 < blk.bounds.len() && blk.bounds[full + 1] <= x {
            full += 1;
        }
        let mut out = GridIntegral {
            value: ComplexValue::new(0.0, 0.0),
            panel_err: 0.0,
            eval_err: 0.0,
        };
        for p in 0..full {
            let one = self.integrate_panel(blk, p, k, &|_| ComplexValue::new(1.0, 0.0));
            out.value += one.value;
            out.panel_err += one.panel_err;
            out.eval_err += one.eval_err;
        }
        let a = blk.bounds[full];
        if x > a {
            let vals = self.sample(a, x)?;
            let half = 0.5 * (x - a);
            let coarse: f64 = (0..n).map(|i| w[i] * power(vals[i], k)).sum::<f64>() * half;
            let mut fine = 0.0;
            let mid = 0.5 * (a + x);
            let nodes = self.rule.mapped(a, mid).chain(self.rule.mapped(mid, x));
            for ((t, wt), &v) in nodes.zip(&vals[n..]) {
                fine += wt * power(v, k);
                out.eval_err += wt * power_error(v, k, zeta_abs_error(t));
            }
            out.value += fine;
            out.panel_err += (fine - coarse).abs();
        }
        Ok(out)
    }

    fn integrate_block<K>(&self, blk: &Block, k: u32, kernel: &K) -> GridIntegral
    where
        K: Fn(f64) -> ComplexValue,
    {
        let mut out = GridIntegral {
            value: ComplexValue::new(0.0, 0.0),
            panel_err: 0.0,
            eval_err: 0.0,
        };
        for p in 0..blk.bounds.len() - 1 {
            let one = self.integrate_panel(blk, p, k, kernel);
            out.value += one.value;
            out.panel_err += one.panel_err;
            out.eval_err += one.eval_err;
        }
        out
    }

    fn integrate_panel<K>(&self, blk: &Block, p: usize, k: u32, kernel: &K) -> GridIntegral
    where
        K: Fn(f64) -> ComplexValue,
    {
        let n = self.rule.nodes.len();
        let (a, b) = (blk.bounds[p], blk.bounds[p + 1]);
        let vals = &blk.z2[3 * n * p..3 * n * (p + 1)];
        let mid = 0.5 * (a + b);
        let mut coarse = ComplexValue::new(0.0, 0.0);
        for ((x, w), &v) in self.rule.mapped(a, b).zip(&vals[..n]) {
            coarse += kernel(x) * (w * power(v, k));
        }
        let mut fine = ComplexValue::new(0.0, 0.0);
        let mut eval_err = 0.0;
        let fine_nodes = self.rule.mapped(a, mid).chain(self.rule.mapped(mid, b));
        for ((x, w), &v) in fine_nodes.zip(&vals[n..]) {
            let g = kernel(x);
            fine += g * (w * power(v, k));
            eval_err += w * g.norm() * power_error(v, k, zeta_abs_error(x));
        }
        GridIntegral {
            value: fine,
            panel_err: (fine - coarse).norm(),
            eval_err,
        }
    }

    /// `max |zeta|^4 / (c (1 + t)^{2/3})` over all stored samples.
    pub fn majorant_ratio(&self, c: f64) -> f64 {
        let n = self.rule.nodes.len();
        let mut worst = 0.0f64;
        for blk in &self.blocks {
            for (p, ab) in blk.bounds.windows(2).enumerate() {
                let vals = &blk.z2[3 * n * p..3 * n * (p + 1)];
                let t = ab[0];
                for &v in vals {
                    worst = worst.max(v * v / (c * (1.0 + t).powf(2.0 / 3.0)));
                }
            }
        }
        worst
    }
}

fn combine(parts: &[GridIntegral]) -> GridIntegral {
    GridIntegral {
        value: pairwise_sum(&parts.iter().map(|p| p.value).collect::<Vec<_>>()),
        panel_err: pairwise_sum_real(&parts.iter().map(|p| p.panel_err).collect::<Vec<_>>()),
        eval_err: pairwise_sum_real(&parts.iter().map(|p| p.eval_err).collect::<Vec<_>>()),
    }
}

fn power(z2: f64, k: u32) -> f64 {
    if k == 1 {
        z2
    } else {
        z2 * z2
    }
}

/// Bound on the error of `|zeta|^{2k}` given `|zeta|^2` and an absolute
/// error `d` in `zeta`.
fn power_error(z2: f64, k: u32, d: f64) -> f64 {
    let z = z2.sqrt();
    let e2 = 2.0 * z * d + d * d;
    if k == 1 {
        e2
    } else {
        2.0 * z2 * e2 + e2 * e2
    }
}

pub(crate) fn pairwise_sum_real(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum_real(&xs[..n / 2]) + pairwise_sum_real(&xs[n / 2..]),
    }
}

type GridKey = (usize, u32);

fn cache() -> &'static Mutex<HashMap<GridKey, Arc<LineGrid>>> {
    static CACHE: OnceLock<Mutex<HashMap<GridKey, Arc<LineGrid>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Process-wide grid covering at least `blocks` unit blocks from 0.
///
/// Returns `Error::Convergence` when the prefix would need more than
/// `max_panels` panels.
pub fn shared_grid(blocks: usize, points: usize, divisor: u32, max_panels: usize) -> Result<Arc<LineGrid>> {
    let start = 0.0;
    let key = (points, divisor);
    let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
    let grid = match map.get(&key) {
        Some(g) if g.block_count() >= blocks => g.clone(),
        existing => {
            let mut g = match existing {
                Some(g) => (**g).clone(),
                None => LineGrid::build(start, 0, points, divisor)?,
            };
            // cheap pre-check so a hopeless request fails before sampling
            let estimate: f64 = (g.block_count()..blocks)
                .map(|m| (divisor as f64 / width_cap(start + m as f64 + 1.0)).ceil())
                .sum::<f64>()
                + g.panel_count(g.block_count()) as f64;
            if estimate > max_panels as f64 {
                return Err(Error::Convergence(format!(
                    "{blocks} blocks need at least {estimate} panels, max_panels = {max_panels}"
                )));
            }
            g.extend_to(blocks)?;
            let g = Arc::new(g);
            map.insert(key, g.clone());
            g
        }
    };
    drop(map);
    let used = grid.panel_count(blocks);
    if used > max_panels {
        return Err(Error::Convergence(format!(
            "{used} panels needed, max_panels = {max_panels}"
        )));
    }
    Ok(grid)
}
