//! Deterministic model spectrum used as the shipped fixture.
//!
//! Eigenvalue parameters follow the Weyl law `N(K) ~ K^2/12` for
//! `SL(2, Z)`, starting at `kappa_1 = 9.533695`, with a seeded jitter.
//! Weights are increments of `S(K) = (4/(3 pi^2)) K^2 log^3 K`, each
//! scaled by a seeded factor in `[0.5, 1.5]`.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{parse_spectral_str, SpectralDatum, SpectralTable};
use crate::special::PI;

pub const SYNTHETIC_SEED: u64 = 0x5eed_2a11;
const KAPPA_1: f64 = 9.533695;
const KAPPA_MAX: f64 = 180.0;

fn model_partial_sum(k: f64) -> f64 {
    4.0 / (3.0 * PI * PI) * k * k * k.ln().powi(3)
}

fn model_data() -> Vec<SpectralDatum> {
    let mut rng = ChaCha8Rng::seed_from_u64(SYNTHETIC_SEED);
    let mut out = Vec::new();
    let mut prev_s = 0.0;
    for j in 0.. {
        let shift = if j == 0 { 0.0 } else { j as f64 + 0.4 * (rng.gen::<f64>() - 0.5) };
        let kappa = (KAPPA_1 * KAPPA_1 + 12.0 * shift).sqrt();
        if kappa > KAPPA_MAX {
            break;
        }
        let s = model_partial_sum(kappa);
        let weight = (s - prev_s) * rng.gen_range(0.5..1.5);
        prev_s = s;
        // round-trip through the printed precision so the file and the
        // in-memory table agree exactly
        let kappa: f64 = format!("{kappa:.9}").parse().unwrap();
        let weight: f64 = format!("{weight:.9e}").parse().unwrap();
        out.push(SpectralDatum { kappa, weight });
    }
    out
}

/// The fixture text, byte for byte as shipped in `data/maass_synthetic.csv`.
pub fn synthetic_table_text() -> String {
    let data = model_data();
    let mut text = String::new();
    text.push_str("# Synthetic Maass spectral model for SL(2,Z), not measured data.\n");
    text.push_str("# kappa_j: Weyl law K^2/12 from kappa_1 = 9.533695 with seeded jitter.\n");
    text.push_str("# weight = alpha_j H_j^3(1/2): increments of (4/(3 pi^2)) K^2 log^3 K, seeded factor in [0.5, 1.5].\n");
    let _ = writeln!(text, "# generator seed {SYNTHETIC_SEED:#x}, {} records", data.len());
    text.push_str("# kappa,weight\n");
    for d in &data {
        let _ = writeln!(text, "{:.9},{:.9e}", d.kappa, d.weight);
    }
    text
}

pub fn synthetic_table() -> SpectralTable {
    parse_spectral_str(&synthetic_table_text()).expect("generator output parses")
}

/// Same eigenvalues with weight `kappa^2`, so `S(K)` grows like `K^4`.
pub fn counterexample_table() -> SpectralTable {
    let data = model_data()
        .into_iter()
        .map(|d| SpectralDatum { kappa: d.kappa, weight: d.kappa * d.kappa })
        .collect();
    SpectralTable::new(data).expect("positive data")
}
