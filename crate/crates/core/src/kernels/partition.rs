//! Smooth dyadic partition of unity `χ_k` and the pieces `Δ_k = D₀ · χ_k`.

use std::sync::Arc;

use super::{DecayReport, Kernel, KernelMeta, BAND_UNIT};
use crate::error::{param, Error, Result};
use crate::numerics::{plateau, slope};
use crate::signal::GridSpec;
use crate::C64;

type Eta = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `χ(t) = η(t) - η(2t)` with η a smooth plateau (1 on `|t| ≤ 1`, 0 on
/// `|t| ≥ 2`); piece `k` is `χ(2^k ξ / S)`, living on `2^{-k-1}S ≤ |ξ| ≤ 2^{-k+1}S`.
#[derive(Clone)]
pub struct ChiPartition {
    grid: GridSpec,
    k_min: i32,
    k_max: i32,
    eta: Eta,
}

impl std::fmt::Debug for ChiPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChiPartition(m={}, k={}..={})", self.grid.m(), self.k_min, self.k_max)
    }
}

/// Partition over every representable `k`: the pieces sum to 1 on each
/// nonzero bin.
pub fn make_chi_partition(grid: GridSpec) -> ChiPartition {
    ChiPartition::with_eta(grid, Arc::new(|t| plateau(t, 1.0, 2.0)))
}

impl ChiPartition {
    pub fn with_eta(grid: GridSpec, eta: Eta) -> Self {
        let ls = BAND_UNIT.trailing_zeros() as i32;
        let k_min = -(grid.m() as i32 - ls) + 1;
        ChiPartition { grid, k_min, k_max: ls, eta }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn k_range(&self) -> (i32, i32) {
        (self.k_min, self.k_max)
    }

    pub fn eta(&self, t: f64) -> f64 {
        (self.eta)(t)
    }

    pub fn chi(&self, t: f64) -> f64 {
        self.eta(t) - self.eta(2.0 * t)
    }

    /// `Dil^{(∞)}_{2^{-k}} χ` at a bin.
    pub fn piece(&self, k: i32, bin: f64) -> f64 {
        self.chi(2f64.powi(k) * bin / BAND_UNIT as f64)
    }

    pub fn sum_at(&self, bin: f64) -> f64 {
        (self.k_min..=self.k_max).map(|k| self.piece(k, bin)).sum()
    }

    /// Piece `k` as a Fourier multiplier.
    pub fn kernel(&self, k: i32) -> Result<Kernel> {
        let sym = (0..self.grid.len())
            .map(|i| C64::new(self.piece(k, self.grid.bin(i) as f64), 0.0))
            .collect();
        Kernel::from_symbol(self.grid, sym, KernelMeta::named(format!("chi_{k}")))
    }
}

/// `Δ̂_k = D̂₀ · χ(2^k ξ / S)`.
pub fn build_delta_k(d0: &Kernel, part: &ChiPartition, k: i32) -> Result<Kernel> {
    d0.grid().check_same(&part.grid)?;
    if k < part.k_min || k > part.k_max {
        return Err(Error::Domain(format!(
            "band of k={k} outside the grid (k in {}..={})",
            part.k_min, part.k_max
        )));
    }
    let g = d0.grid();
    let sym = (0..g.len()).map(|i| d0.symbol()[i] * part.piece(k, g.bin(i) as f64)).collect();
    let hi = 2f64.powi(1 - k) * BAND_UNIT as f64;
    let meta = KernelMeta {
        name: format!("Delta_{k}"),
        nu: d0.meta().nu,
        support: Some((-hi, hi)),
        c0: None,
        c1: None,
    };
    Kernel::from_symbol(g, sym, meta)
}

/// For each `(k, Δ_k)`: `sup|Δ̂_k|` against `2^{-|k|}` and the spatial
/// envelope `2^{-k-|k|}(1 + 2^{-k}|yS|)^{-ν}`.
///
/// Notes: `k`, `sup`, `log2_sup_plus_abs_k`, `envelope_ratio`, `out_of_band`.
/// `slope` is the fitted decay of `log|Δ_k(y)|` against `log(1 + 2^{-k}|yS|)`.
pub fn verify_delta_bounds(family: &[(i32, Kernel)], nu: f64) -> Result<Vec<DecayReport>> {
    if family.is_empty() {
        return param("empty Δ_k family");
    }
    let s = BAND_UNIT as f64;
    let mut out = Vec::with_capacity(family.len());
    for (k, dk) in family {
        let k = *k;
        let g = dk.grid();
        let sup = dk.symbol().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let lo = 2f64.powi(-k - 1) * s;
        let hi = 2f64.powi(1 - k) * s;
        let out_of_band: f64 = (0..g.len())
            .filter(|&i| {
                let b = (g.bin(i) as f64).abs();
                b < lo || b > hi
            })
            .map(|i| dk.symbol()[i].norm())
            .sum();
        let total: f64 = dk.symbol().iter().map(|v| v.norm()).sum();
        let smax = dk.spatial().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let pref = 2f64.powi(-k - k.abs());
        let mut ratio: f64 = 0.0;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (n, v) in dk.spatial().iter().enumerate() {
            let a = v.norm();
            if a < 1e-13 * smax || a == 0.0 {
                continue;
            }
            let t = 1.0 + 2f64.powi(-k) * (g.centered(n) * s).abs();
            ratio = ratio.max(a / (pref * t.powf(-nu)));
            xs.push(t.ln());
            ys.push(a.ln());
        }
        let fitted = if xs.len() >= 2 { slope(&xs, &ys) } else { f64::NAN };
        out.push(DecayReport {
            kernel: dk.meta().name.clone(),
            slope: fitted,
            max_ratio: sup / 2f64.powi(-k.abs()),
            range: (lo, hi),
            estimate: None,
            notes: vec![
                ("k".into(), k as f64),
                ("sup".into(), sup),
                ("log2_sup_plus_abs_k".into(), sup.log2() + k.abs() as f64),
                ("envelope_ratio".into(), ratio),
                ("out_of_band".into(), if total > 0.0 { out_of_band / total } else { 0.0 }),
            ],
        });
    }
    Ok(out)
}
