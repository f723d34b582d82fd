//! Oscillation functionals over dilated kernels, their suprema over
//! modulations, and the density-restricted operators.

mod dense;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dense::{
    chi_weight, maximal_dense, osc_dense, osc_smooth, osc_smooth_terms, smooth_lowpass,
    DensePartition, CHI_NU,
};

use crate::error::{param, Error, Result};
use crate::fourier::{bin_index, ifft};
use crate::kernels::{dilate_kernel, Kernel};
use crate::signal::{GridSpec, Signal};
use crate::C64;

/// Dilation denominator `n` and block boundaries `k_j` with `k_{j+1} ≥ k_j + n`.
///
/// Block `j` ranges over scale exponents `k_j ≤ l < k_{j+1}`; scale `l`
/// means dilation by `2^{l/n}`. On a grid of `2^m` samples only
/// `-n·m ≤ l ≤ 0` is representable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OscSpec {
    pub n: u32,
    pub blocks: Vec<i64>,
}

impl OscSpec {
    pub fn new(n: u32, blocks: Vec<i64>) -> Result<Self> {
        if n == 0 {
            return param("n must be positive");
        }
        if blocks.len() < 2 {
            return param("need at least two block boundaries");
        }
        for w in blocks.windows(2) {
            if w[1] < w[0] + n as i64 {
                return param(format!("blocks {} and {} closer than n = {n}", w[0], w[1]));
            }
        }
        Ok(OscSpec { n, blocks })
    }

    /// Evenly spaced blocks of `width` scale steps covering `[-n·m, 0]`.
    pub fn uniform(n: u32, m: u32, width: i64) -> Result<Self> {
        let lo = -(n as i64) * m as i64;
        let mut b = vec![lo];
        while *b.last().unwrap() <= 0 {
            b.push(b.last().unwrap() + width.max(n as i64));
        }
        Self::new(n, b)
    }

    /// Inclusive clipped scale ranges per block; empty blocks are `None`.
    pub fn ranges(&self, grid: GridSpec) -> Vec<Option<(i64, i64)>> {
        let lo = -(self.n as i64) * grid.m() as i64;
        self.blocks
            .windows(2)
            .map(|w| {
                let a = w[0].max(lo);
                let b = (w[1] - 1).min(0);
                (a <= b).then_some((a, b))
            })
            .collect()
    }

    fn checked_ranges(&self, grid: GridSpec) -> Result<Vec<Option<(i64, i64)>>> {
        let r = self.ranges(grid);
        if r.iter().all(|x| x.is_none()) {
            return Err(Error::Domain("every block is empty after clipping to the grid".into()));
        }
        Ok(r)
    }

    pub fn dilation(&self, l: i64) -> f64 {
        2f64.powf(l as f64 / self.n as f64)
    }
}

/// Symbols of `Dil^{(1)}_{2^{l/n}} K` for every scale used by a spec.
struct ScaleBank {
    lo: i64,
    symbols: Vec<Vec<C64>>,
}

impl ScaleBank {
    fn new(k: &Kernel, spec: &OscSpec, ranges: &[Option<(i64, i64)>]) -> Result<Self> {
        let lo = ranges.iter().flatten().map(|r| r.0).min().unwrap_or(0);
        let hi = ranges.iter().flatten().map(|r| r.1).max().unwrap_or(0);
        let symbols = (lo..=hi)
            .into_par_iter()
            .map(|l| dilate_kernel(k, spec.dilation(l), 1.0).map(|d| d.symbol().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScaleBank { lo, symbols })
    }

    fn get(&self, l: i64) -> &[C64] {
        &self.symbols[(l - self.lo) as usize]
    }
}

/// Per-block `sup_{l<l'} |(K_l - K_{l'}) * f|²` for a spectrum shifted by
/// `shift` bins. Empty or single-scale blocks give zeros.
fn osc_blocks(
    spec_f: &[C64],
    shift: i64,
    bank: &ScaleBank,
    ranges: &[Option<(i64, i64)>],
) -> Vec<Vec<f64>> {
    let l = spec_f.len();
    let inv = 1.0 / l as f64;
    ranges
        .iter()
        .map(|r| {
            let mut best = vec![0.0f64; l];
            let Some((a, b)) = *r else { return best };
            let convs: Vec<Vec<C64>> = (a..=b)
                .map(|s| {
                    let sym = bank.get(s);
                    let prod: Vec<C64> = (0..l)
                        .map(|i| spec_f[bin_index(i as i64 - shift, l)] * sym[i] * inv)
                        .collect();
                    ifft(&prod)
                })
                .collect();
            for p in 0..convs.len() {
                for q in p + 1..convs.len() {
                    for x in 0..l {
                        best[x] = best[x].max((convs[p][x] - convs[q][x]).norm_sqr());
                    }
                }
            }
            best
        })
        .collect()
}

fn osc_values(spec_f: &[C64], shift: i64, bank: &ScaleBank, ranges: &[Option<(i64, i64)>]) -> Vec<f64> {
    let blocks = osc_blocks(spec_f, shift, bank, ranges);
    let mut total = vec![0.0; spec_f.len()];
    for b in blocks {
        for (t, v) in total.iter_mut().zip(b) {
            *t += v;
        }
    }
    total.into_iter().map(f64::sqrt).collect()
}

/// Per-block oscillation terms (square roots of the block sups).
pub fn osc_kernel_terms(k: &Kernel, f: &Signal, spec: &OscSpec) -> Result<Vec<Signal>> {
    f.grid().check_same(&k.grid())?;
    let ranges = spec.checked_ranges(f.grid())?;
    let bank = ScaleBank::new(k, spec, &ranges)?;
    Ok(osc_blocks(f.spectrum(), 0, &bank, &ranges)
        .into_iter()
        .map(|b| real_signal(f.grid(), b.into_iter().map(f64::sqrt).collect()))
        .collect())
}

fn real_signal(grid: GridSpec, v: Vec<f64>) -> Signal {
    Signal::from_samples(grid, v.into_iter().map(|x| C64::new(x, 0.0)).collect()).expect("length")
}

/// `[Σ_j sup_{k_j ≤ l < l' < k_{j+1}} |(K_l - K_{l'}) * f|²]^{1/2}` with
/// `K_l = Dil^{(1)}_{2^{l/n}} K`.
pub fn osc_kernel(k: &Kernel, f: &Signal, spec: &OscSpec) -> Result<Signal> {
    f.grid().check_same(&k.grid())?;
    let ranges = spec.checked_ranges(f.grid())?;
    let bank = ScaleBank::new(k, spec, &ranges)?;
    Ok(real_signal(f.grid(), osc_values(f.spectrum(), 0, &bank, &ranges)))
}

/// Pointwise max over modulation bins `N` of `osc_kernel(K, Mod_{2πN} f)`.
pub fn sup_mod_osc(k: &Kernel, f: &Signal, spec: &OscSpec, mod_grid: &[i64]) -> Result<Signal> {
    if mod_grid.is_empty() {
        return param("empty modulation grid");
    }
    f.grid().check_same(&k.grid())?;
    let ranges = spec.checked_ranges(f.grid())?;
    let bank = ScaleBank::new(k, spec, &ranges)?;
    let sf = f.spectrum();
    // Max is exact, so the parallel reduction is order independent.
    let out = mod_grid
        .par_iter()
        .map(|&nb| osc_values(sf, nb, &bank, &ranges))
        .reduce_with(pointwise_max)
        .expect("nonempty");
    Ok(real_signal(f.grid(), out))
}

fn pointwise_max(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.max(y);
    }
    a
}

/// `sup_N |K * Mod_{2πN} f|` over the bins in `mod_grid`.
pub fn carleson_maximal(k: &Kernel, f: &Signal, mod_grid: &[i64]) -> Result<Signal> {
    if mod_grid.is_empty() {
        return param("empty modulation grid");
    }
    f.grid().check_same(&k.grid())?;
    let sf = f.spectrum();
    let l = sf.len();
    let inv = 1.0 / l as f64;
    let out = mod_grid
        .par_iter()
        .map(|&nb| {
            let prod: Vec<C64> =
                (0..l).map(|i| sf[bin_index(i as i64 - nb, l)] * k.symbol()[i] * inv).collect();
            ifft(&prod).into_iter().map(|v| v.norm()).collect::<Vec<f64>>()
        })
        .reduce_with(pointwise_max)
        .expect("nonempty");
    Ok(real_signal(f.grid(), out))
}

/// Dyadic exponents `j` for which `Dil^{(1)}_{2^j} ψ` has band on the grid.
pub fn square_function_scales(grid: GridSpec) -> Vec<i32> {
    let ls = crate::kernels::BAND_UNIT.trailing_zeros() as i32;
    ((ls + 1 - grid.m() as i32)..=(ls + 1)).collect()
}

/// `sup_N [Σ_j |Dil^{(1)}_{2^j} ψ * Mod_{2πN} f|²]^{1/2}`.
pub fn square_function_sup_mod(psi: &Kernel, f: &Signal, mod_grid: &[i64]) -> Result<Signal> {
    if mod_grid.is_empty() {
        return param("empty modulation grid");
    }
    f.grid().check_same(&psi.grid())?;
    let syms = square_function_scales(f.grid())
        .into_iter()
        .map(|j| dilate_kernel(psi, 2f64.powi(j), 1.0).map(|d| d.symbol().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let sf = f.spectrum();
    let l = sf.len();
    let inv = 1.0 / l as f64;
    let out = mod_grid
        .par_iter()
        .map(|&nb| {
            let mut acc = vec![0.0; l];
            for sym in &syms {
                let prod: Vec<C64> =
                    (0..l).map(|i| sf[bin_index(i as i64 - nb, l)] * sym[i] * inv).collect();
                for (a, v) in acc.iter_mut().zip(ifft(&prod)) {
                    *a += v.norm_sqr();
                }
            }
            acc.into_iter().map(f64::sqrt).collect::<Vec<f64>>()
        })
        .reduce_with(pointwise_max)
        .expect("nonempty");
    Ok(real_signal(f.grid(), out))
}

/// All integer bins of the grid, `[-L/2, L/2)`.
pub fn full_bin_grid(grid: GridSpec) -> Vec<i64> {
    let h = (grid.len() / 2) as i64;
    (-h..h).collect()
}
