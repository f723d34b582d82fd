//! Smooth dyadic oscillation and its restriction to sparse sets `E(J)`.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;

use super::{osc_kernel, osc_kernel_terms, OscSpec};
use crate::error::{param, Result};
use crate::fourier::ifft;
use crate::kernels::{Kernel, KernelMeta};
use crate::numerics::plateau;
use crate::signal::{GridSpec, MeasurableSet, Signal};
use crate::C64;

/// Decay order of the `χ_I` weights.
pub const CHI_NU: f64 = 8.0;

const EPS: f64 = 1.0 / 8.0;

/// Low-pass `ζ̂`: 1 on `[-1, 1]`, 0 outside `[-1-ε, 1+ε]`, `ε = 1/8`.
pub fn smooth_lowpass(grid: GridSpec) -> Kernel {
    Kernel::from_profile(
        grid,
        Arc::new(|x| C64::new(plateau(x, 1.0, 1.0 + EPS), 0.0)),
        false,
        KernelMeta::named("zeta_lowpass"),
    )
    .expect("profile on grid")
}

/// Oscillation of `Dil^{(1)}_{|I|} ζ * f` over the scales of an `OscSpec`.
pub fn osc_smooth(f: &Signal, spec: &OscSpec) -> Result<Signal> {
    osc_kernel(&smooth_lowpass(f.grid()), f, spec)
}

/// The per-block terms whose ℓ² sum is [`osc_smooth`].
pub fn osc_smooth_terms(f: &Signal, spec: &OscSpec) -> Result<Vec<Signal>> {
    osc_kernel_terms(&smooth_lowpass(f.grid()), f, spec)
}

/// Cells `J` of `2^level` samples with sparse subsets `E(J) ⊆ J`,
/// `|E(J)| ≤ δ|J|`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePartition {
    grid: GridSpec,
    level: u32,
    sets: Vec<Vec<usize>>,
    delta: f64,
}

impl DensePartition {
    pub fn new(grid: GridSpec, level: u32, sets: Vec<Vec<usize>>, delta: f64) -> Result<Self> {
        if level > grid.m() {
            return param("cell level exceeds grid");
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return param(format!("δ = {delta} outside (0, 1]"));
        }
        let len = 1usize << level;
        if sets.len() != grid.len() / len {
            return param("one set per cell required");
        }
        for (j, e) in sets.iter().enumerate() {
            if e.len() as f64 > delta * len as f64 + 1e-9 {
                return param(format!("|E(J)| > δ|J| in cell {j}"));
            }
            if e.iter().any(|&x| x / len != j) {
                return param(format!("E(J) not inside J for cell {j}"));
            }
        }
        Ok(DensePartition { grid, level, sets, delta })
    }

    /// `E(J)` a uniformly random `⌊δ|J|/h⌋`-subset of each cell.
    pub fn random<R: Rng>(grid: GridSpec, level: u32, delta: f64, rng: &mut R) -> Result<Self> {
        let len = 1usize << level.min(grid.m());
        let count = (delta * len as f64).floor() as usize;
        let sets = (0..grid.len() / len)
            .map(|j| {
                let mut v: Vec<usize> = sample(rng, len, count.min(len)).into_iter().map(|i| j * len + i).collect();
                v.sort_unstable();
                v
            })
            .collect();
        Self::new(grid, level, sets, delta)
    }

    /// `E(J) = J`, `δ = 1`.
    pub fn full(grid: GridSpec, level: u32) -> Result<Self> {
        let len = 1usize << level.min(grid.m());
        let sets = (0..grid.len() / len).map(|j| (j * len..(j + 1) * len).collect()).collect();
        Self::new(grid, level, sets, 1.0)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cell_len(&self) -> usize {
        1 << self.level
    }

    pub fn cells(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, j: usize) -> &[usize] {
        &self.sets[j]
    }

    pub fn union(&self) -> MeasurableSet {
        MeasurableSet::from_indices(self.grid, self.sets.iter().flatten().copied())
    }
}

/// `⟨f, ζ_I⟩` for every dyadic `I` of length `2^i`, `ζ_I = Tr_{c(I)} Dil^{(1)}_{|I|} ζ`.
fn lowpass_at_centers(f: &Signal, i: i32) -> Vec<C64> {
    let grid = f.grid();
    let l = grid.len();
    let len = 2f64.powi(i);
    let sf = f.spectrum();
    let inv = 1.0 / l as f64;
    let prod: Vec<C64> = (0..l)
        .map(|q| {
            let k = grid.bin(q) as f64;
            // Shift by half a cell so that the cell centres land on samples.
            sf[q] * plateau(len * k, 1.0, 1.0 + EPS)
                * C64::from_polar(inv, 2.0 * std::f64::consts::PI * k * 0.5 * len)
        })
        .collect();
    let g = ifft(&prod);
    let step = (len * l as f64).round() as usize;
    (0..l / step).map(|n| g[n * step]).collect()
}

/// `Osc_δ f(x)` for `x ∈ E(J)`: the block oscillation of `⟨ζ_I, f⟩` over
/// dyadic `I ⊇ J` (scales `|I| = 2^l`, so the `OscSpec` must have `n = 1`).
pub fn osc_dense(f: &Signal, spec: &OscSpec, part: &DensePartition) -> Result<Signal> {
    f.grid().check_same(&part.grid)?;
    if spec.n != 1 {
        return param("osc_dense uses dyadic scales (n = 1)");
    }
    let grid = f.grid();
    let m = grid.m() as i32;
    let lo = part.level as i32 - m;
    let vals: Vec<(i32, Vec<C64>)> = (lo..=0).map(|i| (i, lowpass_at_centers(f, i))).collect();
    let ranges: Vec<(i64, i64)> = spec
        .ranges(grid)
        .into_iter()
        .flatten()
        .filter_map(|(a, b)| {
            let a = a.max(lo as i64);
            (a < b).then_some((a, b))
        })
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let cl = part.cell_len();
    for j in 0..part.cells() {
        if part.set(j).is_empty() {
            continue;
        }
        let start = j * cl;
        let at = |i: i64| -> C64 {
            let (_, v) = &vals[(i - lo as i64) as usize];
            v[start >> (i as i32 + m)]
        };
        let mut total = 0.0;
        for &(a, b) in &ranges {
            let mut best: f64 = 0.0;
            for p in a..=b {
                for q in p + 1..=b {
                    best = best.max((at(p) - at(q)).norm_sqr());
                }
            }
            total += best;
        }
        let v = C64::new(total.sqrt(), 0.0);
        for &x in part.set(j) {
            out[x] = v;
        }
    }
    Signal::from_samples(grid, out)
}

/// `χ_I(y) = |I|^{-1}(1 + dist(y, c(I))/|I|)^{-ν}` on the torus.
pub fn chi_weight(y: f64, start: f64, len: f64) -> f64 {
    let c = start + 0.5 * len;
    let d = (y - c).rem_euclid(1.0);
    let d = d.min(1.0 - d);
    (1.0 + d / len).powf(-CHI_NU) / len
}

/// `M_δ f(x) = sup_{I ⊇ J} ⟨|f|, χ_I⟩` for `x ∈ E(J)`, 0 elsewhere.
pub fn maximal_dense(f: &Signal, part: &DensePartition) -> Result<Signal> {
    f.grid().check_same(&part.grid)?;
    let grid = f.grid();
    let h = grid.h();
    let m = grid.m() as i32;
    let abs: Vec<f64> = f.samples().iter().map(|v| v.norm()).collect();
    let cl = part.cell_len();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for j in 0..part.cells() {
        if part.set(j).is_empty() {
            continue;
        }
        let mut best: f64 = 0.0;
        for i in (part.level as i32 - m)..=0 {
            let len = 2f64.powi(i);
            let start = ((j * cl) as f64 * h / len).floor() * len;
            let s: f64 = abs
                .iter()
                .enumerate()
                .map(|(n, a)| a * chi_weight(n as f64 * h, start, len))
                .sum();
            best = best.max(s * h);
        }
        for &x in part.set(j) {
            out[x] = C64::new(best, 0.0);
        }
    }
    Signal::from_samples(grid, out)
}
