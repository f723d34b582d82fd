//! Density `dense(s) = sup_{s ≤ s'} ∫_{N^{-1}(ω_{s'}) ∩ H} χ_{I_{s'}}` and the
//! density split. The sup runs over the full tile universe.

use serde::{Deserialize, Serialize};

use super::{Tile, Tree};
use crate::error::{param, Result};
use crate::numerics::KahanSum;
use crate::signal::{GridSpec, MeasurableSet};

/// `|I|^{-1}(1 + dist(x, c(I))/|I|)^{-ν}` on the torus.
pub fn chi_i(x: f64, t: &Tile, nu: f64) -> f64 {
    let len = t.i.length();
    let d = (x - t.i.center()).rem_euclid(1.0);
    let d = d.min(1.0 - d);
    (1.0 + d / len).powf(-nu) / len
}

/// `d(s)` and `dense(s)` for every tile of the universe.
#[derive(Clone, Debug)]
pub struct DensityTable {
    grid: GridSpec,
    local: Vec<f64>,
    dense: Vec<f64>,
}

impl DensityTable {
    pub fn new(grid: GridSpec, h_set: &MeasurableSet, n_of_x: &[i64], nu: f64) -> Result<Self> {
        grid.check_same(&h_set.grid())?;
        if n_of_x.len() != grid.len() {
            return param("N must have one value per sample");
        }
        let m = grid.m() as i32;
        let l = grid.len();
        let total = (m as usize + 1) * l;
        let mut acc: Vec<KahanSum> = vec![KahanSum::default(); total];
        let h = grid.h();
        for x in h_set.indices() {
            let k = n_of_x[x].rem_euclid(l as i64);
            let pos = grid.position(x);
            for j in -m..=0 {
                let w = 1i64 << -j;
                let f = k / w;
                for n in 0..(1i64 << -j) {
                    let t = Tile { i: super::DyadicInterval::new(j, n), omega: super::DyadicInterval::new(-j, f) };
                    acc[t.universe_index(grid)].add(chi_i(pos, &t, nu) * h);
                }
            }
        }
        let local: Vec<f64> = acc.iter().map(|a| a.value()).collect();
        let mut dense = local.clone();
        for j in (-m..0).rev() {
            for r in 0..l {
                let idx = (j + m) as usize * l + r;
                let t = Tile::from_universe_index(grid, idx);
                let best = successors(&t)
                    .iter()
                    .map(|s| dense[s.universe_index(grid)])
                    .fold(dense[idx], f64::max);
                dense[idx] = best;
            }
        }
        Ok(DensityTable { grid, local, dense })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// `∫_{N^{-1}(ω_s) ∩ H} χ_{I_s}`.
    pub fn local(&self, s: &Tile) -> f64 {
        self.local[s.universe_index(self.grid)]
    }

    /// `dense(s)`.
    pub fn density(&self, s: &Tile) -> f64 {
        self.dense[s.universe_index(self.grid)]
    }

    /// `dense(S) = max_{s∈S} dense(s)`, 0 for empty `S`.
    pub fn dense_of(&self, tiles: &[Tile]) -> f64 {
        tiles.iter().map(|s| self.density(s)).fold(0.0, f64::max)
    }
}

/// Tiles covering `s` from above: parent `I`, the two halves of `ω`.
pub(crate) fn successors(s: &Tile) -> Vec<Tile> {
    if s.scale() >= 0 {
        return Vec::new();
    }
    let j = s.scale() + 1;
    let n = s.i.index >> 1;
    (0..2)
        .map(|b| Tile {
            i: super::DyadicInterval::new(j, n),
            omega: super::DyadicInterval::new(-j, 2 * s.omega.index + b),
        })
        .collect()
}

/// All `s' ≥ s`, coarsest scale first, then by `ω` index.
pub(crate) fn ancestors(s: &Tile) -> Vec<Tile> {
    let mut out = Vec::new();
    for j in (s.scale()..=0).rev() {
        let d = j - s.scale();
        let n = s.i.index >> d;
        for f in (s.omega.index << d)..((s.omega.index + 1) << d) {
            out.push(Tile { i: super::DyadicInterval::new(j, n), omega: super::DyadicInterval::new(-j, f) });
        }
    }
    out
}

/// Trees removed by a split and their bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub threshold: f64,
    pub trees: Vec<Tree>,
    /// `Σ |I_T|` over the reported tops.
    pub count: f64,
    /// `Count·Δ/|H|` for density, `Count·σ²/|G|` for size.
    pub constant: f64,
}

impl SplitReport {
    pub fn tops(&self) -> Vec<Tile> {
        self.trees.iter().map(|t| t.top).collect()
    }

    pub fn tiles(&self) -> usize {
        self.trees.iter().map(|t| t.len()).sum()
    }
}

/// Heavy tiles `dense(s) ≥ Δ/2` grouped under maximal tops `d(s') ≥ Δ/4`.
pub fn density_split(tiles: &[Tile], table: &DensityTable, h_measure: f64, delta: f64) -> Result<(SplitReport, Vec<Tile>)> {
    if !(delta > 0.0) {
        return param(format!("Δ = {delta} must be positive"));
    }
    let grid = table.grid;
    let m = grid.m() as i32;
    let l = grid.len();
    let in_m: Vec<bool> = table.local.iter().map(|&d| d >= delta / 4.0).collect();
    // above[s]: some s' > s lies in M.
    let mut above = vec![false; in_m.len()];
    for j in (-m..0).rev() {
        for r in 0..l {
            let idx = (j + m) as usize * l + r;
            let t = Tile::from_universe_index(grid, idx);
            above[idx] = successors(&t).iter().any(|s| {
                let k = s.universe_index(grid);
                in_m[k] || above[k]
            });
        }
    }
    let mut groups: Vec<(Tile, Vec<Tile>)> = Vec::new();
    let mut light = Vec::new();
    for s in tiles {
        if table.density(s) < delta / 2.0 {
            light.push(*s);
            continue;
        }
        let top = ancestors(s)
            .into_iter()
            .find(|t| {
                let k = t.universe_index(grid);
                in_m[k] && !above[k]
            })
            .expect("a heavy tile lies below a tile of M");
        match groups.iter_mut().find(|g| g.0 == top) {
            Some(g) => g.1.push(*s),
            None => groups.push((top, vec![*s])),
        }
    }
    let trees = groups.into_iter().map(|(t, mem)| Tree::new(t, mem)).collect::<Result<Vec<_>>>()?;
    let count: f64 = trees.iter().map(|t| t.top_length()).sum();
    let constant = if h_measure > 0.0 { count * delta / h_measure } else { 0.0 };
    Ok((SplitReport { threshold: delta, trees, count, constant }, light))
}
