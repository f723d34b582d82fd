//! `size(S) = max_T (|I_T|^{-1} Σ_{s∈T} |⟨f,φ_s⟩|²)^{1/2}` over +trees with
//! any grid tile as top, and the greedy size split.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::density::SplitReport;
use super::packets::{tile_coefficients, PacketBase};
use super::{tile_less, DyadicInterval, Tile, Tree};
use crate::error::{param, Error, Result};
use crate::signal::{hardy_littlewood_maximal, GridSpec, MeasurableSet, Signal};

/// Tops `T` whose +tree `{s: s = T or (I_s ⊆ I_T, ω_{s+} ⊇ ω_T)}` contains `s`.
pub(crate) fn plus_tops(s: &Tile) -> Vec<Tile> {
    let mut out = vec![*s];
    let a = s.omega_start();
    let w = s.width();
    for j in s.scale() + 1..=0 {
        let wt = 1i64 << -j;
        if wt > w / 2 {
            break;
        }
        let n = s.i.index >> (j - s.scale());
        for f in (a + w / 2) / wt..(a + w) / wt {
            out.push(Tile { i: DyadicInterval::new(j, n), omega: DyadicInterval::new(-j, f) });
        }
    }
    out
}

/// Membership of the tiles of `S` (by position) in every candidate +tree.
#[derive(Clone, Debug)]
struct TopIndex {
    tops: Vec<Tile>,
    members: Vec<Vec<usize>>,
    of_tile: Vec<Vec<usize>>,
}

impl TopIndex {
    fn new(grid: GridSpec, tiles: &[Tile]) -> Self {
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut tops = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut of_tile = Vec::with_capacity(tiles.len());
        for (p, s) in tiles.iter().enumerate() {
            let mut mine = Vec::new();
            for t in plus_tops(s) {
                let k = *slot.entry(t.universe_index(grid)).or_insert_with(|| {
                    tops.push(t);
                    members.push(Vec::new());
                    tops.len() - 1
                });
                members[k].push(p);
                mine.push(k);
            }
            of_tile.push(mine);
        }
        TopIndex { tops, members, of_tile }
    }

    fn sum(&self, k: usize, weight: &[f64], alive: &[bool]) -> f64 {
        self.members[k].iter().filter(|&&p| alive[p]).map(|&p| weight[p]).sum()
    }
}

fn size_value(sum: f64, top: &Tile) -> f64 {
    (sum / top.i.length()).sqrt()
}

/// `size(S)` for coefficient magnitudes `|⟨f,φ_s⟩|²`, with its witness tree.
fn size_from_weights(grid: GridSpec, tiles: &[Tile], weight: &[f64]) -> (f64, Tree) {
    let idx = TopIndex::new(grid, tiles);
    let alive = vec![true; tiles.len()];
    let mut best = (0.0, 0usize);
    for k in 0..idx.tops.len() {
        let v = size_value(idx.sum(k, weight, &alive), &idx.tops[k]);
        if v > best.0 {
            best = (v, k);
        }
    }
    let members = idx.members[best.1].iter().map(|&p| tiles[p]).collect();
    (best.0, Tree::new(idx.tops[best.1], members).expect("members lie below the top"))
}

/// `size(S)` with respect to `f`, and the +tree attaining it.
pub fn size(tiles: &[Tile], f: &Signal, base: &PacketBase) -> Result<(f64, Tree)> {
    if tiles.is_empty() {
        return param("size of an empty tile set");
    }
    let w: Vec<f64> = tile_coefficients(f, tiles, base).iter().map(|c| c.norm_sqr()).collect();
    Ok(size_from_weights(f.grid(), tiles, &w))
}

fn check_indicator(f: &Signal) -> Result<()> {
    if f.samples().iter().all(|v| v.im == 0.0 && (v.re == 0.0 || v.re == 1.0)) {
        Ok(())
    } else {
        Err(Error::Domain("size split expects an indicator 1_G".into()))
    }
}

/// Greedy split: while some +tree has size `≥ σ/2`, take the one whose top
/// has the lowest `ω` endpoint (then leftmost `I`, then coarsest) and remove
/// every remaining tile below that top.
pub fn size_split(tiles: &[Tile], f: &Signal, base: &PacketBase) -> Result<(SplitReport, Vec<Tile>)> {
    check_indicator(f)?;
    let grid = f.grid();
    let g_measure = f.samples().iter().map(|v| v.re).sum::<f64>() * grid.h();
    let weight: Vec<f64> = tile_coefficients(f, tiles, base).iter().map(|c| c.norm_sqr()).collect();
    let sigma = if tiles.is_empty() { 0.0 } else { size_from_weights(grid, tiles, &weight).0 };
    let idx = TopIndex::new(grid, tiles);
    let mut alive = vec![true; tiles.len()];
    let mut sums: Vec<f64> = (0..idx.tops.len()).map(|k| idx.sum(k, &weight, &alive)).collect();
    let mut trees = Vec::new();
    if sigma > 0.0 {
        loop {
            let pick = (0..idx.tops.len())
                .filter(|&k| sums[k] > 0.0 && size_value(sums[k], &idx.tops[k]) >= sigma / 2.0)
                .min_by_key(|&k| {
                    let t = &idx.tops[k];
                    (t.omega_start(), t.samples(grid).0, -t.scale())
                });
            let Some(k) = pick else { break };
            let top = idx.tops[k];
            let mut removed = Vec::new();
            let mut touched = Vec::new();
            for (p, s) in tiles.iter().enumerate() {
                if alive[p] && tile_less(s, &top) {
                    alive[p] = false;
                    removed.push(*s);
                    touched.extend_from_slice(&idx.of_tile[p]);
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for q in touched {
                sums[q] = idx.sum(q, &weight, &alive);
            }
            trees.push(Tree::new(top, removed)?);
        }
    }
    let count: f64 = trees.iter().map(|t| t.top_length()).sum();
    let constant = if g_measure > 0.0 { count * sigma * sigma / g_measure } else { 0.0 };
    let small = tiles.iter().zip(&alive).filter(|(_, &a)| a).map(|(s, _)| *s).collect();
    Ok((SplitReport { threshold: sigma, trees, count, constant }, small))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeUpperReport {
    pub lambda: f64,
    pub tiles: usize,
    pub size: f64,
    pub ratio: f64,
}

/// `size` over tiles with `I_s ⊄ {M 1_G > λ}`, relative to `λ`.
pub fn size_upper_check(g_set: &MeasurableSet, lambda: f64, base: &PacketBase) -> Result<SizeUpperReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return param(format!("λ = {lambda} outside (0, 1)"));
    }
    let grid = g_set.grid();
    let f = Signal::indicator(g_set);
    let mf = hardy_littlewood_maximal(&f);
    let low: Vec<bool> = mf.samples().iter().map(|v| v.re <= lambda).collect();
    let keep = |t: &Tile| {
        let (s, len) = t.samples(grid);
        low[s..s + len].iter().any(|&b| b)
    };
    let tiles = super::generate_universe(grid, Some(&keep));
    let size = if tiles.is_empty() { 0.0 } else { size(&tiles, &f, base)?.0 };
    Ok(SizeUpperReport { lambda, tiles: tiles.len(), size, ratio: size / lambda })
}
