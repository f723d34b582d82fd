//! The partition of a tree into maximal `J` with `3J ⊉ I_s`, the sets
//! `E(J)`, the tree sum with its two-part bound, and `Γ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::density::DensityTable;
use super::linearization::{h_terms, Linearization};
use super::packets::{tile_coefficients, wave_packet, PacketBase};
use super::size::size;
use super::{DyadicInterval, Polarity, Tile, Tree};
use crate::error::{param, Result};
use crate::signal::{lp_norm, modulate, GridSpec, MeasurableSet, Signal};
use crate::C64;

/// Every tile below `top` of the given polarity (all of them for `Mixed`),
/// the top included.
pub fn tiles_below(grid: GridSpec, top: &Tile, polarity: Polarity) -> Vec<Tile> {
    let mut out = Vec::new();
    for j in (-(grid.m() as i32)..=top.scale()).rev() {
        let d = top.scale() - j;
        let w = 1i64 << -j;
        let f = top.omega_start() / w;
        let first = top.i.index << d;
        for n in first..first + (1 << d) {
            let s = Tile { i: DyadicInterval::new(j, n), omega: DyadicInterval::new(-j, f) };
            let keep = s == *top
                || match polarity {
                    Polarity::Plus => s.half_contains(top, true),
                    Polarity::Minus => s.half_contains(top, false),
                    Polarity::Mixed => true,
                };
            if keep {
                out.push(s);
            }
        }
    }
    out
}

/// Maximal dyadic `J` with `3J ⊉ I_s` for all `s ∈ T`, the sets `E(J)`, and
/// `max |E(J)| / (dense(T)|J|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreePartition {
    pub cells: Vec<DyadicInterval>,
    /// Finest-scale cells kept although `3J` contains some `I_s`.
    pub forced: Vec<bool>,
    pub e_sets: Vec<Vec<usize>>,
    pub dense: f64,
    pub constant: f64,
}

fn samples_of(iv: &DyadicInterval, grid: GridSpec) -> (usize, usize) {
    let len = 1usize << (iv.scale + grid.m() as i32);
    (iv.index as usize * len, len)
}

/// `I ⊆ 3J` on the torus.
fn in_triple(grid: GridSpec, i: &DyadicInterval, j: &DyadicInterval) -> bool {
    let l = grid.len();
    let (a, la) = samples_of(i, grid);
    let (b, lb) = samples_of(j, grid);
    if 3 * lb >= l {
        return true;
    }
    let off = (a + l - (b + l - lb) % l) % l;
    off + la <= 3 * lb
}

pub fn tree_partition(tree: &Tree, table: &DensityTable, lin: &Linearization, h_set: &MeasurableSet) -> Result<TreePartition> {
    let grid = table.grid();
    grid.check_same(&lin.grid())?;
    grid.check_same(&h_set.grid())?;
    if tree.is_empty() {
        return param("partition of an empty tree");
    }
    let m = grid.m() as i32;
    let mut cells = Vec::new();
    let mut forced = Vec::new();
    let mut stack = vec![DyadicInterval::new(0, 0)];
    while let Some(j) = stack.pop() {
        let blocked = tree.members.iter().any(|s| in_triple(grid, &s.i, &j));
        if !blocked || j.scale == -m {
            cells.push(j);
            forced.push(blocked);
        } else {
            stack.push(DyadicInterval::new(j.scale - 1, 2 * j.index + 1));
            stack.push(DyadicInterval::new(j.scale - 1, 2 * j.index));
        }
    }
    let dense = table.dense_of(&tree.members);
    let mut constant: f64 = 0.0;
    let e_sets: Vec<Vec<usize>> = cells
        .iter()
        .map(|j| {
            let (a, len) = samples_of(j, grid);
            let e: Vec<usize> = (a..a + len)
                .filter(|&x| {
                    h_set.contains(x)
                        && tree
                            .members
                            .iter()
                            .any(|s| s.i.length() > 2.0 * j.length() && s.in_upper(grid, lin.n_of_x[x]))
                })
                .collect();
            if dense > 0.0 {
                constant = constant.max(e.len() as f64 * grid.h() / (dense * j.length()));
            }
            e
        })
        .collect();
    Ok(TreePartition { cells, forced, e_sets, dense, constant })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSumReport {
    /// `Σ_j Σ_s |⟨1_G,φ_s⟩⟨1_H,f_{s,j}⟩|`.
    pub sum: f64,
    /// Tiles with `|I_s| ≤ 2|J|`, bounded termwise.
    pub first: f64,
    /// Tiles with `|I_s| > 2|J|`, phases aligned so that `sum ≤ first + second`.
    pub second: f64,
    pub size: f64,
    pub dense: f64,
    pub top_length: f64,
    /// `sum / (size·dense·|I_T|)`, 0 when the sum vanishes.
    pub ratio: f64,
    pub partition_constant: f64,
}

/// `Sum(T)` and its split over the tree partition.
pub fn tree_sum(
    tree: &Tree,
    g_set: &MeasurableSet,
    h_set: &MeasurableSet,
    lin: &Linearization,
    table: &DensityTable,
    base: &PacketBase,
) -> Result<TreeSumReport> {
    let grid = g_set.grid();
    let fg = Signal::indicator(g_set);
    let coef = tile_coefficients(&fg, &tree.members, base);
    let part = tree_partition(tree, table, lin, h_set)?;
    let mut cell_len = vec![0.0; grid.len()];
    for c in &part.cells {
        let (a, len) = samples_of(c, grid);
        cell_len[a..a + len].fill(c.length());
    }
    let nb = lin.blocks();
    let h = grid.h();
    let mut sum = 0.0;
    let mut first = 0.0;
    let mut big = vec![vec![C64::new(0.0, 0.0); grid.len()]; nb];
    for (s, c) in tree.members.iter().zip(&coef) {
        let phi = wave_packet(s, base, grid)?;
        let terms = h_terms(s, &phi, lin, h_set);
        for (j, t) in terms.iter().enumerate() {
            let v = c * t;
            sum += v.norm();
            // ε c_s conj f_{s,j} summed over J ∩ H gives |c_s ⟨1_H, f_{s,j}⟩|.
            let eps = if v.norm() > 0.0 { v.conj() / v.norm() } else { C64::new(1.0, 0.0) };
            for x in h_set.indices() {
                if !lin.selects(s, j, x) {
                    continue;
                }
                let fx = (phi.samples()[x] * lin.alpha[j][x]).conj();
                if s.i.length() <= 2.0 * cell_len[x] {
                    first += c.norm() * fx.norm() * h;
                } else {
                    big[j][x] += eps * c * fx;
                }
            }
        }
    }
    let second: f64 = big.iter().flat_map(|b| h_set.indices().map(move |x| b[x].norm())).sum::<f64>() * h;
    let size = if sum > 0.0 { size(&tree.members, &fg, base)?.0 } else { 0.0 };
    let top_length = tree.top_length();
    let denom = size * part.dense * top_length;
    let ratio = if sum > 0.0 { sum / denom } else { 0.0 };
    Ok(TreeSumReport { sum, first, second, size, dense: part.dense, top_length, ratio, partition_constant: part.constant })
}

/// `Γ = Mod_{-c(ω_T)} Σ_{s∈T} ⟨1_G,φ_s⟩ φ_s` for a +tree, with
/// `‖Γ‖₂ / (size(T)·|I_T|^{1/2})`.
pub fn gamma(tree: &Tree, g_set: &MeasurableSet, base: &PacketBase) -> Result<(Signal, f64)> {
    if tree.polarity != Polarity::Plus {
        return param(format!("Γ needs a +tree, got {:?}", tree.polarity));
    }
    let grid = g_set.grid();
    if tree.is_empty() {
        return Ok((Signal::zeros(grid), 0.0));
    }
    let fg = Signal::indicator(g_set);
    let coef = tile_coefficients(&fg, &tree.members, base);
    let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
    for (s, c) in tree.members.iter().zip(&coef) {
        let phi = wave_packet(s, base, grid)?;
        for (a, v) in acc.iter_mut().zip(phi.samples()) {
            *a += c * v;
        }
    }
    let centre = tree.top.omega_start() as f64 + 0.5 * tree.top.width() as f64;
    let g = modulate(&Signal::from_samples(grid, acc)?, -2.0 * PI * centre);
    let sz = size(&tree.members, &fg, base)?.0;
    let norm = lp_norm(&g, 2.0)?;
    let ratio = if norm > 0.0 { norm / (sz * tree.top_length().sqrt()) } else { 0.0 };
    Ok((g, ratio))
}
