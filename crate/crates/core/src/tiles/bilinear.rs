//! `Σ_{s,j} |⟨1_G,φ_s⟩⟨1_H,f_{s,j}⟩|`, summed directly and through the
//! alternating density/size decomposition into trees.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::density::{density_split, DensityTable, SplitReport};
use super::linearization::{h_terms, Linearization};
use super::packets::{tile_coefficients, wave_packet, PacketBase};
use super::size::{size, size_split};
use super::{Tile, Tree};
use crate::error::Result;
use crate::numerics::KahanSum;
use crate::signal::{MeasurableSet, Signal};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearReport {
    pub direct: f64,
    pub pipeline: f64,
    /// `min(|G|,|H|)(1 + |ln(|G|/|H|)|)`.
    pub rhs: f64,
    pub ratio: f64,
    pub trees: usize,
    /// `Σ_T size(T)·dense(T)·|I_T|` over the selected trees.
    pub tree_bound_total: f64,
    pub residual_tiles: usize,
    pub density_constants: Vec<f64>,
    pub size_constants: Vec<f64>,
}

/// `Σ_j |⟨1_G,φ_s⟩⟨1_H,f_{s,j}⟩|` per tile.
pub fn tile_weights(
    g_set: &MeasurableSet,
    h_set: &MeasurableSet,
    tiles: &[Tile],
    lin: &Linearization,
    base: &PacketBase,
) -> Result<Vec<f64>> {
    let grid = g_set.grid();
    let coef = tile_coefficients(&Signal::indicator(g_set), tiles, base);
    tiles
        .iter()
        .zip(coef)
        .map(|(s, c)| {
            if c.norm() == 0.0 {
                return Ok(0.0);
            }
            let phi = wave_packet(s, base, grid)?;
            Ok(h_terms(s, &phi, lin, h_set).iter().map(|t| c.norm() * t.norm()).sum())
        })
        .collect()
}

pub fn bilinear_rhs(g_measure: f64, h_measure: f64) -> f64 {
    if g_measure <= 0.0 || h_measure <= 0.0 {
        return 0.0;
    }
    g_measure.min(h_measure) * (1.0 + (g_measure / h_measure).ln().abs())
}

pub fn bilinear_form(
    g_set: &MeasurableSet,
    h_set: &MeasurableSet,
    tiles: &[Tile],
    lin: &Linearization,
    base: &PacketBase,
    nu: f64,
) -> Result<BilinearReport> {
    let grid = g_set.grid();
    grid.check_same(&h_set.grid())?;
    let weights = tile_weights(g_set, h_set, tiles, lin, base)?;
    let mut direct = KahanSum::default();
    weights.iter().for_each(|w| direct.add(*w));
    let by_tile: HashMap<Tile, f64> = tiles.iter().copied().zip(weights.iter().copied()).collect();
    let fg = Signal::indicator(g_set);
    let table = DensityTable::new(grid, h_set, &lin.n_of_x, nu)?;

    let mut selected: Vec<Tree> = Vec::new();
    let mut density_constants = Vec::new();
    let mut size_constants = Vec::new();
    let mut take = |rep: SplitReport, out: &mut Vec<f64>| {
        out.push(rep.constant);
        selected.extend(rep.trees);
    };
    let mut cur: Vec<Tile> = tiles.to_vec();
    while !cur.is_empty() {
        let mut progress = false;
        let delta = table.dense_of(&cur);
        if delta > 0.0 {
            let (heavy, light) = density_split(&cur, &table, h_set.measure(), delta)?;
            if !heavy.trees.is_empty() {
                progress = true;
                take(heavy, &mut density_constants);
                cur = light;
            }
        }
        if !cur.is_empty() {
            let (big, small) = size_split(&cur, &fg, base)?;
            if !big.trees.is_empty() {
                progress = true;
                take(big, &mut size_constants);
                cur = small;
            }
        }
        if !progress {
            break;
        }
    }
    let mut pipeline = KahanSum::default();
    let mut tree_bound_total = 0.0;
    for t in &selected {
        let mut part = KahanSum::default();
        t.members.iter().for_each(|s| part.add(by_tile[s]));
        pipeline.add(part.value());
        if part.value() > 0.0 {
            let sz = size(&t.members, &fg, base)?.0;
            tree_bound_total += sz * table.dense_of(&t.members) * t.top_length();
        }
    }
    cur.iter().for_each(|s| pipeline.add(by_tile[s]));
    let rhs = bilinear_rhs(g_set.measure(), h_set.measure());
    let direct = direct.value();
    Ok(BilinearReport {
        direct,
        pipeline: pipeline.value(),
        rhs,
        ratio: if rhs > 0.0 { direct / rhs } else { 0.0 },
        trees: selected.len(),
        tree_bound_total,
        residual_tiles: cur.len(),
        density_constants,
        size_constants,
    })
}
