//! Dyadic tiles in the time-frequency plane, trees of tiles, and the
//! density/size calculus built on them.
//!
//! Space is `[0, 1)` with `2^m` samples; a tile at scale `j ∈ [-m, 0]` has
//! `|I| = 2^j` and a frequency interval `ω` of `W = 2^{-j}` bins. The
//! frequency axis is `Z_L` read as `[0, L)`, so `ω = [f·W, (f+1)·W)` and
//! a modulation parameter `N(x)` is taken mod `L`.

mod bilinear;
mod density;
mod linearization;
mod packets;
mod size;
mod trees;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::signal::GridSpec;

pub use bilinear::{bilinear_form, bilinear_rhs, tile_weights, BilinearReport};
pub use density::{chi_i, density_split, DensityTable, SplitReport};
pub use size::{size, size_split, size_upper_check, SizeUpperReport};
pub use trees::{gamma, tiles_below, tree_partition, tree_sum, TreePartition, TreeSumReport};
pub use linearization::{
    active_blocks, f_sj, h_terms, linearized_sum, tile_osc, tile_osc_dual, Linearization,
};
pub use packets::{
    packet_coefficients, packet_frequency, tile_coefficients, wave_packet, Column, PacketBase,
};

/// `[index·2^scale, (index+1)·2^scale)` in the units of its axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub scale: i32,
    pub index: i64,
}

impl DyadicInterval {
    pub fn new(scale: i32, index: i64) -> Self {
        DyadicInterval { scale, index }
    }

    pub fn length(&self) -> f64 {
        2f64.powi(self.scale)
    }

    pub fn start(&self) -> f64 {
        self.index as f64 * self.length()
    }

    pub fn center(&self) -> f64 {
        (self.index as f64 + 0.5) * self.length()
    }

    /// `self ⊆ other` for nested dyadic intervals.
    pub fn within(&self, other: &DyadicInterval) -> bool {
        self.scale <= other.scale && (self.index >> (other.scale - self.scale)) == other.index
    }
}

/// A tile `I × ω` with `|I|·|ω| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    pub i: DyadicInterval,
    pub omega: DyadicInterval,
}

impl Tile {
    /// Tile with `|I| = 2^j`, `I` the `n`-th interval, `ω` the `f`-th band.
    pub fn new(grid: GridSpec, j: i32, n: i64, f: i64) -> Result<Tile> {
        let m = grid.m() as i32;
        if !(-m..=0).contains(&j) {
            return param(format!("tile scale {j} outside [-{m}, 0]"));
        }
        if n < 0 || n >= 1 << -j {
            return param(format!("space index {n} out of range at scale {j}"));
        }
        if f < 0 || f >= 1 << (m + j) {
            return param(format!("frequency index {f} out of range at scale {j}"));
        }
        Ok(Tile { i: DyadicInterval::new(j, n), omega: DyadicInterval::new(-j, f) })
    }

    pub fn scale(&self) -> i32 {
        self.i.scale
    }

    /// `|ω|` in bins.
    pub fn width(&self) -> i64 {
        1 << self.omega.scale
    }

    /// First sample of `I` and number of samples it spans.
    pub fn samples(&self, grid: GridSpec) -> (usize, usize) {
        let len = 1usize << (self.i.scale + grid.m() as i32);
        (self.i.index as usize * len, len)
    }

    /// Lowest bin of `ω`.
    pub fn omega_start(&self) -> i64 {
        self.omega.index * self.width()
    }

    /// Bin `k` (mod `L`) lies in `ω₊`, the upper half of `ω`.
    pub fn in_upper(&self, grid: GridSpec, k: i64) -> bool {
        let k = k.rem_euclid(grid.len() as i64);
        let (a, w) = (self.omega_start(), self.width());
        2 * k >= 2 * a + w && k < a + w
    }

    /// Bin `k` (mod `L`) lies in `ω₋`.
    pub fn in_lower(&self, grid: GridSpec, k: i64) -> bool {
        let k = k.rem_euclid(grid.len() as i64);
        let (a, w) = (self.omega_start(), self.width());
        k >= a && 2 * k < 2 * a + w
    }

    pub fn in_omega(&self, grid: GridSpec, k: i64) -> bool {
        let k = k.rem_euclid(grid.len() as i64);
        k >= self.omega_start() && k < self.omega_start() + self.width()
    }

    /// `ω_{self±} ⊇ other.ω` with `+` for `upper`. Uses doubled coordinates
    /// so the half-bin halves at `W = 1` compare correctly.
    pub fn half_contains(&self, other: &Tile, upper: bool) -> bool {
        let (a, w) = (2 * self.omega_start(), 2 * self.width());
        let (lo, hi) = if upper { (a + w / 2, a + w) } else { (a, a + w / 2) };
        let (b, v) = (2 * other.omega_start(), 2 * other.width());
        b >= lo && b + v <= hi
    }

    /// Index in the ordering of [`generate_universe`].
    pub fn universe_index(&self, grid: GridSpec) -> usize {
        let m = grid.m() as i32;
        let l = grid.len();
        let per_n = l >> -self.scale();
        (self.scale() + m) as usize * l + self.i.index as usize * per_n + self.omega.index as usize
    }

    /// Tile at a universe index.
    pub fn from_universe_index(grid: GridSpec, idx: usize) -> Tile {
        let m = grid.m() as i32;
        let l = grid.len();
        let j = (idx / l) as i32 - m;
        let r = idx % l;
        let per_n = l >> -j;
        Tile { i: DyadicInterval::new(j, (r / per_n) as i64), omega: DyadicInterval::new(-j, (r % per_n) as i64) }
    }
}

/// `s ≤ s2`: `ω_s ⊇ ω_{s2}` and `I_s ⊆ I_{s2}`.
pub fn tile_less(s: &Tile, s2: &Tile) -> bool {
    s.i.within(&s2.i) && s2.omega.within(&s.omega)
}

/// The rectangles `I × ω` of two tiles share a point.
pub fn rectangles_intersect(grid: GridSpec, a: &Tile, b: &Tile) -> bool {
    let (sa, la) = a.samples(grid);
    let (sb, lb) = b.samples(grid);
    let (fa, wa) = (a.omega_start(), a.width());
    let (fb, wb) = (b.omega_start(), b.width());
    sa < sb + lb && sb < sa + la && fa < fb + wb && fb < fa + wa
}

/// Every tile at scales `-m..=0`, optionally filtered, in universe order.
pub fn generate_universe(grid: GridSpec, restrict: Option<&dyn Fn(&Tile) -> bool>) -> Vec<Tile> {
    (0..(grid.m() as usize + 1) * grid.len())
        .map(|i| Tile::from_universe_index(grid, i))
        .filter(|t| restrict.is_none_or(|r| r(t)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Plus,
    Minus,
    Mixed,
}

/// Tiles below a common top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub top: Tile,
    pub members: Vec<Tile>,
    pub polarity: Polarity,
}

impl Tree {
    /// Validates `s ≤ top` for every member and classifies the polarity.
    /// A tree whose only member (if any) is the top counts as a +tree.
    pub fn new(top: Tile, members: Vec<Tile>) -> Result<Tree> {
        if let Some(s) = members.iter().find(|s| !tile_less(s, &top)) {
            return param(format!("{s:?} is not below the top"));
        }
        let strict = members.iter().filter(|s| **s != top);
        let (mut plus, mut minus) = (false, false);
        for s in strict {
            if s.half_contains(&top, true) {
                plus = true;
            } else {
                minus = true;
            }
        }
        let polarity = match (plus, minus) {
            (_, false) => Polarity::Plus,
            (false, true) => Polarity::Minus,
            (true, true) => Polarity::Mixed,
        };
        Ok(Tree { top, members, polarity })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `|I_T|`.
    pub fn top_length(&self) -> f64 {
        self.top.i.length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: u32) -> GridSpec {
        GridSpec::new(m).unwrap()
    }

    #[test]
    fn universe_counts_and_indexing() {
        let gr = g(2);
        let u = generate_universe(gr, None);
        assert_eq!(u.len(), 12);
        for (i, t) in u.iter().enumerate() {
            assert_eq!(t.universe_index(gr), i);
            assert_eq!(t.i.length() * t.width() as f64, 1.0);
        }
        let all = |_: &Tile| true;
        assert_eq!(generate_universe(gr, Some(&all)), u);
        let coarse = |t: &Tile| t.scale() == 0;
        assert_eq!(generate_universe(gr, Some(&coarse)).len(), 4);
        assert_eq!(generate_universe(g(6), None).len(), 7 * 64);
    }

    #[test]
    fn order_is_a_partial_order() {
        let gr = g(3);
        let u = generate_universe(gr, None);
        for a in &u {
            assert!(tile_less(a, a));
            for b in &u {
                if a != b && tile_less(a, b) {
                    assert!(!tile_less(b, a));
                }
                for c in &u {
                    if tile_less(a, b) && tile_less(b, c) {
                        assert!(tile_less(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn order_matches_rectangle_intersection() {
        let gr = g(4);
        let u = generate_universe(gr, None);
        for a in &u {
            for b in &u {
                let cmp = tile_less(a, b) || tile_less(b, a);
                assert_eq!(cmp, rectangles_intersect(gr, a, b), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn halves() {
        let gr = g(4);
        let t = Tile::new(gr, -2, 1, 1).unwrap();
        assert_eq!((t.omega_start(), t.width()), (4, 4));
        let up: Vec<i64> = (0..16).filter(|&k| t.in_upper(gr, k)).collect();
        let lo: Vec<i64> = (0..16).filter(|&k| t.in_lower(gr, k)).collect();
        assert_eq!(up, vec![6, 7]);
        assert_eq!(lo, vec![4, 5]);
        assert!(t.in_upper(gr, 7 - 16));
        // W = 1: ω₊ = [3.5, 4) holds no integer bin, ω₋ holds bin 3.
        let c = Tile::new(gr, 0, 0, 3).unwrap();
        assert!((0..16).all(|k| !c.in_upper(gr, k)));
        assert!((0..16).all(|k| c.in_lower(gr, k) == (k == 3)));
        assert!(Tile::new(gr, 1, 0, 0).is_err());
        assert!(Tile::new(gr, -1, 2, 0).is_err());
    }

    #[test]
    fn trees_and_polarity() {
        let gr = g(4);
        let top = Tile::new(gr, -1, 0, 5).unwrap();
        let plus = Tile::new(gr, -2, 1, 2).unwrap();
        let minus = Tile::new(gr, -3, 0, 1).unwrap();
        assert!(tile_less(&plus, &top) && tile_less(&minus, &top));
        assert_eq!(Tree::new(top, vec![top, plus]).unwrap().polarity, Polarity::Plus);
        assert_eq!(Tree::new(top, vec![minus]).unwrap().polarity, Polarity::Minus);
        assert_eq!(Tree::new(top, vec![plus, minus]).unwrap().polarity, Polarity::Mixed);
        assert_eq!(Tree::new(top, vec![]).unwrap().polarity, Polarity::Plus);
        let other = Tile::new(gr, -2, 3, 2).unwrap();
        assert!(Tree::new(top, vec![other]).is_err());
    }
}
