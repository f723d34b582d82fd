//! Linearized tile oscillation: the modulation parameter `N(x)`, block
//! weights `α_j(x)` and scale windows `ℓ_{j±}(x)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::packets::{tile_coefficients, wave_packet, PacketBase};
use super::Tile;
use crate::error::{param, Result};
use crate::oscillation::OscSpec;
use crate::signal::{GridSpec, MeasurableSet, Signal};
use crate::C64;

/// `N`, `α_j`, `ℓ_{j±}` over the non-empty blocks of an [`OscSpec`] (`n = 1`,
/// so block scales are `log2 |I|`).
///
/// `F_{s,j}(x)` is `ℓ_{j-}(x) ≤ log2|I_s| < ℓ_{j+}(x)` with
/// `k_j ≤ ℓ_{j-} < ℓ_{j+} ≤ k_{j+1}`, which lets a window reach the
/// top scale `k_{j+1} - 1` of its block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub m: u32,
    pub n_of_x: Vec<i64>,
    pub alpha: Vec<Vec<C64>>,
    pub ell_minus: Vec<Vec<i64>>,
    pub ell_plus: Vec<Vec<i64>>,
    pub spec: OscSpec,
}

/// Clipped inclusive scale ranges of the non-empty blocks.
pub fn active_blocks(spec: &OscSpec, grid: GridSpec) -> Result<Vec<(i64, i64)>> {
    if spec.n != 1 {
        return param("tile blocks use dyadic scales (n = 1)");
    }
    let r: Vec<(i64, i64)> = spec.ranges(grid).into_iter().flatten().collect();
    if r.is_empty() {
        return param("no block meets the grid's scales");
    }
    Ok(r)
}

impl Linearization {
    pub fn new(
        grid: GridSpec,
        n_of_x: Vec<i64>,
        alpha: Vec<Vec<C64>>,
        ell_minus: Vec<Vec<i64>>,
        ell_plus: Vec<Vec<i64>>,
        spec: OscSpec,
    ) -> Result<Self> {
        let blocks = active_blocks(&spec, grid)?;
        let l = grid.len();
        let nb = blocks.len();
        if n_of_x.len() != l {
            return param("N must have one value per sample");
        }
        if alpha.len() != nb || ell_minus.len() != nb || ell_plus.len() != nb {
            return param(format!("expected {nb} blocks of weights and windows"));
        }
        if alpha.iter().any(|a| a.len() != l)
            || ell_minus.iter().chain(&ell_plus).any(|a| a.len() != l)
        {
            return param("per-block arrays must have one value per sample");
        }
        for x in 0..l {
            let s: f64 = alpha.iter().map(|a| a[x].norm_sqr()).sum();
            if s > 1.0 + 1e-12 {
                return param(format!("Σ|α_j|² = {s} > 1 at sample {x}"));
            }
            for (j, &(a, b)) in blocks.iter().enumerate() {
                let (lm, lp) = (ell_minus[j][x], ell_plus[j][x]);
                if !(a <= lm && lm < lp && lp <= b + 1) {
                    return param(format!("window ({lm}, {lp}) outside block [{a}, {b}] at sample {x}"));
                }
            }
        }
        let n_of_x = n_of_x.into_iter().map(|k| k.rem_euclid(l as i64)).collect();
        Ok(Linearization { m: grid.m(), n_of_x, alpha, ell_minus, ell_plus, spec })
    }

    /// Piecewise-constant random `N` on dyadic cells of random size, unit
    /// `ℓ²` weights with random phases, random admissible windows.
    pub fn random<R: Rng>(grid: GridSpec, spec: OscSpec, rng: &mut R) -> Result<Self> {
        let blocks = active_blocks(&spec, grid)?;
        let l = grid.len();
        let cell = 1usize << rng.gen_range(0..=grid.m() / 2);
        let mut n_of_x = vec![0i64; l];
        for c in n_of_x.chunks_mut(cell) {
            let v = rng.gen_range(0..l as i64);
            c.fill(v);
        }
        let nb = blocks.len();
        let mut alpha = vec![vec![C64::new(0.0, 0.0); l]; nb];
        let mut ell_minus = vec![vec![0i64; l]; nb];
        let mut ell_plus = vec![vec![0i64; l]; nb];
        for x in 0..l {
            let w: Vec<C64> = (0..nb)
                .map(|_| C64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect();
            let norm = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
            for j in 0..nb {
                alpha[j][x] = w[j] / norm;
                let (a, b) = blocks[j];
                let lm = rng.gen_range(a..=b);
                ell_minus[j][x] = lm;
                ell_plus[j][x] = rng.gen_range(lm + 1..=b + 1);
            }
        }
        Self::new(grid, n_of_x, alpha, ell_minus, ell_plus, spec)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.m).expect("validated")
    }

    pub fn blocks(&self) -> usize {
        self.alpha.len()
    }

    /// `x ∈ F_{s,j}` and `N(x) ∈ ω_{s+}`.
    pub fn selects(&self, s: &Tile, j: usize, x: usize) -> bool {
        let l = s.scale() as i64;
        self.ell_minus[j][x] <= l && l < self.ell_plus[j][x] && s.in_upper(self.grid(), self.n_of_x[x])
    }
}

/// `f_{s,j} = 1_{F_{s,j}} α_j 1_{ω_{s+}}(N) φ_s`.
pub fn f_sj(s: &Tile, lin: &Linearization, j: usize, base: &PacketBase) -> Result<Signal> {
    let grid = lin.grid();
    if j >= lin.blocks() {
        return param(format!("block {j} out of range"));
    }
    let p = wave_packet(s, base, grid)?;
    Signal::from_samples(
        grid,
        p.samples()
            .iter()
            .enumerate()
            .map(|(x, v)| if lin.selects(s, j, x) { v * lin.alpha[j][x] } else { C64::new(0.0, 0.0) })
            .collect(),
    )
}

/// `⟨1_H, f_{s,j}⟩ = h Σ_{x∈H} conj f_{s,j}(x)` for every block, given `φ_s`.
pub fn h_terms(s: &Tile, packet: &Signal, lin: &Linearization, h_set: &MeasurableSet) -> Vec<C64> {
    let h = lin.grid().h();
    (0..lin.blocks())
        .map(|j| {
            h_set
                .indices()
                .filter(|&x| lin.selects(s, j, x))
                .map(|x| (packet.samples()[x] * lin.alpha[j][x]).conj())
                .sum::<C64>()
                * h
        })
        .collect()
}

/// `P_l(x) = Σ_{s∈S, |I_s| = 2^l} ⟨f,φ_s⟩ φ_s(x) 1_{ω_{s+}}(N(x))`, indexed by `l + m`.
fn scale_sums(f: &Signal, tiles: &[Tile], n_of_x: &[i64], base: &PacketBase) -> Result<Vec<Vec<C64>>> {
    let grid = f.grid();
    let m = grid.m() as i32;
    let coef = tile_coefficients(f, tiles, base);
    let mut p = vec![vec![C64::new(0.0, 0.0); grid.len()]; m as usize + 1];
    for (s, c) in tiles.iter().zip(coef) {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        let phi = wave_packet(s, base, grid)?;
        let row = &mut p[(s.scale() + m) as usize];
        for (x, v) in phi.samples().iter().enumerate() {
            if s.in_upper(grid, n_of_x[x]) {
                row[x] += c * v;
            }
        }
    }
    Ok(p)
}

/// Per block and sample, the best window `(l, l')` and its partial sum.
type Best = Vec<Vec<(i64, i64, C64)>>;

fn block_sups(p: &[Vec<C64>], blocks: &[(i64, i64)], m: i64, len: usize) -> Best {
    blocks
        .iter()
        .map(|&(a, b)| {
            (0..len)
                .map(|x| {
                    let mut best = (a, a, C64::new(0.0, 0.0));
                    for l in a..=b {
                        let mut acc = p[(l + m) as usize][x];
                        for l2 in l + 1..=b {
                            acc += p[(l2 + m) as usize][x];
                            if acc.norm() > best.2.norm() {
                                best = (l, l2, acc);
                            }
                        }
                    }
                    best
                })
                .collect()
        })
        .collect()
}

fn osc_from(best: &Best, grid: GridSpec) -> Signal {
    let v: Vec<f64> = (0..grid.len()).map(|x| best.iter().map(|b| b[x].2.norm_sqr()).sum::<f64>().sqrt()).collect();
    Signal::from_real(grid, &v).expect("grid length")
}

/// `[Σ_j sup_{k_j ≤ l < l' < k_{j+1}} |Σ_{2^l ≤ |I_s| ≤ 2^{l'}} ⟨f,φ_s⟩φ_s 1_{ω_{s+}}(N)|²]^{1/2}`.
pub fn tile_osc(f: &Signal, tiles: &[Tile], lin: &Linearization, base: &PacketBase) -> Result<Signal> {
    let grid = f.grid();
    grid.check_same(&lin.grid())?;
    let blocks = active_blocks(&lin.spec, grid)?;
    let p = scale_sums(f, tiles, &lin.n_of_x, base)?;
    Ok(osc_from(&block_sups(&p, &blocks, grid.m() as i64, grid.len()), grid))
}

/// [`tile_osc`] together with the linearization attaining it: windows at
/// the maximizing `(l, l')` and `α_j = conj(P_j)/Osc`, so that
/// `Σ_j Σ_s ⟨f,φ_s⟩ f_{s,j} = Osc` pointwise.
pub fn tile_osc_dual(
    f: &Signal,
    tiles: &[Tile],
    n_of_x: Vec<i64>,
    spec: OscSpec,
    base: &PacketBase,
) -> Result<(Signal, Linearization)> {
    let grid = f.grid();
    let blocks = active_blocks(&spec, grid)?;
    let p = scale_sums(f, tiles, &n_of_x.iter().map(|k| k.rem_euclid(grid.len() as i64)).collect::<Vec<_>>(), base)?;
    let best = block_sups(&p, &blocks, grid.m() as i64, grid.len());
    let osc = osc_from(&best, grid);
    let alpha = best
        .iter()
        .map(|b| {
            b.iter()
                .zip(osc.samples())
                .map(|(&(_, _, v), o)| if o.re > 0.0 { v.conj() / o.re } else { C64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    let ell_minus = best.iter().map(|b| b.iter().map(|v| v.0).collect()).collect();
    let ell_plus = best
        .iter()
        .zip(&blocks)
        .map(|(b, &(a, _))| b.iter().map(|v| if v.1 > v.0 { v.1 + 1 } else { a + 1 }).collect())
        .collect();
    let lin = Linearization::new(grid, n_of_x, alpha, ell_minus, ell_plus, spec)?;
    Ok((osc, lin))
}

/// `Σ_j Σ_s ⟨f,φ_s⟩ f_{s,j}(x)`.
pub fn linearized_sum(f: &Signal, tiles: &[Tile], lin: &Linearization, base: &PacketBase) -> Result<Signal> {
    let grid = f.grid();
    grid.check_same(&lin.grid())?;
    let coef = tile_coefficients(f, tiles, base);
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for (s, c) in tiles.iter().zip(coef) {
        let phi = wave_packet(s, base, grid)?;
        for (x, o) in out.iter_mut().enumerate() {
            for j in 0..lin.blocks() {
                if lin.selects(s, j, x) {
                    *o += c * lin.alpha[j][x] * phi.samples()[x];
                }
            }
        }
    }
    Signal::from_samples(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiles::generate_universe;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(m: u32) -> GridSpec {
        GridSpec::new(m).unwrap()
    }

    fn random(grid: GridSpec, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Signal::from_fn(grid, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn spec6() -> OscSpec {
        OscSpec::new(1, vec![-6, -3, 1]).unwrap()
    }

    #[test]
    fn random_linearization_is_valid() {
        let gr = g(6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lin = Linearization::random(gr, spec6(), &mut rng).unwrap();
        assert_eq!(lin.blocks(), 2);
        assert!(Linearization::new(
            gr,
            lin.n_of_x.clone(),
            lin.alpha.iter().map(|a| a.iter().map(|v| v * 2.0).collect()).collect(),
            lin.ell_minus.clone(),
            lin.ell_plus.clone(),
            spec6()
        )
        .is_err());
        let mut bad = lin.ell_plus.clone();
        bad[0][3] = lin.ell_minus[0][3];
        assert!(Linearization::new(gr, lin.n_of_x.clone(), lin.alpha.clone(), lin.ell_minus.clone(), bad, spec6()).is_err());
    }

    #[test]
    fn f_sj_trivial_cases() {
        let gr = g(6);
        let base = PacketBase::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut lin = Linearization::random(gr, spec6(), &mut rng).unwrap();
        let s = Tile::new(gr, -4, 3, 1).unwrap();
        // N outside ω₊ everywhere.
        let mut l2 = lin.clone();
        l2.n_of_x = vec![0; 64];
        assert_eq!(f_sj(&s, &l2, 0, &base).unwrap().max_abs(), 0.0);
        // α ≡ 0.
        let mut l3 = lin.clone();
        l3.n_of_x = vec![26; 64];
        l3.alpha = vec![vec![C64::new(0.0, 0.0); 64]; 2];
        assert_eq!(f_sj(&s, &l3, 0, &base).unwrap().max_abs(), 0.0);
        // Scale -4 lies in block 0 only.
        lin.n_of_x = vec![26; 64];
        assert!(f_sj(&s, &lin, 0, &base).unwrap().max_abs() > 0.0 || lin.ell_minus[0].iter().all(|&v| v > -4));
        assert_eq!(f_sj(&s, &lin, 1, &base).unwrap().max_abs(), 0.0);
        assert!(f_sj(&s, &lin, 2, &base).is_err());
    }

    #[test]
    fn at_most_one_block_per_tile_and_point() {
        let gr = g(6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lin = Linearization::random(gr, OscSpec::new(1, vec![-6, -4, -2, 1]).unwrap(), &mut rng).unwrap();
        for s in generate_universe(gr, None).iter().step_by(5) {
            for x in 0..64 {
                assert!((0..lin.blocks()).filter(|&j| lin.selects(s, j, x)).count() <= 1);
            }
        }
    }

    #[test]
    fn tile_osc_trivial_cases() {
        let gr = g(6);
        let base = PacketBase::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut lin = Linearization::random(gr, spec6(), &mut rng).unwrap();
        let f = random(gr, 5);
        assert_eq!(tile_osc(&f, &[], &lin, &base).unwrap().max_abs(), 0.0);
        let s = Tile::new(gr, -4, 3, 1).unwrap();
        lin.n_of_x = (0..64).map(|x| if x % 3 == 0 { 26 } else { 0 }).collect();
        let got = tile_osc(&f, &[s], &lin, &base).unwrap();
        let c = tile_coefficients(&f, &[s], &base)[0];
        let phi = wave_packet(&s, &base, gr).unwrap();
        for x in 0..64 {
            let want = if x % 3 == 0 { (c * phi.samples()[x]).norm() } else { 0.0 };
            assert!((got.samples()[x].re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn dual_linearization_attains_osc() {
        let gr = g(6);
        let base = PacketBase::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut u = generate_universe(gr, None);
        u.shuffle(&mut rng);
        let tiles = &u[..200];
        let f = random(gr, 7);
        let n: Vec<i64> = (0..64).map(|_| rng.gen_range(0..64)).collect();
        let (osc, lin) = tile_osc_dual(&f, tiles, n, spec6(), &base).unwrap();
        assert_eq!(osc.samples(), tile_osc(&f, tiles, &lin, &base).unwrap().samples());
        let sum = linearized_sum(&f, tiles, &lin, &base).unwrap();
        for x in 0..64 {
            assert!((sum.samples()[x] - osc.samples()[x]).norm() < 1e-12);
        }
        // Integrating over H term by term.
        let h_set = MeasurableSet::from_fn(gr, |x| (x * 7.0).fract() < 0.4);
        let coef = tile_coefficients(&f, tiles, &base);
        let mut terms = C64::new(0.0, 0.0);
        for (s, c) in tiles.iter().zip(&coef) {
            let phi = wave_packet(s, &base, gr).unwrap();
            for t in h_terms(s, &phi, &lin, &h_set) {
                terms += c * t.conj();
            }
        }
        let direct: f64 = h_set.indices().map(|x| osc.samples()[x].re).sum::<f64>() * gr.h();
        assert!((terms - direct).norm() < 1e-12, "{terms} vs {direct}");
    }
}
