//! Wave packets `φ_s = Mod_{c(ω_{s-})} Tran_{c(I_s)} Dil^{(2)}_{|I_s|} φ`,
//! built in frequency from a bump `φ̂` supported in `[-1/ν, 1/ν]`.
//!
//! On the grid the Riemann sum `R(W) = Σ_d |φ̂(d/W)|²` replaces `∫|φ̂|²`,
//! so every scale carries its own constant `R(W)^{-1/2}` and all packets
//! have unit norm.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::Tile;
use crate::error::{param, Result};
use crate::fourier::{fft_in_place, ifft_in_place};
use crate::numerics::bump;
use crate::signal::{GridSpec, Signal};
use crate::C64;

/// Band-limited packet profile `φ̂(u) = bump(ν u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PacketBase {
    nu: f64,
}

impl Default for PacketBase {
    fn default() -> Self {
        PacketBase { nu: 8.0 }
    }
}

impl PacketBase {
    /// Bands wider than `1/4` would leak out of `ω₋`.
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 4.0) || !nu.is_finite() {
            return param(format!("band 1/ν = {} too wide", 1.0 / nu));
        }
        Ok(PacketBase { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.nu
    }

    pub fn profile(&self, u: f64) -> f64 {
        bump(u * self.nu)
    }

    /// `R(W)^{-1/2}`.
    pub fn norm_const(&self, w: usize) -> f64 {
        let r = self.radius() * w as f64;
        let d = r.ceil() as i64;
        let s: f64 = (-d..=d).map(|k| self.profile(k as f64 / w as f64).powi(2)).sum();
        1.0 / s.sqrt()
    }
}

/// Integer modulation `η = f·W + ⌊W/4⌋ ≈ c(ω₋)`.
pub fn packet_frequency(t: &Tile) -> i64 {
    t.omega_start() + t.width() / 4
}

/// One column of packets: all `W` tiles of width `W` at modulation `η₀`,
/// conjugated as `Mod_{-θ} Tran_{-y}`. Plain tiles have `θ = y = 0`.
#[derive(Clone, Copy, Debug)]
pub struct Column {
    pub w: usize,
    pub eta0: i64,
    pub theta: f64,
    pub y: f64,
}

impl Column {
    pub fn of_tile(t: &Tile) -> Column {
        Column { w: t.width() as usize, eta0: packet_frequency(t), theta: 0.0, y: 0.0 }
    }

    /// `τ = η₀ - θ`, the packets' true centre frequency.
    fn tau(&self) -> f64 {
        self.eta0 as f64 - self.theta
    }

    /// Integer bins `κ` with `|κ - τ| < W/ν`.
    pub(crate) fn window(&self, base: &PacketBase) -> std::ops::RangeInclusive<i64> {
        let r = base.radius() * self.w as f64;
        let tau = self.tau();
        (tau - r).floor() as i64..=(tau + r).ceil() as i64
    }

    /// `φ̂_n(κ)/e^{-2πi t (n+1/2)/W}`: the `n`-independent factor.
    fn envelope(&self, base: &PacketBase, kappa: i64) -> (f64, C64) {
        let w = self.w as f64;
        let t = kappa as f64 - self.tau();
        let b = base.profile(t / w);
        (b, C64::from_polar(1.0, 2.0 * PI * (t + self.eta0 as f64) * self.y))
    }

    /// Some bin of the window carries a nonzero coefficient.
    pub fn touches(&self, coef: &[C64], base: &PacketBase) -> bool {
        let l = coef.len() as i64;
        self.window(base).any(|k| coef[k.rem_euclid(l) as usize] != C64::new(0.0, 0.0))
    }

    /// `⟨f, φ_n⟩` for `n = 0..W`, from Fourier coefficients `f̂` (FFT order).
    pub fn analyze(&self, coef: &[C64], base: &PacketBase) -> Vec<C64> {
        let l = coef.len() as i64;
        let w = self.w;
        let wf = w as f64;
        let tau = self.tau();
        let mut a = vec![C64::new(0.0, 0.0); w];
        for kappa in self.window(base) {
            let (b, ph) = self.envelope(base, kappa);
            if b == 0.0 {
                continue;
            }
            let t = kappa as f64 - tau;
            let g = coef[kappa.rem_euclid(l) as usize] * b * C64::from_polar(1.0, PI * t / wf) * ph.conj();
            a[kappa.rem_euclid(w as i64) as usize] += g;
        }
        ifft_in_place(&mut a);
        let c = base.norm_const(w);
        for (n, v) in a.iter_mut().enumerate() {
            *v *= C64::from_polar(c, -2.0 * PI * tau * n as f64 / wf);
        }
        a
    }

    /// Adds `Σ_n c_n φ̂_n` into a coefficient array.
    pub fn synthesize(&self, coefs: &[C64], base: &PacketBase, out: &mut [C64]) {
        let l = out.len() as i64;
        let w = self.w;
        let wf = w as f64;
        let tau = self.tau();
        let mut b: Vec<C64> = coefs
            .iter()
            .enumerate()
            .map(|(n, v)| v * C64::from_polar(1.0, 2.0 * PI * tau * n as f64 / wf))
            .collect();
        fft_in_place(&mut b);
        let c = base.norm_const(w);
        for kappa in self.window(base) {
            let (p, ph) = self.envelope(base, kappa);
            if p == 0.0 {
                continue;
            }
            let t = kappa as f64 - tau;
            out[kappa.rem_euclid(l) as usize] +=
                b[kappa.rem_euclid(w as i64) as usize] * c * p * ph * C64::from_polar(1.0, -PI * t / wf);
        }
    }
}

/// Fourier coefficients of `φ_s` in FFT order.
pub fn packet_coefficients(t: &Tile, base: &PacketBase, grid: GridSpec) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let mut unit = vec![C64::new(0.0, 0.0); t.width() as usize];
    unit[t.i.index as usize] = C64::new(1.0, 0.0);
    Column::of_tile(t).synthesize(&unit, base, &mut out);
    out
}

pub fn wave_packet(t: &Tile, base: &PacketBase, grid: GridSpec) -> Result<Signal> {
    Signal::from_coefficients(grid, &packet_coefficients(t, base, grid))
}

/// `⟨f, φ_s⟩` for every tile, one column transform per `(scale, ω)`.
pub fn tile_coefficients(f: &Signal, tiles: &[Tile], base: &PacketBase) -> Vec<C64> {
    let coef = f.coefficients();
    let mut cols: HashMap<(i32, i64), Vec<C64>> = HashMap::new();
    tiles
        .iter()
        .map(|t| {
            let col = cols
                .entry((t.scale(), t.omega.index))
                .or_insert_with(|| Column::of_tile(t).analyze(&coef, base));
            col[t.i.index as usize]
        })
        .collect()
}
