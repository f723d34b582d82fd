//! The band-limited ψ, its dyadic sum Ψ, the averaged Ψ₀ and the
//! decomposition `D₀ = K_H - c(Ψ₀ - conj∘Ψ₀)`.

use std::sync::Arc;
use std::sync::OnceLock;

use super::{Kernel, KernelMeta, Profile, Shape};
use crate::error::{param, Error, Result};
use crate::numerics::{adaptive_simpson, bump, gl_integrate};
use crate::signal::GridSpec;
use crate::C64;

/// Frequency unit `S` (in bins) standing in for the dimensionless band
/// `[-2, -1/2]`.
pub const BAND_UNIT: usize = 32;

const ENVELOPE_FLOOR: f64 = 1e-13;

/// `∫_{-1}^{1} bump`.
fn bump_mass() -> f64 {
    static M: OnceLock<f64> = OnceLock::new();
    *M.get_or_init(|| gl_integrate(bump, -1.0, 1.0, 64))
}

/// Width (in octaves) of the ψ bump. Chosen so that the Haar mass
/// `∫ ψ̂(2^u ξ) du` is exactly 1.
fn psi_width() -> f64 {
    1.0 / bump_mass()
}

/// Number of dyadic terms that exactly cover the grid: `m - log2 S`.
pub fn psi_vmax(grid: GridSpec) -> Result<u32> {
    let ls = BAND_UNIT.trailing_zeros();
    if grid.m() < ls + 2 {
        return Err(Error::Domain(format!("grid m={} too small for band unit {BAND_UNIT}", grid.m())));
    }
    Ok(grid.m() - ls)
}

/// ψ with symbol `bump(log2(|ξ|/S)/w)` on negative bins, peak `C₀ = 1`,
/// supported in `[-2S, -S/2]`.
pub fn make_psi(nu: u32, grid: GridSpec) -> Result<Kernel> {
    if nu < 4 {
        return param(format!("ν must be at least 4, got {nu}"));
    }
    let s = BAND_UNIT as f64;
    if (s / 2.0).powi(-(nu as i32)) < ENVELOPE_FLOOR {
        return Err(Error::Domain(format!("ν = {nu} too large: envelope falls below the noise floor")));
    }
    if grid.len() < 4 * BAND_UNIT {
        return Err(Error::Domain(format!("grid m={} too small for band unit {BAND_UNIT}", grid.m())));
    }
    let w = psi_width();
    let prof: Profile = Arc::new(move |xi: f64| {
        if xi >= 0.0 {
            return C64::new(0.0, 0.0);
        }
        C64::new(bump((-xi / s).log2() / w), 0.0)
    });
    let meta = KernelMeta {
        name: "psi".into(),
        nu: Some(nu as f64),
        support: Some((-2.0 * s, -0.5 * s)),
        c0: Some(1.0),
        c1: None,
    };
    let mut k = Kernel::from_profile(grid, prof, false, meta)?;
    let (c1, _) = psi_envelope_constants(&k, nu as f64);
    k.meta.c1 = Some(c1);
    Ok(k)
}

/// Measured constants for `|ψ(y)| ≤ C₁ min(|yS|^{-ν}, |yS|^{ν})` and for the
/// Schwartz envelope `(1 + |yS|)^{-ν}`.
///
/// The first excludes the origin (the envelope vanishes there while ψ(0) > 0)
/// and samples whose envelope is below the noise floor.
pub fn psi_envelope_constants(k: &Kernel, nu: f64) -> (f64, f64) {
    let grid = k.grid();
    let s = BAND_UNIT as f64;
    let mut lit: f64 = 0.0;
    let mut poly: f64 = 0.0;
    for (n, v) in k.spatial().iter().enumerate() {
        let t = (grid.centered(n) * s).abs();
        poly = poly.max(v.norm() * (1.0 + t).powf(nu));
        if n == 0 {
            continue;
        }
        let env = t.powf(-nu).min(t.powf(nu));
        if env >= ENVELOPE_FLOOR {
            lit = lit.max(v.norm() / env);
        }
    }
    (lit, poly)
}

fn spectral_profile(k: &Kernel) -> Result<Profile> {
    match k.shape() {
        Shape::Spectral { profile, .. } => Ok(profile.clone()),
        _ => param(format!("kernel '{}' has no spectral profile", k.meta().name)),
    }
}

/// `Ψ = Σ_{v=1}^{vmax} Dil^{(1)}_{2^{-v}} ψ`, symbol `Σ_v ψ̂(2^{-v} ξ)`.
pub fn build_big_psi(psi: &Kernel, vmax: u32) -> Result<Kernel> {
    let grid = psi.grid();
    if vmax == 0 {
        return param("vmax must be positive");
    }
    if vmax + 2 > grid.m() || (1usize << (vmax - 1)) * BAND_UNIT > grid.len() / 2 {
        return Err(Error::Domain(format!("vmax = {vmax} exceeds grid resolution at m={}", grid.m())));
    }
    let p = spectral_profile(psi)?;
    let prof: Profile = Arc::new(move |xi: f64| {
        (1..=vmax).map(|v| p(xi * 0.5f64.powi(v as i32))).sum()
    });
    let s = BAND_UNIT as f64;
    let meta = KernelMeta {
        name: "Psi".into(),
        nu: psi.meta().nu,
        support: Some((-(2f64.powi(vmax as i32 + 1)) * s, -s)),
        c0: None,
        c1: None,
    };
    Kernel::from_profile(grid, prof, false, meta)
}

/// Symbol mass `Σ_k |ψ̂(2^{-v}k)|` of the terms `v > vmax` that still touch the grid.
pub fn big_psi_tail(psi: &Kernel, vmax: u32) -> Result<f64> {
    let p = spectral_profile(psi)?;
    let grid = psi.grid();
    let half = (grid.len() / 2) as f64;
    let mut tail = 0.0;
    let mut v = vmax + 1;
    while 2f64.powi(v as i32 - 1) * BAND_UNIT as f64 <= half {
        let f = 0.5f64.powi(v as i32);
        tail += (0..grid.len()).map(|i| p(grid.bin(i) as f64 * f).norm()).sum::<f64>();
        v += 1;
    }
    Ok(tail)
}

/// `Ψ₀(ξ) = ∫_0^1 Ψ̂(2^s ξ) ds`, the Haar average of the dilates of Ψ.
///
/// With Ψ covering every octave of the grid this equals
/// `∫_{-∞}^0 ψ̂(2^u ξ) du`, which is 0 on `ξ ≥ -S/2` and the constant
/// `A = ∫ ψ̂(2^u) du` on `ξ ≤ -2S`.
pub fn build_psi0(big: &Kernel) -> Result<Kernel> {
    let grid = big.grid();
    let p = spectral_profile(big)?;
    let lo = big.meta().support.map(|s| s.0).unwrap_or(0.0);
    if -lo < 2.0 * grid.len() as f64 {
        return param("Ψ does not cover every octave of the grid");
    }
    let eval = {
        let p = p.clone();
        move |xi: f64| -> Result<f64> {
            if xi >= 0.0 {
                return Ok(0.0);
            }
            adaptive_simpson(&|s: f64| p(2f64.powf(s) * xi).re, 0.0, 1.0, 1e-13)
        }
    };
    let mut symbol = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        symbol.push(C64::new(eval(grid.bin(i) as f64)?, 0.0));
    }
    let meta = KernelMeta {
        name: "Psi0".into(),
        nu: big.meta().nu,
        support: Some((-(grid.len() as f64) / 2.0, -(BAND_UNIT as f64) / 2.0)),
        c0: None,
        c1: None,
    };
    let mut k = Kernel::from_symbol(grid, symbol, meta)?;
    let prof: Profile = Arc::new(move |xi| C64::new(eval(xi).unwrap_or(f64::NAN), 0.0));
    k.shape = Shape::Spectral { profile: prof, nyquist_avg: false };
    Ok(k)
}

/// The constant `A` of Ψ₀ on bins `≤ -2S` and its relative variation there.
pub fn psi0_constant(psi0: &Kernel) -> Result<(C64, f64)> {
    let half = (psi0.grid().len() / 2) as i64;
    let vals: Vec<C64> = (2 * BAND_UNIT as i64..=half).map(|b| psi0.symbol_at(-b)).collect();
    if vals.is_empty() {
        return Err(Error::Domain("no bins at or below -2S".into()));
    }
    let a = vals.iter().sum::<C64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - a).norm()).fold(0.0, f64::max);
    Ok((a, if a.norm() > 0.0 { var / a.norm() } else { f64::INFINITY }))
}

/// `conj∘K`: spatial `conj(K(y))`, symbol `conj(σ(-ξ))`.
pub fn reflect_conj(k: &Kernel) -> Kernel {
    let l = k.grid().len();
    Kernel {
        grid: k.grid(),
        spatial: k.spatial().iter().map(|v| v.conj()).collect(),
        symbol: (0..l).map(|i| k.symbol()[(l - i) % l].conj()).collect(),
        meta: KernelMeta::named(format!("conj_{}", k.meta().name)),
        shape: Shape::Samples,
    }
}

/// `D₀ = K_H - c(Ψ₀ - conj∘Ψ₀)` with `c = -lim_{+∞} σ_{K_H} / conj(A)`, the
/// limit being the mean over the top octave `[L/4, L/2)`.
pub fn build_d0(kh: &Kernel, psi0: &Kernel) -> Result<(Kernel, C64)> {
    kh.grid().check_same(&psi0.grid())?;
    let l = kh.grid().len() as i64;
    let top: Vec<C64> = (l / 4..l / 2).map(|b| kh.symbol_at(b)).collect();
    let lim = top.iter().sum::<C64>() / top.len() as f64;
    let (a, _) = psi0_constant(psi0)?;
    if a.norm() == 0.0 {
        return Err(Error::Domain("Ψ₀ constant A is zero".into()));
    }
    let c = -lim / a.conj();
    let odd = psi0.sub(&reflect_conj(psi0))?;
    let d0 = kh.sub(&odd.scale(c))?.with_meta(KernelMeta::named("D0"));
    Ok((d0, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{make_truncated_hilbert, make_zeta};

    fn g(m: u32) -> GridSpec {
        GridSpec::new(m).unwrap()
    }

    #[test]
    fn psi_band_and_peak() {
        let psi = make_psi(8, g(10)).unwrap();
        let s = BAND_UNIT as f64;
        let mut peak: f64 = 0.0;
        for i in 0..psi.grid().len() {
            let b = psi.grid().bin(i) as f64;
            let v = psi.symbol()[i];
            assert!(v.re >= 0.0 && v.im == 0.0);
            if b < -2.0 * s || b > -0.5 * s {
                assert_eq!(v.re, 0.0);
            }
            peak = peak.max(v.re);
        }
        assert_eq!(peak, 1.0);
        assert_eq!(psi.out_of_support_ratio(), 0.0);
        let c1 = psi.meta().c1.unwrap();
        assert!(c1.is_finite() && c1 > 0.0);
        assert!(make_psi(3, g(10)).is_err());
        assert!(make_psi(11, g(10)).is_err());
    }

    #[test]
    fn psi_envelope_holds_with_reported_constant() {
        let psi = make_psi(8, g(10)).unwrap();
        let (c1, poly) = psi_envelope_constants(&psi, 8.0);
        let s = BAND_UNIT as f64;
        for (n, v) in psi.spatial().iter().enumerate() {
            let t = (psi.grid().centered(n) * s).abs();
            assert!(v.norm() <= poly * (1.0 + t).powf(-8.0) * (1.0 + 1e-12));
            let env = t.powf(-8.0).min(t.powf(8.0));
            if n > 0 && env >= ENVELOPE_FLOOR {
                assert!(v.norm() <= c1 * env * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn big_psi_is_sum_of_dilates() {
        let gr = g(10);
        let psi = make_psi(8, gr).unwrap();
        let vmax = psi_vmax(gr).unwrap();
        let big = build_big_psi(&psi, vmax).unwrap();
        let p = psi.profile_at(0.0).map(|_| ()).is_some();
        assert!(p);
        for i in 0..gr.len() {
            let b = gr.bin(i) as f64;
            let want: f64 = (1..=vmax).map(|v| psi.profile_at(b / 2f64.powi(v as i32)).unwrap().re).sum();
            assert!((big.symbol()[i].re - want).abs() < 1e-9);
            if b >= 0.0 {
                assert_eq!(big.symbol()[i].norm(), 0.0);
            }
        }
        let one = build_big_psi(&psi, 1).unwrap();
        let d = crate::kernels::dilate_kernel(&psi, 0.5, 1.0).unwrap();
        for i in 0..gr.len() {
            assert_eq!(one.symbol()[i], d.symbol()[i]);
        }
        assert!(build_big_psi(&psi, 0).is_err());
        assert!(build_big_psi(&psi, vmax + 1).is_err());
        assert_eq!(big_psi_tail(&psi, vmax).unwrap(), 0.0);
        assert!(big_psi_tail(&psi, 1).unwrap() > 0.0);
    }

    #[test]
    fn psi0_profile() {
        let gr = g(10);
        let psi = make_psi(8, gr).unwrap();
        let big = build_big_psi(&psi, psi_vmax(gr).unwrap()).unwrap();
        let p0 = build_psi0(&big).unwrap();
        for i in 0..gr.len() {
            let b = gr.bin(i);
            if b > -(BAND_UNIT as i64) / 2 {
                assert_eq!(p0.symbol()[i].norm(), 0.0);
            }
        }
        let (a, var) = psi0_constant(&p0).unwrap();
        assert!(var <= 1e-4);
        // Oracle: (1/ln2) ∫_{1/2}^{2} ψ̂(-rS)/r dr, fine trapezoid.
        let n = 200_000;
        let dr = 1.5 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let r = 0.5 + i as f64 * dr;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += w * psi.profile_at(-r * BAND_UNIT as f64).unwrap().re / r;
        }
        let want = s * dr / std::f64::consts::LN_2;
        assert!((a.re - want).abs() < 1e-5);
        assert!(build_psi0(&build_big_psi(&psi, 2).unwrap()).is_err());
    }

    #[test]
    fn d0_reconstruction_and_decay() {
        let gr = g(10);
        let kh = make_truncated_hilbert(&make_zeta(1.0 / BAND_UNIT as f64, gr).unwrap()).unwrap();
        let psi = make_psi(8, gr).unwrap();
        let p0 = build_psi0(&build_big_psi(&psi, psi_vmax(gr).unwrap()).unwrap()).unwrap();
        let (d0, c) = build_d0(&kh, &p0).unwrap();
        assert!((c.norm() - std::f64::consts::PI).abs() < 0.05 * std::f64::consts::PI);
        let odd = p0.sub(&reflect_conj(&p0)).unwrap().scale(c);
        let back = d0.add(&odd).unwrap();
        for (a, b) in back.spatial().iter().zip(kh.spatial()) {
            assert!((a - b).norm() < 1e-9);
        }
        assert!(d0.spatial().iter().all(|v| v.im.abs() < 1e-9));
        let l = gr.len() as i64;
        for b in [l / 4, -l / 4] {
            assert!(d0.symbol_at(b).norm() <= 10.0 / l as f64);
        }
    }
}
