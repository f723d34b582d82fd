//! ζ, the truncated Hilbert kernel `K_H = ζ(y)/y`, and the sharp cutoff J_H.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{DecayReport, Kernel, KernelMeta, Profile, Shape};
use crate::error::{param, Error, Result};
use crate::fourier::fft;
use crate::numerics::{bump, gl_integrate_c, slope};
use crate::signal::GridSpec;
use crate::C64;

/// Smooth symmetric bump `exp(1 - 1/(1 - (y/r)²))` on the torus, `ζ(0) = 1`.
pub fn make_zeta(radius: f64, grid: GridSpec) -> Result<Kernel> {
    if !(radius > 0.0 && radius < 0.5) {
        return Err(Error::Domain(format!("ζ radius {radius} outside (0, 1/2)")));
    }
    let prof: Profile = Arc::new(move |y| C64::new(bump(y / radius), 0.0));
    Kernel::from_spatial_profile(grid, prof, radius, KernelMeta::named("zeta"))
}

/// `K_H(y) = ζ(y)/y`, built from the continuum symbol
/// `σ(ξ) = -2i ∫_0^r ζ(y) sin(2πξy)/y dy`.
///
/// Sampling `ζ(y)/y` pointwise leaves a symbol error of order `|ξ|/L`
/// (the lattice sum of an odd `1/y` is a sawtooth), which swamps the decay
/// being measured. The band-limited kernel whose symbol agrees with the
/// continuum transform on every bin avoids that. The origin sample is 0
/// and the samples are exactly odd.
pub fn make_truncated_hilbert(zeta: &Kernel) -> Result<Kernel> {
    let Shape::Spatial { profile, radius } = zeta.shape().clone() else {
        return param("ζ must carry a spatial profile (use make_zeta)");
    };
    let grid = zeta.grid();
    let l = grid.len();
    let z = zeta.spatial();
    let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for n in 1..l {
        if (z[n] - z[l - n]).norm() > 1e-12 * scale {
            return Err(Error::Domain("ζ is not symmetric".into()));
        }
    }
    let sym: Profile = Arc::new(move |xi: f64| {
        if xi == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let panels = 4 + (xi.abs() * radius).ceil() as usize;
        let v = gl_integrate_c(|y| profile(y) * ((2.0 * PI * xi * y).sin() / y), 0.0, radius, panels);
        C64::new(0.0, -2.0) * v
    });
    let mut k = Kernel::from_profile(grid, sym, true, KernelMeta::named("K_H"))?;
    for v in k.symbol.iter_mut() {
        v.re = 0.0;
    }
    let sp = k.spatial.clone();
    for n in 0..l {
        let odd = 0.5 * (sp[n].re - sp[(l - n) % l].re);
        k.spatial[n] = C64::new(odd, 0.0);
    }
    k.spatial[0] = C64::new(0.0, 0.0);
    k.spatial[l / 2] = C64::new(0.0, 0.0);
    Ok(k)
}

/// Fits the behaviour of `σ(ξ) - c` on the side where the symbol tends to
/// `c ≈ iπ` (the negative bins here, since the transform uses `e^{-2πiky}`).
///
/// `c` is the mean over the top decade of that side. The slope is fitted over
/// `|ξ| ∈ [4S, L/4]`; `max_ratio` is `max |ξ|·|σ(ξ) - c|` over `[4, L/4]`.
pub fn verify_symbol_decay(kh: &Kernel) -> Result<DecayReport> {
    let grid = kh.grid();
    let l = grid.len() as i64;
    if l < 256 {
        return param(format!("grid too small to fit a slope (L = {l} < 256)"));
    }
    let lo_c = (l as f64 / 20.0).ceil() as i64;
    let top: Vec<C64> = (lo_c..l / 2).map(|k| kh.symbol_at(-k)).collect();
    let c = top.iter().sum::<C64>() / top.len() as f64;

    let s = super::BAND_UNIT as i64;
    let (a, b) = (4 * s, l / 4);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in a..=b {
        let d = (kh.symbol_at(-k) - c).norm().max(1e-300);
        xs.push((k as f64).ln());
        ys.push(d.ln());
    }
    let fitted = if xs.len() >= 2 { slope(&xs, &ys) } else { f64::NAN };
    let max_ratio = (4..=b)
        .map(|k| k as f64 * (kh.symbol_at(-k) - c).norm())
        .fold(0.0, f64::max);
    let (dsup, dbound) = hilbert_derivative_bound(kh);
    Ok(DecayReport {
        kernel: kh.meta().name.clone(),
        slope: fitted,
        max_ratio,
        range: (a as f64, b as f64),
        estimate: Some(c),
        notes: vec![
            ("re_c".into(), c.re),
            ("im_c".into(), c.im),
            ("deriv_sup".into(), dsup),
            ("deriv_bound".into(), dbound),
        ],
    })
}

/// Derivative of the symbol in the angular variable, `d/dξ ∫ K e^{-iξy}`,
/// computed spectrally from `y·K(y)`: returns `(sup_{|k|≤1} |·|, ∫|yK|)`.
pub fn hilbert_derivative_bound(k: &Kernel) -> (f64, f64) {
    let grid = k.grid();
    let h = grid.h();
    let yk: Vec<C64> = (0..grid.len())
        .map(|n| C64::new(0.0, -grid.centered(n)) * k.spatial()[n])
        .collect();
    let d = fft(&yk);
    let sup = [0usize, 1, grid.len() - 1].iter().map(|&i| (d[i] * h).norm()).fold(0.0, f64::max);
    let bound = h * yk.iter().map(|v| v.norm()).sum::<f64>();
    (sup, bound)
}

/// `max |σ(ξ)|/|ξ|` over angular `0 < |ξ| ≤ 1`, evaluated on the continuous
/// symbol, together with the continuum `∫|y K_H(y)| dy = ∫ζ`.
pub fn hilbert_small_frequency_constant(kh: &Kernel, zeta: &Kernel) -> Result<(f64, f64)> {
    if kh.profile_at(0.0).is_none() {
        return param("kernel has no continuous symbol");
    }
    let mut c: f64 = 0.0;
    for j in 1..=64 {
        let ang = j as f64 / 64.0;
        let v = kh.profile_at(ang / (2.0 * PI)).unwrap_or_default();
        c = c.max(v.norm() / ang);
    }
    let h = zeta.grid().h();
    Ok((c, h * zeta.spatial().iter().map(|v| v.norm()).sum::<f64>()))
}

/// `J_H(y) = 1_{|y| ≤ 1/4} / y`, zero at the origin, sampled pointwise.
pub fn make_sharp_hilbert(grid: GridSpec) -> Result<Kernel> {
    let prof: Profile = Arc::new(|y: f64| {
        if y != 0.0 && y.abs() <= 0.25 {
            C64::new(1.0 / y, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Kernel::from_spatial_profile(grid, prof, 0.3, KernelMeta::named("J_H"))
}

/// Total variation of the symbol over positive dyadic bands `[2^b, 2^{b+1})`.
pub fn sharp_hilbert_band_variation(k: &Kernel) -> Vec<f64> {
    let half = (k.grid().len() / 2) as i64;
    let mut out = Vec::new();
    let mut lo = 1i64;
    while lo < half {
        let hi = (2 * lo).min(half);
        let tv: f64 = (lo..hi).map(|b| (k.symbol_at(b + 1) - k.symbol_at(b)).norm()).sum();
        out.push(tv);
        lo = hi;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gl_integrate;

    fn g(m: u32) -> GridSpec {
        GridSpec::new(m).unwrap()
    }

    #[test]
    fn zeta_basics() {
        let z = make_zeta(0.25, g(10)).unwrap();
        assert_eq!(z.spatial()[0].re, 1.0);
        let l = z.grid().len();
        for n in 1..l {
            assert_eq!(z.spatial()[n], z.spatial()[l - n]);
        }
        assert!(make_zeta(0.0, g(10)).is_err());
        assert!(make_zeta(0.5, g(10)).is_err());
    }

    #[test]
    fn zeta_integral_stable_across_grids() {
        let a = make_zeta(0.25, g(10)).unwrap().symbol_at(0).re;
        let b = make_zeta(0.25, g(12)).unwrap().symbol_at(0).re;
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn hilbert_is_odd_and_imaginary() {
        let kh = make_truncated_hilbert(&make_zeta(0.25, g(10)).unwrap()).unwrap();
        let l = kh.grid().len();
        for n in 1..l {
            assert_eq!(kh.spatial()[n].re, -kh.spatial()[l - n].re);
            assert_eq!(kh.spatial()[n].im, 0.0);
        }
        assert_eq!(kh.symbol_at(0).norm(), 0.0);
        for b in 1..(l as i64 / 2) {
            assert!(kh.symbol_at(b).re.abs() < 1e-9);
            assert!((kh.symbol_at(b) + kh.symbol_at(-b)).norm() < 1e-9);
        }
        assert!(kh.symbol_consistency() < 1e-10);
    }

    #[test]
    fn hilbert_symbol_matches_independent_quadrature() {
        // Fine trapezoid on ∫_0^r ζ(y) sin(2πξy)/y dy.
        let kh = make_truncated_hilbert(&make_zeta(0.25, g(10)).unwrap()).unwrap();
        for xi in [1i64, 7, 50, 256] {
            let n = 200_000;
            let dy = 0.25 / n as f64;
            let mut s = 0.0;
            for i in 1..n {
                let y = i as f64 * dy;
                s += bump(y / 0.25) * (2.0 * PI * xi as f64 * y).sin() / y;
            }
            s += 0.5 * 2.0 * PI * xi as f64;
            let want = -2.0 * s * dy;
            assert!((kh.symbol_at(xi).im - want).abs() < 1e-7, "xi={xi}");
        }
    }

    #[test]
    fn hilbert_rejects_asymmetric_zeta() {
        let gr = g(8);
        let prof: Profile = Arc::new(|y: f64| C64::new(bump((y - 0.05) / 0.2), 0.0));
        let z = Kernel::from_spatial_profile(gr, prof, 0.3, KernelMeta::default()).unwrap();
        assert!(make_truncated_hilbert(&z).is_err());
        let plain = Kernel::from_spatial(gr, z.spatial().to_vec(), KernelMeta::default()).unwrap();
        assert!(make_truncated_hilbert(&plain).is_err());
    }

    #[test]
    fn small_frequency_constant() {
        let z = make_zeta(0.25, g(10)).unwrap();
        let kh = make_truncated_hilbert(&z).unwrap();
        let (c, integral) = hilbert_small_frequency_constant(&kh, &z).unwrap();
        let zint = gl_integrate(|y| bump(y / 0.25), -0.25, 0.25, 16);
        assert!((integral - zint).abs() < 1e-6, "{integral} {zint} {c}");
        assert!(c <= 4.0 * integral);
    }

    #[test]
    fn decay_constant_near_i_pi() {
        let kh = make_truncated_hilbert(&make_zeta(0.25, g(12)).unwrap()).unwrap();
        let r = verify_symbol_decay(&kh).unwrap();
        let c = r.estimate.unwrap();
        assert!(c.re.abs() <= 1e-3);
        assert!((c.im - PI).abs() <= 0.05 * PI);
        assert!(r.max_ratio.is_finite());
        let (dsup, dbound) = (r.note("deriv_sup").unwrap(), r.note("deriv_bound").unwrap());
        assert!(dsup <= dbound + 1e-12);
        assert!(verify_symbol_decay(&make_truncated_hilbert(&make_zeta(0.25, g(7)).unwrap()).unwrap()).is_err());
    }

    #[test]
    fn sharp_hilbert() {
        let jh = make_sharp_hilbert(g(12)).unwrap();
        let l = jh.grid().len();
        assert_eq!(jh.spatial()[0].re, 0.0);
        for n in 1..l {
            assert_eq!(jh.spatial()[n], -jh.spatial()[l - n]);
        }
        let scale = jh.symbol().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(jh.symbol().iter().all(|v| v.re.abs() <= 1e-9 * scale.max(1.0)));
        let tv = sharp_hilbert_band_variation(&jh);
        let mut acc = 0.0;
        for (b, v) in tv.iter().enumerate() {
            let next = acc + v;
            assert!(next > acc, "band {b}");
            acc = next;
        }
        // Bands keep contributing a comparable amount: variation grows like log.
        let late = tv[tv.len() - 3..].iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(late > 0.25 * tv[3]);
    }
}
