//! Small numerical building blocks: bumps, quadrature, the sine integral,
//! least-squares slopes and compensated sums.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::C64;

/// The standard C^∞ bump `exp(1 - 1/(1 - x²))` on `|x| < 1`, peak 1 at 0.
#[inline]
pub fn bump(x: f64) -> f64 {
    let t = 1.0 - x * x;
    if t <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / t).exp()
    }
}

#[inline]
fn edge(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth plateau: 1 for `|t| <= a`, 0 for `|t| >= b`, C^∞ in between.
#[inline]
pub fn plateau(t: f64, a: f64, b: f64) -> f64 {
    let t = t.abs();
    if t <= a {
        return 1.0;
    }
    if t >= b {
        return 0.0;
    }
    let u = (t - a) / (b - a);
    let p = edge(1.0 - u);
    p / (p + edge(u))
}

const GL_N: usize = 16;

/// 16-point Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_N;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

/// Composite Gauss–Legendre over `[a, b]` split into `panels` equal pieces.
pub fn gl_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre();
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut acc = KahanSum::default();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        let mut s = 0.0;
        for &(x, wt) in rule {
            s += wt * f(mid + 0.5 * w * x);
        }
        acc.add(0.5 * w * s);
    }
    acc.value()
}

/// Complex-valued composite Gauss–Legendre.
pub fn gl_integrate_c<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, panels: usize) -> C64 {
    let rule = gauss_legendre();
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        let mut s = C64::new(0.0, 0.0);
        for &(x, wt) in rule {
            s += f(mid + 0.5 * w * x) * wt;
        }
        acc += s * (0.5 * w);
    }
    acc
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        Some(
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?,
        )
    }
    // Pre-split so that narrow features are not missed by the first estimate.
    let pieces = 16;
    let w = (b - a) / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let lo = a + i as f64 * w;
        let hi = lo + w;
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = w / 6.0 * (fa + 4.0 * fm + fb);
        total += rec(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
            .ok_or_else(|| Error::Numerical("adaptive quadrature did not converge".into()))?;
    }
    Ok(total)
}

/// Sine integral Si(x) = ∫_0^x sin t / t dt.
pub fn sine_integral(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 1e-300 {
        0.0
    } else if ax <= 4.0 {
        // Power series; converges fast for |x| ≤ 4.
        let mut term = ax;
        let mut sum = ax;
        let x2 = ax * ax;
        let mut k = 1;
        loop {
            term *= -x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
            k += 1;
        }
        sum
    } else {
        // Continued fraction for E1(ix) (modified Lentz).
        let tiny = 1e-300;
        let mut b = C64::new(1.0, ax);
        let mut c = C64::new(1.0 / tiny, 0.0);
        let mut d = C64::new(1.0, 0.0) / b;
        let mut h = d;
        let mut i = 1;
        loop {
            let a = -((i * i) as f64);
            b += 2.0;
            d = C64::new(1.0, 0.0) / (d * a + b);
            c = b + C64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 || i > 10_000 {
                break;
            }
            i += 1;
        }
        let e = h * C64::new(ax.cos(), -ax.sin());
        // E1(ix) = -Ci(x) + i(Si(x) - π/2)
        PI / 2.0 + e.im
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy, Debug)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_polynomial_exact() {
        let v = gl_integrate(|x| x.powi(7) + 3.0 * x * x, 0.0, 2.0, 1);
        assert!((v - (256.0 / 8.0 + 8.0)).abs() < 1e-12);
        let w: f64 = gauss_legendre().iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn si_matches_quadrature() {
        for &x in &[0.3, 1.0, 3.9, 4.1, 10.0, 37.5, 250.0] {
            let panels = (x as usize) + 4;
            let q = gl_integrate(|t| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, panels);
            assert!((sine_integral(x) - q).abs() < 1e-13, "x={x}");
            assert!((sine_integral(-x) + q).abs() < 1e-13);
        }
        assert!((sine_integral(1e6) - PI / 2.0).abs() < 2e-6);
    }

    #[test]
    fn plateau_shape() {
        assert_eq!(plateau(0.5, 1.0, 2.0), 1.0);
        assert_eq!(plateau(-2.5, 1.0, 2.0), 0.0);
        let m = plateau(1.5, 1.0, 2.0);
        assert!((m - 0.5).abs() < 1e-12);
        assert!(plateau(1.2, 1.0, 2.0) > plateau(1.8, 1.0, 2.0));
    }

    #[test]
    fn simpson_gaussian() {
        let v = adaptive_simpson(&|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn slope_of_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v + 2.0).collect();
        assert!((slope(&x, &y) + 0.5).abs() < 1e-14);
    }
}
