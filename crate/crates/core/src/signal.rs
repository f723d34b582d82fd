//! Periodized sampled signals on [0, 1) and the basic symmetry operators.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::fourier::{fft, ifft, signed_bin};
use crate::kernels::Kernel;
use crate::C64;

/// Uniform grid of `L = 2^m` samples on the periodized unit interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    m: u32,
}

impl GridSpec {
    pub const MAX_M: u32 = 20;

    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > Self::MAX_M {
            return Err(Error::GridRange(m));
        }
        Ok(GridSpec { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        1usize << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial step `h = 2^{-m}`.
    pub fn h(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Position of sample `n` in [0, 1).
    pub fn position(&self, n: usize) -> f64 {
        n as f64 * self.h()
    }

    /// Signed position of sample `n` in [-1/2, 1/2).
    pub fn centered(&self, n: usize) -> f64 {
        signed_bin(n, self.len()) as f64 * self.h()
    }

    /// Integer bins in FFT order.
    pub fn bin(&self, index: usize) -> i64 {
        signed_bin(index, self.len())
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.m != other.m {
            return Err(Error::GridMismatch(self.m, other.m));
        }
        Ok(())
    }
}

/// Complex samples on a grid, with a lazily cached (raw, unnormalized) DFT.
#[derive(Clone, Debug)]
pub struct Signal {
    grid: GridSpec,
    samples: Vec<C64>,
    spectrum: OnceLock<Vec<C64>>,
}

impl Signal {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_vec(grid, vec![C64::new(0.0, 0.0); grid.len()])
    }

    fn from_vec(grid: GridSpec, samples: Vec<C64>) -> Self {
        Signal { grid, samples, spectrum: OnceLock::new() }
    }

    pub fn from_samples(grid: GridSpec, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return param(format!("expected {} samples, got {}", grid.len(), samples.len()));
        }
        Ok(Self::from_vec(grid, samples))
    }

    pub fn from_real(grid: GridSpec, values: &[f64]) -> Result<Self> {
        Self::from_samples(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Samples `f(x_n)` at `x_n = n·h`.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64) -> C64) -> Self {
        Self::from_vec(grid, (0..grid.len()).map(|n| f(grid.position(n))).collect())
    }

    pub fn constant(grid: GridSpec, c: C64) -> Self {
        Self::from_vec(grid, vec![c; grid.len()])
    }

    /// Pure exponential `e^{2πikx}`, evaluated with exact index arithmetic.
    pub fn exponential(grid: GridSpec, k: i64) -> Self {
        let l = grid.len() as i64;
        Self::from_vec(
            grid,
            (0..l)
                .map(|n| {
                    let r = (k.rem_euclid(l) * n) % l;
                    C64::from_polar(1.0, 2.0 * PI * r as f64 / l as f64)
                })
                .collect(),
        )
    }

    pub fn indicator(set: &MeasurableSet) -> Self {
        Self::from_vec(
            set.grid(),
            set.indicator().iter().map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect(),
        )
    }

    /// Builds a signal from its raw DFT (as returned by [`Signal::spectrum`]).
    pub fn from_spectrum(grid: GridSpec, spectrum: Vec<C64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return param("spectrum length mismatch");
        }
        let scale = 1.0 / grid.len() as f64;
        let samples = ifft(&spectrum).into_iter().map(|v| v * scale).collect();
        let s = Self::from_vec(grid, samples);
        let _ = s.spectrum.set(spectrum);
        Ok(s)
    }

    /// Builds a signal from Fourier coefficients `f̂(k) = ∫ f e^{-2πikx}`
    /// in FFT order, so that `f(x) = Σ f̂(k) e^{2πikx}`.
    pub fn from_coefficients(grid: GridSpec, coef: &[C64]) -> Result<Self> {
        if coef.len() != grid.len() {
            return param("coefficient length mismatch");
        }
        Ok(Self::from_vec(grid, ifft(coef)))
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Raw DFT `X_k = Σ_n x_n e^{-2πikn/L}` in FFT order.
    pub fn spectrum(&self) -> &[C64] {
        self.spectrum.get_or_init(|| fft(&self.samples))
    }

    /// Fourier coefficients `h·DFT`, the same normalization as kernel symbols.
    pub fn coefficients(&self) -> Vec<C64> {
        let h = self.grid.h();
        self.spectrum().iter().map(|v| v * h).collect()
    }

    /// Checks a cached spectrum against a fresh transform.
    pub fn spectrum_consistent(&self, tol: f64) -> bool {
        match self.spectrum.get() {
            None => true,
            Some(s) => {
                let fresh = fft(&self.samples);
                let scale = fresh.iter().map(|v| v.norm()).fold(1.0, f64::max);
                s.iter().zip(&fresh).all(|(a, b)| (a - b).norm() <= tol * scale)
            }
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Signal {
        Self::from_vec(self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: C64) -> Signal {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_vec(
            self.grid,
            self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Signal) -> Result<Signal> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_vec(
            self.grid,
            self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect(),
        ))
    }

    pub fn abs(&self) -> Signal {
        self.map(|v| C64::new(v.norm(), 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Evaluates the trigonometric interpolant (bins in `[-L/2, L/2)`) at
    /// arbitrary points.
    pub fn interpolate(&self, points: &[f64]) -> Vec<C64> {
        let l = self.grid.len();
        let spec = self.spectrum();
        let inv = 1.0 / l as f64;
        points
            .iter()
            .map(|&x| {
                // Start at bin -L/2 and step the phase one bin at a time.
                let step = C64::from_polar(1.0, 2.0 * PI * x);
                let mut ph = C64::from_polar(1.0, -PI * l as f64 * x);
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..l {
                    let idx = (b + l / 2) % l;
                    acc += spec[idx] * ph;
                    ph *= step;
                    if b % 64 == 63 {
                        // Renormalize to keep the recurrence on the unit circle.
                        ph = C64::from_polar(1.0, 2.0 * PI * x * (b as f64 + 1.0 - (l / 2) as f64));
                    }
                }
                acc * inv
            })
            .collect()
    }
}

/// Boolean indicator on the grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurableSet {
    grid: GridSpec,
    indicator: Vec<bool>,
}

impl MeasurableSet {
    pub fn new(grid: GridSpec, indicator: Vec<bool>) -> Result<Self> {
        if indicator.len() != grid.len() {
            return param("indicator length mismatch");
        }
        Ok(MeasurableSet { grid, indicator })
    }

    pub fn empty(grid: GridSpec) -> Self {
        MeasurableSet { grid, indicator: vec![false; grid.len()] }
    }

    pub fn full(grid: GridSpec) -> Self {
        MeasurableSet { grid, indicator: vec![true; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> bool) -> Self {
        MeasurableSet { grid, indicator: (0..grid.len()).map(|n| f(grid.position(n))).collect() }
    }

    /// Samples with `x_n ∈ [a, b)`.
    pub fn interval(grid: GridSpec, a: f64, b: f64) -> Self {
        Self::from_fn(grid, |x| x >= a && x < b)
    }

    /// Set from sample indices.
    pub fn from_indices(grid: GridSpec, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut ind = vec![false; grid.len()];
        for i in idx {
            ind[i % grid.len()] = true;
        }
        MeasurableSet { grid, indicator: ind }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn indicator(&self) -> &[bool] {
        &self.indicator
    }

    pub fn contains(&self, n: usize) -> bool {
        self.indicator[n]
    }

    pub fn count(&self) -> usize {
        self.indicator.iter().filter(|&&b| b).count()
    }

    /// `h · #samples`.
    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.grid.h()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indicator.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn union(&self, other: &MeasurableSet) -> MeasurableSet {
        MeasurableSet {
            grid: self.grid,
            indicator: self.indicator.iter().zip(&other.indicator).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn intersection(&self, other: &MeasurableSet) -> MeasurableSet {
        MeasurableSet {
            grid: self.grid,
            indicator: self.indicator.iter().zip(&other.indicator).map(|(a, b)| *a && *b).collect(),
        }
    }
}

/// `g(x) = s^{-1/p} f(x/s)` with `f` read as a function on the centered cell
/// `[-1/2, 1/2)` (zero outside) and evaluated by trigonometric interpolation.
pub fn dilate(f: &Signal, s: f64, p: f64) -> Result<Signal> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("dilation factor must be positive, got {s}")));
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("exponent must be positive, got {p}")));
    }
    if s == 1.0 {
        return Ok(f.clone());
    }
    let grid = f.grid();
    let amp = if p.is_infinite() { 1.0 } else { s.powf(-1.0 / p) };
    let pts: Vec<f64> = (0..grid.len()).map(|n| grid.centered(n) / s).collect();
    let inside: Vec<usize> = (0..pts.len()).filter(|&i| pts[i] >= -0.5 && pts[i] < 0.5).collect();
    let vals = f.interpolate(&inside.iter().map(|&i| pts[i]).collect::<Vec<_>>());
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for (i, v) in inside.into_iter().zip(vals) {
        out[i] = v * amp;
    }
    Signal::from_samples(grid, out)
}

/// `e^{ixξ} f(x)` for angular frequency `ξ`.
pub fn modulate(f: &Signal, xi: f64) -> Signal {
    let grid = f.grid();
    let k = xi / (2.0 * PI);
    if (k - k.round()).abs() < 1e-12 {
        let e = Signal::exponential(grid, k.round() as i64);
        return f.mul(&e).expect("same grid");
    }
    Signal::from_vec(
        grid,
        f.samples()
            .iter()
            .enumerate()
            .map(|(n, v)| v * C64::from_polar(1.0, xi * grid.position(n)))
            .collect(),
    )
}

/// Periodized shift `f(x - y)`.
pub fn translate(f: &Signal, y: f64) -> Signal {
    let grid = f.grid();
    let l = grid.len();
    let y = y.rem_euclid(1.0);
    let steps = y * l as f64;
    if (steps - steps.round()).abs() < 1e-9 {
        let k = (steps.round() as usize) % l;
        let s = f.samples();
        return Signal::from_vec(grid, (0..l).map(|n| s[(n + l - k) % l]).collect());
    }
    let spec: Vec<C64> = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, v)| v * C64::from_polar(1.0, -2.0 * PI * grid.bin(i) as f64 * y))
        .collect();
    Signal::from_spectrum(grid, spec).expect("length preserved")
}

/// Circular convolution with a kernel, computed spectrally.
pub fn convolve(f: &Signal, k: &Kernel) -> Result<Signal> {
    f.grid().check_same(&k.grid())?;
    let spec: Vec<C64> = f.spectrum().iter().zip(k.symbol()).map(|(a, b)| a * b).collect();
    Signal::from_spectrum(f.grid(), spec)
}

/// `h · Σ f · conj(g)`.
pub fn inner_product(f: &Signal, g: &Signal) -> Result<C64> {
    f.grid().check_same(&g.grid())?;
    let s: C64 = f.samples().iter().zip(g.samples()).map(|(a, b)| a * b.conj()).sum();
    Ok(s * f.grid().h())
}

/// `(h Σ |f|^p)^{1/p}`, or the max for `p = ∞`.
pub fn lp_norm(f: &Signal, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must be ≥ 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let h = f.grid().h();
    let s: f64 = f.samples().iter().map(|v| v.norm().powf(p)).sum();
    Ok((h * s).powf(1.0 / p))
}

/// Half-widths (in samples) of the centered windows used by
/// [`hardy_littlewood_maximal`]: 0 and the powers of two below `L/2`.
pub fn maximal_radii(grid: GridSpec) -> Vec<usize> {
    let mut r = vec![0usize];
    let mut w = 1usize;
    while w < grid.len() / 2 {
        r.push(w);
        w *= 2;
    }
    r
}

/// Centered dyadic-window maximal function of `|f|`.
pub fn hardy_littlewood_maximal(f: &Signal) -> Signal {
    let grid = f.grid();
    let l = grid.len();
    let a: Vec<f64> = f.samples().iter().map(|v| v.norm()).collect();
    // Prefix sums over three periods make wrapped windows contiguous.
    let mut pre = vec![0.0; 3 * l + 1];
    for i in 0..3 * l {
        pre[i + 1] = pre[i] + a[i % l];
    }
    let radii = maximal_radii(grid);
    let out = (0..l)
        .map(|n| {
            let c = n + l;
            // r = 0 is read directly so that Mf ≥ |f| holds without rounding.
            let best = radii
                .iter()
                .skip(1)
                .map(|&r| (pre[c + r + 1] - pre[c - r]) / (2 * r + 1) as f64)
                .fold(a[n], f64::max);
            C64::new(best, 0.0)
        })
        .collect();
    Signal::from_vec(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Kernel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(m: u32) -> GridSpec {
        GridSpec::new(m).unwrap()
    }

    fn random(grid: GridSpec, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Signal::from_fn(grid, |_| C64::new(rng_val(&mut rng), rng_val(&mut rng)))
    }

    fn rng_val(rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(-1.0..1.0)
    }

    fn gaussian(grid: GridSpec, sigma: f64) -> Signal {
        Signal::from_fn(grid, |x| {
            let y = if x >= 0.5 { x - 1.0 } else { x };
            C64::new((-y * y / (2.0 * sigma * sigma)).exp(), 0.0)
        })
    }

    #[test]
    fn grid_basics() {
        let gr = g(10);
        assert_eq!(gr.len(), 1024);
        assert_eq!(gr.h() * gr.len() as f64, 1.0);
        assert!(GridSpec::new(0).is_err());
        assert_eq!(gr.centered(1023), -gr.h());
    }

    #[test]
    fn spectral_round_trip() {
        let f = random(g(9), 1);
        let back = Signal::from_spectrum(f.grid(), f.spectrum().to_vec()).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-12 * f.max_abs().max(1.0));
        assert!(f.spectrum_consistent(1e-12));
        let c = Signal::from_coefficients(f.grid(), &f.coefficients()).unwrap();
        assert!(c.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn dilation_identity_and_isometry() {
        let gr = g(10);
        let f = random(gr, 2);
        assert!(dilate(&f, 1.0, 2.0).unwrap().max_abs_diff(&f) == 0.0);
        let b = gaussian(gr, 0.03);
        let d = dilate(&b, 2.0, 2.0).unwrap();
        assert!((lp_norm(&d, 2.0).unwrap() - lp_norm(&b, 2.0).unwrap()).abs() < 1e-8);
        assert!(dilate(&b, 0.0, 1.0).is_err());
        assert!(dilate(&b, -1.0, 1.0).is_err());
    }

    #[test]
    fn dilation_preserves_integral() {
        let gr = g(10);
        let bump = Signal::from_fn(gr, |x| {
            let y = if x >= 0.5 { x - 1.0 } else { x };
            C64::new(crate::numerics::bump(y / 0.2), 0.0)
        });
        let d = dilate(&bump, 1.5, 1.0).unwrap();
        let one = Signal::constant(gr, C64::new(1.0, 0.0));
        let a = inner_product(&d, &one).unwrap();
        let b = inner_product(&bump, &one).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn dilation_group_law() {
        let b = gaussian(g(10), 0.02);
        let two = dilate(&dilate(&b, 1.5, 2.0).unwrap(), 1.2, 2.0).unwrap();
        let one = dilate(&b, 1.8, 2.0).unwrap();
        assert!(two.max_abs_diff(&one) < 1e-8);
    }

    #[test]
    fn modulation() {
        let gr = g(8);
        let f = random(gr, 3);
        assert!(modulate(&f, 0.0).max_abs_diff(&f) < 1e-15);
        let k = 5;
        let m = modulate(&f, 2.0 * PI * k as f64);
        let l = gr.len();
        for i in 0..l {
            let j = (i + l - k) % l;
            assert!((m.spectrum()[i] - f.spectrum()[j]).norm() < 1e-11);
        }
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let a = lp_norm(&modulate(&f, 0.37), p).unwrap();
            assert!((a - lp_norm(&f, p).unwrap()).abs() < 1e-12);
        }
        let ab = modulate(&modulate(&f, 1.3), 2.1);
        assert!(ab.max_abs_diff(&modulate(&f, 3.4)) < 1e-12);
    }

    #[test]
    fn translation() {
        let gr = g(8);
        let f = random(gr, 4);
        assert!(translate(&f, 0.0).max_abs_diff(&f) == 0.0);
        let y = 0.1234567;
        assert!(translate(&translate(&f, y), -y).max_abs_diff(&f) < 1e-10);
        let q = MeasurableSet::interval(gr, 0.0, 0.25);
        let moved = translate(&Signal::indicator(&q), 0.25);
        let want = Signal::indicator(&MeasurableSet::interval(gr, 0.25, 0.5));
        assert_eq!(moved.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn modulate_translate_commutator() {
        let gr = g(8);
        let f = random(gr, 5);
        let (y, xi) = (3.0 * gr.h(), 2.0 * PI * 7.0);
        let a = modulate(&translate(&f, y), xi);
        let b = translate(&modulate(&f, xi), y);
        let c = C64::from_polar(1.0, y * xi);
        assert!(a.max_abs_diff(&b.scale(c)) < 1e-12);
    }

    #[test]
    fn convolution() {
        let gr = g(8);
        let f = random(gr, 6);
        let delta = Kernel::delta(gr);
        assert!(convolve(&f, &delta).unwrap().max_abs_diff(&f) < 1e-13);
        let k = Kernel::from_spatial(gr, random(gr, 7).into_samples(), Default::default()).unwrap();
        let y = 5.0 * gr.h();
        let a = convolve(&translate(&f, y), &k).unwrap();
        let b = translate(&convolve(&f, &k).unwrap(), y);
        assert!(a.max_abs_diff(&b) < 1e-12);
        let e = Signal::exponential(gr, 9);
        let ce = convolve(&e, &k).unwrap();
        assert!(ce.max_abs_diff(&e.scale(k.symbol_at(9))) < 1e-12);
        assert!(convolve(&Signal::zeros(g(7)), &k).is_err());
    }

    #[test]
    fn inner_products_and_norms() {
        let gr = g(8);
        let f = random(gr, 8);
        let ff = inner_product(&f, &f).unwrap();
        assert!((ff.re - lp_norm(&f, 2.0).unwrap().powi(2)).abs() < 1e-12);
        let ip = inner_product(&Signal::exponential(gr, 1), &Signal::exponential(gr, 2)).unwrap();
        assert!(ip.norm() < 1e-15);
        let half = Signal::indicator(&MeasurableSet::interval(gr, 0.0, 0.5));
        let one = Signal::constant(gr, C64::new(1.0, 0.0));
        assert_eq!(inner_product(&half, &one).unwrap(), C64::new(0.5, 0.0));
        for p in [1.0, 2.0, 7.0, f64::INFINITY] {
            assert!((lp_norm(&one, p).unwrap() - 1.0).abs() < 1e-14);
            let a = lp_norm(&f.scale(C64::new(2.0, 0.0)), p).unwrap();
            assert!((a - 2.0 * lp_norm(&f, p).unwrap()).abs() < 1e-12);
        }
        let q = Signal::indicator(&MeasurableSet::interval(gr, 0.0, 0.25));
        assert!((lp_norm(&q, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(lp_norm(&q, 0.5).is_err());
    }

    #[test]
    fn parseval() {
        let gr = g(9);
        let (f, h) = (random(gr, 9), random(gr, 10));
        let lhs = inner_product(&f, &h).unwrap();
        let rhs: C64 = f.spectrum().iter().zip(h.spectrum()).map(|(a, b)| a * b.conj()).sum();
        let rhs = rhs * gr.h() / gr.len() as f64;
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn maximal_function_basics() {
        let gr = g(8);
        let c = Signal::constant(gr, C64::new(-3.0, 0.0));
        assert!(hardy_littlewood_maximal(&c).samples().iter().all(|v| (v.re - 3.0).abs() < 1e-12));
        let f = random(gr, 11);
        let mf = hardy_littlewood_maximal(&f);
        for (a, b) in mf.samples().iter().zip(f.samples()) {
            assert!(a.re >= b.norm());
        }
    }

    #[test]
    fn maximal_function_brute_force() {
        let gr = g(8);
        let l = gr.len();
        let q = Signal::indicator(&MeasurableSet::interval(gr, 0.0, 0.25));
        let mf = hardy_littlewood_maximal(&q);
        let n = l / 2;
        let mut best: f64 = 0.0;
        for r in maximal_radii(gr) {
            let mut s = 0.0;
            for d in -(r as i64)..=(r as i64) {
                s += q.samples()[(n as i64 + d).rem_euclid(l as i64) as usize].re;
            }
            best = best.max(s / (2 * r + 1) as f64);
        }
        assert!((mf.samples()[n].re - best).abs() < 1e-14);
    }

    #[test]
    fn maximal_weak_type() {
        let gr = g(8);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let f = Signal::from_fn(gr, |_| {
                let v: f64 = rng.gen();
                C64::new(if v < 0.1 { rng.gen_range(0.0..10.0) } else { 0.0 }, 0.0)
            });
            let l1 = lp_norm(&f, 1.0).unwrap();
            if l1 == 0.0 {
                continue;
            }
            let mf = hardy_littlewood_maximal(&f);
            let mut vals: Vec<f64> = mf.samples().iter().map(|v| v.re).collect();
            vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (i, &lam) in vals.iter().enumerate() {
                // #{Mf > λ} for λ just below vals[i] is i + 1.
                worst = worst.max((i + 1) as f64 * gr.h() * lam / l1);
            }
        }
        assert!(worst <= 4.0, "weak type constant {worst}");
    }

    #[test]
    fn measurable_sets() {
        let gr = g(6);
        let a = MeasurableSet::interval(gr, 0.0, 0.5);
        assert_eq!(a.measure(), 0.5);
        assert_eq!(a.count(), 32);
        let b = MeasurableSet::interval(gr, 0.25, 0.75);
        assert_eq!(a.intersection(&b).measure(), 0.25);
        assert_eq!(a.union(&b).measure(), 0.75);
        assert_eq!(MeasurableSet::full(gr).measure(), 1.0);
    }
}
