//! Convolution kernels: the truncated Hilbert kernel, the ψ family, the
//! Littlewood–Paley pieces Δ_k, and the sharp-cutoff kernel J_H.
//!
//! A kernel stores spatial samples and its symbol `σ(k) = h·DFT(spatial)(k)`,
//! the Riemann sum of `∫ K(y) e^{-2πiky} dy`. Kernels built from a continuous
//! description keep it (see [`Shape`]) so that dilation is exact rather than
//! interpolated.

mod hilbert;
mod partition;
mod psi;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use hilbert::{
    hilbert_derivative_bound, hilbert_small_frequency_constant, make_sharp_hilbert,
    make_truncated_hilbert, make_zeta, sharp_hilbert_band_variation, verify_symbol_decay,
};
pub use partition::{build_delta_k, make_chi_partition, verify_delta_bounds, ChiPartition};
pub use psi::{
    big_psi_tail, build_big_psi, build_d0, build_psi0, make_psi, psi0_constant, psi_envelope_constants,
    psi_vmax,
    reflect_conj, BAND_UNIT,
};

use crate::error::{param, Error, Result};
use crate::fourier::{bin_index, fft, ifft};
use crate::signal::{dilate, GridSpec, Signal};
use crate::C64;

pub type Profile = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Continuous description a kernel was sampled from.
#[derive(Clone)]
pub enum Shape {
    /// Only the samples are known; dilation interpolates.
    Samples,
    /// Symbol `F(ξ)` as a function of a real bin. With `nyquist_avg` the
    /// `-L/2` bin holds `(F(-L/2) + F(L/2))/2`, otherwise `F(-L/2)`.
    Spectral { profile: Profile, nyquist_avg: bool },
    /// Spatial profile `g(y)` on `|y| < radius`.
    Spatial { profile: Profile, radius: f64 },
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Samples => write!(f, "Samples"),
            Shape::Spectral { nyquist_avg, .. } => write!(f, "Spectral(avg={nyquist_avg})"),
            Shape::Spatial { radius, .. } => write!(f, "Spatial(r={radius})"),
        }
    }
}

/// Metadata written next to serialized kernels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelMeta {
    pub name: String,
    pub nu: Option<f64>,
    /// Claimed frequency support in bins, inclusive.
    pub support: Option<(f64, f64)>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
}

impl KernelMeta {
    pub fn named(name: impl Into<String>) -> Self {
        KernelMeta { name: name.into(), ..Default::default() }
    }
}

/// Outcome of a decay or envelope check.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DecayReport {
    pub kernel: String,
    pub slope: f64,
    pub max_ratio: f64,
    pub range: (f64, f64),
    /// Fitted limiting constant, when one is estimated.
    pub estimate: Option<C64>,
    /// Extra named measurements.
    pub notes: Vec<(String, f64)>,
}

impl DecayReport {
    pub fn note(&self, key: &str) -> Option<f64> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Clone, Debug)]
pub struct Kernel {
    grid: GridSpec,
    spatial: Vec<C64>,
    symbol: Vec<C64>,
    meta: KernelMeta,
    shape: Shape,
}

impl Kernel {
    pub fn from_spatial(grid: GridSpec, spatial: Vec<C64>, meta: KernelMeta) -> Result<Self> {
        if spatial.len() != grid.len() {
            return param("spatial length mismatch");
        }
        let h = grid.h();
        let symbol = fft(&spatial).into_iter().map(|v| v * h).collect();
        Ok(Kernel { grid, spatial, symbol, meta, shape: Shape::Samples })
    }

    pub fn from_symbol(grid: GridSpec, symbol: Vec<C64>, meta: KernelMeta) -> Result<Self> {
        if symbol.len() != grid.len() {
            return param("symbol length mismatch");
        }
        // spatial = IFFT(symbol / h) / L, and h·L = 1.
        let spatial = ifft(&symbol);
        Ok(Kernel { grid, spatial, symbol, meta, shape: Shape::Samples })
    }

    /// Samples a symbol profile on the integer bins.
    pub fn from_profile(
        grid: GridSpec,
        profile: Profile,
        nyquist_avg: bool,
        meta: KernelMeta,
    ) -> Result<Self> {
        let l = grid.len();
        let half = (l / 2) as f64;
        let mut symbol: Vec<C64> = (0..l).map(|i| profile(grid.bin(i) as f64)).collect();
        if nyquist_avg {
            symbol[l / 2] = (profile(-half) + profile(half)) * 0.5;
        }
        let mut k = Self::from_symbol(grid, symbol, meta)?;
        k.shape = Shape::Spectral { profile, nyquist_avg };
        Ok(k)
    }

    /// Samples a spatial profile at the centered positions.
    pub fn from_spatial_profile(
        grid: GridSpec,
        profile: Profile,
        radius: f64,
        meta: KernelMeta,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius < 0.5) {
            return Err(Error::Domain(format!("radius {radius} outside (0, 1/2)")));
        }
        let spatial = (0..grid.len())
            .map(|n| {
                let y = grid.centered(n);
                if y.abs() < radius {
                    profile(y)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut k = Self::from_spatial(grid, spatial, meta)?;
        k.shape = Shape::Spatial { profile, radius };
        Ok(k)
    }

    /// Unit mass at the origin: one sample of height `1/h`, symbol ≡ 1.
    pub fn delta(grid: GridSpec) -> Self {
        let mut spatial = vec![C64::new(0.0, 0.0); grid.len()];
        spatial[0] = C64::new(grid.len() as f64, 0.0);
        Kernel {
            grid,
            spatial,
            symbol: vec![C64::new(1.0, 0.0); grid.len()],
            meta: KernelMeta::named("delta"),
            shape: Shape::Spectral { profile: Arc::new(|_| C64::new(1.0, 0.0)), nyquist_avg: false },
        }
    }

    pub fn zero(grid: GridSpec) -> Self {
        Kernel {
            grid,
            spatial: vec![C64::new(0.0, 0.0); grid.len()],
            symbol: vec![C64::new(0.0, 0.0); grid.len()],
            meta: KernelMeta::named("zero"),
            shape: Shape::Spectral { profile: Arc::new(|_| C64::new(0.0, 0.0)), nyquist_avg: false },
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn spatial(&self) -> &[C64] {
        &self.spatial
    }

    /// Symbol in FFT order.
    pub fn symbol(&self) -> &[C64] {
        &self.symbol
    }

    /// Symbol at an integer bin (reduced mod L).
    pub fn symbol_at(&self, bin: i64) -> C64 {
        self.symbol[bin_index(bin, self.grid.len())]
    }

    pub fn meta(&self) -> &KernelMeta {
        &self.meta
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn with_meta(mut self, meta: KernelMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.meta.name = name.to_string();
        self
    }

    pub fn as_signal(&self) -> Signal {
        Signal::from_samples(self.grid, self.spatial.clone()).expect("same length")
    }

    /// Evaluates the continuous symbol if known, else the sampled one.
    pub fn profile_at(&self, xi: f64) -> Option<C64> {
        match &self.shape {
            Shape::Spectral { profile, .. } => Some(profile(xi)),
            _ => None,
        }
    }

    pub fn scale(&self, c: C64) -> Kernel {
        let shape = match &self.shape {
            Shape::Samples => Shape::Samples,
            Shape::Spectral { profile, nyquist_avg } => {
                let p = profile.clone();
                Shape::Spectral { profile: Arc::new(move |x| p(x) * c), nyquist_avg: *nyquist_avg }
            }
            Shape::Spatial { profile, radius } => {
                let p = profile.clone();
                Shape::Spatial { profile: Arc::new(move |x| p(x) * c), radius: *radius }
            }
        };
        Kernel {
            grid: self.grid,
            spatial: self.spatial.iter().map(|v| v * c).collect(),
            symbol: self.symbol.iter().map(|v| v * c).collect(),
            meta: self.meta.clone(),
            shape,
        }
    }

    /// Sum of two kernels; the continuous description is dropped.
    pub fn add(&self, other: &Kernel) -> Result<Kernel> {
        self.grid.check_same(&other.grid)?;
        Ok(Kernel {
            grid: self.grid,
            spatial: self.spatial.iter().zip(&other.spatial).map(|(a, b)| a + b).collect(),
            symbol: self.symbol.iter().zip(&other.symbol).map(|(a, b)| a + b).collect(),
            meta: KernelMeta::named(format!("{}+{}", self.meta.name, other.meta.name)),
            shape: Shape::Samples,
        })
    }

    pub fn sub(&self, other: &Kernel) -> Result<Kernel> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Max relative deviation between the stored symbol and a fresh transform.
    pub fn symbol_consistency(&self) -> f64 {
        let h = self.grid.h();
        let fresh = fft(&self.spatial);
        let scale = self.symbol.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        self.symbol
            .iter()
            .zip(&fresh)
            .map(|(a, b)| (a - b * h).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Symbol mass outside the claimed support over total symbol mass.
    pub fn out_of_support_ratio(&self) -> f64 {
        let Some((lo, hi)) = self.meta.support else { return 0.0 };
        let mut out = 0.0;
        let mut total = 0.0;
        for (i, v) in self.symbol.iter().enumerate() {
            let b = self.grid.bin(i) as f64;
            let a = v.norm();
            total += a;
            if b < lo || b > hi {
                out += a;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            out / total
        }
    }
}

/// `Dil^{(p)}_s K`, i.e. `s^{-1/p} K(y/s)`, whose symbol is `s^{1-1/p} σ(sξ)`.
pub fn dilate_kernel(k: &Kernel, s: f64, p: f64) -> Result<Kernel> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("dilation factor must be positive, got {s}")));
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("exponent must be positive, got {p}")));
    }
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let meta = k.meta.clone();
    match &k.shape {
        Shape::Spectral { profile, nyquist_avg } => {
            let amp = s.powf(1.0 - inv_p);
            let p0 = profile.clone();
            let pr: Profile = Arc::new(move |x| p0(s * x) * amp);
            Kernel::from_profile(k.grid, pr, *nyquist_avg, meta)
        }
        Shape::Spatial { profile, radius } => {
            let amp = s.powf(-inv_p);
            let p0 = profile.clone();
            let pr: Profile = Arc::new(move |y| p0(y / s) * amp);
            Kernel::from_spatial_profile(k.grid, pr, radius * s, meta)
        }
        Shape::Samples => {
            // Spatial samples carry the 1/h scaling of a density; dilating the
            // sampled function with exponent p matches Dil^{(p)} directly.
            let g = dilate(&k.as_signal(), s, p)?;
            Kernel::from_spatial(k.grid, g.into_samples(), meta)
        }
    }
}
