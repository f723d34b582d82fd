//! Rotation flows `T_t x = x + tα (mod 1)` on the d-torus, truncated
//! modulated Hilbert averages, Wiener–Wintner averages, the discrete
//! modulated series and a convergence probe with closed-form oracles.
//!
//! Observables are closed-form callables (trigonometric polynomials or
//! boxes), so the flow can be sampled at any real time.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::numerics::{gauss_legendre, gl_integrate, sine_integral, KahanSum};
use crate::C64;

/// `(√5 - 1)/2`.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub alpha: Vec<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { alpha: vec![GOLDEN] }
    }
}

impl FlowConfig {
    pub fn rotation(alpha: f64) -> Self {
        FlowConfig { alpha: vec![alpha] }
    }

    pub fn product(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|a| !a.is_finite()) {
            return param("flow needs a finite frequency vector");
        }
        Ok(FlowConfig { alpha })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `T_t x`, reduced to `[0, 1)^d`.
    pub fn apply(&self, x: &[f64], t: f64) -> Vec<f64> {
        x.iter().zip(&self.alpha).map(|(xi, a)| (xi + t * a).rem_euclid(1.0)).collect()
    }
}

/// One Fourier mode `c·e^{2πi⟨n,x⟩}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub freq: Vec<i64>,
    pub coef: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Observable {
    Trig(Vec<Mode>),
    /// Indicator of the box `Π [a_i, b_i)` on the torus.
    Box(Vec<(f64, f64)>),
}

impl Observable {
    pub fn constant(dim: usize, c: C64) -> Self {
        Observable::Trig(vec![Mode { freq: vec![0; dim], coef: c }])
    }

    /// `e^{2πi⟨n,x⟩}`.
    pub fn character(freq: Vec<i64>) -> Self {
        Observable::Trig(vec![Mode { freq, coef: C64::new(1.0, 0.0) }])
    }

    pub fn conj(&self) -> Self {
        match self {
            Observable::Trig(modes) => Observable::Trig(
                modes
                    .iter()
                    .map(|m| Mode { freq: m.freq.iter().map(|n| -n).collect(), coef: m.coef.conj() })
                    .collect(),
            ),
            Observable::Box(b) => Observable::Box(b.clone()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        match self {
            Observable::Trig(modes) => modes.iter().map(|m| m.coef * C64::from_polar(1.0, 2.0 * PI * dot(&m.freq, x))).sum(),
            Observable::Box(b) => {
                let inside = b.iter().zip(x).all(|(&(lo, hi), &v)| {
                    let v = v.rem_euclid(1.0);
                    v >= lo && v < hi
                });
                C64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            }
        }
    }

    /// `f(T_t x)` without reducing the point, so phases stay exact for
    /// trigonometric polynomials.
    fn along(&self, flow: &FlowConfig, x: &[f64], t: f64) -> C64 {
        match self {
            Observable::Trig(modes) => modes
                .iter()
                .map(|m| {
                    let ph = dot(&m.freq, x) + t * dot(&m.freq, &flow.alpha);
                    m.coef * C64::from_polar(1.0, 2.0 * PI * ph.rem_euclid(1.0))
                })
                .sum(),
            Observable::Box(_) => self.eval(&flow.apply(x, t)),
        }
    }

    /// Angular frequencies `θ + 2π⟨n,α⟩` seen along the flow, with the
    /// mode coefficients (including the phase at `x`). `None` for boxes.
    fn spectrum(&self, flow: &FlowConfig, x: &[f64], theta: f64) -> Option<Vec<(f64, C64)>> {
        match self {
            Observable::Trig(modes) => Some(
                modes
                    .iter()
                    .map(|m| {
                        let beta = theta + 2.0 * PI * dot(&m.freq, &flow.alpha);
                        (beta, m.coef * C64::from_polar(1.0, 2.0 * PI * dot(&m.freq, x)))
                    })
                    .collect(),
            ),
            Observable::Box(_) => None,
        }
    }

    /// Bound on the angular frequency of `t ↦ e^{iθt} f(T_t x)`. Boxes are
    /// discontinuous; they get a nominal 16 crossings per unit of `|α|`.
    fn bandwidth(&self, flow: &FlowConfig, theta: f64) -> f64 {
        match self {
            Observable::Trig(modes) => modes
                .iter()
                .map(|m| (theta + 2.0 * PI * dot(&m.freq, &flow.alpha)).abs())
                .fold(theta.abs(), f64::max),
            Observable::Box(_) => theta.abs() + 2.0 * PI * 16.0 * flow.alpha.iter().map(|a| a.abs()).sum::<f64>(),
        }
    }
}

fn dot(n: &[i64], x: &[f64]) -> f64 {
    n.iter().zip(x).map(|(a, b)| *a as f64 * b).sum()
}

fn check_point(flow: &FlowConfig, f: &Observable, x: &[f64]) -> Result<()> {
    if x.len() != flow.dim() {
        return param(format!("point has dimension {}, flow has {}", x.len(), flow.dim()));
    }
    let d = match f {
        Observable::Trig(m) => m.iter().map(|m| m.freq.len()).max().unwrap_or(flow.dim()),
        Observable::Box(b) => b.len(),
    };
    if d != flow.dim() {
        return param(format!("observable has dimension {d}, flow has {}", flow.dim()));
    }
    Ok(())
}

/// `∫_{a<t<b} [e^{iθt} f(T_t x) - e^{-iθt} f(T_{-t} x)] dt/t` in `u = ln t`,
/// octave by octave: at least `q` Gauss nodes per octave, and at most half
/// an oscillation per panel.
fn paired_log_integral(f: &Observable, flow: &FlowConfig, x: &[f64], theta: f64, a: f64, b: f64, q: usize) -> C64 {
    let omega = f.bandwidth(flow, theta);
    let nodes = gauss_legendre();
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    let mut lo = a;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        let panels = (q.div_ceil(nodes.len())).max((omega * hi / PI).ceil() as usize).max(1);
        let (ul, uh) = (lo.ln(), hi.ln());
        let w = (uh - ul) / panels as f64;
        for p in 0..panels {
            let mid = ul + (p as f64 + 0.5) * w;
            let mut s = C64::new(0.0, 0.0);
            for &(z, wt) in nodes {
                let t = (mid + 0.5 * w * z).exp();
                let fwd = C64::from_polar(1.0, theta * t) * f.along(flow, x, t);
                let bwd = C64::from_polar(1.0, -theta * t) * f.along(flow, x, -t);
                s += (fwd - bwd) * wt;
            }
            s *= 0.5 * w;
            re.add(s.re);
            im.add(s.im);
        }
        lo = hi;
    }
    C64::new(re.value(), im.value())
}

pub const DEFAULT_NODES_PER_OCTAVE: usize = 64;

/// `∫_{s<|t|<1/s} e^{iθt} f(T_t x) dt/t`, pairing `t` with `-t`.
pub fn truncated_modulated_hilbert(
    f: &Observable,
    flow: &FlowConfig,
    x: &[f64],
    theta: f64,
    s: f64,
    q: usize,
) -> Result<C64> {
    check_point(flow, f, x)?;
    if !(s > 0.0 && s < 1.0) {
        return param(format!("truncation s = {s} must lie in (0, 1)"));
    }
    if q == 0 {
        return param("need at least one node per octave");
    }
    Ok(paired_log_integral(f, flow, x, theta, s, 1.0 / s, q))
}

/// Closed form of the truncated integral for a trigonometric polynomial:
/// each mode contributes `c·e^{2πi⟨n,x⟩}·2i·sgn(β)(Si(|β|/s) - Si(|β|s))`.
pub fn hilbert_closed_form(f: &Observable, flow: &FlowConfig, x: &[f64], theta: f64, s: f64) -> Option<C64> {
    let spec = f.spectrum(flow, x, theta)?;
    Some(
        spec.iter()
            .map(|&(beta, c)| c * C64::new(0.0, 2.0) * (sine_integral(beta / s) - sine_integral(beta * s)))
            .sum(),
    )
}

/// The `s → 0` limit `iπ Σ c·sgn(β)·e^{2πi⟨n,x⟩}` (modes with `β = 0`
/// contribute 0).
pub fn hilbert_limit(f: &Observable, flow: &FlowConfig, x: &[f64], theta: f64) -> Option<C64> {
    let spec = f.spectrum(flow, x, theta)?;
    Some(spec.iter().map(|&(beta, c)| c * C64::new(0.0, PI * sgn(beta))).sum())
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `s^{-1} ∫_{-s}^{s} e^{iθt} f(T_t x) dt` on uniform Gauss panels.
pub fn ww_average(f: &Observable, flow: &FlowConfig, x: &[f64], theta: f64, s: f64) -> Result<C64> {
    check_point(flow, f, x)?;
    if !(s > 0.0) || !s.is_finite() {
        return param(format!("window s = {s} must be positive"));
    }
    let omega = f.bandwidth(flow, theta);
    let panels = ((omega * 2.0 * s / PI).ceil() as usize).max(16);
    let re = gl_integrate(|t| (C64::from_polar(1.0, theta * t) * f.along(flow, x, t)).re, -s, s, panels);
    let im = gl_integrate(|t| (C64::from_polar(1.0, theta * t) * f.along(flow, x, t)).im, -s, s, panels);
    Ok(C64::new(re, im) / s)
}

/// Closed form of [`ww_average`] for trigonometric polynomials:
/// `Σ c·e^{2πi⟨n,x⟩}·2 sin(βs)/(βs)`.
pub fn ww_closed_form(f: &Observable, flow: &FlowConfig, x: &[f64], theta: f64, s: f64) -> Option<C64> {
    let spec = f.spectrum(flow, x, theta)?;
    Some(
        spec.iter()
            .map(|&(beta, c)| {
                let bs = beta * s;
                let sinc = if bs == 0.0 { 1.0 } else { bs.sin() / bs };
                c * 2.0 * sinc
            })
            .sum(),
    )
}

/// `Σ_{0<|k|<N} e^{iθk} f(T^k x)/k` with `T` the time-one map, `±k` paired
/// and compensated sums.
pub fn discrete_modulated_series(f: &Observable, flow: &FlowConfig, x: &[f64], theta: f64, n: u64) -> Result<C64> {
    check_point(flow, f, x)?;
    if n < 2 {
        return param(format!("N = {n} must be at least 2"));
    }
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for k in 1..n {
        let t = k as f64;
        let fwd = C64::from_polar(1.0, (theta * t).rem_euclid(2.0 * PI)) * f.along(flow, x, t);
        let bwd = C64::from_polar(1.0, (-theta * t).rem_euclid(2.0 * PI)) * f.along(flow, x, -t);
        let v = (fwd - bwd) / t;
        re.add(v.re);
        im.add(v.im);
    }
    Ok(C64::new(re.value(), im.value()))
}

/// Partial sawtooth `Σ_{k=1}^{N-1} sin(kγ)/k`, computed as
/// `∫_0^γ (D(t) - 1/2) dt` with `D(t) = sin((N - 1/2)t)/(2 sin(t/2))`,
/// after reducing `γ` to `(-π, π]`.
pub fn sawtooth_partial(gamma: f64, n: u64) -> f64 {
    let g = gamma.rem_euclid(2.0 * PI);
    let g = if g > PI { g - 2.0 * PI } else { g };
    if g == 0.0 {
        return 0.0;
    }
    let a = n as f64 - 0.5;
    let kernel = |t: f64| {
        let s = (0.5 * t).sin();
        if s.abs() < 1e-8 {
            // sin(at)/(2 sin(t/2)) → a near 0.
            a - 0.5
        } else {
            (a * t).sin() / (2.0 * s) - 0.5
        }
    };
    let panels = ((a * g.abs() / PI).ceil() as usize).max(8) * 2;
    gl_integrate(kernel, 0.0, g, panels)
}

/// Oracle for [`discrete_modulated_series`] on trigonometric polynomials:
/// `Σ c·e^{2πi⟨n,x⟩}·2i·S_N(θ + 2π⟨n,α⟩)`.
pub fn series_closed_form(f: &Observable, flow: &FlowConfig, x: &[f64], theta: f64, n: u64) -> Option<C64> {
    let spec = f.spectrum(flow, x, theta)?;
    Some(spec.iter().map(|&(beta, c)| c * C64::new(0.0, 2.0 * sawtooth_partial(beta, n))).sum())
}

/// `T^{-1} ∫_0^T f(T_t x) dt` by the midpoint rule.
pub fn time_average(f: &Observable, flow: &FlowConfig, x: &[f64], horizon: f64, steps: usize) -> Result<C64> {
    check_point(flow, f, x)?;
    if !(horizon > 0.0) || steps == 0 {
        return param("need a positive horizon and steps");
    }
    let dt = horizon / steps as f64;
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for i in 0..steps {
        let v = f.along(flow, x, (i as f64 + 0.5) * dt);
        re.add(v.re);
        im.add(v.im);
    }
    Ok(C64::new(re.value(), im.value()) / steps as f64)
}

/// Geometric truncations `s_i = 2^{-i}`, `i = 1..=depth`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationLadder {
    pub depth: u32,
    pub q: usize,
}

impl TruncationLadder {
    pub fn new(depth: u32) -> Self {
        TruncationLadder { depth, q: DEFAULT_NODES_PER_OCTAVE }
    }

    pub fn values(&self) -> Vec<f64> {
        (1..=self.depth).map(|i| 0.5f64.powi(i as i32)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub x: Vec<f64>,
    pub theta: f64,
    pub block: usize,
    /// `|V(s_{b+1}) - V(s_b)|`.
    pub gap: f64,
    /// `|V(s_{b+1}) - closed form|` for trigonometric polynomials.
    pub closed_form_err: Option<f64>,
    pub resonant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    /// Per point, per block: sup of the gap over non-resonant `θ`.
    pub block_max: Vec<Vec<f64>>,
    pub resonant_thetas: Vec<f64>,
    /// Largest error to the finite-`s` closed form over all rows.
    pub max_closed_form_err: Option<f64>,
    /// Largest distance of the deepest truncation to the `s → 0` limit over
    /// non-resonant `θ`.
    pub final_limit_err: Option<f64>,
}

impl ProbeReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.block_max.iter().all(|b| b.windows(2).all(|w| w[1] < w[0]))
    }

    /// Decreasing from the second block on.
    pub fn decreasing_after_first(&self) -> bool {
        self.block_max.iter().all(|b| b.windows(2).skip(1).all(|w| w[1] <= w[0]))
    }
}

/// Default half-width of the excluded neighbourhood of a resonance `β = 0`.
pub const RESONANCE_EXCLUSION: f64 = 0.5;

/// Successive-truncation gaps over the ladder for every `(x, θ)`. A `θ` with
/// some mode at `|θ + 2π⟨n,α⟩| < exclusion` is flagged resonant: its rows
/// are kept but it does not enter `block_max`.
pub fn convergence_probe(
    f: &Observable,
    flow: &FlowConfig,
    x_grid: &[Vec<f64>],
    theta_grid: &[f64],
    ladder: &TruncationLadder,
    exclusion: f64,
) -> Result<ProbeReport> {
    if ladder.depth < 3 {
        return param(format!("ladder depth {} must be at least 3", ladder.depth));
    }
    for x in x_grid {
        check_point(flow, f, x)?;
    }
    let s = ladder.values();
    let resonant = |theta: f64| match f.spectrum(flow, &x_grid.first().cloned().unwrap_or_default(), theta) {
        Some(spec) => spec.iter().any(|&(beta, c)| c.norm() > 0.0 && beta.abs() < exclusion),
        None => false,
    };
    let jobs: Vec<(usize, f64)> = (0..x_grid.len()).flat_map(|i| theta_grid.iter().map(move |&t| (i, t))).collect();
    // Annuli s_{i+1} < t < s_i and 1/s_i < t < 1/s_{i+1} extend each value to the next.
    let per_job: Vec<(Vec<C64>, bool)> = jobs
        .par_iter()
        .map(|&(i, theta)| {
            let x = &x_grid[i];
            let mut v = paired_log_integral(f, flow, x, theta, s[0], 1.0 / s[0], ladder.q);
            let mut vals = vec![v];
            for w in s.windows(2) {
                v += paired_log_integral(f, flow, x, theta, w[1], w[0], ladder.q);
                v += paired_log_integral(f, flow, x, theta, 1.0 / w[0], 1.0 / w[1], ladder.q);
                vals.push(v);
            }
            (vals, resonant(theta))
        })
        .collect();

    let blocks = s.len() - 1;
    let mut rows = Vec::new();
    let mut block_max = vec![vec![0.0; blocks]; x_grid.len()];
    let mut max_cf: Option<f64> = None;
    let mut final_err: Option<f64> = None;
    for (&(i, theta), (vals, res)) in jobs.iter().zip(&per_job) {
        let x = &x_grid[i];
        for b in 0..blocks {
            let gap = (vals[b + 1] - vals[b]).norm();
            let cf = hilbert_closed_form(f, flow, x, theta, s[b + 1]).map(|c| (vals[b + 1] - c).norm());
            if let Some(e) = cf {
                max_cf = Some(max_cf.map_or(e, |m: f64| m.max(e)));
            }
            if !res {
                block_max[i][b] = f64::max(block_max[i][b], gap);
            }
            rows.push(ProbeRow { x: x.clone(), theta, block: b, gap, closed_form_err: cf, resonant: *res });
        }
        if !res {
            if let Some(lim) = hilbert_limit(f, flow, x, theta) {
                let e = (vals[blocks] - lim).norm();
                final_err = Some(final_err.map_or(e, |m: f64| m.max(e)));
            }
        }
    }
    let mut resonant_thetas: Vec<f64> = theta_grid.iter().copied().filter(|&t| resonant(t)).collect();
    resonant_thetas.dedup();
    Ok(ProbeReport { rows, block_max, resonant_thetas, max_closed_form_err: max_cf, final_limit_err: final_err })
}

/// `n` evenly spaced values over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Observable {
        Observable::character(vec![1])
    }

    #[test]
    fn constant_pairs_to_zero() {
        let flow = FlowConfig::default();
        let one = Observable::constant(1, C64::new(1.0, 0.0));
        let v = truncated_modulated_hilbert(&one, &flow, &[0.3], 0.0, 1e-3, 64).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
        let s = discrete_modulated_series(&one, &flow, &[0.3], 0.0, 1000).unwrap();
        assert_eq!(s, C64::new(0.0, 0.0));
    }

    #[test]
    fn validation() {
        let flow = FlowConfig::default();
        assert!(truncated_modulated_hilbert(&e1(), &flow, &[0.0], 1.0, 1.0, 64).is_err());
        assert!(truncated_modulated_hilbert(&e1(), &flow, &[0.0, 0.1], 1.0, 0.1, 64).is_err());
        assert!(discrete_modulated_series(&e1(), &flow, &[0.0], 1.0, 1).is_err());
        assert!(ww_average(&e1(), &flow, &[0.0], 1.0, 0.0).is_err());
        assert!(FlowConfig::product(vec![]).is_err());
        let lad = TruncationLadder::new(2);
        assert!(convergence_probe(&e1(), &flow, &[vec![0.0]], &[1.0], &lad, 0.5).is_err());
    }

    #[test]
    fn hilbert_matches_si_closed_form() {
        let flow = FlowConfig::default();
        for (x, theta, s) in [(0.0, 1.0, 1e-3), (0.37, -2.0, 0.01), (0.8, 5.0, 0.25)] {
            let v = truncated_modulated_hilbert(&e1(), &flow, &[x], theta, s, 64).unwrap();
            let c = hilbert_closed_form(&e1(), &flow, &[x], theta, s).unwrap();
            assert!((v - c).norm() < 1e-9, "{v} {c}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let flow = FlowConfig::default();
        let f = Observable::Trig(vec![
            Mode { freq: vec![1], coef: C64::new(0.5, 0.2) },
            Mode { freq: vec![-2], coef: C64::new(0.1, -0.7) },
        ]);
        let v = truncated_modulated_hilbert(&f, &flow, &[0.21], 1.5, 0.01, 64).unwrap();
        let w = truncated_modulated_hilbert(&f.conj(), &flow, &[0.21], -1.5, 0.01, 64).unwrap();
        assert!((v.conj() - w).norm() < 1e-12);
    }

    #[test]
    fn quadrature_cauchy_in_q() {
        let flow = FlowConfig::default();
        let f = Observable::Trig(vec![
            Mode { freq: vec![1], coef: C64::new(1.0, 0.0) },
            Mode { freq: vec![2], coef: C64::new(0.0, 0.5) },
        ]);
        let a = truncated_modulated_hilbert(&f, &flow, &[0.4], 0.7, 1e-3, 64).unwrap();
        let b = truncated_modulated_hilbert(&f, &flow, &[0.4], 0.7, 1e-3, 128).unwrap();
        assert!((a - b).norm() <= 1e-6);
    }

    #[test]
    fn ww_average_oracles() {
        let flow = FlowConfig::default();
        let one = Observable::constant(1, C64::new(1.0, 0.0));
        let v = ww_average(&one, &flow, &[0.5], 0.0, 3.0).unwrap();
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-13);
        for (x, theta, s) in [(0.1, 1.0, 0.5), (0.6, -0.3, 7.0), (0.0, 2.0, 300.0)] {
            let v = ww_average(&e1(), &flow, &[x], theta, s).unwrap();
            let c = ww_closed_form(&e1(), &flow, &[x], theta, s).unwrap();
            assert!((v - c).norm() < 1e-6);
        }
        // s → ∞ at rate 1/s: s·|value| stays below 2/|β|.
        let beta = 1.0 + 2.0 * PI * GOLDEN;
        for s in [10.0, 100.0, 1000.0, 10000.0] {
            let v = ww_average(&e1(), &flow, &[0.2], 1.0, s).unwrap();
            assert!(v.norm() * s <= 2.0 / beta + 1e-6);
        }
    }

    #[test]
    fn series_matches_sawtooth() {
        let flow = FlowConfig::default();
        let one = Observable::constant(1, C64::new(1.0, 0.0));
        for theta in [0.3, 2.0, -1.1] {
            let v = discrete_modulated_series(&one, &flow, &[0.0], theta, 500).unwrap();
            let direct: f64 = (1..500).map(|k| (theta * k as f64).sin() / k as f64).sum();
            assert!((v - C64::new(0.0, 2.0 * direct)).norm() < 1e-12);
        }
        for (x, theta) in [(0.0, 1.0), (0.33, -2.5), (0.9, 4.0)] {
            let v = discrete_modulated_series(&e1(), &flow, &[x], theta, 2000).unwrap();
            let c = series_closed_form(&e1(), &flow, &[x], theta, 2000).unwrap();
            assert!((v - c).norm() < 1e-8, "{v} {c}");
        }
    }

    #[test]
    fn sawtooth_limit() {
        // Σ sin(kγ)/k → (π - γ)/2 on (0, 2π).
        for g in [0.5, 2.0, 4.0] {
            assert!((sawtooth_partial(g, 100_000) - (PI - g) / 2.0).abs() < 1e-4);
        }
        assert_eq!(sawtooth_partial(0.0, 10), 0.0);
    }

    #[test]
    fn measure_preservation() {
        let flow = FlowConfig::default();
        let a = Observable::Box(vec![(0.2, 0.45)]);
        for x in [0.0, 0.31, 0.77] {
            let v = time_average(&a, &flow, &[x], 2000.0, 400_000).unwrap();
            assert!((v.re - 0.25).abs() < 2e-3, "{v}");
        }
        let flow2 = FlowConfig::product(vec![GOLDEN, 2f64.sqrt() - 1.0]).unwrap();
        let b = Observable::Box(vec![(0.0, 0.5), (0.25, 0.75)]);
        let v = time_average(&b, &flow2, &[0.1, 0.2], 4000.0, 800_000).unwrap();
        assert!((v.re - 0.25).abs() < 5e-3, "{v}");
    }

    #[test]
    fn probe_decreases_away_from_resonance() {
        let flow = FlowConfig::default();
        let thetas = linspace(-8.0, 8.0, 16);
        let r = convergence_probe(&e1(), &flow, &[vec![0.0]], &thetas, &TruncationLadder::new(6), RESONANCE_EXCLUSION)
            .unwrap();
        assert!(r.strictly_decreasing(), "{:?}", r.block_max);
        assert!(r.max_closed_form_err.unwrap() < 1e-8);
        assert_eq!(r.rows.len(), 16 * 5);
    }

    #[test]
    fn probe_flags_resonance() {
        let flow = FlowConfig::default();
        let res = -2.0 * PI * GOLDEN;
        let r = convergence_probe(&e1(), &flow, &[vec![0.1]], &[res, 1.0], &TruncationLadder::new(4), 0.5).unwrap();
        assert_eq!(r.resonant_thetas, vec![res]);
        assert!(r.rows.iter().filter(|row| row.resonant).all(|row| row.gap < 1e-12));
        let one = Observable::constant(1, C64::new(1.0, 0.0));
        let r = convergence_probe(&one, &flow, &[vec![0.1]], &[0.0], &TruncationLadder::new(4), 0.5).unwrap();
        assert!(r.rows.iter().all(|row| row.gap <= 1e-10));
    }

    #[test]
    fn degree_two_probe_converges() {
        let flow = FlowConfig::default();
        let f = Observable::Trig(vec![
            Mode { freq: vec![1], coef: C64::new(1.0, 0.0) },
            Mode { freq: vec![2], coef: C64::new(0.5, 0.0) },
        ]);
        let thetas = linspace(-1.0, 1.0, 5);
        let r = convergence_probe(&f, &flow, &[vec![0.25]], &thetas, &TruncationLadder::new(13), 0.5).unwrap();
        assert!(r.decreasing_after_first(), "{:?}", r.block_max);
        assert!(r.final_limit_err.unwrap() <= 5e-3, "{:?}", r.final_limit_err);
    }
}
