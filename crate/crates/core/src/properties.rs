//! Randomized invariants across modules, checked through the public API.

use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ergodic::{truncated_modulated_hilbert, FlowConfig, Observable};
use crate::kernels::{
    build_big_psi, build_d0, build_delta_k, build_psi0, dilate_kernel, make_chi_partition, make_psi,
    make_truncated_hilbert, make_zeta, psi_vmax, BAND_UNIT,
};
use crate::oscillation::{osc_kernel, sup_mod_osc};
use crate::signal::{dilate, hardy_littlewood_maximal, inner_product, lp_norm, modulate, translate};
use crate::tiles::{rectangles_intersect, tile_coefficients, tile_less, tiles_below, PacketBase};
use crate::{GridSpec, Kernel, Linearization, OscSpec, Polarity, Signal, Tile, Tree, C64};

fn grid(m: u32) -> GridSpec {
    GridSpec::new(m).unwrap()
}

fn random_signal(gr: GridSpec, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Signal::from_fn(gr, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn gaussian(gr: GridSpec, width: f64, center: f64) -> Signal {
    Signal::from_fn(gr, |x| {
        let y = if x >= 0.5 { x - 1.0 } else { x } - center;
        C64::new((-(y / width).powi(2)).exp(), 0.0)
    })
}

fn hilbert(gr: GridSpec) -> Kernel {
    make_truncated_hilbert(&make_zeta(1.0 / BAND_UNIT as f64, gr).unwrap()).unwrap()
}

fn d0_m9() -> &'static Kernel {
    static D0: OnceLock<Kernel> = OnceLock::new();
    D0.get_or_init(|| {
        let gr = grid(9);
        let psi = make_psi(8, gr).unwrap();
        let p0 = build_psi0(&build_big_psi(&psi, psi_vmax(gr).unwrap()).unwrap()).unwrap();
        build_d0(&hilbert(gr), &p0).unwrap().0
    })
}

fn kh_m8() -> &'static Kernel {
    static KH: OnceLock<Kernel> = OnceLock::new();
    KH.get_or_init(|| hilbert(grid(8)))
}

fn random_tile(gr: GridSpec, rng: &mut ChaCha8Rng) -> Tile {
    let m = gr.m() as i32;
    let j = rng.gen_range(-m..=0);
    Tile::new(gr, j, rng.gen_range(0..1 << -j), rng.gen_range(0..1 << (m + j))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn modulation_group_law(seed in any::<u64>(), a in -50.0..50.0f64, b in -50.0..50.0f64) {
        let f = random_signal(grid(8), seed);
        let two = modulate(&modulate(&f, a), b);
        prop_assert!(two.max_abs_diff(&modulate(&f, a + b)) < 1e-12);
    }

    #[test]
    fn modulation_translation_commutator(seed in any::<u64>(), k in -40i64..40, y in -1.0..1.0f64) {
        // Off-grid shifts are spectral, so keep the modulated spectrum away from Nyquist.
        let gr = grid(8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coef: Vec<C64> = (0..gr.len())
            .map(|i| if gr.bin(i).abs() <= 40 { C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { C64::new(0.0, 0.0) })
            .collect();
        let f = Signal::from_coefficients(gr, &coef).unwrap();
        let xi = 2.0 * PI * k as f64;
        let a = modulate(&translate(&f, y), xi);
        let b = translate(&modulate(&f, xi), y).scale(C64::from_polar(1.0, y * xi));
        prop_assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn dilation_group_law(s in 0.8..1.25f64, t in 0.8..1.25f64, c in -0.05..0.05f64, p in 1.0..4.0f64) {
        let f = gaussian(grid(10), 0.02, c);
        let two = dilate(&dilate(&f, s, p).unwrap(), t, p).unwrap();
        prop_assert!(two.max_abs_diff(&dilate(&f, s * t, p).unwrap()) < 1e-8);
    }

    #[test]
    fn parseval(a in any::<u64>(), b in any::<u64>()) {
        let gr = grid(9);
        let (f, g) = (random_signal(gr, a), random_signal(gr, b));
        let lhs = inner_product(&f, &g).unwrap();
        let rhs: C64 = f.spectrum().iter().zip(g.spectrum()).map(|(u, v)| u * v.conj()).sum();
        prop_assert!((lhs - rhs * gr.h() / gr.len() as f64).norm() < 1e-10);
    }

    #[test]
    fn maximal_weak_type(seed in any::<u64>(), p in 0.02..0.5f64) {
        let gr = grid(8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Signal::from_fn(gr, |_| {
            C64::new(if rng.gen_bool(p) { rng.gen_range(0.0..10.0) } else { 0.0 }, 0.0)
        });
        let l1 = lp_norm(&f, 1.0).unwrap();
        prop_assume!(l1 > 0.0);
        let mut vals: Vec<f64> = hardy_littlewood_maximal(&f).samples().iter().map(|v| v.re).collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // Just below vals[i], #{Mf > λ} = i + 1.
        let worst = vals.iter().enumerate().map(|(i, &lam)| (i + 1) as f64 * gr.h() * lam / l1).fold(0.0, f64::max);
        prop_assert!(worst <= 4.0, "weak type constant {}", worst);
    }

    #[test]
    fn kernel_dilation_is_symbol_dilation(which in 0usize..2, b in -128i64..=128) {
        let gr = grid(9);
        let k = if which == 0 { hilbert(gr) } else { make_psi(8, gr).unwrap() };
        let d = dilate_kernel(&k, 2.0, 1.0).unwrap();
        prop_assert!((d.symbol_at(b) - k.symbol_at(2 * b)).norm() < 1e-9);
    }

    #[test]
    fn delta_k_is_linear(re in -3.0..3.0f64, im in -3.0..3.0f64, k in -3i32..=5) {
        let d0 = d0_m9();
        let part = make_chi_partition(d0.grid());
        let a = C64::new(re, im);
        let x = build_delta_k(&d0.scale(a), &part, k).unwrap();
        let y = build_delta_k(d0, &part, k).unwrap().scale(a);
        for (u, v) in x.symbol().iter().zip(y.symbol()) {
            prop_assert!((u - v).norm() < 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn oscillation_is_sublinear(a in any::<u64>(), b in any::<u64>(), width in 1i64..4) {
        let gr = grid(8);
        let spec = OscSpec::uniform(1, 8, width).unwrap();
        let (f, g) = (random_signal(gr, a), random_signal(gr, b));
        let k = kh_m8();
        let fg = osc_kernel(k, &f.add(&g).unwrap(), &spec).unwrap();
        let of = osc_kernel(k, &f, &spec).unwrap();
        let og = osc_kernel(k, &g, &spec).unwrap();
        for i in 0..gr.len() {
            prop_assert!(fg.samples()[i].re <= of.samples()[i].re + og.samples()[i].re + 1e-12);
        }
        let zero = osc_kernel(&Kernel::delta(gr), &f, &spec).unwrap();
        prop_assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn sup_mod_osc_is_max_of_slices(seed in any::<u64>(), n0 in -20i64..20) {
        let gr = grid(7);
        let spec = OscSpec::uniform(1, 7, 2).unwrap();
        let k = hilbert(gr);
        let f = random_signal(gr, seed);
        let grid_n = [n0, n0 + 3, n0 + 11];
        let sup = sup_mod_osc(&k, &f, &spec, &grid_n).unwrap();
        let mut want = vec![0.0f64; gr.len()];
        for &n in &grid_n {
            // The spectral shift, so that both sides see identical spectra.
            let l = gr.len() as i64;
            let shifted: Vec<C64> = (0..l).map(|q| f.spectrum()[(q - n).rem_euclid(l) as usize]).collect();
            let modded = Signal::from_spectrum(gr, shifted).unwrap();
            prop_assert!(modded.max_abs_diff(&modulate(&f, 2.0 * PI * n as f64)) < 1e-12);
            let slice = osc_kernel(&k, &modded, &spec).unwrap();
            want.iter_mut().zip(slice.samples()).for_each(|(w, v)| *w = w.max(v.re));
        }
        for (s, w) in sup.samples().iter().zip(&want) {
            prop_assert_eq!(s.re, *w);
        }
    }

    #[test]
    fn order_iff_rectangles_meet(seed in any::<u64>(), m in 3u32..=9) {
        let gr = grid(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let a = random_tile(gr, &mut rng);
            // Half the partners are drawn below or above `a`, where comparability is likely.
            let b = if rng.gen_bool(0.5) {
                let pol = if rng.gen_bool(0.5) { Polarity::Plus } else { Polarity::Minus };
                *tiles_below(gr, &a, pol).choose(&mut rng).unwrap_or(&a)
            } else {
                random_tile(gr, &mut rng)
            };
            prop_assert_eq!(tile_less(&a, &b) || tile_less(&b, &a), rectangles_intersect(gr, &a, &b));
        }
    }

    #[test]
    fn minus_tree_upper_rectangles_disjoint(seed in any::<u64>()) {
        let gr = grid(7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = random_tile(gr, &mut rng);
        let members: Vec<Tile> = tiles_below(gr, &top, Polarity::Minus).into_iter().filter(|s| s != &top).collect();
        let upper = |s: &Tile| (s.samples(gr), 2 * s.omega_start() + s.width(), 2 * (s.omega_start() + s.width()));
        for (i, s) in members.iter().enumerate() {
            for s2 in &members[i + 1..] {
                let ((x, lx), f0, f1) = upper(s);
                let ((y, ly), g0, g1) = upper(s2);
                prop_assert!(!(x < y + ly && y < x + lx && f0 < g1 && g0 < f1), "{:?} {:?}", s, s2);
            }
        }
    }

    #[test]
    fn plus_tree_bessel(seed in any::<u64>()) {
        let gr = grid(7);
        let base = PacketBase::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = random_tile(gr, &mut rng);
        let tree = Tree::new(top, tiles_below(gr, &top, Polarity::Plus)).unwrap();
        let f = random_signal(gr, seed ^ 0x5eed);
        let s: f64 = tile_coefficients(&f, &tree.members, &base).iter().map(|c| c.norm_sqr()).sum();
        prop_assert!(s <= 2.0 * lp_norm(&f, 2.0).unwrap().powi(2));
    }

    #[test]
    fn one_block_per_tile_and_point(seed in any::<u64>()) {
        let gr = grid(7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lin = Linearization::random(gr, OscSpec::new(1, vec![-7, -4, -2, 1]).unwrap(), &mut rng).unwrap();
        for _ in 0..50 {
            let s = random_tile(gr, &mut rng);
            for x in 0..gr.len() {
                prop_assert!((0..lin.blocks()).filter(|&j| lin.selects(&s, j, x)).count() <= 1);
            }
        }
    }

    #[test]
    fn paired_quadrature_kills_even_integrands(x in 0.0..1.0f64, s in 1e-4..0.5f64, c in -5.0..5.0f64) {
        // A constant observable at θ = 0 makes the integrand even in t.
        let f = Observable::constant(1, C64::new(c, 1.0));
        let v = truncated_modulated_hilbert(&f, &FlowConfig::default(), &[x], 0.0, s, 16).unwrap();
        prop_assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn hilbert_quadrature_is_converged(x in 0.0..1.0f64, theta in -6.0..6.0f64, s in 1e-3..0.3f64) {
        let f = Observable::Trig(vec![
            crate::ergodic::Mode { freq: vec![1], coef: C64::new(1.0, 0.0) },
            crate::ergodic::Mode { freq: vec![-2], coef: C64::new(0.0, 0.5) },
        ]);
        let flow = FlowConfig::default();
        let a = truncated_modulated_hilbert(&f, &flow, &[x], theta, s, 64).unwrap();
        let b = truncated_modulated_hilbert(&f, &flow, &[x], theta, s, 128).unwrap();
        prop_assert!((a - b).norm() <= 1e-6);
    }
}
