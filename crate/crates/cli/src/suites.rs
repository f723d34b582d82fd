//! The experiment suites. Each one only composes `tilewave` operations and
//! records every checked quantity as a CSV row.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tilewave::averaging::{beta_dilation_deviation, extract_beta, verify_beta, AveragingConfig};
use tilewave::ergodic::{convergence_probe, linspace, FlowConfig, Mode, Observable, TruncationLadder, RESONANCE_EXCLUSION};
use tilewave::kernels::{
    build_big_psi, build_d0, build_delta_k, build_psi0, make_chi_partition, make_psi, make_sharp_hilbert,
    make_truncated_hilbert, make_zeta, psi_vmax, reflect_conj, verify_delta_bounds, verify_symbol_decay, BAND_UNIT,
};
use tilewave::numerics::slope;
use tilewave::oscillation::{osc_dense, sup_mod_osc};
use tilewave::signal::lp_norm;
use tilewave::tiles::{
    bilinear_form, density_split, generate_universe, size, size_split, tiles_below, tree_sum, DensityTable, PacketBase,
};
use tilewave::{DensePartition, GridSpec, Kernel, Linearization, MeasurableSet, OscSpec, Polarity, Signal, Tile, Tree, C64};

use crate::config::Resolved;
use crate::report::{num, Outcome, Plot, Series, Table};

pub fn run_suite(r: &Resolved) -> Result<Outcome> {
    match r.suite.as_str() {
        "kernels-verify" => kernels_verify(r),
        "osc-bench" => osc_bench(r),
        "tiles-decompose" => tiles_decompose(r),
        "tree-lemma" => tree_lemma(r),
        "bilinear" => bilinear(r),
        "averaging-beta" => averaging_beta(r),
        "ergodic-probe" => ergodic_probe(r),
        "conjecture-jh" => conjecture_jh(r),
        other => bail!("unknown suite {other:?}"),
    }
}

/// Independent stream per instance, fixed by the base seed.
fn rng_for(seed: u64, instance: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance as u64);
    rng
}

fn random_signal(gr: GridSpec, rng: &mut ChaCha8Rng) -> Signal {
    Signal::from_fn(gr, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_subset(gr: GridSpec, count: usize, rng: &mut ChaCha8Rng) -> MeasurableSet {
    let mut idx: Vec<usize> = (0..gr.len()).collect();
    idx.shuffle(rng);
    MeasurableSet::from_indices(gr, idx.into_iter().take(count.clamp(1, gr.len())))
}

fn packet_base(r: &Resolved) -> Result<PacketBase> {
    Ok(PacketBase::new(r.nu())?)
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn kernels_verify(r: &Resolved) -> Result<Outcome> {
    let m = r.grid_m(12);
    let gr = GridSpec::new(m)?;
    let kh = make_truncated_hilbert(&make_zeta(1.0 / BAND_UNIT as f64, gr)?)?;
    let psi = make_psi(r.nu().round() as u32, gr)?;
    let p0 = build_psi0(&build_big_psi(&psi, psi_vmax(gr)?)?)?;
    let (d0, c) = build_d0(&kh, &p0)?;
    let part = make_chi_partition(gr);
    let (k0, k1) = part.k_range();
    let (lo, hi) = r.cfg.k_range.unwrap_or((-5, 5));
    let (lo, hi) = (lo.max(k0), hi.min(k1));
    if lo > hi {
        bail!("k_range [{lo}, {hi}] empty on this grid (available {k0}..={k1})");
    }
    let fam: Vec<(i32, Kernel)> = (lo..=hi).map(|k| Ok((k, build_delta_k(&d0, &part, k)?))).collect::<Result<_>>()?;
    let reps = verify_delta_bounds(&fam, r.nu())?;
    let decay = verify_symbol_decay(&kh)?;
    let (s_lo, s_hi) = r.cfg.slope_band.unwrap_or((-1.3, -0.8));

    let mut out = Outcome::new(Table::new(&["check", "k", "value", "bound", "pass"]));
    let row = |out: &mut Outcome, check: &str, k: String, value: f64, bound: String, ok: bool| {
        let i = out.table.push(vec![check.into(), k, num(value), bound.clone(), flag(ok)]);
        out.check(ok, i, || format!("{check} = {value} violates {bound}"));
    };
    let sl = decay.slope;
    row(&mut out, "symbol_slope", String::new(), sl, format!("[{s_lo}, {s_hi}]"), sl >= s_lo && sl <= s_hi);
    let im_c = decay.note("im_c").unwrap_or(f64::NAN);
    let re_c = decay.note("re_c").unwrap_or(f64::NAN);
    let rel = (im_c - PI).abs() / PI;
    row(&mut out, "c_imag_rel_err", String::new(), rel, "0.05".into(), rel <= 0.05);
    row(&mut out, "c_real_abs", String::new(), re_c.abs(), "0.001".into(), re_c.abs() <= 1e-3);
    let mut pts = Vec::new();
    for (k, rep) in (lo..=hi).zip(&reps) {
        let oob = rep.note("out_of_band").unwrap_or(f64::NAN);
        row(&mut out, "delta_out_of_band", k.to_string(), oob, "1e-8".into(), oob <= 1e-8);
        let v = rep.note("log2_sup_plus_abs_k").unwrap_or(f64::NAN);
        row(&mut out, "delta_log2_sup_plus_abs_k", k.to_string(), v, "4".into(), v <= 4.0);
        pts.push((k as f64, v));
    }
    let back = d0.add(&p0.sub(&reflect_conj(&p0))?.scale(c))?;
    let e1 = back.spatial().iter().zip(kh.spatial()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    row(&mut out, "reconstruction_kh", String::new(), e1, "1e-9".into(), e1 <= 1e-9);
    let mut acc = vec![C64::new(0.0, 0.0); gr.len()];
    for k in k0..=k1 {
        let dk = build_delta_k(&d0, &part, k)?;
        acc.iter_mut().zip(dk.symbol()).for_each(|(a, v)| *a += v);
    }
    let e2 = (1..gr.len()).map(|i| (acc[i] - d0.symbol()[i]).norm()).fold(0.0, f64::max);
    row(&mut out, "reconstruction_delta_sum", String::new(), e2, "1e-9".into(), e2 <= 1e-9);
    out.plot = Some(Plot {
        title: format!("Δ_k symbol size, m = {m}"),
        x_label: "k".into(),
        y_label: "log2 sup|Δ̂_k| + |k|".into(),
        series: vec![Series { name: "measured".into(), points: pts }],
    });
    Ok(out)
}

fn osc_bench(r: &Resolved) -> Result<Outcome> {
    let m = r.grid_m(10);
    let gr = GridSpec::new(m)?;
    let deltas = r.cfg.deltas.clone().unwrap_or_else(|| vec![0.25, 1.0 / 16.0, 1.0 / 64.0]);
    if deltas.len() < 2 || deltas.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
        bail!("deltas must hold at least two values in (0, 1]");
    }
    let dmin = deltas.iter().cloned().fold(1.0, f64::min);
    let level = ((1.0 / dmin).log2().ceil() as u32).min(m);
    let spec = OscSpec::uniform(1, m, 3)?;
    let n = r.instances(10);
    let bound = r.cfg.bound.unwrap_or(1.0);
    let per: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(r.seed, i);
            let f = random_signal(gr, &mut rng);
            let nf = lp_norm(&f, 2.0)?;
            deltas
                .iter()
                .map(|&d| {
                    let part = DensePartition::random(gr, level, d, &mut rng)?;
                    Ok(lp_norm(&osc_dense(&f, &spec, &part)?, 2.0)? / (d.sqrt() * nf))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let mut out = Outcome::new(Table::new(&["operator", "p", "delta", "ratio", "grid_m", "seed", "instance"]));
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let mut slopes = Vec::new();
    for (i, ratios) in per.iter().enumerate() {
        for (&d, &q) in deltas.iter().zip(ratios) {
            let row = out.table.push(vec![
                "osc_dense".into(),
                "2".into(),
                num(d),
                num(q),
                m.to_string(),
                r.seed.to_string(),
                i.to_string(),
            ]);
            out.check(q <= bound, row, || format!("ratio {q} exceeds the pinned bound {bound}"));
        }
        // ln(‖Osc‖/‖f‖) = ln(ratio) + ln(δ)/2.
        let ys: Vec<f64> = ratios.iter().zip(&deltas).map(|(q, d)| q.ln() + 0.5 * d.ln()).collect();
        slopes.push(slope(&xs, &ys));
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let row = out.table.push(vec![
        "osc_dense_mean_slope".into(),
        "2".into(),
        String::new(),
        num(mean),
        m.to_string(),
        r.seed.to_string(),
        String::new(),
    ]);
    out.check((mean - 0.5).abs() <= 0.15, row, || format!("mean slope {mean} outside 0.5 ± 0.15"));
    let pick = |f: fn(f64, f64) -> f64, init: f64| -> Vec<(f64, f64)> {
        deltas.iter().enumerate().map(|(j, d)| (d.log2(), per.iter().map(|v| v[j]).fold(init, f))).collect()
    };
    out.plot = Some(Plot {
        title: format!("‖Osc_δ f‖₂ / (√δ‖f‖₂), m = {m}"),
        x_label: "log2 δ".into(),
        y_label: "ratio".into(),
        series: vec![
            Series { name: "max".into(), points: pick(f64::max, f64::NEG_INFINITY) },
            Series { name: "min".into(), points: pick(f64::min, f64::INFINITY) },
        ],
    });
    Ok(out)
}

struct TileInstance {
    gr: GridSpec,
    g_set: MeasurableSet,
    h_set: MeasurableSet,
    lin: Linearization,
    table: DensityTable,
}

fn tile_instance(gr: GridSpec, nu: f64, g_count: usize, h_count: usize, rng: &mut ChaCha8Rng) -> Result<TileInstance> {
    let m = gr.m() as i64;
    let g_set = random_subset(gr, g_count, rng);
    let h_set = random_subset(gr, h_count, rng);
    let lin = Linearization::random(gr, OscSpec::new(1, vec![-m, -5.min(m - 1), -2, 1])?, rng)?;
    let table = DensityTable::new(gr, &h_set, &lin.n_of_x, nu)?;
    Ok(TileInstance { gr, g_set, h_set, lin, table })
}

struct SplitRow {
    tiles: usize,
    delta: f64,
    light_dense: f64,
    sigma: f64,
    small_size: f64,
    density_count: f64,
    density_constant: f64,
    size_count: f64,
    size_constant: f64,
}

fn tiles_decompose(r: &Resolved) -> Result<Outcome> {
    let gr = GridSpec::new(r.grid_m(8))?;
    let base = packet_base(r)?;
    let n = r.instances(50);
    let len = gr.len();
    let universe = generate_universe(gr, None);
    let rows: Vec<SplitRow> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(r.seed, i);
            let (gc, hc) = (rng.gen_range(len / 16..len / 2), rng.gen_range(len / 16..len / 2));
            let inst = tile_instance(gr, r.nu(), gc, hc, &mut rng)?;
            let mut pool = universe.clone();
            pool.shuffle(&mut rng);
            pool.truncate(rng.gen_range(universe.len() / 10..universe.len() / 4));
            let delta = inst.table.dense_of(&pool);
            let (heavy, light) = density_split(&pool, &inst.table, inst.h_set.measure(), delta)?;
            let fg = Signal::indicator(&inst.g_set);
            let sigma = size(&pool, &fg, &base)?.0;
            let (big, small) = size_split(&pool, &fg, &base)?;
            Ok(SplitRow {
                tiles: pool.len(),
                delta,
                light_dense: if light.is_empty() { 0.0 } else { inst.table.dense_of(&light) },
                sigma,
                small_size: if small.is_empty() { 0.0 } else { size(&small, &fg, &base)?.0 },
                density_count: heavy.count,
                density_constant: heavy.constant,
                size_count: big.count,
                size_constant: big.constant,
            })
        })
        .collect::<Result<_>>()?;

    let mut out = Outcome::new(Table::new(&[
        "instance",
        "tiles",
        "delta",
        "light_dense",
        "sigma",
        "small_size",
        "density_count",
        "density_constant",
        "size_count",
        "size_constant",
        "running_c",
    ]));
    let mut running: f64 = 0.0;
    let mut curve = Vec::new();
    for (i, s) in rows.iter().enumerate() {
        running = running.max(s.density_constant).max(s.size_constant);
        curve.push(((i + 1) as f64, running));
        let row = out.table.push(vec![
            i.to_string(),
            s.tiles.to_string(),
            num(s.delta),
            num(s.light_dense),
            num(s.sigma),
            num(s.small_size),
            num(s.density_count),
            num(s.density_constant),
            num(s.size_count),
            num(s.size_constant),
            num(running),
        ]);
        out.check(s.light_dense < 0.5 * s.delta || s.delta == 0.0, row, || {
            format!("dense(light) = {} not below Δ/2 = {}", s.light_dense, 0.5 * s.delta)
        });
        out.check(s.small_size < 0.5 * s.sigma || s.sigma == 0.0, row, || {
            format!("size(small) = {} not below σ/2 = {}", s.small_size, 0.5 * s.sigma)
        });
    }
    // Unboundedness shows up as C rising at every doubling of the instance
    // count; a single new maximum late in the sweep is not enough to fail.
    let mut sizes: Vec<usize> = std::iter::successors(Some(n), |&k| (k >= 8).then_some(k / 2)).take(4).collect();
    sizes.reverse();
    if sizes.len() >= 2 {
        let cs: Vec<f64> = sizes.iter().map(|&k| curve[k - 1].1).collect();
        let growing = cs.windows(2).all(|w| w[1] > w[0]);
        out.check(!growing, 0, || {
            let steps: Vec<String> = sizes.iter().zip(&cs).map(|(k, c)| format!("C({k}) = {c}")).collect();
            format!("C grew at every doubling: {}", steps.join(", "))
        });
    }
    out.plot = Some(Plot {
        title: "Count constants".into(),
        x_label: "instances".into(),
        y_label: "running max C".into(),
        series: vec![Series { name: "C".into(), points: curve }],
    });
    Ok(out)
}

fn tree_lemma(r: &Resolved) -> Result<Outcome> {
    let gr = GridSpec::new(r.grid_m(8))?;
    let m = gr.m() as i32;
    let base = packet_base(r)?;
    let bound = r.cfg.bound.unwrap_or(4.0);
    let n = r.instances(50);
    let reps: Vec<(Tree, tilewave::tiles::TreeSumReport)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(r.seed, i);
            let len = gr.len();
            let inst = tile_instance(gr, r.nu(), rng.gen_range(len / 8..len * 5 / 8), rng.gen_range(len / 8..len * 5 / 8), &mut rng)?;
            let pol = if i % 2 == 0 { Polarity::Plus } else { Polarity::Minus };
            let j = rng.gen_range(-m + 2..=0);
            let top = Tile::new(inst.gr, j, rng.gen_range(0..1 << -j), rng.gen_range(0..1 << (m + j)))?;
            let mut below = tiles_below(inst.gr, &top, pol);
            below.shuffle(&mut rng);
            let k = rng.gen_range(1..=below.len().min(60));
            let tree = Tree::new(top, below[..k].to_vec())?;
            let rep = tree_sum(&tree, &inst.g_set, &inst.h_set, &inst.lin, &inst.table, &base)?;
            Ok((tree, rep))
        })
        .collect::<Result<_>>()?;
    let mut out = Outcome::new(Table::new(&[
        "instance", "polarity", "top_scale", "members", "sum", "first", "second", "size", "dense", "top_length", "ratio",
    ]));
    let mut pts = Vec::new();
    for (i, (tree, rep)) in reps.iter().enumerate() {
        let row = out.table.push(vec![
            i.to_string(),
            format!("{:?}", tree.polarity).to_lowercase(),
            tree.top.scale().to_string(),
            tree.len().to_string(),
            num(rep.sum),
            num(rep.first),
            num(rep.second),
            num(rep.size),
            num(rep.dense),
            num(rep.top_length),
            num(rep.ratio),
        ]);
        pts.push((i as f64, rep.ratio));
        let split = rep.first + rep.second;
        out.check(rep.sum <= split * (1.0 + 1e-12) + 1e-15, row, || format!("Sum {} exceeds first + second {split}", rep.sum));
        out.check(rep.ratio.is_finite() && rep.ratio <= bound, row, || format!("ratio {} above the pinned bound {bound}", rep.ratio));
    }
    out.plot = Some(Plot {
        title: "Sum(T) / (size·dense·|I_T|)".into(),
        x_label: "instance".into(),
        y_label: "ratio".into(),
        series: vec![Series { name: "trees".into(), points: pts }],
    });
    Ok(out)
}

fn bilinear(r: &Resolved) -> Result<Outcome> {
    let gr = GridSpec::new(r.grid_m(8))?;
    let base = packet_base(r)?;
    let bound = r.cfg.bound.unwrap_or(1.0);
    let n = r.instances(30);
    let len = gr.len() as f64;
    let universe = generate_universe(gr, None);
    let reps: Vec<(f64, tilewave::tiles::BilinearReport, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(r.seed, i);
            let lr = if n == 1 { 0.0 } else { -6.0 + 12.0 * i as f64 / (n - 1) as f64 };
            let q = lr.exp2();
            let (gm, hm) = if q >= 1.0 { (0.5, 0.5 / q) } else { (0.5 * q, 0.5) };
            let inst = tile_instance(gr, r.nu(), (gm * len).round() as usize, (hm * len).round() as usize, &mut rng)?;
            let rep = bilinear_form(&inst.g_set, &inst.h_set, &universe, &inst.lin, &base, r.nu())?;
            Ok((lr, rep, inst.g_set.measure(), inst.h_set.measure()))
        })
        .collect::<Result<_>>()?;
    let mut out = Outcome::new(Table::new(&[
        "instance",
        "log2_g_over_h",
        "g_measure",
        "h_measure",
        "direct",
        "pipeline",
        "rhs",
        "ratio",
        "trees",
        "residual_tiles",
    ]));
    let mut pts = Vec::new();
    for (i, (lr, rep, gm, hm)) in reps.iter().enumerate() {
        let row = out.table.push(vec![
            i.to_string(),
            num(*lr),
            num(*gm),
            num(*hm),
            num(rep.direct),
            num(rep.pipeline),
            num(rep.rhs),
            num(rep.ratio),
            rep.trees.to_string(),
            rep.residual_tiles.to_string(),
        ]);
        pts.push((*lr, rep.ratio));
        let gap = (rep.direct - rep.pipeline).abs();
        out.check(gap <= 1e-8, row, || format!("pipeline differs from direct by {gap}"));
        out.check(rep.ratio <= bound, row, || format!("ratio {} above the pinned bound {bound}", rep.ratio));
    }
    out.plot = Some(Plot {
        title: "Bilinear form / min(|G|,|H|)(1 + |log(|G|/|H|)|)".into(),
        x_label: "log2 |G|/|H|".into(),
        y_label: "ratio".into(),
        series: vec![Series { name: "instances".into(), points: pts }],
    });
    Ok(out)
}

fn averaging_beta(r: &Resolved) -> Result<Outcome> {
    let m = r.grid_m(10);
    let gr = GridSpec::new(m)?;
    let base = packet_base(r)?;
    let (ys, ts) = r.cfg.steps.unwrap_or((32, 32));
    let l0 = -(m as i32);
    let cfg = |l: i32| AveragingConfig { base, ..AveragingConfig::new(l, 0.0).with_steps(ys, ts) };
    let b0 = extract_beta(gr, &cfg(l0))?;
    let b1 = extract_beta(gr, &cfg(l0 + 1))?;
    let rep = verify_beta(&b0.kernel, &base)?;
    let dev = beta_dilation_deviation(&b0, &b1)?;

    let mut out = Outcome::new(Table::new(&["section", "key", "value", "bound", "pass"]));
    let check = |out: &mut Outcome, key: &str, value: f64, bound: &str, ok: bool| {
        let row = out.table.push(vec!["check".into(), key.into(), num(value), bound.into(), flag(ok)]);
        out.check(ok, row, || format!("{key} = {value} violates {bound}"));
    };
    check(&mut out, "off_diagonal_l0", b0.off_diagonal, "1e-8", b0.off_diagonal <= 1e-8);
    check(&mut out, "off_diagonal_l1", b1.off_diagonal, "1e-8", b1.off_diagonal <= 1e-8);
    check(&mut out, "dilation_deviation", dev, "1e-6", dev <= 1e-6);
    for key in ["zc0", "zc1", "zc2", "nonzero"] {
        let v = rep.note(key).unwrap_or(0.0);
        check(&mut out, key, v, "1", v == 1.0);
    }
    for key in ["c0", "c1", "c1_at", "l2", "out_of_band", "imag_max", "symbol_min"] {
        if let Some(v) = rep.note(key) {
            out.table.push(vec!["note".into(), key.into(), num(v), String::new(), String::new()]);
        }
    }
    out.table.push(vec!["note".into(), "tail_slope".into(), num(rep.slope), String::new(), String::new()]);
    let l = gr.len() as i64;
    // z = k/L over (-1, 0], reading bins mod L.
    let pts: Vec<(f64, f64)> = (-l + 1..=0).map(|k| (k as f64 / l as f64, b0.kernel.symbol_at(k).re)).collect();
    for &(z, v) in &pts {
        out.table.push(vec!["beta0_symbol".into(), num(z), num(v), String::new(), String::new()]);
    }
    out.plot = Some(Plot {
        title: format!("β₀ symbol, m = {m}"),
        x_label: "z = k/L".into(),
        y_label: "Re β̂₀".into(),
        series: vec![Series { name: "β₀".into(), points: pts }],
    });
    Ok(out)
}

fn observable(r: &Resolved) -> Observable {
    match &r.cfg.modes {
        Some(modes) => Observable::Trig(
            modes.iter().map(|&(k, re, im)| Mode { freq: vec![k], coef: C64::new(re, im) }).collect(),
        ),
        None => Observable::character(vec![1]),
    }
}

fn ergodic_probe(r: &Resolved) -> Result<Outcome> {
    let f = observable(r);
    let flow = FlowConfig::default();
    let (a, b) = r.cfg.theta_range.unwrap_or((-8.0, 8.0));
    let thetas = linspace(a, b, r.cfg.theta_points.unwrap_or(64));
    let xs: Vec<Vec<f64>> = r.cfg.x_grid.clone().unwrap_or_else(|| vec![0.0]).into_iter().map(|x| vec![x]).collect();
    let mut ladder = TruncationLadder::new(r.cfg.ladder_depth.unwrap_or(8));
    if let Some(q) = r.cfg.quad_nodes {
        ladder.q = q;
    }
    let rep = convergence_probe(&f, &flow, &xs, &thetas, &ladder, RESONANCE_EXCLUSION).context("convergence probe")?;
    let mut out = Outcome::new(Table::new(&["x", "theta", "block", "gap", "closed_form_err", "resonant"]));
    for row in &rep.rows {
        out.table.push(vec![
            num(row.x[0]),
            num(row.theta),
            row.block.to_string(),
            num(row.gap),
            row.closed_form_err.map(num).unwrap_or_default(),
            flag(row.resonant),
        ]);
    }
    let mut series = Vec::new();
    for (x, maxima) in xs.iter().zip(&rep.block_max) {
        let dec = maxima.windows(2).all(|w| w[1] < w[0]);
        out.check(dec, 0, || format!("block maxima at x = {} not strictly decreasing: {maxima:?}", x[0]));
        series.push(Series { name: format!("x = {}", x[0]), points: maxima.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect() });
    }
    out.plot = Some(Plot {
        title: "Successive-truncation gaps (max over non-resonant θ)".into(),
        x_label: "ladder block".into(),
        y_label: "max gap".into(),
        series,
    });
    Ok(out)
}

fn conjecture_jh(r: &Resolved) -> Result<Outcome> {
    let m = r.grid_m(9);
    let gr = GridSpec::new(m)?;
    let ns = r.cfg.osc_n.clone().unwrap_or_else(|| vec![1, 2, 4]);
    let step = r.cfg.mod_step.unwrap_or(8).max(1);
    let h = gr.len() as i64 / 2;
    let mod_grid: Vec<i64> = (-h..h).step_by(step as usize).collect();
    let n_inst = r.instances(4);
    let kernels = [
        ("J_H", make_sharp_hilbert(gr)?),
        ("K_H", make_truncated_hilbert(&make_zeta(1.0 / BAND_UNIT as f64, gr)?)?),
    ];
    let signals: Vec<Signal> = (0..n_inst).map(|i| random_signal(gr, &mut rng_for(r.seed, i))).collect();
    let mut out = Outcome::new(Table::new(&["kernel", "n", "instance", "ratio"]));
    let mut series = Vec::new();
    for (name, k) in &kernels {
        let mut pts = Vec::new();
        for &n in &ns {
            let spec = OscSpec::uniform(n, m, 2 * n as i64)?;
            let ratios: Vec<f64> = signals
                .iter()
                .map(|f| Ok(lp_norm(&sup_mod_osc(k, f, &spec, &mod_grid)?, 2.0)? / lp_norm(f, 2.0)?))
                .collect::<Result<_>>()?;
            for (i, q) in ratios.iter().enumerate() {
                out.table.push(vec![name.to_string(), n.to_string(), i.to_string(), num(*q)]);
            }
            let mx = ratios.iter().cloned().fold(0.0, f64::max);
            out.table.push(vec![name.to_string(), n.to_string(), "max".into(), num(mx)]);
            pts.push((n as f64, mx));
        }
        series.push(Series { name: name.to_string(), points: pts });
    }
    // Exploratory: growth in n is reported, never asserted.
    out.plot = Some(Plot {
        title: "sup-modulated oscillation vs n".into(),
        x_label: "n".into(),
        y_label: "max ‖·‖₂ / ‖f‖₂".into(),
        series,
    });
    Ok(out)
}
