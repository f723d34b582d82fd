//! Suite results: a CSV table, failing rows, and an optional line plot of
//! columns already in the table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Result;

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row and returns its 1-based index in the CSV body.
    pub fn push(&mut self, row: Vec<String>) -> usize {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
        self.rows.len()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip formatting, so equal values print identically.
pub fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: Table,
    /// `(row, message)` for each failed assertion; row 0 means suite-level.
    pub failures: Vec<(usize, String)>,
    pub plot: Option<Plot>,
}

impl Outcome {
    pub fn new(table: Table) -> Self {
        Outcome { table, failures: Vec::new(), plot: None }
    }

    pub fn check(&mut self, ok: bool, row: usize, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push((row, msg()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A minimal SVG line chart with linear axes.
pub fn render_svg(plot: &Plot) -> String {
    let pts: Vec<(f64, f64)> =
        plot.series.iter().flat_map(|s| s.points.iter().copied()).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let span = |v: Vec<f64>| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-300 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(pts.iter().map(|p| p.0).collect());
    let (y0, y1) = span(pts.iter().map(|p| p.1).collect());
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#, W / 2.0, esc(&plot.title)).unwrap();
    writeln!(
        s,
        r#"<path d="M{PAD} {} L{} {} M{PAD} {} L{PAD} {PAD}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD
    )
    .unwrap();
    for (v, x, anchor) in [(x0, sx(x0), "start"), (x1, sx(x1), "end")] {
        writeln!(s, r#"<text x="{x}" y="{}" text-anchor="{anchor}" font-size="11">{}</text>"#, H - PAD + 16.0, tick(v)).unwrap();
    }
    for (v, y) in [(y0, sy(y0)), (y1, sy(y1))] {
        writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end" font-size="11">{}</text>"#, PAD - 6.0, tick(v)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, H - 16.0, esc(&plot.x_label))
        .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        esc(&plot.y_label)
    )
    .unwrap();
    for (i, ser) in plot.series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let mut sorted: Vec<(f64, f64)> = ser.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = sorted.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        if path.len() > 1 {
            writeln!(s, r#"<polyline points="{}" stroke="{c}" fill="none" stroke-width="1.5"/>"#, path.join(" ")).unwrap();
        }
        for &(x, y) in &sorted {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, sx(x), sy(y)).unwrap();
        }
        writeln!(s, r#"<text x="{}" y="{}" font-size="12" fill="{c}">{}</text>"#, W - PAD - 120.0, PAD + 16.0 * i as f64, esc(&ser.name))
            .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `<outdir>/<suite>.csv` and, when asked and available, the SVG.
pub fn write_outputs(outdir: &Path, suite: &str, out: &Outcome, plot: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir)?;
    let csv_path = outdir.join(format!("{suite}.csv"));
    out.table.write_csv(&csv_path)?;
    let mut written = vec![csv_path];
    if plot {
        if let Some(p) = &out.plot {
            let svg = outdir.join(format!("{suite}.svg"));
            std::fs::write(&svg, render_svg(p))?;
            written.push(svg);
        }
    }
    Ok(written)
}
