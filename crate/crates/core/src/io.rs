//! Serialization: signals as CSV or the `TWSIG1` binary container, kernels as
//! a binary payload plus a JSON sidecar, and JSON for anything serde-able.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelMeta};
use crate::signal::{GridSpec, Signal};
use crate::C64;

const MAGIC: &[u8; 6] = b"TWSIG1";

/// Writes `index,re,im` rows with a header line.
pub fn write_signal_csv<W: Write>(sig: &Signal, mut w: W) -> Result<()> {
    writeln!(w, "index,re,im")?;
    for (i, v) in sig.samples().iter().enumerate() {
        writeln!(w, "{i},{},{}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_signal_csv<R: BufRead>(r: R) -> Result<Signal> {
    let mut samples = Vec::new();
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (ln == 0 && line.starts_with("index")) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Format(format!("line {}: expected 3 columns", ln + 1)));
        }
        let idx: usize = cols[0].trim().parse().map_err(|_| bad(ln, "index"))?;
        if idx != samples.len() {
            return Err(Error::Format(format!("line {}: index {idx} out of order", ln + 1)));
        }
        let re: f64 = cols[1].trim().parse().map_err(|_| bad(ln, "re"))?;
        let im: f64 = cols[2].trim().parse().map_err(|_| bad(ln, "im"))?;
        samples.push(C64::new(re, im));
    }
    let grid = grid_for(samples.len())?;
    Signal::from_samples(grid, samples)
}

fn bad(ln: usize, what: &str) -> Error {
    Error::Format(format!("line {}: bad {what}", ln + 1))
}

fn grid_for(len: usize) -> Result<GridSpec> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Format(format!("sample count {len} is not a power of two")));
    }
    GridSpec::new(len.trailing_zeros())
}

/// `TWSIG1`, little-endian `u32 m`, then `re, im` pairs as f64.
pub fn write_signal_bin<W: Write>(sig: &Signal, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&sig.grid().m().to_le_bytes())?;
    for v in sig.samples() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_signal_bin<R: Read>(mut r: R) -> Result<Signal> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut m = [0u8; 4];
    r.read_exact(&mut m)?;
    let grid = GridSpec::new(u32::from_le_bytes(m))?;
    let mut buf = [0u8; 8];
    let mut samples = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf);
        r.read_exact(&mut buf)?;
        samples.push(C64::new(re, f64::from_le_bytes(buf)));
    }
    Signal::from_samples(grid, samples)
}

/// JSON sidecar written next to a kernel's samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSidecar {
    pub name: String,
    pub nu: Option<f64>,
    pub support_lo: Option<f64>,
    pub support_hi: Option<f64>,
    #[serde(rename = "C0")]
    pub c0: Option<f64>,
    #[serde(rename = "C1")]
    pub c1: Option<f64>,
}

impl From<&KernelMeta> for KernelSidecar {
    fn from(m: &KernelMeta) -> Self {
        KernelSidecar {
            name: m.name.clone(),
            nu: m.nu,
            support_lo: m.support.map(|s| s.0),
            support_hi: m.support.map(|s| s.1),
            c0: m.c0,
            c1: m.c1,
        }
    }
}

impl From<KernelSidecar> for KernelMeta {
    fn from(s: KernelSidecar) -> Self {
        KernelMeta {
            name: s.name,
            nu: s.nu,
            support: s.support_lo.zip(s.support_hi),
            c0: s.c0,
            c1: s.c1,
        }
    }
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut p = base.as_os_str().to_owned();
    p.push(ext);
    PathBuf::from(p)
}

/// Writes `<base>.twsig` (spatial samples) and `<base>.json` (metadata).
pub fn save_kernel(k: &Kernel, base: &Path) -> Result<()> {
    let sig = k.as_signal();
    write_signal_bin(&sig, BufWriter::new(File::create(with_ext(base, ".twsig"))?))?;
    write_json(&KernelSidecar::from(k.meta()), &with_ext(base, ".json"))
}

pub fn load_kernel(base: &Path) -> Result<Kernel> {
    let sig = read_signal_bin(BufReader::new(File::open(with_ext(base, ".twsig"))?))?;
    let side: KernelSidecar = read_json(&with_ext(base, ".json"))?;
    Kernel::from_spatial(sig.grid(), sig.into_samples(), side.into())
}

pub fn write_json<T: Serialize>(v: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, v)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
