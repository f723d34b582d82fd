//! Shared fixtures for the benchmarks: seeded signals and standard kernels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tilewave::kernels::{make_truncated_hilbert, make_zeta, BAND_UNIT};
use tilewave::{GridSpec, Kernel, Signal, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(m: u32) -> GridSpec {
    GridSpec::new(m).expect("bench grid")
}

/// Uniform noise in the unit square, fixed by `seed`.
pub fn noise(gr: GridSpec, seed: u64) -> Signal {
    let mut r = rng(seed);
    Signal::from_fn(gr, |_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

/// Truncated Hilbert kernel with the default band unit.
pub fn hilbert(gr: GridSpec) -> Kernel {
    make_truncated_hilbert(&make_zeta(1.0 / BAND_UNIT as f64, gr).expect("zeta")).expect("hilbert")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        let gr = grid(6);
        assert_eq!(noise(gr, 3).samples(), noise(gr, 3).samples());
        assert_eq!(hilbert(gr).grid(), gr);
    }
}
