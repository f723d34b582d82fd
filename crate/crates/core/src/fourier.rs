//! FFT plumbing shared by every module.
//!
//! Transforms are unnormalized: `fft` computes `X_k = Σ x_n e^{-2πikn/L}` and
//! `ifft` computes `x_n = Σ X_k e^{2πikn/L}`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&(len, inverse)) {
            return f.clone();
        }
        let f = if inverse {
            p.0.plan_fft_inverse(len)
        } else {
            p.0.plan_fft_forward(len)
        };
        p.1.insert((len, inverse), f.clone());
        f
    })
}

pub fn fft_in_place(x: &mut [C64]) {
    if x.len() > 1 {
        plan(x.len(), false).process(x);
    }
}

pub fn ifft_in_place(x: &mut [C64]) {
    if x.len() > 1 {
        plan(x.len(), true).process(x);
    }
}

pub fn fft(x: &[C64]) -> Vec<C64> {
    let mut v = x.to_vec();
    fft_in_place(&mut v);
    v
}

pub fn ifft(x: &[C64]) -> Vec<C64> {
    let mut v = x.to_vec();
    ifft_in_place(&mut v);
    v
}

/// Signed bin in `[-len/2, len/2)` for an FFT index.
#[inline]
pub fn signed_bin(index: usize, len: usize) -> i64 {
    let k = index as i64;
    if k >= (len / 2) as i64 {
        k - len as i64
    } else {
        k
    }
}

/// FFT index of any integer bin (reduced mod `len`).
#[inline]
pub fn bin_index(bin: i64, len: usize) -> usize {
    bin.rem_euclid(len as i64) as usize
}
