//! Seeded random instances.
//!
//! Every random stream is a `ChaCha8Rng` seeded from a 64-bit value. Parallel
//! loops never share a generator: sample `k` of a task labelled `label` uses
//! `sub_seed(seed, label, k)`, which is `splitmix64` applied to the seed mixed
//! with an FNV-1a hash of the label and the index. Results therefore depend
//! only on `(seed, label, k)` and not on execution order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};

pub type SampleRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn sub_seed(seed: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ fnv1a(label)).wrapping_add(index))
}

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sub_rng(seed: u64, label: &str, index: u64) -> SampleRng {
    rng(sub_seed(seed, label, index))
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(n, |_, _| complex_normal(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v.unscale(norm);
        }
    }
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Wishart density matrix `G G* / Tr(G G*)` with `G` of shape `n × k`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, k.max(1));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    ComplexMatrix::wrap(w.unscale(tr))
}

/// Random PSD matrix with random rank in `1..=n`, trace normalized to 1.
pub fn psd_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let k = rng.random_range(1..=n);
    density_matrix(rng, n, k)
}
