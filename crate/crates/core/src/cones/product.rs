//! Optimization of `q(x, y) = ⟨x⊗y| G |x⊗y⟩` over unit product vectors by
//! alternating extreme eigenvectors.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::linalg::{eigh_raw, hermitize, C64};
use crate::random::{sub_rng, unit_vector};

const MAX_SWEEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Debug)]
pub struct ProductOptimum {
    pub x: DVector<C64>,
    pub y: DVector<C64>,
    pub value: f64,
}

/// `Σ_ij conj(x_i) x_j G_ij` (a `d_b × d_b` matrix).
pub(crate) fn contract_first(g: &DMatrix<C64>, x: &DVector<C64>, d_b: usize) -> DMatrix<C64> {
    let d_a = x.len();
    let mut m = DMatrix::zeros(d_b, d_b);
    for i in 0..d_a {
        for j in 0..d_a {
            let w = x[i].conj() * x[j];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            m += g.view((i * d_b, j * d_b), (d_b, d_b)) * w;
        }
    }
    m
}

/// `N_ij = y* G_ij y` (a `d_a × d_a` matrix).
pub(crate) fn contract_second(g: &DMatrix<C64>, y: &DVector<C64>, d_a: usize) -> DMatrix<C64> {
    let d_b = y.len();
    DMatrix::from_fn(d_a, d_a, |i, j| {
        let blk = g.view((i * d_b, j * d_b), (d_b, d_b));
        (y.adjoint() * blk * y)[(0, 0)]
    })
}

pub fn product_value(g: &DMatrix<C64>, x: &DVector<C64>, y: &DVector<C64>) -> f64 {
    let xy = x.kronecker(y);
    (xy.adjoint() * g * &xy)[(0, 0)].re
}

fn extreme(m: &DMatrix<C64>, sense: Sense) -> (f64, DVector<C64>) {
    let eig = match eigh_raw(&hermitize(m)) {
        Ok(e) => e,
        // Tiny blocks never fail in practice; fall back to the first basis vector.
        Err(_) => {
            let mut v = DVector::zeros(m.nrows());
            v[0] = C64::new(1.0, 0.0);
            return ((v.adjoint() * m * &v)[(0, 0)].re, v);
        }
    };
    let k = match sense {
        Sense::Min => 0,
        Sense::Max => eig.values.len() - 1,
    };
    (eig.values[k], eig.vectors.column(k).into_owned())
}

/// Alternating optimization from a fixed starting `x`.
pub fn optimize_from(g: &DMatrix<C64>, d_a: usize, d_b: usize, sense: Sense, x0: DVector<C64>) -> ProductOptimum {
    let mut x = x0;
    let (mut value, mut y) = extreme(&contract_first(g, &x, d_b), sense);
    for _ in 0..MAX_SWEEPS {
        let (_, nx) = extreme(&contract_second(g, &y, d_a), sense);
        x = nx;
        let (nv, ny) = extreme(&contract_first(g, &x, d_b), sense);
        y = ny;
        let improved = match sense {
            Sense::Min => value - nv,
            Sense::Max => nv - value,
        };
        value = nv;
        if improved <= 1e-14 * value.abs().max(1.0) {
            break;
        }
    }
    ProductOptimum { x, y, value }
}

fn better(a: f64, b: f64, sense: Sense) -> bool {
    match sense {
        Sense::Min => a < b,
        Sense::Max => a > b,
    }
}

/// Best of `starts` random restarts plus any `warm` starting points. Ties
/// keep the earliest start.
pub fn optimize_product<R: Rng + ?Sized>(
    g: &DMatrix<C64>,
    d_a: usize,
    d_b: usize,
    sense: Sense,
    starts: usize,
    warm: &[DVector<C64>],
    rng: &mut R,
) -> ProductOptimum {
    let mut best: Option<ProductOptimum> = None;
    let candidates = warm.iter().cloned().chain((0..starts).map(|_| unit_vector(rng, d_a)));
    for x0 in candidates {
        let cand = optimize_from(g, d_a, d_b, sense, x0);
        if best.as_ref().is_none_or(|b| better(cand.value, b.value, sense)) {
            best = Some(cand);
        }
    }
    best.expect("at least one start")
}

/// Multistart search where start `k` draws from `sub_rng(seed, label, k)`.
/// Starts run in parallel; the reduction keeps the lowest-index best value,
/// so the result does not depend on scheduling.
pub fn optimize_product_seeded(
    g: &DMatrix<C64>,
    d_a: usize,
    d_b: usize,
    sense: Sense,
    starts: usize,
    seed: u64,
    label: &str,
) -> ProductOptimum {
    use rayon::prelude::*;
    let results: Vec<ProductOptimum> = (0..starts.max(1))
        .into_par_iter()
        .map(|k| {
            let mut r = sub_rng(seed, label, k as u64);
            optimize_from(g, d_a, d_b, sense, unit_vector(&mut r, d_a))
        })
        .collect();
    results
        .into_iter()
        .reduce(|best, cand| if better(cand.value, best.value, sense) { cand } else { best })
        .expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{omega, swap, ComplexMatrix};
    use crate::random::rng;

    #[test]
    fn swap_on_product_vectors_is_overlap_squared() {
        // ⟨x⊗y|SWAP|x⊗y⟩ = |⟨x|y⟩|² ∈ [0, 1].
        let g = swap(3).into_dmatrix();
        let mut r = rng(1);
        let lo = optimize_product(&g, 3, 3, Sense::Min, 8, &[], &mut r);
        let hi = optimize_product(&g, 3, 3, Sense::Max, 8, &[], &mut r);
        assert!(lo.value.abs() < 1e-12, "{}", lo.value);
        assert!((hi.value - 1.0).abs() < 1e-12);
        assert!((product_value(&g, &hi.x, &hi.y) - hi.value).abs() < 1e-12);
    }

    #[test]
    fn omega_projector_max_over_products_is_one() {
        // max |⟨x⊗y|Ω⟩|² over unit x, y equals 1 for Ω = Σ e_i⊗e_i.
        let g = ComplexMatrix::outer(&omega(3)).into_dmatrix();
        let best = optimize_product(&g, 3, 3, Sense::Max, 8, &[], &mut rng(2));
        assert!((best.value - 1.0).abs() < 1e-10);
    }
}
