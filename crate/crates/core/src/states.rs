//! Bipartite density matrices and their correspondence with maps: the state
//! of a CP map `φ` has density matrix `C_φ^t / Tr(C_φ)`.

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cones::product::{optimize_product_seeded, Sense};
use crate::cones::{test_cocp, TestConfig, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh_raw, omega, partial_transpose_raw, psd_from_eigh, ComplexMatrix, HermitianMatrix, Side, C64,
    DEFAULT_PSD_TOL,
};
use crate::matmap::MatMap;
use crate::random::{density_matrix, sub_rng, sub_seed, unitary};

const TRACE_TOL: f64 = 1e-10;
/// Attempts before [`random_ppt_state`] gives up.
pub const REJECTION_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    d_a: usize,
    d_b: usize,
    matrix: HermitianMatrix,
}

impl BipartiteState {
    /// Validates PSD (relative `1e-9`) and unit trace (`1e-10`).
    pub fn new(d_a: usize, d_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        if d_a == 0 || d_b == 0 || matrix.rows() != d_a * d_b || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "state matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                d_a * d_b,
                d_a * d_b
            )));
        }
        let h = HermitianMatrix::new(matrix)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Invalid(format!("state trace is {tr}, expected 1")));
        }
        let check = psd_from_eigh(&eigh_raw(h.matrix().as_dmatrix())?, DEFAULT_PSD_TOL);
        if !check.is_psd {
            return Err(Error::Invalid(format!("state has eigenvalue {}", check.min_eigenvalue)));
        }
        Ok(Self { d_a, d_b, matrix: h })
    }

    /// Divides by the trace first.
    pub fn normalized(d_a: usize, d_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.abs() <= f64::MIN_POSITIVE {
            return Err(Error::ZeroTrace);
        }
        Self::new(d_a, d_b, matrix.scale(1.0 / tr))
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        ComplexMatrix::wrap(partial_transpose_raw(self.matrix().as_dmatrix(), self.d_a, self.d_b, Side::Second))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    #[serde(rename = "dA")]
    d_a: usize,
    #[serde(rename = "dB")]
    d_b: usize,
    matrix: ComplexMatrix,
}

impl Serialize for BipartiteState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr { d_a: self.d_a, d_b: self.d_b, matrix: self.matrix().clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BipartiteState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = StateRepr::deserialize(d)?;
        BipartiteState::new(r.d_a, r.d_b, r.matrix).map_err(serde::de::Error::custom)
    }
}

/// `C_φ^t / Tr(C_φ)` together with the normalizer `Tr(C_φ)`.
pub fn state_of_map_scaled(phi: &MatMap) -> Result<(BipartiteState, f64)> {
    let h = phi.hermitian_choi()?;
    let check = psd_from_eigh(&eigh_raw(h.matrix().as_dmatrix())?, DEFAULT_PSD_TOL);
    if !check.is_psd {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: check.min_eigenvalue });
    }
    let tr = h.trace();
    if tr <= f64::MIN_POSITIVE {
        return Err(Error::ZeroTrace);
    }
    let state = BipartiteState::new(phi.d_in(), phi.d_out(), h.matrix().transpose().scale(1.0 / tr))?;
    Ok((state, tr))
}

pub fn state_of_map(phi: &MatMap) -> Result<BipartiteState> {
    Ok(state_of_map_scaled(phi)?.0)
}

/// Map with Choi matrix `ρ^t`.
pub fn map_of_state(rho: &BipartiteState) -> MatMap {
    MatMap::from_choi(rho.d_a, rho.d_b, rho.matrix().transpose()).expect("state dimensions are consistent")
}

/// PPT test on a state. Reported through the associated map, so a witness
/// re-checks against [`map_of_state`].
pub fn is_ppt_state(rho: &BipartiteState, tol: f64) -> Result<Verdict> {
    test_cocp(&map_of_state(rho), &TestConfig { psd_tol: tol, ..TestConfig::default() })
}

/// Smallest eigenvalue of the partial transpose.
pub fn min_pt_eigenvalue(rho: &BipartiteState) -> Result<f64> {
    Ok(eigh_raw(rho.partial_transpose().as_dmatrix())?.min())
}

/// Wishart rank used by [`random_ppt_state`].
pub fn wishart_rank(d_a: usize, d_b: usize) -> usize {
    2 * d_a * d_b
}

/// Rejection-sampled PPT state and the number of rejected draws.
pub fn random_ppt_state_with_stats(d_a: usize, d_b: usize, seed: u64) -> Result<(BipartiteState, usize)> {
    let n = d_a * d_b;
    let mut best = f64::NEG_INFINITY;
    for attempt in 0..REJECTION_CAP {
        let mut r = sub_rng(seed, "ppt-state", attempt as u64);
        let m = density_matrix(&mut r, n, wishart_rank(d_a, d_b));
        let pt = partial_transpose_raw(m.as_dmatrix(), d_a, d_b, Side::Second);
        let lo = eigh_raw(&crate::linalg::hermitize(&pt))?.min();
        if lo >= 0.0 {
            return Ok((BipartiteState::normalized(d_a, d_b, m)?, attempt));
        }
        best = best.max(lo);
    }
    Err(Error::RejectionCap { attempts: REJECTION_CAP, best })
}

pub fn random_ppt_state(d_a: usize, d_b: usize, seed: u64) -> Result<BipartiteState> {
    Ok(random_ppt_state_with_stats(d_a, d_b, seed)?.0)
}

/// Random PPT map on `M_n`, Choi trace `n`.
pub fn random_ppt_map(n: usize, seed: u64) -> Result<MatMap> {
    Ok(map_of_state(&random_ppt_state(n, n, seed)?).scaled(n as f64))
}

/// `Ad e ∘ ψ` on `M_3` with `ψ` a random PPT map and `e` a random rank-2
/// projection; fails if the range of the result escapes `e`.
pub fn random_ppt_map_rank2_range(seed: u64) -> Result<MatMap> {
    let psi = random_ppt_map(3, sub_seed(seed, "rank2-psi", 0))?;
    let u = unitary(&mut sub_rng(seed, "rank2-e", 0), 3);
    let cols = u.columns(0, 2).into_owned();
    let e = ComplexMatrix::wrap(&cols * cols.adjoint());
    compress_output(&psi, &e)
}

/// `Ad e ∘ ψ`, certifying `range(φ) ≤ e`.
pub fn compress_output(psi: &MatMap, e: &ComplexMatrix) -> Result<MatMap> {
    let phi = MatMap::ad(e).compose(psi)?;
    let range = phi.range_projection()?;
    let rank_e = crate::linalg::Projection::new(HermitianMatrix::new(e.clone())?)?.rank();
    let contained = (e * range.matrix()).max_abs_diff(range.matrix()) <= 1e-8;
    if range.rank() > rank_e || !contained {
        return Err(Error::Invalid("compressed map escapes the projection".into()));
    }
    Ok(phi)
}

/// The five tiles product vectors `(x_k, y_k)` on `C^3 ⊗ C^3`.
pub fn tiles_product_vectors() -> Vec<(DVector<C64>, DVector<C64>)> {
    let v = |a: [f64; 3]| DVector::from_iterator(3, a.iter().map(|&t| C64::new(t, 0.0)));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    vec![
        (v([1.0, 0.0, 0.0]), v([s, -s, 0.0])),
        (v([s, -s, 0.0]), v([0.0, 0.0, 1.0])),
        (v([0.0, 0.0, 1.0]), v([0.0, s, -s])),
        (v([0.0, s, -s]), v([1.0, 0.0, 0.0])),
        (v([t, t, t]), v([t, t, t])),
    ]
}

/// Projector onto the span of the tiles vectors.
pub fn tiles_upb_projector() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(9, 9).into_dmatrix();
    for (x, y) in tiles_product_vectors() {
        let w = x.kronecker(&y);
        p += &w * w.adjoint();
    }
    ComplexMatrix::wrap(p)
}

/// `(1 − Σ_k |w_k⟩⟨w_k|) / 4`: PPT and entangled.
pub fn tiles_upb_state() -> BipartiteState {
    let m = (&ComplexMatrix::identity(9) - &tiles_upb_projector()).scale(0.25);
    BipartiteState::new(3, 3, m).expect("tiles construction is a state")
}

/// Largest deviation of the tiles Gram matrix from the identity.
pub fn tiles_orthonormality_defect() -> f64 {
    let w: Vec<DVector<C64>> = tiles_product_vectors().iter().map(|(x, y)| x.kronecker(y)).collect();
    let mut worst: f64 = 0.0;
    for (i, a) in w.iter().enumerate() {
        for (j, b) in w.iter().enumerate() {
            let g = a.dotc(b);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// `min ⟨x⊗y| Π |x⊗y⟩` over unit product vectors, with `Π` the tiles
/// projector. A product vector in the range of the tiles state would make
/// this zero.
pub fn tiles_product_range_gap(starts: usize, seed: u64) -> f64 {
    let p = tiles_upb_projector();
    optimize_product_seeded(p.as_dmatrix(), 3, 3, Sense::Min, starts, seed, "tiles-range").value
}

/// `p·|Φ+⟩⟨Φ+| + (1 − p)·1/4` on `2⊗2`; valid for `p ∈ [−1/3, 1]`.
pub fn werner_state(p: f64) -> Result<BipartiteState> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("werner parameter {p} outside [-1/3, 1]")));
    }
    let phi = ComplexMatrix::outer(&omega(2)).scale(0.5);
    let m = &phi.scale(p) + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
    BipartiteState::new(2, 2, m)
}

/// Bisects `p ∈ [0, 1]` for the sign change of the minimum partial-transpose
/// eigenvalue of the Werner family.
pub fn werner_ppt_threshold(tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_pt_eigenvalue(&werner_state(mid)?)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
