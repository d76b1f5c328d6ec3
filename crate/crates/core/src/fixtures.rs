//! Classical fixed maps used as extreme test points.

use crate::linalg::{swap, ComplexMatrix};
use crate::matmap::MatMap;

/// `a ↦ Tr(a)·1 − a`, positive and decomposable.
pub fn reduction_map(n: usize) -> MatMap {
    let choi = &ComplexMatrix::identity(n * n) - MatMap::identity_map(n).choi();
    MatMap::from_choi(n, n, choi).expect("square Choi matrix")
}

/// Map whose Choi matrix is the antisymmetric projector `(1 − SWAP)/2`
/// (the singlet projector at `n = 2`). Completely positive.
pub fn antisymmetric_projector_map(n: usize) -> MatMap {
    let choi = (&ComplexMatrix::identity(n * n) - &swap(n)).scale(0.5);
    MatMap::from_choi(n, n, choi).expect("square Choi matrix")
}

/// Choi's positive, non-decomposable map on `M_3`:
/// `X ↦ diag(2x₁₁ + x₃₃, x₁₁ + 2x₂₂, x₂₂ + 2x₃₃) − X`.
pub fn choi_map() -> MatMap {
    MatMap::from_fn(3, 3, |x| {
        let d = [
            2.0 * x[(0, 0)].re + x[(2, 2)].re,
            x[(0, 0)].re + 2.0 * x[(1, 1)].re,
            x[(1, 1)].re + 2.0 * x[(2, 2)].re,
        ];
        let mut out = ComplexMatrix::diagonal(&d).into_dmatrix();
        // Matrix units are real, so only the off-diagonal part needs complex care.
        out -= x.as_dmatrix();
        ComplexMatrix::from_dmatrix(out).expect("finite")
    })
    .expect("3x3 output")
}

/// Map of the tiles UPB state (Choi matrix = transpose of the state).
pub fn tiles_map() -> MatMap {
    crate::states::map_of_state(&crate::states::tiles_upb_state())
}
