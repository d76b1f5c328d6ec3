//! Linear maps `M_{d_in} → M_{d_out}` stored by their Choi matrix
//! `C_φ = Σ_ij e_ij ⊗ φ(e_ij)`.
//!
//! Block `(i, j)` of the Choi matrix (rows `i·d_out ..`, columns `j·d_out ..`)
//! is `φ(e_ij)`, so `φ(a)[s,t] = Σ_ij a_ij C[(i,s),(j,t)]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    omega, partial_transpose_raw, swap, ComplexMatrix, HermitianMatrix, Projection, Side, C64, DEFAULT_PSD_TOL,
    HERMITIAN_REPAIR_LIMIT,
};

#[derive(Clone, Debug, PartialEq)]
pub struct MatMap {
    d_in: usize,
    d_out: usize,
    choi: ComplexMatrix,
    hermiticity_preserving: bool,
}

impl MatMap {
    pub fn from_choi(d_in: usize, d_out: usize, choi: ComplexMatrix) -> Result<Self> {
        let d = d_in * d_out;
        if d == 0 || choi.rows() != d || choi.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of a map M_{d_in} -> M_{d_out} must be {d}x{d}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(Self::from_choi_unchecked(d_in, d_out, choi))
    }

    fn from_choi_unchecked(d_in: usize, d_out: usize, choi: ComplexMatrix) -> Self {
        match HermitianMatrix::new(choi.clone()) {
            Ok(h) => Self { d_in, d_out, choi: h.into_matrix(), hermiticity_preserving: true },
            Err(_) => Self { d_in, d_out, choi, hermiticity_preserving: false },
        }
    }

    /// Builds the Choi matrix by evaluating `f` on every matrix unit of `M_{d_in}`.
    pub fn from_fn<F>(d_in: usize, d_out: usize, f: F) -> Result<Self>
    where
        F: Fn(&ComplexMatrix) -> ComplexMatrix,
    {
        let mut choi = DMatrix::zeros(d_in * d_out, d_in * d_out);
        for i in 0..d_in {
            for j in 0..d_in {
                let out = f(&ComplexMatrix::unit(d_in, i, j));
                if out.rows() != d_out || out.cols() != d_out {
                    return Err(Error::DimensionMismatch(format!(
                        "map output is {}x{}, expected {d_out}x{d_out}",
                        out.rows(),
                        out.cols()
                    )));
                }
                choi.view_mut((i * d_out, j * d_out), (d_out, d_out)).copy_from(out.as_dmatrix());
            }
        }
        Self::from_choi(d_in, d_out, ComplexMatrix::from_dmatrix(choi)?)
    }

    /// `Ad V: a ↦ V* a V`.
    ///
    /// `V` is `d_in × d_out`: it maps the output space into the input space,
    /// so the map takes `d_in × d_in` inputs to `d_out × d_out` outputs.
    pub fn ad(v: &ComplexMatrix) -> Self {
        Self::kraus_sum(std::slice::from_ref(v), false).expect("single Kraus operator is always consistent")
    }

    /// `Σ_k Ad V_k`, optionally preceded by the transpose (`Σ_k Ad V_k ∘ t`).
    pub fn kraus_sum(kraus: &[ComplexMatrix], pre_transpose: bool) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Invalid("empty Kraus list".into()))?;
        let (d_in, d_out) = (first.rows(), first.cols());
        if kraus.iter().any(|v| v.rows() != d_in || v.cols() != d_out) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        // C = Σ_k |v_k⟩⟨v_k| with v_k = (1 ⊗ V_k*) Ω, i.e. v_k[(i,s)] = conj(V_k[i,s]).
        let d = d_in * d_out;
        let mut choi = DMatrix::zeros(d, d);
        for v in kraus {
            let vec = nalgebra::DVector::from_fn(d, |r, _| v[(r / d_out, r % d_out)].conj());
            choi += &vec * vec.adjoint();
        }
        if pre_transpose {
            choi = partial_transpose_raw(&choi, d_in, d_out, Side::First);
        }
        Self::from_choi(d_in, d_out, ComplexMatrix::from_dmatrix(choi)?)
    }

    pub fn identity_map(n: usize) -> Self {
        Self::from_choi_unchecked(n, n, ComplexMatrix::outer(&omega(n)))
    }

    pub fn transpose_map(n: usize) -> Self {
        Self::from_choi_unchecked(n, n, swap(n))
    }

    /// `a ↦ Tr(a)·1`.
    pub fn trace_map(n: usize) -> Self {
        Self::from_choi_unchecked(n, n, ComplexMatrix::identity(n * n))
    }

    /// `a ↦ Tr(ρ a)·b`: the rank-one super-positive map `b ω_ρ`.
    pub fn state_times(rho: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        if !rho.is_square() || !b.is_square() {
            return Err(Error::DimensionMismatch("state and output must be square".into()));
        }
        Self::from_choi(rho.rows(), b.rows(), crate::linalg::tensor(&rho.transpose(), b))
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.hermiticity_preserving
    }

    pub fn hermitian_choi(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.choi.clone())
    }

    /// `φ(e_ij)`.
    pub fn image_of_unit(&self, i: usize, j: usize) -> ComplexMatrix {
        self.choi.block(i, j, self.d_out, self.d_out)
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.d_in || a.cols() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "map expects {0}x{0} input, got {1}x{2}",
                self.d_in,
                a.rows(),
                a.cols()
            )));
        }
        Ok(ComplexMatrix::wrap(self.apply_raw(a.as_dmatrix())))
    }

    pub(crate) fn apply_raw(&self, a: &DMatrix<C64>) -> DMatrix<C64> {
        let m = self.d_out;
        let c = self.choi.as_dmatrix();
        let mut out = DMatrix::zeros(m, m);
        for i in 0..self.d_in {
            for j in 0..self.d_in {
                let w = a[(i, j)];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                out += c.view((i * m, j * m), (m, m)) * w;
            }
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MatMap) -> Result<MatMap> {
        if inner.d_out != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose M_{}->M_{} after M_{}->M_{}",
                self.d_in, self.d_out, inner.d_in, inner.d_out
            )));
        }
        let (n, m, k) = (inner.d_in, self.d_out, inner.d_out);
        let ic = inner.choi.as_dmatrix();
        let mut choi = DMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let mid = ic.view((i * k, j * k), (k, k)).into_owned();
                let out = self.apply_raw(&mid);
                choi.view_mut((i * m, j * m), (m, m)).copy_from(&out);
            }
        }
        Ok(Self::from_choi_unchecked(n, m, ComplexMatrix::wrap(choi)))
    }

    /// `φ*`, defined by `Tr(φ(a) b) = Tr(a φ*(b))`.
    pub fn adjoint_star(&self) -> MatMap {
        let (n, m) = (self.d_in, self.d_out);
        let c = self.choi.as_dmatrix();
        // φ*(e_ts)[j,i] = φ(e_ij)[s,t]
        let choi = DMatrix::from_fn(n * m, n * m, |r, col| {
            let (t, j) = (r / n, r % n);
            let (s, i) = (col / n, col % n);
            c[(i * m + s, j * m + t)]
        });
        Self::from_choi_unchecked(m, n, ComplexMatrix::wrap(choi))
    }

    /// `φ^t: a ↦ φ(aᵗ)ᵗ`. Its Choi matrix is the full transpose of `C_φ`.
    pub fn transpose_conj(&self) -> MatMap {
        Self::from_choi_unchecked(self.d_in, self.d_out, self.choi.transpose())
    }

    /// `Tr(C_φ C_ψ)`.
    pub fn pairing(&self, other: &MatMap) -> Result<f64> {
        Ok(self.pairing_complex(other)?.re)
    }

    pub fn pairing_complex(&self, other: &MatMap) -> Result<C64> {
        if self.d_in != other.d_in || self.d_out != other.d_out {
            return Err(Error::DimensionMismatch(format!(
                "pairing needs equal shapes, got M_{}->M_{} and M_{}->M_{}",
                self.d_in, self.d_out, other.d_in, other.d_out
            )));
        }
        Ok(self.choi.trace_product(&other.choi))
    }

    /// `(ι_d ⊗ φ)(X)` for `X` on `C^d ⊗ C^{d_in}`.
    pub fn amplify(&self, x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
        if x.rows() != d * self.d_in || x.cols() != d * self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "amplify expects a {0}x{0} matrix, got {1}x{2}",
                d * self.d_in,
                x.rows(),
                x.cols()
            )));
        }
        let (n, m) = (self.d_in, self.d_out);
        let xm = x.as_dmatrix();
        let mut out = DMatrix::zeros(d * m, d * m);
        for i in 0..d {
            for j in 0..d {
                let blk = xm.view((i * n, j * n), (n, n)).into_owned();
                out.view_mut((i * m, j * m), (m, m)).copy_from(&self.apply_raw(&blk));
            }
        }
        Ok(ComplexMatrix::wrap(out))
    }

    /// Range projection of `φ(1)`.
    pub fn range_projection(&self) -> Result<Projection> {
        let img = self.apply(&ComplexMatrix::identity(self.d_in))?;
        Projection::spectral(&HermitianMatrix::new(img)?, DEFAULT_PSD_TOL)
    }

    /// Range projection of `φ*(1)`.
    pub fn support_projection(&self) -> Result<Projection> {
        self.adjoint_star().range_projection()
    }

    /// `ψ(a) = Tr(a)·φ(1) + φ(a)`.
    pub fn sp_trace_padding(&self) -> Result<MatMap> {
        if self.d_in != self.d_out {
            return Err(Error::DimensionMismatch("trace padding needs a square map".into()));
        }
        let one = self.apply(&ComplexMatrix::identity(self.d_in))?;
        let pad = crate::linalg::tensor(&ComplexMatrix::identity(self.d_in), &one);
        Ok(Self::from_choi_unchecked(self.d_in, self.d_out, &pad + &self.choi))
    }

    /// `Σ_k w_k φ_k`.
    pub fn linear_combination(terms: &[(f64, &MatMap)]) -> Result<MatMap> {
        let (_, first) = terms.first().ok_or_else(|| Error::Invalid("empty combination".into()))?;
        let (n, m) = (first.d_in, first.d_out);
        let mut acc = DMatrix::zeros(n * m, n * m);
        for (w, map) in terms {
            if map.d_in != n || map.d_out != m {
                return Err(Error::DimensionMismatch("combination of differently shaped maps".into()));
            }
            acc += map.choi.as_dmatrix() * C64::new(*w, 0.0);
        }
        Ok(Self::from_choi_unchecked(n, m, ComplexMatrix::wrap(acc)))
    }

    pub fn scaled(&self, w: f64) -> MatMap {
        Self::from_choi_unchecked(self.d_in, self.d_out, self.choi.scale(w))
    }

    /// Largest entrywise Choi difference.
    pub fn distance(&self, other: &MatMap) -> f64 {
        if self.d_in != other.d_in || self.d_out != other.d_out {
            return f64::INFINITY;
        }
        self.choi.max_abs_diff(&other.choi)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map serialization cannot fail")
    }
}

#[derive(Serialize)]
struct ChoiJsonOut<'a> {
    d_in: usize,
    d_out: usize,
    choi: &'a ComplexMatrix,
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum MapJsonIn {
    Choi {
        d_in: usize,
        d_out: usize,
        choi: ComplexMatrix,
    },
    Kraus {
        kraus: Vec<ComplexMatrix>,
        #[serde(default)]
        pre_transpose: bool,
    },
}

impl Serialize for MatMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ChoiJsonOut { d_in: self.d_in, d_out: self.d_out, choi: &self.choi }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = match MapJsonIn::deserialize(deserializer)? {
            MapJsonIn::Choi { d_in, d_out, choi } => MatMap::from_choi(d_in, d_out, choi),
            MapJsonIn::Kraus { kraus, pre_transpose } => MatMap::kraus_sum(&kraus, pre_transpose),
        }
        .map_err(D::Error::custom)?;
        if !map.hermiticity_preserving {
            let defect = (map.choi.as_dmatrix() - map.choi.adjoint().as_dmatrix()).norm();
            if defect > HERMITIAN_REPAIR_LIMIT * map.choi.frobenius_norm().max(1.0) {
                return Err(D::Error::custom(format!("Choi matrix is not Hermitian (defect {defect:.3e})")));
            }
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, partial_transpose, tensor};
    use crate::random::{ginibre, rng};

    fn cm(m: DMatrix<C64>) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(m).unwrap()
    }

    fn random_matrix(seed: u64, r: usize, c: usize) -> ComplexMatrix {
        cm(ginibre(&mut rng(seed), r, c))
    }

    /// Σ_k V_k* a V_k evaluated directly.
    fn kraus_apply(vs: &[ComplexMatrix], a: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = DMatrix::zeros(vs[0].cols(), vs[0].cols());
        for v in vs {
            acc += v.adjoint().as_dmatrix() * a.as_dmatrix() * v.as_dmatrix();
        }
        cm(acc)
    }

    #[test]
    fn ad_identity_is_identity_map() {
        let id = MatMap::ad(&ComplexMatrix::identity(2));
        assert_eq!(id, MatMap::identity_map(2));
        let c = id.choi();
        for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(c[(r, col)], C64::new(1.0, 0.0));
        }
        assert_eq!(c.iter().filter(|z| z.norm() > 0.0).count(), 4);
    }

    #[test]
    fn ad_e11_choi() {
        // V = e_11: V* e_ij V = δ_i1 δ_j1 e_11, so C = e_11 ⊗ e_11.
        let e11 = ComplexMatrix::unit(2, 0, 0);
        let m = MatMap::ad(&e11);
        assert_eq!(m.choi(), &tensor(&e11, &e11));
    }

    #[test]
    fn ad_unitary_has_rank_one_choi_with_trace_n() {
        let u = cm(crate::random::unitary(&mut rng(11), 3));
        let m = MatMap::ad(&u);
        let e = eigh(&m.hermitian_choi().unwrap()).unwrap();
        assert!((m.choi().trace().re - 3.0).abs() < 1e-12);
        assert!(e.values[..8].iter().all(|v| v.abs() < 1e-12));
        assert!((e.values[8] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rectangular_ad_matches_definition() {
        let v = random_matrix(2, 3, 2);
        let m = MatMap::ad(&v);
        assert_eq!((m.d_in(), m.d_out()), (3, 2));
        let a = random_matrix(3, 3, 3);
        let direct = kraus_apply(std::slice::from_ref(&v), &a);
        assert!(m.apply(&a).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn builtin_maps() {
        assert_eq!(MatMap::transpose_map(2).choi(), &swap(2));
        assert_eq!(MatMap::trace_map(2).choi(), &ComplexMatrix::identity(4));
        // Tr C_ι = Σ_i Tr(e_ii) = 3.
        assert!((MatMap::identity_map(3).choi().trace().re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn apply_examples() {
        let a = random_matrix(4, 2, 2);
        assert!(MatMap::identity_map(2).apply(&a).unwrap().max_abs_diff(&a) < 1e-15);
        let t = MatMap::transpose_map(2).apply(&ComplexMatrix::unit(2, 0, 1)).unwrap();
        assert_eq!(t, ComplexMatrix::unit(2, 1, 0));
        let tr = MatMap::trace_map(2).apply(&ComplexMatrix::unit(2, 0, 0)).unwrap();
        assert_eq!(tr, ComplexMatrix::identity(2));
        assert!(MatMap::trace_map(2).apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn compose_examples() {
        let v = random_matrix(5, 3, 3);
        let w = random_matrix(6, 3, 3);
        let lhs = MatMap::ad(&v).compose(&MatMap::ad(&w)).unwrap();
        let rhs = MatMap::ad(&(&w * &v));
        assert!(lhs.distance(&rhs) < 1e-11);

        let phi = MatMap::kraus_sum(&[v.clone(), w.clone()], true).unwrap();
        assert!(MatMap::identity_map(3).compose(&phi).unwrap().distance(&phi) < 1e-12);
        let tt = MatMap::transpose_map(3).compose(&MatMap::transpose_map(3)).unwrap();
        assert_eq!(tt, MatMap::identity_map(3));
        assert!(MatMap::identity_map(2).compose(&phi).is_err());
    }

    /// Brute force: Tr(φ(e_ij) e_kl) == Tr(e_ij φ*(e_kl)) for all units.
    fn check_adjoint_identity(phi: &MatMap) {
        let star = phi.adjoint_star();
        assert_eq!((star.d_in(), star.d_out()), (phi.d_out(), phi.d_in()));
        for i in 0..phi.d_in() {
            for j in 0..phi.d_in() {
                for k in 0..phi.d_out() {
                    for l in 0..phi.d_out() {
                        let a = ComplexMatrix::unit(phi.d_in(), i, j);
                        let b = ComplexMatrix::unit(phi.d_out(), k, l);
                        let lhs = phi.apply(&a).unwrap().trace_product(&b);
                        let rhs = a.trace_product(&star.apply(&b).unwrap());
                        assert!((lhs - rhs).norm() < 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_star_examples() {
        assert_eq!(MatMap::identity_map(3).adjoint_star(), MatMap::identity_map(3));
        assert_eq!(MatMap::trace_map(2).adjoint_star(), MatMap::trace_map(2));
        let v = random_matrix(7, 3, 2);
        let ad = MatMap::ad(&v);
        check_adjoint_identity(&ad);
        assert!(ad.adjoint_star().distance(&MatMap::ad(&v.adjoint())) < 1e-12);
        let phi = MatMap::kraus_sum(&[random_matrix(8, 2, 3), random_matrix(9, 2, 3)], true).unwrap();
        check_adjoint_identity(&phi);
        assert_eq!(phi.adjoint_star().adjoint_star(), phi);
    }

    #[test]
    fn transpose_conj_examples() {
        assert_eq!(MatMap::transpose_map(3).transpose_conj(), MatMap::transpose_map(3));
        assert_eq!(MatMap::identity_map(3).transpose_conj(), MatMap::identity_map(3));
        let v = random_matrix(10, 3, 3);
        let ad = MatMap::ad(&v);
        // Oracle: expand φ(aᵗ)ᵗ on the basis.
        let expanded = MatMap::from_fn(3, 3, |a| ad.apply(&a.transpose()).unwrap().transpose()).unwrap();
        assert!(ad.transpose_conj().distance(&expanded) < 1e-12);
        assert!(ad.transpose_conj().distance(&MatMap::ad(&v.conj())) < 1e-12);
        let lhs = ad.adjoint_star().transpose_conj();
        let rhs = ad.transpose_conj().adjoint_star();
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    /// Tr(C_φ C_ψ) from the defining double sum Σ_{ij} Tr(φ(e_ij) ψ(e_ji)).
    fn pairing_oracle(phi: &MatMap, psi: &MatMap) -> f64 {
        let n = phi.d_in();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += phi.image_of_unit(i, j).trace_product(&psi.image_of_unit(j, i));
            }
        }
        acc.re
    }

    #[test]
    fn pairing_examples() {
        let id = MatMap::identity_map(2);
        assert!((pairing_oracle(&id, &id) - 4.0).abs() < 1e-15);
        assert!((id.pairing(&id).unwrap() - 4.0).abs() < 1e-15);
        let t = MatMap::transpose_map(2);
        assert!((pairing_oracle(&id, &t) - 2.0).abs() < 1e-15);
        assert!((id.pairing(&t).unwrap() - 2.0).abs() < 1e-15);
        let tr = MatMap::trace_map(2);
        assert!((id.pairing(&tr).unwrap() - 2.0).abs() < 1e-15);
        assert!(id.pairing(&MatMap::identity_map(3)).is_err());
    }

    #[test]
    fn amplify_examples() {
        let x = random_matrix(12, 4, 4);
        assert!(MatMap::identity_map(2).amplify(&x, 2).unwrap().max_abs_diff(&x) < 1e-15);
        let pt = partial_transpose(&x, 2, 2, Side::Second).unwrap();
        assert!(MatMap::transpose_map(2).amplify(&x, 2).unwrap().max_abs_diff(&pt) < 1e-15);
        // Blockwise: block (i,j) of C_ι is e_ij, and Tr(e_ij)·1 = δ_ij 1.
        let c_id = MatMap::identity_map(2).choi().clone();
        let out = MatMap::trace_map(2).amplify(&c_id, 2).unwrap();
        assert_eq!(out, ComplexMatrix::identity(4));
    }

    #[test]
    fn range_and_support_projections() {
        let e11 = ComplexMatrix::unit(3, 0, 0);
        let r = MatMap::ad(&e11).range_projection().unwrap();
        assert_eq!(r.rank(), 1);
        assert!(r.matrix().max_abs_diff(&e11) < 1e-12);
        assert_eq!(MatMap::identity_map(3).range_projection().unwrap().rank(), 3);

        // V of rank 2: Ad V(1) = V*V whose range is a 2-dim subspace.
        let g = random_matrix(13, 3, 2);
        let v = &g * &random_matrix(14, 2, 3);
        let p = MatMap::ad(&v).range_projection().unwrap();
        assert_eq!(p.rank(), 2);
        let vv = &v.adjoint() * &v;
        let proj_vv = p.matrix() * &vv;
        assert!(proj_vv.max_abs_diff(&vv) < 1e-10);
        // Support of Ad V is the range of V V*.
        let s = MatMap::ad(&v).support_projection().unwrap();
        let vvs = &v * &v.adjoint();
        assert_eq!(s.rank(), 2);
        assert!((s.matrix() * &vvs).max_abs_diff(&vvs) < 1e-10);
    }

    #[test]
    fn sp_trace_padding_examples() {
        let id = MatMap::identity_map(2);
        let psi = id.sp_trace_padding().unwrap();
        let expect = &ComplexMatrix::identity(4) + id.choi();
        assert!(psi.choi().max_abs_diff(&expect) < 1e-15);
        // Partial transpose is I + SWAP with spectrum {0, 2, 2, 2}.
        let pt = partial_transpose(psi.choi(), 2, 2, Side::Second).unwrap();
        let e = eigh(&HermitianMatrix::new(pt).unwrap()).unwrap();
        assert!(e.values[0].abs() < 1e-12 && (e.values[3] - 2.0).abs() < 1e-12);

        // trace_map(1) = 2·1, so the padded Choi is 1 ⊗ 2·1 + 1 ⊗ 1.
        let tr = MatMap::trace_map(2).sp_trace_padding().unwrap();
        assert_eq!(tr.choi(), &ComplexMatrix::identity(4).scale(3.0));
    }

    #[test]
    fn json_formats() {
        let phi = MatMap::kraus_sum(&[random_matrix(15, 2, 2)], false).unwrap();
        let back = MatMap::from_json_str(&phi.to_json()).unwrap();
        assert!(back.distance(&phi) < 1e-15);

        let k = r#"{"kraus":[{"rows":2,"cols":2,"data":[[[1,0],[0,0]],[[0,0],[1,0]]]}],"pre_transpose":true}"#;
        assert_eq!(MatMap::from_json_str(k).unwrap(), MatMap::transpose_map(2));

        let bad = r#"{"d_in":1,"d_out":2,"choi":{"rows":2,"cols":2,"data":[[[0,0],[1,0]],[[0,0],[0,0]]]}}"#;
        assert!(MatMap::from_json_str(bad).is_err());
        assert!(MatMap::from_json_str(r#"{"d_in":2}"#).is_err());
    }
}
