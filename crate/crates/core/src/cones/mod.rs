//! Membership tests for the cones P, CP, coCP, PPT = CP∩coCP, DEC = CP∨coCP
//! and SP, each returning a three-valued [`Verdict`] with a re-checkable
//! certificate or witness.

mod decompose;
pub mod gilbert;
pub mod product;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use decompose::{decompose, Decomposition};
pub use gilbert::{gilbert_separable_distance, reconstruct, EnsembleTerm, GilbertResult};
use product::{optimize_product_seeded, product_value, Sense};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh_raw, partial_transpose_raw, psd_from_eigh, ComplexMatrix, HermitianMatrix, PsdCheck, Side, C64,
};
use crate::mapcones::ConeSpec;
use crate::matmap::MatMap;
use crate::random::sub_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Member,
    NonMember,
    Undetermined,
}

/// Which matrix a spectrum or eigenvector refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixRole {
    Choi,
    PartialTranspose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompressionSide {
    Range,
    Support,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    PsdSpectrum {
        matrix: MatrixRole,
        spectrum: Vec<f64>,
    },
    PptSpectra {
        choi_spectrum: Vec<f64>,
        partial_transpose_spectrum: Vec<f64>,
    },
    /// `C = P + Γ(Q)` with `P, Q ⪰ 0`.
    Decomposition {
        p: ComplexMatrix,
        q: ComplexMatrix,
        residual: f64,
    },
    /// PPT Choi matrix on `2⊗2` or `2⊗3`, where PPT states are separable.
    LowDimensionPpt {
        d_in: usize,
        d_out: usize,
        choi_spectrum: Vec<f64>,
        partial_transpose_spectrum: Vec<f64>,
    },
    /// The map factors through a rank-≤2 range or support projection and the
    /// compressed map is a low-dimensional PPT map.
    CompressedPpt {
        side: CompressionSide,
        isometry: ComplexMatrix,
        compressed: MatMap,
        choi_spectrum: Vec<f64>,
        partial_transpose_spectrum: Vec<f64>,
    },
    /// `C / scale = Σ_k p_k a_k ⊗ b_k` up to `distance` in Frobenius norm.
    SeparableEnsemble {
        scale: f64,
        distance: f64,
        iterations: usize,
        terms: Vec<EnsembleTerm>,
    },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Unit vector with `x* M x = value < 0`.
    Eigenvector {
        matrix: MatrixRole,
        vector: Vec<C64>,
        value: f64,
    },
    /// Unit product vector with `⟨x⊗y| C |x⊗y⟩ = value < 0`.
    ProductVectors {
        x: Vec<C64>,
        y: Vec<C64>,
        value: f64,
    },
    /// A map from a cone the tested map should pair nonnegatively with.
    Map {
        source: String,
        map: MatMap,
        pairing: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub samples: usize,
    pub min_value: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub certificate: Option<Certificate>,
    pub witness: Option<Witness>,
    pub evidence: Evidence,
}

impl Verdict {
    fn member(certificate: Certificate, evidence: Evidence) -> Self {
        Self { status: Status::Member, certificate: Some(certificate), witness: None, evidence }
    }

    fn non_member(witness: Witness, evidence: Evidence) -> Self {
        Self { status: Status::NonMember, certificate: None, witness: Some(witness), evidence }
    }

    fn undetermined(evidence: Evidence) -> Self {
        Self { status: Status::Undetermined, certificate: None, witness: None, evidence }
    }

    pub fn is_member(&self) -> bool {
        self.status == Status::Member
    }

    pub fn is_non_member(&self) -> bool {
        self.status == Status::NonMember
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serialization cannot fail")
    }

    /// Re-evaluates the certificate or witness from scratch against `phi`,
    /// allowing twice the configured tolerances.
    pub fn recheck(&self, phi: &MatMap, cfg: &TestConfig) -> Result<bool> {
        match self.status {
            Status::Member => match &self.certificate {
                Some(c) => c.recheck(phi, cfg),
                None => Ok(false),
            },
            Status::NonMember => match &self.witness {
                Some(w) => w.recheck(phi, cfg),
                None => Ok(false),
            },
            Status::Undetermined => Ok(true),
        }
    }
}

/// Tolerances and search budgets shared by all tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub psd_tol: f64,
    pub sep_tol: f64,
    pub multistarts: usize,
    pub gilbert_max_iters: usize,
    pub seed: u64,
    /// Samples drawn per sampled dual test or witness pool.
    pub dual_samples: usize,
    /// Iteration cap for the decomposition search.
    pub dec_max_iters: usize,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            psd_tol: crate::linalg::DEFAULT_PSD_TOL,
            sep_tol: 1e-6,
            multistarts: 64,
            gilbert_max_iters: 5000,
            seed: 0,
            dual_samples: 200,
            dec_max_iters: 5000,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.psd_tol > 0.0 && self.sep_tol > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

fn require_hermitian(phi: &MatMap) -> Result<HermitianMatrix> {
    phi.hermitian_choi()
}

fn pt_choi(phi: &MatMap) -> DMatrix<C64> {
    partial_transpose_raw(phi.choi().as_dmatrix(), phi.d_in(), phi.d_out(), Side::Second)
}

fn psd_check(m: &DMatrix<C64>, tol: f64) -> Result<PsdCheck> {
    Ok(psd_from_eigh(&eigh_raw(&crate::linalg::hermitize(m))?, tol))
}

fn eigen_witness(role: MatrixRole, check: &PsdCheck) -> Witness {
    let v = check.witness.as_ref().expect("failed PSD check carries a witness");
    Witness::Eigenvector { matrix: role, vector: v.iter().copied().collect(), value: check.min_eigenvalue }
}

fn single(seed: u64, value: f64) -> Evidence {
    Evidence { samples: 1, min_value: value, seed }
}

/// Pairing threshold: `−tol · max(1, ‖C_φ‖_F ‖C_ψ‖_F)`.
fn pairing_threshold(phi: &MatMap, psi: &MatMap, tol: f64) -> f64 {
    -tol * (phi.choi().frobenius_norm() * psi.choi().frobenius_norm()).max(1.0)
}

/// CP ⟺ Choi matrix PSD.
pub fn test_cp(phi: &MatMap, cfg: &TestConfig) -> Result<Verdict> {
    let h = require_hermitian(phi)?;
    let check = psd_check(h.matrix().as_dmatrix(), cfg.psd_tol)?;
    let ev = single(cfg.seed, check.min_eigenvalue);
    Ok(if check.is_psd {
        Verdict::member(Certificate::PsdSpectrum { matrix: MatrixRole::Choi, spectrum: check.spectrum }, ev)
    } else {
        Verdict::non_member(eigen_witness(MatrixRole::Choi, &check), ev)
    })
}

/// coCP ⟺ `t∘φ` CP ⟺ partial transpose of the Choi matrix PSD.
pub fn test_cocp(phi: &MatMap, cfg: &TestConfig) -> Result<Verdict> {
    require_hermitian(phi)?;
    let check = psd_check(&pt_choi(phi), cfg.psd_tol)?;
    let ev = single(cfg.seed, check.min_eigenvalue);
    Ok(if check.is_psd {
        Verdict::member(
            Certificate::PsdSpectrum { matrix: MatrixRole::PartialTranspose, spectrum: check.spectrum },
            ev,
        )
    } else {
        Verdict::non_member(eigen_witness(MatrixRole::PartialTranspose, &check), ev)
    })
}

/// PPT map ⟺ CP and coCP.
pub fn test_ppt_map(phi: &MatMap, cfg: &TestConfig) -> Result<Verdict> {
    let cp = test_cp(phi, cfg)?;
    if !cp.is_member() {
        return Ok(cp);
    }
    let cocp = test_cocp(phi, cfg)?;
    if !cocp.is_member() {
        return Ok(cocp);
    }
    let spectrum = |v: &Verdict| match &v.certificate {
        Some(Certificate::PsdSpectrum { spectrum, .. }) => spectrum.clone(),
        _ => unreachable!("cp/cocp member verdicts carry spectra"),
    };
    let min = cp.evidence.min_value.min(cocp.evidence.min_value);
    Ok(Verdict::member(
        Certificate::PptSpectra { choi_spectrum: spectrum(&cp), partial_transpose_spectrum: spectrum(&cocp) },
        single(cfg.seed, min),
    ))
}

/// Positivity via block-positivity of the Choi matrix. Only ever refutes:
/// returns `NonMember` with a product-vector witness, or `Undetermined`.
pub fn test_positive(phi: &MatMap, cfg: &TestConfig) -> Result<Verdict> {
    let h = require_hermitian(phi)?;
    let c = h.matrix().as_dmatrix();
    let best = optimize_product_seeded(c, phi.d_in(), phi.d_out(), Sense::Min, cfg.multistarts, cfg.seed, "positive");
    let evidence = Evidence { samples: cfg.multistarts.max(1), min_value: best.value, seed: cfg.seed };
    let scale = eigh_raw(c)?.spectral_norm().max(1.0);
    Ok(if best.value < -cfg.psd_tol * scale {
        Verdict::non_member(
            Witness::ProductVectors {
                x: best.x.iter().copied().collect(),
                y: best.y.iter().copied().collect(),
                value: best.value,
            },
            evidence,
        )
    } else {
        Verdict::undetermined(evidence)
    })
}

/// Decomposability `φ ∈ CP ∨ coCP`. Refutation uses the PPT cone as the
/// witness pool, since decomposable maps pair nonnegatively with PPT maps.
pub fn test_decomposable(phi: &MatMap, cfg: &TestConfig) -> Result<Verdict> {
    let h = require_hermitian(phi)?;
    let c = h.matrix().as_dmatrix();
    let target = cfg.sep_tol * c.norm().max(f64::MIN_POSITIVE);
    let dec = decompose(c, phi.d_in(), phi.d_out(), target, cfg.dec_max_iters)?;
    if dec.residual <= target {
        return Ok(Verdict::member(
            Certificate::Decomposition {
                p: ComplexMatrix::wrap(dec.p),
                q: ComplexMatrix::wrap(dec.q),
                residual: dec.residual,
            },
            Evidence { samples: dec.iterations, min_value: dec.residual, seed: cfg.seed },
        ));
    }
    test_dual_membership(phi, &crate::mapcones::ppt_cone(phi.d_in(), phi.d_out())?, cfg)
}

/// Lowest pairing over a pool, lowest index on ties; the flag says whether it
/// crosses the rejection threshold.
fn most_negative_pairing(
    phi: &MatMap,
    pool: Vec<(String, MatMap)>,
    cfg: &TestConfig,
) -> Result<Option<(String, MatMap, f64, bool)>> {
    let mut best: Option<(String, MatMap, f64, bool)> = None;
    for (source, psi) in pool {
        let v = phi.pairing(&psi)?;
        let violates = v < pairing_threshold(phi, &psi, cfg.psd_tol);
        if best.as_ref().is_none_or(|b| v < b.2) {
            best = Some((source, psi, v, violates));
        }
    }
    Ok(best)
}

/// Dimensions where PPT is equivalent to separability.
pub fn ppt_decides_separability(d_in: usize, d_out: usize) -> bool {
    d_in.min(d_out) <= 2 && d_in * d_out <= 6
}

/// Separable ensemble for the trace-normalized Choi matrix.
pub fn choi_gilbert(phi: &MatMap, cfg: &TestConfig) -> Result<(f64, GilbertResult)> {
    let h = require_hermitian(phi)?;
    let scale = h.trace();
    if scale <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let x = HermitianMatrix::new(h.matrix().scale(1.0 / scale))?;
    Ok((scale, gilbert_separable_distance(&x, phi.d_in(), phi.d_out(), cfg)?))
}

fn compressed_ppt(phi: &MatMap, side: CompressionSide, cfg: &TestConfig) -> Result<Option<Certificate>> {
    let proj = match side {
        CompressionSide::Range => phi.range_projection()?,
        CompressionSide::Support => phi.support_projection()?,
    };
    let r = proj.rank();
    let full = match side {
        CompressionSide::Range => phi.d_out(),
        CompressionSide::Support => phi.d_in(),
    };
    let other = match side {
        CompressionSide::Range => phi.d_in(),
        CompressionSide::Support => phi.d_out(),
    };
    if r == 0 || r >= full || !ppt_decides_separability(r, other) {
        return Ok(None);
    }
    let v = ComplexMatrix::wrap(proj.range_basis()?);
    let (compressed, rebuilt) = match side {
        // b ↦ V* b V on the output, rebuilt by c ↦ V c V*.
        CompressionSide::Range => {
            let c = MatMap::ad(&v).compose(phi)?;
            let back = MatMap::ad(&v.adjoint()).compose(&c)?;
            (c, back)
        }
        CompressionSide::Support => {
            let c = phi.compose(&MatMap::ad(&v.adjoint()))?;
            let back = c.compose(&MatMap::ad(&v))?;
            (c, back)
        }
    };
    let scale = phi.choi().frobenius_norm().max(1.0);
    if (rebuilt.choi() - phi.choi()).frobenius_norm() > 1e3 * cfg.psd_tol * scale {
        return Ok(None);
    }
    match test_ppt_map(&compressed, cfg)? {
        Verdict { status: Status::Member, certificate: Some(Certificate::PptSpectra { choi_spectrum, partial_transpose_spectrum }), .. } => {
            Ok(Some(Certificate::CompressedPpt { side, isometry: v, compressed, choi_spectrum, partial_transpose_spectrum }))
        }
        _ => Ok(None),
    }
}

/// Margin added to the Gilbert hyperplane so the derived block-positive
/// matrix stays positive despite an inexact product-state maximum.
const HYPERPLANE_MARGIN: f64 = 1e-6;

/// Super-positivity (Choi matrix separable). Decision ladder:
/// NPT rejection; low-dimensional PPT rule; PPT rule after compressing to a
/// rank-≤2 range or support; Gilbert distance; witness search over positive
/// maps; otherwise undetermined.
pub fn test_superpositive(phi: &MatMap, cfg: &TestConfig) -> Result<Verdict> {
    let ppt = test_ppt_map(phi, cfg)?;
    if ppt.is_non_member() {
        return Ok(ppt);
    }
    let Some(Certificate::PptSpectra { choi_spectrum, partial_transpose_spectrum }) = ppt.certificate else {
        unreachable!("PPT member verdicts carry spectra")
    };
    let (d_in, d_out) = (phi.d_in(), phi.d_out());
    if ppt_decides_separability(d_in, d_out) {
        return Ok(Verdict::member(
            Certificate::LowDimensionPpt { d_in, d_out, choi_spectrum, partial_transpose_spectrum },
            ppt.evidence,
        ));
    }
    for side in [CompressionSide::Range, CompressionSide::Support] {
        if let Some(cert) = compressed_ppt(phi, side, cfg)? {
            return Ok(Verdict::member(cert, ppt.evidence));
        }
    }

    let h = require_hermitian(phi)?;
    let scale = h.trace();
    if scale <= cfg.psd_tol * h.frobenius_norm().max(1.0) {
        // PSD with zero trace: the zero map.
        return Ok(Verdict::member(
            Certificate::SeparableEnsemble { scale: 0.0, distance: 0.0, iterations: 0, terms: vec![] },
            ppt.evidence,
        ));
    }
    let (scale, g) = choi_gilbert(phi, cfg)?;
    if g.distance <= cfg.sep_tol {
        return Ok(Verdict::member(
            Certificate::SeparableEnsemble {
                scale,
                distance: g.distance,
                iterations: g.iterations,
                terms: g.ensemble(),
            },
            Evidence { samples: g.iterations, min_value: g.distance, seed: cfg.seed },
        ));
    }

    // Witness search. Decomposable maps pair nonnegatively with every PPT
    // Choi matrix, so only non-decomposable positive maps can refute here.
    let mut pool: Vec<(String, MatMap)> = Vec::new();
    if d_in == 3 && d_out == 3 {
        pool.push(("choi_map".into(), crate::fixtures::choi_map()));
    }
    if let Some(w) = hyperplane_witness(phi, scale, &g, cfg)? {
        pool.push(("gilbert_hyperplane".into(), w));
    }
    let samples = pool.len();
    match most_negative_pairing(phi, pool, cfg)? {
        Some((source, map, value, true)) => Ok(Verdict::non_member(
            Witness::Map { source, map, pairing: value },
            Evidence { samples, min_value: value, seed: cfg.seed },
        )),
        _ => Ok(Verdict::undetermined(Evidence { samples: g.iterations, min_value: g.distance, seed: cfg.seed })),
    }
}

/// Block-positive `Z = (c + margin)·1 − Ĝ`, with `Ĝ` the normalized Gilbert
/// residual and `c` the best product-state value of `Ĝ` found. Returned only
/// when the positivity search on `Z` finds no violation.
fn hyperplane_witness(phi: &MatMap, _scale: f64, g: &GilbertResult, cfg: &TestConfig) -> Result<Option<MatMap>> {
    if g.lower_bound <= HYPERPLANE_MARGIN {
        return Ok(None);
    }
    let (d_in, d_out) = (phi.d_in(), phi.d_out());
    let h = require_hermitian(phi)?;
    let x = h.matrix().scale(1.0 / h.trace());
    let y = gilbert::reconstruct(&g.ensemble()).expect("non-empty ensemble");
    let resid = &x - &y;
    let ghat = resid.scale(1.0 / resid.frobenius_norm());
    let c = optimize_product_seeded(ghat.as_dmatrix(), d_in, d_out, Sense::Max, cfg.multistarts, cfg.seed, "hyperplane").value;
    let z = &ComplexMatrix::identity(d_in * d_out).scale(c + HYPERPLANE_MARGIN) - &ghat;
    let map = MatMap::from_choi(d_in, d_out, z)?;
    let pos = test_positive(&map, &cfg.with_seed(sub_seed(cfg.seed, "hyperplane-check", 0)))?;
    Ok((!pos.is_non_member()).then_some(map))
}

/// Sampled dual-cone test `φ ∈ J°`: refutes with the most negative pairing
/// against J's fixtures (checked first) or its samples.
pub fn test_dual_membership(phi: &MatMap, cone: &ConeSpec, cfg: &TestConfig) -> Result<Verdict> {
    let fixtures: Vec<(String, MatMap)> = cone
        .extreme_fixtures
        .iter()
        .enumerate()
        .map(|(k, m)| (format!("{}:fixture[{k}]", cone.name), m.clone()))
        .collect();
    let nfix = fixtures.len();
    let fixture_hit = most_negative_pairing(phi, fixtures, cfg)?;
    let sampled: Vec<(String, MatMap)> = (0..cfg.dual_samples)
        .into_par_iter()
        .map(|k| (format!("{}:sample[{k}]", cone.name), cone.sample(sub_seed(cfg.seed, "dual", k as u64))))
        .collect();
    let sample_hit = most_negative_pairing(phi, sampled, cfg)?;
    let samples = nfix + cfg.dual_samples;
    let min_value = [&fixture_hit, &sample_hit]
        .iter()
        .filter_map(|h| h.as_ref().map(|b| b.2))
        .fold(f64::INFINITY, f64::min);
    let evidence = Evidence { samples, min_value, seed: cfg.seed };
    for (source, map, value, violates) in [fixture_hit, sample_hit].into_iter().flatten() {
        if violates {
            return Ok(Verdict::non_member(Witness::Map { source, map, pairing: value }, evidence));
        }
    }
    Ok(Verdict::undetermined(evidence))
}

fn spectrum_ok(m: &DMatrix<C64>, tol: f64) -> Result<bool> {
    Ok(psd_check(m, tol)?.is_psd)
}

impl Certificate {
    pub fn recheck(&self, phi: &MatMap, cfg: &TestConfig) -> Result<bool> {
        let tol = 2.0 * cfg.psd_tol;
        let c = phi.choi().as_dmatrix();
        Ok(match self {
            Certificate::PsdSpectrum { matrix: MatrixRole::Choi, .. } => spectrum_ok(c, tol)?,
            Certificate::PsdSpectrum { matrix: MatrixRole::PartialTranspose, .. } => spectrum_ok(&pt_choi(phi), tol)?,
            Certificate::PptSpectra { .. } => spectrum_ok(c, tol)? && spectrum_ok(&pt_choi(phi), tol)?,
            Certificate::LowDimensionPpt { d_in, d_out, .. } => {
                (*d_in, *d_out) == (phi.d_in(), phi.d_out())
                    && ppt_decides_separability(*d_in, *d_out)
                    && spectrum_ok(c, tol)?
                    && spectrum_ok(&pt_choi(phi), tol)?
            }
            Certificate::CompressedPpt { side, isometry, compressed, .. } => {
                let rebuilt = match side {
                    CompressionSide::Range => MatMap::ad(&isometry.adjoint()).compose(compressed)?,
                    CompressionSide::Support => compressed.compose(&MatMap::ad(isometry))?,
                };
                let scale = phi.choi().frobenius_norm().max(1.0);
                (rebuilt.choi() - phi.choi()).frobenius_norm() <= 2e3 * cfg.psd_tol * scale
                    && ppt_decides_separability(compressed.d_in(), compressed.d_out())
                    && spectrum_ok(compressed.choi().as_dmatrix(), tol)?
                    && spectrum_ok(&pt_choi(compressed), tol)?
            }
            Certificate::Decomposition { p, q, .. } => {
                let resid = (c - p.as_dmatrix()
                    - partial_transpose_raw(q.as_dmatrix(), phi.d_in(), phi.d_out(), Side::Second))
                .norm();
                spectrum_ok(p.as_dmatrix(), tol)?
                    && spectrum_ok(q.as_dmatrix(), tol)?
                    && resid <= 2.0 * cfg.sep_tol * c.norm().max(f64::MIN_POSITIVE)
            }
            Certificate::SeparableEnsemble { scale, terms, .. } => {
                if terms.is_empty() {
                    return Ok(c.norm() <= tol);
                }
                let weights_ok = terms.iter().all(|t| t.weight >= 0.0)
                    && (terms.iter().map(|t| t.weight).sum::<f64>() - 1.0).abs() <= 1e-9;
                let factors_ok = terms
                    .iter()
                    .map(|t| Ok(spectrum_ok(t.a.as_dmatrix(), tol)? && spectrum_ok(t.b.as_dmatrix(), tol)?))
                    .collect::<Result<Vec<bool>>>()?
                    .into_iter()
                    .all(|b| b);
                let y = reconstruct(terms).expect("non-empty");
                let x = phi.choi().scale(1.0 / scale);
                weights_ok && factors_ok && (&x - &y).frobenius_norm() <= 2.0 * cfg.sep_tol
            }
        })
    }
}

impl Witness {
    /// `true` when the witness still produces a strictly negative value.
    pub fn recheck(&self, phi: &MatMap, _cfg: &TestConfig) -> Result<bool> {
        Ok(match self {
            Witness::Eigenvector { matrix, vector, .. } => {
                let v = DVector::from_vec(vector.clone());
                let m = match matrix {
                    MatrixRole::Choi => phi.choi().as_dmatrix().clone(),
                    MatrixRole::PartialTranspose => pt_choi(phi),
                };
                (v.adjoint() * m * &v)[(0, 0)].re < 0.0
            }
            Witness::ProductVectors { x, y, .. } => {
                product_value(phi.choi().as_dmatrix(), &DVector::from_vec(x.clone()), &DVector::from_vec(y.clone()))
                    < 0.0
            }
            Witness::Map { map, .. } => phi.pairing(map)? < 0.0,
        })
    }
}
