use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::{contradictions, summarize, ClauseSummary, TableRow, Truth, VerificationReport};
use super::{builtin_cone, d2_projection, ppt_cone, random_decomposable, ConeName, ConeSpec};
use crate::cones::{
    choi_gilbert, test_cocp, test_cp, test_decomposable, test_dual_membership, test_positive, test_ppt_map,
    test_superpositive, Certificate, MatrixRole, Status, TestConfig, Verdict, Witness,
};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh_raw, hermitize, partial_transpose_raw, psd_from_eigh, ComplexMatrix, Side,
};
use crate::matmap::MatMap;
use crate::random::{sub_rng, sub_seed};
use crate::states;

/// Gilbert target used by the state-level checks.
pub const PPT_DISTANCE_TARGET: f64 = 1e-4;

pub fn truth_of(v: &Verdict) -> Truth {
    match v.status {
        Status::Member => Truth::Holds,
        Status::NonMember => Truth::Fails,
        Status::Undetermined => Truth::Unrefuted,
    }
}

fn psd_truth(m: &ComplexMatrix, tol: f64) -> Result<(Truth, f64)> {
    let check = psd_from_eigh(&eigh_raw(&hermitize(m.as_dmatrix()))?, tol);
    Ok((if check.is_psd { Truth::Holds } else { Truth::Fails }, check.min_eigenvalue))
}

/// Membership in `J°` decided by a concrete dual description, when one is
/// available: `CP° = CP`, `coCP° = coCP`, `P° = SP`, `SP° = P`,
/// `PPT° = DEC`, `DEC° = PPT`, and `D₂ = P` at `n = 2`.
pub fn concrete_dual(j: &ConeSpec, phi: &MatMap, cfg: &TestConfig) -> Result<Option<Verdict>> {
    Ok(Some(match j.name {
        ConeName::CP => test_cp(phi, cfg)?,
        ConeName::CoCP => test_cocp(phi, cfg)?,
        ConeName::P => test_superpositive(phi, cfg)?,
        ConeName::SP => test_positive(phi, cfg)?,
        ConeName::PPT => test_decomposable(phi, cfg)?,
        ConeName::DEC => test_ppt_map(phi, cfg)?,
        ConeName::D2 if j.dim_in == 2 => test_superpositive(phi, cfg)?,
        ConeName::D2 => return Ok(None),
    }))
}

/// Fixtures of `J` followed by `samples` draws.
pub fn alpha_set(j: &ConeSpec, samples: usize, seed: u64) -> Vec<(String, MatMap)> {
    let mut out: Vec<(String, MatMap)> = j
        .extreme_fixtures
        .iter()
        .enumerate()
        .map(|(k, m)| (format!("{}:fixture[{k}]", j.name), m.clone()))
        .collect();
    let drawn: Vec<(String, MatMap)> = (0..samples)
        .into_par_iter()
        .map(|k| (format!("{}:sample[{k}]", j.name), j.sample(sub_seed(seed, "alpha", k as u64))))
        .collect();
    out.extend(drawn);
    out
}

/// A random map drawn from a mixture of families, several of which straddle
/// the cone boundaries.
pub fn mixed_map(n: usize, seed: u64) -> Result<MatMap> {
    let mut rng = sub_rng(seed, "mixed", 0);
    let pick = rng.random_range(0..6);
    let cone = |name| builtin_cone(name, n);
    Ok(match pick {
        0 => cone(ConeName::CP)?.sample(seed),
        1 => cone(ConeName::CoCP)?.sample(seed),
        2 => cone(ConeName::SP)?.sample(seed),
        3 => random_decomposable(&mut rng, n, n),
        4 => {
            let g = crate::random::ginibre(&mut rng, n * n, n * n);
            let h = hermitize(&g);
            MatMap::from_choi(n, n, ComplexMatrix::wrap(h.unscale(h.norm() / n as f64)))?
        }
        _ => {
            // λ·ι + (1−λ)·Tr/n, super-positive iff λ ≤ 1/(n+1).
            let lam: f64 = rng.random();
            let tr = MatMap::trace_map(n);
            MatMap::linear_combination(&[(lam, &MatMap::identity_map(n)), ((1.0 - lam) / n as f64, &tr)])?
        }
    })
}

fn finish(
    theorem: &str,
    n: usize,
    samples: usize,
    cfg: &TestConfig,
    clauses: Vec<ClauseSummary>,
    table: Vec<TableRow>,
    mut counterexamples: Vec<serde_json::Value>,
    phi: Option<&MatMap>,
) -> VerificationReport {
    if let Some((held, failed)) = contradictions(&clauses) {
        counterexamples.push(json!({
            "kind": "contradiction",
            "holds": held,
            "fails": failed,
            "phi": phi.map(|m| serde_json::to_value(m).expect("map serializes")),
        }));
    }
    VerificationReport::new(theorem, n, samples, cfg.seed, clauses, table, counterexamples)
}

fn map_json(m: &MatMap) -> serde_json::Value {
    serde_json::to_value(m).expect("map serializes")
}

/// Dual-test row for `φ ∈ J°`: a sampled search and, when available, the
/// concrete dual description.
fn dual_row(j: &ConeSpec, phi: &MatMap, cfg: &TestConfig) -> Result<(TableRow, Verdict)> {
    let mut row = TableRow::new(0, "dual");
    let dual = test_dual_membership(phi, j, cfg)?;
    row.push("i", truth_of(&dual), dual.evidence.min_value);
    if let Some(v) = concrete_dual(j, phi, cfg)? {
        row.push("i_concrete", truth_of(&v), v.evidence.min_value);
    }
    Ok((row, dual))
}

fn dual_summaries(rows: &[TableRow]) -> Vec<ClauseSummary> {
    let mut out = vec![summarize(rows, "i", false)];
    if rows.iter().any(|r| r.truth("i_concrete").is_some()) {
        out.push(summarize(rows, "i_concrete", false));
    }
    out
}

/// Clause agreement for: `(i) φ ∈ J°`, `(ii) φ∘α ∈ CP`, `(iii) α∘φ ∈ CP`,
/// `(iv) φ̃∘(ι⊗α) ≥ 0`, `(v) (ι⊗α)(C_φ) ≥ 0`, over fixtures and sampled `α ∈ J`.
pub fn verify_thm2(j: &ConeSpec, phi: &MatMap, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let n = j.dim_in;
    let (head, _) = dual_row(j, phi, cfg)?;
    let alphas = alpha_set(j, samples, cfg.seed);
    let ct = phi.choi().transpose();
    let body: Vec<Result<TableRow>> = alphas
        .par_iter()
        .enumerate()
        .map(|(k, (label, alpha))| {
            let mut row = TableRow::new(k + 1, label.clone());
            let ii = test_cp(&phi.compose(alpha)?, cfg)?;
            row.push("ii", truth_of(&ii), ii.evidence.min_value);
            let iii = test_cp(&alpha.compose(phi)?, cfg)?;
            row.push("iii", truth_of(&iii), iii.evidence.min_value);
            let (t4, v4) = psd_truth(&alpha.adjoint_star().amplify(&ct, n)?, cfg.psd_tol)?;
            row.push("iv", t4, v4);
            let (t5, v5) = psd_truth(&alpha.amplify(phi.choi(), n)?, cfg.psd_tol)?;
            row.push("v", t5, v5);
            Ok(row)
        })
        .collect();
    let mut table = vec![head];
    for r in body {
        table.push(r?);
    }
    let mut clauses = dual_summaries(&table);
    for c in ["ii", "iii", "iv", "v"] {
        clauses.push(summarize(&table, c, true));
    }
    Ok(finish("thm2", n, samples, cfg, clauses, table, vec![], Some(phi)))
}

/// [`verify_thm2`] over `count` maps from [`mixed_map`]; one row per map.
pub fn verify_thm2_batch(j: &ConeSpec, count: usize, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let n = j.dim_in;
    let reports: Vec<Result<VerificationReport>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let phi = mixed_map(n, sub_seed(cfg.seed, "thm2-phi", k as u64))?;
            verify_thm2(j, &phi, samples, &cfg.with_seed(sub_seed(cfg.seed, "thm2", k as u64)))
        })
        .collect();
    let mut table = Vec::new();
    let mut counterexamples = Vec::new();
    for (k, r) in reports.into_iter().enumerate() {
        let r = r?;
        let mut row = TableRow::new(k, format!("phi[{k}]"));
        for c in &r.clauses {
            row.push(&c.clause, c.truth, c.refuted as f64);
        }
        table.push(row);
        counterexamples.extend(r.counterexamples.into_iter().map(|c| json!({ "phi_index": k, "detail": c })));
    }
    let names: Vec<String> = table
        .iter()
        .flat_map(|r| r.entries.iter().map(|e| e.clause.clone()))
        .fold(Vec::new(), |mut acc, c| {
            if !acc.contains(&c) {
                acc.push(c);
            }
            acc
        });
    let clauses = names.iter().map(|c| summarize(&table, c, true)).collect();
    Ok(VerificationReport::new(&format!("thm2:{}", j.name), n, count, cfg.seed, clauses, table, counterexamples))
}

/// A positive map `π` with `pairing(m, π) < 0`, read off a non-member
/// super-positivity verdict for `m`.
fn positive_witness(m: &MatMap, v: &Verdict) -> Result<Option<MatMap>> {
    let (d_in, d_out) = (m.d_in(), m.d_out());
    Ok(match &v.witness {
        Some(Witness::Eigenvector { matrix, vector, .. }) => {
            let x = ComplexMatrix::outer(&nalgebra::DVector::from_vec(vector.clone()));
            let choi = match matrix {
                MatrixRole::Choi => x,
                MatrixRole::PartialTranspose => {
                    ComplexMatrix::wrap(partial_transpose_raw(x.as_dmatrix(), d_in, d_out, Side::Second))
                }
            };
            Some(MatMap::from_choi(d_in, d_out, choi)?)
        }
        Some(Witness::Map { map, .. }) => Some(map.clone()),
        _ => None,
    })
}

fn sp_value(v: &Verdict) -> f64 {
    match &v.certificate {
        Some(Certificate::SeparableEnsemble { distance, .. }) => *distance,
        Some(_) => 0.0,
        None => v.evidence.min_value,
    }
}

/// `(i) φ ∈ J°`, `(vi) φ∘α ∈ SP`, `(vii) α∘φ ∈ SP` for an invariant cone `J`.
///
/// A refutation of (vii) at `α` with positive witness `π` yields the explicit
/// dual violation `ψ = α*∘π ∈ J`; a dual violation `ψ` yields `α = ψ*`, for
/// which (vii) must fail. Either implication breaking is a counterexample.
pub fn verify_cor3(j: &ConeSpec, phi: &MatMap, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let n = j.dim_in;
    let (head, dual) = dual_row(j, phi, cfg)?;
    let mut alphas = alpha_set(j, samples, cfg.seed);
    if let Some(Witness::Map { map, .. }) = &dual.witness {
        alphas.push(("dual_witness_adjoint".into(), map.adjoint_star()));
    }
    let rows: Vec<Result<(TableRow, Option<serde_json::Value>)>> = alphas
        .par_iter()
        .enumerate()
        .map(|(k, (label, alpha))| {
            let mut row = TableRow::new(k + 1, label.clone());
            let left = phi.compose(alpha)?;
            let vi = test_superpositive(&left, cfg)?;
            row.push("vi", truth_of(&vi), sp_value(&vi));
            let right = alpha.compose(phi)?;
            let vii = test_superpositive(&right, cfg)?;
            row.push("vii", truth_of(&vii), sp_value(&vii));
            let mut bad = None;
            if vii.is_non_member() {
                if let Some(pi) = positive_witness(&right, &vii)? {
                    let psi = alpha.adjoint_star().compose(&pi)?;
                    let p = phi.pairing(&psi)?;
                    row.push("i_derived", if p < 0.0 { Truth::Fails } else { Truth::Unrefuted }, p);
                    if p >= 0.0 {
                        bad = Some(json!({"kind": "derived_dual_not_negative", "alpha": map_json(alpha), "pairing": p}));
                    }
                }
            }
            if label == "dual_witness_adjoint" && vii.is_member() {
                bad = Some(json!({"kind": "dual_violation_without_composition_failure", "alpha": map_json(alpha)}));
            }
            Ok((row, bad))
        })
        .collect();
    let mut table = vec![head];
    let mut counterexamples = Vec::new();
    for r in rows {
        let (row, bad) = r?;
        table.push(row);
        counterexamples.extend(bad);
    }
    let mut clauses = dual_summaries(&table);
    for c in ["vi", "vii"] {
        clauses.push(summarize(&table, c, true));
    }
    Ok(finish("cor3", n, samples, cfg, clauses, table, counterexamples, Some(phi)))
}

/// `(CP ∩ coCP)° = CP + coCP`: (a) sums `α + β` pass the sampled PPT-dual
/// test; (b) maps surviving that test are never refuted as decomposable.
pub fn verify_cor4(n: usize, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let cp = builtin_cone(ConeName::CP, n)?;
    let cocp = builtin_cone(ConeName::CoCP, n)?;
    let ppt = ppt_cone(n, n)?;
    let sums: Vec<Result<TableRow>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let a = cp.sample(sub_seed(cfg.seed, "cor4-a", k as u64));
            let b = cocp.sample(sub_seed(cfg.seed, "cor4-b", k as u64));
            let m = MatMap::linear_combination(&[(1.0, &a), (1.0, &b)])?;
            let v = test_dual_membership(&m, &ppt, &cfg.with_seed(sub_seed(cfg.seed, "cor4-dual", k as u64)))?;
            let mut row = TableRow::new(k, format!("sum[{k}]"));
            // The sampled dual test only refutes; surviving counts as consistent.
            row.push("sum_in_ppt_dual", if v.is_non_member() { Truth::Fails } else { Truth::Holds }, v.evidence.min_value);
            Ok(row)
        })
        .collect();
    let mut table = Vec::new();
    let mut counterexamples = Vec::new();
    for r in sums {
        let row = r?;
        if row.truth("sum_in_ppt_dual") == Some(Truth::Fails) {
            counterexamples.push(json!({"kind": "decomposable_refuted_by_ppt", "row": row.index}));
        }
        table.push(row);
    }

    let wanted = samples / 2;
    let mut survivors = 0;
    let mut attempt = 0u64;
    let mut fixtures_pool = vec![("identity".to_string(), MatMap::identity_map(n)), ("transpose".into(), MatMap::transpose_map(n))];
    fixtures_pool.reverse();
    while survivors < wanted + 2 && attempt < 50 * (wanted as u64 + 2) {
        let (label, cand) = match fixtures_pool.pop() {
            Some(f) => f,
            None => {
                let seed = sub_seed(cfg.seed, "cor4-cand", attempt);
                (format!("candidate[{attempt}]"), survivor_candidate(n, seed)?)
            }
        };
        attempt += 1;
        let sub = cfg.with_seed(sub_seed(cfg.seed, "cor4-survivor", attempt));
        let dual = test_dual_membership(&cand, &ppt, &sub)?;
        if dual.is_non_member() {
            continue;
        }
        survivors += 1;
        let dec = test_decomposable(&cand, &sub)?;
        let mut row = TableRow::new(samples + survivors, label);
        row.push("survivor_decomposable", truth_of(&dec), dec.evidence.min_value);
        if dec.is_non_member() {
            counterexamples.push(json!({"kind": "ppt_dual_survivor_not_decomposable", "map": map_json(&cand)}));
        }
        table.push(row);
    }
    let clauses = vec![summarize(&table, "sum_in_ppt_dual", false), summarize(&table, "survivor_decomposable", false)];
    Ok(VerificationReport::new("cor4", n, samples, cfg.seed, clauses, table, counterexamples))
}

/// `λ·D + (1−λ)·H` with `D` decomposable and `H` a random Hermitian-preserving
/// map, `λ ∈ [1/2, 1]`.
fn survivor_candidate(n: usize, seed: u64) -> Result<MatMap> {
    let mut rng = sub_rng(seed, "cand", 0);
    let d = random_decomposable(&mut rng, n, n);
    let g = crate::random::ginibre(&mut rng, n * n, n * n);
    let h = hermitize(&g);
    let h = MatMap::from_choi(n, n, ComplexMatrix::wrap(h.unscale(h.norm())))?;
    let lam = 0.5 + 0.5 * rng.random::<f64>();
    let scale = d.choi().frobenius_norm();
    MatMap::linear_combination(&[(lam, &d), ((1.0 - lam) * scale, &h)])
}

/// `J°` with `rank(range φ) ≤ k` implies `φ ∈ SP`, for `J = D₂` on `M_3`
/// (`k = 2`); candidates are PPT maps compressed to a rank-2 range.
pub fn verify_thm5(samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let rows: Vec<Result<TableRow>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let phi = states::random_ppt_map_rank2_range(sub_seed(cfg.seed, "thm5", k as u64))?;
            let mut row = TableRow::new(k, format!("rank2_range[{k}]"));
            let rank = phi.range_projection()?.rank();
            row.push("range_rank_le_2", if rank <= 2 { Truth::Holds } else { Truth::Fails }, rank as f64);
            let v = test_superpositive(&phi, cfg)?;
            row.push("sp", truth_of(&v), sp_value(&v));
            let via = matches!(v.certificate, Some(Certificate::CompressedPpt { .. }));
            row.push("compressed_shortcut", if via { Truth::Holds } else { Truth::Unrefuted }, 0.0);
            Ok(row)
        })
        .collect();
    let mut table = Vec::new();
    let mut counterexamples = Vec::new();
    for r in rows {
        let row = r?;
        if row.truth("sp") == Some(Truth::Fails) || row.truth("range_rank_le_2") == Some(Truth::Fails) {
            counterexamples.push(json!({"kind": "rank2_ppt_not_sp", "row": row.index}));
        }
        table.push(row);
    }
    let clauses = ["range_rank_le_2", "sp", "compressed_shortcut"].iter().map(|c| summarize(&table, c, false)).collect();
    Ok(VerificationReport::new("thm5", 3, samples, cfg.seed, clauses, table, counterexamples))
}

/// Searches `ψ ∈ D₂` with `pairing(Ad e, ψ) < 0` for rank-1 and rank-2 `e`.
/// A witness for rank 1 is a counterexample; none for rank 2 is inconclusive.
pub fn verify_cor7(n: usize, budget: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let d2 = builtin_cone(ConeName::D2, n)?;
    let sp = builtin_cone(ConeName::SP, n)?;
    let mut table = Vec::new();
    let mut counterexamples = Vec::new();
    let e1 = ComplexMatrix::unit(n, 0, 0);
    let e2 = d2_projection(n);
    let cases: Vec<(&str, ComplexMatrix, &ConeSpec)> = if n == 2 {
        vec![("rank1", e1, &d2), ("rank2_vs_sp", e2, &sp)]
    } else {
        vec![("rank1", e1, &d2), ("rank2", e2, &d2)]
    };
    for (k, (label, e, cone)) in cases.into_iter().enumerate() {
        let ad = MatMap::ad(&e);
        let v = test_dual_membership(&ad, cone, &TestConfig { dual_samples: budget, ..cfg.clone() })?;
        let mut row = TableRow::new(k, label);
        let found = v.is_non_member();
        row.push("witness_found", if found { Truth::Holds } else { Truth::Unrefuted }, v.evidence.min_value);
        if found && label != "rank2" {
            counterexamples.push(json!({"kind": "unexpected_dual_violation", "case": label, "pairing": v.evidence.min_value}));
        }
        table.push(row);
    }
    let clauses = vec![summarize(&table, "witness_found", false)];
    Ok(VerificationReport::new("cor7", n, budget, cfg.seed, clauses, table, counterexamples))
}

/// `(i) φ ∈ CP ∩ coCP`, `(ii) φ∘α ∈ CP ∀α ∈ CP ∨ coCP`, `(iii) φ̃` a PPT state.
pub fn verify_prop10(phi: &MatMap, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let n = phi.d_in();
    let dec = builtin_cone(ConeName::DEC, n)?;
    let mut head = TableRow::new(0, "phi");
    let i = test_ppt_map(phi, cfg)?;
    head.push("i", truth_of(&i), i.evidence.min_value);
    let (t3, v3) = match states::state_of_map(phi) {
        Ok(rho) => {
            let v = states::is_ppt_state(&rho, cfg.psd_tol)?;
            (truth_of(&v), v.evidence.min_value)
        }
        // No state exists when φ is not CP.
        Err(Error::NotCompletelyPositive { min_eigenvalue }) => (Truth::Fails, min_eigenvalue),
        Err(e) => return Err(e),
    };
    head.push("iii", t3, v3);
    let mut table = vec![head];
    table.extend(composition_rows(phi, &dec, samples, cfg, "ii")?);
    let clauses = vec![summarize(&table, "i", false), summarize(&table, "ii", true), summarize(&table, "iii", false)];
    Ok(finish("prop10", n, samples, cfg, clauses, table, vec![], Some(phi)))
}

/// `φ∘α ∈ CP` for fixtures and samples of `j`.
fn composition_rows(phi: &MatMap, j: &ConeSpec, samples: usize, cfg: &TestConfig, clause: &str) -> Result<Vec<TableRow>> {
    let rows: Vec<Result<TableRow>> = alpha_set(j, samples, cfg.seed)
        .par_iter()
        .enumerate()
        .map(|(k, (label, alpha))| {
            let v = test_cp(&phi.compose(alpha)?, cfg)?;
            let mut row = TableRow::new(k + 1, label.clone());
            row.push(clause, truth_of(&v), v.evidence.min_value);
            Ok(row)
        })
        .collect();
    rows.into_iter().collect()
}

/// `(i) φ ∈ CP ∨ coCP`, `(ii) φ∘α ∈ CP ∀α ∈ CP ∩ coCP`,
/// `(iii) ρ̃(C_φ) ≥ 0 ∀` PPT maps `ρ`.
pub fn verify_prop11(phi: &MatMap, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let n = phi.d_in();
    let ppt = ppt_cone(n, n)?;
    let mut head = TableRow::new(0, "phi");
    let i = test_decomposable(phi, cfg)?;
    head.push("i", truth_of(&i), i.evidence.min_value);
    let mut table = vec![head];
    let ii_rows = composition_rows(phi, &ppt, samples, cfg, "ii")?;
    let scale = phi.choi().frobenius_norm().max(1.0);
    for (mut row, (_, rho)) in ii_rows.into_iter().zip(alpha_set(&ppt, samples, cfg.seed)) {
        // ρ̃ has density matrix C_ρ^t.
        let v = rho.choi().transpose().trace_product(phi.choi()).re;
        let thr = -cfg.psd_tol * scale * rho.choi().frobenius_norm().max(1.0);
        row.push("iii", if v < thr { Truth::Fails } else { Truth::Holds }, v);
        table.push(row);
    }
    let clauses = vec![summarize(&table, "i", false), summarize(&table, "ii", true), summarize(&table, "iii", true)];
    Ok(finish("prop11", n, samples, cfg, clauses, table, vec![], Some(phi)))
}

/// `D₂` on `M_3` is decomposable: samples and fixtures decompose with
/// residual at most `1e-6`.
pub fn verify_lemma12(samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let d2 = builtin_cone(ConeName::D2, 3)?;
    let t = MatMap::transpose_map(3);
    let mut maps = alpha_set(&d2, samples, cfg.seed);
    let tat = t.compose(&d2.generators[0])?.compose(&t)?;
    maps.push(("t.Ad(e).t".into(), tat));
    let sub = TestConfig { sep_tol: 1e-6, ..cfg.clone() };
    let rows: Vec<Result<(TableRow, Option<serde_json::Value>)>> = maps
        .par_iter()
        .enumerate()
        .map(|(k, (label, m))| {
            let c = m.choi().as_dmatrix();
            let dec = crate::cones::decompose(c, 3, 3, 1e-6, cfg.dec_max_iters)?;
            let mut row = TableRow::new(k, label.clone());
            let ok = dec.residual <= 1e-6;
            let mut bad = None;
            if !ok {
                let v = test_decomposable(m, &sub)?;
                if v.is_non_member() {
                    bad = Some(json!({"kind": "d2_not_decomposable", "map": map_json(m)}));
                }
            }
            row.push("decomposes", if ok { Truth::Holds } else { Truth::Unrefuted }, dec.residual);
            Ok((row, bad))
        })
        .collect();
    let mut table = Vec::new();
    let mut counterexamples = Vec::new();
    for r in rows {
        let (row, bad) = r?;
        table.push(row);
        counterexamples.extend(bad);
    }
    let clauses = vec![summarize(&table, "decomposes", false)];
    Ok(VerificationReport::new("lemma12", 3, samples, cfg.seed, clauses, table, counterexamples))
}

/// For a PPT map `φ` on `M_3`: `(i) φ ∈ D₂°`, `(ii) φ∘α, α∘φ ∈ SP ∀α ∈ D₂`,
/// `(iii)` rank-2 range or support implies `φ ∈ SP`.
pub fn verify_prop13(phi: &MatMap, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    if phi.d_in() != 3 || phi.d_out() != 3 {
        return Err(Error::Precondition("prop13 needs a map on M_3".into()));
    }
    if !test_ppt_map(phi, cfg)?.is_member() {
        return Err(Error::Precondition("prop13 needs a PPT map".into()));
    }
    let d2 = builtin_cone(ConeName::D2, 3)?;
    let cor3 = verify_cor3(&d2, phi, samples, cfg)?;
    let mut table = cor3.table.clone();
    let mut counterexamples = cor3.counterexamples.clone();
    for c in ["i", "vi", "vii"] {
        if cor3.clause(c).is_some_and(|s| s.truth == Truth::Fails) {
            counterexamples.push(json!({"kind": "prop13_clause_fails", "clause": c}));
        }
    }
    let ranks = (phi.range_projection()?.rank(), phi.support_projection()?.rank());
    let mut row = TableRow::new(table.len(), "rank2");
    if ranks.0 == 2 || ranks.1 == 2 {
        let v = test_superpositive(phi, cfg)?;
        row.push("iii", truth_of(&v), sp_value(&v));
        if v.is_non_member() {
            counterexamples.push(json!({"kind": "rank2_ppt_not_sp"}));
        }
    }
    table.push(row);
    let mut clauses = cor3.clauses.clone();
    clauses.push(summarize(&table, "iii", false));
    Ok(VerificationReport::new("prop13", 3, samples, cfg.seed, clauses, table, counterexamples))
}

/// `ω∘φ` and `φ∘ω` are super-positive for super-positive `ω` and positive `φ`.
pub fn verify_lemma1(n: usize, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let sp = builtin_cone(ConeName::SP, n)?;
    let p = builtin_cone(ConeName::P, n)?;
    let rows: Vec<Result<(TableRow, Option<serde_json::Value>)>> = (0..samples + 1)
        .into_par_iter()
        .map(|k| {
            let omega = sp.sample(sub_seed(cfg.seed, "lemma1-sp", k as u64));
            let (label, phi) = if k == 0 {
                ("identity".to_string(), MatMap::identity_map(n))
            } else if k % 4 == 0 {
                let f = &p.extreme_fixtures[(k / 4) % p.extreme_fixtures.len()];
                (format!("fixture[{k}]"), f.clone())
            } else {
                (format!("sample[{k}]"), p.sample(sub_seed(cfg.seed, "lemma1-p", k as u64)))
            };
            let sub = cfg.with_seed(sub_seed(cfg.seed, "lemma1", k as u64));
            let mut row = TableRow::new(k, label);
            let a = test_superpositive(&omega.compose(&phi)?, &sub)?;
            row.push("sp_after_positive", truth_of(&a), sp_value(&a));
            let b = test_superpositive(&phi.compose(&omega)?, &sub)?;
            row.push("positive_after_sp", truth_of(&b), sp_value(&b));
            let bad = (a.is_non_member() || b.is_non_member())
                .then(|| json!({"kind": "composition_not_sp", "omega": map_json(&omega), "phi": map_json(&phi)}));
            Ok((row, bad))
        })
        .collect();
    let mut table = Vec::new();
    let mut counterexamples = Vec::new();
    for r in rows {
        let (row, bad) = r?;
        table.push(row);
        counterexamples.extend(bad);
    }
    let clauses = ["sp_after_positive", "positive_after_sp"].iter().map(|c| summarize(&table, c, false)).collect();
    Ok(VerificationReport::new("lemma1", n, samples, cfg.seed, clauses, table, counterexamples))
}

/// Random PPT states on `d_a ⊗ d_b` reach Gilbert distance
/// [`PPT_DISTANCE_TARGET`]; the PPT decision rule must agree.
pub fn verify_ppt_low_dim(d_a: usize, d_b: usize, samples: usize, cfg: &TestConfig) -> Result<VerificationReport> {
    let gcfg = TestConfig { sep_tol: PPT_DISTANCE_TARGET, ..cfg.clone() };
    let rows: Vec<Result<TableRow>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let rho = states::random_ppt_state(d_a, d_b, sub_seed(cfg.seed, "ppt-low", k as u64))?;
            let phi = states::map_of_state(&rho);
            let sub = gcfg.with_seed(sub_seed(cfg.seed, "ppt-low-g", k as u64));
            let (_, g) = choi_gilbert(&phi, &sub)?;
            let mut row = TableRow::new(k, format!("state[{k}]"));
            let close = g.distance <= PPT_DISTANCE_TARGET;
            row.push("gilbert", if close { Truth::Holds } else { Truth::Unrefuted }, g.distance);
            let v = test_superpositive(&phi, &sub)?;
            row.push("sp", truth_of(&v), 0.0);
            Ok(row)
        })
        .collect();
    let mut table = Vec::new();
    let mut counterexamples = Vec::new();
    for r in rows {
        let row = r?;
        if row.truth("sp") == Some(Truth::Fails) {
            counterexamples.push(json!({"kind": "ppt_state_rejected", "row": row.index}));
        }
        table.push(row);
    }
    let clauses = ["gilbert", "sp"].iter().map(|c| summarize(&table, c, false)).collect();
    let name = format!("ppt{d_a}x{d_b}");
    Ok(VerificationReport::new(&name, d_a * d_b, samples, cfg.seed, clauses, table, counterexamples))
}
