//! Gilbert / Frank–Wolfe iteration for the Frobenius distance from a
//! bipartite state to the separable set.
//!
//! The iterate is always an explicit convex combination of pure product
//! states, so the returned ensemble reconstructs it exactly. Each step adds the
//! product state maximizing `⟨σ, X − Y⟩` and line-searches toward it; every few
//! steps the weights of all retained atoms are re-optimized over the simplex.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::product::{optimize_product, ProductOptimum, Sense};
use super::TestConfig;
use crate::error::{Error, Result};
use crate::linalg::{eigh_raw, ComplexMatrix, HermitianMatrix, C64};
use crate::random::rng;

const CORRECTIVE_EVERY: usize = 5;
const PRUNE_BELOW: f64 = 1e-12;
/// Atoms with overlap above this are treated as the same product state.
const MERGE_OVERLAP: f64 = 1.0 - 1e-12;
/// Stop when the distance improved by less than this relative amount over
/// the last `STALL_WINDOW` iterations.
const STALL_WINDOW: usize = 200;
const STALL_RTOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ProductAtom {
    pub weight: f64,
    pub x: DVector<C64>,
    pub y: DVector<C64>,
}

impl ProductAtom {
    fn vector(&self) -> DVector<C64> {
        self.x.kronecker(&self.y)
    }
}

/// One term `p · a ⊗ b` of a separable decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleTerm {
    pub weight: f64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct GilbertResult {
    pub distance: f64,
    pub atoms: Vec<ProductAtom>,
    pub iterations: usize,
    /// Distance after initialization and after every iteration.
    pub history: Vec<f64>,
    pub reached_target: bool,
    pub hit_cap: bool,
    /// Hyperplane lower bound `⟨W, X⟩ − max_σ ⟨W, σ⟩` with `W = (X − Y)/‖X − Y‖`,
    /// where the max over product states is a multistart estimate.
    pub lower_bound: f64,
}

impl GilbertResult {
    pub fn ensemble(&self) -> Vec<EnsembleTerm> {
        self.atoms
            .iter()
            .map(|a| EnsembleTerm {
                weight: a.weight,
                a: ComplexMatrix::outer(&a.x),
                b: ComplexMatrix::outer(&a.y),
            })
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15)
    }
}

/// Reconstructs `Σ p_k a_k ⊗ b_k`.
pub fn reconstruct(ensemble: &[EnsembleTerm]) -> Option<ComplexMatrix> {
    let first = ensemble.first()?;
    let d = first.a.rows() * first.b.rows();
    let mut acc = DMatrix::zeros(d, d);
    for t in ensemble {
        acc += t.a.as_dmatrix().kronecker(t.b.as_dmatrix()) * C64::new(t.weight, 0.0);
    }
    Some(ComplexMatrix::wrap(acc))
}

fn atoms_matrix(atoms: &[ProductAtom], d: usize) -> DMatrix<C64> {
    let mut y = DMatrix::zeros(d, d);
    for a in atoms {
        let v = a.vector();
        y += (&v * v.adjoint()) * C64::new(a.weight, 0.0);
    }
    y
}

fn partial_traces(x: &DMatrix<C64>, d_a: usize, d_b: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let mut ra = DMatrix::zeros(d_a, d_a);
    let mut rb = DMatrix::zeros(d_b, d_b);
    for i in 0..d_a {
        for j in 0..d_a {
            let blk = x.view((i * d_b, j * d_b), (d_b, d_b));
            ra[(i, j)] = blk.trace();
            if i == j {
                rb += blk;
            }
        }
    }
    (ra, rb)
}

/// Product of the marginals, written as eigen-product atoms.
fn initial_atoms(x: &DMatrix<C64>, d_a: usize, d_b: usize) -> Result<Vec<ProductAtom>> {
    let (ra, rb) = partial_traces(x, d_a, d_b);
    let ea = eigh_raw(&crate::linalg::hermitize(&ra))?;
    let eb = eigh_raw(&crate::linalg::hermitize(&rb))?;
    let mut atoms = Vec::new();
    for (i, &la) in ea.values.iter().enumerate() {
        for (j, &lb) in eb.values.iter().enumerate() {
            let w = la.max(0.0) * lb.max(0.0);
            if w > PRUNE_BELOW {
                atoms.push(ProductAtom {
                    weight: w,
                    x: ea.vectors.column(i).into_owned(),
                    y: eb.vectors.column(j).into_owned(),
                });
            }
        }
    }
    normalize_weights(&mut atoms);
    Ok(atoms)
}

fn normalize_weights(atoms: &mut [ProductAtom]) {
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    if total > 0.0 {
        for a in atoms.iter_mut() {
            a.weight /= total;
        }
    }
}

/// Minimizes `‖X − Σ w_k σ_k‖²` over the simplex by a primal active-set
/// method started from the current (feasible) weights, then drops atoms with
/// zero weight.
fn fully_corrective(x: &DMatrix<C64>, atoms: &mut Vec<ProductAtom>) {
    let m = atoms.len();
    if m < 2 {
        return;
    }
    let vecs: Vec<DVector<C64>> = atoms.iter().map(|a| a.vector()).collect();
    let c: Vec<f64> = vecs.iter().map(|v| (v.adjoint() * x * v)[(0, 0)].re).collect();
    let mut k = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let ov = vecs[i].dotc(&vecs[j]).norm_sqr();
            k[(i, j)] = ov;
            k[(j, i)] = ov;
        }
    }
    let mut w: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
    let mut passive: Vec<usize> = (0..m).filter(|&i| w[i] > 0.0).collect();
    for _ in 0..10 * m {
        let Some((s, mu)) = solve_kkt(&k, &c, &passive) else { break };
        if s.iter().all(|&v| v > 0.0) {
            for (&i, &v) in passive.iter().zip(&s) {
                w[i] = v;
            }
            // Optimal unless some inactive atom has a descent direction.
            let g = |j: usize| (0..m).map(|l| k[(j, l)] * w[l]).sum::<f64>() - c[j];
            let entering = (0..m)
                .filter(|j| !passive.contains(j))
                .map(|j| (j, g(j) + mu))
                .filter(|&(_, v)| v < -1e-13)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match entering {
                Some((j, _)) => passive.push(j),
                None => break,
            }
        } else {
            let mut alpha = 1.0f64;
            for (&i, &v) in passive.iter().zip(&s) {
                if v <= 0.0 {
                    alpha = alpha.min(w[i] / (w[i] - v));
                }
            }
            for (&i, &v) in passive.iter().zip(&s) {
                w[i] += alpha * (v - w[i]);
            }
            passive.retain(|&i| w[i] > PRUNE_BELOW);
            for i in 0..m {
                if !passive.contains(&i) {
                    w[i] = 0.0;
                }
            }
        }
    }
    for (a, wi) in atoms.iter_mut().zip(w) {
        a.weight = wi;
    }
    atoms.retain(|a| a.weight >= PRUNE_BELOW);
    normalize_weights(atoms);
}

/// Solves `K_P s + μ·1 = c_P`, `1ᵀs = 1` on the passive set `P`. A small
/// ridge keeps linearly dependent atoms solvable.
fn solve_kkt(k: &DMatrix<f64>, c: &[f64], passive: &[usize]) -> Option<(Vec<f64>, f64)> {
    let p = passive.len();
    if p == 0 {
        return None;
    }
    let mut a = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut rhs = DVector::<f64>::zeros(p + 1);
    for (r, &i) in passive.iter().enumerate() {
        for (col, &j) in passive.iter().enumerate() {
            a[(r, col)] = k[(i, j)];
        }
        a[(r, r)] += 1e-13;
        a[(r, p)] = 1.0;
        a[(p, r)] = 1.0;
        rhs[r] = c[i];
    }
    rhs[p] = 1.0;
    let sol = a.lu().solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((sol.rows(0, p).iter().copied().collect(), sol[p]))
}

fn check_state(x: &HermitianMatrix, d_a: usize, d_b: usize) -> Result<()> {
    if x.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch(format!(
            "state of size {} does not match {d_a}x{d_b}",
            x.dim()
        )));
    }
    let tr = x.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("state must have unit trace, got {tr}")));
    }
    let psd = crate::linalg::is_psd(x, crate::linalg::DEFAULT_PSD_TOL)?;
    if !psd.is_psd {
        return Err(Error::Precondition(format!(
            "state must be PSD (minimum eigenvalue {:.3e})",
            psd.min_eigenvalue
        )));
    }
    Ok(())
}

/// Distance from the trace-one PSD matrix `X` to the separable set of
/// `C^{d_A} ⊗ C^{d_B}`. Stops once the distance falls to `cfg.sep_tol`, when
/// no improving product state can be found, when the distance has stalled
/// over the last `STALL_WINDOW` iterations, or after `cfg.gilbert_max_iters`
/// iterations.
pub fn gilbert_separable_distance(x: &HermitianMatrix, d_a: usize, d_b: usize, cfg: &TestConfig) -> Result<GilbertResult> {
    check_state(x, d_a, d_b)?;
    let xm = x.matrix().as_dmatrix();
    let d = d_a * d_b;
    let mut r = rng(cfg.seed);

    let mut atoms = initial_atoms(xm, d_a, d_b)?;
    let mut y = atoms_matrix(&atoms, d);
    let mut dist = (xm - &y).norm();
    let mut history = vec![dist];
    let mut warm: Option<DVector<C64>> = None;
    let mut iterations = 0;
    let mut reached = dist <= cfg.sep_tol;

    while !reached && iterations < cfg.gilbert_max_iters {
        iterations += 1;
        let g = xm - &y;
        let yg = (&y * &g).trace().re;
        let warm_starts: Vec<DVector<C64>> = warm.iter().cloned().collect();
        let mut best = optimize_product(&g, d_a, d_b, Sense::Max, 2, &warm_starts, &mut r);
        if best.value - yg <= 1e-15 {
            best = optimize_product(&g, d_a, d_b, Sense::Max, cfg.multistarts, &warm_starts, &mut r);
        }
        let gap = best.value - yg;
        if gap <= 1e-15 {
            fully_corrective(xm, &mut atoms);
            let yn = atoms_matrix(&atoms, d);
            let dn = (xm - &yn).norm();
            if dn < dist {
                y = yn;
                dist = dn;
            }
            history.push(dist);
            break;
        }
        let ProductOptimum { x: ax, y: ay, .. } = best;
        let v = ax.kronecker(&ay);
        let sigma = &v * v.adjoint();
        let dir = &sigma - &y;
        let step = (gap / dir.norm_squared()).clamp(0.0, 1.0);
        for a in atoms.iter_mut() {
            a.weight *= 1.0 - step;
        }
        let same = atoms.iter().position(|a| a.vector().dotc(&v).norm_sqr() > MERGE_OVERLAP);
        match same {
            Some(i) => atoms[i].weight += step,
            None => atoms.push(ProductAtom { weight: step, x: ax.clone(), y: ay }),
        }
        warm = Some(ax);

        if iterations % CORRECTIVE_EVERY == 0 {
            let saved = atoms.clone();
            fully_corrective(xm, &mut atoms);
            let yn = atoms_matrix(&atoms, d);
            let dn = (xm - &yn).norm();
            let y_step = atoms_matrix(&saved, d);
            let d_step = (xm - &y_step).norm();
            if dn <= d_step {
                y = yn;
            } else {
                atoms = saved;
                atoms.retain(|a| a.weight >= PRUNE_BELOW);
                normalize_weights(&mut atoms);
                y = atoms_matrix(&atoms, d);
            }
        } else {
            y = atoms_matrix(&atoms, d);
        }
        dist = (xm - &y).norm();
        history.push(dist);
        reached = dist <= cfg.sep_tol;
        if history.len() > STALL_WINDOW && history[history.len() - 1 - STALL_WINDOW] - dist <= STALL_RTOL * dist {
            break;
        }
    }

    let lower_bound = if dist > 0.0 {
        let w = (xm - &y).unscale(dist);
        let sep_max = optimize_product(&w, d_a, d_b, Sense::Max, cfg.multistarts.max(1), &[], &mut r).value;
        ((w.adjoint() * xm).trace().re - sep_max).max(0.0)
    } else {
        0.0
    };

    Ok(GilbertResult {
        distance: dist,
        atoms,
        iterations,
        history,
        reached_target: reached,
        hit_cap: !reached && iterations >= cfg.gilbert_max_iters,
        lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{omega, tensor};

    fn cfg() -> TestConfig {
        TestConfig { sep_tol: 1e-12, gilbert_max_iters: 2000, ..TestConfig::default() }
    }

    #[test]
    fn corrective_step_recovers_exact_mixture() {
        // X = 0.2 σ₀ + 0.8 σ₁ over four candidate atoms; the simplex QP optimum
        // is exactly those weights with the other two atoms dropped.
        let e = |n: usize, i: usize| DVector::from_fn(n, |r, _| C64::new(if r == i { 1.0 } else { 0.0 }, 0.0));
        let mut atoms: Vec<ProductAtom> = [(0, 0), (1, 1), (0, 1), (1, 0)]
            .iter()
            .map(|&(i, j)| ProductAtom { weight: 0.25, x: e(2, i), y: e(2, j) })
            .collect();
        let proj = |a: &ProductAtom| {
            let v = a.vector();
            &v * v.adjoint()
        };
        let x = proj(&atoms[0]) * C64::new(0.2, 0.0) + proj(&atoms[1]) * C64::new(0.8, 0.0);
        fully_corrective(&x, &mut atoms);
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].weight - 0.2).abs() < 1e-12 && (atoms[1].weight - 0.8).abs() < 1e-12);
    }

    #[test]
    fn product_state_is_at_distance_zero() {
        let a = crate::random::density_matrix(&mut rng(1), 2, 2);
        let b = crate::random::density_matrix(&mut rng(2), 3, 3);
        let x = HermitianMatrix::new(tensor(&a, &b)).unwrap();
        let res = gilbert_separable_distance(&x, 2, 3, &cfg()).unwrap();
        assert!(res.distance <= 1e-12, "{}", res.distance);
        let y = reconstruct(&res.ensemble()).unwrap();
        assert!((&y - x.matrix()).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn maximally_mixed_is_at_distance_zero() {
        let x = HermitianMatrix::new(ComplexMatrix::identity(4).scale(0.25)).unwrap();
        let res = gilbert_separable_distance(&x, 2, 2, &cfg()).unwrap();
        assert!(res.distance <= 1e-12);
    }

    #[test]
    fn bell_state_distance_is_one_over_sqrt_three() {
        // Oracle: the closest separable state within the isotropic family
        // p Φ + (1 − p) 1/4 sits at p = 1/3, where
        // ‖Φ − ρ_{1/3}‖_F = (2/3)·‖Φ − 1/4‖_F = (2/3)·√(3/4) = 1/√3.
        let sweep_min = (0..=3000)
            .map(|k| k as f64 / 3000.0 / 3.0)
            .map(|p| (1.0 - p) * (0.75f64).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!((sweep_min - 1.0 / 3f64.sqrt()).abs() < 1e-12);

        let phi = ComplexMatrix::outer(&omega(2)).scale(0.5);
        let x = HermitianMatrix::new(phi).unwrap();
        let res = gilbert_separable_distance(&x, 2, 2, &TestConfig { gilbert_max_iters: 3000, ..cfg() }).unwrap();
        assert!(res.is_monotone());
        assert!((res.distance - sweep_min).abs() < 1e-3, "{}", res.distance);
        assert!(res.lower_bound <= res.distance + 1e-9);
        let y = reconstruct(&res.ensemble()).unwrap();
        assert!(((&y - x.matrix()).frobenius_norm() - res.distance).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_states() {
        let x = HermitianMatrix::new(ComplexMatrix::identity(4)).unwrap();
        assert!(matches!(gilbert_separable_distance(&x, 2, 2, &cfg()), Err(Error::Precondition(_))));
    }
}
