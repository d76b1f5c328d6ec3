//! Search for `C = P + Γ(Q)` with `P, Q ⪰ 0`, where `Γ` is the partial
//! transpose on the output factor.
//!
//! The main route is the semidefinite program `min ‖C − P − Γ(Q)‖_F` over
//! `P, Q ⪰ 0`, solved by an interior-point method on the real embedding
//! `X ↦ [[Re X, −Im X], [Im X, Re X]]`.
//!
//! Interior-point accuracy stops near 1e-8, so the result is refined by
//! L-BFGS on factors `P = AA*`, `Q = BB*` of the numerical ranks read off the
//! solver output; with the ranks right the factored problem is well posed.
//!
//! If the solver fails, Dykstra's alternating projections between the PSD
//! cone (for `P`) and `C − Γ(PSD)` give a starting pair for the same
//! refinement with full-size factors.

use std::cell::{Cell, RefCell};

use argmin::core::{CostFunction, Executor, Gradient};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use nalgebra::DMatrix;

use crate::error::Result;
use crate::linalg::{eigh_raw, hermitize, partial_transpose_raw, psd_part, Side, C64};

/// Dykstra iterations before switching to the factored refinement.
const DYKSTRA_WARMUP: usize = 300;
/// Relative eigenvalue cutoffs tried when reading off the numerical ranks.
const RANK_CUTS: [f64; 3] = [1e-5, 1e-3, 1e-7];
const SDP_POLISH_ITERS: u64 = 300;

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub p: DMatrix<C64>,
    pub q: DMatrix<C64>,
    /// `‖C − P − Γ(Q)‖_F`.
    pub residual: f64,
    pub iterations: usize,
}

fn residual(c: &DMatrix<C64>, p: &DMatrix<C64>, q: &DMatrix<C64>, d_in: usize, d_out: usize) -> f64 {
    (c - p - partial_transpose_raw(q, d_in, d_out, Side::Second)).norm()
}

/// The candidate pair extracted from a point `P`: clamp `P` to PSD and take
/// `Q = psd(Γ(C − P))`.
fn extract(c: &DMatrix<C64>, x: &DMatrix<C64>, d_in: usize, d_out: usize) -> Result<Decomposition> {
    let p = psd_part(x)?;
    let q = psd_part(&partial_transpose_raw(&(c - &p), d_in, d_out, Side::Second))?;
    let r = residual(c, &p, &q, d_in, d_out);
    Ok(Decomposition { p, q, residual: r, iterations: 0 })
}

/// Returns the best pair found; `residual ≤ target` means success.
pub fn decompose(c: &DMatrix<C64>, d_in: usize, d_out: usize, target: f64, max_iters: usize) -> Result<Decomposition> {
    let c = hermitize(c);
    let zero = DMatrix::zeros(c.nrows(), c.ncols());

    // Exact endpoints first: C itself PSD, or Γ(C) PSD.
    let direct = extract(&c, &c, d_in, d_out)?;
    if direct.residual <= target {
        return Ok(direct);
    }
    let co = extract(&c, &zero, d_in, d_out)?;
    if co.residual <= target {
        return Ok(co);
    }
    let mut best = if direct.residual <= co.residual { direct } else { co };
    if let Some(sdp) = solve_sdp(&c, d_in, d_out)? {
        if sdp.residual < best.residual {
            best = sdp.clone();
        }
        for cut in RANK_CUTS {
            if best.residual <= target {
                break;
            }
            let (a, b) = (factor(&sdp.p, cut)?, factor(&sdp.q, cut)?);
            let cand = polish(&c, a, b, d_in, d_out, target, SDP_POLISH_ITERS)?;
            if cand.residual < best.residual {
                best = Decomposition { iterations: sdp.iterations + cand.iterations, ..cand };
            }
        }
        if best.residual <= target {
            return Ok(best);
        }
    }

    let project_b = |p: &DMatrix<C64>| -> Result<DMatrix<C64>> {
        let g = partial_transpose_raw(&(&c - p), d_in, d_out, Side::Second);
        Ok(&c - partial_transpose_raw(&psd_part(&g)?, d_in, d_out, Side::Second))
    };

    let mut x = c.clone();
    let mut inc_a = zero.clone();
    let mut inc_b = zero;
    let warmup = max_iters.min(DYKSTRA_WARMUP);
    for it in 1..=warmup {
        let ya = psd_part(&(&x + &inc_a))?;
        inc_a = &x + &inc_a - &ya;
        let xb = project_b(&(&ya + &inc_b))?;
        inc_b = &ya + &inc_b - &xb;
        x = xb;

        let cand = extract(&c, &ya, d_in, d_out)?;
        if cand.residual < best.residual {
            best = Decomposition { iterations: it, ..cand };
        }
        if best.residual <= target {
            return Ok(best);
        }
    }
    // L-BFGS can stop on a failed line search; restart with fresh memory.
    let mut used = warmup;
    while used < max_iters && best.residual > target {
        // `B = 0` (or `A = 0`) is a stationary point, so nudge both factors off it.
        let nudge = DMatrix::<C64>::identity(c.nrows(), c.ncols()) * C64::new(0.1 * best.residual.sqrt(), 0.0);
        let (a, b) = (factor(&best.p, 0.0)? + &nudge, factor(&best.q, 0.0)? + &nudge);
        let polished = polish(&c, a, b, d_in, d_out, target, (max_iters - used) as u64)?;
        used += polished.iterations.max(1);
        if polished.residual >= 0.999 * best.residual {
            break;
        }
        best = Decomposition { iterations: used, ..polished };
    }
    Ok(best)
}

/// Square-root factor `V·diag(√λ)` over the eigenvalues above `cut·λ_max`
/// (all nonnegative ones when `cut = 0`).
fn factor(m: &DMatrix<C64>, cut: f64) -> Result<DMatrix<C64>> {
    let e = eigh_raw(&hermitize(m))?;
    let top = e.values.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..e.values.len()).filter(|&k| cut == 0.0 || e.values[k] > cut * top).collect();
    Ok(DMatrix::from_fn(m.nrows(), keep.len(), |i, j| e.vectors[(i, keep[j])] * e.values[keep[j]].max(0.0).sqrt()))
}

struct Factored<'a> {
    c: &'a DMatrix<C64>,
    d_in: usize,
    d_out: usize,
    /// Column counts of `A` and `B`.
    ranks: (usize, usize),
    /// The line search runs without an iteration cap, so evaluations are
    /// budgeted here and the best point seen is kept.
    evals: &'a Cell<u64>,
    budget: u64,
    best: &'a RefCell<(f64, Vec<f64>)>,
}

/// Inverse of [`pack`] for `d × r_a` and `d × r_b` factors.
fn unpack(p: &[f64], d: usize, (r_a, r_b): (usize, usize)) -> (DMatrix<C64>, DMatrix<C64>) {
    let mat = |off: usize, r: usize| DMatrix::from_fn(d, r, |i, j| C64::new(p[off + 2 * (i * r + j)], p[off + 2 * (i * r + j) + 1]));
    (mat(0, r_a), mat(2 * d * r_a, r_b))
}

impl Factored<'_> {
    fn unpack(&self, p: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
        unpack(p, self.c.nrows(), self.ranks)
    }

    fn residual(&self, a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        self.c - a * a.adjoint() - partial_transpose_raw(&(b * b.adjoint()), self.d_in, self.d_out, Side::Second)
    }
}

fn pack(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * (a.len() + b.len()));
    for m in [a, b] {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.push(m[(i, j)].re);
                out.push(m[(i, j)].im);
            }
        }
    }
    out
}

impl CostFunction for Factored<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let n = self.evals.get() + 1;
        self.evals.set(n);
        if n > self.budget {
            return Err(argmin::core::Error::msg("evaluation budget exhausted"));
        }
        let (a, b) = self.unpack(p);
        let f = self.residual(&a, &b).norm_squared();
        let mut best = self.best.borrow_mut();
        if f < best.0 {
            *best = (f, p.clone());
        }
        Ok(f)
    }
}

impl Gradient for Factored<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    /// `∇_A = −4 R A`, `∇_B = −4 Γ(R) B` with `R = C − AA* − Γ(BB*)`.
    fn gradient(&self, p: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let (a, b) = self.unpack(p);
        let r = self.residual(&a, &b);
        let ga = (&r * &a) * C64::new(-4.0, 0.0);
        let gb = (partial_transpose_raw(&r, self.d_in, self.d_out, Side::Second) * &b) * C64::new(-4.0, 0.0);
        Ok(pack(&ga, &gb))
    }
}

fn polish(
    c: &DMatrix<C64>,
    a: DMatrix<C64>,
    b: DMatrix<C64>,
    d_in: usize,
    d_out: usize,
    target: f64,
    iters: u64,
) -> Result<Decomposition> {
    let ranks = (a.ncols(), b.ncols());
    let init = pack(&a, &b);
    let evals = Cell::new(0);
    let best = RefCell::new((f64::INFINITY, init.clone()));
    let problem = Factored { c, d_in, d_out, ranks, evals: &evals, budget: 20 * iters, best: &best };
    if let Ok(solver) = LBFGS::new(MoreThuenteLineSearch::new(), 12)
        .with_tolerance_grad(0.0)
        .and_then(|s| s.with_tolerance_cost(0.0))
    {
        // Errors only mean the budget ran out; the best point is kept either way.
        let _ = Executor::new(problem, solver)
            .configure(|st| st.param(init).max_iters(iters).target_cost(target * target))
            .run();
    }
    let (best_cost, best_param) = best.into_inner();
    let (a, b) = if best_cost.is_finite() { unpack(&best_param, c.nrows(), ranks) } else { (a, b) };
    let (p, q) = (&a * a.adjoint(), &b * b.adjoint());
    let r = residual(c, &p, &q, d_in, d_out);
    Ok(Decomposition { p, q, residual: r, iterations: evals.get() as usize })
}

fn combine(basis: &[DMatrix<C64>], coef: &[f64], r: usize) -> DMatrix<C64> {
    basis.iter().zip(coef).fold(DMatrix::zeros(r, r), |acc, (h, &t)| acc + h * C64::new(t, 0.0))
}

/// Real coordinates of a Hermitian `d × d` matrix: diagonal, then `Re`, `Im`
/// of each strict upper entry.
fn coordinates(m: &DMatrix<C64>) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

/// The basis dual to [`coordinates`].
fn coordinate_basis(d: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut h = DMatrix::zeros(d, d);
        h[(i, i)] = C64::new(1.0, 0.0);
        out.push(h);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut h = DMatrix::zeros(d, d);
            h[(i, j)] = C64::new(1.0, 0.0);
            h[(j, i)] = C64::new(1.0, 0.0);
            out.push(h.clone());
            h[(i, j)] = C64::new(0.0, 1.0);
            h[(j, i)] = C64::new(0.0, -1.0);
            out.push(h);
        }
    }
    out
}

/// Scaled upper triangle (column-major, off-diagonals times √2) of the real
/// embedding of `m`.
fn embedded_svec(m: &DMatrix<C64>) -> Vec<f64> {
    let d = m.nrows();
    let entry = |r: usize, c: usize| -> f64 {
        let z = m[(r % d, c % d)];
        match (r < d, c < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    };
    let mut out = Vec::with_capacity(d * (2 * d + 1));
    for col in 0..2 * d {
        for row in 0..=col {
            let v = entry(row, col);
            out.push(if row == col { v } else { v * std::f64::consts::SQRT_2 });
        }
    }
    out
}

fn solve_sdp(c: &DMatrix<C64>, d_in: usize, d_out: usize) -> Result<Option<Decomposition>> {
    use clarabel::algebra::CscMatrix;
    use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};

    let d = c.nrows();
    let nh = d * d;
    let basis = coordinate_basis(d);
    // Weights turning coordinates into a Frobenius isometry.
    let weight: Vec<f64> = (0..nh).map(|k| if k < d { 1.0 } else { std::f64::consts::SQRT_2 }).collect();
    let gamma = |m: &DMatrix<C64>| partial_transpose_raw(m, d_in, d_out, Side::Second);

    // Variables x = (t, p, q); rows: second-order cone (t, w ⊙ coords(R)),
    // then the embedded PSD cones of P and Q.
    let svec_len = d * (2 * d + 1);
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    let mut push = |r: usize, col: usize, v: f64| {
        if v != 0.0 {
            rows.push(r);
            cols.push(col);
            vals.push(v);
        }
    };
    push(0, 0, -1.0);
    for (k, e) in basis.iter().enumerate() {
        push(1 + k, 1 + k, weight[k]);
        for (r, v) in coordinates(&gamma(e)).into_iter().enumerate() {
            push(1 + r, 1 + nh + k, weight[r] * v);
        }
        for (r, v) in embedded_svec(e).into_iter().enumerate() {
            push(1 + nh + r, 1 + k, -v);
            push(1 + nh + svec_len + r, 1 + nh + k, -v);
        }
    }
    let m = 1 + nh + 2 * svec_len;
    let n = 1 + 2 * nh;
    let a = CscMatrix::new_from_triplets(m, n, rows, cols, vals);
    let mut b = vec![0.0; m];
    for (r, v) in coordinates(c).into_iter().enumerate() {
        b[1 + r] = weight[r] * v;
    }
    let mut q = vec![0.0; n];
    q[0] = 1.0;
    let cones = [
        SupportedConeT::SecondOrderConeT(1 + nh),
        SupportedConeT::PSDTriangleConeT(2 * d),
        SupportedConeT::PSDTriangleConeT(2 * d),
    ];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(200)
        .tol_gap_abs(1e-12)
        .tol_gap_rel(1e-12)
        .tol_feas(1e-12)
        .build()
        .expect("valid solver settings");
    let Ok(mut solver) = DefaultSolver::new(&CscMatrix::zeros((n, n)), &q, &a, &b, &cones, settings) else {
        return Ok(None);
    };
    solver.solve();
    let sol = &solver.solution;
    if !matches!(sol.status, SolverStatus::Solved | SolverStatus::AlmostSolved) {
        return Ok(None);
    }
    let p = psd_part(&combine(&basis, &sol.x[1..1 + nh], d))?;
    let q = psd_part(&combine(&basis, &sol.x[1 + nh..], d))?;
    let r = residual(c, &p, &q, d_in, d_out);
    Ok(Some(Decomposition { p, q, residual: r, iterations: sol.iterations as usize }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::swap;
    use crate::matmap::MatMap;

    #[test]
    fn identity_and_transpose_decompose_exactly() {
        let id = MatMap::identity_map(3);
        let d = decompose(id.choi().as_dmatrix(), 3, 3, 1e-10, 10).unwrap();
        assert!(d.residual < 1e-10 && d.q.norm() < 1e-10);

        let d = decompose(swap(3).as_dmatrix(), 3, 3, 1e-10, 10).unwrap();
        assert!(d.residual < 1e-10 && d.p.norm() < 1e-10);
        assert!((&d.q - id.choi().as_dmatrix()).norm() < 1e-10);
    }

    fn cp_plus_cocp(seed: u64, n: usize) -> DMatrix<C64> {
        let mut rng = crate::random::sub_rng(seed, "decompose-test", 0);
        let a = crate::mapcones::random_cp(&mut rng, n, n, 2);
        let b = crate::mapcones::random_cocp(&mut rng, n, n, 1);
        (a.choi().as_dmatrix() + b.choi().as_dmatrix()).clone_owned()
    }

    #[test]
    fn sdp_route_reaches_tight_residual() {
        for seed in 0..5 {
            let c = cp_plus_cocp(seed, 3);
            let d = decompose(&c, 3, 3, 1e-8, 0).unwrap();
            assert!(d.residual <= 1e-8, "seed {seed}: {}", d.residual);
            assert!(psd_part(&d.p).map(|p| (&p - &d.p).norm() < 1e-12).unwrap());
            assert!(psd_part(&d.q).map(|q| (&q - &d.q).norm() < 1e-12).unwrap());
        }
    }

    #[test]
    fn factored_refinement_reduces_residual() {
        let c = cp_plus_cocp(7, 2);
        let start = extract(&c, &c, 2, 2).unwrap();
        let nudge = DMatrix::<C64>::identity(4, 4) * C64::new(0.1, 0.0);
        let (a, b) = (factor(&start.p, 0.0).unwrap() + &nudge, factor(&start.q, 0.0).unwrap() + &nudge);
        let out = polish(&c, a, b, 2, 2, 1e-10, 3000).unwrap();
        assert!(out.residual < 1e-3 * start.residual, "{} vs {}", out.residual, start.residual);
    }

    #[test]
    fn real_embedding_matches_hermitian_spectrum() {
        // Embedded spectrum is the Hermitian spectrum with doubled multiplicity.
        let mut rng = crate::random::sub_rng(3, "embed", 0);
        let g = crate::random::ginibre(&mut rng, 3, 3);
        let h = hermitize(&g);
        let v = embedded_svec(&h);
        let mut m = DMatrix::<f64>::zeros(6, 6);
        let mut k = 0;
        for col in 0..6 {
            for row in 0..=col {
                let x = if row == col { v[k] } else { v[k] / std::f64::consts::SQRT_2 };
                m[(row, col)] = x;
                m[(col, row)] = x;
                k += 1;
            }
        }
        let mut re: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        re.sort_by(f64::total_cmp);
        let he = eigh_raw(&h).unwrap().values;
        for (i, l) in he.iter().enumerate() {
            assert!((re[2 * i] - l).abs() < 1e-10 && (re[2 * i + 1] - l).abs() < 1e-10);
        }
    }
}
