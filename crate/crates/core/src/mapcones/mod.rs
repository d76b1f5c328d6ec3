//! Mapping cones given by generators and a closure class, their samplers,
//! and randomized verifiers of the duality statements relating them.

mod report;
mod verify;

use rand::Rng;
use serde::Serialize;

pub use report::{ClauseSummary, TableEntry, TableRow, Truth, VerificationReport};
pub use verify::*;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::{ComplexMatrix, HermitianMatrix, Projection, DEFAULT_PSD_TOL};
use crate::matmap::MatMap;
use crate::random::{density_matrix, ginibre, sub_rng, sub_seed, SampleRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConeName {
    P,
    CP,
    CoCP,
    SP,
    PPT,
    DEC,
    D2,
}

impl ConeName {
    pub const ALL: [ConeName; 7] =
        [ConeName::P, ConeName::CP, ConeName::CoCP, ConeName::SP, ConeName::PPT, ConeName::DEC, ConeName::D2];

    pub fn label(self) -> &'static str {
        match self {
            ConeName::P => "P",
            ConeName::CP => "CP",
            ConeName::CoCP => "coCP",
            ConeName::SP => "SP",
            ConeName::PPT => "PPT",
            ConeName::DEC => "DEC",
            ConeName::D2 => "D2",
        }
    }
}

impl std::str::FromStr for ConeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConeName::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownCone(s.to_string()))
    }
}

impl std::fmt::Display for ConeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// `α∘g∘β` with `α, β` completely positive.
    CpClosure,
    /// `α∘g∘β` with `α, β` positive.
    PositiveClosure,
}

#[derive(Clone, Debug)]
pub struct ConeSpec {
    pub name: ConeName,
    pub dim_in: usize,
    pub dim_out: usize,
    pub generators: Vec<MatMap>,
    pub closure: Closure,
    /// Closed under `φ ↦ φ*` and `φ ↦ φ^t`.
    pub symmetric: bool,
    pub extreme_fixtures: Vec<MatMap>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeAnalysis {
    pub k_rank: usize,
    pub notes: Vec<String>,
}

/// The rank-2 projection generating `D₂` (the identity when `n = 2`).
pub fn d2_projection(n: usize) -> ComplexMatrix {
    let d: Vec<f64> = (0..n).map(|i| if i < 2 { 1.0 } else { 0.0 }).collect();
    ComplexMatrix::diagonal(&d)
}

pub fn builtin_cone(name: ConeName, n: usize) -> Result<ConeSpec> {
    if n < 2 {
        return Err(Error::Precondition(format!("cone dimension must be at least 2, got {n}")));
    }
    let iota = MatMap::identity_map(n);
    let t = MatMap::transpose_map(n);
    let singlet = fixtures::antisymmetric_projector_map(n);
    let (generators, closure, extreme_fixtures) = match name {
        ConeName::P => {
            let mut fx = vec![fixtures::reduction_map(n), iota.clone(), t.clone()];
            if n == 3 {
                fx.push(fixtures::choi_map());
            }
            (vec![iota, t], Closure::PositiveClosure, fx)
        }
        ConeName::CP => (vec![iota.clone()], Closure::CpClosure, vec![singlet, iota]),
        ConeName::CoCP => {
            let anti = MatMap::transpose_map(n).compose(&singlet)?;
            (vec![t.clone()], Closure::CpClosure, vec![anti, t])
        }
        ConeName::SP => {
            let e11 = ComplexMatrix::unit(n, 0, 0);
            let pure = MatMap::state_times(&e11, &e11)?;
            (vec![MatMap::trace_map(n)], Closure::PositiveClosure, vec![MatMap::trace_map(n), pure])
        }
        ConeName::PPT => return ppt_cone(n, n),
        ConeName::DEC => (vec![iota.clone(), t.clone()], Closure::CpClosure, vec![iota, t, singlet]),
        ConeName::D2 => {
            let ad = MatMap::ad(&d2_projection(n));
            let tad = MatMap::transpose_map(n).compose(&ad)?;
            let rad = fixtures::reduction_map(n).compose(&ad)?;
            (vec![ad.clone()], Closure::PositiveClosure, vec![ad, tad, rad])
        }
    };
    Ok(ConeSpec { name, dim_in: n, dim_out: n, generators, closure, symmetric: true, extreme_fixtures })
}

/// PPT maps `M_{d_in} → M_{d_out}`.
pub fn ppt_cone(d_in: usize, d_out: usize) -> Result<ConeSpec> {
    let mut fx = vec![MatMap::from_choi(d_in, d_out, ComplexMatrix::identity(d_in * d_out))?];
    if (d_in, d_out) == (3, 3) {
        fx.push(fixtures::tiles_map());
    }
    Ok(ConeSpec {
        name: ConeName::PPT,
        dim_in: d_in,
        dim_out: d_out,
        generators: fx[..1].to_vec(),
        closure: Closure::CpClosure,
        symmetric: d_in == d_out,
        extreme_fixtures: fx,
    })
}

fn normalize(phi: MatMap) -> MatMap {
    let tr = phi.choi().trace().re;
    if tr > 0.0 {
        phi.scaled(phi.d_in() as f64 / tr)
    } else {
        phi
    }
}

/// Random Kraus sum with `k` operators `V` of shape `d_in × d_out`.
pub fn random_cp(rng: &mut SampleRng, d_in: usize, d_out: usize, k: usize) -> MatMap {
    let kraus: Vec<ComplexMatrix> = (0..k.max(1)).map(|_| ComplexMatrix::wrap(ginibre(rng, d_in, d_out))).collect();
    normalize(MatMap::kraus_sum(&kraus, false).expect("consistent shapes"))
}

pub fn random_cocp(rng: &mut SampleRng, d_in: usize, d_out: usize, k: usize) -> MatMap {
    let kraus: Vec<ComplexMatrix> = (0..k.max(1)).map(|_| ComplexMatrix::wrap(ginibre(rng, d_in, d_out))).collect();
    normalize(MatMap::kraus_sum(&kraus, true).expect("consistent shapes"))
}

fn kraus_count(rng: &mut SampleRng, d_in: usize, d_out: usize) -> usize {
    rng.random_range(1..=d_in * d_out)
}

/// CP or coCP with equal odds.
fn random_cp_or_cocp(rng: &mut SampleRng, d_in: usize, d_out: usize) -> MatMap {
    let k = kraus_count(rng, d_in, d_out);
    if rng.random_bool(0.5) {
        random_cp(rng, d_in, d_out, k)
    } else {
        random_cocp(rng, d_in, d_out, k)
    }
}

/// `w·α + (1−w)·β` with `α` CP and `β` coCP.
pub fn random_decomposable(rng: &mut SampleRng, d_in: usize, d_out: usize) -> MatMap {
    let ka = kraus_count(rng, d_in, d_out);
    let kb = kraus_count(rng, d_in, d_out);
    let a = random_cp(rng, d_in, d_out, ka);
    let b = random_cocp(rng, d_in, d_out, kb);
    let w: f64 = rng.random();
    MatMap::linear_combination(&[(w, &a), (1.0 - w, &b)]).expect("same shapes")
}

/// `Σ_k p_k · b_k ω_k` with full-rank states `ω_k` and PSD `b_k`.
pub fn random_sp(rng: &mut SampleRng, d_in: usize, d_out: usize) -> MatMap {
    let terms = rng.random_range(1..=3);
    let maps: Vec<MatMap> = (0..terms)
        .map(|_| {
            let rho = density_matrix(rng, d_in, d_in);
            let b = density_matrix(rng, d_out, d_out);
            MatMap::state_times(&rho, &b).expect("square factors")
        })
        .collect();
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.05).collect();
    let pairs: Vec<(f64, &MatMap)> = weights.iter().copied().zip(maps.iter()).collect();
    normalize(MatMap::linear_combination(&pairs).expect("same shapes"))
}

impl ConeSpec {
    pub fn k_rank(&self) -> ConeAnalysis {
        k_rank(self)
    }

    /// Deterministic random element of the cone.
    pub fn sample(&self, seed: u64) -> MatMap {
        let mut rng = sub_rng(seed, self.name.label(), 0);
        let (d_in, d_out) = (self.dim_in, self.dim_out);
        match self.name {
            ConeName::CP => {
                let k = kraus_count(&mut rng, d_in, d_out);
                random_cp(&mut rng, d_in, d_out, k)
            }
            ConeName::CoCP => {
                let k = kraus_count(&mut rng, d_in, d_out);
                random_cocp(&mut rng, d_in, d_out, k)
            }
            ConeName::P => random_decomposable(&mut rng, d_in, d_out),
            ConeName::DEC => {
                let (ka, kb) = (kraus_count(&mut rng, d_in, d_out), kraus_count(&mut rng, d_in, d_out));
                let a = random_cp(&mut rng, d_in, d_out, ka);
                let b = random_cocp(&mut rng, d_in, d_out, kb);
                MatMap::linear_combination(&[(1.0, &a), (1.0, &b)]).expect("same shapes")
            }
            ConeName::SP => random_sp(&mut rng, d_in, d_out),
            ConeName::PPT => {
                let rho = crate::states::random_ppt_state(d_in, d_out, sub_seed(seed, "ppt", 0))
                    .expect("PPT acceptance is high enough for the supported dimensions");
                normalize(crate::states::map_of_state(&rho))
            }
            ConeName::D2 => {
                let g = &self.generators[0];
                let terms = rng.random_range(1..=2);
                let maps: Vec<MatMap> = (0..terms)
                    .map(|_| {
                        let alpha = random_cp_or_cocp(&mut rng, d_out, d_out);
                        let beta = random_cp_or_cocp(&mut rng, d_in, d_in);
                        alpha.compose(g).and_then(|m| m.compose(&beta)).expect("square maps")
                    })
                    .collect();
                let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.05).collect();
                let pairs: Vec<(f64, &MatMap)> = weights.iter().copied().zip(maps.iter()).collect();
                normalize(MatMap::linear_combination(&pairs).expect("same shapes"))
            }
        }
    }
}

/// `Ad e` with `e` the range projection of `a a*`.
pub fn normalize_ad(a: &ComplexMatrix) -> Result<MatMap> {
    if a.frobenius_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let aa = HermitianMatrix::new(a * &a.adjoint())?;
    let e = Projection::spectral(&aa, DEFAULT_PSD_TOL)?;
    Ok(MatMap::ad(e.matrix()))
}

/// Largest `rank(e)` with `Ad e` in the cone, read off the construction.
pub fn k_rank(j: &ConeSpec) -> ConeAnalysis {
    let n = j.dim_in.min(j.dim_out);
    let (k, note) = match j.name {
        ConeName::P | ConeName::CP | ConeName::DEC => (n, "contains the identity map"),
        ConeName::D2 => (n.min(2), "generated by Ad e with rank(e) = 2"),
        ConeName::SP | ConeName::PPT | ConeName::CoCP => {
            (1, "no Ad e of rank above 1 in the hull; rank-1 Ad maps are super-positive")
        }
    };
    ConeAnalysis { k_rank: k, notes: vec![note.to_string()] }
}
