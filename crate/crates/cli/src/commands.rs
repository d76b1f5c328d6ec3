use std::fs;
use std::path::Path;

use serde_json::json;

use posmaps::cones::{
    gilbert_separable_distance, test_cocp, test_cp, test_decomposable, test_positive, test_ppt_map, test_superpositive,
    Status, TestConfig, Verdict,
};
use posmaps::mapcones::{self, builtin_cone, mixed_map, ConeName, VerificationReport};
use posmaps::matmap::MatMap;
use posmaps::random::sub_seed;
use posmaps::states::{self, BipartiteState};

use crate::manifest::RunManifest;
use crate::{Expect, MapTest, Theorem};

/// Exit codes.
pub const OK: i32 = 0;
pub const VIOLATION: i32 = 1;
pub const UNDETERMINED: i32 = 2;
pub const INPUT_ERROR: i32 = 3;

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Output {
    pub code: i32,
    pub result: serde_json::Value,
    pub text: String,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn load_map(path: &Path) -> CliResult<MatMap> {
    MatMap::from_json_str(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn load_state(path: &Path) -> CliResult<BipartiteState> {
    BipartiteState::from_json_str(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Member => "member",
        Status::NonMember => "non_member",
        Status::Undetermined => "undetermined",
    }
}

pub fn run_test(test: MapTest, phi: &MatMap, cfg: &TestConfig) -> posmaps::Result<Verdict> {
    match test {
        MapTest::P => test_positive(phi, cfg),
        MapTest::Cp => test_cp(phi, cfg),
        MapTest::Cocp => test_cocp(phi, cfg),
        MapTest::Ppt => test_ppt_map(phi, cfg),
        MapTest::Dec => test_decomposable(phi, cfg),
        MapTest::Sp => test_superpositive(phi, cfg),
    }
}

pub fn analyze(
    phi: &MatMap,
    tests: &[MapTest],
    expect: &[Expect],
    strict: bool,
    cfg: &TestConfig,
    manifest: &mut RunManifest,
) -> CliResult<Output> {
    if !expect.is_empty() && expect.len() != 1 && expect.len() != tests.len() {
        return Err(CliError(format!("--expect takes 1 or {} values, got {}", tests.len(), expect.len())));
    }
    let mut code = OK;
    let mut verdicts = serde_json::Map::new();
    let mut text = String::new();
    for (k, test) in tests.iter().enumerate() {
        let v = run_test(*test, phi, cfg)?;
        let want = expect.get(if expect.len() == 1 { 0 } else { k });
        let violated = match (want, v.status) {
            (Some(Expect::Member), Status::NonMember) | (Some(Expect::NonMember), Status::Member) => true,
            _ => false,
        };
        if violated {
            code = VIOLATION;
        } else if strict && v.status == Status::Undetermined && code == OK {
            code = UNDETERMINED;
        }
        let name = test.label();
        let outcome = status_str(v.status);
        manifest.task(name, if violated { format!("{outcome} (expectation violated)") } else { outcome.to_string() });
        text.push_str(&format!("{name}: {outcome} (min value {:.3e})\n", v.evidence.min_value));
        verdicts.insert(name.to_string(), serde_json::to_value(&v)?);
    }
    Ok(Output { code, result: json!({ "verdicts": verdicts }), text })
}

pub struct VerifyArgs<'a> {
    pub theorem: Theorem,
    pub n: usize,
    pub samples: usize,
    pub count: usize,
    pub cone: Option<ConeName>,
    pub map: Option<&'a Path>,
    pub strict: bool,
}

fn cone(name: ConeName, n: usize) -> CliResult<mapcones::ConeSpec> {
    Ok(builtin_cone(name, n)?)
}

fn phi_or(map: Option<&Path>, default: impl FnOnce() -> posmaps::Result<MatMap>) -> CliResult<MatMap> {
    match map {
        Some(p) => load_map(p),
        None => Ok(default()?),
    }
}

pub fn verify(args: &VerifyArgs, cfg: &TestConfig, manifest: &mut RunManifest) -> CliResult<Output> {
    let (n, samples, seed) = (args.n, args.samples, cfg.seed);
    let phi_seed = sub_seed(seed, "cli-phi", 0);
    let report: VerificationReport = match args.theorem {
        Theorem::Lemma1 => mapcones::verify_lemma1(n, samples, cfg)?,
        Theorem::Thm2 => {
            let j = cone(args.cone.unwrap_or(ConeName::CP), n)?;
            match args.map {
                Some(p) => mapcones::verify_thm2(&j, &load_map(p)?, samples, cfg)?,
                None => mapcones::verify_thm2_batch(&j, args.count, samples, cfg)?,
            }
        }
        Theorem::Cor3 => {
            let j = cone(args.cone.unwrap_or(ConeName::D2), n)?;
            let phi = phi_or(args.map, || states::random_ppt_map(n, phi_seed))?;
            mapcones::verify_cor3(&j, &phi, samples, cfg)?
        }
        Theorem::Cor4 => mapcones::verify_cor4(n, samples, cfg)?,
        Theorem::Thm5 => mapcones::verify_thm5(samples, cfg)?,
        Theorem::Cor7 => mapcones::verify_cor7(n, samples, cfg)?,
        Theorem::Prop10 => mapcones::verify_prop10(&phi_or(args.map, || mixed_map(n, phi_seed))?, samples, cfg)?,
        Theorem::Prop11 => mapcones::verify_prop11(&phi_or(args.map, || mixed_map(n, phi_seed))?, samples, cfg)?,
        Theorem::Lemma12 => mapcones::verify_lemma12(samples, cfg)?,
        Theorem::Prop13 => {
            let phi = phi_or(args.map, || states::random_ppt_map(3, phi_seed))?;
            mapcones::verify_prop13(&phi, samples, cfg)?
        }
        Theorem::Ppt2x2 => mapcones::verify_ppt_low_dim(2, 2, samples, cfg)?,
        Theorem::Ppt2x3 => mapcones::verify_ppt_low_dim(2, 3, samples, cfg)?,
    };
    let code = if !report.agreement {
        VIOLATION
    } else if args.strict && report.inconclusive > 0 {
        UNDETERMINED
    } else {
        OK
    };
    let outcome = if !report.agreement {
        format!("{} counterexample(s)", report.counterexamples.len())
    } else if report.inconclusive > 0 {
        format!("agreement, {} inconclusive row(s)", report.inconclusive)
    } else {
        "agreement".to_string()
    };
    manifest.task(&report.theorem, outcome.clone());
    let mut text = format!("{}: {outcome}\n", report.theorem);
    for c in &report.clauses {
        text.push_str(&format!("  {}: {:?} (refuted {}, undetermined {})\n", c.clause, c.truth, c.refuted, c.undetermined));
    }
    text.push_str(&format!("  table digest {}\n", report.table_digest));
    Ok(Output { code, result: serde_json::to_value(&report)?, text })
}

pub fn sample(
    name: ConeName,
    n: usize,
    count: usize,
    dir: &Path,
    cfg: &TestConfig,
    manifest: &mut RunManifest,
) -> CliResult<Output> {
    let j = cone(name, n)?;
    fs::create_dir_all(dir).map_err(|e| CliError(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for k in 0..count {
        let phi = j.sample(sub_seed(cfg.seed, "cli-sample", k as u64));
        let file = format!("{}_{k:04}.json", name.label().to_lowercase());
        let path = dir.join(&file);
        fs::write(&path, phi.to_json()).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
        manifest.task(&file, "written");
        files.push(file);
    }
    let text = format!("wrote {count} {name} samples to {}\n", dir.display());
    Ok(Output { code: OK, result: json!({ "cone": name, "n": n, "files": files }), text })
}

pub fn distance(rho: &BipartiteState, cfg: &TestConfig, manifest: &mut RunManifest) -> CliResult<Output> {
    let g = gilbert_separable_distance(rho.hermitian(), rho.d_a(), rho.d_b(), cfg)?;
    manifest.task("gilbert", format!("distance {:.6e}", g.distance));
    let result = json!({
        "dA": rho.d_a(),
        "dB": rho.d_b(),
        "distance": g.distance,
        "lower_bound": g.lower_bound,
        "iterations": g.iterations,
        "reached_target": g.reached_target,
        "hit_cap": g.hit_cap,
        "atoms": g.atoms.len(),
    });
    let text = format!("distance {:.6e} after {} iterations (target reached: {})\n", g.distance, g.iterations, g.reached_target);
    Ok(Output { code: OK, result, text })
}
