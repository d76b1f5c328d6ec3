mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::{CliError, CliResult, Output, INPUT_ERROR};
use manifest::RunManifest;
use posmaps::cones::TestConfig;
use posmaps::mapcones::ConeName;

#[derive(Parser, Debug)]
#[command(name = "posmaps", version, about = "Cone membership tests and duality checks for positive maps on matrix algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Root seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Separability distance tolerance.
    #[arg(long, global = true, default_value_t = 1e-4)]
    tol: f64,

    /// Exit with 2 when a verdict or clause stays undetermined.
    #[arg(long, global = true)]
    strict: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Leave the wall time out of the manifest.
    #[arg(long, global = true)]
    no_timing: bool,

    /// Directory for report and manifest files (sample files for `sample`).
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run membership tests on a map file.
    Analyze {
        map: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = MapTest::ALL)]
        tests: Vec<MapTest>,
        /// Expected status, either one for all tests or one per test.
        #[arg(long, value_enum, value_delimiter = ',')]
        expect: Vec<Expect>,
    },
    /// Randomized check of a duality statement.
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Number of maps for the batched `thm2` run.
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Cone `J` for `thm2` (default CP) and `cor3` (default D2).
        #[arg(long)]
        cone: Option<ConeName>,
        /// Map file to use instead of a random one.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Write sampled cone elements as map files.
    Sample {
        #[arg(long)]
        cone: ConeName,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Frobenius distance from a state file to the separable states.
    Distance {
        state: PathBuf,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapTest {
    P,
    Cp,
    Cocp,
    Ppt,
    Dec,
    Sp,
}

impl MapTest {
    const ALL: [MapTest; 6] = [MapTest::P, MapTest::Cp, MapTest::Cocp, MapTest::Ppt, MapTest::Dec, MapTest::Sp];

    pub fn label(self) -> &'static str {
        match self {
            MapTest::P => "p",
            MapTest::Cp => "cp",
            MapTest::Cocp => "cocp",
            MapTest::Ppt => "ppt",
            MapTest::Dec => "dec",
            MapTest::Sp => "sp",
        }
    }
}

impl std::fmt::Display for MapTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Member,
    #[value(name = "non_member", alias = "non-member")]
    NonMember,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Lemma1,
    Thm2,
    Cor3,
    Cor4,
    Thm5,
    Cor7,
    Prop10,
    Prop11,
    Lemma12,
    Prop13,
    Ppt2x2,
    Ppt2x3,
}

fn config(cli: &Cli) -> CliResult<TestConfig> {
    let cfg = TestConfig { sep_tol: cli.tol, seed: cli.seed, ..TestConfig::default() };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: TestConfig, manifest: &mut RunManifest) -> CliResult<Output> {
    match &cli.command {
        Command::Analyze { map, tests, expect } => {
            let phi = commands::load_map(map)?;
            commands::analyze(&phi, tests, expect, cli.strict, &cfg, manifest)
        }
        Command::Verify { theorem, n, samples, count, cone, map } => {
            let args = commands::VerifyArgs {
                theorem: *theorem,
                n: *n,
                samples: *samples,
                count: *count,
                cone: *cone,
                map: map.as_deref(),
                strict: cli.strict,
            };
            commands::verify(&args, &cfg, manifest)
        }
        Command::Sample { cone, n, count } => {
            let dir = cli.out.as_deref().ok_or_else(|| CliError("sample needs an output directory (-o)".into()))?;
            commands::sample(*cone, *n, *count, dir, &cfg, manifest)
        }
        Command::Distance { state, max_iters } => {
            let rho = commands::load_state(state)?;
            let cfg = TestConfig { gilbert_max_iters: *max_iters, ..cfg };
            commands::distance(&rho, &cfg, manifest)
        }
    }
}

fn write_file(dir: &std::path::Path, name: &str, body: &str) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(INPUT_ERROR as u8);
        }
    };
    let echo = json!({ "test_config": &cfg, "strict": cli.strict });
    let mut manifest = RunManifest::new(argv, cli.seed, echo);
    let out = match run(&cli, cfg, &mut manifest) {
        Ok(o) => o,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(INPUT_ERROR as u8);
        }
    };
    if !cli.no_timing {
        manifest.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    let doc = json!({ "manifest": manifest, "result": out.result, "exit_code": out.code });
    let json_text = serde_json::to_string_pretty(&doc).expect("output serializes");
    if let Some(dir) = &cli.out {
        let written = write_file(dir, "manifest.json", &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))
            .and_then(|_| match cli.command {
                Command::Sample { .. } => Ok(()),
                _ => write_file(dir, "report.json", &json_text),
            });
        if let Err(CliError(msg)) = written {
            eprintln!("error: {msg}");
            return ExitCode::from(INPUT_ERROR as u8);
        }
    }
    match cli.format {
        Format::Json => println!("{json_text}"),
        Format::Text => print!("{}", out.text),
    }
    ExitCode::from(out.code as u8)
}
