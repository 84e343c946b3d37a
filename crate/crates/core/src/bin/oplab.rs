use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use oplab::report::Command;
use oplab::runner::{run, run_suite, summarize_suite, RunOptions, RunOutput};
use oplab::scalar::Precision;
use oplab::scenario::{bundled_suite, parse_scenario, Overrides};
use oplab::Error;

#[derive(Parser)]
#[command(
    name = "oplab",
    version,
    about = "Boundedness, essential norm and compactness diagnostics for weighted composition-differentiation operators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Jet derivatives, the second-derivative expansion, the derivative at 0 and the delta systems
    VerifyIdentities,
    /// Delta systems for the scenario's order only
    VerifyDelta,
    /// Boundedness from the test-function and coefficient criteria, plus the 1/3 split
    CheckBounded,
    /// Tail quantities, an operator-norm lower bound and dilation residuals
    EssentialNorm,
    /// Compactness verdict from both tail quantities
    Compactness,
    /// Per-ring maxima of the Q_k integrand
    Profile,
    /// check-bounded followed by essential-norm on a bounded operator
    Analyze,
    /// analyze on every bundled scenario, compared with the known verdicts
    Suite,
}

impl Cmd {
    fn command(self) -> Option<Command> {
        Some(match self {
            Cmd::VerifyIdentities => Command::VerifyIdentities,
            Cmd::VerifyDelta => Command::VerifyDelta,
            Cmd::CheckBounded => Command::CheckBounded,
            Cmd::EssentialNorm => Command::EssentialNorm,
            Cmd::Compactness => Command::Compactness,
            Cmd::Profile => Command::Profile,
            Cmd::Analyze => Command::Analyze,
            Cmd::Suite => return None,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Arithmetic for jets: double or extended (double-double)
    #[arg(long, global = true, value_parser = parse_precision)]
    precision: Option<Precision>,
    /// Grid refinement level (0..=6)
    #[arg(long, global = true)]
    grid_depth: Option<u32>,
    /// Deepest tail annulus n, sampled at 1 - 2^-n
    #[arg(long, global = true)]
    tail_depth: Option<u32>,
    /// Directory for <name>.report.json and <name>.profile.csv
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format written to stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also check the three-term test-function combinations
    #[arg(long = "paper-3term", global = true)]
    paper_3term: bool,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse()
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("OPLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("OPLAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn write_artifacts(dir: &Path, name: &str, out: &RunOutput) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{name}.report.json")), out.report.to_json() + "\n")?;
    if let Some(csv) = &out.csv {
        std::fs::write(dir.join(format!("{name}.profile.csv")), csv)?;
    }
    Ok(())
}

fn summary(out: &RunOutput) -> String {
    let r = &out.report;
    let v = &r.verdicts;
    let mut parts = vec![format!("{} {}", r.command, r.scenario.name)];
    if let Some(p) = v.identities_pass {
        parts.push(format!("identities {}", if p { "pass" } else { "FAIL" }));
    }
    if let Some(p) = v.delta_pass {
        parts.push(format!("delta {}", if p { "pass" } else { "FAIL" }));
    }
    if let (Some(ii), Some(iii)) = (v.bounded_ii, v.bounded_iii) {
        parts.push(format!("criterion ii {ii:?}, criterion iii {iii:?}").to_lowercase());
    }
    if let Some(c) = &v.compactness {
        parts.push(format!("compactness {:?} (F {:?}, E {:?})", c.verdict, c.via_f, c.via_e).to_lowercase());
    }
    if let Some(e) = &r.essential {
        parts.push(format!("max E {:.6e}, max F {:.6e}", e.e_max, e.f_max));
    }
    parts.push(format!("status {:?}", r.status).to_lowercase());
    parts.join("; ")
}

fn options(c: &Common) -> RunOptions {
    RunOptions {
        overrides: Overrides {
            precision: c.precision,
            grid_depth: c.grid_depth,
            tail_depth: c.tail_depth,
        },
        paper_3term: c.paper_3term,
    }
}

fn run_bundled(c: &Common) -> Result<i32, Error> {
    if c.format == Format::Csv {
        return Err(Error::Config("--format csv is only available for `profile`".into()));
    }
    let cases = bundled_suite();
    let outputs = run_suite(&cases, &options(c))?;
    if let Some(dir) = &c.out {
        for out in &outputs {
            write_artifacts(dir, &out.report.scenario.name, out)?;
        }
    }
    let table = summarize_suite(&cases, &outputs);
    println!("{}", serde_json::to_string_pretty(&table)?);
    for out in &outputs {
        eprintln!("{}", summary(out));
    }
    Ok(if table.pass { 0 } else { 2 })
}

fn main_inner(cli: Cli) -> Result<i32, Error> {
    init_threads()?;
    let c = &cli.common;
    let Some(cmd) = cli.cmd.command() else {
        return run_bundled(c);
    };
    let path = c
        .scenario
        .as_ref()
        .ok_or_else(|| Error::Config("--scenario <path> is required".into()))?;
    if c.format == Format::Csv && cmd != Command::Profile {
        return Err(Error::Config("--format csv is only available for `profile`".into()));
    }
    let src =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let scenario = parse_scenario(&src)?;
    let out = run(cmd, &scenario, &options(c))?;
    if let Some(dir) = &c.out {
        write_artifacts(dir, scenario.name(), &out)?;
    }
    match c.format {
        Format::Json => println!("{}", out.report.to_json()),
        Format::Csv => print!("{}", out.csv.as_deref().unwrap_or_default()),
    }
    eprintln!("{}", summary(&out));
    Ok(out.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
