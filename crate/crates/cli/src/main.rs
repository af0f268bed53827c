use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quadtoric::{Error, Result};
use quadtoric_cli::{emit_catalog, exit_code, load, run_command, settings_from, Command};

#[derive(Parser)]
#[command(name = "quadtoric", version, about = "Moment-angle manifolds and their H-minimal Lagrangians")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gale dual `Γ`, `c` and what `Z` is.
    Gale(RunArgs),
    /// Polytope simplicity, with a witness vertex.
    CheckSimple(RunArgs),
    /// Delzant condition, with a witness vertex.
    CheckDelzant(RunArgs),
    /// Freeness of the torus action on `Z`.
    CheckFree(RunArgs),
    /// Nondegeneracy and boundedness of the quadric system.
    CheckNondeg(RunArgs),
    /// Topology of `N`.
    Classify(RunArgs),
    /// `ω|_N = 0` at sampled points.
    VerifyLagrangian(RunArgs),
    /// Mean curvature of `N` inside `Z`.
    VerifyMinimal(RunArgs),
    /// `δ i_H ω = 0` at sampled points.
    VerifyHminimal(RunArgs),
    /// Invariant Hamiltonians are constant along the torus flow.
    VerifyNoether(RunArgs),
    /// First variation formula and Hamiltonian stationarity on a patch.
    VerifyVariation(RunArgs),
    /// Lagrangian checks for `Ñ` of a pair of systems.
    VerifyNtilde(RunArgs),
    /// Every applicable check.
    ReportAll(RunArgs),
    /// Print the config text for a catalog entry.
    EmitCatalog {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Instance file; see `emit-catalog` for the format.
    config: Option<PathBuf>,
    /// Use a catalog entry instead of a file.
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Points per pointwise check.
    #[arg(long)]
    samples: Option<usize>,
    /// Finite-difference step for curvature.
    #[arg(long)]
    step: Option<f64>,
    /// `name=value`, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// The `l` of `N_l(p,q)` for two quadrics.
    #[arg(long)]
    l: Option<usize>,
    /// Also write the tab-separated report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn run(command: Command, args: RunArgs) -> Result<bool> {
    let cfg = load(args.config.as_deref(), args.catalog.as_deref())?;
    let mut s = settings_from(&cfg, |k| std::env::var(k).ok())?;
    if let Some(v) = args.seed {
        s.seed = v;
    }
    if let Some(v) = args.samples {
        s.samples = v;
    }
    if let Some(v) = args.step {
        s.step = v;
    }
    if let Some(v) = args.l {
        s.l = Some(v);
    }
    for t in &args.tol {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::Precondition(format!("--tol expects name=value, got '{t}'")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| Error::Precondition(format!("--tol {k}: '{v}' is not a number")))?;
        s.set_tolerance(k, v)?;
    }
    if s.samples == 0 {
        return Err(Error::Precondition("--samples must be positive".into()));
    }
    let report = run_command(command, &cfg.instance, &s)?;
    print!("{}", report.to_human());
    if let Some(p) = &args.report {
        std::fs::write(p, report.to_tsv()).map_err(|e| Error::Precondition(format!("{}: {e}", p.display())))?;
    }
    Ok(report.pass())
}

fn emit(name: &str, output: Option<PathBuf>) -> Result<bool> {
    let text = emit_catalog(name)?;
    match output {
        Some(p) => std::fs::write(&p, text).map_err(|e| Error::Precondition(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().cmd {
        Cmd::Gale(a) => run(Command::Gale, a),
        Cmd::CheckSimple(a) => run(Command::CheckSimple, a),
        Cmd::CheckDelzant(a) => run(Command::CheckDelzant, a),
        Cmd::CheckFree(a) => run(Command::CheckFree, a),
        Cmd::CheckNondeg(a) => run(Command::CheckNondeg, a),
        Cmd::Classify(a) => run(Command::Classify, a),
        Cmd::VerifyLagrangian(a) => run(Command::VerifyLagrangian, a),
        Cmd::VerifyMinimal(a) => run(Command::VerifyMinimal, a),
        Cmd::VerifyHminimal(a) => run(Command::VerifyHminimal, a),
        Cmd::VerifyNoether(a) => run(Command::VerifyNoether, a),
        Cmd::VerifyVariation(a) => run(Command::VerifyVariation, a),
        Cmd::VerifyNtilde(a) => run(Command::VerifyNtilde, a),
        Cmd::ReportAll(a) => run(Command::ReportAll, a),
        Cmd::EmitCatalog { name, output } => emit(&name, output),
    };
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
