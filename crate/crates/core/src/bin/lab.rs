use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lqglab::harness::{self, Experiment, ExperimentConfig, RenderStyle, RunManifest, MANIFEST_NAME};
use lqglab::{LabError, Result};

/// Discrete LQG laboratory: sample fields, geodesics and SLE traces, and
/// compare their annulus-crossing statistics.
#[derive(Parser)]
#[command(name = "lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample fields and write them with summary statistics.
    Field(RunArgs),
    /// Geodesics between far-apart points, with Hölder moduli.
    Geodesic(RunArgs),
    /// A metric ball and the geodesic fan to its center.
    Ball(RunArgs),
    /// Chordal SLE traces and their crossing counts.
    Sle(RunArgs),
    /// Crossing counts of geodesics over annuli of every configured size.
    Crossings(RunArgs),
    /// Separating and crossing lengths over dyadic scales.
    Scales(RunArgs),
    /// Box-counting dimension of geodesics.
    Dimension(RunArgs),
    /// Whitney decomposition and shadow sums of geodesics.
    Removability(RunArgs),
    /// Geodesic and SLE crossing counts side by side.
    Compare(RunArgs),
    /// Draw a PNG next to a field, ball, trace or crossing-report file.
    Render {
        file: PathBuf,
        #[arg(long)]
        style: String,
    },
    /// Run again from a manifest and check every output digest.
    Rerun {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(experiment: Experiment, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| LabError::io(p, e))?;
            ExperimentConfig::parse_for(experiment, &text)?
        }
        None => ExperimentConfig::new(experiment),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn report(manifest: &RunManifest, dir: &std::path::Path) {
    for o in &manifest.outputs {
        println!("{}  {:>10}  {}", o.sha256, o.bytes, o.name);
    }
    println!(
        "{} outputs in {:.2} s, manifest {}",
        manifest.outputs.len(),
        manifest.timings.total_seconds,
        dir.join(MANIFEST_NAME).display()
    );
}

fn main_inner(cli: Cli) -> Result<ExitCode> {
    let (experiment, args) = match cli.command {
        Command::Render { file, style } => {
            let out = harness::render(&file, style.parse::<RenderStyle>()?)?;
            println!("{}", out.display());
            return Ok(ExitCode::SUCCESS);
        }
        Command::Rerun { manifest, out } => {
            let before = RunManifest::load(&manifest)?;
            let after = harness::rerun(&manifest, out.as_deref())?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&before.config["output_dir"]));
            report(&after, &dir);
            let differ = before.differing_outputs(&after);
            if differ.is_empty() {
                println!("all {} outputs reproduced byte for byte", after.outputs.len());
                return Ok(ExitCode::SUCCESS);
            }
            for name in &differ {
                eprintln!("differs: {name}");
            }
            return Ok(ExitCode::from(1));
        }
        Command::Field(a) => (Experiment::Field, a),
        Command::Geodesic(a) => (Experiment::Geodesic, a),
        Command::Ball(a) => (Experiment::Ball, a),
        Command::Sle(a) => (Experiment::Sle, a),
        Command::Crossings(a) => (Experiment::Crossings, a),
        Command::Scales(a) => (Experiment::Scales, a),
        Command::Dimension(a) => (Experiment::Dimension, a),
        Command::Removability(a) => (Experiment::Removability, a),
        Command::Compare(a) => (Experiment::Compare, a),
    };
    let cfg = load(experiment, &args)?;
    let manifest = harness::run(&cfg)?;
    report(&manifest, &cfg.output_dir);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
