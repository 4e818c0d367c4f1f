use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sagsense::harness::{
    compare_with_oracle, emit_trace, parse_config, run_experiment, run_trace, write_csv, write_failures,
    write_oracle_csv, ExperimentSpec,
};
use sagsense::optimizer::Strategy;

/// Overrides the default output directory when `--out` is absent.
const OUT_DIR_ENV: &str = "SAGSENSE_OUT_DIR";

#[derive(Parser)]
#[command(name = "sagsense", version, about = "Bistatic satellite sensing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full sweep and write results.csv.
    Run(Common),
    /// One joint run on trial 0; writes trace.csv.
    Trace(Common),
    /// Joint optimiser against the grid-search oracle; writes oracle.csv.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Grid points per angle.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    config: PathBuf,
    /// Output directory (default: $SAGSENSE_OUT_DIR, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the config's base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated strategy names, e.g. joint,receive_only.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<Strategy>>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentSpec, PathBuf)> {
        let mut spec = parse_config(&self.config)
            .with_context(|| format!("config stage: cannot load {}", self.config.display()))?;
        if let Some(seed) = self.seed {
            spec.base_seed = seed;
        }
        if let Some(s) = &self.strategies {
            spec.strategies = s.clone();
            spec.validate().context("config stage: bad --strategies")?;
        }
        let out = self
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        std::fs::create_dir_all(&out)
            .with_context(|| format!("output stage: cannot create {}", out.display()))?;
        Ok((spec, out))
    }
}

fn output_context(path: &Path) -> String {
    format!("output stage: cannot write {}", path.display())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let (spec, out) = common.load()?;
            let run = run_experiment(&spec).context("experiment stage")?;
            let path = out.join("results.csv");
            write_csv(&run.records, &path).with_context(|| output_context(&path))?;
            println!("{} records -> {}", run.records.len(), path.display());
            if !run.failures.is_empty() {
                let fpath = out.join("failures.csv");
                write_failures(&run.failures, &fpath).with_context(|| output_context(&fpath))?;
                eprintln!("{} trials failed, see {}", run.failures.len(), fpath.display());
            }
        }
        Command::Trace(common) => {
            let (spec, out) = common.load()?;
            let trace = run_trace(&spec, 0).context("optimizer stage")?;
            let path = out.join("trace.csv");
            emit_trace(&trace, &path).with_context(|| output_context(&path))?;
            println!(
                "{} iterations, final SINR {:.4} dB -> {}",
                trace.iterations(),
                10.0 * trace.final_sinr.log10(),
                path.display()
            );
        }
        Command::Oracle { common, resolution } => {
            let (spec, out) = common.load()?;
            let rows = compare_with_oracle(&spec, resolution).context("oracle stage")?;
            let path = out.join("oracle.csv");
            write_oracle_csv(&rows, &path).with_context(|| output_context(&path))?;
            let worst = rows.iter().map(|r| r.ratio()).fold(f64::INFINITY, f64::min);
            println!("{} instances, worst alternating/oracle ratio {worst:.6} -> {}", rows.len(), path.display());
            if worst < 0.98 {
                bail!("oracle stage: alternating result below 0.98 of the grid optimum");
            }
        }
    }
    Ok(())
}
