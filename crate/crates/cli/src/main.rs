use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use csl_core::experiment::{
    build_scenario, emit_reports, load_summary, run_experiment, ModelKind, ModelSelection, RunConfig, Summary,
};
use csl_core::sim::Scenario;
use csl_core::{Error, Modality};

/// Cross-situational word grounding simulator.
#[derive(Parser)]
#[command(name = "csl-ground", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario and write it as JSON.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Feature dimensions as SHAPE,COLOR,ACTION.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize, usize)>,
        #[arg(long)]
        noise: Option<f64>,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the experiment and write reports.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Training fraction: 1.0 trains and tests on everything.
        #[arg(long)]
        split: Option<f64>,
        /// csl, baseline or both.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        sequences: Option<usize>,
        /// Use a scenario written by `generate` instead of generating one.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Report directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a summary; with --out, rewrite all report files from it.
    Report {
        /// A summary.json file or a directory containing one.
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err("expected three comma-separated dimensions".into()),
    }
}

/// Exit status 1: bad configuration or input files.
/// Exit status 2: failures while running or writing output.
enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn input(e: Error) -> Self {
        Failure::Config(e.to_string())
    }

    fn runtime(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    match path {
        Some(p) => RunConfig::from_path(p).map_err(Failure::input),
        None => Ok(RunConfig::default()),
    }
}

fn generate(
    config: Option<PathBuf>,
    seed: Option<u64>,
    dims: Option<(usize, usize, usize)>,
    noise: Option<f64>,
    out: &Path,
) -> Result<(), Failure> {
    let mut cfg = load_config(config.as_deref())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some((s, c, a)) = dims {
        cfg.scenario.shape_dim = s;
        cfg.scenario.color_dim = c;
        cfg.scenario.action_dim = a;
    }
    if let Some(n) = noise {
        cfg.scenario.noise_scale = n;
    }
    cfg.scenario_config().validate().map_err(Failure::input)?;
    let scenario = build_scenario(&cfg).map_err(Failure::runtime)?;
    let json = scenario.to_json().map_err(Failure::runtime)?;
    std::fs::write(out, json + "\n").map_err(|e| Failure::runtime(Error::io(out, e)))?;
    println!(
        "wrote {} situations to {}",
        scenario.situations.len(),
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run(
    config: Option<PathBuf>,
    seed: Option<u64>,
    split: Option<f64>,
    model: Option<String>,
    sequences: Option<usize>,
    scenario: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut cfg = load_config(config.as_deref())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(f) = split {
        cfg.split = f;
    }
    if let Some(m) = model {
        cfg.model = m.parse::<ModelSelection>().map_err(Failure::input)?;
    }
    if let Some(n) = sequences {
        cfg.n_sequences = n;
    }
    cfg.validate().map_err(Failure::input)?;
    let out = out
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| Failure::Config("no output directory: pass --out or set out_dir".into()))?;

    let scenario = match scenario {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Failure::input(Error::io(&path, e)))?;
            Scenario::from_json(&text).map_err(Failure::input)?
        }
        None => build_scenario(&cfg).map_err(Failure::runtime)?,
    };
    let summary = run_experiment(&cfg, &scenario).map_err(Failure::runtime)?;
    emit_reports(&summary, &out).map_err(Failure::runtime)?;
    print_summary(&summary);
    println!("reports written to {}", out.display());
    Ok(())
}

fn report(summary: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let path = if summary.is_dir() {
        summary.join("summary.json")
    } else {
        summary.to_path_buf()
    };
    let summary = load_summary(&path).map_err(Failure::input)?;
    print_summary(&summary);
    if let Some(out) = out {
        emit_reports(&summary, &out).map_err(Failure::runtime)?;
        println!("reports written to {}", out.display());
    }
    Ok(())
}

fn cell(stat: Option<&csl_core::experiment::Stat>) -> String {
    stat.map_or_else(|| "-".into(), |s| format!("{:.3} ± {:.3}", s.mean, s.std))
}

fn print_summary(summary: &Summary) {
    println!(
        "seed {}  sequences {}  split {}",
        summary.seed,
        summary.n_sequences,
        summary.split.label()
    );
    println!(
        "{:<10} {:>15} {:>15} {:>15} {:>15} {:>15}",
        "model", "shape", "color", "action", "auxiliary", "sentence"
    );
    for (kind, m) in &summary.models {
        let cols: Vec<String> = Modality::ALL
            .iter()
            .map(|x| cell(m.per_modality.get(x)))
            .chain([cell(m.sentence.as_ref())])
            .collect();
        println!(
            "{:<10} {:>15} {:>15} {:>15} {:>15} {:>15}",
            kind.name(),
            cols[0],
            cols[1],
            cols[2],
            cols[3],
            cols[4]
        );
    }
    if let Some(last) = summary
        .models
        .get(&ModelKind::Csl)
        .and_then(|m| m.trajectory.as_ref())
        .and_then(|t| t.last())
    {
        println!(
            "csl mappings after {} situations: {:.1} correct, {:.1} false",
            last.situations, last.correct.mean, last.false_mappings.mean
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate {
            config,
            seed,
            dims,
            noise,
            out,
        } => generate(config, seed, dims, noise, &out),
        Command::Run {
            config,
            seed,
            split,
            model,
            sequences,
            scenario,
            out,
        } => run(config, seed, split, model, sequences, scenario, out),
        Command::Report { summary, out } => report(&summary, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
