//! Batch runner for bipcm experiments.
//!
//! Exit codes: 0 on success, 2 on a configuration error, 3 when a
//! conditioned sampler gives up, 1 otherwise.

use std::path::PathBuf;
use std::process::ExitCode;

use bipcm::experiment::{self, ExperimentConfig, Task};
use bipcm::logic::parse_formula;
use bipcm::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bipcm", version, about = "Random hypergraphs from the bipartite configuration model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task listed in the configuration.
    Run(Common),
    /// Write sampled incidence graphs in the text format.
    Generate(Common),
    /// Realisation counts of the standard patterns.
    Census(Common),
    /// Ball types of sampled graphs against the branching-process limit.
    Bgw(Common),
    /// Admissibility verdicts for the configured laws.
    Check(Common),
    /// Monte Carlo probability of a sentence.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Sentence as an s-expression, overriding the configured one.
        #[arg(long, conflicts_with = "formula_file")]
        formula: Option<String>,
        /// File holding the sentence.
        #[arg(long)]
        formula_file: Option<PathBuf>,
    },
    /// Local clustering in the vertex graph.
    Cluster(Common),
    /// Probability of a simple incidence graph and of no double hyper-edge.
    Simplicity(Common),
    /// Poisson configuration graphs against Erdős–Rényi graphs.
    ErCompare(Common),
}

fn load(common: &Common) -> bipcm::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::from_file(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn run_tasks(common: &Common, tasks: Option<Vec<Task>>) -> bipcm::Result<()> {
    let mut config = load(common)?;
    if let Some(tasks) = tasks {
        config.tasks = tasks;
    }
    let manifest = experiment::run(&config)?;
    for f in &manifest.files {
        println!("{}", config.output_dir.join(f).display());
    }
    println!("{}", config.output_dir.join("manifest.json").display());
    if let Some(report) = &manifest.admissibility {
        println!(
            "weak convergence: {}, support: {}, bounded second moment: {}, sublinear fourth moment: {}",
            report.weak_convergence, report.support, report.bounded_second_moment, report.sublinear_fourth_moment
        );
    }
    Ok(())
}

fn dispatch(command: Command) -> bipcm::Result<()> {
    match command {
        Command::Run(c) => run_tasks(&c, None),
        Command::Census(c) => run_tasks(&c, Some(vec![Task::Census])),
        Command::Bgw(c) => run_tasks(&c, Some(vec![Task::BgwCompare])),
        Command::Check(c) => run_tasks(&c, Some(vec![Task::Admissibility])),
        Command::Cluster(c) => run_tasks(&c, Some(vec![Task::Clustering])),
        Command::Simplicity(c) => run_tasks(&c, Some(vec![Task::Simplicity])),
        Command::Estimate {
            common,
            formula,
            formula_file,
        } => {
            let text = match (formula, formula_file) {
                (Some(f), _) => Some(f),
                (None, Some(path)) => Some(
                    std::fs::read_to_string(&path)
                        .map_err(|e| Error::Config { path: "--formula-file".into(), message: e.to_string() })?,
                ),
                (None, None) => None,
            };
            let mut config = load(&common)?;
            if let Some(text) = text {
                parse_formula(&text).map_err(|e| Error::Config {
                    path: "--formula".into(),
                    message: e.to_string(),
                })?;
                config.options.formula = Some(text);
            }
            config.tasks = vec![Task::Estimate];
            let manifest = experiment::run(&config)?;
            for f in &manifest.files {
                println!("{}", config.output_dir.join(f).display());
            }
            Ok(())
        }
        Command::Generate(c) => {
            for path in experiment::generate(&load(&c)?)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::ErCompare(c) => {
            let config = load(&c)?;
            let report = experiment::run_er_compare(&config)?;
            for row in report.rows.iter().filter(|r| r.metric == "degree-tv") {
                println!("n = {}: degree-histogram total variation {:.4}", row.n, row.gap);
            }
            println!("{}", config.output_dir.join("er-compare.csv").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::Parse { .. } | Error::Json(_) => 2,
                Error::ConditioningTooRare { .. } => 3,
                _ => 1,
            })
        }
    }
}
