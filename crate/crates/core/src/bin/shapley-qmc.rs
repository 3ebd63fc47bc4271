use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use shapley_qmc::estimators::{exact_shapley_permutations, exact_shapley_subsets};
use shapley_qmc::harness::{
    self, parse_game, read_samples_csv, write_gnuplot, write_report, write_samples_csv, ExperimentConfig,
};
use shapley_qmc::stats::summarize;
use shapley_qmc::{
    discrepancy, estimate, sample, Algorithm, Dimension, Error, EstimateOptions, GameSpec, KernelKind, KernelSpec,
    Method, Result, SamplerConfig,
};

#[derive(Parser)]
#[command(
    name = "shapley-qmc",
    version,
    about = "Permutation sampling for Shapley value estimation"
)]
struct Cli {
    /// Worker threads for multi-trial commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct KernelArgs {
    #[arg(long, default_value = "mallows")]
    kernel: KernelKind,
    #[arg(long, default_value_t = 4.0)]
    lambda: f64,
}

impl KernelArgs {
    fn spec(self) -> KernelSpec {
        KernelSpec {
            kind: self.kernel,
            lambda: self.lambda,
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides the config's `output`, default stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write whitespace-separated columns for gnuplot here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a permutation sample set and write it as CSV.
    Sample {
        #[arg(long)]
        alg: Algorithm,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 25)]
        pool: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the raw Sobol sequence without a random shift.
        #[arg(long)]
        no_shift: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrepancy of a sample CSV, or a full table from `--config`.
    Discrepancy {
        /// Sample CSV as written by `sample`.
        #[arg(long, conflicts_with = "config")]
        input: Option<PathBuf>,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Estimate Shapley values of a game over several trials.
    Estimate {
        /// `glove`, `linear:1,2,3`, `interaction:D[:SEED]` or a JSON spec file.
        #[arg(long, required_unless_present = "csv")]
        game: Option<String>,
        /// Tabular data for a marginalization game (header row required).
        #[arg(long, requires = "predictor")]
        csv: Option<PathBuf>,
        /// Foreground row index in `--csv`; every other row is background.
        #[arg(long, default_value_t = 0)]
        row: usize,
        /// Predictor command, split on whitespace.
        #[arg(long)]
        predictor: Option<String>,
        #[arg(long, default_value = "monte-carlo")]
        alg: Method,
        /// Permutations per trial; other methods get the same n·d marginals.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 25)]
        pool: usize,
        /// Per-trial values as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence benchmark (MSE against a reference) from a config.
    Bench(ReportArgs),
    /// Parameter sweep from a config.
    Sweep(ReportArgs),
    /// Exact Shapley values of a built-in game.
    Exact {
        #[arg(long)]
        game: String,
        /// Enumerate all d! orderings instead of all 2^d subsets.
        #[arg(long)]
        permutations: bool,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn report<T: Serialize>(cfg: &ExperimentConfig, rows: &[T], out: Option<&Path>, plot: Option<&Path>) -> Result<()> {
    write_report(output(out.or(cfg.output.as_deref()))?, cfg, rows)?;
    if let Some(p) = plot {
        write_gnuplot(BufWriter::new(File::create(p)?), rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EstimateReport<'a> {
    game: &'a str,
    method: String,
    n: usize,
    trials: usize,
    seed: u64,
    values: Vec<f64>,
    ci95: Vec<f64>,
    marginal_evals: u64,
    v_evals: u64,
    per_trial: Vec<Vec<f64>>,
}

fn run(cli: Cli) -> Result<()> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Sample {
            alg,
            n,
            d,
            kernel,
            pool,
            seed,
            no_shift,
            out,
        } => {
            let cfg = SamplerConfig {
                algorithm: alg,
                n,
                d: Dimension::new(d)?,
                kernel: kernel.spec(),
                pool_size: pool,
                seed,
                sobol_shift: !no_shift,
            };
            let set = sample(&cfg)?;
            write_samples_csv(output(out.as_deref())?, &set)?;
            log::info!("{} samples in {:.3}s", set.len(), set.meta.wall_time_secs);
        }
        Command::Discrepancy {
            input: Some(path),
            kernel,
            ..
        } => {
            let set = read_samples_csv(File::open(&path)?)?;
            let spec = kernel.spec();
            let value = discrepancy(&set, &spec)?;
            println!("{value}");
            let json = serde_json::json!({
                "discrepancy": value,
                "n": set.len(),
                "d": set.dimension().get(),
                "kernel": spec,
                "weight_sum": set.weight_sum(),
            });
            println!("{json}");
        }
        Command::Discrepancy {
            config: Some(c),
            out,
            plot,
            ..
        } => {
            let cfg = ExperimentConfig::load(c)?;
            let rows = harness::with_jobs(jobs, || harness::run_discrepancy_table(&cfg))??;
            report(&cfg, &rows, out.as_deref(), plot.as_deref())?;
        }
        Command::Discrepancy { .. } => {
            return Err(Error::InvalidArguments("discrepancy needs --input or --config".into()));
        }
        Command::Estimate {
            game,
            csv,
            row,
            predictor,
            alg,
            n,
            trials,
            seed,
            kernel,
            pool,
            out,
        } => {
            let (label, spec) = match (game, csv) {
                (Some(g), _) => (g.clone(), parse_game(&g)?),
                (None, Some(path)) => (
                    path.display().to_string(),
                    GameSpec::Tabular {
                        csv: path,
                        foreground_row: row,
                        background_rows: None,
                        predictor: predictor
                            .unwrap_or_default()
                            .split_whitespace()
                            .map(str::to_string)
                            .collect(),
                        timeout_secs: None,
                    },
                ),
                (None, None) => unreachable!("clap requires --game or --csv"),
            };
            if trials == 0 {
                return Err(Error::InvalidArguments("--trials must be at least 1".into()));
            }
            let opts = EstimateOptions {
                kernel: kernel.spec(),
                pool_size: pool,
                ..Default::default()
            };
            let runs = harness::with_jobs(jobs, || {
                use rayon::prelude::*;
                (0..trials)
                    .into_par_iter()
                    .map(|t| estimate(&mut spec.build()?, alg, n, seed + t as u64, &opts))
                    .collect::<Result<Vec<_>>>()
            })??;
            let d = runs[0].values.len();
            let per_feature: Vec<_> = (0..d)
                .map(|i| summarize(&runs.iter().map(|r| r.values[i]).collect::<Vec<_>>()))
                .collect();
            if let Some(path) = out {
                let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
                let mut header = vec!["trial".to_string(), "seed".into(), "marginal_evals".into()];
                header.extend((1..=d).map(|i| format!("phi{i}")));
                w.write_record(&header)?;
                for (t, r) in runs.iter().enumerate() {
                    let mut rec = vec![
                        t.to_string(),
                        (seed + t as u64).to_string(),
                        r.marginal_evals.to_string(),
                    ];
                    rec.extend(r.values.iter().map(f64::to_string));
                    w.write_record(&rec)?;
                }
                w.flush()?;
            }
            let rep = EstimateReport {
                game: &label,
                method: alg.to_string(),
                n,
                trials,
                seed,
                values: per_feature.iter().map(|s| s.mean).collect(),
                ci95: per_feature.iter().map(|s| s.ci95).collect(),
                marginal_evals: runs[0].marginal_evals,
                v_evals: runs.iter().map(|r| r.v_evals).sum::<u64>() / trials as u64,
                per_trial: runs.into_iter().map(|r| r.values).collect(),
            };
            println!("{}", serde_json::to_string_pretty(&rep)?);
        }
        Command::Bench(a) => {
            let cfg = ExperimentConfig::load(&a.config)?;
            let (rows, reference) = harness::with_jobs(jobs, || harness::run_convergence(&cfg))??;
            log::info!("reference: {reference:?}");
            report(&cfg, &rows, a.out.as_deref(), a.plot.as_deref())?;
        }
        Command::Sweep(a) => {
            let cfg = ExperimentConfig::load(&a.config)?;
            let rows = harness::with_jobs(jobs, || harness::run_sweep(&cfg))??;
            report(&cfg, &rows, a.out.as_deref(), a.plot.as_deref())?;
        }
        Command::Exact { game, permutations } => {
            let mut g = parse_game(&game)?.build()?;
            let est = if permutations {
                exact_shapley_permutations(&mut g)?
            } else {
                exact_shapley_subsets(&mut g)?
            };
            println!("{}", serde_json::to_string_pretty(&est)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
