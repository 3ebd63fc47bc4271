//! Experiment harness: discrepancy tables, convergence runs and parameter
//! sweeps, all written as CSV with the resolved config as a `#` header.
//!
//! Trial `t` always uses seed `base_seed + t`, and rows come out in
//! (cell, trial) order whatever the number of worker threads.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{discrepancy, SampleMeta, WeightedSampleSet};
use crate::error::{Error, Result};
use crate::estimators::{estimate, exact_shapley_subsets, mse, EstimateOptions, Method, DEFAULT_OWEN_NODES};
use crate::games::GameSpec;
use crate::kernels::{KernelKind, KernelSpec};
use crate::perm::{Dimension, Permutation};
use crate::samplers::{sample, Algorithm, SamplerConfig, DEFAULT_POOL_SIZE};
use crate::stats::summarize;

fn default_trials() -> usize {
    25
}

fn default_pool() -> usize {
    DEFAULT_POOL_SIZE
}

fn default_owen_nodes() -> usize {
    DEFAULT_OWEN_NODES
}

fn default_true() -> bool {
    true
}

fn default_methods() -> Vec<Method> {
    vec![Method::MonteCarlo]
}

/// Parameters swept by [`run_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "kebab-case")]
pub enum Sweep {
    Lambda(Vec<f64>),
    PoolSize(Vec<usize>),
    Kernel(Vec<KernelKind>),
}

impl Sweep {
    fn name(&self) -> &'static str {
        match self {
            Sweep::Lambda(_) => "lambda",
            Sweep::PoolSize(_) => "pool-size",
            Sweep::Kernel(_) => "kernel",
        }
    }
}

/// One experiment: the cross product of `algorithms × ds × ns`, each run for
/// `trials` seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_methods")]
    pub algorithms: Vec<Method>,
    #[serde(default)]
    pub ds: Vec<usize>,
    pub ns: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Kernel used by herding and SBQ to pick samples.
    #[serde(default)]
    pub kernel: KernelSpec,
    /// Kernel under which discrepancy is reported.
    #[serde(default)]
    pub eval_kernel: KernelSpec,
    #[serde(default = "default_pool")]
    pub pool_size: usize,
    #[serde(default = "default_owen_nodes")]
    pub owen_nodes: usize,
    /// Game for convergence runs and optional sweep MSE columns.
    #[serde(default)]
    pub game: Option<GameSpec>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    /// When false, time columns are written as 0 so reports are byte-stable.
    #[serde(default = "default_true")]
    pub record_timing: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(algorithms: Vec<Method>, ds: Vec<usize>, ns: Vec<usize>) -> Self {
        ExperimentConfig {
            algorithms,
            ds,
            ns,
            trials: default_trials(),
            base_seed: 0,
            kernel: KernelSpec::default(),
            eval_kernel: KernelSpec::default(),
            pool_size: DEFAULT_POOL_SIZE,
            owen_nodes: DEFAULT_OWEN_NODES,
            game: None,
            sweep: None,
            record_timing: true,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(Error::Config("ns must be a nonempty list of positive counts".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms given".into()));
        }
        for d in &self.ds {
            Dimension::new(*d)?;
        }
        self.kernel.validate()?;
        self.eval_kernel.validate()
    }

    pub fn seed(&self, trial: usize) -> u64 {
        self.base_seed + trial as u64
    }

    fn samplers(&self) -> Result<Vec<Algorithm>> {
        self.algorithms
            .iter()
            .map(|m| {
                m.sampler()
                    .ok_or_else(|| Error::Config(format!("{m} is not a permutation sampler")))
            })
            .collect()
    }

    fn sampler_config(&self, algorithm: Algorithm, d: usize, n: usize, trial: usize) -> Result<SamplerConfig> {
        Ok(SamplerConfig {
            algorithm,
            n,
            d: Dimension::new(d)?,
            kernel: self.kernel,
            pool_size: self.pool_size,
            seed: self.seed(trial),
            sobol_shift: true,
        })
    }

    fn timing(&self, secs: f64) -> f64 {
        if self.record_timing {
            secs
        } else {
            0.0
        }
    }
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Flattens `cells × trials`, runs each in parallel and regroups per cell.
fn par_trials<C: Sync, T: Send>(
    cells: &[C],
    trials: usize,
    f: impl Fn(&C, usize) -> Result<T> + Sync,
) -> Result<Vec<Vec<T>>> {
    let flat: Vec<T> = (0..cells.len() * trials)
        .into_par_iter()
        .map(|k| f(&cells[k / trials], k % trials))
        .collect::<Result<_>>()?;
    let mut it = flat.into_iter();
    Ok(cells.iter().map(|_| it.by_ref().take(trials).collect()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    pub d: usize,
    pub n: usize,
    pub algorithm: String,
    pub disc_mean: f64,
    pub disc_std: f64,
    pub time_mean: f64,
    pub time_std: f64,
}

/// Mean and spread of sample discrepancy and generation time per cell.
pub fn run_discrepancy_table(cfg: &ExperimentConfig) -> Result<Vec<DiscrepancyRow>> {
    cfg.validate()?;
    if cfg.ds.is_empty() {
        return Err(Error::Config("discrepancy table needs at least one d".into()));
    }
    let mut cells = Vec::new();
    for &d in &cfg.ds {
        for &n in &cfg.ns {
            for alg in cfg.samplers()? {
                cells.push((d, n, alg));
            }
        }
    }
    let results = par_trials(&cells, cfg.trials, |&(d, n, alg), t| {
        let set = sample(&cfg.sampler_config(alg, d, n, t)?)?;
        Ok((discrepancy(&set, &cfg.eval_kernel)?, set.meta.wall_time_secs))
    })?;
    Ok(cells
        .iter()
        .zip(results)
        .map(|(&(d, n, alg), trials)| {
            let disc: Vec<f64> = trials.iter().map(|r| r.0).collect();
            let time: Vec<f64> = trials.iter().map(|r| cfg.timing(r.1)).collect();
            let (ds, ts) = (summarize(&disc), summarize(&time));
            DiscrepancyRow {
                d,
                n,
                algorithm: alg.name().into(),
                disc_mean: ds.mean,
                disc_std: ds.std,
                time_mean: ts.mean,
                time_std: ts.std,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub algorithm: String,
    pub n: usize,
    pub marginal_evals: f64,
    pub v_evals: f64,
    pub mse_mean: f64,
    pub mse_std: f64,
    pub mse_ci95: f64,
    pub time_mean: f64,
}

/// Where the reference values of a convergence run came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Reference {
    Exact(Vec<f64>),
    /// Elementwise mean of all estimates at the largest budget.
    TrialMean(Vec<f64>),
}

impl Reference {
    pub fn values(&self) -> &[f64] {
        match self {
            Reference::Exact(v) | Reference::TrialMean(v) => v,
        }
    }
}

/// MSE against the reference per (method, budget); `n` is the number of
/// permutations, i.e. a budget of `n·d` marginal contributions.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<(Vec<ConvergenceRow>, Reference)> {
    cfg.validate()?;
    let spec = cfg
        .game
        .as_ref()
        .ok_or_else(|| Error::Config("convergence run needs a game".into()))?;
    let opts = EstimateOptions {
        kernel: cfg.kernel,
        pool_size: cfg.pool_size,
        owen_nodes: cfg.owen_nodes,
    };
    let d = spec.build()?.dim();
    // Stratified sampling cannot run below one draw per stratum and twice
    // the d² strata; those cells are left out rather than failing the run.
    let cells: Vec<(Method, usize)> = cfg
        .algorithms
        .iter()
        .flat_map(|&m| cfg.ns.iter().map(move |&n| (m, n)))
        .filter(|&(m, n)| {
            let keep = m != Method::Stratified || n >= 2 * d;
            if !keep {
                log::info!("skipping stratified at n={n}: budget below 2d²");
            }
            keep
        })
        .collect();
    let results = par_trials(&cells, cfg.trials, |&(m, n), t| {
        let mut game = spec.build()?;
        let start = Instant::now();
        let est = estimate(&mut game, m, n, cfg.seed(t), &opts)?;
        Ok((est, start.elapsed().as_secs_f64()))
    })?;

    let reference = if spec.has_exact_oracle() {
        Reference::Exact(exact_shapley_subsets(&mut spec.build()?)?.values)
    } else {
        let top = *cfg.ns.iter().max().expect("validated nonempty");
        let rows: Vec<&Vec<f64>> = cells
            .iter()
            .zip(&results)
            .filter(|((_, n), _)| *n == top)
            .flat_map(|(_, r)| r.iter().map(|(e, _)| &e.values))
            .collect();
        let d = rows[0].len();
        let mean = (0..d)
            .map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / rows.len() as f64)
            .collect();
        Reference::TrialMean(mean)
    };

    let refm = vec![reference.values().to_vec()];
    let rows = cells
        .iter()
        .zip(results)
        .map(|(&(m, n), trials)| -> Result<ConvergenceRow> {
            let errs: Vec<f64> = trials
                .iter()
                .map(|(e, _)| mse(&refm, std::slice::from_ref(&e.values)))
                .collect::<Result<_>>()?;
            let s = summarize(&errs);
            let avg = |f: &dyn Fn(&(crate::ShapleyEstimate, f64)) -> f64| {
                trials.iter().map(f).sum::<f64>() / trials.len() as f64
            };
            Ok(ConvergenceRow {
                algorithm: m.name().into(),
                n,
                marginal_evals: avg(&|r| r.0.marginal_evals as f64),
                v_evals: avg(&|r| r.0.v_evals as f64),
                mse_mean: s.mean,
                mse_std: s.std,
                mse_ci95: s.ci95,
                time_mean: cfg.timing(avg(&|r| r.1)),
            })
        })
        .collect::<Result<_>>()?;
    Ok((rows, reference))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub algorithm: String,
    pub d: usize,
    pub n: usize,
    pub disc_mean: f64,
    pub disc_ci95: f64,
    /// Empty unless the config names a game.
    pub mse_mean: Option<f64>,
    pub mse_ci95: Option<f64>,
}

/// Varies one sampler parameter; discrepancy is always measured under
/// `eval_kernel` so rows are comparable across the sweep.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep config needs a `sweep` entry".into()))?;
    let variants: Vec<(String, ExperimentConfig)> = match sweep {
        Sweep::Lambda(ls) => ls
            .iter()
            .map(|&l| {
                let mut c = cfg.clone();
                c.kernel = KernelSpec::mallows(l);
                (l.to_string(), c)
            })
            .collect(),
        Sweep::PoolSize(ps) => ps
            .iter()
            .map(|&p| {
                let mut c = cfg.clone();
                c.pool_size = p;
                (p.to_string(), c)
            })
            .collect(),
        Sweep::Kernel(ks) => ks
            .iter()
            .map(|&k| {
                let mut c = cfg.clone();
                c.kernel = KernelSpec {
                    kind: k,
                    lambda: cfg.kernel.lambda,
                };
                (k.to_string(), c)
            })
            .collect(),
    };
    let game_d = match &cfg.game {
        Some(g) => Some(g.build()?.dim()),
        None => None,
    };
    let ds: Vec<usize> = match (game_d, cfg.ds.is_empty()) {
        (Some(d), _) => vec![d],
        (None, false) => cfg.ds.clone(),
        (None, true) => return Err(Error::Config("sweep needs ds or a game".into())),
    };
    let reference = match (&cfg.game, game_d) {
        (Some(g), Some(_)) if g.has_exact_oracle() => Some(exact_shapley_subsets(&mut g.build()?)?.values),
        (Some(_), _) => return Err(Error::Config("sweep MSE needs a game with an exact oracle".into())),
        _ => None,
    };

    let mut cells = Vec::new();
    for (label, c) in &variants {
        for &d in &ds {
            for &n in &cfg.ns {
                for alg in cfg.samplers()? {
                    cells.push((label.clone(), c, d, n, alg));
                }
            }
        }
    }
    let results = par_trials(&cells, cfg.trials, |(_, c, d, n, alg), t| {
        let set = sample(&c.sampler_config(*alg, *d, *n, t)?)?;
        let disc = discrepancy(&set, &c.eval_kernel)?;
        let err = match (&reference, &c.game) {
            (Some(r), Some(g)) => {
                let est = crate::estimators::shapley_from_permutations(&mut g.build()?, &set)?;
                Some(mse(std::slice::from_ref(r), std::slice::from_ref(&est.values))?)
            }
            _ => None,
        };
        Ok((disc, err))
    })?;
    Ok(cells
        .into_iter()
        .zip(results)
        .map(|((label, _, d, n, alg), trials)| {
            let disc = summarize(&trials.iter().map(|r| r.0).collect::<Vec<_>>());
            let errs: Vec<f64> = trials.iter().filter_map(|r| r.1).collect();
            let mse_s = (!errs.is_empty()).then(|| summarize(&errs));
            SweepRow {
                axis: sweep.name().into(),
                value: label,
                algorithm: alg.name().into(),
                d,
                n,
                disc_mean: disc.mean,
                disc_ci95: disc.ci95,
                mse_mean: mse_s.map(|s| s.mean),
                mse_ci95: mse_s.map(|s| s.ci95),
            }
        })
        .collect())
}

/// Writes `# config: <json>` followed by the rows as CSV.
pub fn write_report<W: Write, T: Serialize>(mut out: W, cfg: &ExperimentConfig, rows: &[T]) -> Result<()> {
    writeln!(out, "# config: {}", serde_json::to_string(cfg)?)?;
    writeln!(
        out,
        "# seeds: {}..{} (base_seed + trial)",
        cfg.base_seed,
        cfg.base_seed + cfg.trials as u64
    )?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Same rows as whitespace-separated columns for gnuplot.
pub fn write_gnuplot<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(b' ').from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a sample set as CSV with header `r1,...,rd,weight`.
pub fn write_samples_csv<W: Write>(out: W, set: &WeightedSampleSet) -> Result<()> {
    let d = set.dimension().get();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=d).map(|i| format!("r{i}")).collect();
    header.push("weight".into());
    w.write_record(&header)?;
    for (p, wt) in set.samples().iter().zip(set.weights()) {
        let mut rec: Vec<String> = p.ranks().iter().map(u32::to_string).collect();
        rec.push(wt.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the format written by [`write_samples_csv`].
pub fn read_samples_csv<R: std::io::Read>(input: R) -> Result<WeightedSampleSet> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().next_back() != Some("weight") {
        return Err(Error::Config("sample CSV must end with a `weight` column".into()));
    }
    let (mut samples, mut weights) = (Vec::new(), Vec::new());
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let bad = |e: String| Error::Config(format!("sample CSV line {line}: {e}"));
        let fields: Vec<&str> = rec.iter().collect();
        let (wt, ranks) = fields.split_last().ok_or_else(|| bad("empty record".into()))?;
        let ranks = ranks
            .iter()
            .map(|f| f.trim().parse::<u32>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        samples.push(Permutation::from_ranks(ranks).map_err(|e| bad(e.to_string()))?);
        weights.push(wt.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?);
    }
    WeightedSampleSet::new(samples, weights, SampleMeta::default())
}

/// Default term counts for `interaction:D:SEED` games: `d` linear terms and
/// `d`, `d`, `d/2` terms of two, three and four players.
pub fn default_interaction_counts(d: usize) -> Vec<usize> {
    let mut counts = vec![d, d, d, d / 2];
    counts.truncate(d);
    counts
}

/// Parses a game argument: `glove`, `linear:1,2,3`, `interaction:D[:SEED]`,
/// or the path of a JSON game spec.
pub fn parse_game(arg: &str) -> Result<GameSpec> {
    let bad = |m: &str| Error::Config(format!("game {arg:?}: {m}"));
    let (kind, rest) = arg.split_once(':').unwrap_or((arg, ""));
    match kind {
        "glove" => Ok(GameSpec::Glove),
        "linear" => {
            let coeffs = rest
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| bad(&e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            Ok(GameSpec::Linear { coeffs, baseline: 0.0 })
        }
        "interaction" => {
            let mut parts = rest.split(':');
            let d: usize = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("expected interaction:D[:SEED]"))?;
            let seed = match parts.next() {
                Some(v) => v.parse().map_err(|_| bad("seed must be an integer"))?,
                None => 0,
            };
            Ok(GameSpec::RandomInteraction {
                d,
                counts: default_interaction_counts(d),
                seed,
            })
        }
        _ => {
            let text =
                std::fs::read_to_string(arg).map_err(|e| bad(&format!("not a built-in game and not readable: {e}")))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(ms: Vec<Method>) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(ms, vec![6], vec![10, 40]);
        c.trials = 4;
        c
    }

    #[test]
    fn config_json_defaults() {
        let c = ExperimentConfig::from_json(r#"{"algorithms":["herding","mc"],"ds":[10],"ns":[100]}"#).unwrap();
        assert_eq!(c.trials, 25);
        assert_eq!(c.pool_size, 25);
        assert_eq!(c.eval_kernel, KernelSpec::mallows(4.0));
        assert!(c.record_timing);
        assert_eq!(c.seed(3), 3);
        assert!(ExperimentConfig::from_json(r#"{"ns":[10],"trials":0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"ns":[]}"#).is_err());
        assert!(matches!(ExperimentConfig::from_json("{"), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_json_shape() {
        let s: Sweep = serde_json::from_str(r#"{"axis":"pool-size","values":[5,10]}"#).unwrap();
        assert_eq!(s, Sweep::PoolSize(vec![5, 10]));
        let k: Sweep = serde_json::from_str(r#"{"axis":"kernel","values":["kendall","Mallows"]}"#).unwrap();
        assert_eq!(k, Sweep::Kernel(vec![KernelKind::Kendall, KernelKind::Mallows]));
    }

    #[test]
    fn discrepancy_rows_in_cell_order() {
        let mut c = small(vec![Method::MonteCarlo, Method::Herding]);
        c.record_timing = false;
        let rows = run_discrepancy_table(&c).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.n, r.algorithm.as_str())).collect();
        assert_eq!(
            keys,
            vec![
                (10, "monte-carlo"),
                (10, "herding"),
                (40, "monte-carlo"),
                (40, "herding")
            ]
        );
        assert!(rows.iter().all(|r| r.time_mean == 0.0 && r.disc_mean > 0.0));
        let again = with_jobs(Some(2), || run_discrepancy_table(&c)).unwrap().unwrap();
        assert_eq!(rows, again);
        c.algorithms = vec![Method::Owen];
        assert!(run_discrepancy_table(&c).is_err());
    }

    #[test]
    fn report_header_and_columns() {
        let mut c = small(vec![Method::MonteCarlo]);
        c.trials = 1;
        c.record_timing = false;
        let rows = run_discrepancy_table(&c).unwrap();
        let mut a = Vec::new();
        write_report(&mut a, &c, &rows).unwrap();
        let text = String::from_utf8(a.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# config: {"));
        assert!(lines[1].starts_with("# seeds:"));
        assert_eq!(lines[2], "d,n,algorithm,disc_mean,disc_std,time_mean,time_std");
        let mut b = Vec::new();
        write_report(&mut b, &c, &run_discrepancy_table(&c).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn convergence_linear_game_is_exact() {
        let mut c = ExperimentConfig::new(
            vec![
                Method::MonteCarlo,
                Method::Antithetic,
                Method::Orthogonal,
                Method::Sobol,
                Method::Owen,
                Method::Stratified,
            ],
            vec![],
            vec![2, 8],
        );
        c.trials = 3;
        c.game = Some(GameSpec::Linear {
            coeffs: vec![1.0, -2.0, 0.5, 3.0],
            baseline: 0.0,
        });
        let (rows, reference) = run_convergence(&c).unwrap();
        assert!(matches!(reference, Reference::Exact(_)));
        for r in &rows {
            assert!(r.mse_mean < 1e-20, "{r:?}");
        }
    }

    #[test]
    fn convergence_trial_mean_reference() {
        let mut c = ExperimentConfig::new(vec![Method::MonteCarlo], vec![], vec![4, 16]);
        c.trials = 5;
        c.game = Some(GameSpec::RandomInteraction {
            d: 22,
            counts: vec![5, 5],
            seed: 1,
        });
        let (rows, reference) = run_convergence(&c).unwrap();
        assert!(matches!(reference, Reference::TrialMean(_)));
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn sweep_rows() {
        let mut c = small(vec![Method::Herding]);
        c.ns = vec![20];
        c.trials = 2;
        c.sweep = Some(Sweep::Kernel(vec![
            KernelKind::Kendall,
            KernelKind::Mallows,
            KernelKind::Spearman,
        ]));
        let rows = run_sweep(&c).unwrap();
        let values: Vec<_> = rows.iter().map(|r| r.value.as_str()).collect();
        assert_eq!(values, vec!["kendall", "mallows", "spearman"]);
        assert!(rows.iter().all(|r| r.mse_mean.is_none()));

        c.sweep = Some(Sweep::Lambda(vec![0.5, 1.0, 4.0, 10.0]));
        c.game = Some(GameSpec::Glove);
        let rows = run_sweep(&c).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.d == 3 && r.mse_mean.is_some()));
        c.sweep = None;
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn sample_csv_round_trip() {
        let set = sample(&SamplerConfig::new(Algorithm::Sbq, 5, Dimension::new(4).unwrap())).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &set).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("r1,r2,r3,r4,weight\n"));
        let back = read_samples_csv(buf.as_slice()).unwrap();
        assert_eq!(back.samples(), set.samples());
        assert_eq!(back.weights(), set.weights());
        let err = read_samples_csv("r1,r2,weight\n1,2,0.5\n1,1,0.5\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn game_arguments() {
        assert_eq!(parse_game("glove").unwrap(), GameSpec::Glove);
        assert_eq!(
            parse_game("linear:1,2.5").unwrap(),
            GameSpec::Linear {
                coeffs: vec![1.0, 2.5],
                baseline: 0.0
            }
        );
        assert_eq!(
            parse_game("interaction:12:7").unwrap(),
            GameSpec::RandomInteraction {
                d: 12,
                counts: vec![12, 12, 12, 6],
                seed: 7
            }
        );
        assert_eq!(default_interaction_counts(3), vec![3, 3, 3]);
        assert!(parse_game("interaction:x").is_err());
        assert!(parse_game("/no/such/game.json").is_err());
    }
}
