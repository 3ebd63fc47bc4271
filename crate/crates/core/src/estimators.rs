//! Shapley value estimators and exact oracles.
//!
//! Cost is reported in marginal contributions (`marginal_evals`): a permutation
//! walk yields `d` of them from `d + 1` calls of `v`. Owen and stratified
//! estimators pay one marginal per subset draw.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::discrepancy::{SampleMeta, WeightedSampleSet};
use crate::error::{Error, Result};
use crate::games::{Coalition, Game};
use crate::kernels::KernelSpec;
use crate::perm::all_permutations;
use crate::samplers::{sample, Algorithm, SamplerConfig, DEFAULT_POOL_SIZE};

pub const EXACT_SUBSETS_MAX_D: usize = 20;
const EXACT_SUBSETS_WARN_D: usize = 15;
pub const EXACT_PERMUTATIONS_MAX_D: usize = 8;
pub const DEFAULT_OWEN_NODES: usize = 10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub method: String,
    pub seed: Option<u64>,
    pub sample: Option<SampleMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapleyEstimate {
    pub values: Vec<f64>,
    pub marginal_evals: u64,
    pub v_evals: u64,
    pub meta: EstimateMeta,
}

/// Weighted average of marginal contributions along each permutation.
///
/// Each permutation is walked in rank order; the `d + 1` prefix values are
/// computed once and shared by all `d` marginals.
pub fn shapley_from_permutations(game: &mut Game, set: &WeightedSampleSet) -> Result<ShapleyEstimate> {
    let d = game.dim();
    if set.dimension().get() != d {
        return Err(Error::invalid(format!(
            "sample dimension {} does not match {d}-player game",
            set.dimension()
        )));
    }
    game.reset();
    let calls = game.v_evals();
    let mut values = vec![0.0; d];
    for (p, &w) in set.samples().iter().zip(set.weights()) {
        let mut s = Coalition::empty(d);
        let mut prev = game.value(&s)?;
        for i in p.order() {
            s.insert(i);
            let cur = game.value(&s)?;
            values[i] += w * (cur - prev);
            prev = cur;
        }
    }
    Ok(ShapleyEstimate {
        values,
        marginal_evals: (set.len() * d) as u64,
        v_evals: game.v_evals() - calls,
        meta: EstimateMeta {
            method: set.meta.algorithm.clone(),
            seed: set.meta.seed,
            sample: Some(set.meta.clone()),
        },
    })
}

/// Exact values from the subset formula, `2^d` calls of `v`.
pub fn exact_shapley_subsets(game: &mut Game) -> Result<ShapleyEstimate> {
    let d = game.dim();
    if d > EXACT_SUBSETS_MAX_D {
        return Err(Error::invalid(format!(
            "exact subset enumeration is capped at d={EXACT_SUBSETS_MAX_D}, got {d}"
        )));
    }
    if d > EXACT_SUBSETS_WARN_D {
        log::warn!("exact Shapley over 2^{d} subsets; this may be slow");
    }
    game.reset();
    let calls = game.v_evals();
    let v: Vec<f64> = (0..1u64 << d)
        .map(|mask| game.value(&Coalition::from_mask(d, mask)))
        .collect::<Result<_>>()?;
    // weight(s) = s! (d - s - 1)! / d!
    let ln_d_fact = ln_gamma(d as f64 + 1.0);
    let weight: Vec<f64> = (0..d)
        .map(|s| (ln_gamma(s as f64 + 1.0) + ln_gamma((d - s) as f64) - ln_d_fact).exp())
        .collect();
    let mut values = vec![0.0; d];
    for mask in 0..1u64 << d {
        let size = mask.count_ones() as usize;
        for (i, val) in values.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                *val += weight[size] * (v[(mask | 1 << i) as usize] - v[mask as usize]);
            }
        }
    }
    Ok(ShapleyEstimate {
        values,
        marginal_evals: (d as u64) << (d - 1),
        v_evals: game.v_evals() - calls,
        meta: EstimateMeta {
            method: "exact-subsets".into(),
            ..Default::default()
        },
    })
}

/// Exact values as the average over all `d!` orderings.
pub fn exact_shapley_permutations(game: &mut Game) -> Result<ShapleyEstimate> {
    let d = game.dimension();
    if d.get() > EXACT_PERMUTATIONS_MAX_D {
        return Err(Error::invalid(format!(
            "exact permutation enumeration is capped at d={EXACT_PERMUTATIONS_MAX_D}, got {d}"
        )));
    }
    let meta = SampleMeta {
        algorithm: "exact-permutations".into(),
        ..Default::default()
    };
    let set = WeightedSampleSet::uniform(all_permutations(d).collect(), meta)?;
    let mut est = shapley_from_permutations(game, &set)?;
    est.meta = EstimateMeta {
        method: "exact-permutations".into(),
        ..Default::default()
    };
    Ok(est)
}

/// Owen's multilinear-extension estimator with trapezoid quadrature.
///
/// `nodes` intervals on `q ∈ [0, 1]` (or `[0, 1/2]` when `antithetic`), each
/// node estimated from `draws` random subsets per player. The antithetic
/// variant also evaluates the complement of every draw, which stands in for
/// node `1 - q`.
pub fn owen_multilinear<R: Rng + ?Sized>(
    game: &mut Game,
    nodes: usize,
    draws: usize,
    antithetic: bool,
    rng: &mut R,
) -> Result<ShapleyEstimate> {
    if nodes < 2 || draws < 1 {
        return Err(Error::invalid(format!(
            "Owen sampling needs nodes >= 2 and draws >= 1, got {nodes} and {draws}"
        )));
    }
    let d = game.dim();
    game.reset();
    let calls = game.v_evals();
    let upper = if antithetic { 0.5 } else { 1.0 };
    let h = upper / nodes as f64;
    let mut values = vec![0.0; d];
    let mut marginals = 0u64;
    for (i, val) in values.iter_mut().enumerate() {
        for k in 0..=nodes {
            let q = k as f64 * h;
            let mut acc = 0.0;
            for _ in 0..draws {
                let mut e = Coalition::empty(d);
                for j in (0..d).filter(|&j| j != i) {
                    if rng.random::<f64>() < q {
                        e.insert(j);
                    }
                }
                acc += marginal(game, &e, i)?;
                marginals += 1;
                if antithetic {
                    acc += marginal(game, &e.complement_without(i), i)?;
                    marginals += 1;
                }
            }
            let end = if k == 0 || k == nodes { 0.5 } else { 1.0 };
            *val += end * h * acc / draws as f64;
        }
    }
    Ok(ShapleyEstimate {
        values,
        marginal_evals: marginals,
        v_evals: game.v_evals() - calls,
        meta: EstimateMeta {
            method: if antithetic { "owen-antithetic" } else { "owen" }.into(),
            ..Default::default()
        },
    })
}

fn marginal(game: &mut Game, s: &Coalition, i: usize) -> Result<f64> {
    let without = game.value(s)?;
    let mut with = s.clone();
    with.insert(i);
    Ok(game.value(&with)? - without)
}

/// Stratified sampling over (player, position) with equal allocation:
/// `floor(budget / d²)` draws per stratum.
pub fn stratified_castro<R: Rng + ?Sized>(game: &mut Game, budget: u64, rng: &mut R) -> Result<ShapleyEstimate> {
    let d = game.dim();
    let min = 2 * (d * d) as u64;
    if budget < min {
        return Err(Error::invalid(format!(
            "stratified sampling needs a budget of at least 2d² = {min}, got {budget}"
        )));
    }
    let m = (budget / (d * d) as u64) as usize;
    game.reset();
    let calls = game.v_evals();
    let mut values = vec![0.0; d];
    let others: Vec<Vec<usize>> = (0..d).map(|i| (0..d).filter(|&j| j != i).collect()).collect();
    for i in 0..d {
        for size in 0..d {
            let mut acc = 0.0;
            for _ in 0..m {
                let picks = sample_indices(rng, d - 1, size);
                let mut s = Coalition::empty(d);
                picks.iter().for_each(|k| s.insert(others[i][k]));
                acc += marginal(game, &s, i)?;
            }
            values[i] += acc / m as f64 / d as f64;
        }
    }
    Ok(ShapleyEstimate {
        values,
        marginal_evals: (d * d * m) as u64,
        v_evals: game.v_evals() - calls,
        meta: EstimateMeta {
            method: "stratified".into(),
            ..Default::default()
        },
    })
}

/// Mean squared error over all entries of two equally shaped matrices.
pub fn mse(reference: &[Vec<f64>], estimate: &[Vec<f64>]) -> Result<f64> {
    if reference.len() != estimate.len() || reference.iter().zip(estimate).any(|(a, b)| a.len() != b.len()) {
        return Err(Error::invalid("mse: shape mismatch"));
    }
    let count: usize = reference.iter().map(Vec::len).sum();
    if count == 0 {
        return Err(Error::invalid("mse of empty matrices"));
    }
    let total: f64 = reference
        .iter()
        .zip(estimate)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)))
        .sum();
    Ok(total / count as f64)
}

/// Every estimation method the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[serde(alias = "mc")]
    MonteCarlo,
    Antithetic,
    Herding,
    Sbq,
    Orthogonal,
    Sobol,
    SphereMc,
    Owen,
    OwenAntithetic,
    Stratified,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::MonteCarlo,
        Method::Antithetic,
        Method::Herding,
        Method::Sbq,
        Method::Orthogonal,
        Method::Sobol,
        Method::SphereMc,
        Method::Owen,
        Method::OwenAntithetic,
        Method::Stratified,
    ];

    pub fn sampler(self) -> Option<Algorithm> {
        Some(match self {
            Method::MonteCarlo => Algorithm::MonteCarlo,
            Method::Antithetic => Algorithm::Antithetic,
            Method::Herding => Algorithm::Herding,
            Method::Sbq => Algorithm::Sbq,
            Method::Orthogonal => Algorithm::Orthogonal,
            Method::Sobol => Algorithm::Sobol,
            Method::SphereMc => Algorithm::SphereMc,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self.sampler() {
            Some(a) => a.name(),
            None => match self {
                Method::Owen => "owen",
                Method::OwenAntithetic => "owen-antithetic",
                _ => "stratified",
            },
        }
    }
}

impl From<Algorithm> for Method {
    fn from(a: Algorithm) -> Self {
        *Method::ALL
            .iter()
            .find(|m| m.sampler() == Some(a))
            .expect("every sampler has a method")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "owen" => Ok(Method::Owen),
            "owen-antithetic" | "owen-halved" => Ok(Method::OwenAntithetic),
            "stratified" | "castro" => Ok(Method::Stratified),
            _ => Ok(key
                .parse::<Algorithm>()
                .map_err(|_| Error::invalid(format!("unknown method {s:?}")))?
                .into()),
        }
    }
}

/// Knobs shared by all methods; only the relevant ones are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default = "default_pool")]
    pub pool_size: usize,
    #[serde(default = "default_owen_nodes")]
    pub owen_nodes: usize,
}

fn default_pool() -> usize {
    DEFAULT_POOL_SIZE
}

fn default_owen_nodes() -> usize {
    DEFAULT_OWEN_NODES
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            kernel: KernelSpec::default(),
            pool_size: DEFAULT_POOL_SIZE,
            owen_nodes: DEFAULT_OWEN_NODES,
        }
    }
}

/// Runs `method` with a budget of `n` permutations, i.e. `n·d` marginals.
///
/// Owen and stratified estimators receive the same marginal budget: Owen uses
/// `max(1, n·d / (d (nodes + 1)))` draws per node (half that when
/// antithetic), stratified uses `floor(n·d / d²)` draws per stratum.
pub fn estimate(
    game: &mut Game,
    method: Method,
    n: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<ShapleyEstimate> {
    let d = game.dimension();
    let budget = (n * d.get()) as u64;
    let mut est = match method.sampler() {
        Some(alg) => {
            let cfg = SamplerConfig {
                algorithm: alg,
                n,
                d,
                kernel: opts.kernel,
                pool_size: opts.pool_size,
                seed,
                sobol_shift: true,
            };
            shapley_from_permutations(game, &sample(&cfg)?)?
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match method {
                Method::Stratified => stratified_castro(game, budget, &mut rng)?,
                _ => {
                    let anti = method == Method::OwenAntithetic;
                    let per_node = d.get() * (opts.owen_nodes + 1) * if anti { 2 } else { 1 };
                    let draws = (budget as usize / per_node).max(1);
                    owen_multilinear(game, opts.owen_nodes, draws, anti, &mut rng)?
                }
            }
        }
    };
    est.meta.method = method.name().into();
    est.meta.seed = Some(seed);
    Ok(est)
}
