//! Permutation samplers. Each returns a [`WeightedSampleSet`].

mod greedy;
mod spherical;

pub use greedy::{kernel_herding, sbq};
pub use spherical::{orthogonal_codes, sobol_permutations, sphere_mc};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{SampleMeta, WeightedSampleSet};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::perm::{random_permutation, Dimension};

pub const DEFAULT_POOL_SIZE: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[serde(alias = "mc")]
    MonteCarlo,
    Antithetic,
    #[serde(alias = "kernel-herding")]
    Herding,
    Sbq,
    #[serde(alias = "orthogonal-codes")]
    Orthogonal,
    Sobol,
    SphereMc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::MonteCarlo,
        Algorithm::Antithetic,
        Algorithm::Herding,
        Algorithm::Sbq,
        Algorithm::Orthogonal,
        Algorithm::Sobol,
        Algorithm::SphereMc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MonteCarlo => "monte-carlo",
            Algorithm::Antithetic => "antithetic",
            Algorithm::Herding => "herding",
            Algorithm::Sbq => "sbq",
            Algorithm::Orthogonal => "orthogonal",
            Algorithm::Sobol => "sobol",
            Algorithm::SphereMc => "sphere-mc",
        }
    }

    /// Whether every sample gets weight `1/n`.
    pub fn uniform_weights(self) -> bool {
        self != Algorithm::Sbq
    }

    /// Smallest dimension the sampler supports.
    pub fn min_dimension(self) -> usize {
        match self {
            Algorithm::Orthogonal | Algorithm::SphereMc => 3,
            Algorithm::Sobol => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        Ok(match s.as_str() {
            "mc" | "monte-carlo" => Algorithm::MonteCarlo,
            "antithetic" | "mc-antithetic" => Algorithm::Antithetic,
            "herding" | "kernel-herding" => Algorithm::Herding,
            "sbq" => Algorithm::Sbq,
            "orthogonal" | "orthogonal-codes" => Algorithm::Orthogonal,
            "sobol" => Algorithm::Sobol,
            "sphere-mc" | "sphere" => Algorithm::SphereMc,
            other => return Err(Error::invalid(format!("unknown algorithm {other:?}"))),
        })
    }
}

fn default_pool() -> usize {
    DEFAULT_POOL_SIZE
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub algorithm: Algorithm,
    pub n: usize,
    pub d: Dimension,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default = "default_pool")]
    pub pool_size: usize,
    #[serde(default)]
    pub seed: u64,
    /// Random digital shift for Sobol points. Off gives the raw sequence.
    #[serde(default = "default_true")]
    pub sobol_shift: bool,
}

impl SamplerConfig {
    pub fn new(algorithm: Algorithm, n: usize, d: Dimension) -> Self {
        SamplerConfig {
            algorithm,
            n,
            d,
            kernel: KernelSpec::default(),
            pool_size: DEFAULT_POOL_SIZE,
            seed: 0,
            sobol_shift: true,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_kernel(mut self, kernel: KernelSpec) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_pool_size(mut self, pool_size: usize) -> Self {
        self.pool_size = pool_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("sample count n must be at least 1"));
        }
        if self.pool_size == 0 {
            return Err(Error::invalid("pool size must be at least 1"));
        }
        let min = self.algorithm.min_dimension();
        if self.d.get() < min {
            return Err(Error::InvalidDimension { got: self.d.get(), min });
        }
        if self.algorithm == Algorithm::Antithetic && self.n % 2 == 1 {
            return Err(Error::invalid(format!(
                "antithetic sampling needs an even n, got {}",
                self.n
            )));
        }
        self.kernel.validate()
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Runs the sampler named in `cfg.algorithm`.
pub fn sample(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    match cfg.algorithm {
        Algorithm::MonteCarlo => monte_carlo(cfg),
        Algorithm::Antithetic => antithetic(cfg),
        Algorithm::Herding => kernel_herding(cfg),
        Algorithm::Sbq => sbq(cfg),
        Algorithm::Orthogonal => orthogonal_codes(cfg),
        Algorithm::Sobol => sobol_permutations(cfg),
        Algorithm::SphereMc => sphere_mc(cfg),
    }
}

/// Bookkeeping shared by all samplers.
pub(crate) struct Recorder {
    start: Instant,
    pub kernel_evals: u64,
    pub candidates_drawn: u64,
}

impl Recorder {
    pub fn start() -> Self {
        Recorder {
            start: Instant::now(),
            kernel_evals: 0,
            candidates_drawn: 0,
        }
    }

    pub fn finish(self, cfg: &SamplerConfig) -> SampleMeta {
        SampleMeta {
            algorithm: cfg.algorithm.name().to_string(),
            seed: Some(cfg.seed),
            wall_time_secs: self.start.elapsed().as_secs_f64(),
            kernel_evals: self.kernel_evals,
            candidates_drawn: self.candidates_drawn,
        }
    }
}

/// `n` i.i.d. uniform permutations.
pub fn monte_carlo(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    cfg.validate()?;
    let rec = Recorder::start();
    let mut rng = cfg.rng();
    let samples = (0..cfg.n).map(|_| random_permutation(cfg.d, &mut rng)).collect();
    WeightedSampleSet::uniform(samples, rec.finish(cfg))
}

/// `n/2` uniform permutations, each followed by its reverse.
pub fn antithetic(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    cfg.validate()?;
    let rec = Recorder::start();
    let mut rng = cfg.rng();
    let mut samples = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n / 2 {
        let p = random_permutation(cfg.d, &mut rng);
        let r = p.reverse();
        samples.extend([p, r]);
    }
    WeightedSampleSet::uniform(samples, rec.finish(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::kendall;
    use crate::perm::Permutation;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            let json = serde_json::to_string(&a).unwrap();
            assert_eq!(json, format!("\"{}\"", a.name()));
            assert_eq!(serde_json::from_str::<Algorithm>(&json).unwrap(), a);
        }
        assert_eq!("MC".parse::<Algorithm>().unwrap(), Algorithm::MonteCarlo);
        assert!("qmc".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_defaults_from_json() {
        let cfg: SamplerConfig = serde_json::from_str(r#"{"algorithm":"herding","n":10,"d":5}"#).unwrap();
        assert_eq!(cfg.pool_size, 25);
        assert_eq!(cfg.kernel, KernelSpec::mallows(4.0));
        assert!(cfg.sobol_shift);
        assert!(serde_json::from_str::<SamplerConfig>(r#"{"algorithm":"mc","n":10,"d":1}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = SamplerConfig::new(Algorithm::MonteCarlo, 0, dim(4));
        assert!(sample(&cfg).is_err());
        cfg.n = 5;
        assert!(sample(&cfg).is_ok());
        cfg.algorithm = Algorithm::Antithetic;
        assert!(matches!(sample(&cfg), Err(Error::InvalidArguments(_))));
        cfg.n = 6;
        cfg.pool_size = 0;
        assert!(sample(&cfg).is_err());
        let sobol = SamplerConfig::new(Algorithm::Sobol, 4, dim(3));
        assert!(matches!(sample(&sobol), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn mc_two_players_balanced() {
        let set = monte_carlo(&SamplerConfig::new(Algorithm::MonteCarlo, 10_000, dim(2)).with_seed(9)).unwrap();
        let id = Permutation::identity(2).unwrap();
        let freq = set.samples().iter().filter(|p| **p == id).count() as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.02);
        assert!(set.weights().iter().all(|&w| w == 1e-4));
    }

    #[test]
    fn seeded_determinism() {
        for a in Algorithm::ALL {
            let cfg = SamplerConfig::new(a, 12, dim(6)).with_seed(77);
            let (x, y) = (sample(&cfg).unwrap(), sample(&cfg).unwrap());
            assert_eq!(x.samples(), y.samples(), "{a}");
            assert_eq!(x.weights(), y.weights(), "{a}");
            let other = sample(&cfg.clone().with_seed(78)).unwrap();
            assert_ne!(x.samples(), other.samples(), "{a}");
        }
    }

    #[test]
    fn antithetic_pairs() {
        let set = antithetic(&SamplerConfig::new(Algorithm::Antithetic, 6, dim(3)).with_seed(1)).unwrap();
        for pair in set.samples().chunks(2) {
            assert_eq!(pair[1], pair[0].reverse());
            assert_eq!(kendall(&pair[0], &pair[1]).unwrap(), -1.0);
        }
        assert!((set.weight_sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_samplers_shape() {
        for a in Algorithm::ALL {
            for (d, n) in [(4, 2), (7, 30), (12, 10)] {
                let set = sample(&SamplerConfig::new(a, n, dim(d)).with_seed(3)).unwrap();
                assert_eq!(set.len(), n);
                assert!(set.samples().iter().all(|p| p.dim() == d));
                assert!(set.weights().iter().all(|w| w.is_finite()));
                if a.uniform_weights() {
                    assert!((set.weight_sum() - 1.0).abs() < 1e-12);
                }
                assert_eq!(set.meta.algorithm, a.name());
            }
        }
    }
}
