//! Greedy kernel-based samplers: kernel herding and sequential Bayesian quadrature.

use std::collections::HashSet;

use rand::Rng;

use super::{Recorder, SamplerConfig};
use crate::discrepancy::WeightedSampleSet;
use crate::error::{Error, Result};
use crate::kernels::{expected_kernel_uniform, KernelEvaluator};
use crate::perm::{random_permutation, Dimension, Permutation};

/// Redraws allowed when a candidate duplicates an already selected sample.
const DUPLICATE_RETRIES: usize = 100;
/// Relative diagonal jitter used once when a Cholesky pivot is not positive.
const NUGGET: f64 = 1e-10;

/// Fresh uniform candidate, redrawn while it repeats a selected permutation.
fn draw_candidate<R: Rng + ?Sized>(
    d: Dimension,
    selected: &HashSet<Permutation>,
    rng: &mut R,
    rec: &mut Recorder,
) -> Permutation {
    let mut p = random_permutation(d, rng);
    rec.candidates_drawn += 1;
    for _ in 0..DUPLICATE_RETRIES {
        if !selected.contains(&p) {
            break;
        }
        p = random_permutation(d, rng);
        rec.candidates_drawn += 1;
    }
    p
}

fn draw_pool<R: Rng + ?Sized>(
    cfg: &SamplerConfig,
    selected: &HashSet<Permutation>,
    rng: &mut R,
    rec: &mut Recorder,
) -> Vec<Permutation> {
    (0..cfg.pool_size)
        .map(|_| draw_candidate(cfg.d, selected, rng, rec))
        .collect()
}

/// Index of the pool member minimising `Σ_i K(σ, σ_i)`; first one on ties.
pub(crate) fn herding_choice(eval: &KernelEvaluator, selected: &[Permutation], pool: &[Permutation]) -> (usize, f64) {
    pool.iter()
        .map(|c| selected.iter().map(|s| eval.eval(c, s)).sum::<f64>())
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, v)| if v < best.1 { (i, v) } else { best },
        )
}

/// Kernel herding with the argmax approximated over `pool_size` random candidates.
///
/// Since `E[K(σ, ·)]` is the same for every `σ`, maximising the herding
/// objective is the same as minimising the summed similarity to the samples
/// chosen so far.
pub fn kernel_herding(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    cfg.validate()?;
    let mut rec = Recorder::start();
    let mut rng = cfg.rng();
    let eval = cfg.kernel.evaluator(cfg.d)?;
    let mut samples = Vec::with_capacity(cfg.n);
    let mut seen = HashSet::with_capacity(cfg.n);
    while samples.len() < cfg.n {
        let mut pool = draw_pool(cfg, &seen, &mut rng, &mut rec);
        let (best, _) = herding_choice(&eval, &samples, &pool);
        rec.kernel_evals += (pool.len() * samples.len()) as u64;
        let chosen = pool.swap_remove(best);
        seen.insert(chosen.clone());
        samples.push(chosen);
    }
    WeightedSampleSet::uniform(samples, rec.finish(cfg))
}

/// Lower-triangular Cholesky factor of the growing sample Gram matrix, plus
/// `β = L⁻¹ z` for the constant kernel-mean vector `z`.
#[derive(Debug, Default)]
struct IncrementalCholesky {
    rows: Vec<Vec<f64>>,
    beta: Vec<f64>,
}

/// What adding one candidate would do to the factor.
struct Extension {
    a: Vec<f64>,
    delta: f64,
    gain: f64,
}

impl IncrementalCholesky {
    fn forward(&self, k: &[f64]) -> Vec<f64> {
        let mut a = Vec::with_capacity(k.len());
        for (i, row) in self.rows.iter().enumerate() {
            let s: f64 = row[..i].iter().zip(&a).map(|(l, x)| l * x).sum();
            a.push((k[i] - s) / row[i]);
        }
        a
    }

    /// `None` if the new pivot is not positive even after the nugget.
    fn extension(&self, k: &[f64], kxx: f64, z: f64) -> Option<Extension> {
        let a = self.forward(k);
        let mut pivot = kxx - a.iter().map(|x| x * x).sum::<f64>();
        if pivot <= NUGGET * kxx.abs() {
            pivot += NUGGET * kxx.abs().max(1.0);
        }
        if pivot.is_nan() || pivot <= 0.0 {
            return None;
        }
        let delta = pivot.sqrt();
        let resid = z - a.iter().zip(&self.beta).map(|(x, b)| x * b).sum::<f64>();
        Some(Extension {
            a,
            delta,
            gain: (resid / delta).powi(2),
        })
    }

    fn push(&mut self, ext: Extension, z: f64) {
        let resid = z - ext.a.iter().zip(&self.beta).map(|(x, b)| x * b).sum::<f64>();
        self.beta.push(resid / ext.delta);
        let mut row = ext.a;
        row.push(ext.delta);
        self.rows.push(row);
    }

    /// `w = L⁻ᵀ β`, the solution of `K w = z`.
    fn weights(&self) -> Vec<f64> {
        let n = self.rows.len();
        let mut w = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.rows[j][i] * w[j]).sum();
            w[i] = (self.beta[i] - s) / self.rows[i][i];
        }
        w
    }
}

/// Sequential Bayesian quadrature: each step adds the candidate that most
/// reduces the posterior variance of the integral estimate, and the returned
/// weights are `K⁻¹ z`.
///
/// With the Kendall kernel the kernel mean is zero, so every weight is zero.
pub fn sbq(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    cfg.validate()?;
    let mut rec = Recorder::start();
    let mut rng = cfg.rng();
    let eval = cfg.kernel.evaluator(cfg.d)?;
    let z = expected_kernel_uniform(&cfg.kernel, cfg.d)?;
    let kxx = cfg.kernel.diagonal(cfg.d);
    let mut chol = IncrementalCholesky::default();
    let mut samples: Vec<Permutation> = Vec::with_capacity(cfg.n);
    let mut seen = HashSet::with_capacity(cfg.n);
    while samples.len() < cfg.n {
        let pool = draw_pool(cfg, &seen, &mut rng, &mut rec);
        let mut best: Option<(usize, Extension)> = None;
        for (i, c) in pool.iter().enumerate() {
            let k: Vec<f64> = samples.iter().map(|s| eval.eval(c, s)).collect();
            rec.kernel_evals += k.len() as u64;
            if let Some(ext) = chol.extension(&k, kxx, z) {
                if best.as_ref().is_none_or(|(_, b)| ext.gain > b.gain) {
                    best = Some((i, ext));
                }
            }
        }
        let (i, ext) = best.ok_or_else(|| {
            Error::numerical(format!(
                "Cholesky update failed for every candidate at sample {}",
                samples.len() + 1
            ))
        })?;
        chol.push(ext, z);
        seen.insert(pool[i].clone());
        samples.push(pool[i].clone());
    }
    let weights = chol.weights();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::numerical("non-finite quadrature weights"));
    }
    WeightedSampleSet::new(samples, weights, rec.finish(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::discrepancy;
    use crate::kernels::{kernel_matrix, KernelSpec};
    use crate::samplers::{monte_carlo, Algorithm};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(alg: Algorithm, n: usize, d: usize, seed: u64) -> SamplerConfig {
        SamplerConfig::new(alg, n, Dimension::new(d).unwrap()).with_seed(seed)
    }

    #[test]
    fn herding_choice_is_pool_minimum() {
        let d = Dimension::new(8).unwrap();
        let eval = KernelSpec::mallows(4.0).evaluator(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let selected: Vec<_> = (0..20).map(|_| random_permutation(d, &mut rng)).collect();
        let pool: Vec<_> = (0..25).map(|_| random_permutation(d, &mut rng)).collect();
        let (i, v) = herding_choice(&eval, &selected, &pool);
        for c in &pool {
            let s: f64 = selected.iter().map(|x| eval.eval(c, x)).sum();
            assert!(v <= s);
        }
        let direct: f64 = selected.iter().map(|x| eval.eval(&pool[i], x)).sum();
        assert_eq!(v, direct);
        // empty selection: every objective is zero, the first candidate wins
        assert_eq!(herding_choice(&eval, &[], &pool).0, 0);
    }

    #[test]
    fn herding_has_no_duplicates_when_room() {
        let set = kernel_herding(&cfg(Algorithm::Herding, 100, 6, 4)).unwrap();
        let mut s = set.samples().to_vec();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 100);
        assert_eq!(set.meta.kernel_evals, 25 * (0..100).sum::<u64>());
        assert!(set.meta.candidates_drawn >= 2500);
    }

    #[test]
    fn herding_beats_mc_paired() {
        let spec = KernelSpec::mallows(4.0);
        let wins = (0..25)
            .filter(|&t| {
                let h = kernel_herding(&cfg(Algorithm::Herding, 100, 10, 500 + t)).unwrap();
                let m = monte_carlo(&cfg(Algorithm::MonteCarlo, 100, 10, 500 + t)).unwrap();
                discrepancy(&h, &spec).unwrap() < discrepancy(&m, &spec).unwrap()
            })
            .count();
        assert!(wins >= 24, "{wins}/25");
    }

    #[test]
    fn sbq_single_sample_weight() {
        for d in [3, 6, 10] {
            let dim = Dimension::new(d).unwrap();
            let set = sbq(&cfg(Algorithm::Sbq, 1, d, 1)).unwrap();
            let c = expected_kernel_uniform(&KernelSpec::mallows(4.0), dim).unwrap();
            assert_relative_eq!(set.weights()[0], c, epsilon = 1e-15);
            let kendall = sbq(&cfg(Algorithm::Sbq, 1, d, 1).with_kernel(KernelSpec::kendall())).unwrap();
            assert_eq!(kendall.weights()[0], 0.0);
        }
    }

    #[test]
    fn sbq_weights_solve_gram_system() {
        for (d, n) in [(5, 30), (10, 60)] {
            let set = sbq(&cfg(Algorithm::Sbq, n, d, 8)).unwrap();
            let spec = KernelSpec::mallows(4.0);
            let z = expected_kernel_uniform(&spec, Dimension::new(d).unwrap()).unwrap();
            let k = kernel_matrix(set.samples(), &spec).unwrap();
            for i in 0..n {
                let kw: f64 = k.row(i).iter().zip(set.weights()).map(|(a, b)| a * b).sum();
                assert!(((kw - z) / z).abs() < 1e-8, "row {i}: {kw} vs {z}");
            }
        }
    }

    #[test]
    fn sbq_not_worse_than_herding_small() {
        let spec = KernelSpec::mallows(4.0);
        let mean = |alg: Algorithm| -> f64 {
            (0..10)
                .map(|t| discrepancy(&super::super::sample(&cfg(alg, 40, 10, t)).unwrap(), &spec).unwrap())
                .sum::<f64>()
                / 10.0
        };
        assert!(mean(Algorithm::Sbq) <= mean(Algorithm::Herding) * 1.05);
    }

    #[test]
    fn sbq_exhausting_small_group() {
        // d=3 has 6 permutations; asking for all of them must still succeed
        // because the Mallows Gram matrix on distinct permutations is PD.
        let set = sbq(&cfg(Algorithm::Sbq, 6, 3, 0).with_pool_size(200)).unwrap();
        let mut s = set.samples().to_vec();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 6);
        assert!(discrepancy(&set, &KernelSpec::mallows(4.0)).unwrap() < 1e-5);
    }
}
