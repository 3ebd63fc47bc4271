//! Kernel discrepancy of weighted permutation sets.
//!
//! For a set `Π` with weights `w`,
//!
//! ```text
//! D(Π, w)² = E_{σ,σ'~U}[K] - 2 Σ_τ w_τ E_{σ~U}[K(τ, σ)] + Σ_{τ,τ'} w_τ w_τ' K(τ, τ')
//! ```
//!
//! Both expectations reduce to [`expected_kernel_uniform`] because every kernel
//! here is right-invariant, so nothing is ever summed over `S_d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{expected_kernel_uniform, KernelSpec};
use crate::perm::{Dimension, Permutation};

/// Radicands above this negative value are rounding noise and clamp to zero.
pub const NEGATIVE_RADICAND_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub algorithm: String,
    pub seed: Option<u64>,
    /// Generation time only; evaluation of the samples is not included.
    pub wall_time_secs: f64,
    pub kernel_evals: u64,
    pub candidates_drawn: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSampleSet {
    samples: Vec<Permutation>,
    weights: Vec<f64>,
    pub meta: SampleMeta,
}

impl WeightedSampleSet {
    pub fn new(samples: Vec<Permutation>, weights: Vec<f64>, meta: SampleMeta) -> Result<Self> {
        let first = samples.first().ok_or_else(|| Error::invalid("sample set is empty"))?;
        if weights.len() != samples.len() {
            return Err(Error::invalid(format!(
                "{} samples but {} weights",
                samples.len(),
                weights.len()
            )));
        }
        if samples.iter().any(|p| p.dim() != first.dim()) {
            return Err(Error::invalid("samples have differing dimensions"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("non-finite sample weight"));
        }
        Ok(WeightedSampleSet { samples, weights, meta })
    }

    /// Every weight equal to `1/n`.
    pub fn uniform(samples: Vec<Permutation>, meta: SampleMeta) -> Result<Self> {
        let w = 1.0 / samples.len().max(1) as f64;
        let n = samples.len();
        WeightedSampleSet::new(samples, vec![w; n], meta)
    }

    pub fn samples(&self) -> &[Permutation] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dimension(&self) -> Dimension {
        self.samples[0].dimension()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn into_parts(self) -> (Vec<Permutation>, Vec<f64>, SampleMeta) {
        (self.samples, self.weights, self.meta)
    }
}

/// Squared discrepancy without the clamp or square root.
pub fn discrepancy_squared(set: &WeightedSampleSet, spec: &KernelSpec) -> Result<f64> {
    let d = set.dimension();
    let expected = expected_kernel_uniform(spec, d)?;
    let eval = spec.evaluator(d)?;
    let (ps, w) = (set.samples(), set.weights());
    let mut pair_sum = 0.0;
    for i in 0..ps.len() {
        let mut row = 0.0;
        for j in i + 1..ps.len() {
            row += w[j] * eval.eval(&ps[i], &ps[j]);
        }
        pair_sum += w[i] * (2.0 * row + w[i] * spec.diagonal(d));
    }
    Ok(expected - 2.0 * set.weight_sum() * expected + pair_sum)
}

pub fn discrepancy(set: &WeightedSampleSet, spec: &KernelSpec) -> Result<f64> {
    let sq = discrepancy_squared(set, spec)?;
    clamped_sqrt(sq, spec.diagonal(set.dimension()))
}

/// Square root of a radicand that may carry rounding noise of order `scale`.
fn clamped_sqrt(sq: f64, scale: f64) -> Result<f64> {
    if sq.is_nan() || sq < -NEGATIVE_RADICAND_TOLERANCE * scale.max(1.0) {
        return Err(Error::numerical(format!("negative squared discrepancy {sq:e}")));
    }
    Ok(sq.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::kernel_matrix;
    use crate::perm::{all_permutations, random_permutation};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn random_set(d: usize, n: usize, seed: u64) -> Vec<Permutation> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| random_permutation(dim(d), &mut rng)).collect()
    }

    #[test]
    fn full_group_has_zero_discrepancy() {
        for d in 2..=5 {
            let all: Vec<_> = all_permutations(dim(d)).collect();
            let set = WeightedSampleSet::uniform(all, SampleMeta::default()).unwrap();
            for spec in [KernelSpec::mallows(4.0), KernelSpec::kendall(), KernelSpec::spearman()] {
                let sq = discrepancy_squared(&set, &spec).unwrap();
                assert!(sq.abs() < 1e-10 * spec.diagonal(dim(d)), "{spec} d={d}: {sq}");
                assert!(discrepancy(&set, &spec).unwrap() < 1e-4);
            }
        }
    }

    #[test]
    fn single_permutation_kendall_is_one() {
        for d in [2, 5, 30] {
            let set = WeightedSampleSet::uniform(random_set(d, 1, 0), SampleMeta::default()).unwrap();
            assert_relative_eq!(discrepancy(&set, &KernelSpec::kendall()).unwrap(), 1.0);
        }
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(WeightedSampleSet::uniform(vec![], SampleMeta::default()).is_err());
        let ps = random_set(4, 2, 1);
        assert!(WeightedSampleSet::new(ps.clone(), vec![0.5], SampleMeta::default()).is_err());
        assert!(WeightedSampleSet::new(ps, vec![0.5, f64::NAN], SampleMeta::default()).is_err());
    }

    #[test]
    fn radicand_clamp() {
        assert_eq!(clamped_sqrt(-1e-12, 1.0).unwrap(), 0.0);
        assert_eq!(clamped_sqrt(0.25, 1.0).unwrap(), 0.5);
        assert!(matches!(clamped_sqrt(-1e-6, 1.0), Err(Error::NumericalFailure(_))));
        assert!(clamped_sqrt(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn bq_weights_never_worse_than_uniform() {
        let spec = KernelSpec::mallows(4.0);
        for seed in 0..10 {
            let d = 6;
            let ps = random_set(d, 15, seed);
            let mut distinct = ps.clone();
            distinct.sort();
            distinct.dedup();
            let k = kernel_matrix(&distinct, &spec).unwrap();
            let n = distinct.len();
            let km = nalgebra::DMatrix::from_row_slice(n, n, k.entries());
            let z = nalgebra::DVector::from_element(n, expected_kernel_uniform(&spec, dim(d)).unwrap());
            let w = km.cholesky().unwrap().solve(&z);
            let opt =
                WeightedSampleSet::new(distinct.clone(), w.iter().copied().collect(), SampleMeta::default()).unwrap();
            let uni = WeightedSampleSet::uniform(distinct, SampleMeta::default()).unwrap();
            let (a, b) = (discrepancy(&opt, &spec).unwrap(), discrepancy(&uni, &spec).unwrap());
            assert!(a <= b + 1e-9, "seed {seed}: {a} > {b}");
        }
    }

    #[test]
    fn herding_increment_identity() {
        let spec = KernelSpec::mallows(4.0);
        for d in [3, 6, 10] {
            let ev = spec.evaluator(dim(d)).unwrap();
            for seed in 0..5 {
                let mut ps = random_set(d, 8, seed);
                let pi = ps.pop().unwrap();
                let n = ps.len() as f64;
                let before = discrepancy_squared(
                    &WeightedSampleSet::uniform(ps.clone(), SampleMeta::default()).unwrap(),
                    &spec,
                )
                .unwrap();
                let mut with = ps.clone();
                with.push(pi.clone());
                let after =
                    discrepancy_squared(&WeightedSampleSet::uniform(with, SampleMeta::default()).unwrap(), &spec)
                        .unwrap();
                let double: f64 = ps.iter().flat_map(|a| ps.iter().map(|b| ev.eval(a, b))).sum();
                let single: f64 = ps.iter().map(|t| ev.eval(t, &pi)).sum();
                let predicted = -1.0 / (n + 1.0).powi(2) + (2.0 * n + 1.0) / (n * n * (n + 1.0).powi(2)) * double
                    - 2.0 / (n + 1.0).powi(2) * single;
                assert_relative_eq!(before - after, predicted, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn more_random_samples_lower_discrepancy() {
        let spec = KernelSpec::mallows(4.0);
        let mean = |n: usize| -> f64 {
            (0..25)
                .map(|t| {
                    let set = WeightedSampleSet::uniform(random_set(10, n, 100 + t), SampleMeta::default()).unwrap();
                    discrepancy(&set, &spec).unwrap()
                })
                .sum::<f64>()
                / 25.0
        };
        assert!(mean(100) < mean(10));
    }
}
