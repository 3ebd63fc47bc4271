//! Samplers that draw points on `S^{d-2}` and map them to permutations.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Recorder, SamplerConfig};
use crate::discrepancy::WeightedSampleSet;
use crate::error::Result;
use crate::perm::Permutation;
use crate::sphere::{
    polar_to_cartesian, sphere_to_permutation, uniform_sphere_point, ProjectionMatrix, SobolState, SphericalInverseCdf,
};

/// Uniform sphere points mapped to permutations. Same law as Monte Carlo.
pub fn sphere_mc(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    cfg.validate()?;
    let rec = Recorder::start();
    let mut rng = cfg.rng();
    let u = ProjectionMatrix::new(cfg.d.get())?;
    let samples = (0..cfg.n)
        .map(|_| sphere_to_permutation(&uniform_sphere_point(cfg.d, &mut rng)?, &u))
        .collect::<Result<Vec<_>>>()?;
    WeightedSampleSet::uniform(samples, rec.finish(cfg))
}

/// Haar-random orthonormal basis of `R^m`, as rows.
///
/// Classical Gram–Schmidt run twice per vector on a Gaussian matrix.
pub(crate) fn random_orthonormal_basis<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    while basis.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            let coeffs: Vec<f64> = basis
                .iter()
                .map(|b| b.iter().zip(&v).map(|(x, y)| x * y).sum())
                .collect();
            for (b, c) in basis.iter().zip(coeffs) {
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // A draw (numerically) inside the current span is redrawn.
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

/// Blocks of `2(d-1)` permutations from a random orthonormal basis of the
/// sphere's ambient space and the antipode of each basis vector.
///
/// Each permutation is immediately followed by its antipodal partner. The last
/// block is truncated when `n` is not a multiple of the block size.
pub fn orthogonal_codes(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    cfg.validate()?;
    let rec = Recorder::start();
    let mut rng = cfg.rng();
    let d = cfg.d.get();
    let u = ProjectionMatrix::new(d)?;
    let mut samples = Vec::with_capacity(cfg.n);
    'blocks: while samples.len() < cfg.n {
        for v in random_orthonormal_basis(d - 1, &mut rng) {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            for x in [v, neg] {
                if samples.len() == cfg.n {
                    break 'blocks;
                }
                samples.push(sphere_to_permutation(&x, &u)?);
            }
        }
    }
    WeightedSampleSet::uniform(samples, rec.finish(cfg))
}

/// Permutations from Sobol points pushed through the sphere's polar inverse CDFs.
///
/// With `sobol_shift` each run applies an independent random digital shift, so
/// every point is marginally uniform and repeated runs give independent
/// estimates.
pub fn sobol_permutations(cfg: &SamplerConfig) -> Result<WeightedSampleSet> {
    cfg.validate()?;
    let rec = Recorder::start();
    let d = cfg.d.get();
    let mut rng = cfg.rng();
    let mut sobol = if cfg.sobol_shift {
        SobolState::random_shift(d - 2, &mut rng)?
    } else {
        SobolState::new(d - 2)?
    };
    let inv = SphericalInverseCdf::new(d)?;
    let u = ProjectionMatrix::new(d)?;
    let samples = (0..cfg.n)
        .map(|_| -> Result<Permutation> {
            let point = sobol.next_point()?;
            let x = polar_to_cartesian(&inv.angles(&point)?);
            sphere_to_permutation(&x, &u)
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedSampleSet::uniform(samples, rec.finish(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::kendall;
    use crate::perm::{all_permutations, Dimension};
    use crate::samplers::Algorithm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn cfg(alg: Algorithm, n: usize, d: usize, seed: u64) -> SamplerConfig {
        SamplerConfig::new(alg, n, Dimension::new(d).unwrap()).with_seed(seed)
    }

    fn frequencies(set: &WeightedSampleSet) -> HashMap<Permutation, usize> {
        let mut h = HashMap::new();
        for p in set.samples() {
            *h.entry(p.clone()).or_insert(0) += 1;
        }
        h
    }

    #[test]
    fn basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for m in [2, 5, 49] {
            let b = random_orthonormal_basis(m, &mut rng);
            for i in 0..m {
                for j in 0..m {
                    let dot: f64 = b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
                    assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn orthogonal_blocks_pair_reverses() {
        let set = orthogonal_codes(&cfg(Algorithm::Orthogonal, 6, 4, 3)).unwrap();
        for pair in set.samples().chunks(2) {
            assert_eq!(pair[1], pair[0].reverse());
        }
        // 2(d-1) = 6 per block, truncation keeps pairs together for even n
        let set = orthogonal_codes(&cfg(Algorithm::Orthogonal, 11, 5, 3)).unwrap();
        assert_eq!(set.len(), 11);
        assert_eq!(set.samples()[9], set.samples()[8].reverse());
    }

    #[test]
    fn orthogonal_codes_are_spread_out() {
        let d = 50;
        let set = orthogonal_codes(&cfg(Algorithm::Orthogonal, 2 * (d - 1), d, 11)).unwrap();
        let s = set.samples();
        let mut worst: f64 = 0.0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if j == i + 1 && i % 2 == 0 {
                    continue;
                }
                worst = worst.max(kendall(&s[i], &s[j]).unwrap().abs());
            }
        }
        assert!(worst <= 0.6, "{worst}");
    }

    #[test]
    fn sphere_mc_d3_frequencies() {
        let set = sphere_mc(&cfg(Algorithm::SphereMc, 6000, 3, 21)).unwrap();
        let f = frequencies(&set);
        assert_eq!(f.len(), 6);
        for c in f.values() {
            assert!((*c as f64 / 6000.0 - 1.0 / 6.0).abs() < 0.02);
        }
    }

    #[test]
    fn sobol_d4_covers_all() {
        let set = sobol_permutations(&cfg(Algorithm::Sobol, 1000, 4, 5)).unwrap();
        let f = frequencies(&set);
        let all: Vec<_> = all_permutations(Dimension::new(4).unwrap()).collect();
        for p in &all {
            let share = *f.get(p).unwrap_or(&0) as f64 / 1000.0;
            assert!((share - 1.0 / 24.0).abs() < 0.025, "{p}: {share}");
        }
    }

    #[test]
    fn unshifted_sobol_is_fixed() {
        let mut c = cfg(Algorithm::Sobol, 50, 7, 1);
        c.sobol_shift = false;
        let a = sobol_permutations(&c).unwrap();
        c.seed = 2;
        let b = sobol_permutations(&c).unwrap();
        assert_eq!(a.samples(), b.samples());
    }
}
