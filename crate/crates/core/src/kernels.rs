//! Kendall, Mallows and Spearman kernels on permutations.
//!
//! Kendall and Mallows depend only on the discordant-pair count, so both are
//! right-invariant and have a closed-form expectation under the uniform
//! distribution that does not depend on the fixed argument.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{n_discordant, Dimension, Permutation};

pub const DEFAULT_MALLOWS_LAMBDA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[serde(alias = "Kendall")]
    Kendall,
    #[serde(alias = "Mallows")]
    Mallows,
    #[serde(alias = "Spearman")]
    Spearman,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Kendall => "kendall",
            KernelKind::Mallows => "mallows",
            KernelKind::Spearman => "spearman",
        })
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kendall" => Ok(KernelKind::Kendall),
            "mallows" => Ok(KernelKind::Mallows),
            "spearman" => Ok(KernelKind::Spearman),
            other => Err(Error::invalid(format!("unknown kernel {other:?}"))),
        }
    }
}

/// Kernel choice. `lambda` is only read for Mallows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
}

fn default_lambda() -> f64 {
    DEFAULT_MALLOWS_LAMBDA
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::mallows(DEFAULT_MALLOWS_LAMBDA)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            KernelKind::Mallows => write!(f, "mallows(lambda={})", self.lambda),
            k => k.fmt(f),
        }
    }
}

impl KernelSpec {
    pub fn kendall() -> Self {
        KernelSpec {
            kind: KernelKind::Kendall,
            lambda: DEFAULT_MALLOWS_LAMBDA,
        }
    }

    pub fn mallows(lambda: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Mallows,
            lambda,
        }
    }

    pub fn spearman() -> Self {
        KernelSpec {
            kind: KernelKind::Spearman,
            lambda: DEFAULT_MALLOWS_LAMBDA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == KernelKind::Mallows && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "Mallows lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn eval(&self, p: &Permutation, q: &Permutation) -> Result<f64> {
        match self.kind {
            KernelKind::Kendall => kendall(p, q),
            KernelKind::Mallows => mallows(p, q, self.lambda),
            KernelKind::Spearman => spearman(p, q),
        }
    }

    /// `K(p, p)`, which is the same for every `p`.
    pub fn diagonal(&self, d: Dimension) -> f64 {
        match self.kind {
            KernelKind::Kendall | KernelKind::Mallows => 1.0,
            KernelKind::Spearman => {
                let d = d.get() as f64;
                d * (d + 1.0) * (2.0 * d + 1.0) / 6.0
            }
        }
    }

    /// `E_{q ~ U}[K(p, q)]` for any fixed `p`.
    pub fn expected_uniform(&self, d: Dimension) -> Result<f64> {
        expected_kernel_uniform(self, d)
    }

    /// Fast evaluator that precomputes what only depends on `d`.
    pub fn evaluator(&self, d: Dimension) -> Result<KernelEvaluator> {
        self.validate()?;
        let table = match self.kind {
            KernelKind::Spearman => Vec::new(),
            KernelKind::Kendall => {
                let c = d.pairs() as f64;
                (0..=d.pairs()).map(|n| 1.0 - 2.0 * n as f64 / c).collect()
            }
            KernelKind::Mallows => {
                let c = d.pairs() as f64;
                (0..=d.pairs()).map(|n| (-self.lambda * n as f64 / c).exp()).collect()
            }
        };
        Ok(KernelEvaluator {
            spec: *self,
            d,
            by_discordant: table,
        })
    }
}

/// Kernel bound to a dimension. Kendall and Mallows values are looked up by
/// discordant-pair count.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    spec: KernelSpec,
    d: Dimension,
    by_discordant: Vec<f64>,
}

impl KernelEvaluator {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    /// Panics if `p` and `q` do not both have this evaluator's dimension.
    pub fn eval(&self, p: &Permutation, q: &Permutation) -> f64 {
        assert!(p.dim() == self.d.get() && q.dim() == self.d.get());
        match self.spec.kind {
            KernelKind::Spearman => spearman_dot(p, q),
            _ => self.by_discordant[n_discordant(p, q).unwrap() as usize],
        }
    }
}

fn check_dims(p: &Permutation, q: &Permutation) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            p.dim(),
            q.dim()
        )));
    }
    Ok(())
}

/// Kendall tau: `1 - 2 n_dis / binom(d, 2)`.
pub fn kendall(p: &Permutation, q: &Permutation) -> Result<f64> {
    let n = n_discordant(p, q)? as f64;
    Ok(1.0 - 2.0 * n / p.dimension().pairs() as f64)
}

/// Mallows kernel with the discordant count normalised by `binom(d, 2)`.
pub fn mallows(p: &Permutation, q: &Permutation, lambda: f64) -> Result<f64> {
    KernelSpec::mallows(lambda).validate()?;
    let n = n_discordant(p, q)? as f64;
    Ok((-lambda * n / p.dimension().pairs() as f64).exp())
}

/// Rank dot product `sum_i p(i) q(i)`.
pub fn spearman(p: &Permutation, q: &Permutation) -> Result<f64> {
    check_dims(p, q)?;
    Ok(spearman_dot(p, q))
}

fn spearman_dot(p: &Permutation, q: &Permutation) -> f64 {
    p.ranks()
        .iter()
        .zip(q.ranks())
        .map(|(&a, &b)| a as u64 * b as u64)
        .sum::<u64>() as f64
}

/// Closed-form `E_{q ~ U}[K(p, q)]`.
///
/// Mallows uses the inversion-count generating function
/// `prod_{j=1..d} (1 - x^j) / (j (1 - x))` at `x = exp(-lambda / binom(d,2))`,
/// accumulated in log space.
pub fn expected_kernel_uniform(spec: &KernelSpec, d: Dimension) -> Result<f64> {
    spec.validate()?;
    let df = d.get() as f64;
    Ok(match spec.kind {
        KernelKind::Kendall => 0.0,
        KernelKind::Spearman => df * (df + 1.0) * (df + 1.0) / 4.0,
        KernelKind::Mallows => {
            let t = spec.lambda / d.pairs() as f64;
            // ln(1 - e^{-a}) computed stably for small a.
            let ln_one_minus_exp = |a: f64| (-(-a).exp_m1()).ln();
            let denom = ln_one_minus_exp(t);
            (1..=d.get())
                .map(|j| {
                    let j = j as f64;
                    ln_one_minus_exp(t * j) - j.ln() - denom
                })
                .sum::<f64>()
                .exp()
        }
    })
}

/// Symmetric kernel Gram matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `w^T K w`.
    pub fn quadratic_form(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.n);
        (0..self.n)
            .map(|i| w[i] * self.row(i).iter().zip(w).map(|(k, x)| k * x).sum::<f64>())
            .sum()
    }
}

/// Builds `K[i][j] = K(samples[i], samples[j])`. Rows are computed in parallel.
pub fn kernel_matrix(samples: &[Permutation], spec: &KernelSpec) -> Result<KernelMatrix> {
    let first = samples
        .first()
        .ok_or_else(|| Error::invalid("kernel matrix of an empty sample list"))?;
    if let Some(bad) = samples.iter().find(|p| p.dim() != first.dim()) {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            first.dim(),
            bad.dim()
        )));
    }
    let eval = spec.evaluator(first.dimension())?;
    let n = samples.len();
    let mut entries = vec![0.0; n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate().skip(i) {
            *slot = eval.eval(&samples[i], &samples[j]);
        }
    });
    for i in 0..n {
        for j in 0..i {
            entries[i * n + j] = entries[j * n + i];
        }
    }
    Ok(KernelMatrix { n, entries })
}
