//! Permutations in one-line notation.
//!
//! A [`Permutation`] stores 1-based ranks: `ranks[i] = j` means element `i + 1`
//! has rank `j`. Players are visited by a Shapley walk in increasing rank, so
//! the visiting order is the inverse permutation.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of players. Always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { got: d, min: 2 });
        }
        Ok(Dimension(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `binom(d, 2)`, the number of unordered pairs.
    pub fn pairs(self) -> u64 {
        let d = self.0 as u64;
        d * (d - 1) / 2
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    ranks: Vec<u32>,
}

impl Permutation {
    /// Validates that `ranks` is a bijection on `1..=d`.
    pub fn from_ranks(ranks: Vec<u32>) -> Result<Self> {
        let d = ranks.len();
        Dimension::new(d)?;
        let mut seen = vec![false; d];
        for &r in &ranks {
            let idx = (r as usize).wrapping_sub(1);
            if idx >= d || seen[idx] {
                return Err(Error::invalid(format!(
                    "ranks {ranks:?} are not a permutation of 1..={d}"
                )));
            }
            seen[idx] = true;
        }
        Ok(Permutation { ranks })
    }

    /// Builds from a 0-based visiting order: `order[k]` is the element with rank `k + 1`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let mut ranks = vec![0u32; order.len()];
        for (k, &e) in order.iter().enumerate() {
            if e >= order.len() || ranks[e] != 0 {
                return Err(Error::invalid(format!("{order:?} is not an ordering")));
            }
            ranks[e] = k as u32 + 1;
        }
        Permutation::from_ranks(ranks)
    }

    pub fn identity(d: usize) -> Result<Self> {
        Dimension::new(d)?;
        Ok(Permutation {
            ranks: (1..=d as u32).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.ranks.len()
    }

    pub fn dimension(&self) -> Dimension {
        Dimension(self.ranks.len())
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// Rank (1-based) of the 0-based element `i`.
    pub fn rank(&self, i: usize) -> u32 {
        self.ranks[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.ranks.len()];
        for (i, &r) in self.ranks.iter().enumerate() {
            inv[r as usize - 1] = i as u32 + 1;
        }
        Permutation { ranks: inv }
    }

    /// `result(i) = d + 1 - self(i)`.
    pub fn reverse(&self) -> Permutation {
        let d1 = self.ranks.len() as u32 + 1;
        Permutation {
            ranks: self.ranks.iter().map(|&r| d1 - r).collect(),
        }
    }

    /// 0-based element indices sorted by increasing rank.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0usize; self.ranks.len()];
        for (i, &r) in self.ranks.iter().enumerate() {
            order[r as usize - 1] = i;
        }
        order
    }

    /// Number of inversions relative to the identity.
    pub fn inversions(&self) -> u64 {
        let mut seq = self.ranks.clone();
        let mut scratch = vec![0u32; seq.len()];
        count_inversions(&mut seq, &mut scratch)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.ranks.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ranks = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::invalid(format!("bad rank {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_ranks(ranks)
    }
}

const SMALL_DIM: usize = 24;

/// Number of element pairs ordered differently by `p` and `q`, in `O(d log d)`.
pub fn n_discordant(p: &Permutation, q: &Permutation) -> Result<u64> {
    check_same_dim(p, q)?;
    // The pair loop allocates nothing and wins for small d.
    if p.dim() <= SMALL_DIM {
        return n_discordant_naive(p, q);
    }
    Ok(discordant_by_merge(p, q))
}

fn discordant_by_merge(p: &Permutation, q: &Permutation) -> u64 {
    let mut seq = vec![0u32; p.dim()];
    for (i, &r) in p.ranks.iter().enumerate() {
        seq[r as usize - 1] = q.ranks[i];
    }
    let mut scratch = vec![0u32; seq.len()];
    count_inversions(&mut seq, &mut scratch)
}

/// Quadratic double loop over all pairs. Kept as a reference implementation.
pub fn n_discordant_naive(p: &Permutation, q: &Permutation) -> Result<u64> {
    check_same_dim(p, q)?;
    let (a, b) = (&p.ranks, &q.ranks);
    let mut n = 0u64;
    for i in 0..a.len() {
        let (ai, bi) = (a[i], b[i]);
        // Branch-free inner loop; compiles to SIMD compares.
        n += a[i + 1..]
            .iter()
            .zip(&b[i + 1..])
            .map(|(&x, &y)| ((x > ai) != (y > bi)) as u32)
            .sum::<u32>() as u64;
    }
    Ok(n)
}

fn check_same_dim(p: &Permutation, q: &Permutation) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            p.dim(),
            q.dim()
        )));
    }
    Ok(())
}

/// Bottom-up merge sort that returns the number of inversions in `seq`.
pub(crate) fn count_inversions(seq: &mut [u32], scratch: &mut [u32]) -> u64 {
    let n = seq.len();
    let mut inversions = 0u64;
    let mut width = 1;
    let (mut src, mut dst) = (seq, scratch);
    let mut in_scratch = false;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if src[i] <= src[j] {
                    dst[k] = src[i];
                    i += 1;
                } else {
                    dst[k] = src[j];
                    inversions += (mid - i) as u64;
                    j += 1;
                }
                k += 1;
            }
            dst[k..k + mid - i].copy_from_slice(&src[i..mid]);
            k += mid - i;
            dst[k..k + hi - j].copy_from_slice(&src[j..hi]);
            lo = hi;
        }
        std::mem::swap(&mut src, &mut dst);
        in_scratch = !in_scratch;
        width *= 2;
    }
    if in_scratch {
        dst.copy_from_slice(src);
    }
    inversions
}

/// Stable argsort: `b` with `x[b_1] <= x[b_2] <= ...`, ties by ascending index.
pub fn argsort(x: &[f64]) -> Result<Permutation> {
    Dimension::new(x.len())?;
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("argsort input contains NaN"));
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    Ok(Permutation {
        ranks: idx.into_iter().map(|i| i as u32 + 1).collect(),
    })
}

/// Uniform permutation via Fisher–Yates.
pub fn random_permutation<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> Permutation {
    let mut ranks: Vec<u32> = (1..=d.get() as u32).collect();
    ranks.shuffle(rng);
    Permutation { ranks }
}

/// All `d!` permutations in lexicographic order of their rank vectors.
pub fn all_permutations(d: Dimension) -> AllPermutations {
    AllPermutations {
        next: Some((1..=d.get() as u32).collect()),
    }
}

pub struct AllPermutations {
    next: Option<Vec<u32>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if let Some(i) = (0..succ.len() - 1).rev().find(|&i| succ[i] < succ[i + 1]) {
            let j = (i + 1..succ.len()).rev().find(|&j| succ[j] > succ[i]).unwrap();
            succ.swap(i, j);
            succ[i + 1..].reverse();
            self.next = Some(succ);
        }
        Some(Permutation { ranks: current })
    }
}

/// Reads the text form: one comma-separated permutation per line.
/// Blank lines and lines starting with `#` are skipped.
pub fn read_permutations<R: BufRead>(reader: R) -> Result<Vec<Permutation>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let p = t
            .parse::<Permutation>()
            .map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
        out.push(p);
    }
    Ok(out)
}

pub fn write_permutations<W: Write>(mut w: W, perms: &[Permutation]) -> Result<()> {
    for p in perms {
        writeln!(w, "{p}")?;
    }
    Ok(())
}
