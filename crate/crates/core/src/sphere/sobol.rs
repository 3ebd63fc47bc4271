//! Sobol low-discrepancy sequence with Joe–Kuo direction numbers and a
//! random digital (XOR) shift.

use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};

const BITS: u32 = 32;
const DIRECTION_DATA: &str = include_str!("../../data/joe_kuo_d1024.txt");

/// Direction numbers for dimensions `1..=max_sobol_dimension()`.
fn directions() -> &'static [[u32; BITS as usize]] {
    static TABLE: OnceLock<Vec<[u32; BITS as usize]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::new();
        // First dimension: van der Corput in base 2.
        let mut first = [0u32; BITS as usize];
        for (k, v) in first.iter_mut().enumerate() {
            *v = 1 << (BITS - 1 - k as u32);
        }
        table.push(first);
        for line in DIRECTION_DATA.lines().skip(1) {
            let fields: Vec<u32> = line
                .split_whitespace()
                .map(|f| f.parse().expect("malformed direction-number table"))
                .collect();
            let (s, a, m) = (fields[1] as usize, fields[2], &fields[3..]);
            let mut v = [0u32; BITS as usize];
            for k in 0..BITS as usize {
                v[k] = if k < s {
                    m[k] << (BITS - 1 - k as u32)
                } else {
                    let mut x = v[k - s] ^ (v[k - s] >> s);
                    for l in 1..s {
                        if (a >> (s - 1 - l)) & 1 == 1 {
                            x ^= v[k - l];
                        }
                    }
                    x
                };
            }
            table.push(v);
        }
        table
    })
}

pub fn max_sobol_dimension() -> usize {
    directions().len()
}

/// Stateful Sobol generator. Index 0 (the origin) is skipped.
#[derive(Debug, Clone)]
pub struct SobolState {
    dim: usize,
    index: u64,
    x: Vec<u32>,
    shift: Vec<u32>,
}

impl SobolState {
    /// Unshifted sequence.
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_shift(dim, vec![0; dim])
    }

    /// Sequence XOR-shifted by a uniformly random digit vector.
    pub fn random_shift<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let shift = (0..dim).map(|_| rng.random::<u32>()).collect();
        Self::with_shift(dim, shift)
    }

    pub fn with_shift(dim: usize, shift: Vec<u32>) -> Result<Self> {
        if dim == 0 || dim > max_sobol_dimension() {
            return Err(Error::invalid(format!(
                "Sobol dimension {dim} outside 1..={}",
                max_sobol_dimension()
            )));
        }
        if shift.len() != dim {
            return Err(Error::invalid("shift length differs from dimension"));
        }
        Ok(SobolState {
            dim,
            index: 0,
            x: vec![0; dim],
            shift,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points returned so far.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Next point in `[0, 1)^dim`.
    pub fn next_point(&mut self) -> Result<Vec<f64>> {
        let c = self.index.trailing_ones();
        if c >= BITS {
            return Err(Error::numerical("Sobol sequence exhausted (2^32 points)"));
        }
        let dirs = directions();
        for (j, x) in self.x.iter_mut().enumerate() {
            *x ^= dirs[j][c as usize];
        }
        self.index += 1;
        let scale = 1.0 / (1u64 << BITS) as f64;
        Ok(self
            .x
            .iter()
            .zip(&self.shift)
            .map(|(&x, &s)| (x ^ s) as f64 * scale)
            .collect())
    }
}

impl Iterator for SobolState {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.next_point().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Reference values from an independent Sobol implementation using the
    // same direction numbers, origin skipped.
    const FIRST_EIGHT: [[f64; 8]; 8] = [
        [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
        [0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75],
        [0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25],
        [0.375, 0.375, 0.625, 0.875, 0.375, 0.125, 0.375, 0.875],
        [0.875, 0.875, 0.125, 0.375, 0.875, 0.625, 0.875, 0.375],
        [0.625, 0.125, 0.875, 0.625, 0.625, 0.875, 0.125, 0.125],
        [0.125, 0.625, 0.375, 0.125, 0.125, 0.375, 0.625, 0.625],
        [0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125, 0.4375, 0.9375],
    ];

    #[test]
    fn matches_reference_points() {
        let mut s = SobolState::new(8).unwrap();
        for want in FIRST_EIGHT {
            assert_eq!(s.next_point().unwrap(), want.to_vec());
        }
    }

    #[test]
    fn high_dimension_reference() {
        let mut s = SobolState::new(300).unwrap();
        let p = s.nth(4).unwrap();
        let got: Vec<f64> = [0, 99, 199, 255, 299].iter().map(|&i| p[i]).collect();
        assert_eq!(got, vec![0.875, 0.375, 0.375, 0.875, 0.125]);
    }

    #[test]
    fn dimension_limits() {
        assert_eq!(max_sobol_dimension(), 1024);
        assert!(SobolState::new(1024).is_ok());
        assert!(SobolState::new(1025).is_err());
        assert!(SobolState::new(0).is_err());
    }

    #[test]
    fn first_power_of_two_block_is_a_net() {
        // Each of the 2^k equal intervals of every coordinate holds exactly one of
        // the first 2^k points (counting the skipped origin as point zero).
        let k = 6;
        let mut s = SobolState::new(40).unwrap();
        let mut pts = vec![vec![0.0; 40]];
        pts.extend((1..1 << k).map(|_| s.next_point().unwrap()));
        for j in 0..40 {
            let mut seen = vec![false; 1 << k];
            for p in &pts {
                let cell = (p[j] * (1 << k) as f64) as usize;
                assert!(!seen[cell], "dim {j}");
                seen[cell] = true;
            }
        }
    }

    #[test]
    fn shifted_sequence_is_deterministic() {
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<_> = SobolState::random_shift(5, &mut r1).unwrap().take(20).collect();
        let b: Vec<_> = SobolState::random_shift(5, &mut r2).unwrap().take(20).collect();
        assert_eq!(a, b);
        assert!(a.iter().flatten().all(|&v| (0.0..1.0).contains(&v)));
        let mean: f64 = a.iter().map(|p| p[0]).sum::<f64>() / 20.0;
        assert!((mean - 0.5).abs() < 0.1);
    }
}
