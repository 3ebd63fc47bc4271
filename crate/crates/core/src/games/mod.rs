//! Cooperative games `v(S)`: synthetic oracles and model-marginalization games.
//!
//! Players are 0-based indices `0..d`.

mod predictor;
mod tabular;

pub use predictor::{ExternalPredictor, FnPredictor, LinearPredictor, Predictor, DEFAULT_PREDICTOR_TIMEOUT};
pub use tabular::{load_csv, marginalization_game, MarginalizationGame, Table};

use std::collections::HashMap;
use std::fmt;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Dimension;

/// Set of players stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    d: usize,
    words: Vec<u64>,
}

impl Coalition {
    pub fn empty(d: usize) -> Self {
        Coalition {
            d,
            words: vec![0; d.div_ceil(64).max(1)],
        }
    }

    pub fn full(d: usize) -> Self {
        let mut c = Coalition::empty(d);
        (0..d).for_each(|i| c.insert(i));
        c
    }

    /// Rejects out-of-range or repeated players.
    pub fn from_members(d: usize, members: &[usize]) -> Result<Self> {
        let mut c = Coalition::empty(d);
        for &i in members {
            if i >= d {
                return Err(Error::invalid(format!("player {i} out of range for d={d}")));
            }
            if c.contains(i) {
                return Err(Error::invalid(format!("player {i} listed twice")));
            }
            c.insert(i);
        }
        Ok(c)
    }

    /// Low `d` bits of `mask`; `d <= 64`.
    pub fn from_mask(d: usize, mask: u64) -> Self {
        debug_assert!(d <= 64);
        let mut c = Coalition::empty(d);
        c.words[0] = if d == 64 { mask } else { mask & ((1u64 << d) - 1) };
        c
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Panics if `i >= d`.
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.d, "player {i} out of range for d={}", self.d);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.d, "player {i} out of range for d={}", self.d);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.d && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).filter(|&i| self.contains(i))
    }

    /// `N \ (self ∪ {skip})`.
    pub fn complement_without(&self, skip: usize) -> Coalition {
        let mut c = Coalition::empty(self.d);
        for i in (0..self.d).filter(|&i| i != skip && !self.contains(i)) {
            c.insert(i);
        }
        c
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// A characteristic function. Implement this to plug in a custom game.
pub trait CharacteristicFn: Send {
    fn value(&mut self, s: &Coalition) -> Result<f64>;
}

/// `v(S) = baseline + Σ_{i∈S} c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGame {
    pub coeffs: Vec<f64>,
    pub baseline: f64,
}

impl CharacteristicFn for LinearGame {
    fn value(&mut self, s: &Coalition) -> Result<f64> {
        Ok(self.baseline + s.members().map(|i| self.coeffs[i]).sum::<f64>())
    }
}

/// Three players; value 1 when player 2 joins at least one of players 0, 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct GloveGame;

impl CharacteristicFn for GloveGame {
    fn value(&mut self, s: &Coalition) -> Result<f64> {
        Ok((s.contains(2) && (s.contains(0) || s.contains(1))) as u8 as f64)
    }
}

/// `v(S) = Σ strength` over the terms whose players all belong to `S`.
///
/// Terms of size one are linear effects. Pure pairwise games are special:
/// a permutation and its reverse already give their exact Shapley values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionGame {
    pub d: usize,
    pub terms: Vec<(Vec<usize>, f64)>,
}

impl InteractionGame {
    pub fn new(d: Dimension, terms: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        for (players, strength) in &terms {
            if players.is_empty() {
                return Err(Error::invalid("interaction term without players"));
            }
            if !strength.is_finite() {
                return Err(Error::invalid("non-finite interaction strength"));
            }
            Coalition::from_members(d.get(), players)?;
        }
        Ok(InteractionGame { d: d.get(), terms })
    }

    pub fn pairs(d: Dimension, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        InteractionGame::new(d, pairs.iter().map(|&(i, j, s)| (vec![i, j], s)).collect())
    }

    /// Random game with `counts[k]` terms of `k + 1` players each and
    /// standard normal strengths.
    pub fn random<R: Rng + ?Sized>(d: Dimension, counts: &[usize], rng: &mut R) -> Result<Self> {
        let mut terms = Vec::new();
        for (k, &count) in counts.iter().enumerate() {
            if k + 1 > d.get() {
                return Err(Error::invalid(format!("terms of size {} exceed d={d}", k + 1)));
            }
            for _ in 0..count {
                let players = sample_indices(rng, d.get(), k + 1).into_vec();
                terms.push((players, rng.sample(StandardNormal)));
            }
        }
        InteractionGame::new(d, terms)
    }
}

impl CharacteristicFn for InteractionGame {
    fn value(&mut self, s: &Coalition) -> Result<f64> {
        Ok(self
            .terms
            .iter()
            .filter(|(p, _)| p.iter().all(|&i| s.contains(i)))
            .map(|(_, w)| w)
            .sum())
    }
}

/// A characteristic function with an evaluation counter and a value cache.
///
/// `v_evals` counts every call to [`Game::value`]; `fresh_evals` counts
/// calls that reached the underlying function. The cache lives until
/// [`Game::reset`], which estimators call at the start of each run.
pub struct Game {
    d: Dimension,
    name: String,
    inner: Box<dyn CharacteristicFn>,
    cache: Option<HashMap<Coalition, f64>>,
    v_evals: u64,
    fresh_evals: u64,
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Game")
            .field("d", &self.d)
            .field("name", &self.name)
            .field("v_evals", &self.v_evals)
            .finish()
    }
}

impl Game {
    pub fn new(d: Dimension, name: impl Into<String>, inner: Box<dyn CharacteristicFn>) -> Self {
        Game {
            d,
            name: name.into(),
            inner,
            cache: Some(HashMap::new()),
            v_evals: 0,
            fresh_evals: 0,
        }
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d.get()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v_evals(&self) -> u64 {
        self.v_evals
    }

    pub fn fresh_evals(&self) -> u64 {
        self.fresh_evals
    }

    /// Clears the cache. Counters keep running.
    pub fn reset(&mut self) {
        if let Some(c) = &mut self.cache {
            c.clear();
        }
    }

    pub fn value(&mut self, s: &Coalition) -> Result<f64> {
        if s.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "coalition over {} players for a {}-player game",
                s.dim(),
                self.dim()
            )));
        }
        self.v_evals += 1;
        if let Some(v) = self.cache.as_ref().and_then(|c| c.get(s)) {
            return Ok(*v);
        }
        self.fresh_evals += 1;
        let v = self.inner.value(s)?;
        if !v.is_finite() {
            return Err(Error::GameEvaluation(format!("v({s}) = {v}")));
        }
        if let Some(c) = &mut self.cache {
            c.insert(s.clone(), v);
        }
        Ok(v)
    }
}

pub fn linear_game(coeffs: Vec<f64>, baseline: f64) -> Result<Game> {
    let d = Dimension::new(coeffs.len())?;
    if coeffs.iter().any(|c| !c.is_finite()) || !baseline.is_finite() {
        return Err(Error::invalid("linear game coefficients must be finite"));
    }
    Ok(Game::new(d, "linear", Box::new(LinearGame { coeffs, baseline })))
}

pub fn glove_game() -> Game {
    Game::new(Dimension::new(3).unwrap(), "glove", Box::new(GloveGame))
}

/// Pairwise interaction game `v(S) = Σ strength` over pairs inside `S`.
pub fn interaction_game(d: Dimension, pairs: &[(usize, usize, f64)]) -> Result<Game> {
    Ok(InteractionGame::pairs(d, pairs)?.into_game())
}

impl InteractionGame {
    pub fn into_game(self) -> Game {
        let d = Dimension::new(self.d).expect("validated at construction");
        Game::new(d, "interaction", Box::new(self))
    }
}

/// Serializable description of a built-in game, used by config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GameSpec {
    Linear {
        coeffs: Vec<f64>,
        #[serde(default)]
        baseline: f64,
    },
    Glove,
    Interaction {
        d: usize,
        terms: Vec<(Vec<usize>, f64)>,
    },
    /// Random interaction game; `counts[k]` terms with `k + 1` players.
    RandomInteraction {
        d: usize,
        counts: Vec<usize>,
        seed: u64,
    },
    /// Marginalization game over a CSV table and an external predictor.
    Tabular {
        csv: std::path::PathBuf,
        foreground_row: usize,
        /// Rows used as background; defaults to every other row.
        #[serde(default)]
        background_rows: Option<Vec<usize>>,
        predictor: Vec<String>,
        #[serde(default)]
        timeout_secs: Option<u64>,
    },
}

impl GameSpec {
    pub fn build(&self) -> Result<Game> {
        use rand::SeedableRng;
        match self {
            GameSpec::Linear { coeffs, baseline } => linear_game(coeffs.clone(), *baseline),
            GameSpec::Glove => Ok(glove_game()),
            GameSpec::Interaction { d, terms } => {
                Ok(InteractionGame::new(Dimension::new(*d)?, terms.clone())?.into_game())
            }
            GameSpec::RandomInteraction { d, counts, seed } => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                Ok(InteractionGame::random(Dimension::new(*d)?, counts, &mut rng)?.into_game())
            }
            GameSpec::Tabular {
                csv,
                foreground_row,
                background_rows,
                predictor,
                timeout_secs,
            } => {
                let table = load_csv(csv)?;
                let fg = table.row(*foreground_row)?.to_vec();
                let bg: Vec<Vec<f64>> = match background_rows {
                    Some(rows) => rows
                        .iter()
                        .map(|&r| table.row(r).map(<[f64]>::to_vec))
                        .collect::<Result<_>>()?,
                    None => (0..table.len())
                        .filter(|&r| r != *foreground_row)
                        .map(|r| table.rows[r].clone())
                        .collect(),
                };
                let mut ext = ExternalPredictor::spawn(predictor)?;
                if let Some(t) = timeout_secs {
                    ext = ext.with_timeout(std::time::Duration::from_secs(*t));
                }
                marginalization_game(Box::new(ext), fg, bg)
            }
        }
    }

    /// Whether exact Shapley values are cheap enough to use as a reference.
    pub fn has_exact_oracle(&self) -> bool {
        let d = match self {
            GameSpec::Linear { coeffs, .. } => coeffs.len(),
            GameSpec::Glove => 3,
            GameSpec::Interaction { d, .. } | GameSpec::RandomInteraction { d, .. } => *d,
            GameSpec::Tabular { .. } => return false,
        };
        d <= crate::estimators::EXACT_SUBSETS_MAX_D
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(d: usize, m: &[usize]) -> Coalition {
        Coalition::from_members(d, m).unwrap()
    }

    #[test]
    fn coalition_basics() {
        let mut s = c(70, &[0, 3, 65]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(65) && !s.contains(64) && !s.contains(99));
        s.remove(3);
        assert_eq!(s.members().collect::<Vec<_>>(), vec![0, 65]);
        assert_eq!(s.to_string(), "{0,65}");
        assert!(Coalition::from_members(3, &[3]).is_err());
        assert!(Coalition::from_members(3, &[1, 1]).is_err());
        assert_eq!(Coalition::from_mask(3, 0b101), c(3, &[0, 2]));
        assert_eq!(Coalition::full(4).len(), 4);
        assert_eq!(c(4, &[1]).complement_without(2), c(4, &[0, 3]));
    }

    #[test]
    fn linear_values() {
        let mut g = linear_game(vec![1.0, 2.0, 3.0], 0.5).unwrap();
        assert_eq!(g.value(&c(3, &[0, 2])).unwrap(), 4.5);
        let full = g.value(&Coalition::full(3)).unwrap();
        let empty = g.value(&Coalition::empty(3)).unwrap();
        assert_eq!(full - empty, 6.0);
        assert!(linear_game(vec![1.0, f64::NAN], 0.0).is_err());
    }

    #[test]
    fn glove_values() {
        let mut g = glove_game();
        assert_eq!(g.value(&c(3, &[2])).unwrap(), 0.0);
        assert_eq!(g.value(&c(3, &[1, 2])).unwrap(), 1.0);
        assert_eq!(g.value(&c(3, &[0, 1])).unwrap(), 0.0);
        assert_eq!(g.value(&Coalition::full(3)).unwrap(), 1.0);
    }

    #[test]
    fn interaction_values() {
        let d = Dimension::new(5).unwrap();
        let mut g = interaction_game(d, &[(0, 1, 1.0), (1, 4, -2.0)]).unwrap();
        assert_eq!(g.value(&Coalition::empty(5)).unwrap(), 0.0);
        assert_eq!(g.value(&c(5, &[0, 1])).unwrap(), 1.0);
        assert_eq!(g.value(&c(5, &[0, 1, 4])).unwrap(), -1.0);
        assert!(interaction_game(d, &[(0, 5, 1.0)]).is_err());
        let mut t = InteractionGame::new(d, vec![(vec![0, 2, 3], 2.0), (vec![4], 1.0)])
            .unwrap()
            .into_game();
        assert_eq!(t.value(&c(5, &[0, 2])).unwrap(), 0.0);
        assert_eq!(t.value(&c(5, &[0, 2, 3, 4])).unwrap(), 3.0);
    }

    #[test]
    fn counters_and_cache() {
        let mut g = glove_game();
        let s = c(3, &[0, 2]);
        for _ in 0..3 {
            g.value(&s).unwrap();
        }
        assert_eq!((g.v_evals(), g.fresh_evals()), (3, 1));
        g.reset();
        g.value(&s).unwrap();
        assert_eq!((g.v_evals(), g.fresh_evals()), (4, 2));
        let mut nc = glove_game().without_cache();
        nc.value(&s).unwrap();
        nc.value(&s).unwrap();
        assert_eq!(nc.fresh_evals(), 2);
        assert!(g.value(&Coalition::empty(4)).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec = GameSpec::RandomInteraction {
            d: 12,
            counts: vec![12, 10, 10, 5],
            seed: 4,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"type\":\"random-interaction\""));
        let back: GameSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let mut a = spec.build().unwrap();
        let mut b = back.build().unwrap();
        let s = c(12, &[0, 1, 2, 3, 4, 5]);
        assert_eq!(a.value(&s).unwrap(), b.value(&s).unwrap());
        let glove: GameSpec = serde_json::from_str(r#"{"type":"glove"}"#).unwrap();
        assert_eq!(glove.build().unwrap().dim(), 3);
    }
}
