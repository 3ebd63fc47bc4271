//! Tabular data and the background-replacement game built on a predictor.

use std::path::Path;

use super::{CharacteristicFn, Coalition, Game, Predictor};
use crate::error::{Error, Result};
use crate::perm::Dimension;

/// Numeric CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> Result<&[f64]> {
        self.rows
            .get(i)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::invalid(format!("row {i} out of range ({} rows)", self.rows.len())))
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    // header is line 1
                    Error::Config(format!("{}: line {}: bad value {f:?}", path.display(), k + 2))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Config(format!("{}: no data rows", path.display())));
    }
    Ok(Table { header, rows })
}

/// `v(S)` = mean prediction over background rows with the foreground's
/// features on `S` and the background row's features elsewhere.
pub struct MarginalizationGame {
    predictor: Box<dyn Predictor>,
    foreground: Vec<f64>,
    background: Vec<Vec<f64>>,
}

impl CharacteristicFn for MarginalizationGame {
    fn value(&mut self, s: &Coalition) -> Result<f64> {
        let rows: Vec<Vec<f64>> = self
            .background
            .iter()
            .map(|b| {
                b.iter()
                    .zip(&self.foreground)
                    .enumerate()
                    .map(|(i, (&bg, &fg))| if s.contains(i) { fg } else { bg })
                    .collect()
            })
            .collect();
        let preds = self
            .predictor
            .predict(&rows)
            .map_err(|e| Error::GameEvaluation(format!("v({s}): {e}")))?;
        if preds.len() != rows.len() {
            return Err(Error::GameEvaluation(format!(
                "v({s}): {} predictions for {} rows",
                preds.len(),
                rows.len()
            )));
        }
        Ok(preds.iter().sum::<f64>() / preds.len() as f64)
    }
}

pub fn marginalization_game(
    predictor: Box<dyn Predictor>,
    foreground: Vec<f64>,
    background: Vec<Vec<f64>>,
) -> Result<Game> {
    let d = Dimension::new(foreground.len())?;
    if background.is_empty() {
        return Err(Error::invalid("background set is empty"));
    }
    if let Some(b) = background.iter().find(|b| b.len() != d.get()) {
        return Err(Error::invalid(format!(
            "background row has {} features, foreground has {d}",
            b.len()
        )));
    }
    if foreground
        .iter()
        .chain(background.iter().flatten())
        .any(|v| !v.is_finite())
    {
        return Err(Error::invalid("non-finite feature value"));
    }
    Ok(Game::new(
        d,
        "marginalization",
        Box::new(MarginalizationGame {
            predictor,
            foreground,
            background,
        }),
    ))
}
