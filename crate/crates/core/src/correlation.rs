//! Correlation statistics and the three aggregation levels used to compare a
//! metric against human judgements.
//!
//! With `x[i][j]` and `y[i][j]` the scores of system `i` on document `j`:
//!
//! * system level: correlate per-system means over documents;
//! * summary level: correlate across systems within each document, then
//!   average over documents;
//! * all examples: correlate over every `(system, document)` cell.
//!
//! Undefined correlations (constant inputs) are errors here; callers that
//! produce reports turn them into explicit `undefined` values.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    Pearson,
    Spearman,
}

impl Coefficient {
    pub fn compute(self, xs: &[f64], ys: &[f64]) -> Result<f64> {
        match self {
            Coefficient::Pearson => pearson(xs, ys),
            Coefficient::Spearman => spearman(xs, ys),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coefficient::Pearson => "pearson",
            Coefficient::Spearman => "spearman",
        })
    }
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::Undefined(format!("need at least 2 pairs, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite value in correlation input"));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation (two-pass, centred sums).
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    // Rounding in the mean can leave a constant input with a tiny nonzero
    // spread, so constancy is tested on the values themselves.
    let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    if constant(xs) || constant(ys) {
        return Err(Error::Undefined("constant input".into()));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("constant input".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the average of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        i = j;
    }
    ranks
}

/// Spearman correlation: Pearson on average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}

pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: targets.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptySelection("rmse of empty vectors".into()));
    }
    let sse: f64 = predictions.iter().zip(targets).map(|(p, t)| (p - t).powi(2)).sum();
    Ok((sse / predictions.len() as f64).sqrt())
}

/// Systems × documents grid of scores with explicit missing cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    system_ids: Vec<String>,
    episode_ids: Vec<String>,
    /// Row-major, one row per system.
    values: Vec<Option<f64>>,
}

impl ScoreMatrix {
    pub fn empty(system_ids: Vec<String>, episode_ids: Vec<String>) -> Self {
        let n = system_ids.len() * episode_ids.len();
        ScoreMatrix {
            system_ids,
            episode_ids,
            values: vec![None; n],
        }
    }

    pub fn from_fn(
        system_ids: Vec<String>,
        episode_ids: Vec<String>,
        mut f: impl FnMut(&str, &str) -> Option<f64>,
    ) -> Self {
        let mut values = Vec::with_capacity(system_ids.len() * episode_ids.len());
        for s in &system_ids {
            for e in &episode_ids {
                values.push(f(s, e));
            }
        }
        ScoreMatrix {
            system_ids,
            episode_ids,
            values,
        }
    }

    /// Builds a complete matrix from dense rows.
    pub fn from_rows(system_ids: Vec<String>, episode_ids: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != system_ids.len() || rows.iter().any(|r| r.len() != episode_ids.len()) {
            return Err(Error::AxisMismatch(format!(
                "expected {}x{} rows",
                system_ids.len(),
                episode_ids.len()
            )));
        }
        let values = rows.iter().flatten().map(|&v| Some(v)).collect();
        Ok(ScoreMatrix {
            system_ids,
            episode_ids,
            values,
        })
    }

    pub fn system_ids(&self) -> &[String] {
        &self.system_ids
    }

    pub fn episode_ids(&self) -> &[String] {
        &self.episode_ids
    }

    pub fn n_systems(&self) -> usize {
        self.system_ids.len()
    }

    pub fn n_episodes(&self) -> usize {
        self.episode_ids.len()
    }

    pub fn get(&self, system: usize, episode: usize) -> Option<f64> {
        self.values[system * self.episode_ids.len() + episode]
    }

    pub fn set(&mut self, system: usize, episode: usize, value: Option<f64>) {
        let m = self.episode_ids.len();
        self.values[system * m + episode] = value;
    }

    pub fn missing_cells(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.missing_cells() == 0
    }

    fn require_complete(&self, what: &str) -> Result<()> {
        let missing = self.missing_cells();
        if missing > 0 {
            return Err(Error::IncompleteGrid {
                missing,
                expected: self.values.len(),
                first: format!("in {what} matrix"),
            });
        }
        Ok(())
    }

    fn row(&self, system: usize) -> impl Iterator<Item = f64> + '_ {
        let m = self.episode_ids.len();
        self.values[system * m..(system + 1) * m]
            .iter()
            .map(|v| v.expect("complete matrix"))
    }

    fn column(&self, episode: usize) -> Vec<f64> {
        (0..self.system_ids.len())
            .map(|i| self.get(i, episode).expect("complete matrix"))
            .collect()
    }

    pub fn row_means(&self) -> Result<Vec<f64>> {
        self.require_complete("score")?;
        let m = self.episode_ids.len() as f64;
        Ok((0..self.system_ids.len())
            .map(|i| self.row(i).sum::<f64>() / m)
            .collect())
    }

    /// Flattened complete values, row-major.
    pub fn flat(&self) -> Result<Vec<f64>> {
        self.require_complete("score")?;
        Ok(self.values.iter().map(|v| v.expect("complete")).collect())
    }

    /// Sub-matrix restricted to `keep`, in this matrix's system order.
    pub fn filter_systems(&self, keep: &BTreeSet<String>) -> Result<ScoreMatrix> {
        if let Some(unknown) = keep.iter().find(|k| !self.system_ids.contains(k)) {
            return Err(Error::UnknownSystem(unknown.clone()));
        }
        if keep.len() < 2 {
            return Err(Error::invalid(format!(
                "at least 2 systems must be kept, got {}",
                keep.len()
            )));
        }
        let m = self.episode_ids.len();
        let mut system_ids = Vec::new();
        let mut values = Vec::new();
        for (i, s) in self.system_ids.iter().enumerate() {
            if keep.contains(s) {
                system_ids.push(s.clone());
                values.extend_from_slice(&self.values[i * m..(i + 1) * m]);
            }
        }
        Ok(ScoreMatrix {
            system_ids,
            episode_ids: self.episode_ids.clone(),
            values,
        })
    }

    /// Reorders (and restricts) this matrix onto the given axes.
    pub fn align_to(&self, system_ids: &[String], episode_ids: &[String]) -> Result<ScoreMatrix> {
        let sys_pos = |s: &String| {
            self.system_ids
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| Error::AxisMismatch(format!("system {s} not in matrix")))
        };
        let ep_index: std::collections::HashMap<&str, usize> = self
            .episode_ids
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i))
            .collect();
        let rows: Vec<usize> = system_ids.iter().map(sys_pos).collect::<Result<_>>()?;
        let cols: Vec<usize> = episode_ids
            .iter()
            .map(|e| {
                ep_index
                    .get(e.as_str())
                    .copied()
                    .ok_or_else(|| Error::AxisMismatch(format!("episode {e} not in matrix")))
            })
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &r in &rows {
            for &c in &cols {
                values.push(self.get(r, c));
            }
        }
        Ok(ScoreMatrix {
            system_ids: system_ids.to_vec(),
            episode_ids: episode_ids.to_vec(),
            values,
        })
    }
}

pub fn filter_systems(matrix: &ScoreMatrix, keep: &BTreeSet<String>) -> Result<ScoreMatrix> {
    matrix.filter_systems(keep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    System,
    Summary,
    AllExamples,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::System, Level::Summary, Level::AllExamples];
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::System => "system",
            Level::Summary => "summary",
            Level::AllExamples => "all_examples",
        })
    }
}

/// One correlation result. `value = None` means the correlation is undefined
/// and `note` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    #[serde(default)]
    pub metric: String,
    pub level: Level,
    pub coefficient: Coefficient,
    pub value: Option<f64>,
    pub n_used: usize,
    #[serde(default)]
    pub n_skipped: usize,
    #[serde(default)]
    pub system_filter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CorrelationReport {
    fn new(level: Level, coefficient: Coefficient, value: f64, n_used: usize, n_skipped: usize) -> Self {
        CorrelationReport {
            metric: String::new(),
            level,
            coefficient,
            value: Some(value),
            n_used,
            n_skipped,
            system_filter: String::new(),
            note: None,
        }
    }

    pub fn undefined(level: Level, coefficient: Coefficient, reason: impl Into<String>) -> Self {
        CorrelationReport {
            metric: String::new(),
            level,
            coefficient,
            value: None,
            n_used: 0,
            n_skipped: 0,
            system_filter: String::new(),
            note: Some(reason.into()),
        }
    }
}

fn check_aligned(x: &ScoreMatrix, y: &ScoreMatrix) -> Result<()> {
    if x.system_ids != y.system_ids {
        return Err(Error::AxisMismatch("system axes differ".into()));
    }
    if x.episode_ids != y.episode_ids {
        return Err(Error::AxisMismatch("episode axes differ".into()));
    }
    x.require_complete("X")?;
    y.require_complete("Y")
}

pub fn system_level(x: &ScoreMatrix, y: &ScoreMatrix, coefficient: Coefficient) -> Result<CorrelationReport> {
    check_aligned(x, y)?;
    if x.n_systems() < 2 {
        return Err(Error::invalid("system level needs at least 2 systems"));
    }
    if x.n_episodes() == 0 {
        return Err(Error::EmptySelection("no documents".into()));
    }
    let value = coefficient.compute(&x.row_means()?, &y.row_means()?)?;
    Ok(CorrelationReport::new(
        Level::System,
        coefficient,
        value,
        x.n_systems(),
        0,
    ))
}

/// Averages per-document correlations; documents where either column is
/// constant are skipped and counted.
pub fn summary_level(x: &ScoreMatrix, y: &ScoreMatrix, coefficient: Coefficient) -> Result<CorrelationReport> {
    check_aligned(x, y)?;
    if x.n_systems() < 2 {
        return Err(Error::invalid("summary level needs at least 2 systems"));
    }
    let per_doc: Vec<Option<f64>> = (0..x.n_episodes())
        .into_par_iter()
        .map(|j| match coefficient.compute(&x.column(j), &y.column(j)) {
            Ok(v) => Ok(Some(v)),
            Err(Error::Undefined(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    let mut used = 0;
    for v in per_doc.iter().flatten() {
        sum += v;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Undefined(format!(
            "all {} documents have a constant score column",
            x.n_episodes()
        )));
    }
    Ok(CorrelationReport::new(
        Level::Summary,
        coefficient,
        sum / used as f64,
        used,
        x.n_episodes() - used,
    ))
}

pub fn all_examples(x: &ScoreMatrix, y: &ScoreMatrix, coefficient: Coefficient) -> Result<CorrelationReport> {
    check_aligned(x, y)?;
    let (xs, ys) = (x.flat()?, y.flat()?);
    let value = coefficient.compute(&xs, &ys)?;
    Ok(CorrelationReport::new(
        Level::AllExamples,
        coefficient,
        value,
        xs.len(),
        0,
    ))
}

pub fn correlate(
    x: &ScoreMatrix,
    y: &ScoreMatrix,
    level: Level,
    coefficient: Coefficient,
) -> Result<CorrelationReport> {
    match level {
        Level::System => system_level(x, y, coefficient),
        Level::Summary => summary_level(x, y, coefficient),
        Level::AllExamples => all_examples(x, y, coefficient),
    }
}
