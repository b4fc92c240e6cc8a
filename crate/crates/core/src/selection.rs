//! Ensembles, uncertainty analysis and score-driven data selection.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::correlation::{rmse, spearman};
use crate::error::{Error, Result};
use crate::text::{tokenize, Punctuation, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub mean: f64,
    /// Population standard deviation across members.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult<K> {
    pub entries: BTreeMap<K, EnsembleEntry>,
    pub members: usize,
}

/// Per-key mean and population std over members that share one key set.
pub fn ensemble_aggregate<K: Ord + Clone>(members: &[BTreeMap<K, f64>]) -> Result<EnsembleResult<K>> {
    let first = members
        .first()
        .ok_or_else(|| Error::EmptySelection("ensemble has no members".into()))?;
    for (i, m) in members.iter().enumerate().skip(1) {
        if m.len() != first.len() || !m.keys().eq(first.keys()) {
            return Err(Error::invalid(format!(
                "member {i} has a different key set than member 0"
            )));
        }
    }
    let n = members.len() as f64;
    let entries = first
        .keys()
        .map(|k| {
            let first_value = first[k];
            if members.iter().all(|m| m[k] == first_value) {
                return (
                    k.clone(),
                    EnsembleEntry {
                        mean: first_value,
                        std: 0.0,
                    },
                );
            }
            let mean = members.iter().map(|m| m[k]).sum::<f64>() / n;
            let var = members.iter().map(|m| (m[k] - mean).powi(2)).sum::<f64>() / n;
            (k.clone(), EnsembleEntry { mean, std: var.sqrt() })
        })
        .collect();
    Ok(EnsembleResult {
        entries,
        members: members.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBin {
    pub lower_std: f64,
    pub upper_std: f64,
    pub count: usize,
    /// `None` when the bin's predictions or targets are constant.
    pub spearman: Option<f64>,
    pub rmse: f64,
}

/// Minimum keys per bin for a rank correlation to be meaningful.
pub const MIN_BIN_SIZE: usize = 3;

/// Buckets keys by ascending ensemble std into `n_bins` quantile bins and
/// scores each bin against the targets.
///
/// Keys are ordered by `(std, key)` and cut at multiples of `len / n_bins`,
/// except that a cut never separates equal std values: a tied run stays in the
/// bin where it starts. Bins left empty by that rule are dropped, so all-equal
/// stds produce a single bin.
pub fn uncertainty_bins<K: Ord + Clone>(
    result: &EnsembleResult<K>,
    targets: &BTreeMap<K, f64>,
    n_bins: usize,
) -> Result<Vec<UncertaintyBin>> {
    if n_bins < 2 {
        return Err(Error::invalid("n_bins must be at least 2"));
    }
    if targets.len() != result.entries.len() || !targets.keys().eq(result.entries.keys()) {
        return Err(Error::AxisMismatch("targets and ensemble keys differ".into()));
    }
    let mut order: Vec<(&K, &EnsembleEntry)> = result.entries.iter().collect();
    order.sort_by(|a, b| a.1.std.total_cmp(&b.1.std).then_with(|| a.0.cmp(b.0)));
    let n = order.len();

    let mut bins = Vec::new();
    let mut start = 0;
    for b in 1..=n_bins {
        if start >= n {
            break;
        }
        let mut end = if b == n_bins { n } else { (b * n / n_bins).max(start) };
        while end > start && end < n && order[end].1.std == order[end - 1].1.std {
            end += 1;
        }
        if end == start {
            continue;
        }
        bins.push(&order[start..end]);
        start = end;
    }

    bins.into_iter()
        .map(|slice| {
            if slice.len() < MIN_BIN_SIZE {
                return Err(Error::invalid(format!(
                    "uncertainty bin holds {} keys, need at least {MIN_BIN_SIZE}",
                    slice.len()
                )));
            }
            let preds: Vec<f64> = slice.iter().map(|(_, e)| e.mean).collect();
            let gold: Vec<f64> = slice.iter().map(|(k, _)| targets[*k]).collect();
            let rho = match spearman(&preds, &gold) {
                Ok(v) => Some(v),
                Err(Error::Undefined(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(UncertaintyBin {
                lower_std: slice[0].1.std,
                upper_std: slice[slice.len() - 1].1.std,
                count: slice.len(),
                spearman: rho,
                rmse: rmse(&preds, &gold)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremeMode {
    Top,
    Bottom,
}

/// The `k` highest (`Top`) or lowest (`Bottom`) scored keys, best or worst first.
///
/// All keys are ranked once by score descending with ties broken by ascending
/// key; `Top` is the head of that ranking and `Bottom` its tail read backwards.
/// Sharing one ranking keeps the two selections disjoint whenever `2k <= n`,
/// even across tied scores.
pub fn select_extremes<K: Ord + Clone>(
    scores: &BTreeMap<K, f64>,
    k: usize,
    mode: ExtremeMode,
) -> Result<Vec<(K, f64)>> {
    if k > scores.len() {
        return Err(Error::invalid(format!("k = {k} exceeds {} scored keys", scores.len())));
    }
    if let Some((_, v)) = scores.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite score {v}")));
    }
    let mut ranked: Vec<(&K, f64)> = scores.iter().map(|(k, &v)| (k, v)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let pick = |(key, v): (&K, f64)| (key.clone(), v);
    Ok(match mode {
        ExtremeMode::Top => ranked.into_iter().take(k).map(pick).collect(),
        ExtremeMode::Bottom => ranked.into_iter().rev().take(k).map(pick).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrassItem {
    pub description: String,
    #[serde(default)]
    pub siblings: Vec<String>,
    #[serde(default)]
    pub show_description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    TooShort,
    TooLong,
    SimilarToOther,
    SimilarToShow,
}

impl DropReason {
    pub fn describe(self) -> &'static str {
        match self {
            DropReason::TooShort => "too short",
            DropReason::TooLong => "too long",
            DropReason::SimilarToOther => "similar to other",
            DropReason::SimilarToShow => "similar to show",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrassConfig {
    pub min_chars: usize,
    pub max_chars: usize,
    pub sibling_threshold: f64,
    pub show_threshold: f64,
}

impl Default for BrassConfig {
    fn default() -> Self {
        BrassConfig {
            min_chars: 20,
            max_chars: 750,
            sibling_threshold: 0.95,
            show_threshold: 0.95,
        }
    }
}

/// Cosine similarity of term-frequency vectors (lowercased word tokens,
/// punctuation dropped). Zero if either text has no terms.
pub fn tf_cosine(a: &str, b: &str) -> f64 {
    let cfg = TokenizerConfig {
        lowercase: true,
        punctuation: Punctuation::Drop,
        ..Default::default()
    };
    let tf = |s: &str| {
        let mut m: HashMap<String, f64> = HashMap::new();
        for t in tokenize(s, &cfg) {
            *m.entry(t).or_insert(0.0) += 1.0;
        }
        m
    };
    let (ta, tb) = (tf(a), tf(b));
    let norm = |m: &HashMap<String, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    let (na, nb) = (norm(&ta), norm(&tb));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = ta.iter().filter_map(|(t, v)| tb.get(t).map(|w| v * w)).sum();
    (dot / (na * nb)).min(1.0)
}

/// Keep/drop decision for one description; `None` means keep. Rules apply in
/// order: length (in characters), similarity to sibling descriptions,
/// similarity to the show description.
pub fn brass_decision(item: &BrassItem, config: &BrassConfig) -> Option<DropReason> {
    let len = item.description.chars().count();
    if len < config.min_chars {
        return Some(DropReason::TooShort);
    }
    if len > config.max_chars {
        return Some(DropReason::TooLong);
    }
    if item
        .siblings
        .iter()
        .any(|s| tf_cosine(&item.description, s) >= config.sibling_threshold)
    {
        return Some(DropReason::SimilarToOther);
    }
    if !item.show_description.trim().is_empty()
        && tf_cosine(&item.description, &item.show_description) >= config.show_threshold
    {
        return Some(DropReason::SimilarToShow);
    }
    None
}

pub fn brass_filter<K: Ord + Clone>(
    items: &BTreeMap<K, BrassItem>,
    config: &BrassConfig,
) -> BTreeMap<K, Option<DropReason>> {
    items
        .iter()
        .map(|(k, item)| (k.clone(), brass_decision(item, config)))
        .collect()
}
