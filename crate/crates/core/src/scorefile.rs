//! Score files: one `{episode_id, system_id, scorer_id, score}` record per line.
//!
//! This is the only channel between scorers (lexical metrics here, model-based
//! scorers elsewhere) and the correlation / selection harness. A scorer that
//! cannot produce a value writes `"score": null` with a `flag`; such cells
//! load as missing.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, GradeScale, RecordKey};
use crate::correlation::ScoreMatrix;
use crate::error::{Error, Result};
use crate::io;

/// System id used for corpus-level scores of creator descriptions outside the
/// assessed grid (training-set selection).
pub const DESCRIPTION_SYSTEM: &str = "description";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreFileRecord {
    #[serde(alias = "episode")]
    pub episode_id: String,
    #[serde(alias = "system")]
    pub system_id: String,
    #[serde(alias = "scorer")]
    pub scorer_id: String,
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

impl ScoreFileRecord {
    pub fn new(key: &RecordKey, scorer_id: &str, score: f64) -> Self {
        ScoreFileRecord {
            episode_id: key.episode_id.clone(),
            system_id: key.system_id.clone(),
            scorer_id: scorer_id.to_string(),
            score: Some(score),
            flag: None,
        }
    }

    pub fn key(&self) -> RecordKey {
        RecordKey::new(&self.episode_id, &self.system_id)
    }
}

/// Checks key uniqueness and finiteness.
pub fn validate(records: &[ScoreFileRecord]) -> Result<()> {
    let mut seen = HashSet::new();
    for r in records {
        if let Some(s) = r.score {
            if !s.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite score for {} / {}",
                    r.key(),
                    r.scorer_id
                )));
            }
        }
        if !seen.insert((&r.episode_id, &r.system_id, &r.scorer_id)) {
            return Err(Error::Duplicate(format!("score {} / {}", r.key(), r.scorer_id)));
        }
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<Vec<ScoreFileRecord>> {
    let records: Vec<ScoreFileRecord> = io::read_jsonl(path)?;
    if records.is_empty() {
        return Err(Error::NoRecords(path.to_path_buf()));
    }
    validate(&records)?;
    Ok(records)
}

pub fn write(path: &Path, records: &[ScoreFileRecord]) -> Result<()> {
    validate(records)?;
    io::write_jsonl(path, records)
}

/// Distinct scorer ids in order of first appearance.
pub fn scorers(records: &[ScoreFileRecord]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in records {
        if !out.contains(&r.scorer_id) {
            out.push(r.scorer_id.clone());
        }
    }
    out
}

/// Picks the records of one scorer. With `scorer = None` the file must hold
/// exactly one scorer.
pub fn select_scorer<'a>(
    records: &'a [ScoreFileRecord],
    scorer: Option<&str>,
) -> Result<(String, Vec<&'a ScoreFileRecord>)> {
    let name = match scorer {
        Some(s) => s.to_string(),
        None => {
            let all = scorers(records);
            match all.as_slice() {
                [one] => one.clone(),
                [] => return Err(Error::EmptySelection("score file is empty".into())),
                many => {
                    return Err(Error::invalid(format!(
                        "score file holds several scorers ({}); pick one",
                        many.join(", ")
                    )))
                }
            }
        }
    };
    let picked: Vec<_> = records.iter().filter(|r| r.scorer_id == name).collect();
    if picked.is_empty() {
        return Err(Error::EmptySelection(format!("no records for scorer {name}")));
    }
    Ok((name, picked))
}

/// Lays score records onto the given axes. Records outside the axes are ignored.
pub fn to_matrix(records: &[&ScoreFileRecord], system_ids: &[String], episode_ids: &[String]) -> ScoreMatrix {
    let index: std::collections::HashMap<(&str, &str), Option<f64>> = records
        .iter()
        .map(|r| ((r.system_id.as_str(), r.episode_id.as_str()), r.score))
        .collect();
    ScoreMatrix::from_fn(system_ids.to_vec(), episode_ids.to_vec(), |s, e| {
        index.get(&(s, e)).copied().flatten()
    })
}

/// Human grades as a score matrix on the given axes; ungraded cells are missing.
pub fn human_matrix(corpus: &Corpus, scale: &GradeScale, system_ids: &[String], episode_ids: &[String]) -> ScoreMatrix {
    ScoreMatrix::from_fn(system_ids.to_vec(), episode_ids.to_vec(), |s, e| {
        corpus.record(e, s).and_then(|r| r.grade).map(|g| scale.score(g))
    })
}

/// Human grades as score-file records, in corpus record order.
pub fn human_records(corpus: &Corpus, scale: &GradeScale) -> Vec<ScoreFileRecord> {
    corpus
        .records()
        .iter()
        .filter_map(|r| r.grade.map(|g| ScoreFileRecord::new(&r.key(), "human", scale.score(g))))
        .collect()
}

/// Keyed scores of one scorer, skipping flagged (null) records.
pub fn keyed_scores(records: &[&ScoreFileRecord]) -> BTreeMap<RecordKey, f64> {
    records.iter().filter_map(|r| r.score.map(|s| (r.key(), s))).collect()
}
