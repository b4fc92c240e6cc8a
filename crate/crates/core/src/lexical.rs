//! Model-free overlap metrics: ROUGE-N, ROUGE-L, token F1 and triple F1.

use std::collections::HashMap;
use std::hash::Hash;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::text::{tokenize, TokenizerConfig};

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub const ZERO: Prf = Prf {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf { precision, recall, f1 }
    }

    /// Builds a PRF from a match count and the two totals; an empty side yields zero.
    pub fn from_counts(matched: usize, candidate_total: usize, reference_total: usize) -> Self {
        if candidate_total == 0 || reference_total == 0 {
            return Prf::ZERO;
        }
        Prf::new(
            matched as f64 / candidate_total as f64,
            matched as f64 / reference_total as f64,
        )
    }
}

/// Longest common subsequence length with a rolling two-row table over the
/// shorter input, so memory is `O(min(|a|, |b|))`.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut prev = vec![0u32; short.len() + 1];
    let mut curr = vec![0u32; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            curr[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(curr[j]) };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()] as usize
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// ROUGE-N with clipped n-gram counts.
///
/// # Panics
/// If `n == 0`.
pub fn rouge_n<T: Eq + Hash>(candidate: &[T], reference: &[T], n: usize) -> Prf {
    assert!(n >= 1, "ROUGE-N order must be at least 1");
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let matched: usize = cand
        .iter()
        .map(|(gram, &c)| c.min(refs.get(gram).copied().unwrap_or(0)))
        .sum();
    Prf::from_counts(
        matched,
        candidate.len().saturating_sub(n - 1),
        reference.len().saturating_sub(n - 1),
    )
}

/// ROUGE-L over whole token sequences (no sentence-level union LCS).
pub fn rouge_l<T: PartialEq>(candidate: &[T], reference: &[T]) -> Prf {
    let lcs = lcs_length(candidate, reference);
    Prf::from_counts(lcs, candidate.len(), reference.len())
}

/// F1 over token multisets. Two empty answers agree perfectly; one empty side scores 0.
pub fn token_f1<T: Eq + Hash>(answer_a: &[T], answer_b: &[T]) -> f64 {
    if answer_a.is_empty() && answer_b.is_empty() {
        return 1.0;
    }
    rouge_n(answer_a, answer_b, 1).f1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triple {
    /// Normalizes each field through the tokenizer; `None` if any field ends up empty.
    pub fn normalized(subject: &str, relation: &str, object: &str, tokenizer: &TokenizerConfig) -> Option<Self> {
        let norm = |s: &str| tokenize(s, tokenizer).join(" ");
        let t = Triple {
            subject: norm(subject),
            relation: norm(relation),
            object: norm(object),
        };
        (!t.subject.is_empty() && !t.relation.is_empty() && !t.object.is_empty()).then_some(t)
    }

    fn fields(&self) -> [&str; 3] {
        [&self.subject, &self.relation, &self.object]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleMatching {
    Exact,
    /// Every field pair must reach the token-F1 threshold.
    TokenOverlap {
        threshold: f64,
    },
}

impl TripleMatching {
    pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.8;

    fn matches(&self, a: &Triple, b: &Triple) -> bool {
        match *self {
            TripleMatching::Exact => a == b,
            TripleMatching::TokenOverlap { threshold } => a.fields().iter().zip(b.fields()).all(|(x, y)| {
                let xs: Vec<&str> = x.split_whitespace().collect();
                let ys: Vec<&str> = y.split_whitespace().collect();
                token_f1(&xs, &ys) >= threshold
            }),
        }
    }
}

/// Triple-overlap PRF. Inputs are treated as sets (duplicates removed).
///
/// Precision counts candidate triples matching some reference triple; recall
/// counts reference triples matched by some candidate triple.
pub fn triple_f1(candidate: &[Triple], reference: &[Triple], matching: TripleMatching) -> Prf {
    let mut cand: Vec<&Triple> = candidate.iter().collect();
    cand.sort();
    cand.dedup();
    let mut refs: Vec<&Triple> = reference.iter().collect();
    refs.sort();
    refs.dedup();
    if cand.is_empty() || refs.is_empty() {
        return Prf::ZERO;
    }
    let cand_hit = cand
        .iter()
        .filter(|c| refs.iter().any(|r| matching.matches(c, r)))
        .count();
    let ref_hit = refs
        .iter()
        .filter(|r| cand.iter().any(|c| matching.matches(c, r)))
        .count();
    Prf::new(cand_hit as f64 / cand.len() as f64, ref_hit as f64 / refs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleSource {
    Document,
    Summary,
    Reference,
}

/// One line of a triple file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleRecord {
    pub episode_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_id: Option<String>,
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub source: TripleSource,
}

/// Triples grouped by `(source, episode_id, system_id)`, already normalized.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    groups: HashMap<(TripleSource, String, Option<String>), Vec<Triple>>,
}

impl TripleStore {
    pub fn from_records(records: &[TripleRecord], tokenizer: &TokenizerConfig) -> Result<Self> {
        let mut groups: HashMap<_, Vec<Triple>> = HashMap::new();
        for rec in records {
            if rec.source == TripleSource::Summary && rec.system_id.is_none() {
                return Err(Error::invalid(format!(
                    "summary triple for episode {} lacks system_id",
                    rec.episode_id
                )));
            }
            let system = match rec.source {
                TripleSource::Summary => rec.system_id.clone(),
                _ => None,
            };
            let entry = groups.entry((rec.source, rec.episode_id.clone(), system)).or_default();
            if let Some(t) = Triple::normalized(&rec.subject, &rec.relation, &rec.object, tokenizer) {
                entry.push(t);
            }
        }
        Ok(TripleStore { groups })
    }

    pub fn load(path: &Path, tokenizer: &TokenizerConfig) -> Result<Self> {
        let records: Vec<TripleRecord> = io::read_jsonl(path)?;
        Self::from_records(&records, tokenizer)
    }

    pub fn summary(&self, episode_id: &str, system_id: &str) -> &[Triple] {
        self.get(TripleSource::Summary, episode_id, Some(system_id))
    }

    pub fn reference(&self, episode_id: &str) -> &[Triple] {
        self.get(TripleSource::Reference, episode_id, None)
    }

    pub fn document(&self, episode_id: &str) -> &[Triple] {
        self.get(TripleSource::Document, episode_id, None)
    }

    fn get(&self, source: TripleSource, episode_id: &str, system: Option<&str>) -> &[Triple] {
        self.groups
            .get(&(source, episode_id.to_string(), system.map(String::from)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}
