//! Runs a lexical metric over every summary of a corpus and emits score records.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, RecordKey, SystemKind};
use crate::error::{Error, Result};
use crate::lexical::{rouge_l, rouge_n, triple_f1, TripleMatching, TripleStore};
use crate::scorefile::ScoreFileRecord;
use crate::text::{tokenize, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// ROUGE-L F1 of summary against the creator description.
    RougeLRef,
    /// ROUGE-N F1 of summary against the creator description.
    RougeNRef {
        n: usize,
    },
    /// ROUGE-L F1 of summary against the transcript.
    RougeLDoc,
    TripleF1Ref,
    TripleF1Doc,
}

impl Metric {
    pub fn scorer_id(&self) -> String {
        match self {
            Metric::RougeLRef => "rouge_l_ref".into(),
            Metric::RougeNRef { n } => format!("rouge_{n}_ref"),
            Metric::RougeLDoc => "rouge_l_doc".into(),
            Metric::TripleF1Ref => "triple_f1_ref".into(),
            Metric::TripleF1Doc => "triple_f1_doc".into(),
        }
    }

    pub fn against_reference(&self) -> bool {
        matches!(self, Metric::RougeLRef | Metric::RougeNRef { .. } | Metric::TripleF1Ref)
    }

    pub fn needs_triples(&self) -> bool {
        matches!(self, Metric::TripleF1Ref | Metric::TripleF1Doc)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.scorer_id())
    }
}

impl FromStr for Metric {
    type Err = Error;

    /// Accepts `rouge_l_ref`, `rouge_n_ref` (n = 2), `rouge_<n>_ref`,
    /// `rouge_l_doc`, `triple_f1_ref`, `triple_f1_doc`.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rouge_l_ref" => Metric::RougeLRef,
            "rouge_n_ref" => Metric::RougeNRef { n: 2 },
            "rouge_l_doc" => Metric::RougeLDoc,
            "triple_f1_ref" => Metric::TripleF1Ref,
            "triple_f1_doc" => Metric::TripleF1Doc,
            other => {
                let n = other
                    .strip_prefix("rouge_")
                    .and_then(|r| r.strip_suffix("_ref"))
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::invalid(format!("unknown metric {other:?}")))?;
                Metric::RougeNRef { n }
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct ScoringOptions {
    pub tokenizer: TokenizerConfig,
    /// Score reference-kind systems too. Ignored (always `true`) for
    /// document-based metrics.
    pub include_reference: bool,
    pub matching: TripleMatching,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        ScoringOptions {
            tokenizer: TokenizerConfig::default(),
            include_reference: false,
            matching: TripleMatching::Exact,
        }
    }
}

/// Token ids shared by every text of one run.
#[derive(Default)]
struct Vocab(HashMap<String, u32>);

impl Vocab {
    fn ids(&mut self, tokens: Vec<String>) -> Vec<u32> {
        tokens
            .into_iter()
            .map(|t| {
                let next = self.0.len() as u32;
                *self.0.entry(t).or_insert(next)
            })
            .collect()
    }
}

/// Scores every record of the corpus grid (system-major, episode-minor).
/// Reference-based metrics skip reference-kind systems unless
/// `include_reference` is set, since a reference cannot grade itself.
pub fn score_corpus(
    corpus: &Corpus,
    metric: Metric,
    triples: Option<&TripleStore>,
    options: &ScoringOptions,
) -> Result<Vec<ScoreFileRecord>> {
    if metric.needs_triples() && triples.is_none() {
        return Err(Error::invalid(format!("metric {metric} requires a triple file")));
    }
    let keys: Vec<RecordKey> = corpus
        .record_keys()
        .into_iter()
        .filter(|k| {
            !metric.against_reference()
                || options.include_reference
                || corpus.system_kind(&k.system_id) != Some(SystemKind::Reference)
        })
        .collect();
    let scorer = metric.scorer_id();

    let scores: Vec<f64> = match metric {
        Metric::TripleF1Ref | Metric::TripleF1Doc => {
            let store = triples.expect("checked above");
            keys.par_iter()
                .map(|k| {
                    let cand = store.summary(&k.episode_id, &k.system_id);
                    let target = if metric == Metric::TripleF1Ref {
                        store.reference(&k.episode_id)
                    } else {
                        store.document(&k.episode_id)
                    };
                    triple_f1(cand, target, options.matching).f1
                })
                .collect()
        }
        _ => {
            let tok = &options.tokenizer;
            let target_text = |episode_id: &str| {
                let ep = corpus.episode(episode_id).expect("validated corpus");
                if metric == Metric::RougeLDoc {
                    ep.transcript.as_str()
                } else {
                    ep.creator_description.as_str()
                }
            };
            let episode_ids = corpus.episode_ids();
            let target_tokens: Vec<Vec<String>> =
                episode_ids.par_iter().map(|e| tokenize(target_text(e), tok)).collect();
            let summary_tokens: Vec<Vec<String>> = keys
                .par_iter()
                .map(|k| {
                    let rec = corpus.record(&k.episode_id, &k.system_id).expect("key from corpus");
                    tokenize(&rec.summary_text, tok)
                })
                .collect();
            let mut vocab = Vocab::default();
            let targets: HashMap<&str, Vec<u32>> = episode_ids
                .iter()
                .map(String::as_str)
                .zip(target_tokens.into_iter().map(|t| vocab.ids(t)))
                .collect();
            let summaries: Vec<Vec<u32>> = summary_tokens.into_iter().map(|t| vocab.ids(t)).collect();
            keys.par_iter()
                .zip(summaries.par_iter())
                .map(|(k, cand)| {
                    let target = &targets[k.episode_id.as_str()];
                    match metric {
                        Metric::RougeNRef { n } => rouge_n(cand, target, n).f1,
                        _ => rouge_l(cand, target).f1,
                    }
                })
                .collect()
        }
    };

    Ok(keys
        .iter()
        .zip(scores)
        .map(|(k, s)| ScoreFileRecord::new(k, &scorer, s))
        .collect())
}
