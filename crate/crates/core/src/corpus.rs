//! Podcast summary assessment corpus: episodes, graded summaries and systems.
//!
//! On disk a corpus is a directory holding `episodes.jsonl`, `records.jsonl`
//! and optionally `systems.json`. Without a systems file the default
//! reference / extractive / abstractive partition (R1, E1-E3, A1-A16) is
//! used, restricted to systems that actually occur in the records; systems
//! outside the partition are appended as abstractive in order of appearance.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::text::{split_sentences, tokenize, TokenizerConfig};

pub const EPISODES_FILE: &str = "episodes.jsonl";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const SYSTEMS_FILE: &str = "systems.json";

/// Number of binary attribute questions attached to each annotated summary.
pub const ATTRIBUTE_COUNT: usize = 8;

/// System id of the creator-provided description.
pub const REFERENCE_SYSTEM: &str = "R1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub episode_id: String,
    pub transcript: String,
    pub creator_description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Grade {
    #[serde(rename = "E")]
    Excellent,
    #[serde(rename = "G")]
    Good,
    #[serde(rename = "F")]
    Fair,
    #[serde(rename = "B")]
    Bad,
}

impl Grade {
    /// Best first.
    pub const ALL: [Grade; 4] = [Grade::Excellent, Grade::Good, Grade::Fair, Grade::Bad];

    pub fn letter(self) -> char {
        match self {
            Grade::Excellent => 'E',
            Grade::Good => 'G',
            Grade::Fair => 'F',
            Grade::Bad => 'B',
        }
    }

    pub fn from_letter(s: &str) -> Option<Grade> {
        match s.trim() {
            "E" | "Excellent" => Some(Grade::Excellent),
            "G" | "Good" => Some(Grade::Good),
            "F" | "Fair" => Some(Grade::Fair),
            "B" | "Bad" => Some(Grade::Bad),
            _ => None,
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Maps grades to real-valued scores. Must be strictly decreasing from
/// Excellent to Bad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradeScale {
    /// Scores in `Grade::ALL` order.
    values: [f64; 4],
}

impl Default for GradeScale {
    /// Excellent=3, Good=2, Fair=1, Bad=0.
    fn default() -> Self {
        GradeScale {
            values: [3.0, 2.0, 1.0, 0.0],
        }
    }
}

impl GradeScale {
    pub fn new(excellent: f64, good: f64, fair: f64, bad: f64) -> Result<Self> {
        let values = [excellent, good, fair, bad];
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid(format!(
                "grade scale must be finite and strictly decreasing from Excellent to Bad, got {values:?}"
            )));
        }
        Ok(GradeScale { values })
    }

    pub fn score(&self, grade: Grade) -> f64 {
        self.values[grade as usize]
    }
}

pub fn grade_to_score(grade: Grade, scale: &GradeScale) -> f64 {
    scale.score(grade)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub episode_id: String,
    pub system_id: String,
    pub summary_text: String,
    #[serde(default)]
    pub grade: Option<Grade>,
    #[serde(default)]
    pub attributes: Option<Vec<bool>>,
}

impl SummaryRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey::new(&self.episode_id, &self.system_id)
    }
}

/// `(episode, system)` identity of a summary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RecordKey {
    pub episode_id: String,
    pub system_id: String,
}

impl RecordKey {
    pub fn new(episode_id: impl Into<String>, system_id: impl Into<String>) -> Self {
        RecordKey {
            episode_id: episode_id.into(),
            system_id: system_id.into(),
        }
    }
}

impl fmt::Display for RecordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.episode_id, self.system_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Reference,
    Extractive,
    Abstractive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub system_id: String,
    pub kind: SystemKind,
}

/// Partition shipped in `config/systems.json`: R1, E1-E3, A1-A16.
pub fn default_systems() -> Vec<SystemSpec> {
    serde_json::from_str(include_str!("../config/systems.json")).expect("bundled systems config parses")
}

/// A validated, immutable corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    episodes: Vec<Episode>,
    episode_index: HashMap<String, usize>,
    records: Vec<SummaryRecord>,
    record_index: HashMap<RecordKey, usize>,
    systems: Vec<SystemSpec>,
}

impl Corpus {
    /// Validates and assembles a corpus. `systems = None` applies the default
    /// partition as described in the module docs.
    pub fn new(
        episodes: Vec<Episode>,
        records: Vec<SummaryRecord>,
        systems: Option<Vec<SystemSpec>>,
        strict: bool,
    ) -> Result<Self> {
        let mut episode_index = HashMap::with_capacity(episodes.len());
        for (i, ep) in episodes.iter().enumerate() {
            if ep.episode_id.is_empty() {
                return Err(Error::invalid(format!("episode #{} has an empty id", i + 1)));
            }
            if ep.transcript.trim().is_empty() {
                return Err(Error::invalid(format!(
                    "episode {} has an empty transcript",
                    ep.episode_id
                )));
            }
            if episode_index.insert(ep.episode_id.clone(), i).is_some() {
                return Err(Error::Duplicate(format!("episode {}", ep.episode_id)));
            }
        }

        let mut record_index = HashMap::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            if !episode_index.contains_key(&rec.episode_id) {
                return Err(Error::DanglingEpisode(rec.episode_id.clone()));
            }
            if let Some(attrs) = &rec.attributes {
                if attrs.len() != ATTRIBUTE_COUNT {
                    return Err(Error::invalid(format!(
                        "record {} has {} attributes, expected {ATTRIBUTE_COUNT}",
                        rec.key(),
                        attrs.len()
                    )));
                }
            }
            if record_index.insert(rec.key(), i).is_some() {
                return Err(Error::Duplicate(format!("record {}", rec.key())));
            }
        }

        let systems = resolve_systems(&records, systems)?;
        let corpus = Corpus {
            episodes,
            episode_index,
            records,
            record_index,
            systems,
        };
        if strict {
            corpus.check_complete()?;
        }
        Ok(corpus)
    }

    fn check_complete(&self) -> Result<()> {
        let expected = self.systems.len() * self.episodes.len();
        let mut missing = 0;
        let mut first = None;
        for sys in &self.systems {
            for ep in &self.episodes {
                if !self
                    .record_index
                    .contains_key(&RecordKey::new(&ep.episode_id, &sys.system_id))
                {
                    missing += 1;
                    first.get_or_insert_with(|| RecordKey::new(&ep.episode_id, &sys.system_id));
                }
            }
        }
        match first {
            None => Ok(()),
            Some(first) => Err(Error::IncompleteGrid {
                missing,
                expected,
                first: first.to_string(),
            }),
        }
    }

    pub fn episodes(&self) -> &[Episode] {
        &self.episodes
    }

    pub fn records(&self) -> &[SummaryRecord] {
        &self.records
    }

    pub fn systems(&self) -> &[SystemSpec] {
        &self.systems
    }

    pub fn system_ids(&self) -> Vec<String> {
        self.systems.iter().map(|s| s.system_id.clone()).collect()
    }

    pub fn episode_ids(&self) -> Vec<String> {
        self.episodes.iter().map(|e| e.episode_id.clone()).collect()
    }

    pub fn episode(&self, episode_id: &str) -> Option<&Episode> {
        self.episode_index.get(episode_id).map(|&i| &self.episodes[i])
    }

    pub fn record(&self, episode_id: &str, system_id: &str) -> Option<&SummaryRecord> {
        self.record_index
            .get(&RecordKey::new(episode_id, system_id))
            .map(|&i| &self.records[i])
    }

    pub fn system_kind(&self, system_id: &str) -> Option<SystemKind> {
        self.systems.iter().find(|s| s.system_id == system_id).map(|s| s.kind)
    }

    pub fn systems_of_kind(&self, kind: SystemKind) -> Vec<String> {
        self.systems
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.system_id.clone())
            .collect()
    }

    /// Record keys in system-major, episode-minor order over the grid; cells
    /// without a record are skipped.
    pub fn record_keys(&self) -> Vec<RecordKey> {
        let mut keys = Vec::with_capacity(self.records.len());
        for sys in &self.systems {
            for ep in &self.episodes {
                let key = RecordKey::new(&ep.episode_id, &sys.system_id);
                if self.record_index.contains_key(&key) {
                    keys.push(key);
                }
            }
        }
        keys
    }
}

fn resolve_systems(records: &[SummaryRecord], systems: Option<Vec<SystemSpec>>) -> Result<Vec<SystemSpec>> {
    let mut seen = Vec::new();
    let mut seen_set = HashSet::new();
    for r in records {
        if seen_set.insert(r.system_id.as_str()) {
            seen.push(r.system_id.as_str());
        }
    }
    match systems {
        Some(list) => {
            let mut ids = HashSet::new();
            for s in &list {
                if !ids.insert(s.system_id.as_str()) {
                    return Err(Error::Duplicate(format!("system {}", s.system_id)));
                }
            }
            if let Some(unknown) = seen.iter().find(|s| !ids.contains(*s)) {
                return Err(Error::UnknownSystem((*unknown).to_string()));
            }
            Ok(list)
        }
        None => {
            let mut out: Vec<SystemSpec> = default_systems()
                .into_iter()
                .filter(|s| seen_set.contains(s.system_id.as_str()))
                .collect();
            let known: HashSet<String> = out.iter().map(|s| s.system_id.clone()).collect();
            out.extend(seen.iter().filter(|s| !known.contains(**s)).map(|s| SystemSpec {
                system_id: (*s).to_string(),
                kind: SystemKind::Abstractive,
            }));
            Ok(out)
        }
    }
}

/// Loads a corpus directory (see module docs).
pub fn load_corpus(dir: &Path, strict: bool) -> Result<Corpus> {
    if !dir.exists() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    let episodes_path = dir.join(EPISODES_FILE);
    let records_path = dir.join(RECORDS_FILE);
    let episodes: Vec<Episode> = io::read_jsonl(&episodes_path)?;
    if episodes.is_empty() {
        return Err(Error::NoRecords(episodes_path));
    }
    let records: Vec<SummaryRecord> = io::read_jsonl(&records_path)?;
    if records.is_empty() {
        return Err(Error::NoRecords(records_path));
    }
    let systems_path = dir.join(SYSTEMS_FILE);
    let systems = if systems_path.exists() {
        Some(io::read_json::<Vec<SystemSpec>>(&systems_path)?)
    } else {
        None
    };
    Corpus::new(episodes, records, systems, strict)
}

pub fn write_corpus(dir: &Path, corpus: &Corpus) -> Result<()> {
    io::write_jsonl(&dir.join(EPISODES_FILE), corpus.episodes())?;
    io::write_jsonl(&dir.join(RECORDS_FILE), corpus.records())?;
    io::write_json(&dir.join(SYSTEMS_FILE), &corpus.systems().to_vec())
}

/// One row of the public release: every row is a graded `(episode, system)`
/// summary and carries the full transcript. The creator description is the
/// summary of system R1 for that episode.
#[derive(Debug, Clone, Deserialize)]
pub struct ReleasedRow {
    pub episode_id: String,
    pub system_id: String,
    pub transcript: String,
    pub summary: String,
    #[serde(default)]
    pub score: Option<String>,
    #[serde(default)]
    pub attributes: Option<Vec<u8>>,
}

/// Converts rows of the released layout (JSON lines, keys as in [`ReleasedRow`])
/// into the canonical corpus.
pub fn import_released(path: &Path) -> Result<Corpus> {
    let rows: Vec<ReleasedRow> = io::read_jsonl(path)?;
    if rows.is_empty() {
        return Err(Error::NoRecords(path.to_path_buf()));
    }
    let mut transcripts: BTreeMap<String, String> = BTreeMap::new();
    let mut order = Vec::new();
    let mut descriptions: HashMap<String, String> = HashMap::new();
    let mut records = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let line = i + 1;
        let malformed = |message: String| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        if !transcripts.contains_key(&row.episode_id) {
            order.push(row.episode_id.clone());
            transcripts.insert(row.episode_id.clone(), row.transcript.clone());
        } else if transcripts[&row.episode_id] != row.transcript {
            return Err(malformed(format!(
                "transcript differs between rows of episode {}",
                row.episode_id
            )));
        }
        if row.system_id == REFERENCE_SYSTEM {
            descriptions.insert(row.episode_id.clone(), row.summary.clone());
        }
        let grade = match row.score.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(Grade::from_letter(s).ok_or_else(|| malformed(format!("unknown grade {s:?}")))?),
        };
        let attributes = row.attributes.map(|a| a.into_iter().map(|v| v != 0).collect());
        records.push(SummaryRecord {
            episode_id: row.episode_id,
            system_id: row.system_id,
            summary_text: row.summary,
            grade,
            attributes,
        });
    }
    let episodes = order
        .into_iter()
        .map(|id| Episode {
            transcript: transcripts.remove(&id).unwrap_or_default(),
            creator_description: descriptions.remove(&id).unwrap_or_default(),
            episode_id: id,
        })
        .collect();
    Corpus::new(episodes, records, None, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Two-pass mean and population standard deviation. `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<MeanStd> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(MeanStd { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub transcript_sentences: MeanStd,
    pub transcript_words: MeanStd,
    pub summary_sentences: MeanStd,
    pub summary_words: MeanStd,
    pub n_transcripts: usize,
    pub n_summaries: usize,
}

/// Sentence and word length statistics. Words are tokenizer tokens, so with
/// punctuation split off a trailing period counts as a token.
pub fn corpus_stats(corpus: &Corpus, tokenizer: &TokenizerConfig) -> Result<LengthStats> {
    if corpus.episodes().is_empty() || corpus.records().is_empty() {
        return Err(Error::EmptySelection("corpus has no episodes or records".into()));
    }
    let measure = |texts: Vec<&str>| -> (Vec<f64>, Vec<f64>) {
        use rayon::prelude::*;
        texts
            .par_iter()
            .map(|t| {
                (
                    split_sentences(t, tokenizer).len() as f64,
                    tokenize(t, tokenizer).len() as f64,
                )
            })
            .unzip()
    };
    let (ts, tw) = measure(corpus.episodes().iter().map(|e| e.transcript.as_str()).collect());
    let (ss, sw) = measure(corpus.records().iter().map(|r| r.summary_text.as_str()).collect());
    let ms = |v: &[f64]| MeanStd::of(v).expect("non-empty");
    Ok(LengthStats {
        transcript_sentences: ms(&ts),
        transcript_words: ms(&tw),
        summary_sentences: ms(&ss),
        summary_words: ms(&sw),
        n_transcripts: ts.len(),
        n_summaries: ss.len(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeHistogram {
    pub excellent: usize,
    pub good: usize,
    pub fair: usize,
    pub bad: usize,
}

impl GradeHistogram {
    pub fn count(&self, grade: Grade) -> usize {
        match grade {
            Grade::Excellent => self.excellent,
            Grade::Good => self.good,
            Grade::Fair => self.fair,
            Grade::Bad => self.bad,
        }
    }

    pub fn total(&self) -> usize {
        self.excellent + self.good + self.fair + self.bad
    }

    pub fn fraction(&self, grade: Grade) -> f64 {
        self.count(grade) as f64 / self.total() as f64
    }
}

pub fn grade_distribution(corpus: &Corpus, system_filter: Option<&BTreeSet<String>>) -> Result<GradeHistogram> {
    if let Some(filter) = system_filter {
        if let Some(unknown) = filter.iter().find(|s| corpus.system_kind(s).is_none()) {
            return Err(Error::UnknownSystem(unknown.clone()));
        }
    }
    let mut hist = GradeHistogram::default();
    for rec in corpus.records() {
        if system_filter.is_some_and(|f| !f.contains(&rec.system_id)) {
            continue;
        }
        match rec.grade.ok_or_else(|| Error::Ungraded(rec.key().to_string()))? {
            Grade::Excellent => hist.excellent += 1,
            Grade::Good => hist.good += 1,
            Grade::Fair => hist.fair += 1,
            Grade::Bad => hist.bad += 1,
        }
    }
    if hist.total() == 0 {
        return Err(Error::EmptySelection("no records match the system filter".into()));
    }
    Ok(hist)
}

/// Default corpus location used by the CLI and the acceptance suite.
pub fn default_corpus_dir() -> PathBuf {
    std::env::var_os("PODASSESS_CORPUS")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data/podcast_summary_assessment"))
}
