use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use podassess_core::corpus::{self, Corpus, GradeHistogram, GradeScale, RecordKey, SystemKind, REFERENCE_SYSTEM};
use podassess_core::correlation::{correlate as correlate_level, Coefficient, CorrelationReport, Level};
use podassess_core::lexical::{TripleMatching, TripleStore};
use podassess_core::scorefile::{self, ScoreFileRecord, DESCRIPTION_SYSTEM};
use podassess_core::scoring::{score_corpus, Metric, ScoringOptions};
use podassess_core::selection::{
    brass_filter, ensemble_aggregate, select_extremes, uncertainty_bins, BrassConfig, BrassItem, ExtremeMode,
};
use podassess_core::splits::{self, DocumentSelection, SplitPlan};
use podassess_core::text::{Punctuation, TokenizerConfig};
use podassess_core::{io, Error};

use crate::{CoefficientArg, Global, MatchingArg, ModeArg, ProtocolArg, PunctArg};

fn tokenizer(g: &Global) -> TokenizerConfig {
    TokenizerConfig {
        lowercase: !g.cased,
        punctuation: match g.punctuation {
            PunctArg::SplitOff => Punctuation::SplitOff,
            PunctArg::Drop => Punctuation::Drop,
            PunctArg::KeepAttached => Punctuation::KeepAttached,
        },
        ..Default::default()
    }
}

fn coefficient(g: &Global) -> Coefficient {
    match g.coefficient {
        CoefficientArg::Spearman => Coefficient::Spearman,
        CoefficientArg::Pearson => Coefficient::Pearson,
    }
}

fn load_corpus(g: &Global) -> Result<Corpus> {
    let dir = g.corpus.clone().unwrap_or_else(corpus::default_corpus_dir);
    corpus::load_corpus(&dir, g.strict).with_context(|| format!("loading corpus from {}", dir.display()))
}

fn require_out(g: &Global, command: &str) -> Result<PathBuf> {
    g.out.clone().ok_or_else(|| anyhow!("{command} needs --out"))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    io::write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

/// Resolves a comma-separated list of system ids and kind names to the set
/// of excluded system ids.
fn excluded_systems(corpus: &Corpus, spec: &str) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind = match item {
            "reference" => Some(SystemKind::Reference),
            "extractive" => Some(SystemKind::Extractive),
            "abstractive" => Some(SystemKind::Abstractive),
            _ => None,
        };
        match kind {
            Some(k) => out.extend(corpus.systems_of_kind(k)),
            None if corpus.system_kind(item).is_some() => {
                out.insert(item.to_string());
            }
            None => return Err(Error::UnknownSystem(item.to_string()).into()),
        }
    }
    Ok(out)
}

/// Corpus systems minus `--filter-systems` (or `default_filter` when unset).
fn population(g: &Global, corpus: &Corpus, default_filter: &str) -> Result<Vec<String>> {
    let excluded = excluded_systems(corpus, g.filter_systems.as_deref().unwrap_or(default_filter))?;
    let systems: Vec<String> = corpus
        .system_ids()
        .into_iter()
        .filter(|s| !excluded.contains(s))
        .collect();
    if systems.is_empty() {
        bail!("the system filter excludes every system");
    }
    Ok(systems)
}

#[derive(Serialize)]
struct GradeSummary {
    #[serde(flatten)]
    counts: GradeHistogram,
    total: usize,
    fractions: BTreeMap<String, f64>,
}

impl From<GradeHistogram> for GradeSummary {
    fn from(h: GradeHistogram) -> Self {
        let fractions = corpus::Grade::ALL
            .iter()
            .map(|&gr| (gr.letter().to_string(), h.fraction(gr)))
            .collect();
        GradeSummary {
            total: h.total(),
            counts: h,
            fractions,
        }
    }
}

#[derive(Serialize)]
struct StatsOutput {
    n_episodes: usize,
    n_systems: usize,
    n_records: usize,
    lengths: corpus::LengthStats,
    /// `None` when some record is ungraded.
    grades_all: Option<GradeSummary>,
    grades_reference: Option<GradeSummary>,
}

fn optional_grades(result: podassess_core::Result<GradeHistogram>) -> Result<Option<GradeSummary>> {
    match result {
        Ok(h) => Ok(Some(h.into())),
        Err(Error::Ungraded(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn stats(g: &Global) -> Result<()> {
    let corpus = load_corpus(g)?;
    let lengths = corpus::corpus_stats(&corpus, &tokenizer(g))?;
    let grades_all = optional_grades(corpus::grade_distribution(&corpus, None))?;
    let grades_reference = if corpus.system_kind(REFERENCE_SYSTEM).is_some() {
        let only: BTreeSet<String> = [REFERENCE_SYSTEM.to_string()].into();
        optional_grades(corpus::grade_distribution(&corpus, Some(&only)))?
    } else {
        None
    };
    let out = StatsOutput {
        n_episodes: corpus.episodes().len(),
        n_systems: corpus.systems().len(),
        n_records: corpus.records().len(),
        lengths,
        grades_all,
        grades_reference,
    };
    let mut text = serde_json::to_string_pretty(&out)?;
    text.push('\n');
    match &g.out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn import(g: &Global, released: &Path) -> Result<()> {
    let out = require_out(g, "import")?;
    let corpus = corpus::import_released(released)?;
    corpus::write_corpus(&out, &corpus)?;
    println!(
        "imported {} episodes, {} records into {}",
        corpus.episodes().len(),
        corpus.records().len(),
        out.display()
    );
    Ok(())
}

pub fn metric(
    g: &Global,
    metric: &str,
    triples: Option<&Path>,
    include_reference: bool,
    matching: MatchingArg,
    threshold: f64,
) -> Result<()> {
    let metric: Metric = metric.parse()?;
    let out = require_out(g, "metric")?;
    if metric.needs_triples() && triples.is_none() {
        bail!("metric {metric} needs --triples");
    }
    let corpus = load_corpus(g)?;
    let tok = tokenizer(g);
    let store = triples.map(|p| TripleStore::load(p, &tok)).transpose()?;
    let options = ScoringOptions {
        tokenizer: tok,
        include_reference,
        matching: match matching {
            MatchingArg::Exact => TripleMatching::Exact,
            MatchingArg::TokenOverlap => TripleMatching::TokenOverlap { threshold },
        },
    };
    let mut records = score_corpus(&corpus, metric, store.as_ref(), &options)?;
    if let Some(spec) = &g.filter_systems {
        let excluded = excluded_systems(&corpus, spec)?;
        records.retain(|r| !excluded.contains(&r.system_id));
    }
    scorefile::write(&out, &records)?;
    println!("wrote {} scores to {}", records.len(), out.display());
    Ok(())
}

fn parse_levels(spec: &str) -> Result<Vec<Level>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let level = match item {
            "system" => Level::System,
            "summary" => Level::Summary,
            "all_examples" | "all" => Level::AllExamples,
            other => bail!("unknown level {other:?} (expected system, summary, all_examples)"),
        };
        if !out.contains(&level) {
            out.push(level);
        }
    }
    if out.is_empty() {
        bail!("no correlation levels requested");
    }
    Ok(out)
}

/// Score source for one correlation axis.
enum Scores {
    Human,
    File(String, Vec<ScoreFileRecord>),
}

impl Scores {
    fn load(spec: &str, scorer: Option<&str>) -> Result<Scores> {
        if spec == "human" {
            return Ok(Scores::Human);
        }
        let path = Path::new(spec);
        let records = scorefile::load(path)?;
        let (name, _) = scorefile::select_scorer(&records, scorer)?;
        let records = records.into_iter().filter(|r| r.scorer_id == name).collect();
        Ok(Scores::File(name, records))
    }

    fn name(&self) -> &str {
        match self {
            Scores::Human => "human",
            Scores::File(name, _) => name,
        }
    }

    fn matrix(&self, corpus: &Corpus, systems: &[String]) -> podassess_core::correlation::ScoreMatrix {
        let episodes = corpus.episode_ids();
        match self {
            Scores::Human => scorefile::human_matrix(corpus, &GradeScale::default(), systems, &episodes),
            Scores::File(_, records) => {
                let refs: Vec<&ScoreFileRecord> = records.iter().collect();
                scorefile::to_matrix(&refs, systems, &episodes)
            }
        }
    }
}

pub fn correlate(
    g: &Global,
    scores_x: &Path,
    x_scorer: Option<&str>,
    scores_y: &str,
    y_scorer: Option<&str>,
    levels: &str,
    inc_exc: bool,
) -> Result<()> {
    let levels = parse_levels(levels)?;
    let corpus = load_corpus(g)?;
    let x = Scores::load(&scores_x.to_string_lossy(), x_scorer)?;
    let y = Scores::load(scores_y, y_scorer)?;
    let coef = coefficient(g);

    let inc = population(g, &corpus, "reference")?;
    let mut populations = vec![("inc", inc.clone())];
    if inc_exc {
        let extractive: BTreeSet<String> = corpus.systems_of_kind(SystemKind::Extractive).into_iter().collect();
        populations.push(("exc", inc.into_iter().filter(|s| !extractive.contains(s)).collect()));
    }

    let mut reports = Vec::new();
    for (label, systems) in &populations {
        let (mx, my) = (x.matrix(&corpus, systems), y.matrix(&corpus, systems));
        for &level in &levels {
            let mut report = match correlate_level(&mx, &my, level, coef) {
                Ok(r) => r,
                Err(Error::Undefined(why)) => CorrelationReport::undefined(level, coef, why),
                Err(e) => {
                    return Err(anyhow::Error::from(e).context(format!(
                        "{} vs {} at {level} level ({label})",
                        x.name(),
                        y.name()
                    )))
                }
            };
            report.metric = x.name().to_string();
            report.system_filter = label.to_string();
            reports.push(report);
        }
    }
    if let Some(out) = &g.out {
        io::write_jsonl(out, &reports)?;
    }
    print!("{}", podassess_core::report::markdown_table(&reports)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn splits(
    g: &Global,
    protocol: ProtocolArg,
    k: usize,
    repeats: usize,
    system: Option<&str>,
    fraction: Option<f64>,
    episodes: Option<&str>,
    valid_fraction: f64,
) -> Result<()> {
    let out_dir = require_out(g, "splits")?;
    let corpus = load_corpus(g)?;
    let mut records = corpus.record_keys();
    if let Some(spec) = &g.filter_systems {
        let excluded = excluded_systems(&corpus, spec)?;
        records.retain(|r| !excluded.contains(&r.system_id));
    }

    let plans: Vec<(String, SplitPlan)> = match protocol {
        ProtocolArg::AllShuffled => splits::repeated_kfold(&records, k, repeats, g.seed, valid_fraction)?
            .into_iter()
            .map(|p| (format!("kfold_seed{}.json", p.seed), p))
            .collect(),
        ProtocolArg::HoldoutSystem => {
            let sys = system.ok_or_else(|| anyhow!("holdout-system needs --system"))?;
            let plan = splits::holdout_system(&records, &corpus, sys, g.seed, valid_fraction)?;
            vec![(format!("holdout_system_{sys}_seed{}.json", g.seed), plan)]
        }
        ProtocolArg::HoldoutDocument => {
            let selection = match (fraction, episodes) {
                (Some(f), None) => DocumentSelection::Fraction(f),
                (None, Some(list)) => DocumentSelection::Episodes(
                    list.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect(),
                ),
                _ => bail!("holdout-document needs exactly one of --fraction or --episodes"),
            };
            let plan = splits::holdout_document(&records, &corpus, &selection, g.seed, valid_fraction)?;
            vec![(format!("holdout_document_seed{}.json", g.seed), plan)]
        }
    };

    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for (name, plan) in &plans {
        plan.validate(&records)?;
        let path = out_dir.join(name);
        plan.save(&path)?;
        println!("{}", path.display());
    }
    Ok(())
}

#[derive(Deserialize)]
struct BrassRow {
    episode_id: String,
    #[serde(default)]
    system_id: Option<String>,
    #[serde(flatten)]
    item: BrassItem,
}

#[derive(Serialize)]
struct BrassOutcome<'a> {
    episode_id: &'a str,
    system_id: &'a str,
    keep: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
}

#[derive(Serialize)]
struct SelectedRow<'a> {
    episode_id: &'a str,
    system_id: &'a str,
    score: f64,
    rank: usize,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[allow(clippy::too_many_arguments)]
pub fn select(
    g: &Global,
    scores: &Path,
    scorer: Option<&str>,
    k: Option<usize>,
    mode: ModeArg,
    brass: Option<&Path>,
    filter_out: Option<&Path>,
    similarity_threshold: f64,
) -> Result<()> {
    let out = require_out(g, "select")?;
    let records = scorefile::load(scores)?;
    let (_, picked) = scorefile::select_scorer(&records, scorer)?;
    let mut keyed = scorefile::keyed_scores(&picked);
    let total = keyed.len();

    if let Some(brass_path) = brass {
        let rows: Vec<BrassRow> = io::read_jsonl(brass_path)?;
        let mut items: BTreeMap<RecordKey, BrassItem> = BTreeMap::new();
        for row in rows {
            let key = RecordKey::new(
                row.episode_id,
                row.system_id.unwrap_or_else(|| DESCRIPTION_SYSTEM.into()),
            );
            if items.contains_key(&key) {
                return Err(Error::Duplicate(format!("brass item {key}")).into());
            }
            items.insert(key, row.item);
        }
        let config = BrassConfig {
            sibling_threshold: similarity_threshold,
            show_threshold: similarity_threshold,
            ..Default::default()
        };
        let decisions = brass_filter(&items, &config);
        let outcomes: Vec<BrassOutcome> = decisions
            .iter()
            .map(|(key, reason)| BrassOutcome {
                episode_id: &key.episode_id,
                system_id: &key.system_id,
                keep: reason.is_none(),
                reason: reason.map(|r| r.describe()),
            })
            .collect();
        let filter_path = filter_out
            .map(Path::to_path_buf)
            .unwrap_or_else(|| with_suffix(&out, ".filter.jsonl"));
        io::write_jsonl(&filter_path, &outcomes)?;
        let dropped = decisions.iter().filter(|(_, r)| r.is_some()).count();
        keyed.retain(|key, _| !matches!(decisions.get(key), Some(Some(_))));
        println!("brass filter dropped {dropped} of {} items", decisions.len());
    }

    let k = k.unwrap_or(keyed.len());
    let mode = match mode {
        ModeArg::Top => ExtremeMode::Top,
        ModeArg::Bottom => ExtremeMode::Bottom,
    };
    let selected = select_extremes(&keyed, k, mode)?;
    let rows: Vec<SelectedRow> = selected
        .iter()
        .enumerate()
        .map(|(i, (key, score))| SelectedRow {
            episode_id: &key.episode_id,
            system_id: &key.system_id,
            score: *score,
            rank: i + 1,
        })
        .collect();
    io::write_jsonl(&out, &rows)?;
    println!("selected {} of {total} scored keys", rows.len());
    Ok(())
}

pub fn ensemble(
    g: &Global,
    members: &[PathBuf],
    scorer: Option<&str>,
    targets: Option<&str>,
    bins: usize,
    bins_out: Option<&Path>,
) -> Result<()> {
    let out = require_out(g, "ensemble")?;
    let mut keyed = Vec::with_capacity(members.len());
    for path in members {
        let records = scorefile::load(path)?;
        let (_, picked) =
            scorefile::select_scorer(&records, scorer).with_context(|| format!("member {}", path.display()))?;
        keyed.push(scorefile::keyed_scores(&picked));
    }
    let result = ensemble_aggregate(&keyed)?;
    let mut records: Vec<ScoreFileRecord> = result
        .entries
        .iter()
        .map(|(k, e)| ScoreFileRecord::new(k, "ensemble_mean", e.mean))
        .collect();
    records.extend(
        result
            .entries
            .iter()
            .map(|(k, e)| ScoreFileRecord::new(k, "ensemble_std", e.std)),
    );
    scorefile::write(&out, &records)?;

    if let Some(spec) = targets {
        let all_targets = if spec == "human" {
            let corpus = load_corpus(g)?;
            let human = scorefile::human_records(&corpus, &GradeScale::default());
            scorefile::keyed_scores(&human.iter().collect::<Vec<_>>())
        } else {
            let records = scorefile::load(Path::new(spec))?;
            let (_, picked) = scorefile::select_scorer(&records, None)?;
            scorefile::keyed_scores(&picked)
        };
        let mut aligned = BTreeMap::new();
        for key in result.entries.keys() {
            let t = all_targets
                .get(key)
                .ok_or_else(|| anyhow!("no target score for {key}"))?;
            aligned.insert(key.clone(), *t);
        }
        let binned = uncertainty_bins(&result, &aligned, bins)?;
        let mut text = serde_json::to_string_pretty(&binned)?;
        text.push('\n');
        match bins_out {
            Some(p) => write_text(p, &text)?,
            None => print!("{text}"),
        }
    }
    Ok(())
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn report(
    g: &Global,
    reports: &[PathBuf],
    csv: Option<&Path>,
    scatter: Option<&Path>,
    scatter_out: Option<&Path>,
    cdf: &[PathBuf],
    cdf_out: Option<&Path>,
) -> Result<()> {
    if reports.is_empty() && scatter.is_none() && cdf.is_empty() {
        bail!("nothing to report: give --reports, --scatter or --cdf");
    }
    if !reports.is_empty() {
        let paths: Vec<&Path> = reports.iter().map(PathBuf::as_path).collect();
        let loaded = podassess_core::report::load_reports(&paths)?;
        let table = podassess_core::report::markdown_table(&loaded)?;
        match &g.out {
            Some(p) => write_text(p, &table)?,
            None => print!("{table}"),
        }
        if let Some(p) = csv {
            write_text(p, &podassess_core::report::csv_table(&loaded)?)?;
        }
    } else if csv.is_some() {
        bail!("--csv needs --reports");
    }

    if let Some(path) = scatter {
        let target = scatter_out.ok_or_else(|| anyhow!("--scatter needs --scatter-out"))?;
        let corpus = load_corpus(g)?;
        let systems = population(g, &corpus, "reference")?;
        let x = Scores::load(&path.to_string_lossy(), None)?;
        let metric = x.matrix(&corpus, &systems);
        let human = Scores::Human.matrix(&corpus, &systems);
        write_text(
            target,
            &podassess_core::report::system_scatter_csv(&metric, &human, &corpus)?,
        )?;
    }

    if !cdf.is_empty() {
        let target = cdf_out.ok_or_else(|| anyhow!("--cdf needs --cdf-out"))?;
        let mut series = Vec::with_capacity(cdf.len());
        for path in cdf {
            let records = scorefile::load(path)?;
            let (_, picked) = scorefile::select_scorer(&records, None)?;
            let values: Vec<f64> = picked.iter().filter_map(|r| r.score).collect();
            series.push((file_label(path), values));
        }
        write_text(target, &podassess_core::report::cumulative_columns_csv(&series)?)?;
    }
    Ok(())
}
