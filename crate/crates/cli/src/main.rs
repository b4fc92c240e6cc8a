use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "podassess", version, about = "Summary assessment toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Corpus directory (episodes.jsonl, records.jsonl, optional systems.json).
    /// Defaults to $PODASSESS_CORPUS or data/podcast_summary_assessment.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Require a complete system x episode grid when loading the corpus.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Systems to exclude: comma-separated system ids and/or kinds
    /// (reference, extractive, abstractive). `correlate` defaults to `reference`.
    #[arg(long, global = true)]
    pub filter_systems: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = CoefficientArg::Spearman)]
    pub coefficient: CoefficientArg,
    /// Output file (or directory for `splits`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Keep punctuation attached to words instead of splitting it off.
    #[arg(long, global = true, value_enum, default_value_t = PunctArg::SplitOff)]
    pub punctuation: PunctArg,
    /// Preserve case when tokenizing.
    #[arg(long, global = true)]
    pub cased: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientArg {
    Spearman,
    Pearson,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PunctArg {
    SplitOff,
    Drop,
    KeepAttached,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolArg {
    AllShuffled,
    HoldoutSystem,
    HoldoutDocument,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Top,
    Bottom,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingArg {
    Exact,
    TokenOverlap,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Corpus length statistics and grade distributions.
    Stats,
    /// Convert the released row-per-summary JSON-lines layout into a corpus directory.
    Import {
        #[arg(long)]
        released: PathBuf,
    },
    /// Score every summary with a lexical metric and write a score file.
    Metric {
        /// rouge_l_ref, rouge_n_ref, rouge_<n>_ref, rouge_l_doc, triple_f1_ref, triple_f1_doc
        #[arg(long)]
        metric: String,
        #[arg(long)]
        triples: Option<PathBuf>,
        /// Also score reference systems with reference-based metrics.
        #[arg(long)]
        include_reference: bool,
        #[arg(long, value_enum, default_value_t = MatchingArg::Exact)]
        matching: MatchingArg,
        /// Per-field token F1 threshold for token-overlap triple matching.
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
    },
    /// Correlate a score file with human grades or another score file.
    Correlate {
        #[arg(long = "x")]
        scores_x: PathBuf,
        #[arg(long)]
        x_scorer: Option<String>,
        /// Score file, or `human` for the corpus grades.
        #[arg(long = "y", default_value = "human")]
        scores_y: String,
        #[arg(long)]
        y_scorer: Option<String>,
        /// Comma-separated subset of system, summary, all_examples.
        #[arg(long, default_value = "system,summary")]
        levels: String,
        /// Also report the population without extractive systems.
        #[arg(long)]
        inc_exc: bool,
    },
    /// Write deterministic split plans.
    Splits {
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Held-out system for holdout-system.
        #[arg(long)]
        system: Option<String>,
        /// Fraction of episodes held out for holdout-document.
        #[arg(long)]
        fraction: Option<f64>,
        /// Comma-separated episode ids held out for holdout-document.
        #[arg(long)]
        episodes: Option<String>,
        #[arg(long, default_value_t = podassess_core::splits::DEFAULT_VALID_FRACTION)]
        valid_fraction: f64,
    },
    /// Select the top or bottom k scored keys, optionally after the brass filter.
    Select {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        scorer: Option<String>,
        /// Number of keys to keep; defaults to every remaining key.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Top)]
        mode: ModeArg,
        /// Brass items (JSON lines: episode_id, optional system_id, description,
        /// siblings, show_description). Dropped keys are excluded before selection.
        #[arg(long)]
        brass: Option<PathBuf>,
        /// Where to write per-item brass decisions (default: <out>.filter.jsonl).
        #[arg(long)]
        filter_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.95)]
        similarity_threshold: f64,
    },
    /// Average member score files into an ensemble, optionally binning by uncertainty.
    Ensemble {
        #[arg(long, num_args = 1.., required = true)]
        members: Vec<PathBuf>,
        #[arg(long)]
        scorer: Option<String>,
        /// Score file or `human`; enables uncertainty bins.
        #[arg(long)]
        targets: Option<String>,
        #[arg(long, default_value_t = 4)]
        bins: usize,
        #[arg(long)]
        bins_out: Option<PathBuf>,
    },
    /// Render report tables and plot data.
    Report {
        #[arg(long, num_args = 1..)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Score file for a per-system scatter against human grades.
        #[arg(long)]
        scatter: Option<PathBuf>,
        #[arg(long)]
        scatter_out: Option<PathBuf>,
        /// Score files for a cumulative-density CSV.
        #[arg(long, num_args = 1..)]
        cdf: Vec<PathBuf>,
        #[arg(long)]
        cdf_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Stats => commands::stats(g),
        Command::Import { released } => commands::import(g, &released),
        Command::Metric {
            metric,
            triples,
            include_reference,
            matching,
            threshold,
        } => commands::metric(g, &metric, triples.as_deref(), include_reference, matching, threshold),
        Command::Correlate {
            scores_x,
            x_scorer,
            scores_y,
            y_scorer,
            levels,
            inc_exc,
        } => commands::correlate(
            g,
            &scores_x,
            x_scorer.as_deref(),
            &scores_y,
            y_scorer.as_deref(),
            &levels,
            inc_exc,
        ),
        Command::Splits {
            protocol,
            k,
            repeats,
            system,
            fraction,
            episodes,
            valid_fraction,
        } => commands::splits(
            g,
            protocol,
            k,
            repeats,
            system.as_deref(),
            fraction,
            episodes.as_deref(),
            valid_fraction,
        ),
        Command::Select {
            scores,
            scorer,
            k,
            mode,
            brass,
            filter_out,
            similarity_threshold,
        } => commands::select(
            g,
            &scores,
            scorer.as_deref(),
            k,
            mode,
            brass.as_deref(),
            filter_out.as_deref(),
            similarity_threshold,
        ),
        Command::Ensemble {
            members,
            scorer,
            targets,
            bins,
            bins_out,
        } => commands::ensemble(
            g,
            &members,
            scorer.as_deref(),
            targets.as_deref(),
            bins,
            bins_out.as_deref(),
        ),
        Command::Report {
            reports,
            csv,
            scatter,
            scatter_out,
            cdf,
            cdf_out,
        } => commands::report(
            g,
            &reports,
            csv.as_deref(),
            scatter.as_deref(),
            scatter_out.as_deref(),
            &cdf,
            cdf_out.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
