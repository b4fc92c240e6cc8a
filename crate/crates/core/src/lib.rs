//! Summary assessment toolkit.
//!
//! Loads a podcast summary assessment corpus, scores summaries with
//! model-free overlap metrics, correlates any scorer with human grades at
//! system, summary and all-example level, plans deterministic experiment
//! splits, and turns score files into ensembles and training-data selections.
//! Modules talk to the outside world through line-delimited JSON files.

pub mod corpus;
pub mod correlation;
pub mod error;
pub mod io;
pub mod lexical;
pub mod report;
pub mod scorefile;
pub mod scoring;
pub mod selection;
pub mod splits;
pub mod text;

pub use error::{Error, Result};
