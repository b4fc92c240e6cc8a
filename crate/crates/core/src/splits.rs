//! Deterministic experiment split planning.
//!
//! Shuffles use ChaCha8 seeded through `SeedableRng::seed_from_u64` and an
//! explicit Fisher-Yates pass with rejection-sampled bounded integers, so a
//! plan depends only on `(records, parameters, seed)` and not on the version
//! of any shuffling helper.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, RecordKey};
use crate::error::{Error, Result};
use crate::io;

/// Fraction of the non-test pool used for validation.
pub const DEFAULT_VALID_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    AllShuffledKfold,
    HoldoutSystem,
    HoldoutDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<RecordKey>,
    pub valid: Vec<RecordKey>,
    pub test: Vec<RecordKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub protocol: Protocol,
    pub seed: u64,
    pub valid_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub held_out: Option<Vec<String>>,
    pub folds: Vec<Fold>,
}

impl SplitPlan {
    /// Checks pairwise disjointness inside each fold and, for k-fold plans,
    /// that the test sets cover `records` exactly once.
    pub fn validate(&self, records: &[RecordKey]) -> Result<()> {
        for (i, fold) in self.folds.iter().enumerate() {
            let mut seen = HashSet::new();
            for k in fold.train.iter().chain(&fold.valid).chain(&fold.test) {
                if !seen.insert(k) {
                    return Err(Error::invalid(format!("fold {i}: {k} assigned twice")));
                }
            }
        }
        if self.protocol == Protocol::AllShuffledKfold {
            let mut covered = HashSet::new();
            for fold in &self.folds {
                for k in &fold.test {
                    if !covered.insert(k) {
                        return Err(Error::invalid(format!("{k} tested in two folds")));
                    }
                }
            }
            if covered.len() != records.len() || records.iter().any(|r| !covered.contains(r)) {
                return Err(Error::invalid("test folds do not cover the records"));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<SplitPlan> {
        io::read_json(path)
    }
}

/// Uniform integer in `0..bound` by rejection, `bound > 0`.
fn bounded(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

/// Fisher-Yates shuffle (high index down).
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = bounded(&mut rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

fn check_fraction(valid_fraction: f64) -> Result<()> {
    if !(0.0..1.0).contains(&valid_fraction) {
        return Err(Error::invalid(format!(
            "valid fraction {valid_fraction} outside [0, 1)"
        )));
    }
    Ok(())
}

/// Splits an already shuffled pool into train/valid, validation taking the
/// first `round(len * valid_fraction)` keys.
fn train_valid(pool: Vec<RecordKey>, valid_fraction: f64) -> (Vec<RecordKey>, Vec<RecordKey>) {
    let n_valid = (pool.len() as f64 * valid_fraction).round() as usize;
    let mut valid = pool;
    let train = valid.split_off(n_valid);
    (train, valid)
}

fn check_unique(records: &[RecordKey]) -> Result<()> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(r) {
            return Err(Error::Duplicate(format!("record {r}")));
        }
    }
    Ok(())
}

/// Shuffles the records and cuts them into `k` contiguous test folds whose
/// sizes differ by at most one (earlier folds take the remainder). The rest of
/// each fold, in shuffled order, is split into validation and training.
pub fn kfold_shuffled(records: &[RecordKey], k: usize, seed: u64, valid_fraction: f64) -> Result<SplitPlan> {
    if k < 2 || records.len() < k {
        return Err(Error::invalid(format!(
            "k must satisfy 2 <= k <= {} records, got {k}",
            records.len()
        )));
    }
    check_fraction(valid_fraction)?;
    check_unique(records)?;
    let mut order = records.to_vec();
    shuffle(&mut order, seed);

    let (base, extra) = (order.len() / k, order.len() % k);
    let mut bounds = Vec::with_capacity(k + 1);
    bounds.push(0);
    for f in 0..k {
        bounds.push(bounds[f] + base + usize::from(f < extra));
    }
    let folds = (0..k)
        .map(|f| {
            let (lo, hi) = (bounds[f], bounds[f + 1]);
            let test = order[lo..hi].to_vec();
            let pool: Vec<RecordKey> = order[..lo].iter().chain(&order[hi..]).cloned().collect();
            let (train, valid) = train_valid(pool, valid_fraction);
            Fold { train, valid, test }
        })
        .collect();
    Ok(SplitPlan {
        protocol: Protocol::AllShuffledKfold,
        seed,
        valid_fraction,
        held_out: None,
        folds,
    })
}

/// `repeats` k-fold plans seeded `base_seed, base_seed + 1, ...`.
pub fn repeated_kfold(
    records: &[RecordKey],
    k: usize,
    repeats: usize,
    base_seed: u64,
    valid_fraction: f64,
) -> Result<Vec<SplitPlan>> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    (0..repeats as u64)
        .map(|r| kfold_shuffled(records, k, base_seed.wrapping_add(r), valid_fraction))
        .collect()
}

/// Tests on every record of `held_system`; the remaining records are shuffled
/// into train/valid.
pub fn holdout_system(
    records: &[RecordKey],
    corpus: &Corpus,
    held_system: &str,
    seed: u64,
    valid_fraction: f64,
) -> Result<SplitPlan> {
    if corpus.system_kind(held_system).is_none() {
        return Err(Error::UnknownSystem(held_system.to_string()));
    }
    check_fraction(valid_fraction)?;
    check_unique(records)?;
    let (test, mut pool): (Vec<RecordKey>, Vec<RecordKey>) =
        records.iter().cloned().partition(|r| r.system_id == held_system);
    if test.is_empty() {
        return Err(Error::EmptySelection(format!("no records of system {held_system}")));
    }
    shuffle(&mut pool, seed);
    let (train, valid) = train_valid(pool, valid_fraction);
    Ok(SplitPlan {
        protocol: Protocol::HoldoutSystem,
        seed,
        valid_fraction,
        held_out: Some(vec![held_system.to_string()]),
        folds: vec![Fold { train, valid, test }],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum DocumentSelection {
    /// `round(fraction * n_episodes)` episodes drawn with the plan seed.
    Fraction(f64),
    Episodes(BTreeSet<String>),
}

/// Tests on every record of the held-out episodes.
pub fn holdout_document(
    records: &[RecordKey],
    corpus: &Corpus,
    selection: &DocumentSelection,
    seed: u64,
    valid_fraction: f64,
) -> Result<SplitPlan> {
    check_fraction(valid_fraction)?;
    check_unique(records)?;
    let all_episodes = corpus.episode_ids();
    let held: BTreeSet<String> = match selection {
        DocumentSelection::Episodes(set) => {
            if let Some(unknown) = set.iter().find(|e| corpus.episode(e).is_none()) {
                return Err(Error::invalid(format!("unknown episode {unknown}")));
            }
            set.clone()
        }
        DocumentSelection::Fraction(f) => {
            if !(0.0..=1.0).contains(f) {
                return Err(Error::invalid(format!("fraction {f} outside [0, 1]")));
            }
            let n = (all_episodes.len() as f64 * f).round() as usize;
            let mut order = all_episodes.clone();
            shuffle(&mut order, seed);
            order.into_iter().take(n).collect()
        }
    };
    if held.is_empty() || held.len() >= all_episodes.len() {
        return Err(Error::invalid(format!(
            "held-out episodes must be a non-empty proper subset, got {} of {}",
            held.len(),
            all_episodes.len()
        )));
    }
    let (test, mut pool): (Vec<RecordKey>, Vec<RecordKey>) =
        records.iter().cloned().partition(|r| held.contains(&r.episode_id));
    // The pool is shuffled with a derived seed so it does not replay the
    // episode draw above.
    shuffle(&mut pool, seed ^ 0x9e37_79b9_7f4a_7c15);
    let (train, valid) = train_valid(pool, valid_fraction);
    Ok(SplitPlan {
        protocol: Protocol::HoldoutDocument,
        seed,
        valid_fraction,
        held_out: Some(held.into_iter().collect()),
        folds: vec![Fold { train, valid, test }],
    })
}
