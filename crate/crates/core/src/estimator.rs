//! Leave-one-out majority-vote home-location estimation.
//!
//! A user's label is predicted as the most frequent label among their
//! labelled mutual friends; ties go to the lexicographically smallest label.
//! The graph has no self-loops, so a user's own label never takes part in
//! their vote and hiding it needs no mutation of shared state.

use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SocialGraph, UserId};
use crate::text;

const NO_LABEL: u32 = u32::MAX;

/// Location label per user. Labels are interned into codes whose order
/// matches the lexicographic order of the label strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelMap {
    ids: Vec<UserId>,
    codes: Vec<u32>,
    vocab: Vec<String>,
}

impl LabelMap {
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (UserId, S)>,
        S: Into<String>,
    {
        let mut rows: Vec<(UserId, String)> = pairs.into_iter().map(|(u, s)| (u, s.into())).collect();
        for (u, label) in &rows {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::Validation(format!(
                    "label {label:?} of user {u} must be a non-empty token without whitespace"
                )));
            }
        }
        rows.sort_by_key(|r| r.0);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation(format!("duplicate label for user {}", w[0].0)));
        }
        let mut vocab: Vec<String> = rows.iter().map(|r| r.1.clone()).collect();
        vocab.sort_unstable();
        vocab.dedup();
        if vocab.len() >= NO_LABEL as usize {
            return Err(Error::InvalidArgument("too many distinct labels".into()));
        }
        let codes = rows
            .iter()
            .map(|r| vocab.binary_search(&r.1).unwrap() as u32)
            .collect();
        let ids = rows.into_iter().map(|r| r.0).collect();
        Ok(LabelMap { ids, codes, vocab })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Labelled users, ascending.
    pub fn users(&self) -> &[UserId] {
        &self.ids
    }

    /// Distinct labels, ascending.
    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    pub fn get(&self, u: UserId) -> Option<&str> {
        self.code(u).map(|c| self.vocab[c as usize].as_str())
    }

    fn code(&self, u: UserId) -> Option<u32> {
        self.ids.binary_search(&u).ok().map(|i| self.codes[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (UserId, &str)> {
        self.ids
            .iter()
            .zip(&self.codes)
            .map(|(&u, &c)| (u, self.vocab[c as usize].as_str()))
    }

    /// Label codes indexed by the graph's dense user index.
    fn align(&self, g: &SocialGraph) -> Result<Vec<u32>> {
        let mut aligned = vec![NO_LABEL; g.len()];
        for (&u, &c) in self.ids.iter().zip(&self.codes) {
            let i = g
                .index_of(u)
                .ok_or_else(|| Error::Validation(format!("labelled user {u} is not in the graph")))?;
            aligned[i] = c;
        }
        Ok(aligned)
    }

    /// Writes `id \t label` lines, ascending by id.
    pub fn write<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for (u, label) in self.iter() {
            writeln!(w, "{u}\t{label}")?;
        }
        w.flush()
    }
}

/// Reads `id \t label` lines.
pub fn load_labels<R: BufRead>(reader: R) -> Result<LabelMap> {
    let mut rows = Vec::new();
    text::for_each_record(reader, |line, fields| {
        if fields.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected user id and label, found {} fields", fields.len()),
            ));
        }
        let id = text::parse_u64(line, fields[0], "user id")?;
        rows.push((UserId(id), fields[1].to_owned()));
        Ok(())
    })?;
    LabelMap::from_pairs(rows)
}

/// Majority label among `neighbors`; smallest code wins a tie.
fn vote(neighbors: &[u32], labels: &[u32], buf: &mut Vec<u32>) -> Option<u32> {
    buf.clear();
    buf.extend(
        neighbors
            .iter()
            .map(|&j| labels[j as usize])
            .filter(|&c| c != NO_LABEL),
    );
    majority(buf)
}

fn majority(codes: &mut [u32]) -> Option<u32> {
    codes.sort_unstable();
    let mut best: Option<(u32, usize)> = None;
    for run in codes.chunk_by(|a, b| a == b) {
        // strict comparison keeps the earlier, smaller code on ties
        if best.is_none_or(|(_, n)| run.len() > n) {
            best = Some((run[0], run.len()));
        }
    }
    best.map(|(c, _)| c)
}

/// Estimated label of `u` from its neighbours' labels, with `u`'s own label
/// hidden. `None` when no neighbour is labelled.
pub fn infer_one(g: &SocialGraph, labels: &LabelMap, u: UserId) -> Result<Option<String>> {
    let i = g
        .index_of(u)
        .ok_or_else(|| Error::NotFound(format!("user {u}")))?;
    let mut codes: Vec<u32> = g
        .neighbor_indices(i)
        .iter()
        .filter_map(|&j| labels.code(g.user(j as usize)))
        .collect();
    Ok(majority(&mut codes).map(|c| labels.vocab[c as usize].clone()))
}

/// Accuracy and coverage of a set of estimation targets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub n_correct: u64,
    /// Targets with at least one labelled neighbour.
    pub n_estimable: u64,
    /// Size of the whole user set, the coverage denominator.
    pub n_universe: u64,
    /// `n_correct / n_estimable`; absent when nothing is estimable.
    pub accuracy: Option<f64>,
    /// `n_estimable / n_universe`.
    pub coverage: f64,
}

impl EvalResult {
    pub fn from_counts(n_correct: u64, n_estimable: u64, n_universe: u64) -> Self {
        debug_assert!(n_correct <= n_estimable && n_estimable <= n_universe);
        EvalResult {
            n_correct,
            n_estimable,
            n_universe,
            accuracy: (n_estimable > 0).then(|| n_correct as f64 / n_estimable as f64),
            coverage: if n_universe == 0 {
                0.0
            } else {
                n_estimable as f64 / n_universe as f64
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The user has no true label and cannot be scored.
    Unlabeled,
    NotEstimable,
    Correct,
    Incorrect,
}

impl Outcome {
    fn counts(self) -> (u64, u64) {
        match self {
            Outcome::Correct => (1, 1),
            Outcome::Incorrect => (0, 1),
            Outcome::NotEstimable | Outcome::Unlabeled => (0, 0),
        }
    }
}

fn add(a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
    (a.0 + b.0, a.1 + b.1)
}

fn outcome(truth: u32, predicted: Option<u32>) -> Outcome {
    match (truth, predicted) {
        (NO_LABEL, _) => Outcome::Unlabeled,
        (_, None) => Outcome::NotEstimable,
        (t, Some(p)) if t == p => Outcome::Correct,
        _ => Outcome::Incorrect,
    }
}

/// Leave-one-out evaluation of `targets`. The coverage denominator is the
/// whole user set of `g`, whatever the target set.
pub fn evaluate(g: &SocialGraph, labels: &LabelMap, targets: &[UserId]) -> Result<EvalResult> {
    let aligned = labels.align(g)?;
    let mut idx = Vec::with_capacity(targets.len());
    for &u in targets {
        let i = g
            .index_of(u)
            .ok_or_else(|| Error::NotFound(format!("target user {u} is not in the graph")))?;
        if aligned[i] == NO_LABEL {
            return Err(Error::Validation(format!("target user {u} has no true label")));
        }
        idx.push(i);
    }
    idx.sort_unstable();
    idx.dedup();
    let (correct, estimable) = idx
        .par_iter()
        .map_init(Vec::new, |buf, &i| {
            let predicted = vote(g.neighbor_indices(i), &aligned, buf);
            outcome(aligned[i], predicted).counts()
        })
        .reduce(|| (0, 0), add);
    Ok(EvalResult::from_counts(correct, estimable, g.len() as u64))
}

/// Per-user leave-one-out predictions computed once for the whole graph.
///
/// Prediction for a user depends only on the graph and the other users'
/// labels, never on which users are targets, so any number of target sets
/// can be scored from one pass.
#[derive(Clone, Debug)]
pub struct Evaluator {
    users: Vec<UserId>,
    truth: Vec<u32>,
    predicted: Vec<u32>,
    vocab: Vec<String>,
}

impl Evaluator {
    pub fn new(g: &SocialGraph, labels: &LabelMap) -> Result<Self> {
        let truth = labels.align(g)?;
        let predicted = (0..g.len())
            .into_par_iter()
            .map_init(Vec::new, |buf, i| {
                vote(g.neighbor_indices(i), &truth, buf).unwrap_or(NO_LABEL)
            })
            .collect();
        Ok(Evaluator {
            users: g.users().to_vec(),
            truth,
            predicted,
            vocab: labels.vocab.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn outcome(&self, index: usize) -> Outcome {
        let p = self.predicted[index];
        outcome(self.truth[index], (p != NO_LABEL).then_some(p))
    }

    pub fn prediction(&self, u: UserId) -> Option<&str> {
        let i = self.users.binary_search(&u).ok()?;
        let p = self.predicted[i];
        (p != NO_LABEL).then(|| self.vocab[p as usize].as_str())
    }

    /// True when every user carries a label.
    pub fn fully_labeled(&self) -> bool {
        self.truth.iter().all(|&t| t != NO_LABEL)
    }

    /// Scores the users whose dense index satisfies `keep`; unlabelled users
    /// are skipped.
    pub fn evaluate_where<F>(&self, keep: F) -> EvalResult
    where
        F: Fn(usize) -> bool + Sync,
    {
        let (correct, estimable) = (0..self.len())
            .into_par_iter()
            .filter(|&i| keep(i))
            .map(|i| self.outcome(i).counts())
            .reduce(|| (0, 0), add);
        EvalResult::from_counts(correct, estimable, self.len() as u64)
    }

    /// Scores every labelled user.
    pub fn evaluate_all(&self) -> EvalResult {
        self.evaluate_where(|_| true)
    }
}
