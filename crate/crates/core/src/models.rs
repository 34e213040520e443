//! Support-verb selection models.
//!
//! Let `m[i][j]` count verb `i` governing nominalization `j`. The true number
//! of light uses `f[i][j] = p[i][j] * m[i][j]` is unobservable because the
//! conditional probability `p[i][j]` that verb `i` is light for noun `j` is
//! unknown. Two approximations are implemented:
//!
//! * **basic**: take `p[i][j] = 1`, so the best candidate is `argmax_i m[i][j]`.
//! * **global**: replace `p[i][j]` by the unconditional probability `p'[i]`,
//!   estimated by pretending every governing occurrence in the corpus is
//!   light: `p'[i] = sum_j m[i][j] / sum_ij m[i][j]`. The score
//!   `m[i][j] * p'[i]` is the expected light count, which is the same
//!   computation as expected deaths under indirect standardization. Since the
//!   denominator is shared by all candidates, rankings use the exact integer
//!   `m[i][j] * sum_j m[i][j]`.
//!
//! Ties are broken by raw count (descending) and then by verb (ascending).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cooc::CoocMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Basic,
    Global,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Basic => "basic",
            Model::Global => "global",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Model::Basic),
            "global" => Ok(Model::Global),
            other => Err(Error::InvalidArgument(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedCandidate {
    pub verb: String,
    pub raw_count: u64,
    /// `m_ij` for the basic model, `m_ij * weight_i` for the global one.
    pub score: u128,
}

/// Candidate support verbs for one noun, best first. An empty candidate list
/// means there is no data for the noun.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    pub noun: String,
    pub model: Model,
    candidates: Vec<RankedCandidate>,
}

fn candidate_order(a: &RankedCandidate, b: &RankedCandidate) -> Ordering {
    b.score
        .cmp(&a.score)
        .then_with(|| b.raw_count.cmp(&a.raw_count))
        .then_with(|| a.verb.cmp(&b.verb))
}

impl Ranking {
    fn new(noun: &str, model: Model, mut candidates: Vec<RankedCandidate>) -> Self {
        candidates.sort_by(candidate_order);
        Ranking {
            noun: noun.to_string(),
            model,
            candidates,
        }
    }

    pub fn candidates(&self) -> &[RankedCandidate] {
        &self.candidates
    }

    pub fn is_no_data(&self) -> bool {
        self.candidates.is_empty()
    }

    /// First choice (C1).
    pub fn first(&self) -> Option<&RankedCandidate> {
        self.candidates.first()
    }

    /// Second choice (C2).
    pub fn second(&self) -> Option<&RankedCandidate> {
        self.candidates.get(1)
    }

    pub fn verbs(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.verb.as_str()).collect()
    }

    pub fn score_sum(&self) -> u128 {
        self.candidates.iter().map(|c| c.score).sum()
    }
}

/// Unconditional light-verb probabilities `p'`, stored as integer numerators
/// over a shared denominator together with their scalar values.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalWeights<T> {
    weights: BTreeMap<String, T>,
    counts: BTreeMap<String, u64>,
    total_count: u64,
}

impl<T: Scalar> GlobalWeights<T> {
    fn from_counts(counts: BTreeMap<String, u64>, total_count: u64) -> Result<Self> {
        if total_count == 0 {
            return Err(Error::EmptyMatrix);
        }
        let weights = counts
            .iter()
            .map(|(v, &c)| (v.clone(), T::ratio(c.into(), total_count.into())))
            .collect();
        Ok(GlobalWeights {
            weights,
            counts,
            total_count,
        })
    }

    pub fn p_prime(&self, verb: &str) -> Option<&T> {
        self.weights.get(verb)
    }

    pub fn weights(&self) -> &BTreeMap<String, T> {
        &self.weights
    }

    /// Numerator of `p'` for each verb.
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn sum(&self) -> T {
        self.weights
            .values()
            .fold(T::zero(), |acc, w| acc + w.clone())
    }

    fn numerator(&self, verb: &str) -> u64 {
        self.counts.get(verb).copied().unwrap_or(0)
    }

    /// Same weights in another scalar type.
    pub fn convert<U: Scalar>(&self) -> GlobalWeights<U> {
        GlobalWeights::from_counts(self.counts.clone(), self.total_count).expect("total is nonzero")
    }
}

pub fn global_weights<T: Scalar>(m: &CoocMatrix) -> Result<GlobalWeights<T>> {
    GlobalWeights::from_counts(m.row_sums().clone(), m.total())
}

pub fn sv_basic(m: &CoocMatrix, noun: &str) -> Ranking {
    let candidates = m
        .column_ref(noun)
        .into_iter()
        .flatten()
        .map(|(verb, &count)| RankedCandidate {
            verb: verb.clone(),
            raw_count: count,
            score: count.into(),
        })
        .collect();
    Ranking::new(noun, Model::Basic, candidates)
}

pub fn sv_global(m: &CoocMatrix, noun: &str) -> Ranking {
    let candidates = m
        .column_ref(noun)
        .into_iter()
        .flatten()
        .map(|(verb, &count)| RankedCandidate {
            verb: verb.clone(),
            raw_count: count,
            score: u128::from(count) * u128::from(m.row_sum(verb)),
        })
        .collect();
    Ranking::new(noun, Model::Global, candidates)
}

/// Global-model ranking under arbitrary weights, e.g. from
/// [`iterate_global`]. Verbs without a weight score zero.
pub fn sv_weighted<T: Scalar>(m: &CoocMatrix, noun: &str, weights: &GlobalWeights<T>) -> Ranking {
    let candidates = m
        .column_ref(noun)
        .into_iter()
        .flatten()
        .map(|(verb, &count)| RankedCandidate {
            verb: verb.clone(),
            raw_count: count,
            score: u128::from(count) * u128::from(weights.numerator(verb)),
        })
        .collect();
    Ranking::new(noun, Model::Global, candidates)
}

pub fn rank(m: &CoocMatrix, noun: &str, model: Model) -> Ranking {
    match model {
        Model::Basic => sv_basic(m, noun),
        Model::Global => sv_global(m, noun),
    }
}

/// `score(C1) / score(C2)`; `None` with fewer than two candidates or a zero
/// second score.
pub fn choice_ratio<T: Scalar>(r: &Ranking) -> Option<T> {
    let (first, second) = (r.first()?, r.second()?);
    if second.score == 0 {
        return None;
    }
    Some(T::ratio(first.score, second.score))
}

/// Re-estimates the global weights from the model's own choices.
///
/// Starting from [`global_weights`], each round picks the best verb for every
/// noun under the current weights and recomputes `p'` from those chosen cells
/// alone; counts of verbs that were not chosen for a noun are dropped from
/// both numerator and denominator.
pub fn iterate_global<T: Scalar>(m: &CoocMatrix, rounds: usize) -> Result<GlobalWeights<T>> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let mut current: GlobalWeights<T> = global_weights(m)?;
    for _ in 0..rounds {
        let mut counts: BTreeMap<String, u64> = m.verbs().map(|v| (v.to_string(), 0)).collect();
        let mut total = 0u64;
        for noun in m.nouns() {
            if let Some(chosen) = sv_weighted(m, noun, &current).first() {
                *counts.get_mut(&chosen.verb).expect("verb has a row") += chosen.raw_count;
                total += chosen.raw_count;
            }
        }
        if total == 0 {
            return Err(Error::EmptyMatrix);
        }
        current = GlobalWeights::from_counts(counts, total)?;
    }
    Ok(current)
}
