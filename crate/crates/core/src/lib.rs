//! Support-verb (light verb) identification for nominalizations.
//!
//! The pipeline reads POS-tagged text, tallies which verbs govern which
//! nominalizations as direct objects, and ranks candidate support verbs for
//! a noun either by raw local counts or by counts weighted with each verb's
//! corpus-wide tendency to govern nominalizations. The weighting is the same
//! arithmetic as indirect standardization of mortality rates, which is
//! provided in [`standardization`].
//!
//! Rate and weight computations are generic over [`Scalar`]; use `f64` for
//! reporting and [`Exact`] when results must be compared exactly.

pub mod cooc;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod governance;
pub mod lemma;
pub mod lexicon;
pub mod models;
pub mod scalar;
pub mod standardization;

pub use cooc::{CoocBuilder, CoocMatrix};
pub use corpus::{parse_tagged_corpus, TaggedSentence, TaggedToken};
pub use error::{Error, Result};
pub use evaluation::{evaluate, significance, EvalReport, Outcome, TestCase};
pub use governance::{count_corpus, extract_governance, ExtractionConfig, GovernanceEvent};
pub use lemma::{lemmatize_noun, lemmatize_verb, LemmaRules};
pub use lexicon::{Lexicon, LexiconEntry, Provenance};
pub use models::{
    choice_ratio, global_weights, iterate_global, sv_basic, sv_global, GlobalWeights, Model,
    RankedCandidate, Ranking,
};
pub use scalar::Scalar;
pub use standardization::PopulationTable;

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type GlobalWeightsF64 = GlobalWeights<f64>;
pub type GlobalWeightsF32 = GlobalWeights<f32>;
pub type ExactGlobalWeights = GlobalWeights<Exact>;

pub type StandardizationF64 = standardization::Standardization<f64>;
pub type ExactStandardization = standardization::Standardization<Exact>;
