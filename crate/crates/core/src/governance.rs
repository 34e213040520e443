//! Shallow direct-object detection over tag sequences.
//!
//! For every verb token the extractor skips an optional particle and reads a
//! noun-phrase window of determiners, possessives, adjectives, numbers and
//! nouns. The object head is the final noun of that window, provided the
//! window ends at a non-NP token (or the end of the sentence). A window that
//! is still inside an NP when `max_np_span` runs out yields nothing.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::cooc::{CoocBuilder, CoocMatrix};
use crate::corpus::{TaggedSentence, TaggedToken};
use crate::error::{Error, Result};
use crate::lemma::LemmaRules;

const NP_TAGS: [&str; 11] = [
    "DT", "PDT", "PRP$", "JJ", "JJR", "JJS", "CD", "NN", "NNS", "NNP", "NNPS",
];

pub const DEFAULT_NP_SPAN: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GovernanceEvent {
    pub verb_lemma: String,
    pub noun_lemma: String,
    pub source_id: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionConfig {
    noun_filter: Option<BTreeSet<String>>,
    max_np_span: usize,
    exclude_passive: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            noun_filter: None,
            max_np_span: DEFAULT_NP_SPAN,
            exclude_passive: true,
        }
    }
}

impl ExtractionConfig {
    pub fn new(
        noun_filter: Option<BTreeSet<String>>,
        max_np_span: usize,
        exclude_passive: bool,
    ) -> Result<Self> {
        if max_np_span == 0 {
            return Err(Error::Config("max_np_span must be at least 1".into()));
        }
        Ok(ExtractionConfig {
            noun_filter,
            max_np_span,
            exclude_passive,
        })
    }

    pub fn with_noun_filter(mut self, nouns: impl IntoIterator<Item = String>) -> Self {
        self.noun_filter = Some(nouns.into_iter().collect());
        self
    }

    pub fn with_np_span(self, max_np_span: usize) -> Result<Self> {
        ExtractionConfig::new(self.noun_filter, max_np_span, self.exclude_passive)
    }

    pub fn with_passive(mut self, include_passive: bool) -> Self {
        self.exclude_passive = !include_passive;
        self
    }

    pub fn noun_filter(&self) -> Option<&BTreeSet<String>> {
        self.noun_filter.as_ref()
    }

    pub fn max_np_span(&self) -> usize {
        self.max_np_span
    }

    pub fn exclude_passive(&self) -> bool {
        self.exclude_passive
    }

    /// Human-readable one-line summary used in counts-file headers.
    pub fn describe(&self) -> String {
        let nouns = match &self.noun_filter {
            None => "all".to_string(),
            Some(set) => set.len().to_string(),
        };
        format!(
            "np_span={} exclude_passive={} nouns={}",
            self.max_np_span, self.exclude_passive, nouns
        )
    }

    /// SHA-256 over the canonical form of the config, first 16 hex digits.
    pub fn fingerprint(&self) -> String {
        let mut canonical = format!(
            "np_span={}\nexclude_passive={}\nnouns=",
            self.max_np_span, self.exclude_passive
        );
        match &self.noun_filter {
            None => canonical.push('*'),
            Some(set) => canonical.push_str(&set.iter().cloned().collect::<Vec<_>>().join(",")),
        }
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn is_np_tag(tag: &str) -> bool {
    NP_TAGS.contains(&tag)
}

fn is_passive_participle(rules: &LemmaRules, tokens: &[TaggedToken], idx: usize) -> Result<bool> {
    if tokens[idx].pos() != "VBN" {
        return Ok(false);
    }
    match tokens[..idx].iter().rev().find(|t| t.is_verb()) {
        Some(aux) => Ok(rules.lemmatize_verb(aux.surface(), aux.pos())? == "be"),
        None => Ok(false),
    }
}

/// Index of the object head following the verb at `verb_idx`, if any.
fn object_head(tokens: &[TaggedToken], verb_idx: usize, max_span: usize) -> Option<usize> {
    let mut pos = verb_idx + 1;
    if tokens.get(pos).is_some_and(|t| t.pos() == "RP") {
        pos += 1;
    }
    let start = pos;
    while pos < tokens.len() && pos - start < max_span && is_np_tag(tokens[pos].pos()) {
        pos += 1;
    }
    if pos == start {
        return None;
    }
    if pos < tokens.len() && pos - start == max_span && is_np_tag(tokens[pos].pos()) {
        return None;
    }
    let last = pos - 1;
    tokens[last].is_noun().then_some(last)
}

pub fn extract_governance(
    sentence: &TaggedSentence,
    config: &ExtractionConfig,
) -> Result<Vec<GovernanceEvent>> {
    extract_governance_with(LemmaRules::builtin(), sentence, config)
}

pub fn extract_governance_with(
    rules: &LemmaRules,
    sentence: &TaggedSentence,
    config: &ExtractionConfig,
) -> Result<Vec<GovernanceEvent>> {
    let tokens = sentence.tokens();
    let mut events = Vec::new();
    for (idx, token) in tokens.iter().enumerate() {
        if !token.is_verb() {
            continue;
        }
        if config.exclude_passive && is_passive_participle(rules, tokens, idx)? {
            continue;
        }
        let Some(head_idx) = object_head(tokens, idx, config.max_np_span) else {
            continue;
        };
        let head = &tokens[head_idx];
        let noun_lemma = rules.lemmatize_noun(head.surface(), head.pos())?;
        if let Some(filter) = &config.noun_filter {
            if !filter.contains(&noun_lemma) {
                continue;
            }
        }
        events.push(GovernanceEvent {
            verb_lemma: rules.lemmatize_verb(token.surface(), token.pos())?,
            noun_lemma,
            source_id: sentence.source_id().to_string(),
        });
    }
    Ok(events)
}

/// Provenance lines for a counts file built from `corpora` (file names)
/// under `config`; `lemma_rules` names the rule tables used.
pub fn counts_provenance(
    corpora: &[String],
    lemma_rules: &str,
    config: &ExtractionConfig,
) -> Vec<String> {
    vec![
        format!("corpus: {}", corpora.join(" ")),
        format!("lemma-rules: {lemma_rules}"),
        format!(
            "config: {} sha256={}",
            config.describe(),
            config.fingerprint()
        ),
    ]
}

pub fn count_corpus(sentences: &[TaggedSentence], config: &ExtractionConfig) -> Result<CoocMatrix> {
    count_corpus_with(LemmaRules::builtin(), sentences, config)
}

/// Tallies governance events over a corpus. Sentences are processed in
/// parallel and the partial matrices merged.
pub fn count_corpus_with(
    rules: &LemmaRules,
    sentences: &[TaggedSentence],
    config: &ExtractionConfig,
) -> Result<CoocMatrix> {
    sentences
        .par_iter()
        .try_fold(CoocBuilder::new, |mut builder, sentence| {
            for event in extract_governance_with(rules, sentence, config)? {
                builder.add(&event.verb_lemma, &event.noun_lemma, 1)?;
            }
            Ok::<_, Error>(builder)
        })
        .map(|builder| builder.map(CoocBuilder::build))
        .try_reduce(CoocMatrix::empty, |a, b| a.merge(&b))
}
