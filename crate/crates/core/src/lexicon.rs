//! Nominalization lexicon: nouns paired with their stem verbs.
//!
//! Candidates come from orthographic suffix rules applied against a verb
//! vocabulary, are accepted or rejected by a human decisions file, and are
//! merged with the builtin list of irregular pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUILTIN_LEXICON: &str = include_str!("../data/builtin_lexicon.tsv");
const BUILTIN_RULES: &str = include_str!("../data/nominal_rules.tsv");
const BUILTIN_VERBS: &str = include_str!("../data/verbs.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Builtin,
    Generated,
    Manual,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Builtin => "builtin",
            Provenance::Generated => "generated",
            Provenance::Manual => "manual",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "builtin" => Ok(Provenance::Builtin),
            "generated" => Ok(Provenance::Generated),
            "manual" => Ok(Provenance::Manual),
            other => Err(Error::InvalidArgument(format!(
                "unknown provenance {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexiconEntry {
    pub noun: String,
    pub stem_verb: String,
    pub provenance: Provenance,
}

impl LexiconEntry {
    pub fn new(noun: &str, stem_verb: &str, provenance: Provenance) -> Self {
        LexiconEntry {
            noun: noun.to_string(),
            stem_verb: stem_verb.to_string(),
            provenance,
        }
    }
}

/// Maps a noun ending to the verb endings it may derive from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixRule {
    noun_suffix: String,
    verb_replacements: Vec<String>,
}

impl SuffixRule {
    pub fn new<S: Into<String>>(
        noun_suffix: &str,
        replacements: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let verb_replacements: Vec<String> = replacements.into_iter().map(Into::into).collect();
        if noun_suffix.is_empty() {
            return Err(Error::InvalidArgument("empty noun suffix".into()));
        }
        if verb_replacements.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "rule -{noun_suffix} has no replacements"
            )));
        }
        Ok(SuffixRule {
            noun_suffix: noun_suffix.to_string(),
            verb_replacements,
        })
    }

    pub fn noun_suffix(&self) -> &str {
        &self.noun_suffix
    }

    pub fn verb_replacements(&self) -> &[String] {
        &self.verb_replacements
    }

    /// Candidate verbs for `noun`, in replacement order. Empty if the suffix
    /// does not match or would consume the whole noun.
    pub fn candidates(&self, noun: &str) -> Vec<String> {
        match noun.strip_suffix(self.noun_suffix.as_str()) {
            Some(stem) if !stem.is_empty() => self
                .verb_replacements
                .iter()
                .map(|r| format!("{stem}{r}"))
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// Reads `suffix<TAB>repl|repl|...` lines.
pub fn parse_rules<R: BufRead>(input: R) -> Result<Vec<SuffixRule>> {
    let mut rules = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((suffix, replacements)) = line.split_once('\t') else {
            return Err(Error::parse(line_no, "expected suffix<TAB>replacements"));
        };
        let rule = SuffixRule::new(suffix, replacements.split('|'))
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        rules.push(rule);
    }
    Ok(rules)
}

pub fn default_rules() -> &'static [SuffixRule] {
    static RULES: OnceLock<Vec<SuffixRule>> = OnceLock::new();
    RULES.get_or_init(|| parse_rules(BUILTIN_RULES.as_bytes()).expect("builtin rules are valid"))
}

/// The shipped base-form verb vocabulary.
pub fn default_verbs() -> BTreeSet<String> {
    read_word_list(BUILTIN_VERBS.as_bytes()).expect("builtin verb list is valid")
}

/// One word per line (first tab-separated field); `#` comments and blank
/// lines are skipped.
pub fn read_word_list<R: BufRead>(input: R) -> Result<BTreeSet<String>> {
    let mut words = BTreeSet::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let word = line.split('\t').next().unwrap_or(line).trim();
        words.insert(word.to_lowercase());
    }
    Ok(words)
}

/// Pairs each noun with every verb in `verbs` that a rule (or zero
/// derivation) produces from it. Output is ordered by noun, then by the
/// order candidates were produced; duplicates are dropped.
pub fn generate_candidates(
    nouns: &BTreeSet<String>,
    verbs: &BTreeSet<String>,
    rules: &[SuffixRule],
) -> Vec<LexiconEntry> {
    let mut out = Vec::new();
    for noun in nouns {
        let mut seen = BTreeSet::new();
        let zero = std::iter::once(noun.clone());
        let derived = rules.iter().flat_map(|rule| rule.candidates(noun));
        for verb in zero.chain(derived) {
            if verbs.contains(&verb) && seen.insert(verb.clone()) {
                out.push(LexiconEntry::new(noun, &verb, Provenance::Generated));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// Keep the noun's candidates, or only the named stem verb if given.
    Accept(Option<String>),
    Reject,
}

/// Reads `noun<TAB>accept|reject[<TAB>stem_verb]` lines.
pub fn parse_decisions<R: BufRead>(input: R) -> Result<BTreeMap<String, Decision>> {
    let mut decisions = BTreeMap::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let decision = match fields[..] {
            [_, "accept"] => Decision::Accept(None),
            [_, "accept", stem] if !stem.is_empty() => Decision::Accept(Some(stem.to_string())),
            [_, "reject"] => Decision::Reject,
            _ => {
                return Err(Error::parse(
                    line_no,
                    "expected noun<TAB>accept|reject[<TAB>stem_verb]",
                ))
            }
        };
        if decisions.insert(fields[0].to_string(), decision).is_some() {
            return Err(Error::parse(
                line_no,
                format!("duplicate decision for {}", fields[0]),
            ));
        }
    }
    Ok(decisions)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilterOutcome {
    /// Accepted entries, marked as manual.
    pub accepted: Vec<LexiconEntry>,
    /// Candidates nobody has decided on yet.
    pub pending: Vec<LexiconEntry>,
    pub warnings: Vec<String>,
}

pub fn apply_manual_filter(
    candidates: &[LexiconEntry],
    decisions: &BTreeMap<String, Decision>,
) -> FilterOutcome {
    let mut outcome = FilterOutcome::default();
    let known: BTreeSet<&str> = candidates.iter().map(|c| c.noun.as_str()).collect();
    for noun in decisions.keys() {
        if !known.contains(noun.as_str()) {
            outcome
                .warnings
                .push(format!("decision for {noun:?} matches no candidate"));
        }
    }
    for candidate in candidates {
        match decisions.get(&candidate.noun) {
            None => outcome.pending.push(candidate.clone()),
            Some(Decision::Reject) => {}
            Some(Decision::Accept(stem)) => {
                if stem.as_ref().is_none_or(|s| *s == candidate.stem_verb) {
                    outcome.accepted.push(LexiconEntry {
                        provenance: Provenance::Manual,
                        ..candidate.clone()
                    });
                }
            }
        }
    }
    for (noun, decision) in decisions {
        if let Decision::Accept(Some(stem)) = decision {
            let matched = candidates
                .iter()
                .any(|c| &c.noun == noun && &c.stem_verb == stem);
            if known.contains(noun.as_str()) && !matched {
                outcome.warnings.push(format!(
                    "accepted stem {stem:?} is not a candidate for {noun:?}"
                ));
            }
        }
    }
    outcome
}

/// Noun → entry, unique by noun.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

impl Lexicon {
    pub fn builtin() -> &'static Lexicon {
        static LEXICON: OnceLock<Lexicon> = OnceLock::new();
        LEXICON.get_or_init(|| {
            Lexicon::load(BUILTIN_LEXICON.as_bytes()).expect("builtin lexicon is valid")
        })
    }

    pub fn get(&self, noun: &str) -> Option<&LexiconEntry> {
        self.entries.get(noun)
    }

    pub fn stem_verb(&self, noun: &str) -> Option<&str> {
        self.entries.get(noun).map(|e| e.stem_verb.as_str())
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn nouns(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn save<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write_entries(out, self.entries.values())
    }

    pub fn load<R: BufRead>(input: R) -> Result<Lexicon> {
        let mut entries = BTreeMap::new();
        for (line_no, entry) in read_entries(input)? {
            if entries.contains_key(&entry.noun) {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate noun {}", entry.noun),
                ));
            }
            entries.insert(entry.noun.clone(), entry);
        }
        Ok(Lexicon { entries })
    }
}

pub fn write_entries<'a, W, I>(out: &mut W, entries: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a LexiconEntry>,
{
    for e in entries {
        writeln!(out, "{}\t{}\t{}", e.noun, e.stem_verb, e.provenance)?;
    }
    Ok(())
}

/// Reads `noun<TAB>stem_verb<TAB>provenance` lines, keeping line numbers.
/// Duplicate nouns are allowed here (candidate lists have them).
pub fn read_entries<R: BufRead>(input: R) -> Result<Vec<(usize, LexiconEntry)>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [noun, stem, provenance] = fields[..] else {
            return Err(Error::parse(
                line_no,
                "expected noun<TAB>stem_verb<TAB>provenance",
            ));
        };
        if noun.is_empty() || stem.is_empty() {
            return Err(Error::parse(line_no, "empty noun or stem verb"));
        }
        let provenance = provenance
            .parse()
            .map_err(|e: Error| Error::parse(line_no, e.to_string()))?;
        out.push((line_no, LexiconEntry::new(noun, stem, provenance)));
    }
    Ok(out)
}

/// Combines the three sources with precedence manual > builtin > generated.
/// Two different stems for the same noun within the winning source is an
/// error.
pub fn merge_lexicons(
    builtin: &[LexiconEntry],
    generated: &[LexiconEntry],
    manual: &[LexiconEntry],
) -> Result<Lexicon> {
    let tiers = [
        (Provenance::Manual, manual),
        (Provenance::Builtin, builtin),
        (Provenance::Generated, generated),
    ];
    let mut entries: BTreeMap<String, LexiconEntry> = BTreeMap::new();
    let mut conflicts = Vec::new();
    for (provenance, tier) in tiers {
        let mut stems: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for e in tier {
            stems.entry(&e.noun).or_default().insert(&e.stem_verb);
        }
        for (noun, stems) in stems {
            if entries.contains_key(noun) {
                continue;
            }
            if stems.len() > 1 {
                let list: Vec<&str> = stems.into_iter().collect();
                conflicts.push(format!("{noun} ({provenance}): {}", list.join(", ")));
                continue;
            }
            let stem = stems.into_iter().next().expect("non-empty");
            entries.insert(noun.to_string(), LexiconEntry::new(noun, stem, provenance));
        }
    }
    if !conflicts.is_empty() {
        return Err(Error::LexiconConflict(conflicts));
    }
    Ok(Lexicon { entries })
}
