//! Rule-table lemmatization for verbs and nouns.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::sync::OnceLock;

use crate::corpus::{is_noun_tag, is_verb_tag};
use crate::error::{Error, Result};

const BUILTIN_RULES: &str = include_str!("../data/lemma_rules.tsv");

/// Shortest stem a suffix rule may leave behind before its replacement.
const MIN_STEM: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixRule {
    pub tags: Vec<String>,
    pub suffix: String,
    pub replacement: String,
}

impl SuffixRule {
    fn applies(&self, tag: &str, word: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
            && word.len() >= self.suffix.len() + MIN_STEM
            && word.ends_with(&self.suffix)
    }

    fn apply(&self, word: &str) -> String {
        let mut lemma = word[..word.len() - self.suffix.len()].to_string();
        lemma.push_str(&self.replacement);
        lemma
    }
}

/// Exception tables plus ordered suffix rules.
///
/// Base-form tags (`VB`, `NN`, `NNP`) are returned lowercased and otherwise
/// untouched. `VBP` consults the exception table only for surfaces that are
/// not themselves known verb lemmas, so `are` maps to `be` but `lay` stays.
#[derive(Clone, Debug, Default)]
pub struct LemmaRules {
    verb_exceptions: HashMap<String, String>,
    noun_exceptions: HashMap<String, String>,
    suffix_rules: Vec<SuffixRule>,
    verb_lemmas: HashSet<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    VerbExceptions,
    NounExceptions,
    SuffixRules,
}

impl LemmaRules {
    /// Tables shipped with the crate.
    pub fn builtin() -> &'static LemmaRules {
        static RULES: OnceLock<LemmaRules> = OnceLock::new();
        RULES.get_or_init(|| {
            LemmaRules::parse(BUILTIN_RULES.as_bytes()).expect("builtin lemma rules are valid")
        })
    }

    pub fn new(
        verb_exceptions: HashMap<String, String>,
        noun_exceptions: HashMap<String, String>,
        suffix_rules: Vec<SuffixRule>,
    ) -> Self {
        let verb_lemmas = verb_exceptions.values().cloned().collect();
        LemmaRules {
            verb_exceptions,
            noun_exceptions,
            suffix_rules,
            verb_lemmas,
        }
    }

    /// Reads the sectioned TSV format (`[verb-exceptions]`,
    /// `[noun-exceptions]`, `[suffix-rules]`).
    pub fn parse<R: BufRead>(input: R) -> Result<Self> {
        let mut verbs = HashMap::new();
        let mut nouns = HashMap::new();
        let mut rules = Vec::new();
        let mut section = Section::None;
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                section = match line.trim() {
                    "[verb-exceptions]" => Section::VerbExceptions,
                    "[noun-exceptions]" => Section::NounExceptions,
                    "[suffix-rules]" => Section::SuffixRules,
                    other => return Err(Error::parse(line_no, format!("unknown section {other}"))),
                };
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match section {
                Section::None => {
                    return Err(Error::parse(line_no, "entry before any section header"))
                }
                Section::VerbExceptions | Section::NounExceptions => {
                    let [surface, lemma] = fields[..] else {
                        return Err(Error::parse(line_no, "expected surface<TAB>lemma"));
                    };
                    if surface.is_empty() || lemma.is_empty() {
                        return Err(Error::parse(line_no, "empty exception field"));
                    }
                    let table = if section == Section::VerbExceptions {
                        &mut verbs
                    } else {
                        &mut nouns
                    };
                    let previous = table.insert(surface.to_lowercase(), lemma.to_lowercase());
                    if previous.is_some() {
                        return Err(Error::parse(
                            line_no,
                            format!("duplicate exception {surface}"),
                        ));
                    }
                }
                Section::SuffixRules => {
                    let [tags, suffix, replacement] = fields[..] else {
                        return Err(Error::parse(
                            line_no,
                            "expected tags<TAB>suffix<TAB>replacement",
                        ));
                    };
                    if suffix.is_empty() {
                        return Err(Error::parse(line_no, "empty suffix"));
                    }
                    let tags: Vec<String> = tags.split(',').map(|t| t.trim().to_string()).collect();
                    if tags.iter().any(|t| !is_verb_tag(t) && !is_noun_tag(t)) {
                        return Err(Error::parse(
                            line_no,
                            "suffix rule tags must be verb or noun tags",
                        ));
                    }
                    rules.push(SuffixRule {
                        tags,
                        suffix: suffix.to_string(),
                        replacement: replacement.to_string(),
                    });
                }
            }
        }
        Ok(LemmaRules::new(verbs, nouns, rules))
    }

    fn by_suffix(&self, tag: &str, word: &str) -> Option<String> {
        self.suffix_rules
            .iter()
            .find(|rule| rule.applies(tag, word))
            .map(|rule| rule.apply(word))
    }

    pub fn lemmatize_verb(&self, surface: &str, pos: &str) -> Result<String> {
        if !is_verb_tag(pos) {
            return Err(Error::WrongTag {
                tag: pos.to_string(),
                expected: "verb",
            });
        }
        let word = surface.to_lowercase();
        if pos == "VB" {
            return Ok(word);
        }
        if pos == "VBP" && self.verb_lemmas.contains(&word) {
            return Ok(word);
        }
        if let Some(lemma) = self.verb_exceptions.get(&word) {
            return Ok(lemma.clone());
        }
        Ok(self.by_suffix(pos, &word).unwrap_or(word))
    }

    pub fn lemmatize_noun(&self, surface: &str, pos: &str) -> Result<String> {
        if !is_noun_tag(pos) {
            return Err(Error::WrongTag {
                tag: pos.to_string(),
                expected: "noun",
            });
        }
        let word = surface.to_lowercase();
        if pos == "NN" || pos == "NNP" {
            return Ok(word);
        }
        if let Some(lemma) = self.noun_exceptions.get(&word) {
            return Ok(lemma.clone());
        }
        Ok(self.by_suffix(pos, &word).unwrap_or(word))
    }
}

/// Lemmatizes with the builtin tables.
pub fn lemmatize_verb(surface: &str, pos: &str) -> Result<String> {
    LemmaRules::builtin().lemmatize_verb(surface, pos)
}

/// Lemmatizes with the builtin tables.
pub fn lemmatize_noun(surface: &str, pos: &str) -> Result<String> {
    LemmaRules::builtin().lemmatize_noun(surface, pos)
}
