use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use svlight::corpus::{parse_str, write_corpus};
use svlight::governance::{count_corpus, counts_provenance, extract_governance};
use svlight::{CoocMatrix, ExtractionConfig, TaggedSentence};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn tiny() -> Vec<TaggedSentence> {
    let text = fs::read_to_string(fixture("tiny.tagged")).unwrap();
    parse_str(&text, "tiny.tagged").unwrap()
}

fn save(m: &CoocMatrix, config: &ExtractionConfig) -> String {
    let mut out = Vec::new();
    let header = counts_provenance(&["tiny.tagged".to_string()], "builtin", config);
    m.save(&mut out, &header).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn counts_match_hand_tally() {
    let config = ExtractionConfig::default();
    let m = count_corpus(&tiny(), &config).unwrap();
    let gold = fs::read_to_string(fixture("tiny.gold.tsv")).unwrap();
    assert_eq!(save(&m, &config), gold);
}

#[test]
fn counting_is_additive_over_splits() {
    let sentences = tiny();
    let config = ExtractionConfig::default();
    let whole = count_corpus(&sentences, &config).unwrap();
    for split in [0, 1, 37, sentences.len()] {
        let (a, b) = sentences.split_at(split);
        let merged = count_corpus(a, &config)
            .unwrap()
            .merge(&count_corpus(b, &config).unwrap())
            .unwrap();
        assert_eq!(merged, whole);
    }
    let mut reversed = sentences.clone();
    reversed.reverse();
    assert_eq!(count_corpus(&reversed, &config).unwrap(), whole);
}

#[test]
fn noun_filter_restricts_columns() {
    let sentences = tiny();
    let all = count_corpus(&sentences, &ExtractionConfig::default()).unwrap();
    let nouns: BTreeSet<String> = ["demand", "proposal", "gift"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let small: BTreeSet<String> = ["demand"].iter().map(|s| s.to_string()).collect();
    let filtered = count_corpus(
        &sentences,
        &ExtractionConfig::default().with_noun_filter(nouns.clone()),
    )
    .unwrap();
    let narrower = count_corpus(
        &sentences,
        &ExtractionConfig::default().with_noun_filter(small.clone()),
    )
    .unwrap();
    assert_eq!(filtered, all.restrict_nouns(|n| nouns.contains(n)));
    assert_eq!(narrower, filtered.restrict_nouns(|n| small.contains(n)));
}

#[test]
fn events_come_from_the_sentence() {
    for sentence in tiny() {
        for event in extract_governance(&sentence, &ExtractionConfig::default()).unwrap() {
            assert_eq!(event.source_id, sentence.source_id());
            assert!(sentence.tokens().iter().any(|t| t.is_verb()));
            assert!(sentence.tokens().iter().any(|t| t.is_noun()));
            assert!(!event.verb_lemma.is_empty() && !event.noun_lemma.is_empty());
        }
    }
}

#[test]
fn passive_switch_changes_counts() {
    let sentences = tiny();
    let default = count_corpus(&sentences, &ExtractionConfig::default()).unwrap();
    let with_passive =
        count_corpus(&sentences, &ExtractionConfig::default().with_passive(true)).unwrap();
    // "They were given a gift" only counts once passives are allowed
    assert_eq!(default.get("give", "gift"), 0);
    assert_eq!(with_passive.get("give", "gift"), 1);
}

#[test]
fn corpus_round_trips_through_writer() {
    let sentences = tiny();
    let mut out = Vec::new();
    write_corpus(&mut out, &sentences).unwrap();
    let again = parse_str(std::str::from_utf8(&out).unwrap(), "copy").unwrap();
    let tokens = |s: &[TaggedSentence]| s.iter().map(|x| x.tokens().to_vec()).collect::<Vec<_>>();
    assert_eq!(tokens(&again), tokens(&sentences));
}
