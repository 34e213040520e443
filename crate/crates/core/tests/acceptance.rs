//! Acceptance checks, one line of output per criterion. Run with
//! `cargo test --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use svlight::evaluation::{builtin_test_cases, evaluate, fisher_exact};
use svlight::governance::{count_corpus, counts_provenance};
use svlight::lexicon::{default_rules, default_verbs, generate_candidates, merge_lexicons};
use svlight::scalar::relative_difference;
use svlight::standardization::{category_rates, crude_rate, expected_events, smr};
use svlight::{
    corpus::parse_str, global_weights, sv_basic, sv_global, CoocMatrix, Exact, ExtractionConfig,
    Lexicon, Model, Outcome, PopulationTable,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn load_counts(name: &str) -> CoocMatrix {
    CoocMatrix::load(fs::read(fixture(name)).unwrap().as_slice()).unwrap()
}

fn load_population(name: &str) -> PopulationTable {
    PopulationTable::load(fs::read(fixture(name)).unwrap().as_slice()).unwrap()
}

/// Sparse matrix with up to `verbs` x `nouns` cells, each present with
/// probability 0.3 and counts in 1..=50.
fn random_matrix(rng: &mut ChaCha8Rng, verbs: usize, nouns: usize) -> CoocMatrix {
    let nv = rng.gen_range(1..=verbs);
    let nn = rng.gen_range(1..=nouns);
    let mut cells = Vec::new();
    for v in 0..nv {
        for n in 0..nn {
            if rng.gen_bool(0.3) {
                cells.push((
                    format!("v{v:02}"),
                    format!("n{n:02}"),
                    rng.gen_range(1..=50u64),
                ));
            }
        }
    }
    if cells.is_empty() {
        cells.push(("v00".into(), "n00".into(), rng.gen_range(1..=50u64)));
    }
    CoocMatrix::from_counts(cells).unwrap()
}

/// Ranking by repeated argmax over raw cells, without any library helper.
fn brute_force_global(cells: &[(String, String, u64)], noun: &str) -> Vec<(String, u64, u128)> {
    let mut remaining: Vec<(String, u64, u128)> = cells
        .iter()
        .filter(|(_, n, _)| n == noun)
        .map(|(v, _, c)| {
            let row: u64 = cells
                .iter()
                .filter(|(w, _, _)| w == v)
                .map(|(_, _, c)| c)
                .sum();
            (v.clone(), *c, u128::from(*c) * u128::from(row))
        })
        .collect();
    let mut ranked = Vec::new();
    while !remaining.is_empty() {
        let mut best = 0;
        for i in 1..remaining.len() {
            let (a, b) = (&remaining[i], &remaining[best]);
            let better = a.2 > b.2 || (a.2 == b.2 && (a.1 > b.1 || (a.1 == b.1 && a.0 < b.0)));
            if better {
                best = i;
            }
        }
        ranked.push(remaining.swap_remove(best));
    }
    ranked
}

fn oracle_equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    for trial in 0..1000 {
        let m = random_matrix(&mut rng, 20, 10);
        let cells: Vec<(String, String, u64)> = m
            .iter()
            .map(|(v, n, c)| (v.to_string(), n.to_string(), c))
            .collect();
        for noun in m.nouns() {
            let got: Vec<(String, u64, u128)> = sv_global(&m, noun)
                .candidates()
                .iter()
                .map(|c| (c.verb.clone(), c.raw_count, c.score))
                .collect();
            if got != brute_force_global(&cells, noun) {
                return Err(format!("matrix {trial}, noun {noun}: ranking differs"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("1000 matrices in {:.2?}", elapsed))
}

fn demand_inversion() -> Result<String, String> {
    let m = load_counts("demand.counts.tsv");
    let column = m.column("demand");
    let expected = BTreeMap::from([("make".to_string(), 4), ("meet".to_string(), 5)]);
    if column != expected || m.row_sum("meet") != 10 || m.row_sum("make") != 100 {
        return Err("fixture does not have the documented shape".into());
    }
    let basic = sv_basic(&m, "demand");
    let global = sv_global(&m, "demand");
    let (b, g) = (&basic.first().unwrap().verb, &global.first().unwrap().verb);
    if b == "meet" && g == "make" {
        Ok("basic chooses meet, global chooses make".into())
    } else {
        Err(format!("basic chose {b}, global chose {g}"))
    }
}

fn significance_values() -> Result<String, String> {
    let weak = svlight::significance(14, 15, 7, 10).map_err(|e| e.to_string())?;
    let strong = svlight::significance(14, 15, 10, 15).map_err(|e| e.to_string())?;
    let checks = [
        (weak > 0.05 && weak <= 0.10, "14/15 vs 7/10 in (0.05, 0.10]"),
        (strong <= 0.05, "14/15 vs 10/15 <= 0.05"),
        ((weak - 0.0595).abs() <= 1e-3, "14/15 vs 7/10 ~ 0.0595"),
        ((strong - 0.0339).abs() <= 1e-3, "14/15 vs 10/15 ~ 0.0339"),
    ];
    if let Some((_, what)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(format!("{what}: got {weak:.6} and {strong:.6}"));
    }
    let fisher = fisher_exact(14, 15, 10, 15).map_err(|e| e.to_string())?;
    Ok(format!(
        "z-test p = {weak:.4} and {strong:.4} (Fisher {fisher:.4} for the second)"
    ))
}

fn normalization() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let m = random_matrix(&mut rng, 20, 10);
        let w = global_weights::<f64>(&m).map_err(|e| e.to_string())?;
        let err = (w.sum() - 1.0).abs();
        worst = worst.max(err);
        if err > 1e-12 {
            return Err(format!("matrix {trial}: weights sum off by {err:e}"));
        }
        for k in [2, 7, 100] {
            let scaled = m.scaled(k).map_err(|e| e.to_string())?;
            for noun in m.nouns() {
                for model in [Model::Basic, Model::Global] {
                    let a = svlight::models::rank(&m, noun, model);
                    let b = svlight::models::rank(&scaled, noun, model);
                    if a.verbs() != b.verbs() {
                        return Err(format!("matrix {trial}, {model} order changes under x{k}"));
                    }
                }
            }
        }
    }
    Ok(format!(
        "max |sum - 1| = {worst:e}; order stable under x2, x7, x100"
    ))
}

fn simpson() -> Result<String, String> {
    let target = load_population("simpson_target.tsv");
    let standard = load_population("simpson_standard.tsv");
    let rt: BTreeMap<String, f64> = category_rates(&target);
    let rs: BTreeMap<String, f64> = category_rates(&standard);
    for (label, rate) in &rt {
        if rate <= &rs[label] {
            return Err(format!(
                "target rate for {label} does not exceed the standard's"
            ));
        }
    }
    let (ct, cs): (f64, f64) = (crude_rate(&target).unwrap(), crude_rate(&standard).unwrap());
    if relative_difference(ct, 0.004) > 1e-12 || relative_difference(cs, 0.0105) > 1e-12 || ct >= cs
    {
        return Err(format!("crude rates {ct} and {cs}"));
    }
    let s: f64 = smr(&target, &standard).unwrap();
    if relative_difference(s, 4.0 / 3.7) > 1e-9 {
        return Err(format!("SMR {s}"));
    }
    let exact: Exact = smr(&target, &standard).unwrap();
    if exact != Exact::new(40.into(), 37.into()) {
        return Err(format!("exact SMR {exact}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..100 {
        let n = rng.gen_range(1..=8);
        let mut rows: Vec<(String, u64, u64)> = (0..n)
            .map(|i| {
                let exposure = rng.gen_range(1..=1_000_000u64);
                (format!("c{i}"), exposure, rng.gen_range(0..=exposure))
            })
            .collect();
        if rows.iter().all(|r| r.2 == 0) {
            rows[0].2 = 1;
        }
        let p = PopulationTable::new(rows).unwrap();
        let own: Exact = smr(&p, &p).unwrap();
        if !own.is_one() {
            return Err(format!("table {trial}: smr(p, p) = {own}"));
        }
    }
    Ok(format!(
        "CDR 0.004 < 0.0105 with higher category rates; SMR = {s:.6}; smr(p,p) = 1 exactly x100"
    ))
}

fn correspondence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for trial in 0..100 {
        let m = random_matrix(&mut rng, 20, 10);
        let weights = global_weights::<f64>(&m).unwrap();
        let exact_weights = global_weights::<Exact>(&m).unwrap();
        let total = m.total() as f64;
        for noun in m.nouns() {
            let ranking = sv_global(&m, noun);
            let column =
                PopulationTable::new(m.column(noun).into_iter().map(|(v, c)| (v, c, 0))).unwrap();
            let expected: f64 = expected_events(weights.weights(), &column).unwrap();
            let from_scores = ranking.score_sum() as f64 / total;
            if relative_difference(expected, from_scores) > 1e-9 {
                return Err(format!(
                    "matrix {trial}, noun {noun}: {expected} vs {from_scores}"
                ));
            }
            let exact: Exact = expected_events(exact_weights.weights(), &column).unwrap();
            let exact_scores = Exact::new(ranking.score_sum().into(), m.total().into());
            if exact != exact_scores {
                return Err(format!("matrix {trial}, noun {noun}: exact values differ"));
            }
            for c in ranking.candidates() {
                let term = weights.weights()[&c.verb] * c.raw_count as f64;
                if relative_difference(term, c.score as f64 / total) > 1e-9 {
                    return Err(format!("matrix {trial}, {}:{noun} term differs", c.verb));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} columns agree"))
}

fn end_to_end() -> Result<String, String> {
    let text = fs::read_to_string(fixture("tiny.tagged")).unwrap();
    let sentences = parse_str(&text, "tiny.tagged").map_err(|e| e.to_string())?;
    let config = ExtractionConfig::default();
    let m = count_corpus(&sentences, &config).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    m.save(
        &mut out,
        &counts_provenance(&["tiny.tagged".into()], "builtin", &config),
    )
    .unwrap();
    if out != fs::read(fixture("tiny.gold.tsv")).unwrap() {
        return Err("counts differ from the gold file".into());
    }
    let passive = count_corpus(&sentences, &config.clone().with_passive(true)).unwrap();
    if m.get("give", "gift") != 0 || passive.get("give", "gift") == 0 {
        return Err("passive sentence is not excluded".into());
    }
    if m.get("make", "use") == 0 {
        return Err("concretised use of 'make use of' not counted".into());
    }
    Ok(format!(
        "{} sentences, {} events, byte-identical to gold",
        sentences.len(),
        m.total()
    ))
}

fn test_set_harness() -> Result<String, String> {
    let m = load_counts("table2.counts.tsv");
    let global = evaluate(&m, builtin_test_cases(), Model::Global);
    let basic = evaluate(&m, builtin_test_cases(), Model::Basic);
    let no_data: BTreeSet<&str> = global
        .rows
        .iter()
        .filter(|r| r.outcome == Outcome::NoData)
        .map(|r| r.nominal.as_str())
        .collect();
    if no_data != BTreeSet::from(["drink", "shove", "snooze"]) {
        return Err(format!("no-data rows {no_data:?}"));
    }
    if global.rows.len() != 18 || global.evaluable != 15 || basic.evaluable != 15 {
        return Err(format!(
            "{} cases, {} evaluable",
            global.rows.len(),
            global.evaluable
        ));
    }
    if global.successes != 14 || basic.successes != 10 {
        return Err(format!(
            "global {}/15, basic {}/15",
            global.successes, basic.successes
        ));
    }
    Ok("3 no-data rows; global 14/15, basic 10/15".into())
}

fn lexicon_coverage() -> Result<String, String> {
    let cases = builtin_test_cases();
    let nouns: BTreeSet<String> = cases.iter().map(|c| c.nominal.clone()).collect();
    let generated = generate_candidates(&nouns, &default_verbs(), default_rules());
    let builtin: Vec<_> = Lexicon::builtin().entries().cloned().collect();
    let lexicon = merge_lexicons(&builtin, &generated, &[]).map_err(|e| e.to_string())?;
    let got: BTreeSet<(String, String)> = nouns
        .iter()
        .filter_map(|n| lexicon.stem_verb(n).map(|s| (n.clone(), s.to_string())))
        .collect();
    let want: BTreeSet<(String, String)> = cases
        .iter()
        .map(|c| (c.nominal.clone(), c.full_verb.clone()))
        .collect();
    if got != want {
        let diff: Vec<_> = want.symmetric_difference(&got).collect();
        return Err(format!("mismatched pairs {diff:?}"));
    }
    Ok(format!(
        "{} nominals mapped to their stem verbs",
        want.len()
    ))
}

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let started = Instant::now();
    let criteria: [(&str, Check); 9] = [
        ("global ranking matches brute force", oracle_equivalence),
        ("demand inversion", demand_inversion),
        ("significance arithmetic", significance_values),
        ("normalization and scale invariance", normalization),
        ("Simpson fixture and SMR", simpson),
        ("scores correspond to expected events", correspondence),
        ("tiny corpus counts match gold", end_to_end),
        ("test-set harness no-data rows", test_set_harness),
        ("lexicon covers the test set", lexicon_coverage),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    let elapsed = started.elapsed();
    if elapsed < Duration::from_secs(60) {
        println!("PASS 10 runtime: acceptance suite finished in {elapsed:.2?}");
    } else {
        failures += 1;
        println!("FAIL 10 runtime: acceptance suite took {elapsed:.2?}");
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
