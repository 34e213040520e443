//! Gold-standard evaluation of support-verb choices.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;
use std::sync::OnceLock;

use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use crate::cooc::CoocMatrix;
use crate::error::{Error, Result};
use crate::models::{choice_ratio, rank, Model};

const BUILTIN_TESTSET: &str = include_str!("../data/testset.tsv");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCase {
    pub source_text: String,
    pub full_verb: String,
    pub nominal: String,
    /// The source text's own support verb first, then acceptable alternates.
    pub gold_svs: Vec<String>,
}

impl TestCase {
    pub fn new(
        source_text: &str,
        full_verb: &str,
        nominal: &str,
        gold_svs: &[&str],
    ) -> Result<Self> {
        if nominal.is_empty() {
            return Err(Error::InvalidArgument("empty nominal".into()));
        }
        if gold_svs.is_empty() || gold_svs.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidArgument(format!(
                "{source_text:?} needs at least one gold support verb"
            )));
        }
        Ok(TestCase {
            source_text: source_text.to_string(),
            full_verb: full_verb.to_string(),
            nominal: nominal.to_string(),
            gold_svs: gold_svs.iter().map(|g| g.to_string()).collect(),
        })
    }
}

/// Reads `source_text<TAB>full_verb<TAB>nominal<TAB>gold[|alt...]` lines.
pub fn load_test_cases<R: BufRead>(input: R) -> Result<Vec<TestCase>> {
    let mut cases = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [source, verb, nominal, gold] = fields[..] else {
            return Err(Error::parse(
                line_no,
                "expected source_text<TAB>full_verb<TAB>nominal<TAB>gold_sv[|alt...]",
            ));
        };
        let gold: Vec<&str> = gold.split('|').collect();
        let case = TestCase::new(source, verb, nominal, &gold)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        cases.push(case);
    }
    Ok(cases)
}

/// The eighteen shipped support-verb constructions.
pub fn builtin_test_cases() -> &'static [TestCase] {
    static CASES: OnceLock<Vec<TestCase>> = OnceLock::new();
    CASES.get_or_init(|| {
        load_test_cases(BUILTIN_TESTSET.as_bytes()).expect("builtin test set is valid")
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Match,
    AltMatch,
    Mismatch,
    NoData,
}

impl Outcome {
    pub fn is_success(self) -> bool {
        matches!(self, Outcome::Match | Outcome::AltMatch)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Match => "match",
            Outcome::AltMatch => "alt-match",
            Outcome::Mismatch => "mismatch",
            Outcome::NoData => "no-data",
        })
    }
}

fn classify(choice: Option<&str>, gold: &[String]) -> Outcome {
    match choice {
        None => Outcome::NoData,
        Some(c) if gold.first().is_some_and(|g| g == c) => Outcome::Match,
        Some(c) if gold.iter().skip(1).any(|g| g == c) => Outcome::AltMatch,
        Some(_) => Outcome::Mismatch,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow {
    pub source_text: String,
    pub full_verb: String,
    pub nominal: String,
    pub c1: Option<String>,
    pub c2: Option<String>,
    pub ratio: Option<f64>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub model: Model,
    pub rows: Vec<EvalRow>,
    pub successes: usize,
    /// Cases with at least one candidate.
    pub evaluable: usize,
}

impl EvalReport {
    /// Successes over evaluable cases; zero when nothing was evaluable.
    pub fn accuracy(&self) -> f64 {
        if self.evaluable == 0 {
            0.0
        } else {
            self.successes as f64 / self.evaluable as f64
        }
    }

    pub fn no_data(&self) -> usize {
        self.rows.len() - self.evaluable
    }
}

pub fn evaluate(m: &CoocMatrix, cases: &[TestCase], model: Model) -> EvalReport {
    let rows: Vec<EvalRow> = cases
        .iter()
        .map(|case| {
            let ranking = rank(m, &case.nominal, model);
            let c1 = ranking.first().map(|c| c.verb.clone());
            EvalRow {
                source_text: case.source_text.clone(),
                full_verb: case.full_verb.clone(),
                nominal: case.nominal.clone(),
                outcome: classify(c1.as_deref(), &case.gold_svs),
                c1,
                c2: ranking.second().map(|c| c.verb.clone()),
                ratio: choice_ratio::<f64>(&ranking),
            }
        })
        .collect();
    let evaluable = rows.iter().filter(|r| r.outcome != Outcome::NoData).count();
    let successes = rows.iter().filter(|r| r.outcome.is_success()).count();
    EvalReport {
        model,
        rows,
        successes,
        evaluable,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Tsv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

const NA: &str = "N/A";

fn ratio_text(ratio: Option<f64>) -> String {
    ratio.map_or_else(|| NA.to_string(), |r| format!("{r:.2}"))
}

pub fn render_report(r: &EvalReport, format: ReportFormat) -> String {
    let (sep, header) = match format {
        ReportFormat::Table => (
            " | ",
            "Source Text | Verb | Choice C1 | Choice C2 | Ratio (C1/C2) | Outcome",
        ),
        ReportFormat::Tsv => ("\t", "source_text\tfull_verb\tc1\tc2\tratio\toutcome"),
    };
    let mut out = String::from(header);
    out.push('\n');
    for row in &r.rows {
        let cells = [
            row.source_text.clone(),
            row.full_verb.clone(),
            row.c1.clone().unwrap_or_else(|| NA.into()),
            row.c2.clone().unwrap_or_else(|| NA.into()),
            ratio_text(row.ratio),
            row.outcome.to_string(),
        ];
        out.push_str(&cells.join(sep));
        out.push('\n');
    }
    out
}

pub fn render_summary(r: &EvalReport) -> String {
    format!(
        "{} model: {}/{} correct (accuracy {:.4}), {} no-data\n",
        r.model,
        r.successes,
        r.evaluable,
        r.accuracy(),
        r.no_data()
    )
}

fn check_group(successes: u64, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "group size must be at least 1".into(),
        ));
    }
    if successes > n {
        return Err(Error::InvalidArgument(format!(
            "{successes} successes out of {n} trials"
        )));
    }
    Ok(())
}

/// One-sided pooled two-proportion z-test of `rate_a > rate_b`.
///
/// When the pooled rate is 0 or 1 both groups are identical and the p-value
/// is 0.5.
pub fn significance(success_a: u64, n_a: u64, success_b: u64, n_b: u64) -> Result<f64> {
    check_group(success_a, n_a)?;
    check_group(success_b, n_b)?;
    let (sa, na, sb, nb) = (success_a as f64, n_a as f64, success_b as f64, n_b as f64);
    let pooled = (sa + sb) / (na + nb);
    let se = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
    if se == 0.0 {
        return Ok(0.5);
    }
    let z = (sa / na - sb / nb) / se;
    Ok(0.5 * erfc(z / std::f64::consts::SQRT_2))
}

/// One-sided Fisher exact test of `rate_a > rate_b`: the hypergeometric
/// probability of at least `success_a` successes in group a given the
/// margins.
pub fn fisher_exact(success_a: u64, n_a: u64, success_b: u64, n_b: u64) -> Result<f64> {
    check_group(success_a, n_a)?;
    check_group(success_b, n_b)?;
    let total = n_a + n_b;
    let successes = success_a + success_b;
    let denom = ln_binomial(total, n_a);
    let upper = successes.min(n_a);
    let p: f64 = (success_a..=upper)
        .filter(|&x| successes - x <= n_b)
        .map(|x| {
            (ln_binomial(successes, x) + ln_binomial(total - successes, n_a - x) - denom).exp()
        })
        .sum();
    Ok(p.min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub z_test: f64,
    pub fisher: f64,
}

/// Both significance tests for "report a beats report b".
pub fn compare(a: &EvalReport, b: &EvalReport) -> Result<Comparison> {
    let (sa, na, sb, nb) = (
        a.successes as u64,
        a.evaluable as u64,
        b.successes as u64,
        b.evaluable as u64,
    );
    Ok(Comparison {
        z_test: significance(sa, na, sb, nb)?,
        fisher: fisher_exact(sa, na, sb, nb)?,
    })
}

pub fn render_comparison(a: &EvalReport, b: &EvalReport, c: &Comparison) -> String {
    let level = |p: f64| {
        if p <= 0.05 {
            "significant at 5%"
        } else if p <= 0.10 {
            "significant at 10%"
        } else {
            "not significant at 10%"
        }
    };
    format!(
        "{} {}/{} vs {} {}/{}\none-sided pooled z-test p = {:.4} ({})\none-sided Fisher exact p = {:.4} ({})\n",
        a.model,
        a.successes,
        a.evaluable,
        b.model,
        b.successes,
        b.evaluable,
        c.z_test,
        level(c.z_test),
        c.fisher,
        level(c.fisher)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn demand() -> CoocMatrix {
        CoocMatrix::from_counts([
            ("meet", "demand", 5),
            ("make", "demand", 4),
            ("meet", "need", 5),
            ("make", "decision", 60),
            ("make", "attempt", 36),
        ])
        .unwrap()
    }

    fn demand_case() -> TestCase {
        TestCase::new("make a demand", "demand", "demand", &["make"]).unwrap()
    }

    #[test]
    fn demand_global_vs_basic() {
        let m = demand();
        let global = evaluate(&m, &[demand_case()], Model::Global);
        assert_eq!(global.rows[0].outcome, Outcome::Match);
        let basic = evaluate(&m, &[demand_case()], Model::Basic);
        assert_eq!(basic.rows[0].outcome, Outcome::Mismatch);
        assert_eq!(basic.rows[0].c1.as_deref(), Some("meet"));
    }

    #[test]
    fn no_data_is_excluded_from_accuracy() {
        let cases = [
            demand_case(),
            TestCase::new("give a shove", "shove", "shove", &["give"]).unwrap(),
        ];
        let r = evaluate(&demand(), &cases, Model::Global);
        assert_eq!(r.rows[1].outcome, Outcome::NoData);
        assert_eq!(r.evaluable, 1);
        assert_eq!(r.successes, 1);
        assert_eq!(r.accuracy(), 1.0);
        assert_eq!(r.no_data(), 1);
    }

    #[test]
    fn alternate_gold_counts_as_success() {
        let m = CoocMatrix::from_counts([("cause", "harm", 12), ("do", "harm", 10)]).unwrap();
        let case = TestCase::new("do harm", "harm", "harm", &["do", "cause"]).unwrap();
        let r = evaluate(&m, &[case], Model::Global);
        assert_eq!(r.rows[0].outcome, Outcome::AltMatch);
        assert_eq!(r.successes, 1);
        let swapped = TestCase::new("do harm", "harm", "harm", &["cause", "do"]).unwrap();
        let r = evaluate(&m, &[swapped], Model::Global);
        assert_eq!(r.rows[0].outcome, Outcome::Match);
    }

    #[test]
    fn report_rows() {
        let m = demand();
        let r = evaluate(&m, &[demand_case()], Model::Global);
        let text = render_report(&r, ReportFormat::Table);
        let row = text.lines().nth(1).unwrap();
        assert!(
            row.starts_with("make a demand | demand | make | meet | 8.00"),
            "{row}"
        );

        let missing = TestCase::new("have a snooze", "snooze", "snooze", &["have"]).unwrap();
        let r = evaluate(&m, &[missing], Model::Global);
        let text = render_report(&r, ReportFormat::Table);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "have a snooze | snooze | N/A | N/A | N/A | no-data"
        );
        let tsv = render_report(&r, ReportFormat::Tsv);
        assert_eq!(
            tsv.lines().nth(1).unwrap(),
            "have a snooze\tsnooze\tN/A\tN/A\tN/A\tno-data"
        );
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = evaluate(&demand(), &[], Model::Global);
        assert_eq!(render_report(&r, ReportFormat::Table).lines().count(), 1);
        assert_eq!(r.accuracy(), 0.0);
    }

    #[test]
    fn significance_values() {
        // pooled 0.8, z = 1.8257
        let p = significance(14, 15, 10, 15).unwrap();
        assert!((p - 0.033945).abs() < 1e-5, "{p}");
        // pooled 0.84, z = 1.5590
        let p = significance(14, 15, 7, 10).unwrap();
        assert!((p - 0.059495).abs() < 1e-5, "{p}");
        assert_eq!(significance(5, 9, 5, 9).unwrap(), 0.5);
        assert_eq!(significance(0, 4, 0, 7).unwrap(), 0.5);
        assert_eq!(significance(4, 4, 7, 7).unwrap(), 0.5);
        assert!(significance(1, 0, 1, 2).is_err());
        assert!(significance(3, 2, 1, 2).is_err());
    }

    /// Fisher p-values by direct enumeration of hypergeometric tables with
    /// exact integer binomials.
    fn fisher_oracle(sa: u64, na: u64, sb: u64, nb: u64) -> f64 {
        fn choose(n: u64, k: u64) -> u128 {
            (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
        }
        let k = sa + sb;
        let n = na + nb;
        let hit: u128 = (sa..=k.min(na))
            .filter(|&x| k - x <= nb)
            .map(|x| choose(k, x) * choose(n - k, na - x))
            .sum();
        hit as f64 / choose(n, na) as f64
    }

    #[test]
    fn fisher_values() {
        let p = fisher_exact(14, 15, 10, 15).unwrap();
        assert!((p - fisher_oracle(14, 15, 10, 15)).abs() < 1e-12);
        assert!((p - 0.084291).abs() < 1e-5, "{p}");
        let p = fisher_exact(14, 15, 7, 10).unwrap();
        assert!((p - fisher_oracle(14, 15, 7, 10)).abs() < 1e-12);
        assert!((fisher_exact(0, 5, 3, 5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn test_case_invariants() {
        assert!(TestCase::new("x", "y", "", &["a"]).is_err());
        assert!(TestCase::new("x", "y", "z", &[]).is_err());
        assert!(load_test_cases("a\tb\tc\n".as_bytes()).is_err());
    }

    #[test]
    fn builtin_test_set() {
        let cases = builtin_test_cases();
        assert_eq!(cases.len(), 18);
        let harm = cases.iter().find(|c| c.nominal == "harm").unwrap();
        assert_eq!(harm.gold_svs, ["do", "cause"]);
    }

    proptest! {
        #[test]
        fn significance_symmetry(na in 1..40u64, nb in 1..40u64, fa in 0.0..=1.0f64, fb in 0.0..=1.0f64) {
            let sa = (fa * na as f64).floor() as u64;
            let sb = (fb * nb as f64).floor() as u64;
            let p = significance(sa, na, sb, nb).unwrap();
            let q = significance(sb, nb, sa, na).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((p + q - 1.0).abs() < 1e-12);
        }

        #[test]
        fn significance_antitone_in_b(na in 1..40u64, nb in 2..40u64, fa in 0.0..=1.0f64, fb in 0.0..1.0f64) {
            let sa = (fa * na as f64).floor() as u64;
            let sb = ((fb * nb as f64).floor() as u64).min(nb - 1);
            let lower = significance(sa, na, sb, nb).unwrap();
            let higher = significance(sa, na, sb + 1, nb).unwrap();
            prop_assert!(higher >= lower - 1e-12);
        }

        #[test]
        fn fisher_matches_enumeration(na in 1..25u64, nb in 1..25u64, fa in 0.0..=1.0f64, fb in 0.0..=1.0f64) {
            let sa = (fa * na as f64).floor() as u64;
            let sb = (fb * nb as f64).floor() as u64;
            let p = fisher_exact(sa, na, sb, nb).unwrap();
            prop_assert!((p - fisher_oracle(sa, na, sb, nb)).abs() < 1e-9);
        }
    }
}
