use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use svlight::evaluation::{
    builtin_test_cases, compare, evaluate, load_test_cases, render_comparison, render_report,
    render_summary, ReportFormat,
};
use svlight::governance::{count_corpus_with, counts_provenance};
use svlight::lexicon::{
    apply_manual_filter, default_rules, default_verbs, generate_candidates, merge_lexicons,
    parse_decisions, parse_rules, read_entries, read_word_list, write_entries, Lexicon,
    LexiconEntry,
};
use svlight::models::{iterate_global, rank, sv_weighted, Ranking};
use svlight::standardization::standardize;
use svlight::{
    parse_tagged_corpus, CoocMatrix, ExtractionConfig, LemmaRules, Model, PopulationTable,
};

const AFTER_HELP: &str = "\
File formats:
  tagged corpus   one token per line, surface<TAB>TAG; blank line ends a sentence; # starts a comment
  counts          verb<TAB>noun<TAB>count, after a '# svlight counts v1' line
  tests           source_text<TAB>full_verb<TAB>nominal<TAB>gold[|alt...]
  population      label<TAB>exposure<TAB>events
  lexicon         noun<TAB>stem_verb<TAB>builtin|generated|manual
  decisions       noun<TAB>accept|reject[<TAB>stem_verb]
  word lists      one word per line

Exit status: 0 success, 1 usage error, 2 data error.";

/// Support-verb identification for nominalizations.
#[derive(Parser, Debug)]
#[command(name = "svlight", version, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tally verb/object-noun pairs in tagged corpora into a counts file.
    Count(CountArgs),
    /// Rank candidate support verbs for one noun.
    Rank(RankArgs),
    /// Score a model against a test set, optionally against a second model.
    Eval(EvalArgs),
    /// Indirect standardization of a target population against a standard.
    Standardize(StandardizeArgs),
    /// Build the nominalization lexicon.
    #[command(subcommand)]
    Lexicon(LexiconCommand),
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long, required = true, num_args = 1..)]
    corpus: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Only count these nouns: a lexicon file or a plain word list.
    #[arg(long)]
    nouns: Option<PathBuf>,
    #[arg(long, default_value_t = svlight::governance::DEFAULT_NP_SPAN)]
    np_span: usize,
    /// Also count objects of passive participles.
    #[arg(long)]
    include_passive: bool,
    /// Replacement lemmatizer tables.
    #[arg(long)]
    lemma_rules: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[arg(long)]
    counts: PathBuf,
    #[arg(long)]
    noun: String,
    #[arg(long, default_value = "global")]
    model: Model,
    /// Re-estimate the global weights from the model's own choices N times.
    #[arg(long, value_name = "N")]
    iterate: Option<usize>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    counts: PathBuf,
    /// Test cases; the bundled set when omitted.
    #[arg(long)]
    tests: Option<PathBuf>,
    #[arg(long, default_value = "global")]
    model: Model,
    /// Second model to test against.
    #[arg(long)]
    compare: Option<Model>,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
}

#[derive(Args, Debug)]
struct StandardizeArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    standard: PathBuf,
}

#[derive(Subcommand, Debug)]
enum LexiconCommand {
    /// Propose stem verbs for nouns with suffix rules.
    Generate {
        #[arg(long)]
        nouns: PathBuf,
        /// Verb vocabulary; the bundled list when omitted.
        #[arg(long)]
        verbs: Option<PathBuf>,
        /// Suffix rules (suffix<TAB>replacement|...); the bundled set when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply manual accept/reject decisions to generated candidates.
    Filter {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        decisions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Where to write candidates without a decision.
        #[arg(long)]
        pending: Option<PathBuf>,
    },
    /// Merge builtin, generated and manual entries into one lexicon.
    Merge {
        /// Builtin exceptions; the bundled table when omitted.
        #[arg(long)]
        builtin: Option<PathBuf>,
        #[arg(long)]
        generated: Option<PathBuf>,
        #[arg(long)]
        manual: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn inputs(&self) -> Vec<&Path> {
        let mut paths: Vec<&Path> = Vec::new();
        match self {
            Command::Count(a) => {
                paths.extend(a.corpus.iter().map(PathBuf::as_path));
                paths.extend(a.nouns.as_deref());
                paths.extend(a.lemma_rules.as_deref());
            }
            Command::Rank(a) => paths.push(&a.counts),
            Command::Eval(a) => {
                paths.push(&a.counts);
                paths.extend(a.tests.as_deref());
            }
            Command::Standardize(a) => paths.extend([a.target.as_path(), a.standard.as_path()]),
            Command::Lexicon(LexiconCommand::Generate {
                nouns,
                verbs,
                rules,
                ..
            }) => {
                paths.push(nouns);
                paths.extend(verbs.as_deref());
                paths.extend(rules.as_deref());
            }
            Command::Lexicon(LexiconCommand::Filter {
                candidates,
                decisions,
                ..
            }) => {
                paths.extend([candidates.as_path(), decisions.as_path()]);
            }
            Command::Lexicon(LexiconCommand::Merge {
                builtin,
                generated,
                manual,
                ..
            }) => {
                paths.extend(builtin.as_deref());
                paths.extend(generated.as_deref());
                paths.extend(manual.as_deref());
            }
        }
        paths
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("{}: cannot open", path.display()))?;
    Ok(BufReader::new(file))
}

/// Runs a parser over a file, prefixing failures with the file name.
fn read_with<T>(
    path: &Path,
    parse: impl FnOnce(BufReader<File>) -> svlight::Result<T>,
) -> Result<T> {
    parse(open(path)?).with_context(|| path.display().to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("{}: cannot create", path.display()))?;
    Ok(BufWriter::new(file))
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

/// A noun filter file is either a lexicon (tab-separated, nouns in the first
/// column) or a plain word list.
fn read_noun_filter(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("{}: cannot read", path.display()))?;
    let is_lexicon = text
        .lines()
        .any(|l| !l.starts_with('#') && l.contains('\t'));
    if is_lexicon {
        let entries = read_entries(text.as_bytes()).with_context(|| path.display().to_string())?;
        Ok(entries.into_iter().map(|(_, e)| e.noun).collect())
    } else {
        read_word_list(text.as_bytes()).with_context(|| path.display().to_string())
    }
}

fn run_count(args: &CountArgs) -> Result<()> {
    let mut config = ExtractionConfig::default()
        .with_np_span(args.np_span)?
        .with_passive(args.include_passive);
    if let Some(path) = &args.nouns {
        config = config.with_noun_filter(read_noun_filter(path)?);
    }
    let custom_rules;
    let (rules, rules_name) = match &args.lemma_rules {
        Some(path) => {
            custom_rules = read_with(path, LemmaRules::parse)?;
            (&custom_rules, file_name(path))
        }
        None => (LemmaRules::builtin(), "builtin".to_string()),
    };

    let mut sentences = Vec::new();
    for path in &args.corpus {
        let name = file_name(path);
        let before = sentences.len();
        for sentence in parse_tagged_corpus(open(path)?, name.as_str()) {
            sentences.push(sentence.with_context(|| path.display().to_string())?);
        }
        eprintln!("{}: {} sentences", path.display(), sentences.len() - before);
    }
    let matrix = count_corpus_with(rules, &sentences, &config)?;

    let corpora: Vec<String> = args.corpus.iter().map(|p| file_name(p)).collect();
    let provenance = counts_provenance(&corpora, &rules_name, &config);
    let mut out = create(&args.out)?;
    matrix.save(&mut out, &provenance)?;
    out.flush()?;
    Ok(())
}

fn load_counts(path: &Path) -> Result<CoocMatrix> {
    read_with(path, CoocMatrix::load)
}

fn render_ranking(ranking: &Ranking, out: &mut impl Write) -> io::Result<()> {
    if ranking.is_no_data() {
        return writeln!(out, "{}: N/A (no data)", ranking.noun);
    }
    let sum = ranking.score_sum();
    writeln!(out, "{} ({} model)", ranking.noun, ranking.model)?;
    writeln!(out, "rank\tverb\tcount\tscore\tnormalized")?;
    for (i, c) in ranking.candidates().iter().enumerate() {
        let normalized = if sum == 0 {
            0.0
        } else {
            c.score as f64 / sum as f64
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}",
            i + 1,
            c.verb,
            c.raw_count,
            c.score,
            normalized
        )?;
    }
    Ok(())
}

fn run_rank(args: &RankArgs, out: &mut impl Write) -> Result<()> {
    let matrix = load_counts(&args.counts)?;
    let ranking = match (args.iterate, args.model) {
        (None, model) => rank(&matrix, &args.noun, model),
        (Some(_), Model::Basic) => {
            anyhow::bail!("--iterate only applies to the global model")
        }
        (Some(_), Model::Global) if matrix.is_empty() => rank(&matrix, &args.noun, Model::Global),
        (Some(rounds), Model::Global) => {
            let weights = iterate_global::<f64>(&matrix, rounds)?;
            sv_weighted(&matrix, &args.noun, &weights)
        }
    };
    render_ranking(&ranking, out)?;
    Ok(())
}

fn run_eval(args: &EvalArgs, out: &mut impl Write) -> Result<()> {
    let matrix = load_counts(&args.counts)?;
    let cases = match &args.tests {
        Some(path) => read_with(path, load_test_cases)?,
        None => builtin_test_cases().to_vec(),
    };
    let report = evaluate(&matrix, &cases, args.model);
    write!(out, "{}", render_report(&report, args.format))?;
    writeln!(out)?;
    write!(out, "{}", render_summary(&report))?;
    if let Some(other) = args.compare {
        let baseline = evaluate(&matrix, &cases, other);
        write!(out, "{}", render_summary(&baseline))?;
        let comparison = compare(&report, &baseline)?;
        writeln!(out)?;
        write!(
            out,
            "{}",
            render_comparison(&report, &baseline, &comparison)
        )?;
    }
    Ok(())
}

fn run_standardize(args: &StandardizeArgs, out: &mut impl Write) -> Result<()> {
    let target = read_with(&args.target, PopulationTable::load)?;
    let standard = read_with(&args.standard, PopulationTable::load)?;
    let s = standardize::<f64>(&target, &standard)?;
    writeln!(out, "CDR target\t{:.6}", s.crude_target)?;
    writeln!(out, "CDR standard\t{:.6}", s.crude_standard)?;
    writeln!(out, "actual events\t{}", s.actual_events)?;
    writeln!(out, "expected events\t{:.6}", s.expected_events)?;
    writeln!(out, "SMR\t{:.6}", s.smr)?;
    writeln!(out, "ISDR\t{:.6}", s.isdr)?;
    Ok(())
}

fn read_lexicon_entries(path: &Path) -> Result<Vec<LexiconEntry>> {
    let entries = read_with(path, read_entries)?;
    Ok(entries.into_iter().map(|(_, e)| e).collect())
}

fn write_to(path: &Path, entries: &[LexiconEntry]) -> Result<()> {
    let mut out = create(path)?;
    write_entries(&mut out, entries)?;
    out.flush()?;
    Ok(())
}

fn run_lexicon(cmd: &LexiconCommand) -> Result<()> {
    match cmd {
        LexiconCommand::Generate {
            nouns,
            verbs,
            rules,
            out,
        } => {
            let nouns = read_with(nouns, read_word_list)?;
            let verbs = match verbs {
                Some(path) => read_with(path, read_word_list)?,
                None => default_verbs(),
            };
            let custom;
            let rules = match rules {
                Some(path) => {
                    custom = read_with(path, parse_rules)?;
                    custom.as_slice()
                }
                None => default_rules(),
            };
            let candidates = generate_candidates(&nouns, &verbs, rules);
            let covered: BTreeSet<&str> = candidates.iter().map(|c| c.noun.as_str()).collect();
            for noun in nouns.iter().filter(|n| !covered.contains(n.as_str())) {
                eprintln!("warning: no candidate stem verb for {noun}");
            }
            write_to(out, &candidates)
        }
        LexiconCommand::Filter {
            candidates,
            decisions,
            out,
            pending,
        } => {
            let candidates = read_lexicon_entries(candidates)?;
            let decisions = read_with(decisions, parse_decisions)?;
            let outcome = apply_manual_filter(&candidates, &decisions);
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            if !outcome.pending.is_empty() {
                eprintln!("{} candidates still undecided", outcome.pending.len());
            }
            if let Some(path) = pending {
                write_to(path, &outcome.pending)?;
            }
            write_to(out, &outcome.accepted)
        }
        LexiconCommand::Merge {
            builtin,
            generated,
            manual,
            out,
        } => {
            let builtin = match builtin {
                Some(path) => read_lexicon_entries(path)?,
                None => Lexicon::builtin().entries().cloned().collect(),
            };
            let generated = match generated {
                Some(path) => read_lexicon_entries(path)?,
                None => Vec::new(),
            };
            let manual = match manual {
                Some(path) => read_lexicon_entries(path)?,
                None => Vec::new(),
            };
            let lexicon = merge_lexicons(&builtin, &generated, &manual)?;
            let mut writer = create(out)?;
            lexicon.save(&mut writer)?;
            writer.flush()?;
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Count(args) => run_count(args),
        Command::Rank(args) => run_rank(args, &mut out),
        Command::Eval(args) => run_eval(args, &mut out),
        Command::Standardize(args) => run_standardize(args, &mut out),
        Command::Lexicon(cmd) => run_lexicon(cmd),
    }?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let missing: Vec<&Path> = cli
        .command
        .inputs()
        .into_iter()
        .filter(|p| !p.exists())
        .collect();
    if !missing.is_empty() {
        for path in missing {
            eprintln!("svlight: no such file: {}", path.display());
        }
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("svlight: {err:#}");
            ExitCode::from(2)
        }
    }
}
