//! `stratmine`: featurize game logs, rank classifiers, mine rules and
//! generate synthetic subjects.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 internal failure.

use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use stratmine::classifiers::{extract_rule_text, fit, ClassifierSpec};
use stratmine::evaluate::{rule_conformance, select_hypothesis_space, DEFAULT_FOLDS};
use stratmine::featurize::{featurize_ct, featurize_rps, WindowConfig};
use stratmine::gamedata::{parse_ct_log, parse_rps_log, read_arff, write_arff, write_ct_log, write_rps_log};
use stratmine::report::{DataSummary, EvaluationReport, Run};
use stratmine::synthetic::{self, synth_ct, synth_rps, CtResponderRule, DeltaGrid, RpsSubjectRule, Source};
use stratmine::{seed, Dataset, Error, VERSION};

/// A rule is flagged weak when its conformance beats the majority-class
/// frequency by less than this.
const WEAK_MARGIN: f64 = 0.05;

#[derive(Parser, Debug)]
#[command(
    name = "stratmine",
    version,
    about = "Mine decision rules from repeated-game play logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Turn a CSV play log into an ARFF dataset.
    Featurize(FeaturizeArgs),
    /// Cross-validate classifiers and rank them.
    Evaluate(EvaluateArgs),
    /// Print OneR and decision-table rules with their conformance.
    Mine(MineArgs),
    /// Generate a CSV log from a seeded rule-following subject.
    Synth(SynthArgs),
    /// Print the toolkit version.
    Version,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Game {
    Rps,
    Ct,
}

impl Game {
    fn name(self) -> &'static str {
        match self {
            Game::Rps => "rps",
            Game::Ct => "ct",
        }
    }
}

#[derive(Args, Debug)]
struct FeaturizeArgs {
    /// CSV play log.
    input: PathBuf,
    #[arg(long, value_enum)]
    game: Game,
    /// History window (RPS only).
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// ARFF output path.
    #[arg(long)]
    out: PathBuf,
    /// Print a JSON summary instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// ARFF dataset, or a CSV play log when --game is given.
    input: PathBuf,
    /// Treat the input as a CSV log of this game.
    #[arg(long, value_enum)]
    game: Option<Game>,
    /// History windows for an RPS log; several values run a sweep.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    window: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    /// Comma-separated classifier ids, or "all".
    #[arg(long, default_value = "all")]
    classifiers: String,
    /// Parent seed for randomized classifiers.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct MineArgs {
    /// ARFF dataset.
    input: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_enum)]
    game: Game,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON.
    #[arg(long)]
    json: bool,
    /// RPS: number of subjects.
    #[arg(long, default_value_t = 10)]
    subjects: usize,
    /// RPS: threads per subject.
    #[arg(long, default_value_t = 2)]
    threads: usize,
    /// RPS: games per thread.
    #[arg(long, default_value_t = 30)]
    turns: usize,
    /// RPS: whose earlier gesture drives the rule.
    #[arg(long, value_enum, default_value = "own")]
    source: SourceArg,
    /// RPS: how many turns back the cue lies.
    #[arg(long, default_value_t = 1)]
    lag: usize,
    /// Probability of following the rule (default 0.9 for RPS, 0.9515 for CT).
    #[arg(long)]
    adherence: Option<f64>,
    /// CT: number of responder decisions.
    #[arg(long, default_value_t = 371)]
    n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    Own,
    Opp,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_json(v: &Json) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn featurize_log(text: &str, game: Game, window: usize) -> Result<Dataset, Failure> {
    Ok(match game {
        Game::Rps => featurize_rps(&parse_rps_log(text)?, WindowConfig::new(window)?)?,
        Game::Ct => featurize_ct(&parse_ct_log(text)?)?,
    })
}

fn cmd_featurize(a: &FeaturizeArgs) -> CmdResult {
    let text = read_input(&a.input)?;
    let d = featurize_log(&text, a.game, a.window)?;
    write_output(&a.out, &write_arff(&d))?;
    if a.json {
        let summary = json!({
            "toolkit": "stratmine",
            "version": VERSION,
            "config": {
                "command": "featurize",
                "input": a.input.display().to_string(),
                "game": a.game.name(),
                "window": a.window,
                "out": a.out.display().to_string(),
            },
            "relation": d.relation(),
            "instances": d.len(),
            "attributes": d.attributes().len(),
        });
        print!("{}", to_json(&summary)?);
    } else {
        println!("{} instances", d.len());
    }
    Ok(())
}

/// Specs for `list`; each randomized classifier gets the sub-seed derived
/// from the parent seed and the classifier's position in the known ids.
fn parse_specs(list: &str, parent: u64) -> Result<Vec<ClassifierSpec>, Failure> {
    let ids: Vec<&str> = if list.trim() == "all" {
        ClassifierSpec::IDS.to_vec()
    } else {
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    };
    if ids.is_empty() {
        return Err(Failure::Input("no classifiers given".into()));
    }
    let mut specs = Vec::new();
    for id in ids {
        let stream = ClassifierSpec::IDS.iter().position(|k| *k == id).unwrap_or(0) as u64;
        let spec = ClassifierSpec::from_id(id, seed::derive(parent, stream))?;
        if specs.contains(&spec) {
            return Err(Failure::Input(format!("classifier {id} listed twice")));
        }
        specs.push(spec);
    }
    Ok(specs)
}

fn cmd_evaluate(a: &EvaluateArgs) -> CmdResult {
    let specs = parse_specs(&a.classifiers, a.seed)?;
    let text = read_input(&a.input)?;
    let mut datasets: Vec<(String, Dataset)> = Vec::new();
    match a.game {
        None => {
            if a.window != [3] {
                return Err(Failure::Input("--window needs a CSV log and --game rps".into()));
            }
            datasets.push(("arff".into(), read_arff(&text)?));
        }
        Some(Game::Ct) => {
            if a.window != [3] {
                return Err(Failure::Input("--window applies to RPS logs only".into()));
            }
            datasets.push(("ct".into(), featurize_log(&text, Game::Ct, 3)?));
        }
        Some(Game::Rps) => {
            for &w in &a.window {
                datasets.push((format!("w={w}"), featurize_log(&text, Game::Rps, w)?));
            }
        }
    }

    let mut runs = Vec::new();
    for (label, d) in &datasets {
        let ranking = select_hypothesis_space(d, &specs, a.folds)?;
        runs.push(Run {
            label: label.clone(),
            data: DataSummary::of(d),
            ranking,
        });
    }
    let config = json!({
        "command": "evaluate",
        "input": a.input.display().to_string(),
        "game": a.game.map(Game::name),
        "windows": if a.game == Some(Game::Rps) { json!(a.window) } else { Json::Null },
        "folds": a.folds,
        "seed": a.seed,
        "seed_derivation": "classifier seed = derive(seed, position of the classifier id in the known ids)",
        "classifiers": specs,
    });
    let report = EvaluationReport::new(config, runs);
    let json = report.to_json();
    if let Some(out) = &a.out {
        write_output(out, &json)?;
    }
    if a.json {
        print!("{json}");
    } else {
        print!("{}", report.to_text());
    }
    if report.runs.iter().all(|r| r.ranking.winner.is_none()) {
        return Err(Failure::Input("every classifier failed on every fold".into()));
    }
    Ok(())
}

fn cmd_mine(a: &MineArgs) -> CmdResult {
    let d = read_arff(&read_input(&a.input)?)?;
    if d.is_empty() {
        return Err(Error::EmptyDataset.into());
    }
    let majority = *d.class_counts().iter().max().unwrap_or(&0) as f64 / d.len() as f64;
    let mut rules = Vec::new();
    for spec in [
        ClassifierSpec::from_id("one_r", 0)?,
        ClassifierSpec::from_id("decision_table", 0)?,
    ] {
        let m = fit(&d, &spec)?;
        let text = extract_rule_text(&m)?;
        let conformance = rule_conformance(&d, &m)?;
        rules.push((spec, text, conformance, conformance - majority < WEAK_MARGIN));
    }
    if a.json {
        let doc = json!({
            "toolkit": "stratmine",
            "version": VERSION,
            "config": { "command": "mine", "input": a.input.display().to_string(), "weak_margin": WEAK_MARGIN },
            "relation": d.relation(),
            "instances": d.len(),
            "majority_frequency": majority,
            "rules": rules.iter().map(|(spec, text, c, weak)| json!({
                "classifier": spec,
                "rule": text,
                "conformance": c,
                "weak": weak,
            })).collect::<Vec<_>>(),
        });
        print!("{}", to_json(&doc)?);
        return Ok(());
    }
    println!(
        "{}: {} instances, majority class {:.2}%",
        d.relation(),
        d.len(),
        100.0 * majority
    );
    for (spec, text, c, weak) in &rules {
        println!();
        println!(
            "{} (conformance {:.2}%){}",
            spec.id(),
            100.0 * c,
            if *weak {
                " WEAK: barely above the majority class"
            } else {
                ""
            }
        );
        for clause in text.split("; ") {
            println!("  {clause}");
        }
    }
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> CmdResult {
    let (csv, config) = match a.game {
        Game::Rps => {
            let source = match a.source {
                SourceArg::Own => Source::Own,
                SourceArg::Opp => Source::Opp,
            };
            let rule = RpsSubjectRule::shift(source, a.lag, a.adherence.unwrap_or(0.9), a.seed);
            let episodes = synth_rps(a.subjects, a.threads, a.turns, &rule, None)?;
            let config = json!({
                "game": "rps",
                "subjects": a.subjects,
                "threads": a.threads,
                "turns": a.turns,
                "rule": "shift R->P, P->S, S->R",
                "source": rule.source_attribute(),
                "adherence": rule.adherence,
                "opponent": "uniform",
                "rows": a.subjects * a.threads * a.turns,
            });
            (write_rps_log(&episodes), config)
        }
        Game::Ct => {
            let rule = CtResponderRule::new(a.adherence.unwrap_or(0.9515), a.seed);
            let records = synth_ct(a.n, &rule)?;
            let config = json!({
                "game": "ct",
                "n": a.n,
                "rule": "accept if the responder gains, or if the responder is unaffected and the proposer gains",
                "adherence": rule.adherence,
                "delta_grid_cents": DeltaGrid::REFERENCE_VALUES,
                "zero_responder_share": DeltaGrid::ZERO_SHARE,
                "rows": a.n,
            });
            (write_ct_log(&records), config)
        }
    };
    match &a.out {
        Some(out) => write_output(out, &csv)?,
        None => print!("{csv}"),
    }
    if a.json {
        let doc = json!({
            "toolkit": "stratmine",
            "version": VERSION,
            "config": { "command": "synth", "seed": a.seed, "out": a.out.as_ref().map(|p| p.display().to_string()) },
            "generator": config,
            "note": synthetic::SYNTHETIC_NOTE,
        });
        let text = to_json(&doc)?;
        if a.out.is_some() {
            print!("{text}");
        } else {
            eprint!("{text}");
        }
    } else if a.out.is_some() {
        println!("{} rows ({})", csv.lines().count() - 1, synthetic::SYNTHETIC_NOTE);
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Featurize(a) => cmd_featurize(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Mine(a) => cmd_mine(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Version => {
            println!("stratmine {VERSION}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}
