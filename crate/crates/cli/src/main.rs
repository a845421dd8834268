use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quasitruth_core::{
    audit_primary, classify, count_a_normal, is_true, list_a_normal, parse_formula, parse_kb, AuditMode, CountVerdict,
    KnowledgeBase, Listing, ParseOutcome, SearchBudget, TotalStructure,
};
use serde_json::json;

mod report;

use report::{audit_evidence, audit_lines, cells_json, cells_lines, resolved_cells, verdict_report, Report};

/// Quasi-truth and pragmatic nonsense over partial structures.
#[derive(Debug, Parser)]
#[command(name = "quasitruth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Audit mode for the primary sentences.
    #[arg(long, value_enum, default_value_t = Mode::Literal, global = true)]
    mode: Mode,
    /// Maximum number of search visits per invocation.
    #[arg(long, default_value_t = 1 << 20, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    budget: u64,
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// With `expand`, list every A-normal structure.
    #[arg(long, global = true)]
    list: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Literal,
    Strict,
}

impl From<Mode> for AuditMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Literal => AuditMode::Literal,
            Mode::Strict => AuditMode::Strict,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form.
    Parse { kb: PathBuf, formula: String },
    /// Evaluate a formula in a total structure.
    Eval { kb: PathBuf, formula: String },
    /// Count expansions and A-normal structures.
    Expand { kb: PathBuf },
    /// Check whether the primary sentences are well-built.
    Audit { kb: PathBuf },
    /// Classify a sentence.
    Classify { kb: PathBuf, formula: String },
}

impl Command {
    fn kb(&self) -> &PathBuf {
        match self {
            Command::Parse { kb, .. }
            | Command::Eval { kb, .. }
            | Command::Expand { kb }
            | Command::Audit { kb }
            | Command::Classify { kb, .. } => kb,
        }
    }
}

fn load(path: &PathBuf) -> Result<KnowledgeBase, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_kb(&text).map_err(|e| match e.offending_cell() {
        Some((p, t)) => format!("{}: {e} (predicate {p}, tuple <{}>)", path.display(), t.join(", ")),
        None => format!("{}: {e}", path.display()),
    })
}

fn nonsense_report(command: &'static str, n: &quasitruth_core::Nonsense) -> Report {
    let mut r = Report::new(command, "FORMAL-NONSENSE", 3);
    r.evidence = json!({"kind": "ill-formed", "position": n.position, "reason": n.reason});
    r.lines.push(n.to_string());
    r
}

fn cmd_parse(kb: &KnowledgeBase, text: &str) -> Report {
    match parse_formula(text, kb.signature()) {
        ParseOutcome::Parsed(f) => {
            let mut r = Report::new("parse", "PARSED", 0);
            r.evidence = json!({"canonical": f.to_string()});
            r.lines.push(f.to_string());
            r
        }
        ParseOutcome::FormalNonsense(n) => nonsense_report("parse", &n),
    }
}

fn cmd_eval(kb: &KnowledgeBase, text: &str) -> Result<Report, String> {
    let total = TotalStructure::try_from(kb.structure().clone())
        .map_err(|_| "eval needs a total structure; this one has undetermined cells".to_string())?;
    Ok(match parse_formula(text, kb.signature()) {
        ParseOutcome::FormalNonsense(n) => nonsense_report("eval", &n),
        ParseOutcome::Parsed(f) => {
            let holds = is_true(&total, &f).expect("parsed formulas fit the signature");
            Report::new("eval", if holds { "TRUE" } else { "FALSE" }, if holds { 0 } else { 1 })
        }
    })
}

fn cmd_expand(kb: &KnowledgeBase, budget: SearchBudget, list: bool) -> Report {
    let k = kb.structure().undetermined_cells().len();
    let expansions = (k <= 62).then(|| (1u64 << k).to_string());
    let mut r = Report::new("expand", "EXACT", 0);
    r.lines.push(format!("undetermined cells: {k}"));
    if let Some(n) = &expansions {
        r.lines.push(format!("expansions: {n}"));
    }
    let (count, structures) = if list {
        let out = list_a_normal(kb, budget);
        r.budget_used = out.visited;
        match out.verdict {
            Listing::Complete(all) => {
                let listed: Vec<_> = all.iter().map(|b| resolved_cells(kb, b)).collect();
                (Some(all.len().to_string()), Some(listed))
            }
            Listing::Undetermined { .. } => (None, None),
        }
    } else {
        let out = count_a_normal(kb, budget);
        r.budget_used = out.visited;
        match out.verdict {
            CountVerdict::Exact(n) => (Some(n.to_string()), None),
            CountVerdict::Undetermined { .. } => (None, None),
        }
    };
    r.evidence = json!({"undetermined_cells": k, "expansions": expansions, "a_normal": count});
    match &count {
        Some(n) => r.lines.push(format!("A-normal structures: {n}")),
        None => {
            r.verdict = "UNDETERMINED".into();
            r.exit = 4;
            r.lines.push(format!(
                "A-normal structures: undetermined (budget exhausted after {} visits)",
                r.budget_used
            ));
        }
    }
    if let Some(listed) = structures {
        r.evidence["structures"] = listed.iter().map(|c| cells_json(c)).collect();
        for (i, cells) in listed.iter().enumerate() {
            r.lines.push(format!("#{}", i + 1));
            r.lines.extend(cells_lines(cells, "  "));
        }
    }
    r
}

fn cmd_audit(kb: &KnowledgeBase, mode: AuditMode, budget: SearchBudget) -> Report {
    let out = audit_primary(kb, mode, budget);
    let a = &out.verdict;
    let mut r = if !a.is_well_built() {
        Report::new("audit", "NOT-WELL-BUILT", 5)
    } else if !a.undetermined.is_empty() {
        Report::new("audit", "UNDETERMINED", 4)
    } else {
        Report::new("audit", "WELL-BUILT", 0)
    };
    r.evidence = audit_evidence(a);
    r.lines = audit_lines(a);
    r.budget_used = out.visited;
    r
}

fn run(cli: &Cli) -> Result<Report, String> {
    let kb = load(cli.command.kb())?;
    let budget = SearchBudget::new(cli.budget).expect("clap rejects zero");
    let mode = AuditMode::from(cli.mode);
    Ok(match &cli.command {
        Command::Parse { formula, .. } => cmd_parse(&kb, formula),
        Command::Eval { formula, .. } => cmd_eval(&kb, formula)?,
        Command::Expand { .. } => cmd_expand(&kb, budget, cli.list),
        Command::Audit { .. } => cmd_audit(&kb, mode, budget),
        Command::Classify { formula, .. } => {
            let out = classify(&kb, formula, mode, budget);
            verdict_report(&kb, &out.verdict, out.visited)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            println!("{}", if cli.json { r.to_json() } else { r.to_text() });
            ExitCode::from(r.exit)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
