//! Rendering of command results, as text or as one JSON object.

use quasitruth_core::{
    AuditReport, FormalNonsense, KnowledgeBase, PragmaticNonsense, Sentence, TotalStructure, Verdict,
};
use serde_json::{json, Value};

/// Everything a command prints, plus its exit status.
pub struct Report {
    pub command: &'static str,
    pub verdict: String,
    pub evidence: Value,
    pub budget_used: u64,
    pub lines: Vec<String>,
    pub exit: u8,
}

impl Report {
    pub fn new(command: &'static str, verdict: impl Into<String>, exit: u8) -> Self {
        Report {
            command,
            verdict: verdict.into(),
            evidence: json!({}),
            budget_used: 0,
            lines: Vec::new(),
            exit,
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "command": self.command,
            "verdict": self.verdict,
            "evidence": self.evidence,
            "budget_used": self.budget_used,
        })
        .to_string()
    }

    pub fn to_text(&self) -> String {
        let mut out = self.verdict.clone();
        for line in &self.lines {
            out.push('\n');
            out.push_str(line);
        }
        out
    }
}

fn show_tuple<S: AsRef<str>>(t: &[S]) -> String {
    if t.is_empty() {
        return String::new();
    }
    let parts: Vec<&str> = t.iter().map(AsRef::as_ref).collect();
    format!("<{}>", parts.join(", "))
}

fn sentences(list: &[Sentence]) -> Vec<String> {
    list.iter().map(ToString::to_string).collect()
}

/// Values the witness gives to the cells the knowledge base left open.
pub fn resolved_cells(kb: &KnowledgeBase, b: &TotalStructure) -> Vec<(String, Vec<String>, bool)> {
    let base = kb.structure();
    base.undetermined_cells()
        .into_iter()
        .map(|cell| {
            let (name, tuple) = base.describe_cell(cell);
            let value = b.holds(name, &tuple).expect("witness shares the frame");
            (name.to_string(), tuple.into_iter().map(String::from).collect(), value)
        })
        .collect()
}

pub fn cells_json(cells: &[(String, Vec<String>, bool)]) -> Value {
    Value::Array(
        cells
            .iter()
            .map(|(p, t, v)| json!({"predicate": p, "tuple": t, "value": if *v { "in" } else { "out" }}))
            .collect(),
    )
}

pub fn cells_lines(cells: &[(String, Vec<String>, bool)], indent: &str) -> Vec<String> {
    cells
        .iter()
        .map(|(p, t, v)| format!("{indent}{p}{} = {}", show_tuple(t), if *v { "in" } else { "out" }))
        .collect()
}

fn witness(kb: &KnowledgeBase, b: &TotalStructure, report: &mut Report) {
    let cells = resolved_cells(kb, b);
    let mut relations = serde_json::Map::new();
    report.lines.push("witness:".into());
    report.lines.extend(cells_lines(&cells, "  "));
    report.lines.push("relations in the witness:".into());
    for (name, arity) in kb.signature().predicates() {
        let held = b.as_partial().tuples(name, quasitruth_core::CellState::In);
        if arity == 0 {
            report.lines.push(format!("  {name}: {}", !held.is_empty()));
        } else {
            let shown: Vec<String> = held.iter().map(|t| show_tuple(t)).collect();
            report.lines.push(format!("  {name}: {{{}}}", shown.join(", ")));
        }
        relations.insert(name.to_string(), json!(held));
    }
    report.evidence = json!({"witness": cells_json(&cells), "relations": relations});
}

pub fn audit_evidence(a: &AuditReport) -> Value {
    json!({
        "mode": a.mode.as_str(),
        "missing": sentences(&a.missing),
        "forbidden": a.forbidden.iter().map(|f| json!({
            "sentence": f.sentence.to_string(),
            "contradicts": f.contradicts.to_string(),
        })).collect::<Vec<_>>(),
        "strict_extras": sentences(&a.strict_extras),
        "undetermined": sentences(&a.undetermined),
    })
}

pub fn audit_lines(a: &AuditReport) -> Vec<String> {
    let mut lines = vec![format!("mode: {}", a.mode.as_str())];
    let mut list = |title: &str, items: Vec<String>| {
        if !items.is_empty() {
            lines.push(format!("{title}:"));
            lines.extend(items.into_iter().map(|s| format!("  {s}")));
        }
    };
    list("missing", sentences(&a.missing));
    list(
        "forbidden",
        a.forbidden
            .iter()
            .map(|f| format!("{} (contradicts {})", f.sentence, f.contradicts))
            .collect(),
    );
    list("strict extras", sentences(&a.strict_extras));
    list("undetermined", sentences(&a.undetermined));
    lines
}

pub fn verdict_exit(v: &Verdict) -> u8 {
    match v {
        Verdict::True | Verdict::QuasiTrue { .. } => 0,
        Verdict::False | Verdict::QuasiFalse { .. } => 1,
        Verdict::FormalNonsense(FormalNonsense::Undeterminable { .. }) => 4,
        Verdict::FormalNonsense(_) => 3,
        Verdict::PragmaticNonsense(_) => 5,
    }
}

pub fn verdict_report(kb: &KnowledgeBase, v: &Verdict, visited: u64) -> Report {
    let mut r = Report::new("classify", v.label(), verdict_exit(v));
    r.budget_used = visited;
    match v {
        Verdict::True | Verdict::False => {
            r.evidence = json!({"path": "total"});
            r.lines.push("evaluated directly in the total structure".into());
        }
        Verdict::QuasiTrue { witness: b } => witness(kb, b, &mut r),
        Verdict::QuasiFalse { no_a_normal } => {
            r.evidence = json!({"no_a_normal": no_a_normal});
            if *no_a_normal {
                r.lines.push("no A-normal expansion exists".into());
            }
        }
        Verdict::FormalNonsense(FormalNonsense::IllFormed(n)) => {
            r.evidence = json!({"kind": "ill-formed", "position": n.position, "reason": n.reason});
            r.lines.push(n.to_string());
        }
        Verdict::FormalNonsense(FormalNonsense::NotInLanguage(e)) => {
            r.evidence = json!({"kind": "not-in-language", "reason": e.to_string()});
            r.lines.push(e.to_string());
        }
        Verdict::FormalNonsense(FormalNonsense::Undeterminable { visited }) => {
            r.evidence = json!({"kind": "undeterminable", "visited": visited});
            r.lines.push(format!(
                "budget exhausted after {visited} visits; existence undetermined"
            ));
        }
        Verdict::PragmaticNonsense(PragmaticNonsense::NotWellBuilt(a)) => {
            r.evidence = json!({"kind": "not-well-built", "audit": audit_evidence(a)});
            r.lines.push("the primary set is not well-built".into());
            r.lines.extend(audit_lines(a));
        }
        Verdict::PragmaticNonsense(PragmaticNonsense::NecessarilyExcluded { by }) => {
            r.evidence = json!({"kind": "necessarily-excluded", "by": by.to_string()});
            r.lines.push(format!("contradicts necessarily included {by}"));
        }
    }
    r
}
