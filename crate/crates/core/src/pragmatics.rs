//! Auditing primary sentences against the evidence pool, and the six-way
//! classification of sentences.
//!
//! A pool entry is *necessarily included* when it is relevant and true,
//! quasi-true or assumed true. A sentence is *necessarily excluded* when no
//! total expansion of the structure makes it true together with some
//! necessarily included sentence. The primary set is well built when it
//! contains every necessarily included sentence and no necessarily excluded
//! one; strict mode also rejects primary sentences that are not backed by
//! the pool.

use std::fmt;

use crate::eval::compile;
use crate::formula::{check_well_formed, universal_closure, Sentence, WellFormedError};
use crate::search::{find_with, ExistenceVerdict, Meter, SearchBudget, SearchReport};
use crate::structures::{KnowledgeBase, PoolEntry, Status, TotalStructure};
use crate::syntax::{parse_formula, Nonsense, ParseOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AuditMode {
    #[default]
    Literal,
    Strict,
}

impl AuditMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AuditMode::Literal => "literal",
            AuditMode::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exclusion {
    /// Jointly unsatisfiable with the necessarily included sentence `by`.
    Excluded {
        by: Sentence,
    },
    NotExcluded,
    /// Some check ran out of budget and none proved exclusion.
    Undetermined,
}

/// A primary sentence that must not be there, and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forbidden {
    pub sentence: Sentence,
    pub contradicts: Sentence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub mode: AuditMode,
    /// Necessarily included pool sentences absent from the primary set.
    pub missing: Vec<Sentence>,
    pub forbidden: Vec<Forbidden>,
    /// Strict mode only: primary sentences neither necessarily included nor
    /// excluded.
    pub strict_extras: Vec<Sentence>,
    /// Primary sentences whose exclusion could not be decided within budget.
    pub undetermined: Vec<Sentence>,
}

impl AuditReport {
    pub fn is_well_built(&self) -> bool {
        self.missing.is_empty() && self.forbidden.is_empty() && self.strict_extras.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormalNonsense {
    /// Text that is not a well-formed formula of the language.
    IllFormed(Nonsense),
    /// A syntax tree that does not fit the signature.
    NotInLanguage(WellFormedError),
    /// Whether an A-normal structure exists could not be settled within
    /// the budget.
    Undeterminable { visited: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PragmaticNonsense {
    NotWellBuilt(AuditReport),
    /// Adding the sentence would contradict a necessarily included one.
    NecessarilyExcluded {
        by: Sentence,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Tarskian truth in a total structure.
    True,
    False,
    QuasiTrue {
        witness: TotalStructure,
    },
    /// `no_a_normal` marks the degenerate case where no A-normal structure
    /// exists at all.
    QuasiFalse {
        no_a_normal: bool,
    },
    FormalNonsense(FormalNonsense),
    PragmaticNonsense(PragmaticNonsense),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::True => "TRUE",
            Verdict::False => "FALSE",
            Verdict::QuasiTrue { .. } => "QUASI-TRUE",
            Verdict::QuasiFalse { .. } => "QUASI-FALSE",
            Verdict::FormalNonsense(_) => "FORMAL-NONSENSE",
            Verdict::PragmaticNonsense(_) => "PRAGMATIC-NONSENSE",
        }
    }

    pub fn is_quasi_true(&self) -> bool {
        matches!(self, Verdict::QuasiTrue { .. })
    }

    pub fn is_quasi_false(&self) -> bool {
        matches!(self, Verdict::QuasiFalse { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn necessarily_included(entry: &PoolEntry) -> bool {
    entry.relevant && matches!(entry.status, Status::True | Status::QuasiTrue | Status::AssumedTrue)
}

fn included(kb: &KnowledgeBase) -> Vec<&Sentence> {
    let mut out: Vec<&Sentence> = Vec::new();
    for e in kb.pool().iter().filter(|e| necessarily_included(e)) {
        if !out.contains(&&e.sentence) {
            out.push(&e.sentence);
        }
    }
    out
}

fn exclusion_with(s: &Sentence, kb: &KnowledgeBase, meter: &mut Meter) -> Exclusion {
    let mut undetermined = false;
    for q in included(kb) {
        let verdict = find_with(kb.structure(), &[q, s], meter).expect("validated sentences");
        match verdict {
            ExistenceVerdict::NotExists => return Exclusion::Excluded { by: q.clone() },
            ExistenceVerdict::Exists(_) => {}
            ExistenceVerdict::Undetermined { .. } => undetermined = true,
        }
    }
    if undetermined {
        Exclusion::Undetermined
    } else {
        Exclusion::NotExcluded
    }
}

/// Whether `s` contradicts some necessarily included pool sentence over the
/// expansions of the knowledge base's structure.
pub fn necessarily_excluded(s: &Sentence, kb: &KnowledgeBase, budget: SearchBudget) -> SearchReport<Exclusion> {
    let mut meter = Meter::new(budget);
    let verdict = exclusion_with(s, kb, &mut meter);
    SearchReport {
        verdict,
        visited: meter.used(),
    }
}

fn audit_with(kb: &KnowledgeBase, mode: AuditMode, meter: &mut Meter) -> AuditReport {
    let included = included(kb);
    let missing = included
        .iter()
        .filter(|s| !kb.primary().contains(s))
        .map(|s| (*s).clone())
        .collect();
    let mut report = AuditReport {
        mode,
        missing,
        forbidden: Vec::new(),
        strict_extras: Vec::new(),
        undetermined: Vec::new(),
    };
    for p in kb.primary() {
        match exclusion_with(p, kb, meter) {
            Exclusion::Excluded { by } => report.forbidden.push(Forbidden {
                sentence: p.clone(),
                contradicts: by,
            }),
            Exclusion::Undetermined => report.undetermined.push(p.clone()),
            Exclusion::NotExcluded => {
                if mode == AuditMode::Strict && !included.contains(&p) {
                    report.strict_extras.push(p.clone());
                }
            }
        }
    }
    report
}

/// Checks the primary set against the pool.
pub fn audit_primary(kb: &KnowledgeBase, mode: AuditMode, budget: SearchBudget) -> SearchReport<AuditReport> {
    let mut meter = Meter::new(budget);
    let verdict = audit_with(kb, mode, &mut meter);
    SearchReport {
        verdict,
        visited: meter.used(),
    }
}

fn quasi_with(kb: &KnowledgeBase, s: &Sentence, meter: &mut Meter) -> Verdict {
    let primary: Vec<&Sentence> = kb.primary().iter().collect();
    match find_with(kb.structure(), &primary, meter).expect("validated kb") {
        ExistenceVerdict::Undetermined { visited } => {
            return Verdict::FormalNonsense(FormalNonsense::Undeterminable { visited })
        }
        ExistenceVerdict::NotExists => return Verdict::QuasiFalse { no_a_normal: true },
        ExistenceVerdict::Exists(_) => {}
    }
    let mut with_s = primary;
    with_s.push(s);
    match find_with(kb.structure(), &with_s, meter).expect("validated sentence") {
        ExistenceVerdict::Exists(witness) => Verdict::QuasiTrue { witness },
        ExistenceVerdict::NotExists => Verdict::QuasiFalse { no_a_normal: false },
        ExistenceVerdict::Undetermined { visited } => {
            Verdict::FormalNonsense(FormalNonsense::Undeterminable { visited })
        }
    }
}

/// Quasi-truth of `s` alone, without auditing: true in at least one
/// A-normal structure.
///
/// Panics if `s` is not well formed over the knowledge base's signature.
pub fn pragmatic_truth(kb: &KnowledgeBase, s: &Sentence, budget: SearchBudget) -> SearchReport<Verdict> {
    let mut meter = Meter::new(budget);
    let verdict = quasi_with(kb, s, &mut meter);
    SearchReport {
        verdict,
        visited: meter.used(),
    }
}

/// Classifies an already parsed sentence.
pub fn classify_sentence(
    kb: &KnowledgeBase,
    s: &Sentence,
    mode: AuditMode,
    budget: SearchBudget,
) -> SearchReport<Verdict> {
    if let Err(e) = check_well_formed(s.formula(), kb.signature()) {
        return SearchReport {
            verdict: Verdict::FormalNonsense(FormalNonsense::NotInLanguage(e)),
            visited: 0,
        };
    }
    let mut meter = Meter::new(budget);
    let verdict = classify_with(kb, s, mode, &mut meter);
    SearchReport {
        verdict,
        visited: meter.used(),
    }
}

fn classify_with(kb: &KnowledgeBase, s: &Sentence, mode: AuditMode, meter: &mut Meter) -> Verdict {
    let structure = kb.structure();
    if structure.is_total() {
        let holds = |x: &Sentence| {
            compile(x.formula(), structure)
                .expect("well-formed sentence")
                .eval_closed(structure)
        };
        if kb.primary().iter().all(holds) {
            return if holds(s) { Verdict::True } else { Verdict::False };
        }
    }

    let report = audit_with(kb, mode, meter);
    if !report.is_well_built() {
        return Verdict::PragmaticNonsense(PragmaticNonsense::NotWellBuilt(report));
    }
    if !report.undetermined.is_empty() {
        return Verdict::FormalNonsense(FormalNonsense::Undeterminable { visited: meter.used() });
    }

    match exclusion_with(s, kb, meter) {
        Exclusion::Excluded { by } => return Verdict::PragmaticNonsense(PragmaticNonsense::NecessarilyExcluded { by }),
        Exclusion::Undetermined => {
            return Verdict::FormalNonsense(FormalNonsense::Undeterminable { visited: meter.used() })
        }
        Exclusion::NotExcluded => {}
    }

    quasi_with(kb, s, meter)
}

/// Reads `text` over the knowledge base's signature and classifies it. Open
/// formulas are classified through their universal closure.
pub fn classify(kb: &KnowledgeBase, text: &str, mode: AuditMode, budget: SearchBudget) -> SearchReport<Verdict> {
    match parse_formula(text, kb.signature()) {
        ParseOutcome::FormalNonsense(n) => SearchReport {
            verdict: Verdict::FormalNonsense(FormalNonsense::IllFormed(n)),
            visited: 0,
        },
        ParseOutcome::Parsed(f) => classify_sentence(kb, &universal_closure(&f), mode, budget),
    }
}
