//! Quasi-truth over finite partial structures.
//!
//! A knowledge base pairs a finite partial structure with a set of primary
//! sentences and a pool of available evidence. Sentences are classified as
//! true or false (total structures), quasi-true or quasi-false (truth in some
//! or no A-normal expansion), formal nonsense (ill formed, or existence of an
//! A-normal expansion undecided within budget) or pragmatic nonsense (the
//! primary set is not well built, or the sentence contradicts necessarily
//! included evidence).

pub mod eval;
pub mod formula;
pub mod kbfile;
pub mod pragmatics;
pub mod search;
pub mod structures;
pub mod syntax;

pub use eval::{is_true, satisfies, Assignment, EvalError};
pub use formula::{
    check_well_formed, free_vars, universal_closure, Formula, Sentence, Signature, Term, WellFormedError,
};
pub use kbfile::{parse_kb, KbError};
pub use pragmatics::{
    audit_primary, classify, classify_sentence, necessarily_excluded, necessarily_included, pragmatic_truth, AuditMode,
    AuditReport, Exclusion, FormalNonsense, PragmaticNonsense, Verdict,
};
pub use search::{
    count_a_normal, enumerate_expansions, find_a_normal, is_a_normal, list_a_normal, CountVerdict, ExistenceVerdict,
    Listing, SearchBudget, SearchReport,
};
pub use structures::{
    CellId, CellState, Domain, Fill, KnowledgeBase, PartialRelation, PartialStructure, PoolEntry, Status,
    TotalStructure,
};
pub use syntax::{parse_formula, print_formula, Nonsense, ParseOutcome};
