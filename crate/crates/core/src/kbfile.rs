//! JSON knowledge-base files.
//!
//! ```json
//! {
//!   "signature": { "predicates": {"Father": 2, "alpha": 0},
//!                  "constants": ["joseph", "peter"], "equality": false },
//!   "domain": ["Joseph", "Peter"],
//!   "constant_map": {"joseph": "Joseph", "peter": "Peter"},
//!   "relations": { "Father": { "known_in": [], "known_out": [...], "unknown": [["Joseph","Peter"]] },
//!                  "alpha":  { "unknown": [[]] } },
//!   "primary_sentences": ["alpha -> Father(joseph, peter)"],
//!   "candidate_pool": [ {"sentence": "alpha", "relevant": true, "status": "true"} ]
//! }
//! ```
//!
//! For each predicate `known_in`, `known_out` and `unknown` must partition
//! D^n exactly. An optional `"default": "out" | "unknown"` sends every
//! unlisted tuple to that block instead. Unknown keys are ignored.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::Deserialize;
use thiserror::Error;

use crate::formula::{Sentence, Signature, SignatureError};
use crate::structures::{
    Domain, Fill, KnowledgeBase, KnowledgeBaseError, PartialRelation, PartialStructure, PoolEntry, Status,
    StructureError, Tuple,
};
use crate::syntax::{parse_formula, Nonsense, ParseOutcome};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("malformed knowledge base: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("signature: {0}")]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("{location}: formal nonsense {nonsense}")]
    FormalNonsense { location: String, nonsense: Nonsense },
    #[error("{location}: {reason}")]
    NotASentence { location: String, reason: String },
    #[error(transparent)]
    KnowledgeBase(#[from] KnowledgeBaseError),
}

impl KbError {
    /// Predicate and tuple named by a partition violation, if any.
    pub fn offending_cell(&self) -> Option<(&str, &[String])> {
        match self {
            KbError::Structure(StructureError::Relation { predicate, source }) => match &**source {
                StructureError::Overlap { tuple, .. }
                | StructureError::Uncovered { tuple }
                | StructureError::BadArity { tuple, .. }
                | StructureError::UnknownElement { tuple, .. } => Some((predicate, tuple)),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
struct FileSignature {
    predicates: IndexMap<String, usize>,
    #[serde(default)]
    constants: Vec<String>,
    #[serde(default)]
    equality: bool,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FileDefault {
    Out,
    Unknown,
}

#[derive(Debug, Deserialize)]
struct FileRelation {
    #[serde(default)]
    known_in: Vec<Tuple>,
    #[serde(default)]
    known_out: Vec<Tuple>,
    #[serde(default)]
    unknown: Vec<Tuple>,
    #[serde(default)]
    default: Option<FileDefault>,
}

#[derive(Debug, Deserialize)]
struct FilePoolEntry {
    sentence: String,
    relevant: bool,
    status: Status,
}

#[derive(Debug, Deserialize)]
struct KbFile {
    signature: FileSignature,
    domain: Vec<String>,
    #[serde(default)]
    constant_map: IndexMap<String, String>,
    relations: IndexMap<String, FileRelation>,
    #[serde(default)]
    primary_sentences: Vec<String>,
    #[serde(default)]
    candidate_pool: Vec<FilePoolEntry>,
}

fn read_sentence(text: &str, sig: &Signature, location: String) -> Result<Sentence, KbError> {
    match parse_formula(text, sig) {
        ParseOutcome::FormalNonsense(nonsense) => Err(KbError::FormalNonsense { location, nonsense }),
        ParseOutcome::Parsed(f) => Sentence::new(f).map_err(|e| KbError::NotASentence {
            location,
            reason: e.to_string(),
        }),
    }
}

/// Reads and validates a knowledge base.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    let file: KbFile = serde_json::from_str(text)?;
    let sig = Arc::new(Signature::new(
        file.signature.predicates,
        file.signature.constants,
        file.signature.equality,
    )?);
    let domain = Domain::new(file.domain)?;

    let mut relations = Vec::with_capacity(file.relations.len());
    for (name, rel) in file.relations {
        let arity = sig
            .arity(&name)
            .ok_or_else(|| StructureError::UnexpectedRelation(name.clone()))?;
        let fill = match rel.default {
            None => Fill::Explicit,
            Some(FileDefault::Out) => Fill::RestOut,
            Some(FileDefault::Unknown) => Fill::RestUndetermined,
        };
        let built =
            PartialRelation::new(&domain, arity, &rel.known_in, &rel.known_out, &rel.unknown, fill).map_err(|e| {
                StructureError::Relation {
                    predicate: name.clone(),
                    source: Box::new(e),
                }
            })?;
        relations.push((name, built));
    }
    let structure = PartialStructure::new(sig.clone(), Arc::new(domain), relations, file.constant_map)?;

    let primary = file
        .primary_sentences
        .iter()
        .enumerate()
        .map(|(i, t)| read_sentence(t, &sig, format!("primary_sentences[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let pool = file
        .candidate_pool
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(PoolEntry {
                sentence: read_sentence(&e.sentence, &sig, format!("candidate_pool[{i}]"))?,
                relevant: e.relevant,
                status: e.status,
            })
        })
        .collect::<Result<Vec<_>, KbError>>()?;

    Ok(KnowledgeBase::new(structure, primary, pool)?)
}
