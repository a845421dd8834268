//! Partial relations, partial and total structures, and knowledge bases.
//!
//! A partial relation of arity n splits D^n into three disjoint blocks: tuples
//! known to belong to the relation, tuples known not to belong, and tuples
//! whose membership is undetermined. Relations are stored densely, one
//! [`CellState`] per tuple, so the partition invariant holds by
//! construction once the input lists have been checked.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{check_well_formed, Sentence, Signature, WellFormedError};

/// A tuple of domain element names.
pub type Tuple = Vec<String>;

pub(crate) fn show_tuple<S: AsRef<str>>(t: &[S]) -> String {
    let parts: Vec<&str> = t.iter().map(AsRef::as_ref).collect();
    format!("<{}>", parts.join(", "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellState {
    /// Known to hold.
    In,
    /// Known not to hold.
    Out,
    Undetermined,
}

impl CellState {
    fn block(self) -> &'static str {
        match self {
            CellState::In => "known_in",
            CellState::Out => "known_out",
            CellState::Undetermined => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("the domain is empty")]
    EmptyDomain,
    #[error("domain element `{0}` listed twice")]
    DuplicateElement(String),
    #[error("{}: expected {expected} component(s)", show_tuple(.tuple))]
    BadArity { tuple: Tuple, expected: usize },
    #[error("{}: `{element}` is not a domain element", show_tuple(.tuple))]
    UnknownElement { tuple: Tuple, element: String },
    #[error("{} is listed in both {} and {}", show_tuple(.tuple), .first.block(), .second.block())]
    Overlap {
        tuple: Tuple,
        first: CellState,
        second: CellState,
    },
    #[error("{} is in none of known_in, known_out, unknown", show_tuple(.tuple))]
    Uncovered { tuple: Tuple },
    #[error("arity {arity} over {size} element(s) is too large to represent")]
    TooLarge { arity: usize, size: usize },
    #[error("relation `{predicate}`: {source}")]
    Relation {
        predicate: String,
        #[source]
        source: Box<StructureError>,
    },
    #[error("no relation given for predicate `{0}`")]
    MissingRelation(String),
    #[error("relation `{0}` does not match any predicate of the signature")]
    UnexpectedRelation(String),
    #[error("relation `{predicate}` has arity {found}, the signature declares {expected}")]
    RelationArity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("constant `{0}` has no denotation")]
    UnmappedConstant(String),
    #[error("`{0}` is not a constant of the signature")]
    UnknownConstant(String),
    #[error("constant `{constant}` denotes `{element}`, which is not a domain element")]
    ConstantOutsideDomain { constant: String, element: String },
}

/// Finite, ordered, nonempty set of opaque element names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    elements: Vec<String>,
    index: HashMap<String, usize>,
}

impl Domain {
    pub fn new<I, S>(elements: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        Ok(Domain { elements, index })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, index: usize) -> &str {
        &self.elements[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// |D|^arity, if it fits in memory-addressable range.
    pub fn tuple_count(&self, arity: usize) -> Option<usize> {
        u32::try_from(arity).ok().and_then(|a| self.len().checked_pow(a))
    }

    /// Position of a tuple of element indices in lexicographic domain order.
    pub fn rank(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.len() + e)
    }

    pub fn unrank(&self, mut rank: usize, arity: usize) -> Vec<usize> {
        let mut out = vec![0; arity];
        for slot in out.iter_mut().rev() {
            *slot = rank % self.len();
            rank /= self.len();
        }
        out
    }

    pub fn tuple_names(&self, rank: usize, arity: usize) -> Vec<&str> {
        self.unrank(rank, arity).into_iter().map(|i| self.name(i)).collect()
    }

    fn resolve(&self, tuple: &[String], arity: usize) -> Result<usize, StructureError> {
        if tuple.len() != arity {
            return Err(StructureError::BadArity {
                tuple: tuple.to_vec(),
                expected: arity,
            });
        }
        let mut idx = Vec::with_capacity(arity);
        for e in tuple {
            match self.index_of(e) {
                Some(i) => idx.push(i),
                None => {
                    return Err(StructureError::UnknownElement {
                        tuple: tuple.to_vec(),
                        element: e.clone(),
                    })
                }
            }
        }
        Ok(self.rank(&idx))
    }
}

/// Where tuples not named by any list go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fill {
    /// The three lists must already cover D^n.
    #[default]
    Explicit,
    RestOut,
    RestUndetermined,
}

/// The triple (known-in, known-out, undetermined) over D^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialRelation {
    arity: usize,
    cells: Vec<CellState>,
}

impl PartialRelation {
    /// Builds a relation from explicit tuple lists.
    ///
    /// A tuple may repeat within one list but may not appear in two.
    pub fn new(
        domain: &Domain,
        arity: usize,
        known_in: &[Tuple],
        known_out: &[Tuple],
        unknown: &[Tuple],
        fill: Fill,
    ) -> Result<Self, StructureError> {
        let size = domain.tuple_count(arity).ok_or(StructureError::TooLarge {
            arity,
            size: domain.len(),
        })?;
        let mut cells: Vec<Option<CellState>> = vec![None; size];
        for (list, state) in [
            (known_in, CellState::In),
            (known_out, CellState::Out),
            (unknown, CellState::Undetermined),
        ] {
            for tuple in list {
                let r = domain.resolve(tuple, arity)?;
                match cells[r] {
                    Some(prev) if prev != state => {
                        return Err(StructureError::Overlap {
                            tuple: tuple.clone(),
                            first: prev,
                            second: state,
                        })
                    }
                    _ => cells[r] = Some(state),
                }
            }
        }
        let cells = cells
            .into_iter()
            .enumerate()
            .map(|(r, c)| match (c, fill) {
                (Some(s), _) => Ok(s),
                (None, Fill::RestOut) => Ok(CellState::Out),
                (None, Fill::RestUndetermined) => Ok(CellState::Undetermined),
                (None, Fill::Explicit) => Err(StructureError::Uncovered {
                    tuple: domain.tuple_names(r, arity).into_iter().map(String::from).collect(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PartialRelation { arity, cells })
    }

    /// A relation in which every tuple has the same state.
    pub fn uniform(domain: &Domain, arity: usize, state: CellState) -> Result<Self, StructureError> {
        let size = domain.tuple_count(arity).ok_or(StructureError::TooLarge {
            arity,
            size: domain.len(),
        })?;
        Ok(PartialRelation {
            arity,
            cells: vec![state; size],
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn state(&self, rank: usize) -> CellState {
        self.cells[rank]
    }

    pub(crate) fn set(&mut self, rank: usize, state: CellState) {
        self.cells[rank] = state;
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Ranks of the tuples in `state`, ascending.
    pub fn ranks(&self, state: CellState) -> impl Iterator<Item = usize> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(move |(_, s)| **s == state)
            .map(|(r, _)| r)
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|s| **s == state).count()
    }

    pub fn is_total(&self) -> bool {
        !self.cells.contains(&CellState::Undetermined)
    }
}

/// Index of an undetermined tuple: the predicate's position in the signature
/// and the tuple's rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub predicate: usize,
    pub rank: usize,
}

/// Domain, one partial relation per predicate, and constant denotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialStructure {
    signature: Arc<Signature>,
    domain: Arc<Domain>,
    relations: Vec<PartialRelation>,
    constants: Vec<usize>,
}

impl PartialStructure {
    /// `relations` and `constant_map` are keyed by name and must match the
    /// signature exactly.
    pub fn new<R, C, S, T>(
        signature: Arc<Signature>,
        domain: Arc<Domain>,
        relations: R,
        constant_map: C,
    ) -> Result<Self, StructureError>
    where
        R: IntoIterator<Item = (S, PartialRelation)>,
        C: IntoIterator<Item = (T, String)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut slots: Vec<Option<PartialRelation>> = vec![None; signature.predicate_count()];
        for (name, rel) in relations {
            let name = name.into();
            let Some(i) = signature.predicate_index(&name) else {
                return Err(StructureError::UnexpectedRelation(name));
            };
            let expected = signature.arity(&name).unwrap_or_default();
            if rel.arity() != expected || rel.len() != domain.tuple_count(expected).unwrap_or(0) {
                return Err(StructureError::RelationArity {
                    predicate: name,
                    expected,
                    found: rel.arity(),
                });
            }
            slots[i] = Some(rel);
        }
        let relations = slots
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| StructureError::MissingRelation(signature.predicate_at(i).unwrap().0.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut consts: Vec<Option<usize>> = vec![None; signature.constant_count()];
        for (name, element) in constant_map {
            let name = name.into();
            let Some(ci) = signature.constant_index(&name) else {
                return Err(StructureError::UnknownConstant(name));
            };
            let Some(e) = domain.index_of(&element) else {
                return Err(StructureError::ConstantOutsideDomain {
                    constant: name,
                    element,
                });
            };
            consts[ci] = Some(e);
        }
        let constants = consts
            .into_iter()
            .zip(signature.constants())
            .map(|(e, name)| e.ok_or_else(|| StructureError::UnmappedConstant(name.to_string())))
            .collect::<Result<Vec<_>, _>>()?;

        Ok(PartialStructure {
            signature,
            domain,
            relations,
            constants,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn shared_signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn relation(&self, predicate: &str) -> Option<&PartialRelation> {
        self.signature.predicate_index(predicate).map(|i| &self.relations[i])
    }

    pub fn relation_at(&self, index: usize) -> &PartialRelation {
        &self.relations[index]
    }

    pub(crate) fn relation_at_mut(&mut self, index: usize) -> &mut PartialRelation {
        &mut self.relations[index]
    }

    /// Element index denoted by the constant at `index` in the signature.
    pub fn constant_value(&self, index: usize) -> usize {
        self.constants[index]
    }

    pub fn denotation(&self, constant: &str) -> Option<&str> {
        self.signature
            .constant_index(constant)
            .map(|i| self.domain.name(self.constants[i]))
    }

    /// State of a named tuple, or `None` if the predicate or an element is
    /// unknown or the length is wrong.
    pub fn state_of<S: AsRef<str>>(&self, predicate: &str, tuple: &[S]) -> Option<CellState> {
        let rel = self.relation(predicate)?;
        if tuple.len() != rel.arity() {
            return None;
        }
        let idx = tuple
            .iter()
            .map(|e| self.domain.index_of(e.as_ref()))
            .collect::<Option<Vec<_>>>()?;
        Some(rel.state(self.domain.rank(&idx)))
    }

    /// Named tuples of `predicate` in `state`, in lexicographic domain order.
    pub fn tuples(&self, predicate: &str, state: CellState) -> Vec<Tuple> {
        let Some(rel) = self.relation(predicate) else {
            return Vec::new();
        };
        rel.ranks(state)
            .map(|r| {
                self.domain
                    .tuple_names(r, rel.arity())
                    .into_iter()
                    .map(String::from)
                    .collect()
            })
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.relations.iter().all(PartialRelation::is_total)
    }

    /// Undetermined cells, predicates in declaration order and tuples in
    /// lexicographic domain order.
    pub fn undetermined_cells(&self) -> Vec<CellId> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(p, rel)| {
                rel.ranks(CellState::Undetermined)
                    .map(move |rank| CellId { predicate: p, rank })
            })
            .collect()
    }

    /// Predicate name and element names of a cell.
    pub fn describe_cell(&self, cell: CellId) -> (&str, Vec<&str>) {
        let (name, arity) = self.signature.predicate_at(cell.predicate).expect("cell predicate");
        (name, self.domain.tuple_names(cell.rank, arity))
    }

    /// Same signature, domain and constant denotations.
    pub fn same_frame(&self, other: &PartialStructure) -> bool {
        self.signature == other.signature && self.domain == other.domain && self.constants == other.constants
    }

    /// True if `other` shares the frame of `self` and agrees with every
    /// known cell of `self`.
    pub fn is_expanded_by(&self, other: &PartialStructure) -> bool {
        self.same_frame(other)
            && self.relations.iter().zip(&other.relations).all(|(mine, theirs)| {
                mine.cells
                    .iter()
                    .zip(&theirs.cells)
                    .all(|(a, b)| *a == CellState::Undetermined || a == b)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("structure has {0} undetermined cell(s)")]
pub struct NotTotal(pub usize);

/// A partial structure with no undetermined cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalStructure(PartialStructure);

impl TotalStructure {
    pub fn as_partial(&self) -> &PartialStructure {
        &self.0
    }

    pub fn into_partial(self) -> PartialStructure {
        self.0
    }

    /// Whether the tuple holds; `None` for an unknown predicate or element.
    pub fn holds<S: AsRef<str>>(&self, predicate: &str, tuple: &[S]) -> Option<bool> {
        self.0.state_of(predicate, tuple).map(|s| s == CellState::In)
    }

    pub(crate) fn from_resolved(s: PartialStructure) -> Self {
        debug_assert!(s.is_total());
        TotalStructure(s)
    }
}

impl TryFrom<PartialStructure> for TotalStructure {
    type Error = NotTotal;

    fn try_from(s: PartialStructure) -> Result<Self, Self::Error> {
        let open = s.undetermined_cells().len();
        if open == 0 {
            Ok(TotalStructure(s))
        } else {
            Err(NotTotal(open))
        }
    }
}

impl Deref for TotalStructure {
    type Target = PartialStructure;

    fn deref(&self) -> &PartialStructure {
        &self.0
    }
}

impl fmt::Display for PartialStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {{{}}}", self.domain.elements().join(", "))?;
        for (name, _) in self.signature.predicates() {
            let show = |state| {
                self.tuples(name, state)
                    .iter()
                    .map(|t| show_tuple(t))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            writeln!(
                f,
                "{name}: in {{{}}} out {{{}}} unknown {{{}}}",
                show(CellState::In),
                show(CellState::Out),
                show(CellState::Undetermined)
            )?;
        }
        Ok(())
    }
}

/// Epistemic standing of an available sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    True,
    QuasiTrue,
    AssumedTrue,
    Untrusted,
}

/// A sentence available as evidence, with user-supplied relevance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolEntry {
    pub sentence: Sentence,
    pub relevant: bool,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnowledgeBaseError {
    #[error("{location}: {source}")]
    IllFormed {
        location: String,
        #[source]
        source: WellFormedError,
    },
}

/// A partial structure with its primary sentences and the pool of available
/// evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    structure: PartialStructure,
    primary: Vec<Sentence>,
    pool: Vec<PoolEntry>,
}

impl KnowledgeBase {
    pub fn new(
        structure: PartialStructure,
        primary: Vec<Sentence>,
        pool: Vec<PoolEntry>,
    ) -> Result<Self, KnowledgeBaseError> {
        let sig = structure.signature();
        for (i, s) in primary.iter().enumerate() {
            check_well_formed(s.formula(), sig).map_err(|source| KnowledgeBaseError::IllFormed {
                location: format!("primary_sentences[{i}]"),
                source,
            })?;
        }
        for (i, e) in pool.iter().enumerate() {
            check_well_formed(e.sentence.formula(), sig).map_err(|source| KnowledgeBaseError::IllFormed {
                location: format!("candidate_pool[{i}]"),
                source,
            })?;
        }
        Ok(KnowledgeBase {
            structure,
            primary,
            pool,
        })
    }

    pub fn signature(&self) -> &Signature {
        self.structure.signature()
    }

    pub fn structure(&self) -> &PartialStructure {
        &self.structure
    }

    pub fn primary(&self) -> &[Sentence] {
        &self.primary
    }

    pub fn pool(&self) -> &[PoolEntry] {
        &self.pool
    }

    /// Same structure and pool, different primary sentences.
    pub fn with_primary(&self, primary: Vec<Sentence>) -> Result<Self, KnowledgeBaseError> {
        KnowledgeBase::new(self.structure.clone(), primary, self.pool.clone())
    }

    pub fn with_pool(&self, pool: Vec<PoolEntry>) -> Result<Self, KnowledgeBaseError> {
        KnowledgeBase::new(self.structure.clone(), self.primary.clone(), pool)
    }
}
