//! Total expansions of a partial structure and the search for A-normal ones.
//!
//! Expansions are ordered by binary counting over the undetermined cells:
//! cell `j` is digit `j` (little-endian), `0` sends the tuple to known-out
//! and `1` to known-in. The searching operations walk the same order with a
//! depth-first search that decides the most significant cell first, so the
//! first witness found is the first in enumeration order.
//!
//! After each decision every sentence whose atoms can only reach decided
//! cells is evaluated, and a failing sentence prunes the subtree. Work is
//! measured in visits: a node where sentences are evaluated, or a subtree
//! accepted whole, counts one. A [`SearchBudget`] caps the visits.

use std::num::NonZeroU64;

use num_bigint::BigUint;
use thiserror::Error;

use crate::eval::{compile, Arg, Compiled};
use crate::formula::{Sentence, WellFormedError};
use crate::structures::{CellId, CellState, KnowledgeBase, PartialStructure, TotalStructure};

/// Largest number of undetermined cells [`enumerate_expansions`] accepts.
pub const MAX_ENUMERATED_CELLS: usize = 62;

/// Upper bound on visits for one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchBudget(NonZeroU64);

impl SearchBudget {
    pub const DEFAULT_VISITS: u64 = 1 << 20;

    /// `None` for zero.
    pub fn new(visits: u64) -> Option<Self> {
        NonZeroU64::new(visits).map(SearchBudget)
    }

    pub fn unlimited() -> Self {
        SearchBudget(NonZeroU64::MAX)
    }

    pub fn visits(self) -> u64 {
        self.0.get()
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(Self::DEFAULT_VISITS).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exhausted;

/// Visit counter shared by every search made on behalf of one request.
#[derive(Debug, Clone)]
pub(crate) struct Meter {
    limit: u64,
    used: u64,
}

impl Meter {
    pub(crate) fn new(budget: SearchBudget) -> Self {
        Meter {
            limit: budget.visits(),
            used: 0,
        }
    }

    fn tick(&mut self) -> Result<(), Exhausted> {
        if self.used >= self.limit {
            return Err(Exhausted);
        }
        self.used += 1;
        Ok(())
    }

    pub(crate) fn used(&self) -> u64 {
        self.used
    }
}

/// Outcome of a search together with the visits it consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport<T> {
    pub verdict: T,
    pub visited: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExistenceVerdict {
    Exists(TotalStructure),
    NotExists,
    /// The budget ran out before the question was settled.
    Undetermined {
        visited: u64,
    },
}

impl ExistenceVerdict {
    pub fn witness(&self) -> Option<&TotalStructure> {
        match self {
            ExistenceVerdict::Exists(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountVerdict {
    Exact(BigUint),
    Undetermined { visited: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Listing {
    /// Every A-normal structure, in enumeration order.
    Complete(Vec<TotalStructure>),
    Undetermined {
        visited: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} undetermined cells; full enumeration is limited to {MAX_ENUMERATED_CELLS}")]
pub struct TooManyCells(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the structure does not share the knowledge base's signature, domain and constants")]
pub struct FrameMismatch;

/// Iterator over all total expansions in enumeration order.
#[derive(Debug, Clone)]
pub struct Expansions<'a> {
    base: &'a PartialStructure,
    cells: Vec<CellId>,
    next: u64,
    end: u64,
}

impl Iterator for Expansions<'_> {
    type Item = TotalStructure;

    fn next(&mut self) -> Option<TotalStructure> {
        if self.next >= self.end {
            return None;
        }
        let index = self.next;
        self.next += 1;
        let mut s = self.base.clone();
        for (j, cell) in self.cells.iter().enumerate() {
            let state = if index >> j & 1 == 1 {
                CellState::In
            } else {
                CellState::Out
            };
            s.relation_at_mut(cell.predicate).set(cell.rank, state);
        }
        Some(TotalStructure::from_resolved(s))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.end - self.next).ok();
        (left.unwrap_or(usize::MAX), left)
    }
}

/// All 2^k total expansions of `s`.
pub fn enumerate_expansions(s: &PartialStructure) -> Result<Expansions<'_>, TooManyCells> {
    let cells = s.undetermined_cells();
    if cells.len() > MAX_ENUMERATED_CELLS {
        return Err(TooManyCells(cells.len()));
    }
    Ok(Expansions {
        base: s,
        end: 1u64 << cells.len(),
        cells,
        next: 0,
    })
}

/// Whether `b` expands the knowledge base's structure and makes every
/// primary sentence true.
pub fn is_a_normal(kb: &KnowledgeBase, b: &TotalStructure) -> Result<bool, FrameMismatch> {
    let base = kb.structure();
    if !base.same_frame(b) {
        return Err(FrameMismatch);
    }
    if !base.is_expanded_by(b) {
        return Ok(false);
    }
    Ok(kb.primary().iter().all(|p| {
        compile(p.formula(), b.as_partial())
            .expect("primary sentences are well-formed")
            .eval_closed(b.as_partial())
    }))
}

/// First A-normal structure in enumeration order in which `constraint`
/// (if any) is also true.
pub fn find_a_normal(
    kb: &KnowledgeBase,
    constraint: Option<&Sentence>,
    budget: SearchBudget,
) -> Result<SearchReport<ExistenceVerdict>, WellFormedError> {
    let mut meter = Meter::new(budget);
    let mut sentences: Vec<&Sentence> = kb.primary().iter().collect();
    sentences.extend(constraint);
    let verdict = find_with(kb.structure(), &sentences, &mut meter)?;
    Ok(SearchReport {
        verdict,
        visited: meter.used(),
    })
}

/// Number of A-normal structures.
pub fn count_a_normal(kb: &KnowledgeBase, budget: SearchBudget) -> SearchReport<CountVerdict> {
    let mut meter = Meter::new(budget);
    let sentences: Vec<&Sentence> = kb.primary().iter().collect();
    let mut search = Search::new(kb.structure(), &sentences, Mode::Count).expect("validated kb");
    let verdict = match search.run(&mut meter) {
        Ok(()) => CountVerdict::Exact(search.count),
        Err(Exhausted) => CountVerdict::Undetermined { visited: meter.used() },
    };
    SearchReport {
        verdict,
        visited: meter.used(),
    }
}

/// Every A-normal structure, one visit per structure at least.
pub fn list_a_normal(kb: &KnowledgeBase, budget: SearchBudget) -> SearchReport<Listing> {
    let mut meter = Meter::new(budget);
    let sentences: Vec<&Sentence> = kb.primary().iter().collect();
    let mut search = Search::new(kb.structure(), &sentences, Mode::Collect).expect("validated kb");
    let verdict = match search.run(&mut meter) {
        Ok(()) => Listing::Complete(search.found),
        Err(Exhausted) => Listing::Undetermined { visited: meter.used() },
    };
    SearchReport {
        verdict,
        visited: meter.used(),
    }
}

/// Existence search drawing on a shared meter.
pub(crate) fn find_with(
    base: &PartialStructure,
    sentences: &[&Sentence],
    meter: &mut Meter,
) -> Result<ExistenceVerdict, WellFormedError> {
    let mut search = Search::new(base, sentences, Mode::First)?;
    Ok(match search.run(meter) {
        Ok(()) => match search.found.pop() {
            Some(w) => ExistenceVerdict::Exists(w),
            None => ExistenceVerdict::NotExists,
        },
        Err(Exhausted) => ExistenceVerdict::Undetermined { visited: meter.used() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    First,
    Count,
    Collect,
}

struct Search {
    frame: PartialStructure,
    cells: Vec<CellId>,
    /// `checks[d]`: sentences that become decidable once `d` cells are set.
    checks: Vec<Vec<Compiled>>,
    /// Depth by which every sentence has been checked.
    settled: usize,
    mode: Mode,
    count: BigUint,
    found: Vec<TotalStructure>,
}

impl Search {
    fn new(base: &PartialStructure, sentences: &[&Sentence], mode: Mode) -> Result<Self, WellFormedError> {
        let cells = base.undetermined_cells();
        let k = cells.len();
        let mut checks: Vec<Vec<Compiled>> = vec![Vec::new(); k + 1];
        let mut settled = 0;
        for s in sentences {
            let compiled = compile(s.formula(), base)?;
            let depth = match lowest_reachable_cell(&compiled, base, &cells) {
                Some(i) => k - i,
                None => 0,
            };
            settled = settled.max(depth);
            checks[depth].push(compiled);
        }
        Ok(Search {
            frame: base.clone(),
            cells,
            checks,
            settled,
            mode,
            count: BigUint::ZERO,
            found: Vec::new(),
        })
    }

    fn run(&mut self, meter: &mut Meter) -> Result<(), Exhausted> {
        self.node(0, meter).map(|_| ())
    }

    /// Returns `true` when the search should stop.
    fn node(&mut self, depth: usize, meter: &mut Meter) -> Result<bool, Exhausted> {
        let k = self.cells.len();
        let checks = &self.checks[depth];
        if !checks.is_empty() {
            meter.tick()?;
            if !checks.iter().all(|c| c.eval_closed(&self.frame)) {
                return Ok(false);
            }
        }
        if depth >= self.settled && (self.mode != Mode::Collect || depth == k) {
            if self.checks[depth].is_empty() {
                meter.tick()?;
            }
            // every remaining cell is free
            let free = k - depth;
            return Ok(match self.mode {
                Mode::First => {
                    let mut w = self.frame.clone();
                    for cell in &self.cells[..free] {
                        w.relation_at_mut(cell.predicate).set(cell.rank, CellState::Out);
                    }
                    self.found.push(TotalStructure::from_resolved(w));
                    true
                }
                Mode::Count => {
                    self.count += BigUint::from(1u8) << free;
                    false
                }
                Mode::Collect => {
                    self.found.push(TotalStructure::from_resolved(self.frame.clone()));
                    false
                }
            });
        }
        let cell = self.cells[k - 1 - depth];
        for state in [CellState::Out, CellState::In] {
            self.frame.relation_at_mut(cell.predicate).set(cell.rank, state);
            if self.node(depth + 1, meter)? {
                return Ok(true);
            }
        }
        self.frame
            .relation_at_mut(cell.predicate)
            .set(cell.rank, CellState::Undetermined);
        Ok(false)
    }
}

/// Smallest index into `cells` that some atom of `c` could read, treating
/// every variable as ranging over the whole domain.
fn lowest_reachable_cell(c: &Compiled, base: &PartialStructure, cells: &[CellId]) -> Option<usize> {
    let domain = base.domain();
    let atoms = c.atoms();
    cells.iter().position(|cell| {
        atoms.iter().any(|(p, args)| {
            *p == cell.predicate
                && domain
                    .unrank(cell.rank, args.len())
                    .iter()
                    .zip(args.iter())
                    .all(|(e, a)| match a {
                        Arg::Element(x) => x == e,
                        Arg::Slot(_) => true,
                    })
        })
    })
}
