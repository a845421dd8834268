//! Signatures, terms and first-order formula trees.
//!
//! The language has predicate letters (arity 0 admitted as propositional
//! constants), individual constants and, optionally, equality. There are no
//! function letters.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

pub(crate) const KEYWORDS: [&str; 2] = ["forall", "exists"];

/// `[A-Za-z_][A-Za-z0-9_]*`, excluding the quantifier keywords.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("predicate `{0}` declared twice")]
    DuplicatePredicate(String),
    #[error("constant `{0}` declared twice")]
    DuplicateConstant(String),
    #[error("`{0}` is declared both as a predicate and as a constant")]
    NameClash(String),
}

/// Predicate letters with their arities, individual constants, and whether
/// `=` belongs to the language.
///
/// Declaration order is preserved; it fixes the order in which undetermined
/// cells of a structure are enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    predicates: IndexMap<String, usize>,
    constants: IndexSet<String>,
    equality: bool,
}

impl Signature {
    pub fn new<P, C, S, T>(predicates: P, constants: C, equality: bool) -> Result<Self, SignatureError>
    where
        P: IntoIterator<Item = (S, usize)>,
        C: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut preds = IndexMap::new();
        for (name, arity) in predicates {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(SignatureError::InvalidName(name));
            }
            if preds.insert(name.clone(), arity).is_some() {
                return Err(SignatureError::DuplicatePredicate(name));
            }
        }
        let mut consts = IndexSet::new();
        for name in constants {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(SignatureError::InvalidName(name));
            }
            if preds.contains_key(&name) {
                return Err(SignatureError::NameClash(name));
            }
            if !consts.insert(name.clone()) {
                return Err(SignatureError::DuplicateConstant(name));
            }
        }
        Ok(Signature {
            predicates: preds,
            constants: consts,
            equality,
        })
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.predicates.get(predicate).copied()
    }

    /// Position of `predicate` in declaration order.
    pub fn predicate_index(&self, predicate: &str) -> Option<usize> {
        self.predicates.get_index_of(predicate)
    }

    pub fn predicate_at(&self, index: usize) -> Option<(&str, usize)> {
        self.predicates.get_index(index).map(|(n, a)| (n.as_str(), *a))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.get_index_of(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.constants.iter().map(String::as_str)
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }

    pub fn equality(&self) -> bool {
        self.equality
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Equals(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(predicate.into(), args)
    }

    /// An arity-0 atom.
    pub fn prop(predicate: impl Into<String>) -> Self {
        Formula::Atom(predicate.into(), Vec::new())
    }

    pub fn equals(lhs: Term, rhs: Term) -> Self {
        Formula::Equals(lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::ForAll(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn is_sentence(&self) -> bool {
        free_vars(self).is_empty()
    }

    /// Nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Equals(..) => 0,
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }
}

/// Variables occurring free in `f`.
pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Variable(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match f {
            Formula::Atom(_, args) => args.iter().for_each(|t| term(t, bound)),
            Formula::Equals(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(g) => walk(g, bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                walk(a, bound, out);
                walk(b, bound, out);
            }
            Formula::ForAll(v, g) | Formula::Exists(v, g) => {
                bound.push(v.clone());
                walk(g, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormedError {
    #[error("predicate `{predicate}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("equality is not part of this language")]
    EqualityDisabled,
}

/// Checks `f` against `sig`, reporting the first violation in
/// leftmost-innermost order.
pub fn check_well_formed(f: &Formula, sig: &Signature) -> Result<(), WellFormedError> {
    let term = |t: &Term| match t {
        Term::Constant(c) if !sig.has_constant(c) => Err(WellFormedError::UnknownConstant(c.clone())),
        _ => Ok(()),
    };
    match f {
        Formula::Atom(p, args) => {
            args.iter().try_for_each(term)?;
            let expected = sig
                .arity(p)
                .ok_or_else(|| WellFormedError::UnknownPredicate(p.clone()))?;
            if expected != args.len() {
                return Err(WellFormedError::ArityMismatch {
                    predicate: p.clone(),
                    expected,
                    found: args.len(),
                });
            }
            Ok(())
        }
        Formula::Equals(a, b) => {
            term(a)?;
            term(b)?;
            if sig.equality() {
                Ok(())
            } else {
                Err(WellFormedError::EqualityDisabled)
            }
        }
        Formula::Not(g) | Formula::ForAll(_, g) | Formula::Exists(_, g) => check_well_formed(g, sig),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_well_formed(a, sig)?;
            check_well_formed(b, sig)
        }
    }
}

/// Universal closure over the free variables, the lexicographically
/// smallest variable outermost. Sentences are returned unchanged.
pub fn universal_closure(f: &Formula) -> Sentence {
    let closed = free_vars(f)
        .into_iter()
        .rev()
        .fold(f.clone(), |body, v| Formula::forall(v, body));
    Sentence(closed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula has free variable(s): {}", .0.join(", "))]
pub struct OpenFormula(pub Vec<String>);

/// A formula without free variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence(Formula);

impl Sentence {
    pub fn new(f: Formula) -> Result<Self, OpenFormula> {
        let free = free_vars(&f);
        if free.is_empty() {
            Ok(Sentence(f))
        } else {
            Err(OpenFormula(free.into_iter().collect()))
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }

    pub fn negated(&self) -> Sentence {
        Sentence(Formula::not(self.0.clone()))
    }
}

impl AsRef<Formula> for Sentence {
    fn as_ref(&self) -> &Formula {
        &self.0
    }
}

impl TryFrom<Formula> for Sentence {
    type Error = OpenFormula;

    fn try_from(f: Formula) -> Result<Self, Self::Error> {
        Sentence::new(f)
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
