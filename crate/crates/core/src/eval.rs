//! Satisfaction and truth in total structures.
//!
//! Formulas are first compiled against a structure: predicates and constants
//! become indices, variables become environment slots. Quantifiers extend the
//! environment rather than substituting into the formula, so no capture can
//! occur.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{check_well_formed, universal_closure, Formula, Term, WellFormedError};
use crate::structures::{CellState, PartialStructure, TotalStructure};

/// Variable bindings to domain elements, by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: impl Into<String>, element: impl Into<String>) -> Self {
        self.0.insert(var.into(), element.into());
        self
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is free and unassigned")]
    UnboundVariable(String),
    #[error("variable `{var}` is assigned `{element}`, which is not a domain element")]
    UnknownElement { var: String, element: String },
    #[error(transparent)]
    IllFormed(#[from] WellFormedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Arg {
    Element(usize),
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Atom(usize, Vec<Arg>),
    Equals(Arg, Arg),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    ForAll(usize, Box<Node>),
    Exists(usize, Box<Node>),
}

/// A formula resolved against one structure's signature and domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Compiled {
    pub(crate) root: Node,
    /// Names of the free variables, occupying slots `0..free.len()`.
    pub(crate) free: Vec<String>,
    pub(crate) slots: usize,
}

/// Anything that answers membership queries for resolved cells.
pub(crate) trait Model {
    fn domain_len(&self) -> usize;
    fn holds(&self, predicate: usize, rank: usize) -> bool;
}

impl Model for PartialStructure {
    fn domain_len(&self) -> usize {
        self.domain().len()
    }

    fn holds(&self, predicate: usize, rank: usize) -> bool {
        let state = self.relation_at(predicate).state(rank);
        debug_assert_ne!(state, CellState::Undetermined, "read of an unresolved cell");
        state == CellState::In
    }
}

pub(crate) fn compile(f: &Formula, s: &PartialStructure) -> Result<Compiled, WellFormedError> {
    check_well_formed(f, s.signature())?;
    let free: Vec<String> = crate::formula::free_vars(f).into_iter().collect();
    let mut scope: Vec<(String, usize)> = free.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let mut slots = free.len();
    let root = lower(f, s, &mut scope, &mut slots);
    Ok(Compiled { root, free, slots })
}

fn lower(f: &Formula, s: &PartialStructure, scope: &mut Vec<(String, usize)>, next: &mut usize) -> Node {
    let arg = |t: &Term, scope: &Vec<(String, usize)>| match t {
        Term::Constant(c) => {
            let ci = s.signature().constant_index(c).expect("checked constant");
            Arg::Element(s.constant_value(ci))
        }
        Term::Variable(v) => {
            let (_, slot) = scope.iter().rev().find(|(n, _)| n == v).expect("scoped variable");
            Arg::Slot(*slot)
        }
    };
    let both = |a: &Formula, b: &Formula, scope: &mut Vec<(String, usize)>, next: &mut usize| {
        (Box::new(lower(a, s, scope, next)), Box::new(lower(b, s, scope, next)))
    };
    match f {
        Formula::Atom(p, args) => Node::Atom(
            s.signature().predicate_index(p).expect("checked predicate"),
            args.iter().map(|t| arg(t, scope)).collect(),
        ),
        Formula::Equals(a, b) => Node::Equals(arg(a, scope), arg(b, scope)),
        Formula::Not(g) => Node::Not(Box::new(lower(g, s, scope, next))),
        Formula::And(a, b) => {
            let (a, b) = both(a, b, scope, next);
            Node::And(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = both(a, b, scope, next);
            Node::Or(a, b)
        }
        Formula::Implies(a, b) => {
            let (a, b) = both(a, b, scope, next);
            Node::Implies(a, b)
        }
        Formula::Iff(a, b) => {
            let (a, b) = both(a, b, scope, next);
            Node::Iff(a, b)
        }
        Formula::ForAll(v, g) | Formula::Exists(v, g) => {
            let slot = *next;
            *next += 1;
            scope.push((v.clone(), slot));
            let body = Box::new(lower(g, s, scope, next));
            scope.pop();
            if matches!(f, Formula::ForAll(..)) {
                Node::ForAll(slot, body)
            } else {
                Node::Exists(slot, body)
            }
        }
    }
}

impl Compiled {
    /// Evaluates with `env` holding one element per slot; the free-variable
    /// slots must already be filled.
    pub(crate) fn eval<M: Model + ?Sized>(&self, m: &M, env: &mut [usize]) -> bool {
        eval_node(&self.root, m, env)
    }

    pub(crate) fn eval_closed<M: Model + ?Sized>(&self, m: &M) -> bool {
        debug_assert!(self.free.is_empty());
        let mut env = vec![0; self.slots];
        self.eval(m, &mut env)
    }

    /// Predicate and argument pattern of each atom occurrence.
    pub(crate) fn atoms(&self) -> Vec<(usize, &[Arg])> {
        fn walk<'a>(n: &'a Node, out: &mut Vec<(usize, &'a [Arg])>) {
            match n {
                Node::Atom(p, args) => out.push((*p, args)),
                Node::Equals(..) => {}
                Node::Not(g) | Node::ForAll(_, g) | Node::Exists(_, g) => walk(g, out),
                Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

fn value(a: Arg, env: &[usize]) -> usize {
    match a {
        Arg::Element(e) => e,
        Arg::Slot(s) => env[s],
    }
}

// Quantifiers short-circuit in domain order.
fn eval_node<M: Model + ?Sized>(n: &Node, m: &M, env: &mut [usize]) -> bool {
    match n {
        Node::Atom(p, args) => {
            let size = m.domain_len();
            let rank = args.iter().fold(0, |acc, a| acc * size + value(*a, env));
            m.holds(*p, rank)
        }
        Node::Equals(a, b) => value(*a, env) == value(*b, env),
        Node::Not(g) => !eval_node(g, m, env),
        Node::And(a, b) => eval_node(a, m, env) && eval_node(b, m, env),
        Node::Or(a, b) => eval_node(a, m, env) || eval_node(b, m, env),
        Node::Implies(a, b) => !eval_node(a, m, env) || eval_node(b, m, env),
        Node::Iff(a, b) => eval_node(a, m, env) == eval_node(b, m, env),
        Node::ForAll(slot, g) => (0..m.domain_len()).all(|e| {
            env[*slot] = e;
            eval_node(g, m, env)
        }),
        Node::Exists(slot, g) => (0..m.domain_len()).any(|e| {
            env[*slot] = e;
            eval_node(g, m, env)
        }),
    }
}

/// Whether `env` satisfies `f` in `b`.
pub fn satisfies(b: &TotalStructure, env: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    let c = compile(f, b.as_partial())?;
    let mut slots = vec![0; c.slots];
    for (i, v) in c.free.iter().enumerate() {
        let element = env.get(v).ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
        slots[i] = b.domain().index_of(element).ok_or_else(|| EvalError::UnknownElement {
            var: v.clone(),
            element: element.to_string(),
        })?;
    }
    Ok(c.eval(b.as_partial(), &mut slots))
}

/// Truth of `f` in `b`; open formulas are read through their universal
/// closure.
pub fn is_true(b: &TotalStructure, f: &Formula) -> Result<bool, WellFormedError> {
    let closed = universal_closure(f);
    let c = compile(closed.formula(), b.as_partial())?;
    Ok(c.eval_closed(b.as_partial()))
}
