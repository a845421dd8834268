//! Concrete syntax for formulas.
//!
//! ```text
//! formula  := iff
//! iff      := implies ("<->" implies)*
//! implies  := or ("->" implies)?
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "~" unary | ("forall" | "exists") ident "." formula
//!           | "(" formula ")" | atomic
//! atomic   := ident "(" term ("," term)* ")" | ident | term "=" term
//! ```
//!
//! Quantifier bodies extend as far right as possible. An identifier in term
//! position is a bound variable if a quantifier binds it, a constant if the
//! signature declares it, and a free variable otherwise.

use std::fmt;

use crate::formula::{Formula, Signature, Term};

/// Result of reading a formula: either a well-formed formula or formal
/// nonsense located at a 1-based character offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseOutcome {
    Parsed(Formula),
    FormalNonsense(Nonsense),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nonsense {
    /// 1-based character offset.
    pub position: usize,
    pub reason: String,
}

impl fmt::Display for Nonsense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: {}", self.position, self.reason)
    }
}

impl ParseOutcome {
    pub fn into_result(self) -> Result<Formula, Nonsense> {
        match self {
            ParseOutcome::Parsed(f) => Ok(f),
            ParseOutcome::FormalNonsense(n) => Err(n),
        }
    }

    pub fn is_parsed(&self) -> bool {
        matches!(self, ParseOutcome::Parsed(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("`{n}`"),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, Nonsense> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                _ => Tok::Ident(word),
            };
            out.push(Token { tok, pos });
            continue;
        }
        let (tok, width) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '~' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '=' => (Tok::Eq, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Implies, 2),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => (Tok::Iff, 3),
            _ => {
                return Err(Nonsense {
                    position: pos,
                    reason: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push(Token { tok, pos });
        i += width;
    }
    // end of input is reported at the last character so that every position
    // stays within the text
    out.push(Token {
        tok: Tok::Eof,
        pos: chars.len().max(1),
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    at: usize,
    sig: &'a Signature,
    bound: Vec<String>,
}

type PResult<T> = Result<T, Nonsense>;

fn nonsense<T>(position: usize, reason: impl Into<String>) -> PResult<T> {
    Err(Nonsense {
        position,
        reason: reason.into(),
    })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> &Token {
        let t = &self.tokens[self.at];
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            return Ok(());
        }
        let t = self.peek();
        nonsense(
            t.pos,
            format!("expected {}, found {}", tok.describe(), t.tok.describe()),
        )
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        let (tok, pos) = {
            let t = self.peek();
            (t.tok.clone(), t.pos)
        };
        match tok {
            Tok::Not => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let universal = matches!(tok, Tok::Forall);
                self.next();
                let var = self.binder()?;
                self.expect(Tok::Dot)?;
                self.bound.push(var.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(if universal {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.next();
                self.atomic(name, pos)
            }
            other => nonsense(pos, format!("expected a formula, found {}", other.describe())),
        }
    }

    fn binder(&mut self) -> PResult<String> {
        let (tok, pos) = {
            let t = self.next();
            (t.tok.clone(), t.pos)
        };
        match tok {
            Tok::Ident(name) => {
                if self.sig.has_constant(&name) {
                    nonsense(pos, format!("cannot quantify over constant `{name}`"))
                } else if self.sig.arity(&name).is_some() {
                    nonsense(pos, format!("cannot quantify over predicate `{name}`"))
                } else {
                    Ok(name)
                }
            }
            other => nonsense(pos, format!("expected a variable, found {}", other.describe())),
        }
    }

    fn atomic(&mut self, name: String, pos: usize) -> PResult<Formula> {
        if self.sig.arity(&name).is_some() || self.peek().tok == Tok::LParen {
            return self.application(name, pos);
        }
        let lhs = self.resolve_term(name, pos)?;
        let eq_pos = self.peek().pos;
        if !self.eat(&Tok::Eq) {
            let t = self.peek();
            return nonsense(
                t.pos,
                format!(
                    "term `{}` is not a formula; expected `=`, found {}",
                    lhs.name(),
                    t.tok.describe()
                ),
            );
        }
        let rhs = match &self.peek().tok {
            Tok::Ident(_) => self.term()?,
            Tok::Eof => return nonsense(eq_pos, "`=` is missing its right-hand term"),
            other => {
                let msg = format!("expected a term after `=`, found {}", other.describe());
                return nonsense(self.peek().pos, msg);
            }
        };
        if !self.sig.equality() {
            return nonsense(eq_pos, "equality is not part of this language");
        }
        Ok(Formula::equals(lhs, rhs))
    }

    fn application(&mut self, name: String, pos: usize) -> PResult<Formula> {
        let Some(arity) = self.sig.arity(&name) else {
            return nonsense(pos, format!("unknown predicate `{name}`"));
        };
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            args.push(self.term()?);
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        } else if self.peek().tok == Tok::Eq {
            return nonsense(pos, format!("predicate `{name}` used as a term"));
        }
        if args.len() != arity {
            return nonsense(
                pos,
                format!("predicate `{name}` takes {arity} argument(s), found {}", args.len()),
            );
        }
        Ok(Formula::atom(name, args))
    }

    fn term(&mut self) -> PResult<Term> {
        let (tok, pos) = {
            let t = self.next();
            (t.tok.clone(), t.pos)
        };
        match tok {
            Tok::Ident(name) => self.resolve_term(name, pos),
            other => nonsense(pos, format!("expected a term, found {}", other.describe())),
        }
    }

    fn resolve_term(&self, name: String, pos: usize) -> PResult<Term> {
        if self.bound.contains(&name) {
            Ok(Term::Variable(name))
        } else if self.sig.has_constant(&name) {
            Ok(Term::Constant(name))
        } else if self.sig.arity(&name).is_some() {
            nonsense(pos, format!("predicate `{name}` used as a term"))
        } else {
            Ok(Term::Variable(name))
        }
    }
}

/// Reads `text` as a formula over `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> ParseOutcome {
    let run = || -> PResult<Formula> {
        let tokens = lex(text)?;
        let mut p = Parser {
            tokens,
            at: 0,
            sig,
            bound: Vec::new(),
        };
        let f = p.formula()?;
        let t = p.peek();
        if t.tok != Tok::Eof {
            return nonsense(t.pos, format!("unexpected {}", t.tok.describe()));
        }
        Ok(f)
    };
    match run() {
        Ok(f) => {
            debug_assert!(crate::formula::check_well_formed(&f, sig).is_ok());
            ParseOutcome::Parsed(f)
        }
        Err(n) => ParseOutcome::FormalNonsense(n),
    }
}

// Binding strength, loosest first.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;

fn binary(f: &Formula) -> Option<(&Formula, &Formula, u8, &'static str)> {
    match f {
        Formula::Iff(a, b) => Some((a, b, IFF, "<->")),
        Formula::Implies(a, b) => Some((a, b, IMPLIES, "->")),
        Formula::Or(a, b) => Some((a, b, OR, "|")),
        Formula::And(a, b) => Some((a, b, AND, "&")),
        _ => None,
    }
}

fn write_term(t: &Term, out: &mut String) {
    out.push_str(t.name());
}

/// `tail` is true when more text follows at the same nesting level, in which
/// case an open-ended quantifier must be closed off with parentheses.
fn write_formula(f: &Formula, min: u8, tail: bool, out: &mut String) {
    match f {
        Formula::Atom(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                out.push('(');
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(t, out);
                }
                out.push(')');
            }
        }
        Formula::Equals(a, b) => {
            write_term(a, out);
            out.push_str(" = ");
            write_term(b, out);
        }
        Formula::Not(g) => {
            out.push('~');
            write_formula(g, AND + 1, tail, out);
        }
        Formula::ForAll(v, g) | Formula::Exists(v, g) => {
            let kw = if matches!(f, Formula::ForAll(..)) {
                "forall"
            } else {
                "exists"
            };
            if tail {
                out.push('(');
            }
            out.push_str(kw);
            out.push(' ');
            out.push_str(v);
            out.push_str(". ");
            write_formula(g, IFF, false, out);
            if tail {
                out.push(')');
            }
        }
        _ => {
            let (a, b, prec, op) = binary(f).expect("binary connective");
            let paren = prec < min;
            let tail = tail && !paren;
            if paren {
                out.push('(');
            }
            // `->` associates to the right, the others to the left
            let (lmin, rmin) = if prec == IMPLIES {
                (prec + 1, prec)
            } else {
                (prec, prec + 1)
            };
            write_formula(a, lmin, true, out);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            write_formula(b, rmin, tail, out);
            if paren {
                out.push(')');
            }
        }
    }
}

/// Canonical text of `f`, parenthesised only where needed.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, IFF, false, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}
