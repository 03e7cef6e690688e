//! CKA terms: syntax tree, parser, printer and finite pomset semantics.
//!
//! Concrete syntax, loosest to tightest binding:
//!
//! ```text
//! e ::= e + e | e || e | e ; e | e* | 0 | 1 | ident | @{o,...} | {p} | (e)
//! p ::= p | p | p & p | !p | T | F | ident | (p)
//! ```
//!
//! `.` is accepted as an alias for `;`. `@{...}` names an atom letter and
//! `{...}` a Boolean observation. All binary operators associate to the
//! left.

use std::collections::BTreeSet;
use std::fmt;

use crate::ckao::BoolTerm;
use crate::context::SpContext;
use crate::error::{Error, Result};
use crate::pomset::{lang_par, lang_seq, Label, PomsetLanguage, SpPomset};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    One,
    Act(Label),
    Obs(BoolTerm),
    Plus(Box<Term>, Box<Term>),
    Dot(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
    Star(Box<Term>),
}

impl Term {
    pub fn act(name: &str) -> Term {
        Term::Act(crate::pomset::lbl(name))
    }

    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }

    pub fn dot(a: Term, b: Term) -> Term {
        Term::Dot(Box::new(a), Box::new(b))
    }

    pub fn par(a: Term, b: Term) -> Term {
        Term::Par(Box::new(a), Box::new(b))
    }

    pub fn star(a: Term) -> Term {
        Term::Star(Box::new(a))
    }

    /// Sum of the given terms; `0` when empty.
    pub fn sum<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        terms.into_iter().reduce(Term::plus).unwrap_or(Term::Zero)
    }

    pub fn has_star(&self) -> bool {
        self.any(&|t| matches!(t, Term::Star(_)))
    }

    pub fn has_obs(&self) -> bool {
        self.any(&|t| matches!(t, Term::Obs(_)))
    }

    pub fn has_par(&self) -> bool {
        self.any(&|t| matches!(t, Term::Par(..)))
    }

    fn any(&self, pred: &dyn Fn(&Term) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Term::Plus(a, b) | Term::Dot(a, b) | Term::Par(a, b) => a.any(pred) || b.any(pred),
            Term::Star(a) => a.any(pred),
            _ => false,
        }
    }

    /// Action letters occurring in the term.
    pub fn letters(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Act(l) = t {
                out.insert(l.clone());
            }
        });
        out
    }

    /// Boolean observations occurring in the term.
    pub fn observations(&self) -> Vec<BoolTerm> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let Term::Obs(p) = t {
                out.push(p.clone());
            }
        });
        out
    }

    /// Number of leaves (`0`, `1`, letters and observations).
    pub fn leaf_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |t| {
            if matches!(t, Term::Zero | Term::One | Term::Act(_) | Term::Obs(_)) {
                n += 1;
            }
        });
        n
    }

    fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        match self {
            Term::Plus(a, b) | Term::Dot(a, b) | Term::Par(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Star(a) => a.visit(f),
            _ => {}
        }
    }

    /// Homomorphic rebuild replacing every leaf through `f`.
    pub fn map_leaves(&self, f: &mut dyn FnMut(&Term) -> Term) -> Term {
        match self {
            Term::Plus(a, b) => Term::plus(a.map_leaves(f), b.map_leaves(f)),
            Term::Dot(a, b) => Term::dot(a.map_leaves(f), b.map_leaves(f)),
            Term::Par(a, b) => Term::par(a.map_leaves(f), b.map_leaves(f)),
            Term::Star(a) => Term::star(a.map_leaves(f)),
            leaf => f(leaf),
        }
    }

    /// The term denoting exactly the given pomset.
    pub fn from_pomset(u: &SpPomset) -> Term {
        match u {
            SpPomset::Empty => Term::One,
            SpPomset::Prim(l) => Term::Act(l.clone()),
            SpPomset::Seq(cs) => cs.iter().map(Term::from_pomset).reduce(Term::dot).unwrap(),
            SpPomset::Par(cs) => cs.iter().map(Term::from_pomset).reduce(Term::par).unwrap(),
        }
    }

    /// The term denoting exactly the given finite language.
    pub fn from_language(l: &PomsetLanguage) -> Term {
        Term::sum(l.iter().map(Term::from_pomset))
    }
}

// Binding strength used by the printer.
const PREC_PLUS: u8 = 0;
const PREC_PAR: u8 = 1;
const PREC_DOT: u8 = 2;
const PREC_STAR: u8 = 3;

impl Term {
    fn prec(&self) -> u8 {
        match self {
            Term::Plus(..) => PREC_PLUS,
            Term::Par(..) => PREC_PAR,
            Term::Dot(..) => PREC_DOT,
            Term::Star(_) => PREC_STAR,
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Act(l) => write!(f, "{l}"),
            Term::Obs(p) => write!(f, "{{{p}}}"),
            Term::Plus(a, b) => {
                a.write_at(f, PREC_PLUS)?;
                f.write_str("+")?;
                b.write_at(f, PREC_PLUS + 1)
            }
            Term::Par(a, b) => {
                a.write_at(f, PREC_PAR)?;
                f.write_str("||")?;
                b.write_at(f, PREC_PAR + 1)
            }
            Term::Dot(a, b) => {
                a.write_at(f, PREC_DOT)?;
                f.write_str(";")?;
                b.write_at(f, PREC_DOT + 1)
            }
            Term::Star(a) => {
                a.write_at(f, PREC_STAR)?;
                f.write_str("*")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

pub fn parse_term(text: &str) -> Result<Term> {
    Parser::new(text, false).parse_all()
}

/// Parses a single pomset written as a `+`/`0`/`*`-free term.
pub fn parse_pomset(text: &str) -> Result<SpPomset> {
    let t = parse_term(text)?;
    single_pomset(&t, text)
}

/// Parses a context: a pomset term with exactly one `*` in operand position.
pub fn parse_context(text: &str) -> Result<SpContext> {
    let t = Parser::new(text, true).parse_all()?;
    let tree = single_pomset(&t, text)?;
    SpContext::from_tree(tree)
}

fn single_pomset(t: &Term, text: &str) -> Result<SpPomset> {
    let err = |m: &str| Error::Syntax {
        offset: 0,
        message: format!("{m}: `{text}`"),
    };
    if t.has_star() || t.has_obs() {
        return Err(err("expected a single pomset"));
    }
    let l = eval_starfree(t);
    if l.len() != 1 {
        return Err(err("expected a single pomset"));
    }
    Ok(l.into_iter().next().unwrap())
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    allow_hole: bool,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_hole: bool) -> Self {
        Parser {
            src,
            pos: 0,
            allow_hole,
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    fn parse_all(mut self) -> Result<Term> {
        let t = self.sum()?;
        if self.peek().is_some() {
            return self.error("unexpected trailing input");
        }
        Ok(t)
    }

    fn sum(&mut self) -> Result<Term> {
        let mut t = self.parallel()?;
        while self.eat("+") {
            t = Term::plus(t, self.parallel()?);
        }
        Ok(t)
    }

    fn parallel(&mut self) -> Result<Term> {
        let mut t = self.sequence()?;
        while self.eat("||") {
            t = Term::par(t, self.sequence()?);
        }
        Ok(t)
    }

    fn sequence(&mut self) -> Result<Term> {
        let mut t = self.postfix()?;
        while self.eat(";") || self.eat(".") {
            t = Term::dot(t, self.postfix()?);
        }
        Ok(t)
    }

    fn postfix(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        while self.eat("*") {
            t = Term::star(t);
        }
        Ok(t)
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_char() {
            Some(c) if is_ident_start(c) => {}
            _ => return self.error("expected an identifier"),
        }
        while let Some(c) = self.peek_char() {
            if is_ident_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek() {
            None => self.error("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect(")")?;
                Ok(t)
            }
            Some('0') => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Term::One)
            }
            Some('*') if self.allow_hole => {
                self.pos += 1;
                Ok(Term::Act(Label::hole()))
            }
            Some('@') => {
                self.pos += 1;
                self.expect("{")?;
                let mut names = BTreeSet::new();
                if !self.eat("}") {
                    loop {
                        names.insert(self.ident()?);
                        if self.eat("}") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                let body: Vec<String> = names.into_iter().collect();
                Ok(Term::Act(Label::new(format!("@{{{}}}", body.join(",")))?))
            }
            Some('{') => {
                self.pos += 1;
                let p = self.bool_or()?;
                self.expect("}")?;
                Ok(Term::Obs(p))
            }
            Some(c) if is_ident_start(c) => {
                let name = self.ident()?;
                Ok(Term::Act(Label::new(name)?))
            }
            Some(c) => self.error(format!("unexpected character `{c}`")),
        }
    }

    fn bool_or(&mut self) -> Result<BoolTerm> {
        let mut p = self.bool_and()?;
        // `||` never occurs inside an observation, so a single `|` is safe.
        while self.eat("|") {
            p = BoolTerm::or(p, self.bool_and()?);
        }
        Ok(p)
    }

    fn bool_and(&mut self) -> Result<BoolTerm> {
        let mut p = self.bool_not()?;
        while self.eat("&") {
            p = BoolTerm::and(p, self.bool_not()?);
        }
        Ok(p)
    }

    fn bool_not(&mut self) -> Result<BoolTerm> {
        if self.eat("!") {
            return Ok(BoolTerm::not(self.bool_not()?));
        }
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.bool_or()?;
                self.expect(")")?;
                Ok(p)
            }
            Some(c) if is_ident_start(c) => {
                let name = self.ident()?;
                match name.as_str() {
                    "T" => Ok(BoolTerm::Top),
                    "F" => Ok(BoolTerm::Bot),
                    _ => Ok(BoolTerm::Prim(name)),
                }
            }
            None => self.error("unexpected end of input in observation"),
            Some(c) => self.error(format!("unexpected character `{c}` in observation")),
        }
    }
}

/// Leaf bound for the semantics of terms with a star.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnrollBudget {
    pub max_nodes: usize,
}

impl UnrollBudget {
    pub fn new(max_nodes: usize) -> Self {
        UnrollBudget { max_nodes }
    }
}

/// `⟦e⟧` for a term without star or observations.
pub fn semantics_starfree(e: &Term) -> Result<PomsetLanguage> {
    if e.has_obs() {
        return Err(Error::ContainsObs);
    }
    if e.has_star() {
        return Err(Error::ContainsStar);
    }
    Ok(eval_starfree(e))
}

fn eval_starfree(e: &Term) -> PomsetLanguage {
    match e {
        Term::Zero => PomsetLanguage::new(),
        Term::One => PomsetLanguage::singleton(SpPomset::Empty),
        Term::Act(l) => PomsetLanguage::singleton(SpPomset::Prim(l.clone())),
        Term::Plus(a, b) => {
            let mut l = eval_starfree(a);
            l.extend(eval_starfree(b));
            l
        }
        Term::Dot(a, b) => lang_seq(&eval_starfree(a), &eval_starfree(b)),
        Term::Par(a, b) => lang_par(&eval_starfree(a), &eval_starfree(b)),
        Term::Obs(_) | Term::Star(_) => unreachable!("checked by the caller"),
    }
}

/// `{ u ∈ ⟦e⟧ : |u| ≤ k }`, exact for every `k`.
pub fn semantics_bounded(e: &Term, budget: UnrollBudget) -> Result<PomsetLanguage> {
    if e.has_obs() {
        return Err(Error::ContainsObs);
    }
    Ok(eval_bounded(e, budget.max_nodes))
}

fn bounded_product(
    l: &PomsetLanguage,
    k: &PomsetLanguage,
    bound: usize,
    op: fn(&SpPomset, &SpPomset) -> SpPomset,
) -> PomsetLanguage {
    let mut out = PomsetLanguage::new();
    for u in l {
        let su = u.size();
        for v in k {
            if su + v.size() <= bound {
                out.insert(op(u, v));
            }
        }
    }
    out
}

fn eval_bounded(e: &Term, bound: usize) -> PomsetLanguage {
    match e {
        Term::Zero => PomsetLanguage::new(),
        Term::One => PomsetLanguage::singleton(SpPomset::Empty),
        Term::Act(l) => {
            if bound >= 1 {
                PomsetLanguage::singleton(SpPomset::Prim(l.clone()))
            } else {
                PomsetLanguage::new()
            }
        }
        Term::Plus(a, b) => {
            let mut l = eval_bounded(a, bound);
            l.extend(eval_bounded(b, bound));
            l
        }
        Term::Dot(a, b) => bounded_product(
            &eval_bounded(a, bound),
            &eval_bounded(b, bound),
            bound,
            crate::pomset::seq,
        ),
        Term::Par(a, b) => bounded_product(
            &eval_bounded(a, bound),
            &eval_bounded(b, bound),
            bound,
            crate::pomset::par,
        ),
        Term::Star(a) => {
            // Every non-empty factor adds at least one event, so powers
            // beyond the bound contribute nothing new.
            let inner: PomsetLanguage = eval_bounded(a, bound)
                .into_iter()
                .filter(|u| !u.is_empty())
                .collect();
            let mut result = PomsetLanguage::singleton(SpPomset::Empty);
            let mut frontier = result.clone();
            while !frontier.is_empty() {
                let next = bounded_product(&frontier, &inner, bound, crate::pomset::seq);
                frontier = next.into_iter().filter(|u| !result.contains(u)).collect();
                result.extend(frontier.iter().cloned());
            }
            result
        }
        Term::Obs(_) => unreachable!("checked by the caller"),
    }
}
