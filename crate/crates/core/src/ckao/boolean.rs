//! Boolean terms over a finite set of primitive observations, and atoms.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::pomset::Label;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolTerm {
    Bot,
    Top,
    Prim(String),
    Or(Box<BoolTerm>, Box<BoolTerm>),
    And(Box<BoolTerm>, Box<BoolTerm>),
    Not(Box<BoolTerm>),
}

impl BoolTerm {
    pub fn prim(name: &str) -> BoolTerm {
        BoolTerm::Prim(name.to_string())
    }

    pub fn or(p: BoolTerm, q: BoolTerm) -> BoolTerm {
        BoolTerm::Or(Box::new(p), Box::new(q))
    }

    pub fn and(p: BoolTerm, q: BoolTerm) -> BoolTerm {
        BoolTerm::And(Box::new(p), Box::new(q))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: BoolTerm) -> BoolTerm {
        BoolTerm::Not(Box::new(p))
    }

    /// The conjunction describing exactly `atom` over `omega`.
    pub fn of_atom(atom: &Atom, omega: &Omega) -> BoolTerm {
        omega
            .names()
            .iter()
            .map(|o| {
                if atom.contains(o) {
                    BoolTerm::prim(o)
                } else {
                    BoolTerm::not(BoolTerm::prim(o))
                }
            })
            .reduce(BoolTerm::and)
            .unwrap_or(BoolTerm::Top)
    }

    pub fn primitives(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_prims(&mut out);
        out
    }

    fn collect_prims(&self, out: &mut BTreeSet<String>) {
        match self {
            BoolTerm::Bot | BoolTerm::Top => {}
            BoolTerm::Prim(o) => {
                out.insert(o.clone());
            }
            BoolTerm::Or(p, q) | BoolTerm::And(p, q) => {
                p.collect_prims(out);
                q.collect_prims(out);
            }
            BoolTerm::Not(p) => p.collect_prims(out),
        }
    }

    /// Truth value under the assignment making exactly the members of `atom` true.
    pub fn eval(&self, atom: &Atom) -> bool {
        match self {
            BoolTerm::Bot => false,
            BoolTerm::Top => true,
            BoolTerm::Prim(o) => atom.contains(o),
            BoolTerm::Or(p, q) => p.eval(atom) || q.eval(atom),
            BoolTerm::And(p, q) => p.eval(atom) && q.eval(atom),
            BoolTerm::Not(p) => !p.eval(atom),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            BoolTerm::Or(..) => 0,
            BoolTerm::And(..) => 1,
            _ => 2,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            BoolTerm::Bot => f.write_str("F"),
            BoolTerm::Top => f.write_str("T"),
            BoolTerm::Prim(o) => f.write_str(o),
            BoolTerm::Or(p, q) => {
                p.write_at(f, 0)?;
                f.write_str("|")?;
                q.write_at(f, 1)
            }
            BoolTerm::And(p, q) => {
                p.write_at(f, 1)?;
                f.write_str("&")?;
                q.write_at(f, 2)
            }
            BoolTerm::Not(p) => {
                f.write_str("!")?;
                p.write_at(f, 2)
            }
        }
    }
}

impl fmt::Display for BoolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl fmt::Debug for BoolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Default upper bound on `|Ω|`; reification is exponential in it.
pub const DEFAULT_OMEGA_CAP: usize = 6;

/// A finite, sorted set of primitive observations.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Omega(Vec<String>);

impl Omega {
    /// Builds `Ω`, refusing more than [`DEFAULT_OMEGA_CAP`] observations.
    pub fn new<I, S>(names: I) -> Result<Omega>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Omega::with_cap(names, DEFAULT_OMEGA_CAP)
    }

    pub fn with_cap<I, S>(names: I, cap: usize) -> Result<Omega>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set: BTreeSet<String> = names.into_iter().map(|s| s.as_ref().to_string()).collect();
        for o in &set {
            let ok = o
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && o.chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                && o != "T"
                && o != "F";
            if !ok {
                return Err(Error::InvalidLabel(format!(
                    "`{o}` is not a valid observation name"
                )));
            }
        }
        if set.len() > cap {
            return Err(Error::PreconditionViolated(format!(
                "{} observations exceed the cap of {cap} ({} atoms)",
                set.len(),
                1u64 << set.len().min(63)
            )));
        }
        Ok(Omega(set.into_iter().collect()))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, o: &str) -> bool {
        self.0.binary_search_by(|x| x.as_str().cmp(o)).is_ok()
    }

    /// Fails on the first primitive of `p` outside `Ω`.
    pub fn check(&self, p: &BoolTerm) -> Result<()> {
        match p.primitives().into_iter().find(|o| !self.contains(o)) {
            Some(o) => Err(Error::UnknownObservation(o)),
            None => Ok(()),
        }
    }

    /// All `2^|Ω|` atoms, ordered by their labels.
    pub fn atoms(&self) -> Vec<Atom> {
        let n = self.0.len();
        let mut out: Vec<Atom> = (0u64..(1 << n))
            .map(|mask| {
                Atom(
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| self.0[i].clone())
                        .collect(),
                )
            })
            .collect();
        out.sort_by_cached_key(|a| a.to_string());
        out
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(","))
    }
}

/// A set of true observations; every other member of `Ω` is false.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom(BTreeSet<String>);

impl Atom {
    pub fn new<I, S>(names: I) -> Atom
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Atom(names.into_iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn contains(&self, o: &str) -> bool {
        self.0.contains(o)
    }

    pub fn members(&self) -> &BTreeSet<String> {
        &self.0
    }

    /// The letter `@{o,...}` standing for this atom.
    pub fn label(&self) -> Label {
        Label::new(self.to_string()).expect("atom labels are non-empty")
    }

    /// Inverse of [`Atom::label`].
    pub fn from_label(l: &Label) -> Option<Atom> {
        let body = l.as_str().strip_prefix("@{")?.strip_suffix('}')?;
        if body.is_empty() {
            return Some(Atom(BTreeSet::new()));
        }
        Some(Atom(body.split(',').map(str::to_string).collect()))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(String::as_str).collect();
        write!(f, "@{{{}}}", names.join(","))
    }
}

/// Atoms `α` with `π_α ≤ p`, by truth table.
pub fn atoms_below(p: &BoolTerm, omega: &Omega) -> Result<BTreeSet<Atom>> {
    omega.check(p)?;
    Ok(omega.atoms().into_iter().filter(|a| p.eval(a)).collect())
}

pub fn ba_equiv(p: &BoolTerm, q: &BoolTerm, omega: &Omega) -> Result<bool> {
    Ok(atoms_below(p, omega)? == atoms_below(q, omega)?)
}

pub fn ba_leq(p: &BoolTerm, q: &BoolTerm, omega: &Omega) -> Result<bool> {
    Ok(atoms_below(p, omega)?.is_subset(&atoms_below(q, omega)?))
}
