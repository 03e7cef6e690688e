//! Canonical series-parallel pomsets and finite pomset languages.
//!
//! A series-parallel pomset is stored as a normalised term tree: sequential
//! nodes are flattened, parallel nodes are flattened and sorted, and the
//! empty pomset only ever appears at the top level. Two values of
//! [`SpPomset`] are equal exactly when the pomsets they denote are
//! isomorphic, so `Eq`/`Hash`/`Ord` can be used for deduplication.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::Error;

const HOLE: &str = "*";

/// A letter of the alphabet. The hole marker `*` is not a valid label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(name: impl AsRef<str>) -> Result<Self, Error> {
        let name = name.as_ref();
        if name.is_empty() {
            return Err(Error::InvalidLabel("empty label".into()));
        }
        if name == HOLE {
            return Err(Error::InvalidLabel(
                "`*` is reserved for context holes".into(),
            ));
        }
        Ok(Label(Arc::from(name)))
    }

    /// The reserved hole marker. Only contexts carry it.
    pub(crate) fn hole() -> Self {
        Label(Arc::from(HOLE))
    }

    pub fn is_hole(&self) -> bool {
        &*self.0 == HOLE
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand used throughout the tests: panics on invalid names.
pub fn lbl(name: &str) -> Label {
    Label::new(name).expect("valid label")
}

/// A series-parallel pomset in canonical form.
///
/// Variant order matters: it fixes the canonical sort order of parallel
/// children and the order in which languages are listed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpPomset {
    Empty,
    Prim(Label),
    Par(Vec<SpPomset>),
    Seq(Vec<SpPomset>),
}

impl SpPomset {
    pub fn prim(label: Label) -> Self {
        SpPomset::Prim(label)
    }

    /// Single-letter pomset; panics on an invalid name.
    pub fn letter(name: &str) -> Self {
        SpPomset::Prim(lbl(name))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SpPomset::Empty)
    }

    /// Sequential composition of any number of pomsets.
    pub fn seq_all<I: IntoIterator<Item = SpPomset>>(parts: I) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                SpPomset::Empty => {}
                SpPomset::Seq(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => SpPomset::Empty,
            1 => out.pop().unwrap(),
            _ => SpPomset::Seq(out),
        }
    }

    /// Parallel composition of any number of pomsets.
    pub fn par_all<I: IntoIterator<Item = SpPomset>>(parts: I) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                SpPomset::Empty => {}
                SpPomset::Par(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => SpPomset::Empty,
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                SpPomset::Par(out)
            }
        }
    }

    /// Number of events (leaves).
    pub fn size(&self) -> usize {
        match self {
            SpPomset::Empty => 0,
            SpPomset::Prim(_) => 1,
            SpPomset::Seq(cs) | SpPomset::Par(cs) => cs.iter().map(SpPomset::size).sum(),
        }
    }

    /// Leaf labels in left-to-right order.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut Vec<Label>) {
        match self {
            SpPomset::Empty => {}
            SpPomset::Prim(l) => out.push(l.clone()),
            SpPomset::Seq(cs) | SpPomset::Par(cs) => {
                cs.iter().for_each(|c| c.collect_labels(out));
            }
        }
    }

    /// Label multiset as a sorted map of counts.
    pub fn label_multiset(&self) -> BTreeMap<Label, usize> {
        let mut m = BTreeMap::new();
        for l in self.labels() {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    }

    /// Factors of the top-level sequential decomposition.
    pub fn seq_factors(&self) -> Vec<SpPomset> {
        match self {
            SpPomset::Empty => Vec::new(),
            SpPomset::Seq(cs) => cs.clone(),
            other => vec![other.clone()],
        }
    }

    /// Components of the top-level parallel decomposition.
    pub fn par_factors(&self) -> Vec<SpPomset> {
        match self {
            SpPomset::Empty => Vec::new(),
            SpPomset::Par(cs) => cs.clone(),
            other => vec![other.clone()],
        }
    }

    /// True iff the pomset is totally ordered (a word, possibly empty).
    pub fn is_word(&self) -> bool {
        match self {
            SpPomset::Empty | SpPomset::Prim(_) => true,
            SpPomset::Seq(cs) => cs.iter().all(|c| matches!(c, SpPomset::Prim(_))),
            SpPomset::Par(_) => false,
        }
    }

    pub(crate) fn contains_hole(&self) -> bool {
        match self {
            SpPomset::Empty => false,
            SpPomset::Prim(l) => l.is_hole(),
            SpPomset::Seq(cs) | SpPomset::Par(cs) => cs.iter().any(SpPomset::contains_hole),
        }
    }

    /// Checks the canonical-form invariants: flattening, unit-freeness below
    /// the root and sorted parallel children.
    pub fn is_canonical(&self) -> bool {
        self.canonical_below(true)
    }

    fn canonical_below(&self, root: bool) -> bool {
        match self {
            SpPomset::Empty => root,
            SpPomset::Prim(_) => true,
            SpPomset::Seq(cs) => {
                cs.len() >= 2
                    && cs
                        .iter()
                        .all(|c| !matches!(c, SpPomset::Seq(_)) && c.canonical_below(false))
            }
            SpPomset::Par(cs) => {
                cs.len() >= 2
                    && cs.windows(2).all(|w| w[0] <= w[1])
                    && cs
                        .iter()
                        .all(|c| !matches!(c, SpPomset::Par(_)) && c.canonical_below(false))
            }
        }
    }

    /// Applies `f` to every label, recanonicalising along the way.
    pub fn map_labels(&self, f: &mut impl FnMut(&Label) -> Label) -> SpPomset {
        match self {
            SpPomset::Empty => SpPomset::Empty,
            SpPomset::Prim(l) => SpPomset::Prim(f(l)),
            SpPomset::Seq(cs) => SpPomset::seq_all(cs.iter().map(|c| c.map_labels(f))),
            SpPomset::Par(cs) => SpPomset::par_all(cs.iter().map(|c| c.map_labels(f))),
        }
    }
}

/// Sequential composition `u · v`.
pub fn seq(u: &SpPomset, v: &SpPomset) -> SpPomset {
    SpPomset::seq_all([u.clone(), v.clone()])
}

/// Parallel composition `u ∥ v`.
pub fn par(u: &SpPomset, v: &SpPomset) -> SpPomset {
    SpPomset::par_all([u.clone(), v.clone()])
}

impl fmt::Display for SpPomset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpPomset::Empty => f.write_str("1"),
            SpPomset::Prim(l) => write!(f, "{l}"),
            SpPomset::Seq(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    if matches!(c, SpPomset::Par(_)) {
                        write!(f, "({c})")?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                Ok(())
            }
            SpPomset::Par(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("||")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for SpPomset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

/// A finite set of series-parallel pomsets.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PomsetLanguage(BTreeSet<SpPomset>);

impl PomsetLanguage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(u: SpPomset) -> Self {
        let mut l = Self::new();
        l.insert(u);
        l
    }

    pub fn insert(&mut self, u: SpPomset) -> bool {
        self.0.insert(u)
    }

    pub fn contains(&self, u: &SpPomset) -> bool {
        self.0.contains(u)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SpPomset> + '_ {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &PomsetLanguage) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn extend<I: IntoIterator<Item = SpPomset>>(&mut self, items: I) {
        self.0.extend(items);
    }

    /// Largest member size, 0 for the empty language.
    pub fn max_size(&self) -> usize {
        self.0.iter().map(SpPomset::size).max().unwrap_or(0)
    }

    /// All labels used by some member.
    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.0.iter().flat_map(|u| u.labels()).collect()
    }
}

impl FromIterator<SpPomset> for PomsetLanguage {
    fn from_iter<T: IntoIterator<Item = SpPomset>>(iter: T) -> Self {
        PomsetLanguage(iter.into_iter().collect())
    }
}

impl IntoIterator for PomsetLanguage {
    type Item = SpPomset;
    type IntoIter = std::collections::btree_set::IntoIter<SpPomset>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a PomsetLanguage {
    type Item = &'a SpPomset;
    type IntoIter = std::collections::btree_set::Iter<'a, SpPomset>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for PomsetLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

pub fn lang_seq(l: &PomsetLanguage, k: &PomsetLanguage) -> PomsetLanguage {
    l.iter()
        .flat_map(|u| k.iter().map(move |v| seq(u, v)))
        .collect()
}

pub fn lang_par(l: &PomsetLanguage, k: &PomsetLanguage) -> PomsetLanguage {
    l.iter()
        .flat_map(|u| k.iter().map(move |v| par(u, v)))
        .collect()
}

pub fn lang_union(l: &PomsetLanguage, k: &PomsetLanguage) -> PomsetLanguage {
    l.iter().chain(k.iter()).cloned().collect()
}

/// Members with at most `k` events.
pub fn lang_size_filter(l: &PomsetLanguage, k: usize) -> PomsetLanguage {
    l.iter().filter(|u| u.size() <= k).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> SpPomset {
        SpPomset::letter("a")
    }
    fn b() -> SpPomset {
        SpPomset::letter("b")
    }
    fn c() -> SpPomset {
        SpPomset::letter("c")
    }

    #[test]
    fn seq_units_and_flattening() {
        assert_eq!(seq(&a(), &SpPomset::Empty), a());
        assert_eq!(seq(&a(), &b()), SpPomset::Seq(vec![a(), b()]));
        let ab = seq(&a(), &b());
        assert_eq!(seq(&ab, &c()), SpPomset::Seq(vec![a(), b(), c()]));
    }

    #[test]
    fn par_units_commutes_and_flattens() {
        assert_eq!(par(&a(), &SpPomset::Empty), a());
        assert_eq!(par(&b(), &a()), par(&a(), &b()));
        assert_eq!(par(&b(), &a()), SpPomset::Par(vec![a(), b()]));
        let ab = par(&a(), &b());
        assert_eq!(par(&ab, &c()), SpPomset::Par(vec![a(), b(), c()]));
    }

    #[test]
    fn hole_is_not_a_label() {
        assert!(Label::new("*").is_err());
        assert!(Label::new("").is_err());
        assert!(Label::hole().is_hole());
    }

    #[test]
    fn language_operations() {
        let la = PomsetLanguage::singleton(a());
        let lbc: PomsetLanguage = [b(), c()].into_iter().collect();
        let expected: PomsetLanguage = [seq(&a(), &b()), seq(&a(), &c())].into_iter().collect();
        assert_eq!(lang_seq(&la, &lbc), expected);
        assert!(lang_par(&PomsetLanguage::new(), &lbc).is_empty());
        assert_eq!(lang_union(&la, &la).len(), 1);
    }

    #[test]
    fn size_filter() {
        let l: PomsetLanguage = [a(), seq(&a(), &b())].into_iter().collect();
        assert_eq!(lang_size_filter(&l, 1), PomsetLanguage::singleton(a()));
        assert!(lang_size_filter(&l, 0).is_empty());
        let with_unit: PomsetLanguage = [SpPomset::Empty, a()].into_iter().collect();
        assert_eq!(
            lang_size_filter(&with_unit, 0),
            PomsetLanguage::singleton(SpPomset::Empty)
        );
        assert_eq!(lang_size_filter(&l, 100), l);
    }

    #[test]
    fn display_uses_term_grammar() {
        let u = seq(&par(&a(), &b()), &c());
        assert_eq!(u.to_string(), "(a||b);c");
        assert_eq!(par(&seq(&a(), &b()), &c()).to_string(), "c||a;b");
        assert_eq!(SpPomset::Empty.to_string(), "1");
    }
}
