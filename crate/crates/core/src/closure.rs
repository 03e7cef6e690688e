//! Hypotheses and the closure of finite pomset languages under them.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::{IndexMap, IndexSet};

use crate::context::{is_sequential, occurrences, plug, plug_lang};
use crate::error::{Error, Result};
use crate::pomset::{lbl, Label, PomsetLanguage, SpPomset};
use crate::subsume::{downward_closure_cached, DownCache};
use crate::term::{parse_term, semantics_starfree, Term};

/// An inequation `lhs ≤ rhs` between star-free terms.
#[derive(Clone, PartialEq, Eq)]
pub struct Hypothesis {
    lhs: Term,
    rhs: Term,
    lhs_lang: PomsetLanguage,
    rhs_lang: PomsetLanguage,
}

impl Hypothesis {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self> {
        let lhs_lang = semantics_starfree(&lhs)?;
        let rhs_lang = semantics_starfree(&rhs)?;
        Ok(Hypothesis {
            lhs,
            rhs,
            lhs_lang,
            rhs_lang,
        })
    }

    pub fn parse(lhs: &str, rhs: &str) -> Result<Self> {
        Hypothesis::new(parse_term(lhs)?, parse_term(rhs)?)
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn lhs_lang(&self) -> &PomsetLanguage {
        &self.lhs_lang
    }

    pub fn rhs_lang(&self) -> &PomsetLanguage {
        &self.rhs_lang
    }

    /// `⟦rhs⟧` is a single non-empty word.
    pub fn is_grounded(&self) -> bool {
        self.rhs_lang.len() == 1 && self.rhs_lang.iter().all(|w| !w.is_empty() && w.is_word())
    }

    /// Every member of `⟦lhs⟧` is `1` or a single letter.
    pub fn has_simple_lhs(&self) -> bool {
        self.lhs_lang.iter().all(|u| u.size() <= 1)
    }
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A finite list of hypotheses, optionally together with the exchange law.
///
/// The exchange law is an infinite family and is only ever recorded as a flag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HypothesisSet {
    hyps: Vec<Hypothesis>,
    exch: bool,
}

impl HypothesisSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn exch() -> Self {
        HypothesisSet {
            hyps: Vec::new(),
            exch: true,
        }
    }

    pub fn from_hypotheses(hyps: Vec<Hypothesis>) -> Self {
        HypothesisSet { hyps, exch: false }
    }

    pub fn with_exch(mut self, exch: bool) -> Self {
        self.exch = exch;
        self
    }

    pub fn push(&mut self, h: Hypothesis) {
        self.hyps.push(h);
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hyps
    }

    pub fn includes_exch(&self) -> bool {
        self.exch
    }

    pub fn is_empty(&self) -> bool {
        self.hyps.is_empty() && !self.exch
    }

    pub fn len(&self) -> usize {
        self.hyps.len()
    }

    /// Every listed hypothesis is grounded and the exchange law is absent.
    pub fn is_grounded(&self) -> bool {
        !self.exch && self.hyps.iter().all(Hypothesis::is_grounded)
    }

    pub fn without_exch(&self) -> HypothesisSet {
        HypothesisSet {
            hyps: self.hyps.clone(),
            exch: false,
        }
    }

    pub fn union(&self, other: &HypothesisSet) -> HypothesisSet {
        let mut hyps = self.hyps.clone();
        for h in &other.hyps {
            if !hyps.contains(h) {
                hyps.push(h.clone());
            }
        }
        HypothesisSet {
            hyps,
            exch: self.exch || other.exch,
        }
    }

    /// `self ⊇ other`.
    pub fn contains_all(&self, other: &HypothesisSet) -> bool {
        (self.exch || !other.exch) && other.hyps.iter().all(|h| self.hyps.contains(h))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_language_size: usize,
    pub max_leaf_count: usize,
    pub max_iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_language_size: 200_000,
            max_leaf_count: 64,
            max_iterations: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TruncationReason {
    /// A derived pomset exceeded `max_leaf_count` and was dropped.
    LeafBound,
    Iterations,
    LanguageSize,
    /// A hypothesis with `⟦rhs⟧ = ∅` and non-empty `⟦lhs⟧` fires in every context.
    EmptyRhs,
}

impl fmt::Display for TruncationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TruncationReason::LeafBound => "leaf-count bound exceeded",
            TruncationReason::Iterations => "iteration budget exhausted",
            TruncationReason::LanguageSize => "language-size budget exhausted",
            TruncationReason::EmptyRhs => {
                "hypothesis with empty right-hand side generates an infinite closure"
            }
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureStatus {
    Complete,
    Truncated(TruncationReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    pub language: PomsetLanguage,
    pub status: ClosureStatus,
}

impl ClosureResult {
    pub fn is_complete(&self) -> bool {
        self.status == ClosureStatus::Complete
    }

    fn complete(language: PomsetLanguage) -> Self {
        ClosureResult {
            language,
            status: ClosureStatus::Complete,
        }
    }
}

fn label_fits(v: &BTreeMap<Label, usize>, w: &BTreeMap<Label, usize>) -> bool {
    v.iter().all(|(l, n)| w.get(l).is_some_and(|m| m >= n))
}

struct Engine<'a> {
    hyps: &'a [Hypothesis],
    budget: Budget,
    sequential_only: bool,
}

impl Engine<'_> {
    fn run(&self, l: &PomsetLanguage) -> ClosureResult {
        let mut set: IndexSet<SpPomset> = l.iter().cloned().collect();
        let mut status = ClosureStatus::Complete;
        // With `⟦rhs⟧ = ∅` the premise holds in every context. Only the
        // contexts around the initial members are instantiated, so the
        // result is a proper under-approximation.
        for h in self
            .hyps
            .iter()
            .filter(|h| h.rhs_lang.is_empty() && !h.lhs_lang.is_empty())
        {
            status = ClosureStatus::Truncated(TruncationReason::EmptyRhs);
            let mut seeded: Vec<SpPomset> = h.lhs_lang.iter().cloned().collect();
            for w in l {
                for c in occurrences(w, &SpPomset::Empty) {
                    if !self.sequential_only || is_sequential(&c) {
                        seeded.extend(plug_lang(&c, &h.lhs_lang));
                    }
                }
            }
            set.extend(
                seeded
                    .into_iter()
                    .filter(|u| u.size() <= self.budget.max_leaf_count),
            );
        }
        // Hypotheses grouped by right-hand-side member, so each occurrence
        // search runs once per distinct pomset.
        let mut by_rhs: IndexMap<SpPomset, Vec<usize>> = IndexMap::new();
        for (i, h) in self.hyps.iter().enumerate() {
            for v in &h.rhs_lang {
                by_rhs.entry(v.clone()).or_default().push(i);
            }
        }
        let by_rhs: Vec<(SpPomset, BTreeMap<Label, usize>, Vec<usize>)> = by_rhs
            .into_iter()
            .map(|(v, hs)| {
                let counts = v.label_multiset();
                (v, counts, hs)
            })
            .collect();
        let mut iterations = 0usize;
        let mut next = 0usize;
        while next < set.len() {
            iterations += 1;
            if iterations > self.budget.max_iterations {
                status = ClosureStatus::Truncated(TruncationReason::Iterations);
                break;
            }
            let w = set[next].clone();
            next += 1;
            let w_counts = w.label_multiset();
            let mut fresh = Vec::new();
            for (v, v_counts, hs) in &by_rhs {
                if v.size() > w.size() || !label_fits(v_counts, &w_counts) {
                    continue;
                }
                for c in occurrences(&w, v) {
                    if self.sequential_only && !is_sequential(&c) {
                        continue;
                    }
                    for &i in hs {
                        let h = &self.hyps[i];
                        // The premise needs all of C[⟦f⟧]; the last member to
                        // arrive in the worklist is the one that triggers it.
                        if h.rhs_lang.len() > 1
                            && !h.rhs_lang.iter().all(|x| set.contains(&plug(&c, x)))
                        {
                            continue;
                        }
                        fresh.extend(plug_lang(&c, &h.lhs_lang));
                    }
                }
            }
            for u in fresh {
                if u.size() > self.budget.max_leaf_count {
                    status = ClosureStatus::Truncated(TruncationReason::LeafBound);
                    continue;
                }
                set.insert(u);
                if set.len() > self.budget.max_language_size {
                    return ClosureResult {
                        language: set.into_iter().collect(),
                        status: ClosureStatus::Truncated(TruncationReason::LanguageSize),
                    };
                }
            }
        }
        ClosureResult {
            language: set.into_iter().collect(),
            status,
        }
    }
}

/// The `H`-closure of `l` for a set without the exchange law.
pub fn close(l: &PomsetLanguage, h: &HypothesisSet, budget: Budget) -> Result<ClosureResult> {
    if h.exch {
        return Err(Error::PreconditionViolated(
            "the exchange law is closed by close_exch or close_with, not by close".into(),
        ));
    }
    Ok(Engine {
        hyps: &h.hyps,
        budget,
        sequential_only: false,
    }
    .run(l))
}

/// Reference fixpoint: rounds over an immutable snapshot until nothing changes.
pub fn close_naive(l: &PomsetLanguage, h: &HypothesisSet, budget: Budget) -> Result<ClosureResult> {
    if h.exch {
        return Err(Error::PreconditionViolated(
            "close_naive does not handle the exchange law".into(),
        ));
    }
    let mut cur = l.clone();
    for _ in 0..budget.max_iterations {
        let mut next = cur.clone();
        for hyp in &h.hyps {
            if hyp.rhs_lang.is_empty() && !hyp.lhs_lang.is_empty() {
                return Ok(ClosureResult {
                    language: cur,
                    status: ClosureStatus::Truncated(TruncationReason::EmptyRhs),
                });
            }
            for w in &cur {
                for v in &hyp.rhs_lang {
                    for c in occurrences(w, v) {
                        if plug_lang(&c, &hyp.rhs_lang).is_subset(&cur) {
                            next.extend(plug_lang(&c, &hyp.lhs_lang));
                        }
                    }
                }
            }
        }
        if next.max_size() > budget.max_leaf_count {
            return Ok(ClosureResult {
                language: cur,
                status: ClosureStatus::Truncated(TruncationReason::LeafBound),
            });
        }
        if next.len() > budget.max_language_size {
            return Ok(ClosureResult {
                language: next,
                status: ClosureStatus::Truncated(TruncationReason::LanguageSize),
            });
        }
        if next == cur {
            return Ok(ClosureResult::complete(cur));
        }
        cur = next;
    }
    Ok(ClosureResult {
        language: cur,
        status: ClosureStatus::Truncated(TruncationReason::Iterations),
    })
}

/// The exchange-law closure: the union of the down-closures of the members.
pub fn close_exch(l: &PomsetLanguage) -> PomsetLanguage {
    let mut cache = DownCache::new();
    let mut out = PomsetLanguage::new();
    for v in l {
        out.extend(downward_closure_cached(v, &mut cache).iter().cloned());
    }
    out
}

/// [`close_exch`], giving up once the result would exceed `max_language` members.
pub fn close_exch_bounded(l: &PomsetLanguage, max_language: usize) -> Option<PomsetLanguage> {
    let mut cache = DownCache::new();
    let mut out = PomsetLanguage::new();
    for v in l {
        out.extend(downward_closure_cached(v, &mut cache).iter().cloned());
        if out.len() > max_language {
            return None;
        }
    }
    Some(out)
}

fn language_size_exceeded(l: &PomsetLanguage) -> ClosureResult {
    ClosureResult {
        language: l.clone(),
        status: ClosureStatus::Truncated(TruncationReason::LanguageSize),
    }
}

/// Closure of a word language restricted to sequential contexts.
pub fn close_seq(l: &PomsetLanguage, h: &HypothesisSet, budget: Budget) -> Result<ClosureResult> {
    if let Some(u) = l.iter().find(|u| !u.is_word()) {
        return Err(Error::PreconditionViolated(format!("`{u}` is not a word")));
    }
    if !h.is_grounded() {
        return Err(Error::PreconditionViolated(
            "sequential closure needs grounded hypotheses".into(),
        ));
    }
    if let Some(hyp) = h.hyps.iter().find(|x| x.lhs.has_par() || x.rhs.has_par()) {
        return Err(Error::PreconditionViolated(format!(
            "`{hyp}` uses parallel composition"
        )));
    }
    Ok(Engine {
        hyps: &h.hyps,
        budget,
        sequential_only: true,
    }
    .run(l))
}

/// `close(close_exch(l), h ∖ exch)`, valid when every left-hand side
/// denotes only `1` or single letters.
pub fn close_factorized(
    l: &PomsetLanguage,
    h: &HypothesisSet,
    budget: Budget,
) -> Result<ClosureResult> {
    if !h.exch {
        return Err(Error::PreconditionViolated(
            "close_factorized expects the exchange law".into(),
        ));
    }
    if let Some(hyp) = h.hyps.iter().find(|x| !x.has_simple_lhs()) {
        return Err(Error::PreconditionViolated(format!(
            "`{hyp}` does not factorise with the exchange law (lhs must be 1 or a letter)"
        )));
    }
    let Some(down) = close_exch_bounded(l, budget.max_language_size) else {
        return Ok(language_size_exceeded(l));
    };
    close(&down, &h.without_exch(), budget)
}

/// Closure under any hypothesis set.
///
/// With the exchange law and simple left-hand sides this is
/// [`close_factorized`]; otherwise [`close_alternating`].
pub fn close_with(l: &PomsetLanguage, h: &HypothesisSet, budget: Budget) -> Result<ClosureResult> {
    if !h.exch {
        return close(l, h, budget);
    }
    if h.hyps.iter().all(Hypothesis::has_simple_lhs) {
        return close_factorized(l, h, budget);
    }
    close_alternating(l, h, budget)
}

/// Alternates exchange closure and the generic engine until neither adds anything.
pub fn close_alternating(
    l: &PomsetLanguage,
    h: &HypothesisSet,
    budget: Budget,
) -> Result<ClosureResult> {
    let rest = h.without_exch();
    let mut cur = l.clone();
    for _ in 0..budget.max_iterations {
        let down = if h.exch {
            match close_exch_bounded(&cur, budget.max_language_size) {
                Some(d) => d,
                None => return Ok(language_size_exceeded(&cur)),
            }
        } else {
            cur.clone()
        };
        let step = close(&down, &rest, budget)?;
        if !step.is_complete() || step.language == cur {
            return Ok(step);
        }
        cur = step.language;
    }
    Ok(ClosureResult {
        language: cur,
        status: ClosureStatus::Truncated(TruncationReason::Iterations),
    })
}

pub fn language_equal(l: &PomsetLanguage, k: &PomsetLanguage) -> bool {
    l == k
}

/// The least member of the symmetric difference, with `true` when it lies in `l`.
pub fn language_difference(l: &PomsetLanguage, k: &PomsetLanguage) -> Option<(SpPomset, bool)> {
    let a = l.iter().find(|u| !k.contains(u));
    let b = k.iter().find(|u| !l.contains(u));
    match (a, b) {
        (None, None) => None,
        (Some(u), None) => Some((u.clone(), true)),
        (None, Some(u)) => Some((u.clone(), false)),
        (Some(u), Some(v)) => Some(if u <= v {
            (u.clone(), true)
        } else {
            (v.clone(), false)
        }),
    }
}

/// Parses `lhs <= rhs` / `lhs == rhs` lines; `#` starts a comment and a
/// line reading `exch` adds the exchange law.
pub fn parse_hypothesis_file(text: &str) -> Result<HypothesisSet> {
    let mut set = HypothesisSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "exch" {
            set.exch = true;
            continue;
        }
        let wrap = |e: Error| Error::HypothesisFile {
            line: line_no,
            message: e.to_string(),
        };
        let (lhs, rhs, both) = if let Some((a, b)) = line.split_once("<=") {
            (a, b, false)
        } else if let Some((a, b)) = line.split_once("==") {
            (a, b, true)
        } else {
            return Err(Error::HypothesisFile {
                line: line_no,
                message: "expected `<=` or `==`".into(),
            });
        };
        let lhs = parse_term(lhs).map_err(wrap)?;
        let rhs = parse_term(rhs).map_err(wrap)?;
        if lhs.has_star() || rhs.has_star() {
            return Err(Error::HypothesisFile {
                line: line_no,
                message: "hypothesis sides must be star-free".into(),
            });
        }
        if lhs.has_obs() || rhs.has_obs() {
            return Err(Error::HypothesisFile {
                line: line_no,
                message: "observations are not allowed in hypothesis files".into(),
            });
        }
        set.push(Hypothesis::new(lhs.clone(), rhs.clone()).map_err(wrap)?);
        if both {
            set.push(Hypothesis::new(rhs, lhs).map_err(wrap)?);
        }
    }
    Ok(set)
}

pub const PACK_NAMES: [&str; 6] = [
    "none",
    "exch",
    "obs",
    "contr-atoms",
    "demo-bake",
    "demo-print",
];

/// `(e·bake·f) ∥ (g·bake·h) = (e·bake ∥ g)·(f ∥ bake·h) + (e ∥ g·bake)·(bake·f ∥ h)`
/// for `e, f, g, h` ranging over `1` and the given letters.
pub fn demo_bake(alphabet: &[Label]) -> HypothesisSet {
    let bake = Term::act("bake");
    let mut fillers = vec![Term::One];
    fillers.extend(alphabet.iter().map(|l| Term::Act(l.clone())));
    let mut set = HypothesisSet::new();
    for e in &fillers {
        for f in &fillers {
            for g in &fillers {
                for h in &fillers {
                    let d = |x: &Term, y: &Term| Term::dot(x.clone(), y.clone());
                    let p = |x: Term, y: Term| Term::par(x, y);
                    let lhs = p(d(&d(e, &bake), f), d(&d(g, &bake), h));
                    let rhs = Term::plus(
                        Term::dot(p(d(e, &bake), g.clone()), p(f.clone(), d(&bake, h))),
                        Term::dot(p(e.clone(), d(g, &bake)), p(d(&bake, f), h.clone())),
                    );
                    let fwd = Hypothesis::new(lhs.clone(), rhs.clone()).expect("star-free");
                    let bwd = Hypothesis::new(rhs, lhs).expect("star-free");
                    for hyp in [fwd, bwd] {
                        if !set.hyps.contains(&hyp) {
                            set.push(hyp);
                        }
                    }
                }
            }
        }
    }
    set
}

/// `a ∥ print = a·print + print·a` for every other letter `a`.
pub fn demo_print(alphabet: &[Label]) -> HypothesisSet {
    let print = lbl("print");
    let mut set = HypothesisSet::new();
    for a in alphabet.iter().filter(|a| **a != print) {
        let a = Term::Act(a.clone());
        let pr = Term::Act(print.clone());
        let lhs = Term::par(a.clone(), pr.clone());
        let rhs = Term::plus(Term::dot(a.clone(), pr.clone()), Term::dot(pr, a));
        set.push(Hypothesis::new(lhs.clone(), rhs.clone()).expect("star-free"));
        set.push(Hypothesis::new(rhs, lhs).expect("star-free"));
    }
    set
}
