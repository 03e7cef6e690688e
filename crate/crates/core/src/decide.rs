//! Equivalence and inclusion of terms modulo hypotheses, on finite fragments.

use std::fmt;

use crate::closure::{close_with, Budget, ClosureResult, ClosureStatus, HypothesisSet};
use crate::error::{Error, Result};
use crate::pomset::{PomsetLanguage, SpPomset};
use crate::term::{semantics_bounded, semantics_starfree, Term, UnrollBudget};

pub const DEFAULT_BOUND: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    /// Leaf bound applied to terms containing a star.
    pub bound: usize,
    pub budget: Budget,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            bound: DEFAULT_BOUND,
            budget: Budget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    /// The closures agree on all pomsets with at most this many leaves.
    EquivalentUpTo(usize),
    /// `witness` lies in the closure of the left term iff `in_left`.
    Different {
        witness: SpPomset,
        in_left: bool,
    },
    Inconclusive(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equivalent => f.write_str("EQUIVALENT"),
            Verdict::EquivalentUpTo(k) => write!(f, "EQUIVALENT-UP-TO {k}"),
            Verdict::Different { .. } => f.write_str("DIFFERENT"),
            Verdict::Inconclusive(_) => f.write_str("INCONCLUSIVE"),
        }
    }
}

/// Outcome of one inclusion direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    HoldsUpTo(usize),
    Fails,
    Unknown,
}

impl Inclusion {
    pub fn holds(self) -> bool {
        matches!(self, Inclusion::Holds | Inclusion::HoldsUpTo(_))
    }
}

impl fmt::Display for Inclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inclusion::Holds => f.write_str("true"),
            Inclusion::HoldsUpTo(k) => write!(f, "true up to {k} leaves"),
            Inclusion::Fails => f.write_str("false"),
            Inclusion::Unknown => f.write_str("unknown"),
        }
    }
}

/// A closed side of a comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub closure: ClosureResult,
    /// `closure` is the whole closure, not just a fragment of it.
    pub total: bool,
    /// Absence from `closure` proves absence from the full closure.
    pub absence_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub left_leq_right: Inclusion,
    pub right_leq_left: Inclusion,
    pub left: Side,
    pub right: Side,
    pub bound: usize,
}

// Derivations under such sets never change the number of leaves, so the
// closure of a size-k fragment is the size-k fragment of the closure.
fn size_preserving(h: &HypothesisSet) -> bool {
    h.hypotheses().iter().all(|x| {
        let sizes: Vec<usize> = x
            .lhs_lang()
            .iter()
            .chain(x.rhs_lang())
            .map(SpPomset::size)
            .collect();
        sizes.windows(2).all(|w| w[0] == w[1])
    })
}

pub fn close_side(e: &Term, h: &HypothesisSet, opts: &DecideOptions) -> Result<Side> {
    let total = !e.has_star();
    let base = if total {
        semantics_starfree(e)?
    } else {
        semantics_bounded(e, UnrollBudget::new(opts.bound))?
    };
    let closure = close_with(&base, h, opts.budget)?;
    let complete = closure.is_complete();
    Ok(Side {
        absence_exact: complete && (total || size_preserving(h)),
        closure,
        total,
    })
}

fn inclusion(sub: &Side, sup: &Side, bound: usize) -> Inclusion {
    let sup_lang = &sup.closure.language;
    let missing: Vec<&SpPomset> = sub
        .closure
        .language
        .iter()
        .filter(|u| !sup_lang.contains(u))
        .collect();
    if !missing.is_empty() {
        return if sup.absence_exact {
            Inclusion::Fails
        } else {
            Inclusion::Unknown
        };
    }
    if !sub.closure.is_complete() {
        return Inclusion::Unknown;
    }
    if sub.total {
        Inclusion::Holds
    } else {
        Inclusion::HoldsUpTo(bound)
    }
}

fn truncation_note(s: &Side, name: &str) -> Option<String> {
    match s.closure.status {
        ClosureStatus::Complete => None,
        ClosureStatus::Truncated(r) => Some(format!("{name} closure truncated: {r}")),
    }
}

pub fn compare_sides(left: Side, right: Side, bound: usize) -> Decision {
    let left_leq_right = inclusion(&left, &right, bound);
    let right_leq_left = inclusion(&right, &left, bound);
    let l = &left.closure.language;
    let r = &right.closure.language;
    let verdict = if l == r {
        let notes: Vec<String> = [
            truncation_note(&left, "left"),
            truncation_note(&right, "right"),
        ]
        .into_iter()
        .flatten()
        .collect();
        if !notes.is_empty() {
            Verdict::Inconclusive(notes.join("; "))
        } else if left.total && right.total {
            Verdict::Equivalent
        } else {
            Verdict::EquivalentUpTo(bound)
        }
    } else {
        let in_left = l.iter().filter(|u| !r.contains(u)).map(|u| (u, true));
        let in_right = r.iter().filter(|u| !l.contains(u)).map(|u| (u, false));
        let mut candidates: Vec<(&SpPomset, bool)> = in_left.chain(in_right).collect();
        candidates.sort();
        let certified = candidates.into_iter().find(|(_, side_left)| {
            if *side_left {
                right.absence_exact
            } else {
                left.absence_exact
            }
        });
        match certified {
            Some((w, in_left)) => Verdict::Different {
                witness: w.clone(),
                in_left,
            },
            None => {
                let mut notes: Vec<String> = [
                    truncation_note(&left, "left"),
                    truncation_note(&right, "right"),
                ]
                .into_iter()
                .flatten()
                .collect();
                notes.push(format!(
                    "the size-{bound} fragments differ, but no difference is certain beyond the bound"
                ));
                Verdict::Inconclusive(notes.join("; "))
            }
        }
    };
    Decision {
        verdict,
        left_leq_right,
        right_leq_left,
        left,
        right,
        bound,
    }
}

/// Compares the `h`-closures of `⟦e⟧` and `⟦f⟧`.
///
/// Star-free terms are compared exactly. Terms with a star are cut at
/// `opts.bound` leaves; a difference is reported only when it cannot
/// disappear at a larger bound.
pub fn decide(e: &Term, f: &Term, h: &HypothesisSet, opts: &DecideOptions) -> Result<Decision> {
    let left = close_side(e, h, opts)?;
    let right = close_side(f, h, opts)?;
    Ok(compare_sides(left, right, opts.bound))
}

/// `cl_h(⟦e⟧) ⊆ cl_h(⟦f⟧)`; errors when the budget leaves it undetermined.
pub fn leq_semantic(e: &Term, f: &Term, h: &HypothesisSet, opts: &DecideOptions) -> Result<bool> {
    let left = close_side(e, h, opts)?;
    let right = close_side(f, h, opts)?;
    match inclusion(&left, &right, opts.bound) {
        Inclusion::Holds | Inclusion::HoldsUpTo(_) => Ok(true),
        Inclusion::Fails => Ok(false),
        Inclusion::Unknown => Err(Error::PreconditionViolated(
            "inclusion undetermined within the budget".into(),
        )),
    }
}

/// The closure of a single term, as a language.
pub fn closure_of(
    e: &Term,
    h: &HypothesisSet,
    opts: &DecideOptions,
) -> Result<(PomsetLanguage, ClosureStatus)> {
    let side = close_side(e, h, opts)?;
    Ok((side.closure.language, side.closure.status))
}
