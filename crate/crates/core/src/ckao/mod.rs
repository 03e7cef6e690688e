//! Concurrent Kleene algebra with observations.
//!
//! Observations `{p}` are reified into sums of atoms `@{o,...}`, after which
//! equivalence under the observation hypotheses is decided by closing under
//! the exchange law and the atom contractions `α ≤ α·α`.

mod boolean;
mod group;
mod reification;

use std::collections::{BTreeMap, BTreeSet};

pub use boolean::{atoms_below, ba_equiv, ba_leq, Atom, BoolTerm, Omega, DEFAULT_OMEGA_CAP};
pub use group::{group_reduce, group_reify, GroupTerm};
pub use reification::{
    check_reification_conditions, obs_reification, sampled_obs_pack, Check, CheckOutcome,
    Reification, ReificationReport, ReificationSample,
};

use crate::closure::{Hypothesis, HypothesisSet};
use crate::decide::{decide, DecideOptions, Decision};
use crate::error::{Error, Result};
use crate::pomset::Label;
use crate::term::{parse_term, Term};

/// `r(e)`: every observation becomes the sum of the atoms below it.
pub fn reify(e: &Term, omega: &Omega) -> Result<Term> {
    let mut err = None;
    let out = e.map_leaves(&mut |t| match t {
        Term::Obs(p) => match atoms_below(p, omega) {
            Ok(atoms) => atom_sum(&atoms),
            Err(x) => {
                err.get_or_insert(x);
                Term::Zero
            }
        },
        other => other.clone(),
    });
    match err {
        Some(x) => Err(x),
        None => Ok(out),
    }
}

/// The sum of the atom letters, in label order; `0` when empty.
pub fn atom_sum(atoms: &BTreeSet<Atom>) -> Term {
    let labels: BTreeSet<Label> = atoms.iter().map(Atom::label).collect();
    Term::sum(labels.into_iter().map(Term::Act))
}

/// The letter standing for observation `p` when it is not reified.
pub fn bool_letter(p: &BoolTerm) -> Label {
    Label::new(format!("{{{p}}}")).expect("non-empty")
}

/// Replaces each observation `{p}` by the letter `{p}`.
pub fn letterize(e: &Term) -> Term {
    e.map_leaves(&mut |t| match t {
        Term::Obs(p) => Term::Act(bool_letter(p)),
        other => other.clone(),
    })
}

/// The Boolean term denoted by an atom letter `@{..}` or an observation letter `{..}`.
pub fn bool_of_label(l: &Label, omega: &Omega) -> Option<BoolTerm> {
    if let Some(a) = Atom::from_label(l) {
        return Some(BoolTerm::of_atom(&a, omega));
    }
    let s = l.as_str();
    if s.starts_with('{') && s.ends_with('}') {
        if let Ok(Term::Obs(p)) = parse_term(s) {
            return Some(p);
        }
    }
    None
}

/// The smallest `Ω` covering all observations of the given terms.
pub fn infer_omega<'a, I: IntoIterator<Item = &'a Term>>(terms: I, cap: usize) -> Result<Omega> {
    let mut names = BTreeSet::new();
    for t in terms {
        for p in t.observations() {
            names.extend(p.primitives());
        }
    }
    Omega::with_cap(names, cap)
}

/// `contr′ = { α ≤ α·α : α ∈ At }`.
pub fn contr_prime(omega: &Omega) -> HypothesisSet {
    HypothesisSet::from_hypotheses(
        omega
            .atoms()
            .iter()
            .map(|a| {
                let x = Term::Act(a.label());
                Hypothesis::new(x.clone(), Term::dot(x.clone(), x)).expect("star-free")
            })
            .collect(),
    )
}

/// `exch ∪ contr′`, the hypotheses the observation pack reduces to.
pub fn reduced_obs_pack(omega: &Omega) -> HypothesisSet {
    contr_prime(omega).with_exch(true)
}

/// Decides `e ≡ f` under the observation hypotheses.
pub fn decide_ckao(e: &Term, f: &Term, omega: &Omega, opts: &DecideOptions) -> Result<Decision> {
    let re = reify(e, omega)?;
    let rf = reify(f, omega)?;
    decide(&re, &rf, &reduced_obs_pack(omega), opts)
}

/// `cl(⟦r(e)⟧) ⊆ cl(⟦r(f)⟧)` under `exch ∪ contr′`.
pub fn leq_ckao(e: &Term, f: &Term, omega: &Omega, opts: &DecideOptions) -> Result<bool> {
    crate::decide::leq_semantic(
        &reify(e, omega)?,
        &reify(f, omega)?,
        &reduced_obs_pack(omega),
        opts,
    )
}

/// Homomorphic replacement of letters; letters outside `sigma` are kept.
pub fn substitute_letters(e: &Term, sigma: &BTreeMap<Label, Term>) -> Term {
    e.map_leaves(&mut |t| match t {
        Term::Act(l) => sigma.get(l).cloned().unwrap_or_else(|| t.clone()),
        other => other.clone(),
    })
}

/// Fails when an observation of `e` mentions a name outside `omega`.
pub fn check_observations(e: &Term, omega: &Omega) -> Result<()> {
    for p in e.observations() {
        omega.check(&p)?;
    }
    Ok(())
}

pub(crate) fn unknown_letter(l: &Label) -> Error {
    Error::InvalidLabel(format!("`{l}` is not in the domain of the reification"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{Inclusion, Verdict};
    use crate::term::parse_pomset;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn reify_examples() {
        let om = Omega::new(["o"]).unwrap();
        assert_eq!(reify(&t("a"), &om).unwrap(), t("a"));
        assert_eq!(reify(&t("{T}"), &om).unwrap(), t("@{o}+@{}"));
        assert_eq!(reify(&t("{F}"), &om).unwrap(), Term::Zero);
        assert_eq!(
            reify(&t("{p}"), &om),
            Err(Error::UnknownObservation("p".into()))
        );
    }

    #[test]
    fn collapse_regression() {
        let om = Omega::new(["o"]).unwrap();
        let d = decide_ckao(
            &t("{o};a;{!o}"),
            &Term::Zero,
            &om,
            &DecideOptions::default(),
        )
        .unwrap();
        assert_eq!(
            d.verdict,
            Verdict::Different {
                witness: parse_pomset("@{o};a;@{}").unwrap(),
                in_left: true
            }
        );
    }

    #[test]
    fn excluded_middle_and_contraction() {
        let om = Omega::new(["o"]).unwrap();
        let o = DecideOptions::default();
        assert_eq!(
            decide_ckao(&t("{o}+{!o}"), &t("{T}"), &om, &o)
                .unwrap()
                .verdict,
            Verdict::Equivalent
        );
        let d = decide_ckao(&t("{o};{o}"), &t("{o}"), &om, &o).unwrap();
        assert_eq!(
            d.verdict,
            Verdict::Different {
                witness: parse_pomset("@{o};@{o}").unwrap(),
                in_left: true
            }
        );
        assert_eq!(d.right_leq_left, Inclusion::Holds);
        assert_eq!(d.left_leq_right, Inclusion::Fails);
    }

    #[test]
    fn substitution_example() {
        let sigma: BTreeMap<Label, Term> = [("b", "a+b"), ("a", "a"), ("c", "c")]
            .iter()
            .map(|(k, v)| (crate::pomset::lbl(k), t(v)))
            .collect();
        assert_eq!(substitute_letters(&t("a;b*||c"), &sigma), t("a;(a+b)*||c"));
        assert_eq!(
            substitute_letters(&t("a;b*||c"), &BTreeMap::new()),
            t("a;b*||c")
        );
        assert_eq!(substitute_letters(&Term::Zero, &sigma), Term::Zero);
    }

    #[test]
    fn letters_for_observations() {
        let om = Omega::new(["o", "p"]).unwrap();
        let l = bool_letter(&BoolTerm::and(
            BoolTerm::prim("o"),
            BoolTerm::not(BoolTerm::prim("p")),
        ));
        assert_eq!(l.as_str(), "{o&!p}");
        let back = bool_of_label(&l, &om).unwrap();
        assert_eq!(atoms_below(&back, &om).unwrap().len(), 1);
        assert!(bool_of_label(&crate::pomset::lbl("a"), &om).is_none());
        assert_eq!(
            infer_omega([&t("{o}+{p&q}"), &t("a")], 6).unwrap().names(),
            ["o", "p", "q"]
        );
        assert_eq!(letterize(&t("{o};a")).to_string(), "{o};a");
    }
}
