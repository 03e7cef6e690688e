//! Letter maps and empirical checks of the reification conditions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::boolean::{atoms_below, Atom, BoolTerm, Omega};
use super::{bool_letter, bool_of_label, unknown_letter};
use crate::closure::{close_with, Budget, ClosureResult, Hypothesis, HypothesisSet};
use crate::error::{Error, Result};
use crate::pomset::{lang_par, lang_seq, Label, PomsetLanguage, SpPomset};
use crate::term::{semantics_starfree, Term};

/// A map `r : Σ → T(Γ)` given letter by letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reification {
    map: BTreeMap<Label, Term>,
    gamma: BTreeSet<Label>,
}

impl Reification {
    pub fn new(map: BTreeMap<Label, Term>, gamma: BTreeSet<Label>) -> Self {
        Reification { map, gamma }
    }

    pub fn identity<I: IntoIterator<Item = Label>>(letters: I) -> Self {
        let map: BTreeMap<Label, Term> = letters
            .into_iter()
            .map(|l| (l.clone(), Term::Act(l)))
            .collect();
        let gamma = map.keys().cloned().collect();
        Reification { map, gamma }
    }

    pub fn domain(&self) -> impl Iterator<Item = &Label> + '_ {
        self.map.keys()
    }

    pub fn gamma(&self) -> &BTreeSet<Label> {
        &self.gamma
    }

    pub fn image(&self, a: &Label) -> Option<&Term> {
        self.map.get(a)
    }

    pub fn apply_term(&self, e: &Term) -> Result<Term> {
        let mut err = None;
        let out = e.map_leaves(&mut |t| match t {
            Term::Act(l) => match self.map.get(l) {
                Some(x) => x.clone(),
                None => {
                    err.get_or_insert(unknown_letter(l));
                    t.clone()
                }
            },
            other => other.clone(),
        });
        match err {
            Some(x) => Err(x),
            None => Ok(out),
        }
    }

    /// `r(U)`, with each letter `a` replaced by `⟦r(a)⟧`.
    pub fn apply_pomset(&self, u: &SpPomset) -> Result<PomsetLanguage> {
        Ok(match u {
            SpPomset::Empty => PomsetLanguage::singleton(SpPomset::Empty),
            SpPomset::Prim(l) => {
                semantics_starfree(self.map.get(l).ok_or_else(|| unknown_letter(l))?)?
            }
            SpPomset::Seq(cs) => {
                let mut acc = PomsetLanguage::singleton(SpPomset::Empty);
                for c in cs {
                    acc = lang_seq(&acc, &self.apply_pomset(c)?);
                }
                acc
            }
            SpPomset::Par(cs) => {
                let mut acc = PomsetLanguage::singleton(SpPomset::Empty);
                for c in cs {
                    acc = lang_par(&acc, &self.apply_pomset(c)?);
                }
                acc
            }
        })
    }

    pub fn apply_language(&self, l: &PomsetLanguage) -> Result<PomsetLanguage> {
        let mut out = PomsetLanguage::new();
        for u in l {
            out.extend(self.apply_pomset(u)?);
        }
        Ok(out)
    }
}

/// The observation reification over `Ω`: `{p}` goes to the sum of the atoms
/// below `p`, atoms and actions are fixed.
pub fn obs_reification<'a, I: IntoIterator<Item = &'a Label>>(
    letters: I,
    omega: &Omega,
) -> Result<Reification> {
    let mut map = BTreeMap::new();
    let mut gamma: BTreeSet<Label> = omega.atoms().iter().map(Atom::label).collect();
    for a in omega.atoms() {
        map.insert(a.label(), Term::Act(a.label()));
    }
    for l in letters {
        if Atom::from_label(l).is_some() {
            continue;
        }
        match bool_of_label(l, omega) {
            Some(p) => {
                let atoms = atoms_below(&p, omega)?;
                map.insert(l.clone(), super::atom_sum(&atoms));
            }
            None => {
                gamma.insert(l.clone());
                map.insert(l.clone(), Term::Act(l.clone()));
            }
        }
    }
    Ok(Reification { map, gamma })
}

fn class_rep(class: &BTreeSet<Atom>, omega: &Omega) -> BoolTerm {
    if class.is_empty() {
        BoolTerm::Bot
    } else if class.len() == 1 << omega.len() {
        BoolTerm::Top
    } else {
        class
            .iter()
            .map(|a| BoolTerm::of_atom(a, omega))
            .reduce(BoolTerm::or)
            .expect("non-empty")
    }
}

fn all_classes(atoms: &[Atom]) -> Vec<BTreeSet<Atom>> {
    (0u64..(1 << atoms.len()))
        .map(|mask| {
            (0..atoms.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| atoms[i].clone())
                .collect()
        })
        .collect()
}

/// A finite instance of the observation hypotheses (Boolean identities,
/// contraction, glue and the exchange law) over a sampled letter set.
///
/// The letters are the atoms, one representative per Boolean class, and the
/// given seed terms. A meet or join is represented by its class
/// representative. Only `|Ω| ≤ 2` is supported.
pub fn sampled_obs_pack(omega: &Omega, seeds: &[BoolTerm]) -> Result<HypothesisSet> {
    if omega.len() > 2 {
        return Err(Error::PreconditionViolated(
            "the sampled observation pack supports at most 2 observations".into(),
        ));
    }
    let atoms = omega.atoms();
    let mut letters: BTreeMap<Label, BTreeSet<Atom>> = BTreeMap::new();
    let mut rep: BTreeMap<BTreeSet<Atom>, Label> = BTreeMap::new();
    for class in all_classes(&atoms) {
        let l = bool_letter(&class_rep(&class, omega));
        letters.insert(l.clone(), class.clone());
        rep.insert(class, l);
    }
    for a in &atoms {
        letters.insert(a.label(), [a.clone()].into_iter().collect());
    }
    for p in seeds {
        letters.insert(bool_letter(p), atoms_below(p, omega)?);
    }
    let act = |l: &Label| Term::Act(l.clone());
    let mut set = HypothesisSet::new().with_exch(true);
    let mut add = |lhs: Term, rhs: Term| set.push(Hypothesis::new(lhs, rhs).expect("star-free"));
    for (x, cx) in &letters {
        for (y, cy) in &letters {
            if x != y && cx == cy {
                add(act(x), act(y));
            }
            let meet: BTreeSet<Atom> = cx.intersection(cy).cloned().collect();
            add(act(&rep[&meet]), Term::dot(act(x), act(y)));
            let join: BTreeSet<Atom> = cx.union(cy).cloned().collect();
            add(Term::plus(act(x), act(y)), act(&rep[&join]));
            add(act(&rep[&join]), Term::plus(act(x), act(y)));
        }
    }
    let bot = act(&rep[&BTreeSet::new()]);
    add(Term::Zero, bot.clone());
    add(bot, Term::Zero);
    Ok(set)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail(String),
    /// The closure was truncated before the check could be settled.
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub condition: &'static str,
    pub subject: String,
    pub outcome: CheckOutcome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReificationReport {
    pub checks: Vec<Check>,
}

impl ReificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.outcome == CheckOutcome::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> + '_ {
        self.checks
            .iter()
            .filter(|c| matches!(c.outcome, CheckOutcome::Fail(_)))
    }

    /// Whether any check of the given condition failed.
    pub fn fails(&self, condition: &str) -> bool {
        self.failures().any(|c| c.condition == condition)
    }

    fn push(&mut self, condition: &'static str, subject: impl Into<String>, outcome: CheckOutcome) {
        self.checks.push(Check {
            condition,
            subject: subject.into(),
            outcome,
        });
    }
}

impl fmt::Display for ReificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let (tag, note) = match &c.outcome {
                CheckOutcome::Pass => ("pass", String::new()),
                CheckOutcome::Fail(m) => ("FAIL", format!(": {m}")),
                CheckOutcome::Inconclusive(m) => ("inconclusive", format!(": {m}")),
            };
            writeln!(f, "[{}] {} {}{}", c.condition, tag, c.subject, note)?;
        }
        Ok(())
    }
}

/// Inputs sampled by the checks.
#[derive(Clone, Debug, Default)]
pub struct ReificationSample {
    /// Languages over `Γ` whose closures must stay over `Γ`.
    pub gamma_languages: Vec<PomsetLanguage>,
    /// Star-free terms for which `r(⟦e⟧) = ⟦r(e)⟧` is compared.
    pub terms: Vec<Term>,
    pub budget: Budget,
}

fn included(a: &PomsetLanguage, b: &ClosureResult) -> CheckOutcome {
    match a.iter().find(|u| !b.language.contains(u)) {
        None => CheckOutcome::Pass,
        Some(u) if b.is_complete() => CheckOutcome::Fail(format!("`{u}` is missing")),
        Some(u) => CheckOutcome::Inconclusive(format!("`{u}` not reached: {:?}", b.status)),
    }
}

/// Checks, on the sampled inputs, that `r` is a reification from `h` to `h_prime`:
///
/// * `i`: `r(a)` and `a` have the same `h`-closure for every letter;
/// * `ii`: `⟦a⟧ ⊆ ⟦r(a)⟧` for `a ∈ Γ`;
/// * `iii`: `h_prime`-closures of the sampled `Γ`-languages stay over `Γ`;
/// * `iv`: `⟦r(e)⟧ ⊆ cl_{h′}(⟦r(f)⟧)` for every `e ≤ f` in `h`;
/// * `hom`: `r(⟦e⟧) = ⟦r(e)⟧` on the sampled terms.
pub fn check_reification_conditions(
    r: &Reification,
    h: &HypothesisSet,
    h_prime: &HypothesisSet,
    sample: &ReificationSample,
) -> Result<ReificationReport> {
    let mut report = ReificationReport::default();
    let budget = sample.budget;
    for (a, image) in &r.map {
        let ra = semantics_starfree(image)?;
        let la = PomsetLanguage::singleton(SpPomset::Prim(a.clone()));
        let cl_a = close_with(&la, h, budget)?;
        let cl_ra = close_with(&ra, h, budget)?;
        let forward = included(&ra, &cl_a);
        let backward = included(&la, &cl_ra);
        let outcome = match (forward, backward) {
            (CheckOutcome::Pass, CheckOutcome::Pass) => CheckOutcome::Pass,
            (f @ CheckOutcome::Fail(_), _) | (_, f @ CheckOutcome::Fail(_)) => f,
            (i @ CheckOutcome::Inconclusive(_), _) | (_, i) => i,
        };
        report.push("i", format!("r({a}) = {image}"), outcome);
        if r.gamma.contains(a) {
            let outcome = if ra.contains(&SpPomset::Prim(a.clone())) {
                CheckOutcome::Pass
            } else {
                CheckOutcome::Fail(format!("`{a}` is not below `{image}`"))
            };
            report.push("ii", a.to_string(), outcome);
        }
    }
    for l in &sample.gamma_languages {
        if !l.alphabet().is_subset(&r.gamma) {
            return Err(Error::PreconditionViolated(format!(
                "sampled language {l:?} is not over Γ"
            )));
        }
        let cl = close_with(l, h_prime, budget)?;
        let outside: Vec<Label> = cl
            .language
            .alphabet()
            .difference(&r.gamma)
            .cloned()
            .collect();
        let outcome = if !outside.is_empty() {
            CheckOutcome::Fail(format!("closure introduces {outside:?}"))
        } else if cl.is_complete() {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Inconclusive(format!("{:?}", cl.status))
        };
        report.push("iii", format!("{l:?}"), outcome);
    }
    if h.includes_exch() {
        let outcome = if h_prime.includes_exch() {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail("exchange instances are not available on the target side".into())
        };
        report.push("iv", "exch", outcome);
    }
    for hyp in h.hypotheses() {
        let re = semantics_starfree(&r.apply_term(hyp.lhs())?)?;
        let rf = semantics_starfree(&r.apply_term(hyp.rhs())?)?;
        let cl = close_with(&rf, h_prime, budget)?;
        report.push("iv", hyp.to_string(), included(&re, &cl));
    }
    for e in &sample.terms {
        let lhs = r.apply_language(&semantics_starfree(e)?)?;
        let rhs = semantics_starfree(&r.apply_term(e)?)?;
        let outcome = if lhs == rhs {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail(format!("{lhs:?} != {rhs:?}"))
        };
        report.push("hom", e.to_string(), outcome);
    }
    Ok(report)
}
