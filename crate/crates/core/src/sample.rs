//! Seeded random generators for pomsets, contexts, terms and hypotheses,
//! plus random axiom rewrites used in congruence tests.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::ckao::{BoolTerm, Omega};
use crate::closure::{Hypothesis, HypothesisSet};
use crate::context::SpContext;
use crate::pomset::{lbl, Label, PomsetLanguage, SpPomset};
use crate::poset::{decompose, is_n_free, to_poset, transitive_close, LabelledPoset};
use crate::term::Term;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn alphabet(names: &[&str]) -> Vec<Label> {
    names.iter().map(|n| lbl(n)).collect()
}

/// Splits `n ≥ 2` into `k ≥ 2` positive parts.
fn split(rng: &mut StdRng, n: usize, max_parts: usize) -> Vec<usize> {
    let k = rng.gen_range(2..=n.min(max_parts).max(2));
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort();
    let mut parts = Vec::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain([n]) {
        parts.push(c - prev);
        prev = c;
    }
    parts
}

fn tree_with_leaves(rng: &mut StdRng, leaves: Vec<SpPomset>, max_par_width: usize) -> SpPomset {
    if leaves.len() == 1 {
        return leaves.into_iter().next().unwrap();
    }
    let parallel = max_par_width >= 2 && rng.gen_bool(0.45);
    let width = if parallel { max_par_width } else { 4 };
    let parts = split(rng, leaves.len(), width);
    let mut rest = leaves.into_iter();
    let children: Vec<SpPomset> = parts
        .iter()
        .map(|&p| tree_with_leaves(rng, rest.by_ref().take(p).collect(), max_par_width))
        .collect();
    if parallel {
        SpPomset::par_all(children)
    } else {
        SpPomset::seq_all(children)
    }
}

/// A random sp-pomset with exactly `leaves` leaves.
pub fn pomset_with(
    rng: &mut StdRng,
    alphabet: &[Label],
    leaves: usize,
    max_par_width: usize,
) -> SpPomset {
    if leaves == 0 {
        return SpPomset::Empty;
    }
    let ls: Vec<SpPomset> = (0..leaves)
        .map(|_| SpPomset::Prim(alphabet.choose(rng).unwrap().clone()))
        .collect();
    tree_with_leaves(rng, ls, max_par_width)
}

/// A random sp-pomset with between 0 and `max_leaves` leaves.
pub fn pomset(rng: &mut StdRng, alphabet: &[Label], max_leaves: usize) -> SpPomset {
    let n = rng.gen_range(0..=max_leaves);
    pomset_with(rng, alphabet, n, 3)
}

/// A random non-empty word.
pub fn word(rng: &mut StdRng, alphabet: &[Label], max_len: usize) -> SpPomset {
    let n = rng.gen_range(1..=max_len.max(1));
    SpPomset::seq_all((0..n).map(|_| SpPomset::Prim(alphabet.choose(rng).unwrap().clone())))
}

/// A random context with `letters` leaves besides the hole.
pub fn context_with(rng: &mut StdRng, alphabet: &[Label], letters: usize) -> SpContext {
    let mut ls: Vec<SpPomset> = (0..letters)
        .map(|_| SpPomset::Prim(alphabet.choose(rng).unwrap().clone()))
        .collect();
    let at = rng.gen_range(0..=letters);
    ls.insert(at, SpPomset::Prim(Label::hole()));
    SpContext::from_tree(tree_with_leaves(rng, ls, 3)).expect("one hole")
}

pub fn context(rng: &mut StdRng, alphabet: &[Label], max_letters: usize) -> SpContext {
    let n = rng.gen_range(0..=max_letters);
    context_with(rng, alphabet, n)
}

/// A random sequential context.
pub fn sequential_context(rng: &mut StdRng, alphabet: &[Label], max_letters: usize) -> SpContext {
    let n = rng.gen_range(0..=max_letters);
    let mut parts: Vec<SpPomset> = (0..n)
        .map(|_| SpPomset::Prim(alphabet.choose(rng).unwrap().clone()))
        .collect();
    parts.insert(rng.gen_range(0..=n), SpPomset::Prim(Label::hole()));
    SpContext::from_tree(SpPomset::seq_all(parts)).expect("one hole")
}

/// A context `C ⊑ d`, obtained by adding random order edges to `d` while it
/// stays series-parallel.
pub fn stronger_context(rng: &mut StdRng, d: &SpContext, steps: usize) -> SpContext {
    let p = to_poset(d.tree());
    let n = p.len();
    let mut leq = p.matrix().to_vec();
    for _ in 0..steps {
        let open: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !leq[i][j] && !leq[j][i])
            .collect();
        let Some(&(i, j)) = open.choose(rng) else {
            break;
        };
        let mut next = leq.clone();
        next[i][j] = true;
        transitive_close(&mut next);
        if is_n_free(&LabelledPoset::from_matrix_unchecked(
            p.labels().to_vec(),
            next.clone(),
        )) {
            leq = next;
        }
    }
    let q = LabelledPoset::from_matrix_unchecked(p.labels().to_vec(), leq);
    SpContext::from_tree(decompose(&q).expect("N-free")).expect("one hole")
}

pub fn language(
    rng: &mut StdRng,
    alphabet: &[Label],
    max_members: usize,
    max_leaves: usize,
) -> PomsetLanguage {
    let n = rng.gen_range(1..=max_members.max(1));
    (0..n).map(|_| pomset(rng, alphabet, max_leaves)).collect()
}

pub fn word_language(
    rng: &mut StdRng,
    alphabet: &[Label],
    max_members: usize,
    max_len: usize,
) -> PomsetLanguage {
    let n = rng.gen_range(1..=max_members.max(1));
    (0..n).map(|_| word(rng, alphabet, max_len)).collect()
}

/// A random Boolean term over `omega` with at most `depth` nested connectives.
pub fn bool_term(rng: &mut StdRng, omega: &Omega, depth: usize) -> BoolTerm {
    let leaf = |rng: &mut StdRng| match rng.gen_range(0..10) {
        0 => BoolTerm::Top,
        1 => BoolTerm::Bot,
        _ if omega.is_empty() => BoolTerm::Top,
        _ => BoolTerm::Prim(omega.names().choose(rng).unwrap().clone()),
    };
    if depth == 0 || rng.gen_bool(0.45) {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => BoolTerm::or(
            bool_term(rng, omega, depth - 1),
            bool_term(rng, omega, depth - 1),
        ),
        1 => BoolTerm::and(
            bool_term(rng, omega, depth - 1),
            bool_term(rng, omega, depth - 1),
        ),
        _ => BoolTerm::not(bool_term(rng, omega, depth - 1)),
    }
}

/// Shape parameters for [`term`].
#[derive(Clone, Debug)]
pub struct TermShape {
    pub alphabet: Vec<Label>,
    /// Observations are generated only when `Some`.
    pub omega: Option<Omega>,
    pub max_leaves: usize,
    pub allow_star: bool,
    /// Probability of a parallel node among binary nodes.
    pub par_weight: f64,
    pub max_par_nodes: usize,
    /// Probability that a leaf is `0` or `1`.
    pub unit_weight: f64,
}

impl TermShape {
    pub fn plain(alphabet: Vec<Label>, max_leaves: usize) -> Self {
        TermShape {
            alphabet,
            omega: None,
            max_leaves,
            allow_star: false,
            par_weight: 0.3,
            max_par_nodes: usize::MAX,
            unit_weight: 0.1,
        }
    }
}

fn term_leaf(rng: &mut StdRng, shape: &TermShape) -> Term {
    if rng.gen_bool(shape.unit_weight) {
        return if rng.gen_bool(0.5) {
            Term::One
        } else {
            Term::Zero
        };
    }
    if let Some(om) = &shape.omega {
        if rng.gen_bool(0.5) {
            return Term::Obs(bool_term(rng, om, 2));
        }
    }
    Term::Act(shape.alphabet.choose(rng).unwrap().clone())
}

struct Quota {
    stars: usize,
    pars: usize,
}

fn term_sized(rng: &mut StdRng, shape: &TermShape, leaves: usize, quota: &mut Quota) -> Term {
    let t = if leaves <= 1 {
        term_leaf(rng, shape)
    } else {
        let l = rng.gen_range(1..leaves);
        let a = term_sized(rng, shape, l, quota);
        let b = term_sized(rng, shape, leaves - l, quota);
        let r: f64 = rng.gen();
        if r < shape.par_weight && quota.pars > 0 {
            quota.pars -= 1;
            Term::par(a, b)
        } else if r < shape.par_weight + (1.0 - shape.par_weight) / 2.0 {
            Term::dot(a, b)
        } else {
            Term::plus(a, b)
        }
    };
    if quota.stars > 0 && rng.gen_bool(0.2) {
        quota.stars -= 1;
        Term::star(t)
    } else {
        t
    }
}

/// A random term with between 1 and `shape.max_leaves` leaves.
pub fn term(rng: &mut StdRng, shape: &TermShape) -> Term {
    let n = rng.gen_range(1..=shape.max_leaves.max(1));
    let mut quota = Quota {
        stars: usize::from(shape.allow_star),
        pars: shape.max_par_nodes,
    };
    term_sized(rng, shape, n, &mut quota)
}

/// A random term with exactly one star.
pub fn term_with_one_star(rng: &mut StdRng, shape: &TermShape) -> Term {
    let s = TermShape {
        allow_star: true,
        ..shape.clone()
    };
    let t = term(rng, &s);
    if t.has_star() {
        return t;
    }
    let other = term(
        rng,
        &TermShape {
            allow_star: false,
            ..shape.clone()
        },
    );
    if rng.gen_bool(0.5) {
        Term::dot(Term::star(t), other)
    } else {
        Term::plus(other, Term::star(t))
    }
}

/// Random grounded hypotheses `e ≤ w`, with `w` a non-empty word and `e` no
/// larger than `w`. With `sequential`, `e` is also ∥-free.
pub fn grounded_hypotheses(
    rng: &mut StdRng,
    alphabet: &[Label],
    count: usize,
    sequential: bool,
) -> HypothesisSet {
    let mut set = HypothesisSet::new();
    for _ in 0..count {
        let w = word(rng, alphabet, 2);
        let n = rng.gen_range(0..=w.size());
        let e = if sequential {
            SpPomset::seq_all((0..n).map(|_| SpPomset::Prim(alphabet.choose(rng).unwrap().clone())))
        } else {
            pomset_with(rng, alphabet, n, 2)
        };
        let mut lhs = Term::from_pomset(&e);
        if rng.gen_bool(0.25) {
            let extra = word(rng, alphabet, n.max(1));
            if extra.size() <= w.size() {
                lhs = Term::plus(lhs, Term::from_pomset(&extra));
            }
        }
        set.push(Hypothesis::new(lhs, Term::from_pomset(&w)).expect("star-free"));
    }
    set
}

/// Random hypotheses whose left-hand sides are `1` or single letters.
pub fn simple_lhs_hypotheses(rng: &mut StdRng, alphabet: &[Label], count: usize) -> HypothesisSet {
    let mut set = HypothesisSet::new();
    for _ in 0..count {
        let lhs = if rng.gen_bool(0.15) {
            Term::One
        } else {
            Term::Act(alphabet.choose(rng).unwrap().clone())
        };
        let n = rng.gen_range(1..=2);
        let rhs = Term::from_pomset(&pomset_with(rng, alphabet, n, 2));
        set.push(Hypothesis::new(lhs, rhs).expect("star-free"));
    }
    set.with_exch(true)
}

fn subterm_count(e: &Term) -> usize {
    match e {
        Term::Plus(a, b) | Term::Dot(a, b) | Term::Par(a, b) => {
            1 + subterm_count(a) + subterm_count(b)
        }
        Term::Star(a) => 1 + subterm_count(a),
        _ => 1,
    }
}

/// Rewrites the subterm at pre-order position `index`; returns the new
/// term and the positions still to skip, `None` once the target was reached.
fn rewrite_at(
    e: &Term,
    index: usize,
    f: &mut dyn FnMut(&Term) -> Option<Term>,
) -> (Term, Option<usize>) {
    if index == 0 {
        return (f(e).unwrap_or_else(|| e.clone()), None);
    }
    let mut rest = Some(index - 1);
    let mut go = |t: &Term, rest: &mut Option<usize>| match *rest {
        Some(i) => {
            let (nt, r) = rewrite_at(t, i, f);
            *rest = r;
            nt
        }
        None => t.clone(),
    };
    let out = match e {
        Term::Plus(a, b) => {
            let na = go(a, &mut rest);
            Term::plus(na, go(b, &mut rest))
        }
        Term::Dot(a, b) => {
            let na = go(a, &mut rest);
            Term::dot(na, go(b, &mut rest))
        }
        Term::Par(a, b) => {
            let na = go(a, &mut rest);
            Term::par(na, go(b, &mut rest))
        }
        Term::Star(a) => Term::star(go(a, &mut rest)),
        _ => e.clone(),
    };
    (out, rest)
}

/// One equational CKA axiom, applied left to right or right to left at the root.
fn cka_step(rng: &mut StdRng, e: &Term) -> Option<Term> {
    use Term::*;
    let choice = rng.gen_range(0..14);
    match (choice, e) {
        (0, Plus(a, b)) => Some(Term::plus((**b).clone(), (**a).clone())),
        (1, Par(a, b)) => Some(Term::par((**b).clone(), (**a).clone())),
        (2, Plus(a, bc)) => match &**bc {
            Plus(b, c) => Some(Term::plus(
                Term::plus((**a).clone(), (**b).clone()),
                (**c).clone(),
            )),
            _ => None,
        },
        (3, Dot(a, bc)) => match &**bc {
            Dot(b, c) => Some(Term::dot(
                Term::dot((**a).clone(), (**b).clone()),
                (**c).clone(),
            )),
            _ => None,
        },
        (4, Par(a, bc)) => match &**bc {
            Par(b, c) => Some(Term::par(
                Term::par((**a).clone(), (**b).clone()),
                (**c).clone(),
            )),
            _ => None,
        },
        (5, Dot(a, bc)) => match &**bc {
            Plus(b, c) => Some(Term::plus(
                Term::dot((**a).clone(), (**b).clone()),
                Term::dot((**a).clone(), (**c).clone()),
            )),
            _ => None,
        },
        (6, Par(a, bc)) => match &**bc {
            Plus(b, c) => Some(Term::plus(
                Term::par((**a).clone(), (**b).clone()),
                Term::par((**a).clone(), (**c).clone()),
            )),
            _ => None,
        },
        (7, Dot(ab, c)) => match &**ab {
            Plus(a, b) => Some(Term::plus(
                Term::dot((**a).clone(), (**c).clone()),
                Term::dot((**b).clone(), (**c).clone()),
            )),
            _ => None,
        },
        (8, x) => Some(match rng.gen_range(0..3) {
            0 => Term::dot(Term::One, x.clone()),
            1 => Term::par(x.clone(), Term::One),
            _ => Term::plus(x.clone(), Term::Zero),
        }),
        (9, x) => Some(Term::plus(x.clone(), x.clone())),
        (10, Dot(a, b)) if **a == One => Some((**b).clone()),
        (10, Par(a, b)) if **b == One => Some((**a).clone()),
        (11, x) => Some(match rng.gen_range(0..2) {
            0 => Term::plus(Term::dot(x.clone(), Term::Zero), x.clone()),
            _ => Term::plus(x.clone(), Term::par(Term::Zero, x.clone())),
        }),
        (12, Star(a)) => Some(Term::plus(
            Term::One,
            Term::dot((**a).clone(), Term::star((**a).clone())),
        )),
        (13, Plus(a, b)) if a == b => Some((**a).clone()),
        _ => None,
    }
}

/// Applies one random CKA axiom instance at a random position.
pub fn cka_rewrite(rng: &mut StdRng, e: &Term) -> Term {
    for _ in 0..32 {
        let at = rng.gen_range(0..subterm_count(e));
        let mut applied = false;
        let (out, _) = rewrite_at(e, at, &mut |t| {
            let r = cka_step(rng, t);
            applied = r.is_some();
            r
        });
        if applied {
            return out;
        }
    }
    e.clone()
}

fn bool_step(rng: &mut StdRng, p: &BoolTerm) -> BoolTerm {
    match rng.gen_range(0..6) {
        0 => BoolTerm::not(BoolTerm::not(p.clone())),
        1 => BoolTerm::or(p.clone(), BoolTerm::Bot),
        2 => BoolTerm::and(p.clone(), BoolTerm::Top),
        3 => BoolTerm::and(p.clone(), p.clone()),
        4 => match p {
            BoolTerm::And(a, b) => BoolTerm::not(BoolTerm::or(
                BoolTerm::not((**a).clone()),
                BoolTerm::not((**b).clone()),
            )),
            BoolTerm::Or(a, b) => BoolTerm::or((**b).clone(), (**a).clone()),
            _ => BoolTerm::or(p.clone(), p.clone()),
        },
        _ => BoolTerm::or(
            BoolTerm::and(p.clone(), BoolTerm::Top),
            BoolTerm::and(p.clone(), BoolTerm::not(BoolTerm::Top)),
        ),
    }
}

/// Applies one Boolean or glue identity to a random observation of `e`:
/// `{p} ↦ {q}` with `p ≡ q`, `{p|q} ↦ {p}+{q}`, or `{F} ↦ 0`.
pub fn bool_rewrite(rng: &mut StdRng, e: &Term) -> Term {
    let obs = e.observations().len();
    if obs == 0 {
        return e.clone();
    }
    let target = rng.gen_range(0..obs);
    let mut seen = 0;
    e.map_leaves(&mut |t| match t {
        Term::Obs(p) => {
            let here = seen == target;
            seen += 1;
            if !here {
                return t.clone();
            }
            match p {
                BoolTerm::Or(a, b) if rng.gen_bool(0.5) => {
                    Term::plus(Term::Obs((**a).clone()), Term::Obs((**b).clone()))
                }
                BoolTerm::Bot if rng.gen_bool(0.5) => Term::Zero,
                _ => Term::Obs(bool_step(rng, p)),
            }
        }
        other => other.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::semantics_starfree;

    #[test]
    fn generators_respect_their_bounds() {
        let mut r = rng(7);
        let ab = alphabet(&["a", "b"]);
        for _ in 0..200 {
            let u = pomset(&mut r, &ab, 6);
            assert!(u.size() <= 6 && u.is_canonical());
            let c = context(&mut r, &ab, 4);
            assert!(c.is_well_formed());
            assert!(word(&mut r, &ab, 3).is_word());
            let t = term(&mut r, &TermShape::plain(ab.clone(), 8));
            assert!(t.leaf_count() <= 8 && !t.has_star());
        }
    }

    #[test]
    fn rewrites_preserve_semantics() {
        let mut r = rng(11);
        let shape = TermShape::plain(alphabet(&["a", "b", "c"]), 6);
        for _ in 0..300 {
            let e = term(&mut r, &shape);
            let f = cka_rewrite(&mut r, &e);
            assert_eq!(
                semantics_starfree(&e).unwrap(),
                semantics_starfree(&f).unwrap(),
                "{e} vs {f}"
            );
        }
    }
}
