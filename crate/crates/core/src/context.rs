//! Pomset contexts: sp-pomsets with a single hole, plugging, and the
//! constructive context lemmas (parallel factorisation, erasure,
//! subsumption and N-pattern elimination).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::pomset::{Label, PomsetLanguage, SpPomset};
use crate::poset::{
    decompose, find_n_pattern, subsumption_witness, to_poset, transitive_close, LabelledPoset,
};
use crate::subsume::subsumes;

/// A series-parallel context: a canonical sp-term over `Σ ∪ {*}` with
/// exactly one hole leaf.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpContext(SpPomset);

impl SpContext {
    /// The trivial context `*`.
    pub fn hole() -> Self {
        SpContext(SpPomset::Prim(Label::hole()))
    }

    /// Wraps a canonical tree that contains exactly one hole leaf.
    pub fn from_tree(tree: SpPomset) -> Result<Self> {
        let holes = tree.labels().iter().filter(|l| l.is_hole()).count();
        if holes != 1 {
            return Err(Error::PreconditionViolated(format!(
                "a context needs exactly one hole, found {holes}"
            )));
        }
        if !tree.is_canonical() {
            return Err(Error::PreconditionViolated(
                "context tree is not canonical".into(),
            ));
        }
        Ok(SpContext(tree))
    }

    pub fn tree(&self) -> &SpPomset {
        &self.0
    }

    /// `C · v`
    pub fn then(&self, v: &SpPomset) -> SpContext {
        SpContext(SpPomset::seq_all([self.0.clone(), v.clone()]))
    }

    /// `u · C`
    pub fn after(&self, u: &SpPomset) -> SpContext {
        SpContext(SpPomset::seq_all([u.clone(), self.0.clone()]))
    }

    /// `C ∥ v`
    pub fn par_with(&self, v: &SpPomset) -> SpContext {
        SpContext(SpPomset::par_all([self.0.clone(), v.clone()]))
    }

    /// Number of non-hole events.
    pub fn size(&self) -> usize {
        self.0.size() - 1
    }

    /// True iff the inductive context grammar holds: every internal node
    /// has exactly one child carrying the hole.
    pub fn is_well_formed(&self) -> bool {
        fn check(t: &SpPomset) -> bool {
            match t {
                SpPomset::Empty => false,
                SpPomset::Prim(l) => l.is_hole(),
                SpPomset::Seq(cs) | SpPomset::Par(cs) => {
                    let carriers: Vec<_> = cs.iter().filter(|c| c.contains_hole()).collect();
                    carriers.len() == 1 && check(carriers[0])
                }
            }
        }
        self.0.is_canonical() && check(&self.0)
    }

    pub fn to_general(&self) -> GeneralContext {
        GeneralContext(to_poset(&self.0))
    }
}

impl fmt::Display for SpContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for SpContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.0)
    }
}

/// A context given as an arbitrary labelled poset with one hole node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralContext(LabelledPoset);

impl GeneralContext {
    pub fn new(poset: LabelledPoset) -> Result<Self> {
        let holes = poset.hole_nodes();
        if holes.len() != 1 {
            return Err(Error::PreconditionViolated(format!(
                "a context needs exactly one hole node, found {}",
                holes.len()
            )));
        }
        Ok(GeneralContext(poset))
    }

    /// Builds a context from node labels where `None` marks the hole.
    pub fn from_pairs(labels: Vec<Option<Label>>, pairs: &[(usize, usize)]) -> Result<Self> {
        let labels = labels
            .into_iter()
            .map(|l| l.unwrap_or_else(Label::hole))
            .collect();
        Self::new(LabelledPoset::from_pairs(labels, pairs)?)
    }

    pub fn poset(&self) -> &LabelledPoset {
        &self.0
    }

    pub fn hole_node(&self) -> usize {
        self.0.hole_nodes()[0]
    }
}

/// `C[u]`: substitute `u` for the hole and renormalise.
pub fn plug(c: &SpContext, u: &SpPomset) -> SpPomset {
    fn go(t: &SpPomset, u: &SpPomset) -> SpPomset {
        match t {
            SpPomset::Prim(l) if l.is_hole() => u.clone(),
            SpPomset::Empty | SpPomset::Prim(_) => t.clone(),
            SpPomset::Seq(cs) => SpPomset::seq_all(cs.iter().map(|c| go(c, u))),
            SpPomset::Par(cs) => SpPomset::par_all(cs.iter().map(|c| go(c, u))),
        }
    }
    go(&c.0, u)
}

/// Poset-level plugging: the hole node is replaced by the events of `u`,
/// which inherit everything below and above the hole.
pub fn plug_general(c: &GeneralContext, u: &SpPomset) -> LabelledPoset {
    let p = c.poset();
    let hole = c.hole_node();
    let inner = to_poset(u);
    let outer: Vec<usize> = (0..p.len()).filter(|&i| i != hole).collect();
    let n = outer.len() + inner.len();
    let mut labels = Vec::with_capacity(n);
    labels.extend(outer.iter().map(|&i| p.label(i).clone()));
    labels.extend(inner.labels().iter().cloned());
    let mut leq = vec![vec![false; n]; n];
    let k = outer.len();
    for (x, &i) in outer.iter().enumerate() {
        for (y, &j) in outer.iter().enumerate() {
            leq[x][y] = p.leq(i, j);
        }
        for y in 0..inner.len() {
            leq[x][k + y] = p.leq(i, hole);
            leq[k + y][x] = p.leq(hole, i);
        }
    }
    for x in 0..inner.len() {
        for y in 0..inner.len() {
            leq[k + x][k + y] = inner.leq(x, y);
        }
    }
    LabelledPoset::from_matrix_unchecked(labels, leq)
}

/// `C[L] = { C[u] : u ∈ L }`
pub fn plug_lang(c: &SpContext, l: &PomsetLanguage) -> PomsetLanguage {
    l.iter().map(|u| plug(c, u)).collect()
}

/// Context subsumption `c ⊑ d`, with the hole treated as an ordinary label.
pub fn context_subsumes(d: &SpContext, c: &SpContext) -> bool {
    subsumption_witness(&to_poset(&d.0), &to_poset(&c.0)).is_some()
}

/// Same as [`context_subsumes`] for a general context on the right.
pub fn context_subsumes_general(d: &GeneralContext, c: &SpContext) -> bool {
    subsumption_witness(d.poset(), &to_poset(&c.0)).is_some()
}

pub fn is_sequential(c: &SpContext) -> bool {
    fn no_par(t: &SpPomset) -> bool {
        match t {
            SpPomset::Par(_) => false,
            SpPomset::Seq(cs) => cs.iter().all(no_par),
            _ => true,
        }
    }
    no_par(&c.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Given `C[u] = v ∥ w` with `u` a non-empty word, splits the context:
/// either `C = C' ∥ w` with `C'[u] = v` (`Left`), or `C = v ∥ C'` with
/// `C'[u] = w` (`Right`).
pub fn factor_parallel(
    c: &SpContext,
    u: &SpPomset,
    v: &SpPomset,
    w: &SpPomset,
) -> Result<(Side, SpContext)> {
    if u.is_empty() || !u.is_word() {
        return Err(Error::PreconditionViolated(
            "u must be a non-empty word".into(),
        ));
    }
    if plug(c, u) != SpPomset::par_all([v.clone(), w.clone()]) {
        return Err(Error::PreconditionViolated(
            "C[u] differs from v ∥ w".into(),
        ));
    }
    match &c.0 {
        SpPomset::Par(cs) => {
            // The hole branch plugs to a single parallel component, which
            // belongs either to v or to w.
            let idx = cs
                .iter()
                .position(SpPomset::contains_hole)
                .expect("context has a hole");
            let branch = SpContext(cs[idx].clone());
            for (side, target, other) in [(Side::Left, v, w), (Side::Right, w, v)] {
                let mut rest = target.par_factors();
                let filled = plug(&branch, u);
                let Some(pos) = rest.iter().position(|x| *x == filled) else {
                    continue;
                };
                rest.remove(pos);
                let candidate = SpContext(SpPomset::par_all(
                    rest.into_iter().chain([branch.0.clone()]),
                ));
                let rebuilt = SpContext(SpPomset::par_all([candidate.0.clone(), other.clone()]));
                if rebuilt == *c && plug(&candidate, u) == *target {
                    return Ok((side, candidate));
                }
            }
            Err(Error::PreconditionViolated(
                "no parallel factorisation found".into(),
            ))
        }
        // `*` or a sequential context: C[u] is not a parallel composition,
        // so one of v, w is empty.
        _ => {
            if w.is_empty() {
                Ok((Side::Left, c.clone()))
            } else if v.is_empty() {
                Ok((Side::Right, c.clone()))
            } else {
                Err(Error::PreconditionViolated(
                    "no parallel factorisation found".into(),
                ))
            }
        }
    }
}

/// Given `v ⊑ C[1]`, builds an sp-context `C' ⊑ C` with `C'[1] = v`.
pub fn erase_to(c: &SpContext, v: &SpPomset) -> Result<SpContext> {
    let p = to_poset(&c.0);
    let hole = p.hole_nodes()[0];
    let outer: Vec<usize> = (0..p.len()).filter(|&i| i != hole).collect();
    let u = p.restrict(&outer);
    let vp = to_poset(v);
    let h = subsumption_witness(&u, &vp)
        .ok_or_else(|| Error::PreconditionViolated("v is not subsumed by C[1]".into()))?;
    // Least transitive relation containing both orders.
    let mut leq: Vec<Vec<bool>> = p.matrix().to_vec();
    for (x, &i) in outer.iter().enumerate() {
        for (y, &j) in outer.iter().enumerate() {
            if vp.leq(h[x], h[y]) {
                leq[i][j] = true;
            }
        }
    }
    transitive_close(&mut leq);
    let extended = LabelledPoset::from_matrix(p.labels().to_vec(), leq)
        .map_err(|e| Error::PreconditionViolated(format!("order extension failed: {e}")))?;
    let result = spify_context(&GeneralContext(extended))?;
    if plug(&result, &SpPomset::Empty) != *v {
        return Err(Error::PreconditionViolated(
            "erasure did not reproduce v".into(),
        ));
    }
    Ok(result)
}

/// Given `v ⊑ C[a]`, builds an sp-context `C' ⊑ C` with `C'[a] = v`: the
/// order of `v` is reused and the event matched with the hole becomes the
/// new hole.
pub fn subsume_to(c: &SpContext, a: &Label, v: &SpPomset) -> Result<SpContext> {
    let p = to_poset(&c.0);
    let hole = p.hole_nodes()[0];
    let filled = p.relabel(hole, a.clone());
    let vp = to_poset(v);
    let h = subsumption_witness(&filled, &vp)
        .ok_or_else(|| Error::PreconditionViolated("v is not subsumed by C[a]".into()))?;
    let tree = decompose(&vp.relabel(h[hole], Label::hole()))?;
    let result = SpContext::from_tree(tree)?;
    debug_assert_eq!(plug(&result, &SpPomset::Prim(a.clone())), *v);
    Ok(result)
}

/// Turns a general context whose `C[1]` is series-parallel into an
/// sp-context `C' ⊑ C` with the same `C'[1]`, by repeatedly adding one
/// order edge at the hole of an N-pattern.
pub fn spify_context(c: &GeneralContext) -> Result<SpContext> {
    spify_context_traced(c).map(|(ctx, _)| ctx)
}

/// [`spify_context`] that also reports the edges it added, in order.
pub fn spify_context_traced(c: &GeneralContext) -> Result<(SpContext, Vec<(usize, usize)>)> {
    let empty_plug = plug_general(c, &SpPomset::Empty);
    if find_n_pattern(&empty_plug).is_some() {
        return Err(Error::PreconditionViolated(
            "C[1] is not series-parallel".into(),
        ));
    }
    let hole = c.hole_node();
    let mut leq: Vec<Vec<bool>> = c.poset().matrix().to_vec();
    let labels = c.poset().labels().to_vec();
    let mut added = Vec::new();
    loop {
        let current = LabelledPoset::from_matrix_unchecked(labels.clone(), leq.clone());
        let Some([s1, s2, s3, s4]) = find_n_pattern(&current) else {
            let tree = decompose(&current)?;
            return Ok((SpContext::from_tree(tree)?, added));
        };
        let edge = if s1 == hole {
            (hole, s4)
        } else if s2 == hole {
            (hole, s1)
        } else if s3 == hole {
            (s4, hole)
        } else if s4 == hole {
            (s1, hole)
        } else {
            return Err(Error::PreconditionViolated(
                "N-pattern avoids the hole".into(),
            ));
        };
        leq[edge.0][edge.1] = true;
        transitive_close(&mut leq);
        added.push(edge);
        if (0..labels.len()).any(|i| (0..labels.len()).any(|j| i != j && leq[i][j] && leq[j][i])) {
            return Err(Error::InvalidPoset(
                "order extension lost antisymmetry".into(),
            ));
        }
    }
}

/// All sp-contexts `C` with `C[v] = w`.
pub fn occurrences(w: &SpPomset, v: &SpPomset) -> BTreeSet<SpContext> {
    let mut out = BTreeSet::new();
    if w.size() < v.size() {
        return out;
    }
    if w == v {
        out.insert(SpContext::hole());
    }
    for t in occ_seq(w, v) {
        out.insert(SpContext(t));
    }
    for t in occ_par(w, v) {
        out.insert(SpContext(t));
    }
    out
}

fn hole_tree() -> SpPomset {
    SpPomset::Prim(Label::hole())
}

// Hole branches that may sit inside a sequential node: `*` or a
// parallel-rooted context.
fn seq_slot(m: &SpPomset, v: &SpPomset) -> Vec<SpPomset> {
    let mut out = Vec::new();
    if m == v {
        out.push(hole_tree());
    }
    out.extend(occ_par(m, v));
    out
}

// Hole branches that may sit inside a parallel node: `*` or a
// sequential-rooted context.
fn par_slot(m: &SpPomset, v: &SpPomset) -> Vec<SpPomset> {
    let mut out = Vec::new();
    if m == v {
        out.push(hole_tree());
    }
    out.extend(occ_seq(m, v));
    out
}

/// Sequential-rooted contexts `C` with `C[v] = w`.
fn occ_seq(w: &SpPomset, v: &SpPomset) -> Vec<SpPomset> {
    let fs = w.seq_factors();
    let m = fs.len();
    let mut out = Vec::new();
    for i in 0..=m {
        for j in i..=m {
            if i == 0 && j == m {
                continue;
            }
            let middle = SpPomset::seq_all(fs[i..j].iter().cloned());
            if middle.size() < v.size() {
                continue;
            }
            for slot in seq_slot(&middle, v) {
                let parts: Vec<SpPomset> = fs[..i]
                    .iter()
                    .cloned()
                    .chain([slot])
                    .chain(fs[j..].iter().cloned())
                    .collect();
                out.push(SpPomset::Seq(parts));
            }
        }
    }
    out
}

/// Parallel-rooted contexts `C` with `C[v] = w`.
fn occ_par(w: &SpPomset, v: &SpPomset) -> Vec<SpPomset> {
    let fs = w.par_factors();
    let n = fs.len();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    // `rest` chooses which components stay outside the hole branch.
    for mask in 1u64..(1u64 << n) {
        let (rest, inside): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| mask & (1 << i) != 0);
        let rest: Vec<SpPomset> = rest.iter().map(|&i| fs[i].clone()).collect();
        let inside = SpPomset::par_all(inside.iter().map(|&i| fs[i].clone()));
        if !seen.insert((rest.clone(), inside.clone())) || inside.size() < v.size() {
            continue;
        }
        for slot in par_slot(&inside, v) {
            out.push(SpPomset::par_all(rest.iter().cloned().chain([slot])));
        }
    }
    out
}

/// Checks `v ⊑ C[1]` for the erasure precondition.
pub fn erasable(c: &SpContext, v: &SpPomset) -> bool {
    subsumes(&plug(c, &SpPomset::Empty), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pomset::{lbl, par, seq};
    use crate::term::parse_context;

    fn ctx(s: &str) -> SpContext {
        parse_context(s).unwrap()
    }
    fn pom(s: &str) -> SpPomset {
        crate::term::parse_pomset(s).unwrap()
    }

    #[test]
    fn plug_examples() {
        let u = pom("a;(b||c)");
        assert_eq!(plug(&SpContext::hole(), &u), u);
        assert_eq!(plug(&ctx("a;*"), &pom("b")), pom("a;b"));
        assert_eq!(plug(&ctx("(*||b);c"), &pom("a")), pom("(a||b);c"));
    }

    #[test]
    fn plug_general_examples() {
        let only_hole = GeneralContext::from_pairs(vec![None], &[]).unwrap();
        let p = plug_general(&only_hole, &pom("a"));
        assert_eq!(p.len(), 1);
        assert_eq!(p.label(0), &lbl("a"));

        let c = ctx("a;*;b");
        let erased = plug_general(&c.to_general(), &SpPomset::Empty);
        assert_eq!(crate::poset::from_poset(&erased).unwrap(), pom("a;b"));
    }

    #[test]
    fn plug_general_on_n_shaped_context() {
        // Hole h below x and y; z below y. Plugging a keeps the N.
        let c = GeneralContext::from_pairs(
            vec![None, Some(lbl("x")), Some(lbl("z")), Some(lbl("y"))],
            &[(0, 1), (0, 3), (2, 3)],
        )
        .unwrap();
        let p = plug_general(&c, &pom("a"));
        assert!(!crate::poset::is_n_free(&p));
    }

    #[test]
    fn plug_lang_examples() {
        let l: PomsetLanguage = [pom("a"), pom("c")].into_iter().collect();
        assert_eq!(plug_lang(&SpContext::hole(), &l), l);
        let expected: PomsetLanguage = [pom("a;b"), pom("c;b")].into_iter().collect();
        assert_eq!(plug_lang(&ctx("*;b"), &l), expected);
        assert!(plug_lang(&ctx("*;b"), &PomsetLanguage::new()).is_empty());
    }

    #[test]
    fn factor_parallel_examples() {
        let a = pom("a");
        assert_eq!(
            factor_parallel(&SpContext::hole(), &a, &a, &SpPomset::Empty).unwrap(),
            (Side::Left, SpContext::hole())
        );
        assert_eq!(
            factor_parallel(&ctx("*||b"), &a, &a, &pom("b")).unwrap(),
            (Side::Left, SpContext::hole())
        );
        assert_eq!(
            factor_parallel(&ctx("(*;c)||b"), &a, &pom("a;c"), &pom("b")).unwrap(),
            (Side::Left, ctx("*;c"))
        );
        assert!(factor_parallel(&ctx("*||b"), &a, &a, &pom("c")).is_err());
        assert!(factor_parallel(&ctx("*||b"), &pom("a||c"), &a, &pom("b")).is_err());
    }

    #[test]
    fn erase_examples() {
        let c = ctx("*||a||b");
        let v = pom("a;b");
        let c2 = erase_to(&c, &v).unwrap();
        assert_eq!(plug(&c2, &SpPomset::Empty), v);
        assert!(context_subsumes(&c, &c2));

        let c = ctx("*;a");
        let c2 = erase_to(&c, &pom("a")).unwrap();
        assert_eq!(plug(&c2, &SpPomset::Empty), pom("a"));

        assert!(erase_to(&ctx("*||a||b"), &pom("a;c")).is_err());
    }

    #[test]
    fn subsume_examples() {
        let a = lbl("a");
        assert_eq!(
            subsume_to(&ctx("*||b"), &a, &pom("a;b")).unwrap(),
            ctx("*;b")
        );
        assert_eq!(
            subsume_to(&ctx("*||b"), &a, &pom("b;a")).unwrap(),
            ctx("b;*")
        );
        let c = ctx("(*||b);c");
        let same = plug(&c, &SpPomset::Prim(a.clone()));
        assert_eq!(
            plug(&subsume_to(&c, &a, &same).unwrap(), &SpPomset::Prim(a)),
            same
        );
    }

    #[test]
    fn spify_single_edge() {
        // Nodes: 0 = hole, 1, 2, 3 with hole ≤ 2, 1 ≤ 2, 1 ≤ 3: the N
        // (hole, 1, 2, 3) has the hole in first position.
        let c = GeneralContext::from_pairs(
            vec![None, Some(lbl("b")), Some(lbl("c")), Some(lbl("d"))],
            &[(0, 2), (1, 2), (1, 3)],
        )
        .unwrap();
        let (out, edges) = spify_context_traced(&c).unwrap();
        assert_eq!(edges, vec![(0, 3)]);
        assert!(out.is_well_formed());
        assert!(context_subsumes_general(&c, &out));
        let erased = from_poset_unwrap(&plug_general(&c, &SpPomset::Empty));
        assert_eq!(plug(&out, &SpPomset::Empty), erased);
    }

    fn from_poset_unwrap(p: &LabelledPoset) -> SpPomset {
        crate::poset::from_poset(p).unwrap()
    }

    #[test]
    fn spify_already_sp() {
        let c = ctx("(*||b);c");
        let (out, edges) = spify_context_traced(&c.to_general()).unwrap();
        assert!(edges.is_empty());
        assert_eq!(out, c);
    }

    #[test]
    fn occurrence_examples() {
        let a = pom("a");
        assert_eq!(
            occurrences(&a, &a).into_iter().collect::<Vec<_>>(),
            vec![SpContext::hole()]
        );
        assert_eq!(
            occurrences(&pom("a;b"), &a).into_iter().collect::<Vec<_>>(),
            vec![ctx("*;b")]
        );
        assert_eq!(
            occurrences(&pom("a||a"), &a)
                .into_iter()
                .collect::<Vec<_>>(),
            vec![ctx("*||a")]
        );
        let w = pom("a;b;c");
        assert!(occurrences(&w, &pom("a;b")).contains(&ctx("*;c")));
        assert!(!occurrences(&w, &pom("a;c")).iter().any(|_| true));
    }

    #[test]
    fn sequential_contexts() {
        assert!(is_sequential(&SpContext::hole()));
        assert!(is_sequential(&ctx("a;*;b")));
        assert!(!is_sequential(&ctx("*||a")));
    }

    #[test]
    fn context_builders() {
        let c = ctx("*||a");
        assert_eq!(
            plug(&c.then(&pom("b")), &pom("c")),
            seq(&par(&pom("c"), &pom("a")), &pom("b"))
        );
        assert_eq!(
            plug(&c.after(&pom("b")), &pom("c")),
            seq(&pom("b"), &par(&pom("c"), &pom("a")))
        );
        assert_eq!(plug(&c.par_with(&pom("b")), &pom("c")), pom("a||b||c"));
    }
}
