//! Brute-force reference implementations, usable only at small sizes.
//!
//! Everything here works on explicit posets and exhaustive enumeration, and
//! shares no code paths with the structural algorithms it is compared with
//! beyond [`to_poset`] and the N-free decomposition.

use std::collections::{BTreeSet, HashSet};

use crate::context::{plug, GeneralContext, SpContext};
use crate::pomset::{Label, PomsetLanguage, SpPomset};
use crate::poset::{decompose, is_n_free, subsumption_witness, to_poset, LabelledPoset};

/// Strict orders on `0..n` contained in the index order, as matrices of
/// the reflexive order. Every finite poset is isomorphic to one of them.
pub fn natural_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let transitive =
            (0..n).all(|i| (0..n).all(|j| !leq[i][j] || (0..n).all(|k| !leq[j][k] || leq[i][k])));
        if transitive {
            out.push(leq);
        }
    }
    out
}

/// Every reflexive order on `0..n`, node identities kept apart.
pub fn all_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let antisymmetric = (0..n).all(|i| (0..n).all(|j| i == j || !(leq[i][j] && leq[j][i])));
        let transitive =
            (0..n).all(|i| (0..n).all(|j| !leq[i][j] || (0..n).all(|k| !leq[j][k] || leq[i][k])));
        if antisymmetric && transitive {
            out.push(leq);
        }
    }
    out
}

/// Distinct arrangements of a label multiset.
fn arrangements(labels: &[Label]) -> Vec<Vec<Label>> {
    let mut sorted = labels.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    let mut used = vec![false; sorted.len()];
    let mut cur = Vec::new();
    fn rec(sorted: &[Label], used: &mut [bool], cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if cur.len() == sorted.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..sorted.len() {
            if used[i] || (i > 0 && sorted[i] == sorted[i - 1] && !used[i - 1]) {
                continue;
            }
            used[i] = true;
            cur.push(sorted[i].clone());
            rec(sorted, used, cur, out);
            cur.pop();
            used[i] = false;
        }
    }
    rec(&sorted, &mut used, &mut cur, &mut out);
    out
}

/// All sp-pomsets whose label multiset is exactly `labels` (the reserved
/// hole label is allowed, which yields contexts).
pub fn all_sp_pomsets(labels: &[Label]) -> PomsetLanguage {
    let n = labels.len();
    let orders = natural_orders(n);
    let mut out = PomsetLanguage::new();
    for arrangement in arrangements(labels) {
        for leq in &orders {
            let p = LabelledPoset::from_matrix_unchecked(arrangement.clone(), leq.clone());
            if is_n_free(&p) {
                out.insert(decompose(&p).expect("N-free posets decompose"));
            }
        }
    }
    out
}

/// All sp-pomsets with at most `max_leaves` leaves over `alphabet`.
pub fn all_sp_pomsets_upto(alphabet: &[Label], max_leaves: usize) -> PomsetLanguage {
    let mut out = PomsetLanguage::singleton(SpPomset::Empty);
    for multiset in multisets(alphabet, max_leaves) {
        out.extend(all_sp_pomsets(&multiset));
    }
    out
}

/// Non-empty multisets over `alphabet` of size at most `max`.
pub fn multisets(alphabet: &[Label], max: usize) -> Vec<Vec<Label>> {
    let mut out = Vec::new();
    fn rec(
        alphabet: &[Label],
        start: usize,
        max: usize,
        cur: &mut Vec<Label>,
        out: &mut Vec<Vec<Label>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..alphabet.len() {
            cur.push(alphabet[i].clone());
            rec(alphabet, i, max, cur, out);
            cur.pop();
        }
    }
    rec(alphabet, 0, max, &mut Vec::new(), &mut out);
    out
}

/// All sp-contexts whose non-hole labels are exactly `letters`.
pub fn all_sp_contexts(letters: &[Label]) -> Vec<SpContext> {
    let mut labels = letters.to_vec();
    labels.push(Label::hole());
    all_sp_pomsets(&labels)
        .into_iter()
        .map(|t| SpContext::from_tree(t).expect("one hole"))
        .collect()
}

/// All sp-contexts with at most `max_letters` letters over `alphabet`.
pub fn all_sp_contexts_upto(alphabet: &[Label], max_letters: usize) -> Vec<SpContext> {
    let mut out = all_sp_contexts(&[]);
    for m in multisets(alphabet, max_letters) {
        out.extend(all_sp_contexts(&m));
    }
    out
}

/// One general context per poset shape on `n` nodes and hole position,
/// with the other nodes labelled `e0`, `e1`, ...
pub fn all_general_contexts(n: usize) -> Vec<GeneralContext> {
    let mut out = Vec::new();
    for leq in natural_orders(n) {
        for hole in 0..n {
            let labels: Vec<Option<Label>> = (0..n)
                .map(|i| (i != hole).then(|| Label::new(format!("e{i}")).expect("valid")))
                .collect();
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && leq[i][j])
                .collect();
            out.push(GeneralContext::from_pairs(labels, &pairs).expect("valid order"));
        }
    }
    out
}

/// `u ⊑ v` by bijection search on explicit posets.
pub fn subsumes_by_search(v: &SpPomset, u: &SpPomset) -> bool {
    subsumption_witness(&to_poset(v), &to_poset(u)).is_some()
}

/// `{ u : u ⊑ v }`, as the N-free order extensions of `v`'s poset.
pub fn down_closure_oracle(v: &SpPomset) -> PomsetLanguage {
    let p = to_poset(v);
    let n = p.len();
    let mut seen: HashSet<Vec<Vec<bool>>> = HashSet::new();
    let mut stack = vec![p.matrix().to_vec()];
    let mut out = PomsetLanguage::new();
    while let Some(leq) = stack.pop() {
        if !seen.insert(leq.clone()) {
            continue;
        }
        let q = LabelledPoset::from_matrix_unchecked(p.labels().to_vec(), leq.clone());
        if is_n_free(&q) {
            out.insert(decompose(&q).expect("N-free posets decompose"));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && !leq[i][j] && !leq[j][i] {
                    let mut next = leq.clone();
                    for x in 0..n {
                        for y in 0..n {
                            if leq[x][i] && leq[j][y] {
                                next[x][y] = true;
                            }
                        }
                    }
                    stack.push(next);
                }
            }
        }
    }
    out
}

/// All sp-contexts `C` with `C[v] = w`, by enumeration of candidate contexts
/// over the residual labels.
pub fn occurrences_oracle(w: &SpPomset, v: &SpPomset) -> BTreeSet<SpContext> {
    let mut residual = w.labels();
    for l in v.labels() {
        match residual.iter().position(|x| *x == l) {
            Some(i) => {
                residual.remove(i);
            }
            None => return BTreeSet::new(),
        }
    }
    residual.push(Label::hole());
    all_sp_pomsets(&residual)
        .into_iter()
        .filter_map(|t| SpContext::from_tree(t).ok())
        .filter(|c| plug(c, v) == *w)
        .collect()
}

/// Whether `u` is in the exchange closure of `l`, by the subsumption criterion.
pub fn in_exch_closure(l: &PomsetLanguage, u: &SpPomset) -> bool {
    l.iter()
        .any(|v| v.label_multiset() == u.label_multiset() && subsumes_by_search(v, u))
}
