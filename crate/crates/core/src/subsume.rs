//! Subsumption (`u ⊑ v`: same events, at least as much order) and
//! downward closure of sp-pomsets.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::pomset::{Label, PomsetLanguage, SpPomset};
use crate::poset::{subsumption_witness, to_poset};

/// Above this many events the bijection search is not attempted.
pub const BIJECTION_LIMIT: usize = 12;

/// `u ⊑ v`: there is a label- and order-preserving bijection from the events
/// of `v` onto those of `u`.
pub fn subsumes(v: &SpPomset, u: &SpPomset) -> bool {
    if u == v {
        return true;
    }
    if v.size() != u.size() || v.label_multiset() != u.label_multiset() {
        return false;
    }
    if v.size() <= BIJECTION_LIMIT {
        subsumption_witness(&to_poset(v), &to_poset(u)).is_some()
    } else {
        subsumes_structural(v, u)
    }
}

/// Subsumption decided on the canonical terms, by following how `u` must be
/// generated from `v`: sequential factors of `v` stay in order, parallel
/// components of `v` are distributed over the components of `u`, and a
/// sequential cut of `u` induces a down-set split of `v`.
pub fn subsumes_structural(v: &SpPomset, u: &SpPomset) -> bool {
    if u == v {
        return true;
    }
    if v.size() != u.size() || v.label_multiset() != u.label_multiset() {
        return false;
    }
    match v {
        SpPomset::Empty | SpPomset::Prim(_) => false,
        SpPomset::Seq(cs) => {
            let factors = u.seq_factors();
            let mut start = 0;
            for c in cs {
                let target = c.label_multiset();
                let mut acc: BTreeMap<Label, usize> = BTreeMap::new();
                let mut end = start;
                while end < factors.len() && acc != target {
                    for (l, n) in factors[end].label_multiset() {
                        *acc.entry(l).or_insert(0) += n;
                    }
                    end += 1;
                }
                if acc != target {
                    return false;
                }
                let block = SpPomset::seq_all(factors[start..end].iter().cloned());
                if !subsumes_structural(c, &block) {
                    return false;
                }
                start = end;
            }
            start == factors.len()
        }
        SpPomset::Par(cs) => match u {
            SpPomset::Par(us) => {
                let mut groups = vec![Vec::new(); us.len()];
                assign_components(cs, 0, us, &mut groups)
            }
            SpPomset::Seq(fs) => {
                let first = &fs[0];
                let rest = SpPomset::seq_all(fs[1..].iter().cloned());
                let want = first.label_multiset();
                splits(v).into_iter().any(|(lo, hi)| {
                    lo.label_multiset() == want
                        && subsumes_structural(&lo, first)
                        && subsumes_structural(&hi, &rest)
                })
            }
            _ => false,
        },
    }
}

fn assign_components(
    cs: &[SpPomset],
    i: usize,
    us: &[SpPomset],
    groups: &mut Vec<Vec<SpPomset>>,
) -> bool {
    if i == cs.len() {
        return groups.iter().zip(us).all(|(g, uj)| {
            !g.is_empty() && subsumes_structural(&SpPomset::par_all(g.iter().cloned()), uj)
        });
    }
    let labels = cs[i].label_multiset();
    for j in 0..us.len() {
        let fits = {
            let have = us[j].label_multiset();
            let mut used: BTreeMap<Label, usize> = BTreeMap::new();
            for g in &groups[j] {
                for (l, n) in g.label_multiset() {
                    *used.entry(l).or_insert(0) += n;
                }
            }
            labels.iter().all(|(l, n)| {
                used.get(l).copied().unwrap_or(0) + n <= have.get(l).copied().unwrap_or(0)
            })
        };
        if !fits {
            continue;
        }
        groups[j].push(cs[i].clone());
        if assign_components(cs, i + 1, us, groups) {
            return true;
        }
        groups[j].pop();
    }
    false
}

/// All splits of `u` into a down-set and its complement, as `(lower, upper)`
/// pairs of restrictions. Includes the trivial splits.
pub fn splits(u: &SpPomset) -> Vec<(SpPomset, SpPomset)> {
    let mut out: Vec<(SpPomset, SpPomset)> = match u {
        SpPomset::Empty => vec![(SpPomset::Empty, SpPomset::Empty)],
        SpPomset::Prim(_) => vec![(SpPomset::Empty, u.clone()), (u.clone(), SpPomset::Empty)],
        SpPomset::Seq(cs) => {
            let mut out = Vec::new();
            for (j, c) in cs.iter().enumerate() {
                for (lo, hi) in splits(c) {
                    let lower = SpPomset::seq_all(cs[..j].iter().cloned().chain([lo]));
                    let upper =
                        SpPomset::seq_all([hi].into_iter().chain(cs[j + 1..].iter().cloned()));
                    out.push((lower, upper));
                }
            }
            out
        }
        SpPomset::Par(cs) => {
            let mut acc = vec![(Vec::new(), Vec::new())];
            for c in cs {
                let cs_splits = splits(c);
                let mut next = Vec::with_capacity(acc.len() * cs_splits.len());
                for (los, his) in &acc {
                    for (lo, hi) in &cs_splits {
                        let mut l2: Vec<SpPomset> = los.clone();
                        let mut h2: Vec<SpPomset> = his.clone();
                        l2.push(lo.clone());
                        h2.push(hi.clone());
                        next.push((l2, h2));
                    }
                }
                acc = next;
            }
            acc.into_iter()
                .map(|(l, h)| (SpPomset::par_all(l), SpPomset::par_all(h)))
                .collect()
        }
    };
    out.sort();
    out.dedup();
    out
}

/// Memo table for [`downward_closure_cached`].
#[derive(Default)]
pub struct DownCache {
    table: HashMap<SpPomset, Vec<SpPomset>>,
}

impl DownCache {
    pub fn new() -> Self {
        Self::default()
    }
}

/// The set of all sp-pomsets subsumed by `v`.
pub fn downward_closure(v: &SpPomset) -> PomsetLanguage {
    let mut cache = DownCache::new();
    downward_closure_cached(v, &mut cache)
        .iter()
        .cloned()
        .collect()
}

pub fn downward_closure_cached<'c>(v: &SpPomset, cache: &'c mut DownCache) -> &'c [SpPomset] {
    if !cache.table.contains_key(v) {
        let result = compute_down(v, cache);
        cache.table.insert(v.clone(), result);
    }
    &cache.table[v]
}

fn compute_down(v: &SpPomset, cache: &mut DownCache) -> Vec<SpPomset> {
    let mut out: HashSet<SpPomset> = HashSet::new();
    match v {
        SpPomset::Empty | SpPomset::Prim(_) => {
            out.insert(v.clone());
        }
        SpPomset::Seq(cs) => {
            // Everything below a sequential composition keeps the blocks in
            // order, so the closure is the product of the blocks' closures.
            let mut acc = vec![SpPomset::Empty];
            for c in cs {
                let below = downward_closure_cached(c, cache).to_vec();
                let mut next = Vec::with_capacity(acc.len() * below.len());
                for x in &acc {
                    for y in &below {
                        next.push(SpPomset::seq_all([x.clone(), y.clone()]));
                    }
                }
                acc = next;
            }
            out.extend(acc);
        }
        SpPomset::Par(cs) => {
            out.insert(v.clone());
            // Parallel: components of the result group the components of v.
            let n = cs.len();
            for mask in 1..(1u64 << (n - 1)) {
                let (a, b): (Vec<_>, Vec<_>) =
                    (0..n).partition(|&i| i == 0 || mask & (1 << (i - 1)) == 0);
                let pa = SpPomset::par_all(a.iter().map(|&i| cs[i].clone()));
                let pb = SpPomset::par_all(b.iter().map(|&i| cs[i].clone()));
                let da = downward_closure_cached(&pa, cache).to_vec();
                let db = downward_closure_cached(&pb, cache).to_vec();
                for x in &da {
                    for y in &db {
                        out.insert(SpPomset::par_all([x.clone(), y.clone()]));
                    }
                }
            }
            // Sequential: the first block is a proper non-empty down-set.
            for (lo, hi) in splits(v) {
                if lo.is_empty() || hi.is_empty() {
                    continue;
                }
                let dl = downward_closure_cached(&lo, cache).to_vec();
                let dh = downward_closure_cached(&hi, cache).to_vec();
                for x in &dl {
                    for y in &dh {
                        out.insert(SpPomset::seq_all([x.clone(), y.clone()]));
                    }
                }
            }
        }
    }
    let mut out: Vec<SpPomset> = out.into_iter().collect();
    out.sort();
    out
}

/// Downward closure computed by exhaustively applying the exchange rewrite
/// `(U·W) ∥ (V·X) → (U∥V) · (W∥X)` in every context, including unit
/// factors. Much slower than [`downward_closure`]; kept as a second route.
pub fn downward_closure_by_exchange(v: &SpPomset) -> PomsetLanguage {
    let mut seen: HashSet<SpPomset> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(v.clone());
    queue.push_back(v.clone());
    while let Some(t) = queue.pop_front() {
        for s in exchange_steps(&t) {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen.into_iter().collect()
}

/// One-step exchange rewrites of `t` at any position.
pub fn exchange_steps(t: &SpPomset) -> Vec<SpPomset> {
    let mut out = Vec::new();
    match t {
        SpPomset::Empty | SpPomset::Prim(_) => {}
        SpPomset::Seq(cs) => {
            for (i, c) in cs.iter().enumerate() {
                for s in exchange_steps(c) {
                    let mut parts = cs.clone();
                    parts[i] = s;
                    out.push(SpPomset::seq_all(parts));
                }
            }
        }
        SpPomset::Par(cs) => {
            for (i, c) in cs.iter().enumerate() {
                for s in exchange_steps(c) {
                    let mut parts = cs.clone();
                    parts[i] = s;
                    out.push(SpPomset::par_all(parts));
                }
            }
            // Assign each component to the left operand, the right operand
            // or the untouched rest.
            let n = cs.len();
            let total = 3usize.pow(n as u32);
            for code in 0..total {
                let mut side = Vec::with_capacity(n);
                let mut x = code;
                for _ in 0..n {
                    side.push(x % 3);
                    x /= 3;
                }
                let pick = |k: usize| {
                    SpPomset::par_all((0..n).filter(|&i| side[i] == k).map(|i| cs[i].clone()))
                };
                let (p, q, rest) = (pick(0), pick(1), pick(2));
                if p.is_empty() || q.is_empty() {
                    continue;
                }
                let pf = p.seq_factors();
                let qf = q.seq_factors();
                for i in 0..=pf.len() {
                    let (u, w) = (
                        SpPomset::seq_all(pf[..i].iter().cloned()),
                        SpPomset::seq_all(pf[i..].iter().cloned()),
                    );
                    for j in 0..=qf.len() {
                        let (v, x) = (
                            SpPomset::seq_all(qf[..j].iter().cloned()),
                            SpPomset::seq_all(qf[j..].iter().cloned()),
                        );
                        let step = SpPomset::seq_all([
                            SpPomset::par_all([u.clone(), v]),
                            SpPomset::par_all([w.clone(), x]),
                        ]);
                        let s = SpPomset::par_all([rest.clone(), step]);
                        if &s != t {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Membership check through the generated closure.
pub fn subsumes_generative(v: &SpPomset, u: &SpPomset) -> bool {
    v.label_multiset() == u.label_multiset() && downward_closure(v).contains(u)
}

/// True iff every member's downward closure lies inside `l`.
pub fn is_down_closed(l: &PomsetLanguage) -> bool {
    let mut cache = DownCache::new();
    l.iter().all(|v| {
        downward_closure_cached(v, &mut cache)
            .iter()
            .all(|u| l.contains(u))
    })
}
