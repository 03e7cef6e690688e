//! Explicit finite labelled posets.
//!
//! This is the representation the canonical sp-terms are checked against:
//! conversion in both directions, N-pattern detection, isomorphism and the
//! bijection search behind subsumption.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pomset::{Label, SpPomset};

/// A finite poset on nodes `0..n` with one label per node.
///
/// The order is stored as a reflexive, antisymmetric and transitive
/// adjacency matrix. Labels may include the hole marker when the poset is a
/// context.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabelledPoset {
    labels: Vec<Label>,
    leq: Vec<Vec<bool>>,
}

impl std::fmt::Debug for LabelledPoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rel: Vec<(usize, usize)> = self.strict_pairs().collect();
        f.debug_struct("LabelledPoset")
            .field("labels", &self.labels)
            .field("lt", &rel)
            .finish()
    }
}

impl LabelledPoset {
    /// Builds a poset from a full order matrix, validating the order axioms.
    pub fn from_matrix(labels: Vec<Label>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = labels.len();
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidPoset(
                "matrix dimensions do not match labels".into(),
            ));
        }
        let p = LabelledPoset { labels, leq };
        p.validate()?;
        Ok(p)
    }

    /// Builds the least order containing `pairs` (reflexive-transitive
    /// closure). Fails if the closure is not antisymmetric.
    pub fn from_pairs(labels: Vec<Label>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::InvalidPoset(format!("pair ({i},{j}) out of range")));
            }
            leq[i][j] = true;
        }
        transitive_close(&mut leq);
        let p = LabelledPoset { labels, leq };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn from_matrix_unchecked(labels: Vec<Label>, leq: Vec<Vec<bool>>) -> Self {
        LabelledPoset { labels, leq }
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if !self.leq[i][i] {
                return Err(Error::InvalidPoset(format!("not reflexive at {i}")));
            }
            for j in 0..n {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    return Err(Error::InvalidPoset(format!(
                        "not antisymmetric at ({i},{j})"
                    )));
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        return Err(Error::InvalidPoset(format!(
                            "not transitive at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq[i][j] || self.leq[j][i]
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.leq
    }

    /// All pairs `(i, j)` with `i < j` in the order.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| self.lt(i, j)).map(move |j| (i, j)))
    }

    /// Covering pairs of the strict order (the Hasse diagram).
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        self.strict_pairs()
            .filter(|&(i, j)| !(0..n).any(|k| self.lt(i, k) && self.lt(k, j)))
            .collect()
    }

    pub fn hole_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.labels[i].is_hole())
            .collect()
    }

    /// Induced subposet on `nodes`, renumbered in the given order.
    pub fn restrict(&self, nodes: &[usize]) -> LabelledPoset {
        let labels = nodes.iter().map(|&i| self.labels[i].clone()).collect();
        let leq = nodes
            .iter()
            .map(|&i| nodes.iter().map(|&j| self.leq[i][j]).collect())
            .collect();
        LabelledPoset { labels, leq }
    }

    /// Copy with node `i` relabelled.
    pub fn relabel(&self, i: usize, label: Label) -> LabelledPoset {
        let mut p = self.clone();
        p.labels[i] = label;
        p
    }

    fn down_count(&self, i: usize) -> usize {
        (0..self.len()).filter(|&j| self.leq[j][i]).count()
    }

    fn up_count(&self, i: usize) -> usize {
        (0..self.len()).filter(|&j| self.leq[i][j]).count()
    }

    pub(crate) fn label_counts(&self) -> BTreeMap<&Label, usize> {
        let mut m = BTreeMap::new();
        for l in &self.labels {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    }
}

pub(crate) fn transitive_close(leq: &mut [Vec<bool>]) {
    let n = leq.len();
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
}

/// Lays out an sp-pomset as an explicit poset. Nodes are numbered by a
/// left-to-right traversal of the canonical term.
pub fn to_poset(u: &SpPomset) -> LabelledPoset {
    let mut labels = Vec::new();
    let mut pairs = Vec::new();
    build(u, &mut labels, &mut pairs);
    let n = labels.len();
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for (i, j) in pairs {
        leq[i][j] = true;
    }
    LabelledPoset::from_matrix_unchecked(labels, leq)
}

// Appends the nodes of `u` and returns their index range; the sequential
// case records the full product order between consecutive blocks.
fn build(u: &SpPomset, labels: &mut Vec<Label>, pairs: &mut Vec<(usize, usize)>) -> (usize, usize) {
    let start = labels.len();
    match u {
        SpPomset::Empty => {}
        SpPomset::Prim(l) => labels.push(l.clone()),
        SpPomset::Par(cs) => {
            for c in cs {
                build(c, labels, pairs);
            }
        }
        SpPomset::Seq(cs) => {
            let ranges: Vec<_> = cs.iter().map(|c| build(c, labels, pairs)).collect();
            for (x, &(s1, e1)) in ranges.iter().enumerate() {
                for &(s2, e2) in &ranges[x + 1..] {
                    for i in s1..e1 {
                        for j in s2..e2 {
                            pairs.push((i, j));
                        }
                    }
                }
            }
        }
    }
    (start, labels.len())
}

/// Recovers the canonical sp-term of an N-free poset.
pub fn from_poset(p: &LabelledPoset) -> Result<SpPomset> {
    if !p.hole_nodes().is_empty() {
        return Err(Error::PreconditionViolated(
            "from_poset expects a poset without hole labels".into(),
        ));
    }
    decompose(p)
}

/// Like [`from_poset`] but allows hole-labelled nodes; used for contexts.
pub(crate) fn decompose(p: &LabelledPoset) -> Result<SpPomset> {
    let nodes: Vec<usize> = (0..p.len()).collect();
    decompose_nodes(p, &nodes)
}

fn decompose_nodes(p: &LabelledPoset, nodes: &[usize]) -> Result<SpPomset> {
    match nodes.len() {
        0 => return Ok(SpPomset::Empty),
        1 => return Ok(SpPomset::Prim(p.label(nodes[0]).clone())),
        _ => {}
    }
    let comps = components(nodes, |i, j| p.comparable(i, j));
    if comps.len() > 1 {
        let parts = comps
            .iter()
            .map(|c| decompose_nodes(p, c))
            .collect::<Result<Vec<_>>>()?;
        return Ok(SpPomset::par_all(parts));
    }
    let mut layers = components(nodes, |i, j| !p.comparable(i, j));
    if layers.len() > 1 {
        // Layers of a series decomposition are totally ordered blockwise.
        layers.sort_by(|a, b| {
            if p.lt(a[0], b[0]) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        for w in layers.windows(2) {
            if !w[0].iter().all(|&i| w[1].iter().all(|&j| p.lt(i, j))) {
                return Err(not_sp(p, nodes));
            }
        }
        let parts = layers
            .iter()
            .map(|c| decompose_nodes(p, c))
            .collect::<Result<Vec<_>>>()?;
        return Ok(SpPomset::seq_all(parts));
    }
    Err(not_sp(p, nodes))
}

fn not_sp(p: &LabelledPoset, nodes: &[usize]) -> Error {
    match find_n_pattern_in(p, nodes) {
        Some(q) => Error::NotSeriesParallel(q),
        None => Error::InvalidPoset("indecomposable poset without an N-pattern".into()),
    }
}

fn components(nodes: &[usize], adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; nodes.len()];
    let mut out = Vec::new();
    for start in 0..nodes.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(x) = stack.pop() {
            comp.push(nodes[x]);
            for y in 0..nodes.len() {
                if !seen[y] && adjacent(nodes[x], nodes[y]) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Searches for an N-pattern `(s1, s2, s3, s4)`: `s1 ≤ s3`, `s2 ≤ s3`,
/// `s2 ≤ s4`, with `s1 ≰ s4`, `s2 ≰ s1` and `s4 ≰ s3`. Quadruples are
/// scanned in lexicographic order of node ids.
pub fn find_n_pattern(p: &LabelledPoset) -> Option<[usize; 4]> {
    let nodes: Vec<usize> = (0..p.len()).collect();
    find_n_pattern_in(p, &nodes)
}

fn find_n_pattern_in(p: &LabelledPoset, nodes: &[usize]) -> Option<[usize; 4]> {
    for &s1 in nodes {
        for &s2 in nodes {
            if p.leq(s2, s1) {
                continue;
            }
            for &s3 in nodes {
                if !(p.leq(s1, s3) && p.leq(s2, s3)) {
                    continue;
                }
                for &s4 in nodes {
                    if p.leq(s2, s4) && !p.leq(s1, s4) && !p.leq(s4, s3) {
                        return Some([s1, s2, s3, s4]);
                    }
                }
            }
        }
    }
    None
}

pub fn is_n_free(p: &LabelledPoset) -> bool {
    find_n_pattern(p).is_none()
}

/// Label-preserving order isomorphism test.
pub fn iso(p: &LabelledPoset, q: &LabelledPoset) -> bool {
    if p.len() != q.len() || p.label_counts() != q.label_counts() {
        return false;
    }
    if let (Ok(a), Ok(b)) = (decompose(p), decompose(q)) {
        return a == b;
    }
    search_bijection(p, q, true).is_some()
}

/// Finds `h` from the nodes of `v` to the nodes of `u` that preserves labels
/// and order (`s ≤_v t ⇒ h(s) ≤_u h(t)`), i.e. a witness for `u ⊑ v`.
pub fn subsumption_witness(v: &LabelledPoset, u: &LabelledPoset) -> Option<Vec<usize>> {
    if v.len() != u.len() || v.label_counts() != u.label_counts() {
        return None;
    }
    search_bijection(v, u, false)
}

/// Backtracking bijection search from `src` to `dst`. With `reflect`, the
/// map must also reflect the order (an isomorphism).
fn search_bijection(src: &LabelledPoset, dst: &LabelledPoset, reflect: bool) -> Option<Vec<usize>> {
    let n = src.len();
    // Visit nodes bottom-up so that most order constraints are checked early.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (src.down_count(i), i));
    let src_down: Vec<usize> = (0..n).map(|i| src.down_count(i)).collect();
    let src_up: Vec<usize> = (0..n).map(|i| src.up_count(i)).collect();
    let dst_down: Vec<usize> = (0..n).map(|i| dst.down_count(i)).collect();
    let dst_up: Vec<usize> = (0..n).map(|i| dst.up_count(i)).collect();

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        depth: usize,
        order: &[usize],
        src: &LabelledPoset,
        dst: &LabelledPoset,
        reflect: bool,
        degs: (&[usize], &[usize], &[usize], &[usize]),
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let s = order[depth];
        let (src_down, src_up, dst_down, dst_up) = degs;
        for t in 0..dst.len() {
            if used[t] || dst.label(t) != src.label(s) {
                continue;
            }
            let degree_ok = if reflect {
                src_down[s] == dst_down[t] && src_up[s] == dst_up[t]
            } else {
                src_down[s] <= dst_down[t] && src_up[s] <= dst_up[t]
            };
            if !degree_ok {
                continue;
            }
            let consistent = order[..depth].iter().all(|&s2| {
                let t2 = map[s2];
                let fwd =
                    (!src.leq(s2, s) || dst.leq(t2, t)) && (!src.leq(s, s2) || dst.leq(t, t2));
                let back = !reflect
                    || ((!dst.leq(t2, t) || src.leq(s2, s)) && (!dst.leq(t, t2) || src.leq(s, s2)));
                fwd && back
            });
            if !consistent {
                continue;
            }
            map[s] = t;
            used[t] = true;
            if go(depth + 1, order, src, dst, reflect, degs, map, used) {
                return true;
            }
            used[t] = false;
            map[s] = usize::MAX;
        }
        false
    }

    if go(
        0,
        &order,
        src,
        dst,
        reflect,
        (&src_down, &src_up, &dst_down, &dst_up),
        &mut map,
        &mut used,
    ) {
        Some(map)
    } else {
        None
    }
}
