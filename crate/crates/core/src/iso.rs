//! AHU canonical codes and explicit isomorphism witnesses for marked trees.

use std::fmt;

use crate::tree::{FiniteTree, RootedFiniteTree, Vertex};

/// Parenthesis encoding of a rooted, kind-marked tree. Every subtree code,
/// the whole tree's included, is prefixed by its root's kind tag (`L`, `F`, or nothing
/// for interior). Siblings are sorted by byte order of their codes, so an
/// interior root with one frontier child and one genuine-leaf child renders
/// as `(F()L())`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A concrete vertex map between two trees.
#[derive(Clone, Debug)]
pub struct IsoWitness<'a> {
    pub source: &'a FiniteTree,
    pub target: &'a FiniteTree,
    pub forward: Vec<Vertex>,
}

struct Rooting {
    order: Vec<Vertex>,
    children: Vec<Vec<Vertex>>,
    codes: Vec<String>,
}

/// Subtree codes for every vertex when `t` hangs from `root`. Children lists
/// come back sorted by code.
fn root_at(t: &FiniteTree, root: Vertex) -> Rooting {
    let n = t.len();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &u in t.neighbors(v) {
            if parent[u] == usize::MAX {
                parent[u] = v;
                stack.push(u);
            }
        }
    }
    let mut children = vec![Vec::new(); n];
    let mut codes = vec![String::new(); n];
    for &v in order.iter().rev() {
        let mut kids: Vec<Vertex> = t
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| u != root && parent[u] == v)
            .collect();
        kids.sort_by(|&a, &b| codes[a].cmp(&codes[b]));
        let mut s = String::new();
        s.push_str(t.kind(v).tag());
        s.push('(');
        for &k in &kids {
            s.push_str(&codes[k]);
        }
        s.push(')');
        codes[v] = s;
        children[v] = kids;
    }
    Rooting {
        order,
        children,
        codes,
    }
}

pub fn ahu_code(t: &RootedFiniteTree) -> CanonicalCode {
    let mut r = root_at(&t.tree, t.root);
    CanonicalCode(std::mem::take(&mut r.codes[t.root]))
}

/// The one or two vertices minimizing eccentricity, found by peeling leaves.
pub fn centers(t: &FiniteTree) -> Vec<Vertex> {
    let n = t.len();
    if n <= 2 {
        return t.vertices().collect();
    }
    let mut deg: Vec<usize> = t.vertices().map(|v| t.neighbors(v).len()).collect();
    let mut layer: Vec<Vertex> = t.vertices().filter(|&v| deg[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            deg[v] = 0;
            for &u in t.neighbors(v) {
                if deg[u] > 0 {
                    deg[u] -= 1;
                    if deg[u] == 1 {
                        next.push(u);
                    }
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Unrooted isomorphism that preserves vertex kinds, or `None`.
pub fn tree_isomorphic<'a>(a: &'a FiniteTree, b: &'a FiniteTree) -> Option<IsoWitness<'a>> {
    if a.len() != b.len() {
        return None;
    }
    let mut ka: Vec<_> = a.vertices().map(|v| a.kind(v)).collect();
    let mut kb: Vec<_> = b.vertices().map(|v| b.kind(v)).collect();
    ka.sort_unstable();
    kb.sort_unstable();
    if ka != kb {
        return None;
    }
    let ca = centers(a);
    let cb = centers(b);
    if ca.len() != cb.len() {
        return None;
    }
    let ra = root_at(a, ca[0]);
    for &c in &cb {
        let rb = root_at(b, c);
        if ra.codes[ca[0]] == rb.codes[c] {
            let mut forward = vec![usize::MAX; a.len()];
            let mut stack = vec![(ca[0], c)];
            while let Some((u, v)) = stack.pop() {
                forward[u] = v;
                stack.extend(ra.children[u].iter().copied().zip(rb.children[v].iter().copied()));
            }
            debug_assert!(ra.order.iter().all(|&v| forward[v] != usize::MAX));
            return Some(IsoWitness {
                source: a,
                target: b,
                forward,
            });
        }
    }
    None
}

/// True iff `w.forward` is a kind-preserving bijection that maps edges to
/// edges and non-edges to non-edges.
pub fn verify_witness(w: &IsoWitness<'_>) -> bool {
    let (s, t) = (w.source, w.target);
    if s.len() != t.len() || w.forward.len() != s.len() {
        return false;
    }
    let mut hit = vec![false; t.len()];
    for &img in &w.forward {
        if img >= t.len() || hit[img] {
            return false;
        }
        hit[img] = true;
    }
    if s.vertices().any(|v| s.kind(v) != t.kind(w.forward[v])) {
        return false;
    }
    // a bijection carrying n-1 edges into a tree's n-1 edges is onto the edge set
    s.edges()
        .all(|(x, y)| t.neighbors(w.forward[x]).contains(&w.forward[y]))
}
