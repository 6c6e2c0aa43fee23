//! Brute-force reference for small trees: enumeration by leaf growth and
//! isomorphism by exhaustive backtracking over bijections.

use startree_core::tree::Kind;

#[derive(Clone, Debug)]
pub struct Small {
    pub adj: Vec<Vec<usize>>,
    pub kinds: Vec<Kind>,
}

impl Small {
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adj.iter().enumerate() {
            for &b in list {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    fn with_default_kinds(adj: Vec<Vec<usize>>) -> Small {
        let kinds = adj
            .iter()
            .map(|l| if l.len() == 1 { Kind::Leaf } else { Kind::Interior })
            .collect();
        Small { adj, kinds }
    }
}

/// Every isomorphism `a -> b` (kind-preserving), as forward maps.
pub fn all_isos(a: &Small, b: &Small) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if a.len() != b.len() {
        return out;
    }
    let n = a.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(a, b, 0, &mut map, &mut used, &mut out);
    out
}

fn extend(
    a: &Small,
    b: &Small,
    u: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    if u == a.len() {
        out.push(map.clone());
        return;
    }
    for v in 0..b.len() {
        if used[v] || a.kinds[u] != b.kinds[v] || a.adj[u].len() != b.adj[v].len() {
            continue;
        }
        // every earlier vertex must keep its (non-)adjacency to u
        let ok = (0..u).all(|w| a.has_edge(u, w) == b.has_edge(v, map[w]));
        if !ok {
            continue;
        }
        map[u] = v;
        used[v] = true;
        extend(a, b, u + 1, map, used, out);
        used[v] = false;
    }
    map[u] = usize::MAX;
}

/// One representative per isomorphism class for every size in `1..=max`.
pub fn unlabeled_trees(max: usize) -> Vec<Vec<Small>> {
    let mut by_size: Vec<Vec<Small>> = vec![Vec::new(); max + 1];
    if max == 0 {
        return by_size;
    }
    by_size[1].push(Small::with_default_kinds(vec![Vec::new()]));
    for n in 2..=max {
        let mut reps: Vec<Small> = Vec::new();
        for t in &by_size[n - 1] {
            for v in 0..t.len() {
                let mut adj = t.adj.clone();
                adj.push(vec![v]);
                adj[v].push(n - 1);
                let cand = Small::with_default_kinds(adj);
                if !reps.iter().any(|r| isomorphic(r, &cand)) {
                    reps.push(cand);
                }
            }
        }
        by_size[n] = reps;
    }
    by_size
}

/// Stops at the first isomorphism found.
pub fn isomorphic(a: &Small, b: &Small) -> bool {
    fn first(a: &Small, b: &Small, u: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if u == a.len() {
            return true;
        }
        for v in 0..b.len() {
            if used[v] || a.kinds[u] != b.kinds[v] || a.adj[u].len() != b.adj[v].len() {
                continue;
            }
            if !(0..u).all(|w| a.has_edge(u, w) == b.has_edge(v, map[w])) {
                continue;
            }
            map[u] = v;
            used[v] = true;
            if first(a, b, u + 1, map, used) {
                return true;
            }
            used[v] = false;
        }
        false
    }
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    first(a, b, 0, &mut vec![usize::MAX; n], &mut vec![false; n])
}

/// All frontier markings of `t`: each vertex either keeps its default kind
/// or becomes a frontier vertex.
pub fn marked_variants(t: &Small) -> Vec<Small> {
    let n = t.len();
    (0u32..1 << n)
        .map(|mask| {
            let mut v = t.clone();
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    v.kinds[i] = Kind::Frontier;
                }
            }
            v
        })
        .collect()
}

/// Applies `perm` (old index -> new index) to a tree.
pub fn permute(t: &Small, perm: &[usize]) -> Small {
    let n = t.len();
    let mut adj = vec![Vec::new(); n];
    let mut kinds = vec![Kind::Interior; n];
    for u in 0..n {
        kinds[perm[u]] = t.kinds[u];
        adj[perm[u]] = t.adj[u].iter().map(|&w| perm[w]).collect();
    }
    Small { adj, kinds }
}
