//! Level-1 tree assembled by hand around the base copy of ray 0.
//!
//! The base is a copy of T_0 (a two-way ray with a pendant leaf at every even
//! index ≥ 0). Each odd base ray carries a gadget: a path host–z–y′, from y′
//! a line running out on two sides, and at every line vertex a short stalk to
//! a fresh copy of T_0 entered at its ray 1. Copies on side 2 lack the leaf at
//! index 2. Inside every copy, each odd ray other than the entry ray carries
//! a gadget of its own. Everything is built out to `budget` steps from the
//! center; callers cut a ball from the result.

use startree_core::tree::{FiniteTree, Kind};

struct Assembly {
    labels: Vec<String>,
    kinds: Vec<Kind>,
    edges: Vec<(usize, usize)>,
    budget: usize,
}

impl Assembly {
    fn add(&mut self, label: String, kind: Kind, parent: Option<usize>) -> usize {
        self.labels.push(label);
        self.kinds.push(kind);
        let v = self.labels.len() - 1;
        if let Some(p) = parent {
            self.edges.push((p, v));
        }
        v
    }

    /// Rays of a T_0 copy entered at ray `entry`, already placed as vertex
    /// `at` at distance `d`. Gadgets hang off odd rays except `skip_host`.
    fn t0_copy(&mut self, name: &str, at: usize, entry: i64, d: usize, omit_leaf: Option<i64>, skip_host: Option<i64>) {
        let place = |this: &mut Self, k: i64, v: usize, dk: usize| {
            if k >= 0 && k % 2 == 0 && omit_leaf != Some(k) && dk < this.budget {
                this.add(format!("{name}.l{k}"), Kind::Leaf, Some(v));
            }
            if k.rem_euclid(2) == 1 && skip_host != Some(k) && dk < this.budget {
                this.gadget(&format!("{name}.r{k}"), v, dk);
            }
        };
        place(self, entry, at, d);
        for dir in [-1i64, 1] {
            let mut prev = at;
            let mut k = entry;
            let mut dk = d;
            while dk < self.budget {
                k += dir;
                dk += 1;
                let v = self.add(format!("{name}.r{k}"), Kind::Interior, Some(prev));
                place(self, k, v, dk);
                prev = v;
            }
        }
    }

    fn gadget(&mut self, host: &str, h: usize, d: usize) {
        let z = self.add(format!("{host}/z"), Kind::Interior, Some(h));
        if d + 1 >= self.budget {
            return;
        }
        let yp = self.add(format!("{host}/yp"), Kind::Interior, Some(z));
        for side in [1, 2] {
            let mut prev = yp;
            let mut j = 1;
            while d + 2 + j <= self.budget {
                let r = self.add(format!("{host}/R{side}.{j}"), Kind::Interior, Some(prev));
                if d + 3 + j <= self.budget {
                    let cz = self.add(format!("{host}/cz{side}.{j}"), Kind::Interior, Some(r));
                    if d + 4 + j <= self.budget {
                        let name = format!("{host}/C{side}.{j}");
                        let entry = self.add(format!("{name}.r1"), Kind::Interior, Some(cz));
                        let omit = if side == 2 { Some(2) } else { None };
                        self.t0_copy(&name, entry, 1, d + 4 + j, omit, Some(1));
                    }
                }
                prev = r;
                j += 1;
            }
        }
    }
}

/// T_1 out to `budget` steps from the base ray 0, which is vertex 0.
pub fn level_one(budget: usize) -> FiniteTree {
    let mut asm = Assembly {
        labels: Vec::new(),
        kinds: Vec::new(),
        edges: Vec::new(),
        budget,
    };
    let root = asm.add("B.r0".into(), Kind::Interior, None);
    asm.t0_copy("B", root, 0, 0, None, None);
    // ends cut off by the budget are frontier; genuine leaves were marked
    // when placed
    let mut deg = vec![0usize; asm.labels.len()];
    for &(a, b) in &asm.edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    for (k, d) in asm.kinds.iter_mut().zip(deg) {
        if *k == Kind::Interior && d == 1 {
            *k = Kind::Frontier;
        }
    }
    FiniteTree::new(asm.labels, asm.kinds, &asm.edges).expect("hand assembly is a tree")
}
