//! Per-level construction state and the syntactic tree metric.

use crate::construction::addr::{Addr, Local};
use crate::error::{EngineError, EngineResult};

/// State for one level `n` of the chain `T_0 ⊂ T_1 ⊂ ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub level: usize,
    /// Degree-2 vertex whose whole orbit has degree 2; the next level hangs
    /// its first gadget here.
    pub witness: Addr,
    /// Designated leaves `x_0 ..= x_{level+1}`, written at this level.
    pub x_leaves: Vec<Addr>,
}

impl LevelSpec {
    pub fn ground() -> LevelSpec {
        LevelSpec {
            level: 0,
            witness: Addr::Ray(1),
            x_leaves: vec![Addr::Leaf(0), Addr::Leaf(2)],
        }
    }

    /// The leaf removed by the generator introduced at the next level.
    pub fn next_removed(&self) -> &Addr {
        &self.x_leaves[self.level + 1]
    }
}

/// Immutable stack of level specs, level 0 first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<LevelSpec>,
}

impl Tower {
    /// Wraps hand-made level specs without checking them. Only test doubles
    /// need this; [`crate::construction::Engine::build`] derives the real tower.
    pub fn from_levels(levels: Vec<LevelSpec>) -> Tower {
        assert!(!levels.is_empty(), "a tower needs level 0");
        Tower { levels }
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> EngineResult<&LevelSpec> {
        self.levels.get(n).ok_or(EngineError::LevelOutOfRange {
            requested: n,
            height: self.height(),
        })
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    pub(crate) fn push(&mut self, spec: LevelSpec) {
        self.levels.push(spec);
    }

    /// Tree distance between two vertices of `T_level`.
    ///
    /// The path between two vertices is fixed by their addresses alone: it
    /// climbs out of nested gadgets to the deepest gadget both share and
    /// crosses it, or drops to the level below when they sit on different
    /// base vertices. No host information is needed. Both addresses must be
    /// valid at `level`; malformed ones panic.
    pub fn distance(&self, level: usize, a: &Addr, b: &Addr) -> u64 {
        if level == 0 {
            return ground_distance(a, b);
        }
        let (ba, la) = decompose(a);
        let (bb, lb) = decompose(b);
        if ba != bb {
            return self.climb(level, &la, 0)
                + self.climb(level, &lb, 0)
                + self.distance(level - 1, ba, bb);
        }
        let shared = la.iter().zip(&lb).take_while(|(x, y)| x == y).count();
        if shared == la.len() {
            return self.climb(level, &lb, shared);
        }
        if shared == lb.len() {
            return self.climb(level, &la, shared);
        }
        self.climb(level, &la, shared + 1)
            + self.climb(level, &lb, shared + 1)
            + self.local_distance(level, la[shared], lb[shared])
    }

    fn climb(&self, level: usize, locals: &[&Local], from: usize) -> u64 {
        locals[from..]
            .iter()
            .map(|l| self.root_distance(level, l))
            .sum()
    }

    /// Distance from a gadget local to the host the gadget hangs from.
    pub fn root_distance(&self, level: usize, l: &Local) -> u64 {
        match l {
            Local::Z => 1,
            Local::Yp => 2,
            Local::R(_, j) => 2 + j,
            Local::CZ(_, j) => 3 + j,
            Local::C(_, j, c) => 4 + j + self.copy_depth(level, c),
        }
    }

    fn copy_depth(&self, level: usize, c: &Addr) -> u64 {
        let y = &self.levels[level - 1].witness;
        self.distance(level - 1, y, c)
    }

    /// Distance between two locals of one gadget.
    fn local_distance(&self, level: usize, l: &Local, m: &Local) -> u64 {
        if let (Local::C(s1, j1, c1), Local::C(s2, j2, c2)) = (l, m) {
            if s1 == s2 && j1 == j2 {
                return self.distance(level - 1, c1, c2);
            }
        }
        let (p1, d1) = self.placement(level, l);
        let (p2, d2) = self.placement(level, m);
        if p1 == p2 {
            d1.abs_diff(d2)
        } else {
            d1 + d2 + p1.abs_diff(p2)
        }
    }

    /// Position on the line through `yp` and depth below that line vertex.
    /// Position 0 carries the path back to the host.
    fn placement(&self, level: usize, l: &Local) -> (i64, u64) {
        match l {
            Local::Yp => (0, 0),
            Local::Z => (0, 1),
            Local::R(s, j) => (s.position(*j), 0),
            Local::CZ(s, j) => (s.position(*j), 1),
            Local::C(s, j, c) => (s.position(*j), 2 + self.copy_depth(level, c)),
        }
    }
}

fn ground_distance(a: &Addr, b: &Addr) -> u64 {
    let (ka, ea) = ground_parts(a);
    let (kb, eb) = ground_parts(b);
    if a == b {
        0
    } else {
        ka.abs_diff(kb) + ea + eb
    }
}

fn ground_parts(a: &Addr) -> (i64, u64) {
    match a {
        Addr::Ray(k) => (*k, 0),
        Addr::Leaf(k) => (*k, 1),
        other => panic!("`{other}` is not a level-0 address"),
    }
}

/// Splits a level `n+1` address into its base vertex (a level-`n` address)
/// and the chain of gadget locals leading out to it, nearest the base first.
fn decompose(a: &Addr) -> (&Addr, Vec<&Local>) {
    let mut locals = Vec::new();
    let mut cur = a;
    loop {
        match cur {
            Addr::Base(b) => {
                locals.reverse();
                return (b, locals);
            }
            Addr::In(h, l) => {
                locals.push(l);
                cur = h;
            }
            other => panic!("`{other}` has no base vertex"),
        }
    }
}
