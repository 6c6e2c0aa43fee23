use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::construction::addr::{Addr, Local, Side};
use crate::construction::hosts::{HostRule, LadderRule};
use crate::construction::tower::{LevelSpec, Tower};
use crate::error::{EngineError, EngineResult};
use crate::tree::{FiniteTree, Kind, Vertex};
use crate::word::{IsoWord, Sign};

/// How far the breadth-first search for the next designated leaf may go.
const LEAF_SEARCH_LIMIT: usize = 512;

/// Lazy view of the tower `T_0 ⊂ T_1 ⊂ ...`: adjacency, generators and
/// truncations, evaluated on demand from symbolic addresses.
#[derive(Clone, Debug)]
pub struct Engine {
    tower: Arc<Tower>,
    rule: Arc<dyn HostRule>,
}

/// A materialized truncation of some `T_n`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub level: usize,
    pub center: Addr,
    pub radius: usize,
    /// Vertex addresses, indexed by the tree's vertex handles, in BFS order.
    pub addrs: Vec<Addr>,
    pub dist: Vec<usize>,
    /// Full neighbor lists in `T_n`, including vertices outside the ball.
    pub nbrs: Vec<Vec<Addr>>,
    pub tree: FiniteTree,
    index: HashMap<Addr, Vertex>,
}

impl Ball {
    pub fn vertex(&self, a: &Addr) -> Option<Vertex> {
        self.index.get(a).copied()
    }

    pub fn contains(&self, a: &Addr) -> bool {
        self.index.contains_key(a)
    }

    pub fn len(&self) -> usize {
        self.addrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addrs.is_empty()
    }

    /// All `T_n`-neighbors of `v` lie in the ball.
    pub fn is_interior(&self, v: Vertex) -> bool {
        self.nbrs[v].iter().all(|n| self.index.contains_key(n))
    }

    pub fn interior(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len()).filter(|&v| self.is_interior(v))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.nbrs[v].len()
    }
}

fn invalid(level: usize, a: &Addr, reason: &'static str) -> EngineError {
    EngineError::InvalidAddr {
        level,
        addr: a.to_string(),
        reason,
    }
}

fn is_base_of(h: &Addr, y: &Addr) -> bool {
    matches!(h, Addr::Base(b) if **b == *y)
}

impl Engine {
    /// Derives levels `0..=max_level`, choosing each new designated leaf by
    /// breadth-first search from `x_0`.
    pub fn build(max_level: usize) -> EngineResult<Engine> {
        let mut tower = Tower::from_levels(vec![LevelSpec::ground()]);
        for n in 0..max_level {
            let prev = tower.level(n)?.clone();
            tower.push(LevelSpec {
                level: n + 1,
                witness: Addr::inside(Addr::base(prev.witness), Local::Z),
                x_leaves: prev.x_leaves.into_iter().map(Addr::base).collect(),
            });
            let partial = Engine::new(tower.clone());
            let next = partial.select_next_leaf(n + 1)?;
            let mut levels = tower.levels().to_vec();
            levels[n + 1].x_leaves.push(next);
            tower = Tower::from_levels(levels);
        }
        Ok(Engine::new(tower))
    }

    pub fn new(tower: Tower) -> Engine {
        Engine {
            tower: Arc::new(tower),
            rule: Arc::new(LadderRule),
        }
    }

    /// Same tower, different host rule.
    pub fn with_rule(&self, rule: Arc<dyn HostRule>) -> Engine {
        Engine {
            tower: Arc::clone(&self.tower),
            rule,
        }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn height(&self) -> usize {
        self.tower.height()
    }

    pub fn spec(&self, level: usize) -> EngineResult<&LevelSpec> {
        self.tower.level(level)
    }

    pub fn witness(&self, level: usize) -> EngineResult<&Addr> {
        Ok(&self.tower.level(level)?.witness)
    }

    pub fn x_leaf(&self, level: usize, i: usize) -> EngineResult<&Addr> {
        let spec = self.tower.level(level)?;
        spec.x_leaves.get(i).ok_or(EngineError::LevelOutOfRange {
            requested: i,
            height: spec.x_leaves.len().saturating_sub(1),
        })
    }

    pub fn distance(&self, level: usize, a: &Addr, b: &Addr) -> u64 {
        self.tower.distance(level, a, b)
    }

    pub fn is_host(&self, level: usize, a: &Addr) -> EngineResult<bool> {
        self.rule.is_host(&self.tower, level, a)
    }

    /// Neighbors of `a` in `T_level`, sorted in canonical order.
    pub fn neighbors(&self, level: usize, a: &Addr) -> EngineResult<Vec<Addr>> {
        self.tower.level(level)?;
        let mut out = self.raw_neighbors(level, a)?;
        out.sort();
        Ok(out)
    }

    pub fn degree(&self, level: usize, a: &Addr) -> EngineResult<usize> {
        Ok(self.raw_neighbors(level, a)?.len())
    }

    fn raw_neighbors(&self, level: usize, a: &Addr) -> EngineResult<Vec<Addr>> {
        if level == 0 {
            return match *a {
                Addr::Ray(k) => {
                    let mut v = vec![Addr::Ray(k - 1), Addr::Ray(k + 1)];
                    if k >= 0 && k % 2 == 0 {
                        v.push(Addr::Leaf(k));
                    }
                    Ok(v)
                }
                Addr::Leaf(k) if k >= 0 && k % 2 == 0 => Ok(vec![Addr::Ray(k)]),
                Addr::Leaf(_) => Err(invalid(0, a, "leaves hang only from even non-negative ray vertices")),
                _ => Err(invalid(0, a, "level 0 has only ray(k) and leaf(k)")),
            };
        }
        let below = self.tower.level(level - 1)?;
        let mut out = match a {
            Addr::Base(b) => self
                .raw_neighbors(level - 1, b)?
                .into_iter()
                .map(Addr::base)
                .collect(),
            Addr::In(h, l) => self.gadget_neighbors(level, h, l, below)?,
            _ => return Err(invalid(level, a, "ray(k)/leaf(k) must be base-wrapped above level 0")),
        };
        if self.rule.is_host(&self.tower, level, a)? {
            out.push(Addr::inside(a.clone(), Local::Z));
        }
        Ok(out)
    }

    fn gadget_neighbors(
        &self,
        level: usize,
        h: &Addr,
        l: &Local,
        below: &LevelSpec,
    ) -> EngineResult<Vec<Addr>> {
        let at = |l: Local| Addr::inside(h.clone(), l);
        Ok(match l {
            Local::Z => vec![h.clone(), at(Local::Yp)],
            Local::Yp => vec![
                at(Local::Z),
                at(Local::R(Side::One, 1)),
                at(Local::R(Side::Two, 1)),
            ],
            Local::R(_, 0) | Local::CZ(_, 0) | Local::C(_, 0, _) => {
                return Err(invalid(level, &at(l.clone()), "line index must be at least 1"))
            }
            Local::R(s, j) => vec![
                if *j == 1 {
                    at(Local::Yp)
                } else {
                    at(Local::R(*s, j - 1))
                },
                at(Local::R(*s, j + 1)),
                at(Local::CZ(*s, *j)),
            ],
            Local::CZ(s, j) => vec![
                at(Local::R(*s, *j)),
                at(Local::C(*s, *j, Box::new(below.witness.clone()))),
            ],
            Local::C(s, j, c) => {
                let removed = below.next_removed();
                if *s == Side::Two && **c == *removed {
                    return Err(invalid(
                        level,
                        &at(l.clone()),
                        "side-2 copies omit the leaf removed by the newest generator",
                    ));
                }
                let mut v: Vec<Addr> = self
                    .raw_neighbors(level - 1, c)?
                    .into_iter()
                    .filter(|n| !(*s == Side::Two && n == removed))
                    .map(|n| at(Local::C(*s, *j, Box::new(n))))
                    .collect();
                if **c == below.witness {
                    v.push(at(Local::CZ(*s, *j)));
                }
                v
            }
        })
    }

    /// Full validity check: level-consistent nesting, every `in(h=..)` names
    /// a host, and no side-2 copy names the removed leaf.
    pub fn validate(&self, level: usize, a: &Addr) -> EngineResult<()> {
        self.tower.level(level)?;
        match a {
            Addr::Ray(_) | Addr::Leaf(_) if level > 0 => {
                Err(invalid(level, a, "ray(k)/leaf(k) must be base-wrapped above level 0"))
            }
            Addr::Ray(_) => Ok(()),
            Addr::Leaf(k) if *k >= 0 && k % 2 == 0 => Ok(()),
            Addr::Leaf(_) => Err(invalid(0, a, "leaves hang only from even non-negative ray vertices")),
            Addr::Base(_) | Addr::In(..) if level == 0 => {
                Err(invalid(0, a, "level 0 has only ray(k) and leaf(k)"))
            }
            Addr::Base(b) => self.validate(level - 1, b),
            Addr::In(h, l) => {
                self.validate(level, h)?;
                if !self.is_host(level, h)? {
                    return Err(invalid(level, a, "gadget host is not in the host set"));
                }
                if let Local::R(_, 0) | Local::CZ(_, 0) | Local::C(_, 0, _) = l {
                    return Err(invalid(level, a, "line index must be at least 1"));
                }
                if let Local::C(s, _, c) = l {
                    self.validate(level - 1, c)?;
                    if *s == Side::Two && **c == *self.tower.level(level - 1)?.next_removed() {
                        return Err(invalid(
                            level,
                            a,
                            "side-2 copies omit the leaf removed by the newest generator",
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluates generator `gen` of level `level` (or its inverse) at `a`.
    /// `None` means `a` has no image, which only happens for the inverse at
    /// the leaf the generator removes.
    pub fn apply_generator(
        &self,
        level: usize,
        gen: usize,
        sign: Sign,
        a: &Addr,
    ) -> EngineResult<Option<Addr>> {
        if gen > level {
            return Err(EngineError::InvalidGenerator { level, gen });
        }
        self.tower.level(level)?;
        let step: i64 = match sign {
            Sign::Plus => 2,
            Sign::Minus => -2,
        };
        if level == 0 {
            return match *a {
                Addr::Ray(k) => Ok(Some(Addr::Ray(k + step))),
                Addr::Leaf(k) if k >= 0 && k % 2 == 0 => {
                    Ok((k + step >= 0).then(|| Addr::Leaf(k + step)))
                }
                _ => Err(invalid(0, a, "level 0 has only ray(k) and leaf(k)")),
            };
        }
        let below = self.tower.level(level - 1)?;
        match a {
            Addr::Base(b) if gen < level => {
                Ok(self.apply_generator(level - 1, gen, sign, b)?.map(Addr::base))
            }
            Addr::Base(b) => Ok(shift_base(below, sign, b)),
            Addr::In(h, l) if gen == level && is_base_of(h, &below.witness) => {
                Ok(shift_local(below, sign, l))
            }
            Addr::In(h, l) => Ok(self
                .apply_generator(level, gen, sign, h)?
                .map(|img| Addr::inside(img, l.clone()))),
            _ => Err(invalid(level, a, "ray(k)/leaf(k) must be base-wrapped above level 0")),
        }
    }

    /// Applies `w` right to left; `None` as soon as any letter is undefined.
    pub fn apply_word(&self, level: usize, w: &IsoWord, a: &Addr) -> EngineResult<Option<Addr>> {
        let mut cur = a.clone();
        for l in w.application_order() {
            match self.apply_generator(level, l.gen, l.exp, &cur)? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// Neighbors of `a` (written at its own level) in `T_n`, after wrapping
    /// it into level `n`.
    pub fn limit_neighbors(&self, a: &Addr, n: usize) -> EngineResult<Vec<Addr>> {
        let own = a.level();
        if own > n {
            return Err(invalid(n, a, "address belongs to a higher level"));
        }
        self.neighbors(n, &a.clone().wrap(n - own))
    }

    /// Breadth-first materialization of the radius-`r` ball around `center`.
    pub fn ball_at(&self, level: usize, center: &Addr, r: usize) -> EngineResult<Ball> {
        self.tower.level(level)?;
        let mut addrs = vec![center.clone()];
        let mut dist = vec![0usize];
        let mut nbrs: Vec<Vec<Addr>> = Vec::new();
        let mut index = HashMap::from([(center.clone(), 0usize)]);
        let mut i = 0;
        while i < addrs.len() {
            let ns = self.neighbors(level, &addrs[i])?;
            if dist[i] < r {
                for n in &ns {
                    if !index.contains_key(n) {
                        index.insert(n.clone(), addrs.len());
                        addrs.push(n.clone());
                        dist.push(dist[i] + 1);
                    }
                }
            }
            nbrs.push(ns);
            i += 1;
        }
        let kinds = nbrs
            .iter()
            .map(|ns| {
                if ns.len() == 1 {
                    Kind::Leaf
                } else if ns.iter().any(|n| !index.contains_key(n)) {
                    Kind::Frontier
                } else {
                    Kind::Interior
                }
            })
            .collect();
        let mut edges = Vec::with_capacity(addrs.len().saturating_sub(1));
        for (v, ns) in nbrs.iter().enumerate() {
            for n in ns {
                if let Some(&u) = index.get(n) {
                    if v < u {
                        edges.push((v, u));
                    }
                }
            }
        }
        let labels = addrs.iter().map(Addr::to_string).collect();
        let tree = FiniteTree::new(labels, kinds, &edges).map_err(|e| EngineError::InvalidAddr {
            level,
            addr: center.to_string(),
            reason: if matches!(e, crate::error::TreeError::NotATree(_)) {
                "materialized ball is not a tree (inconsistent adjacency)"
            } else {
                "materialized ball has clashing labels"
            },
        })?;
        Ok(Ball {
            level,
            center: center.clone(),
            radius: r,
            addrs,
            dist,
            nbrs,
            tree,
            index,
        })
    }

    /// The genuine leaf of `T_level` nearest to `x_0`, other than
    /// `x_0 ..= x_level`; ties go to the smallest address.
    pub fn select_next_leaf(&self, level: usize) -> EngineResult<Addr> {
        let spec = self.tower.level(level)?;
        let excluded: HashSet<&Addr> = spec.x_leaves.iter().take(level + 1).collect();
        let start = spec.x_leaves[0].clone();
        let mut seen = HashSet::from([start.clone()]);
        let mut layer = vec![start];
        for _ in 0..=LEAF_SEARCH_LIMIT {
            let mut best: Option<&Addr> = None;
            for a in &layer {
                if !excluded.contains(a) && self.degree(level, a)? == 1 && best.is_none_or(|b| a < b) {
                    best = Some(a);
                }
            }
            if let Some(b) = best {
                return Ok(b.clone());
            }
            let mut next = Vec::new();
            for a in &layer {
                for n in self.neighbors(level, a)? {
                    if seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
            layer = next;
        }
        Err(EngineError::NoLeafCandidate {
            index: level + 1,
            searched: LEAF_SEARCH_LIMIT,
        })
    }
}

/// Newest generator on base vertices: the base tree moves onto the first
/// side-1 copy; its inverse moves it onto the first side-2 copy, which is
/// missing the removed leaf.
fn shift_base(below: &LevelSpec, sign: Sign, b: &Addr) -> Option<Addr> {
    let g0 = Addr::base(below.witness.clone());
    match sign {
        Sign::Plus => Some(Addr::inside(g0, Local::C(Side::One, 1, Box::new(b.clone())))),
        Sign::Minus if b == below.next_removed() => None,
        Sign::Minus => Some(Addr::inside(g0, Local::C(Side::Two, 1, Box::new(b.clone())))),
    }
}

/// Newest generator inside the first gadget: everything slides one step
/// along the line towards side 1.
fn shift_local(below: &LevelSpec, sign: Sign, l: &Local) -> Option<Addr> {
    use Local::*;
    use Side::*;
    let g0 = Addr::base(below.witness.clone());
    let at = |l: Local| Some(Addr::inside(g0.clone(), l));
    match (sign, l) {
        (Sign::Plus, Z) => at(CZ(One, 1)),
        (Sign::Plus, Yp) => at(R(One, 1)),
        (Sign::Plus, R(One, j)) => at(R(One, j + 1)),
        (Sign::Plus, R(Two, 1)) => at(Yp),
        (Sign::Plus, R(Two, j)) => at(R(Two, j - 1)),
        (Sign::Plus, CZ(One, j)) => at(CZ(One, j + 1)),
        (Sign::Plus, CZ(Two, 1)) => at(Z),
        (Sign::Plus, CZ(Two, j)) => at(CZ(Two, j - 1)),
        (Sign::Plus, C(One, j, a)) => at(C(One, j + 1, a.clone())),
        (Sign::Plus, C(Two, 1, a)) => Some(Addr::Base(a.clone())),
        (Sign::Plus, C(Two, j, a)) => at(C(Two, j - 1, a.clone())),
        (Sign::Minus, CZ(One, 1)) => at(Z),
        (Sign::Minus, R(One, 1)) => at(Yp),
        (Sign::Minus, R(One, j)) => at(R(One, j - 1)),
        (Sign::Minus, Yp) => at(R(Two, 1)),
        (Sign::Minus, R(Two, j)) => at(R(Two, j + 1)),
        (Sign::Minus, CZ(One, j)) => at(CZ(One, j - 1)),
        (Sign::Minus, Z) => at(CZ(Two, 1)),
        (Sign::Minus, CZ(Two, j)) => at(CZ(Two, j + 1)),
        (Sign::Minus, C(One, 1, a)) => Some(Addr::Base(a.clone())),
        (Sign::Minus, C(One, j, a)) => at(C(One, j - 1, a.clone())),
        (Sign::Minus, C(Two, j, a)) => at(C(Two, j + 1, a.clone())),
    }
}
