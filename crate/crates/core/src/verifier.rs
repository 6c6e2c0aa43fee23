//! Finite-radius checks of the construction's properties.
//!
//! Every check materializes a ball, quantifies over its interior (vertices
//! whose whole neighborhood is inside), and returns a [`Report`]. Horizon
//! and margin-stability failures make a report inconclusive; any other
//! engine error is a construction bug and fails the check.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::construction::{in_witness_orbit, Addr, Ball, Engine, Region};
use crate::error::{EngineError, EngineResult};
use crate::word::Sign;

/// Node budget for exploring a single direction in the core check.
const DIRECTION_NODE_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub level: usize,
    pub radius: usize,
    pub verdict: Verdict,
    pub counterexamples: Vec<String>,
    pub stats: BTreeMap<String, Value>,
}

impl Report {
    fn new(check: impl Into<String>, level: usize, region: &Region) -> Report {
        let mut stats = BTreeMap::new();
        stats.insert("center".into(), json!(region.center.to_string()));
        stats.insert("margin".into(), json!(region.margin));
        Report {
            check: check.into(),
            level,
            radius: region.radius,
            verdict: Verdict::Pass,
            counterexamples: Vec::new(),
            stats,
        }
    }

    fn stat(&mut self, key: &str, v: impl Into<Value>) {
        self.stats.insert(key.into(), v.into());
    }

    /// Records a counterexample; the first diagnostic is kept in the stats.
    fn fail(&mut self, a: &Addr, why: impl Into<String>) {
        if self.counterexamples.is_empty() {
            self.stat("diagnostic", why.into());
        }
        self.counterexamples.push(a.to_string());
        self.verdict = Verdict::Fail;
    }

    fn absorb(mut self, err: EngineError, at: &Addr) -> Report {
        match err {
            EngineError::Horizon { .. }
            | EngineError::MarginUnstable { .. }
            | EngineError::NonConvergence { .. } => {
                self.verdict = Verdict::Inconclusive;
                self.stat("error", err.to_string());
            }
            other => self.fail(at, other.to_string()),
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Suite parameters. `center` and `margin` default per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub max_level: usize,
    pub radius: usize,
    pub margin: Option<usize>,
    pub stability_k: usize,
    pub center: Option<Addr>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_level: 1,
            radius: 10,
            margin: None,
            stability_k: 3,
            center: None,
        }
    }
}

impl SuiteConfig {
    /// The region used at `level`, or `None` when the configured center
    /// lives above that level.
    pub fn region(&self, level: usize) -> Option<Region> {
        let center = match &self.center {
            Some(c) if c.level() > level => return None,
            Some(c) => c.clone().wrap(level - c.level()),
            None => Addr::Ray(0).wrap(level),
        };
        let margin = self.margin.unwrap_or_else(|| Region::default_margin(level));
        Some(Region::new(center, self.radius, margin))
    }
}

/// Exit status summarizing a report stream: 0 all pass, 1 any fail,
/// 4 inconclusive without failures.
pub fn exit_status(reports: &[Report]) -> i32 {
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        1
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        4
    } else {
        0
    }
}

#[derive(Clone, Debug)]
pub struct Verifier {
    engine: Engine,
    stability_k: usize,
}

impl Verifier {
    pub fn new(engine: Engine) -> Verifier {
        Verifier {
            engine,
            stability_k: 3,
        }
    }

    pub fn with_stability_k(mut self, k: usize) -> Verifier {
        self.stability_k = k;
        self
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    fn ball(&self, level: usize, region: &Region) -> EngineResult<Ball> {
        self.engine.ball_at(level, &region.center, region.radius)
    }

    fn guarded(
        &self,
        name: &str,
        level: usize,
        region: &Region,
        body: impl FnOnce(&mut Report) -> EngineResult<()>,
    ) -> Report {
        let mut r = Report::new(name, level, region);
        match body(&mut r) {
            Ok(()) => r,
            Err(e) => r.absorb(e, &region.center),
        }
    }

    /// Every vertex has degree at most 3 and some vertex reaches 3.
    pub fn check_max_degree(&self, level: usize, region: &Region) -> Report {
        self.guarded("max_degree", level, region, |r| {
            let ball = self.ball(level, region)?;
            let mut max = 0;
            for (v, a) in ball.addrs.iter().enumerate() {
                let d = ball.degree(v);
                max = max.max(d);
                if d > 3 {
                    r.fail(a, format!("{a} has degree {d}"));
                }
            }
            r.stat("vertices", ball.len());
            r.stat("max_degree", max);
            if max < 3 {
                r.fail(&region.center, "no vertex of degree 3 in the ball");
            }
            Ok(())
        })
    }

    /// Every designated leaf inside the region is a genuine leaf.
    pub fn check_leaf_roster(&self, level: usize, region: &Region) -> Report {
        self.guarded("leaf_roster", level, region, |r| {
            let ball = self.ball(level, region)?;
            let mut seen = 0;
            for x in &self.engine.spec(level)?.x_leaves {
                let Some(v) = ball.vertex(x) else { continue };
                seen += 1;
                if ball.degree(v) != 1 {
                    r.fail(x, format!("{x} has degree {}", ball.degree(v)));
                }
            }
            r.stat("leaves_in_region", seen);
            Ok(())
        })
    }

    /// Generator `j` is a local isomorphism on the ball's interior whose
    /// only missed interior vertex is `x_j`, and its inverse agrees.
    pub fn check_local_iso(&self, level: usize, j: usize, region: &Region) -> Report {
        let name = format!("local_iso[{j}]");
        self.guarded(&name, level, region, |r| {
            let e = &self.engine;
            let ball = self.ball(level, region)?;
            let xj = e.x_leaf(level, j)?.clone();
            let mut preimage: HashMap<Addr, &Addr> = HashMap::new();
            let mut interior = 0;
            for v in ball.interior() {
                interior += 1;
                let a = &ball.addrs[v];
                let Some(img) = e.apply_generator(level, j, Sign::Plus, a)? else {
                    r.fail(a, format!("no image of {a}"));
                    continue;
                };
                if let Some(prev) = preimage.insert(img.clone(), a) {
                    r.fail(a, format!("{a} and {prev} share the image {img}"));
                }
                let mut mapped = BTreeSet::new();
                for n in &ball.nbrs[v] {
                    match e.apply_generator(level, j, Sign::Plus, n)? {
                        Some(m) => {
                            mapped.insert(m);
                        }
                        None => r.fail(n, format!("no image of {n}")),
                    }
                }
                // the image tree is T - x_j, so x_j has no preimage to match
                let target: BTreeSet<Addr> = e
                    .neighbors(level, &img)?
                    .into_iter()
                    .filter(|n| *n != xj)
                    .collect();
                if mapped != target {
                    r.fail(a, format!("neighbors of {a} do not map onto neighbors of {img}"));
                }
                if e.apply_generator(level, j, Sign::Minus, &img)?.as_ref() != Some(a) {
                    r.fail(a, format!("inverse does not undo the image {img}"));
                }
            }
            let mut uncovered = Vec::new();
            for u in ball.interior() {
                let b = &ball.addrs[u];
                match e.apply_generator(level, j, Sign::Minus, b)? {
                    None => uncovered.push(b),
                    Some(pre) => {
                        if e.apply_generator(level, j, Sign::Plus, &pre)?.as_ref() != Some(b) {
                            r.fail(b, format!("{b} is not the image of its preimage {pre}"));
                        }
                    }
                }
            }
            let expected: Vec<&Addr> = ball
                .vertex(&xj)
                .filter(|&v| ball.is_interior(v))
                .map(|_| &xj)
                .into_iter()
                .collect();
            if uncovered != expected {
                let culprit = uncovered.first().copied().unwrap_or(&xj);
                r.fail(culprit, format!("uncovered interior vertices {uncovered:?}, expected {expected:?}"));
            }
            r.stat("interior", interior);
            r.stat(
                "uncovered",
                uncovered.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            );
            Ok(())
        })
    }

    /// Generator `j` at `level` restricts on base vertices to the same
    /// generator one level down.
    pub fn check_nesting(&self, level: usize, j: usize, region: &Region) -> Report {
        let name = format!("nesting[{j}]");
        self.guarded(&name, level, region, |r| {
            let e = &self.engine;
            if level == 0 || j >= level {
                return Err(EngineError::InvalidGenerator { level, gen: j });
            }
            let ball = self.ball(level, region)?;
            let mut sampled = 0;
            for a in &ball.addrs {
                let Addr::Base(b) = a else { continue };
                sampled += 1;
                for sign in [Sign::Plus, Sign::Minus] {
                    let up = e.apply_generator(level, j, sign, a)?;
                    let down = e.apply_generator(level - 1, j, sign, b)?.map(Addr::base);
                    if up != down {
                        r.fail(a, format!("levels disagree at {a}: {up:?} vs {down:?}"));
                    }
                }
            }
            r.stat("sampled", sampled);
            Ok(())
        })
    }

    /// The witness orbit has degree 2 throughout, and each element becomes
    /// a degree-3 host one level up.
    pub fn check_witness_orbit(&self, level: usize, region: &Region) -> Report {
        self.guarded("witness_orbit", level, region, |r| {
            let e = &self.engine;
            let gens: Vec<usize> = (0..=level).collect();
            let y = e.witness(level)?.clone();
            let orbit = e.orbit_stable(level, &gens, &[y], region)?;
            let above = e.height() > level;
            for a in &orbit.members {
                let d = e.degree(level, a)?;
                if d != 2 {
                    r.fail(a, format!("orbit element {a} has degree {d}"));
                }
                if above {
                    let lifted = Addr::base(a.clone());
                    if !e.is_host(level + 1, &lifted)? {
                        r.fail(a, format!("{lifted} carries no gadget one level up"));
                    } else if e.degree(level + 1, &lifted)? != 3 {
                        r.fail(a, format!("{lifted} does not reach degree 3 one level up"));
                    }
                }
            }
            // cross-check against the closed-form orbit membership: an extra
            // member is a construction bug, a missing one a margin too thin
            let ball = self.ball(level, region)?;
            let mut missing = Vec::new();
            for a in &ball.addrs {
                let closed = in_witness_orbit(level, a);
                if !closed && orbit.members.contains(a) {
                    r.fail(a, format!("{a} is in the orbit but not of the witness's form"));
                } else if closed && !orbit.members.contains(a) {
                    missing.push(a.to_string());
                }
            }
            if !missing.is_empty() && r.verdict == Verdict::Pass {
                r.verdict = Verdict::Inconclusive;
                r.stat("missing_from_orbit", missing);
            }
            r.stat("orbit_size", orbit.members.len());
            r.stat("explored", orbit.explored);
            Ok(())
        })
    }

    /// `x_{level+1}` is a nearest genuine leaf to `x_0` outside the earlier
    /// roster, and the smallest address among equally near ones.
    pub fn check_x_selection(&self, level: usize, region: &Region) -> Report {
        self.guarded("x_selection", level, region, |r| {
            let e = &self.engine;
            let spec = e.spec(level)?;
            let x0 = &spec.x_leaves[0];
            let chosen = spec.x_leaves.get(level + 1).ok_or(EngineError::NoLeafCandidate {
                index: level + 1,
                searched: 0,
            })?;
            let earlier: HashSet<&Addr> = spec.x_leaves.iter().take(level + 1).collect();
            let d = e.distance(level, x0, chosen) as usize;
            let ball = e.ball_at(level, x0, d)?;
            match ball.vertex(chosen) {
                Some(v) if ball.degree(v) == 1 => {}
                _ => r.fail(chosen, format!("{chosen} is not a leaf at distance {d} from {x0}")),
            }
            for (v, a) in ball.addrs.iter().enumerate() {
                if ball.degree(v) != 1 || earlier.contains(a) || a == chosen {
                    continue;
                }
                if ball.dist[v] < d {
                    r.fail(a, format!("{a} is a closer leaf ({} < {d})", ball.dist[v]));
                } else if a < chosen {
                    r.fail(a, format!("{a} ties at distance {d} but precedes {chosen}"));
                }
            }
            r.stat("selected", chosen.to_string());
            r.stat("distance", d);
            r.stat("searched", ball.len());
            Ok(())
        })
    }

    /// Core membership by budgeted direction expansion: hosts lie in the
    /// core, the expansion agrees with the structural rule (only pendant
    /// genuine leaves are finite directions), and generators keep interior
    /// core vertices in the core.
    pub fn check_core(&self, level: usize, region: &Region) -> Report {
        self.guarded("core", level, region, |r| {
            let e = &self.engine;
            let ball = self.ball(level, region)?;
            let budget = (region.radius + region.margin).max(1);
            let mut in_core = vec![false; ball.len()];
            let mut core_size = 0;
            for v in ball.interior() {
                let a = &ball.addrs[v];
                let (core, mismatch) = self.core_member(level, a, &ball.nbrs[v], budget)?;
                if let Some(n) = mismatch {
                    r.fail(a, format!("direction {a} -> {n} disagrees with the structural rule"));
                }
                in_core[v] = core;
                core_size += usize::from(core);
            }
            let mut hosts = 0;
            for v in ball.interior() {
                let a = &ball.addrs[v];
                let here = e.is_host(level, a)?;
                let next = e.height() > level && e.is_host(level + 1, &Addr::base(a.clone()))?;
                if here || next {
                    hosts += 1;
                    if !in_core[v] {
                        r.fail(a, format!("host {a} is outside the core"));
                    }
                }
            }
            let mut mapped = 0;
            for v in ball.interior().filter(|&v| in_core[v]) {
                let a = &ball.addrs[v];
                for j in 0..=level {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let Some(img) = e.apply_generator(level, j, sign, a)? else { continue };
                        let nbrs = e.neighbors(level, &img)?;
                        mapped += 1;
                        if !self.core_member(level, &img, &nbrs, budget)?.0 {
                            r.fail(a, format!("generator {j} moves core vertex {a} to {img} outside the core"));
                        }
                    }
                }
            }
            r.stat("core_interior", core_size);
            r.stat("hosts_checked", hosts);
            r.stat("images_checked", mapped);
            Ok(())
        })
    }

    /// Returns core membership of `a` and the first neighbor whose
    /// expansion verdict contradicts the structural rule.
    fn core_member(
        &self,
        level: usize,
        a: &Addr,
        nbrs: &[Addr],
        budget: usize,
    ) -> EngineResult<(bool, Option<Addr>)> {
        let mut infinite = 0;
        let mut mismatch = None;
        for n in nbrs {
            let inf = self.direction_infinite(level, a, n, budget)?;
            let structural = self.engine.degree(level, n)? != 1;
            if inf != structural && mismatch.is_none() {
                mismatch = Some(n.clone());
            }
            infinite += usize::from(inf);
        }
        Ok((nbrs.len() > 1 && infinite >= 2, mismatch))
    }

    /// Depth-first expansion of the component of `T - from` containing
    /// `to`. Reaching depth `budget` counts as infinite; exhausting the
    /// component counts as finite.
    fn direction_infinite(
        &self,
        level: usize,
        from: &Addr,
        to: &Addr,
        budget: usize,
    ) -> EngineResult<bool> {
        let mut stack = vec![(to.clone(), from.clone(), 1usize)];
        let mut nodes = 0;
        while let Some((v, parent, depth)) = stack.pop() {
            if depth >= budget {
                return Ok(true);
            }
            nodes += 1;
            if nodes > DIRECTION_NODE_BUDGET {
                return Err(EngineError::Horizon {
                    addr: to.to_string(),
                    center: from.to_string(),
                    radius: budget,
                });
            }
            for n in self.engine.neighbors(level, &v)? {
                if n != parent {
                    stack.push((n, v.clone(), depth + 1));
                }
            }
        }
        Ok(false)
    }

    /// Each host has exactly two edges besides the one into its own gadget.
    pub fn check_host_degree(&self, level: usize, region: &Region) -> Report {
        self.guarded("host_degree", level, region, |r| {
            let e = &self.engine;
            let ball = self.ball(level, region)?;
            let mut hosts = 0;
            for (v, a) in ball.addrs.iter().enumerate() {
                if !e.is_host(level, a)? {
                    continue;
                }
                hosts += 1;
                let own = Addr::inside(a.clone(), crate::construction::Local::Z);
                let rest = ball.nbrs[v].iter().filter(|n| **n != own).count();
                if rest != 2 {
                    r.fail(a, format!("host {a} has {rest} edges besides its gadget"));
                }
            }
            r.stat("hosts", hosts);
            Ok(())
        })
    }

    /// The literal host ladder inside the region agrees with the host rule
    /// used for adjacency, and is unchanged when the margin is doubled or
    /// the stopping rule is made twice as patient.
    pub fn check_ladder(&self, level: usize, region: &Region) -> Report {
        self.guarded("ladder", level, region, |r| {
            let e = &self.engine;
            let k = self.stability_k;
            let ladder = e.hosts_stable(level, region, k)?;
            let patient = e.hosts(level, region, 2 * k)?;
            if patient.hosts != ladder.hosts {
                r.verdict = Verdict::Inconclusive;
                r.stat("error", format!("host set changed between stability_k {k} and {}", 2 * k));
                return Ok(());
            }
            let ball = self.ball(level, region)?;
            let from_ladder = ladder.addrs();
            for a in &ball.addrs {
                if e.is_host(level, a)? != from_ladder.contains(a) {
                    r.fail(a, format!("ladder and host rule disagree at {a}"));
                }
            }
            let mut by_stratum: BTreeMap<String, usize> = BTreeMap::new();
            for h in &ladder.hosts {
                *by_stratum.entry(h.stratum.to_string()).or_default() += 1;
            }
            r.stat("hosts", ladder.hosts.len());
            r.stat("strata_used", ladder.strata_used);
            r.stat("explored", ladder.explored);
            r.stat("by_stratum", json!(by_stratum));
            r.stat("stability_k", k);
            Ok(())
        })
    }

    /// Runs every check for every level up to `config.max_level`, in a fixed
    /// order regardless of scheduling.
    pub fn run_suite(&self, config: &SuiteConfig) -> Vec<Report> {
        type Task = (usize, Region, Box<dyn Fn(&Verifier, usize, &Region) -> Report + Send + Sync>);
        let mut tasks: Vec<Task> = Vec::new();
        for level in 0..=config.max_level {
            let Some(region) = config.region(level) else { continue };
            tasks.push((level, region.clone(), Box::new(|v, l, g| v.check_max_degree(l, g))));
            tasks.push((level, region.clone(), Box::new(|v, l, g| v.check_leaf_roster(l, g))));
            for j in 0..=level {
                tasks.push((level, region.clone(), Box::new(move |v, l, g| v.check_local_iso(l, j, g))));
            }
            for j in 0..level {
                tasks.push((level, region.clone(), Box::new(move |v, l, g| v.check_nesting(l, j, g))));
            }
            tasks.push((level, region.clone(), Box::new(|v, l, g| v.check_witness_orbit(l, g))));
            tasks.push((level, region.clone(), Box::new(|v, l, g| v.check_x_selection(l, g))));
            tasks.push((level, region.clone(), Box::new(|v, l, g| v.check_core(l, g))));
            if level >= 1 {
                tasks.push((level, region.clone(), Box::new(|v, l, g| v.check_host_degree(l, g))));
                tasks.push((level, region, Box::new(|v, l, g| v.check_ladder(l, g))));
            }
        }
        tasks
            .par_iter()
            .map(|(level, region, run)| run(self, *level, region))
            .collect()
    }
}

/// Builds an engine tall enough for `config` and runs the suite on it.
pub fn run_suite(config: &SuiteConfig) -> EngineResult<Vec<Report>> {
    let engine = Engine::build(config.max_level + 1)?;
    Ok(Verifier::new(engine)
        .with_stability_k(config.stability_k)
        .run_suite(config))
}
