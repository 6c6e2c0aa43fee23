//! Region-bounded closure computations: orbits and the host ladder.
//!
//! Generators can move vertices arbitrarily far, so nothing here is
//! certified complete. Exploration is cut at `radius + margin` from the
//! center and results are restricted to `radius`; callers that need
//! confidence re-run with the margin doubled (`*_stable`).

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::construction::addr::Addr;
use crate::construction::engine::Engine;
use crate::error::{EngineError, EngineResult};
use crate::word::Sign;

/// Hard cap on ladder strata before giving up.
pub const STRATUM_BUDGET: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Region {
    pub center: Addr,
    pub radius: usize,
    pub margin: usize,
}

impl Region {
    pub fn new(center: Addr, radius: usize, margin: usize) -> Region {
        Region {
            center,
            radius,
            margin,
        }
    }

    /// Region around the default center `base^level(ray(0))` with the
    /// default margin.
    pub fn around_origin(level: usize, radius: usize) -> Region {
        Region::new(Addr::Ray(0).wrap(level), radius, Region::default_margin(level))
    }

    /// Measured, not derived: every orbit and ladder used by the acceptance
    /// runs is unchanged when this is doubled.
    pub fn default_margin(level: usize) -> usize {
        2 * (level + 2)
    }

    pub fn doubled(&self) -> Region {
        Region {
            margin: self.margin.max(1) * 2,
            ..self.clone()
        }
    }

    fn reach(&self) -> u64 {
        (self.radius + self.margin) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitResult {
    pub members: BTreeSet<Addr>,
    /// Addresses touched, including those only inside the margin.
    pub explored: usize,
}

/// An attachment point together with the ladder stratum that introduced it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HostRef {
    pub host: Addr,
    pub stratum: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostLadder {
    /// Hosts inside the region, sorted by address.
    pub hosts: Vec<HostRef>,
    /// Strata generated before the stopping rule fired.
    pub strata_used: usize,
    pub explored: usize,
}

impl HostLadder {
    pub fn addrs(&self) -> HashSet<Addr> {
        self.hosts.iter().map(|h| h.host.clone()).collect()
    }
}

impl Engine {
    /// Closure of `seeds` under `gens` (both exponents), restricted to the
    /// region.
    pub fn orbit(
        &self,
        level: usize,
        gens: &[usize],
        seeds: &[Addr],
        region: &Region,
    ) -> EngineResult<OrbitResult> {
        let reach = region.reach();
        let start: Vec<Addr> = seeds
            .iter()
            .filter(|a| self.distance(level, &region.center, a) <= reach)
            .cloned()
            .collect();
        let all = self.closure(level, gens, start, &region.center, reach)?;
        let explored = all.len();
        let members = all
            .into_iter()
            .filter(|a| self.distance(level, &region.center, a) <= region.radius as u64)
            .collect();
        Ok(OrbitResult { members, explored })
    }

    /// [`Engine::orbit`], failing if doubling the margin changes the answer.
    pub fn orbit_stable(
        &self,
        level: usize,
        gens: &[usize],
        seeds: &[Addr],
        region: &Region,
    ) -> EngineResult<OrbitResult> {
        let a = self.orbit(level, gens, seeds, region)?;
        let wide = region.doubled();
        let b = self.orbit(level, gens, seeds, &wide)?;
        if a.members != b.members {
            return Err(EngineError::MarginUnstable {
                margin: region.margin,
                doubled: wide.margin,
            });
        }
        Ok(a)
    }

    /// Breadth-first closure, pruned at distance `reach` from the center.
    fn closure(
        &self,
        level: usize,
        gens: &[usize],
        start: Vec<Addr>,
        center: &Addr,
        reach: u64,
    ) -> EngineResult<Vec<Addr>> {
        let mut seen: HashSet<Addr> = start.iter().cloned().collect();
        let mut out = start;
        let mut i = 0;
        while i < out.len() {
            for &g in gens {
                for sign in [Sign::Plus, Sign::Minus] {
                    if let Some(img) = self.apply_generator(level, g, sign, &out[i])? {
                        if !seen.contains(&img) && self.distance(level, center, &img) <= reach {
                            seen.insert(img.clone());
                            out.push(img);
                        }
                    }
                }
            }
            i += 1;
        }
        Ok(out)
    }

    /// The host ladder of `level` inside `region`. Stratum 1 is the witness
    /// of the level below; even strata close the previous stratum under the
    /// inherited generators, odd strata under the newest one. Stops after
    /// `k` consecutive strata add nothing inside the region.
    pub fn hosts(&self, level: usize, region: &Region, k: usize) -> EngineResult<HostLadder> {
        if level == 0 {
            return Ok(HostLadder {
                hosts: Vec::new(),
                strata_used: 0,
                explored: 0,
            });
        }
        let reach = region.reach();
        let radius = region.radius as u64;
        let inherited: Vec<usize> = (0..level).collect();
        let newest = [level];
        let y = Addr::base(self.witness(level - 1)?.clone());

        let mut found: BTreeMap<Addr, usize> = BTreeMap::new();
        let mut all: HashSet<Addr> = HashSet::new();
        let mut stratum = Vec::new();
        if self.distance(level, &region.center, &y) <= reach {
            all.insert(y.clone());
            if self.distance(level, &region.center, &y) <= radius {
                found.insert(y.clone(), 1);
            }
            stratum.push(y);
        }
        let mut strata_used = 1;
        let mut quiet = 0;
        while !stratum.is_empty() && quiet < k.max(1) {
            if strata_used >= STRATUM_BUDGET {
                return Err(EngineError::NonConvergence {
                    budget: STRATUM_BUDGET,
                });
            }
            strata_used += 1;
            let gens: &[usize] = if strata_used % 2 == 0 { &inherited } else { &newest };
            let closed = self.closure(level, gens, stratum, &region.center, reach)?;
            let fresh: Vec<Addr> = closed.into_iter().filter(|a| all.insert(a.clone())).collect();
            let mut added = false;
            for a in &fresh {
                if self.distance(level, &region.center, a) <= radius {
                    found.insert(a.clone(), strata_used);
                    added = true;
                }
            }
            quiet = if added { 0 } else { quiet + 1 };
            stratum = fresh;
        }
        Ok(HostLadder {
            hosts: found
                .into_iter()
                .map(|(host, stratum)| HostRef { host, stratum })
                .collect(),
            strata_used,
            explored: all.len(),
        })
    }

    /// [`Engine::hosts`], failing if doubling the margin changes the host
    /// set or its strata.
    pub fn hosts_stable(&self, level: usize, region: &Region, k: usize) -> EngineResult<HostLadder> {
        let a = self.hosts(level, region, k)?;
        let wide = region.doubled();
        let b = self.hosts(level, &wide, k)?;
        if a.hosts != b.hosts {
            return Err(EngineError::MarginUnstable {
                margin: region.margin,
                doubled: wide.margin,
            });
        }
        Ok(a)
    }
}
