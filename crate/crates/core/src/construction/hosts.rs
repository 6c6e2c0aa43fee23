//! Which vertices carry a gadget.
//!
//! At level `n+1` the ladder `W_1, W_2, ...` starts from the witness `y` of
//! level `n` and alternately closes the newest stratum under the level-`n`
//! generators (acting by gadget transport) and under the new generator `ψ`.
//! Unrolling the alternation gives a closed form, which [`LadderRule`]
//! evaluates directly:
//!
//! * `base(b)` is a host iff `b` lies in the level-`n` witness orbit;
//! * `in(h=..;c(s,j,b))` is a host iff `b` lies in that orbit and `b ≠ y`;
//! * nothing else is a host.
//!
//! The copy of `y` inside a gadget is excluded because `ψ(y)` already has
//! degree 3 (its third edge runs to `cz(1,1)`). The level-`n+1` witness
//! orbit is every `z` and `cz(s,j)` local, which makes orbit membership a
//! syntactic test for `n ≥ 1`; at level 0 it is the odd ray vertices.
//!
//! [`RegionRule`] instead answers from an explicitly computed host set, so
//! the literal ladder (or a deliberately wrong set, for test doubles) can be
//! plugged into adjacency.

use std::collections::HashSet;
use std::fmt;

use crate::construction::addr::{Addr, Local};
use crate::construction::region::Region;
use crate::construction::tower::Tower;
use crate::error::{EngineError, EngineResult};

pub trait HostRule: Send + Sync + fmt::Debug {
    /// Whether `a` (a vertex of `T_level`) carries a level-`level` gadget.
    fn is_host(&self, tower: &Tower, level: usize, a: &Addr) -> EngineResult<bool>;
}

/// Membership in the orbit of the level-`level` witness under all
/// generators of that level.
pub fn in_witness_orbit(level: usize, a: &Addr) -> bool {
    match (level, a) {
        (0, Addr::Ray(k)) => k.rem_euclid(2) == 1,
        (0, _) => false,
        (_, Addr::In(_, Local::Z | Local::CZ(..))) => true,
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LadderRule;

impl HostRule for LadderRule {
    fn is_host(&self, tower: &Tower, level: usize, a: &Addr) -> EngineResult<bool> {
        if level == 0 {
            return Ok(false);
        }
        let below = level - 1;
        Ok(match a {
            Addr::Base(b) => in_witness_orbit(below, b),
            Addr::In(_, Local::C(_, _, b)) => {
                in_witness_orbit(below, b) && **b != tower.level(below)?.witness
            }
            _ => false,
        })
    }
}

/// Host set computed for one level inside one region; other levels fall
/// back to [`LadderRule`]. Queries outside the region fail loudly.
#[derive(Clone, Debug)]
pub struct RegionRule {
    pub level: usize,
    pub region: Region,
    pub hosts: HashSet<Addr>,
}

impl HostRule for RegionRule {
    fn is_host(&self, tower: &Tower, level: usize, a: &Addr) -> EngineResult<bool> {
        if level != self.level {
            return LadderRule.is_host(tower, level, a);
        }
        if tower.distance(level, &self.region.center, a) > self.region.radius as u64 {
            return Err(EngineError::Horizon {
                addr: a.to_string(),
                center: self.region.center.to_string(),
                radius: self.region.radius,
            });
        }
        Ok(self.hosts.contains(a))
    }
}
