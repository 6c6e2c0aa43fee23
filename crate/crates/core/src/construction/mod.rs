//! Symbolic construction of the tower `T_0 ⊂ T_1 ⊂ ...` and its limit.

pub mod addr;
pub mod engine;
pub mod hosts;
pub mod region;
pub mod tower;

pub use addr::{Addr, Local, Side};
pub use engine::{Ball, Engine};
pub use hosts::{in_witness_orbit, HostRule, LadderRule, RegionRule};
pub use region::{HostLadder, HostRef, OrbitResult, Region};
pub use tower::{LevelSpec, Tower};
