//! A locally finite tree of maximum degree 3 that stays isomorphic to
//! itself after deleting any leaf, built lazily from symbolic addresses,
//! plus the finite-tree toolkit and verifier used to check it.

pub mod construction;
pub mod error;
pub mod iso;
pub mod tree;
pub mod verifier;
pub mod word;

pub use construction::{Addr, Engine, Region};
pub use error::{EngineError, TreeError};
pub use tree::{FiniteTree, Kind, RootedFiniteTree};
