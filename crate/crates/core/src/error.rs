use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("unknown vertex handle {0}")]
    UnknownVertex(usize),
    #[error("vertex `{0}` is not a genuine leaf")]
    NotALeaf(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("edge list does not describe a tree: {0}")]
    NotATree(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AddrParseError {
    #[error("at byte {pos}: expected {rule}")]
    Expected { pos: usize, rule: &'static str },
    #[error("at byte {pos}: trailing input after address")]
    Trailing { pos: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordParseError {
    #[error("bad letter `{0}`: expected `g<j>` or `g<j>^-1`")]
    BadLetter(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("address `{addr}` is not a vertex of level {level}: {reason}")]
    InvalidAddr {
        level: usize,
        addr: String,
        reason: &'static str,
    },
    #[error("generator {gen} does not exist at level {level}")]
    InvalidGenerator { level: usize, gen: usize },
    #[error("level {requested} not built (tower height {height})")]
    LevelOutOfRange { requested: usize, height: usize },
    #[error("host membership of `{addr}` cannot be settled inside region of radius {radius} around `{center}`")]
    Horizon {
        addr: String,
        center: String,
        radius: usize,
    },
    #[error("result changed when the margin was doubled from {margin} to {doubled}")]
    MarginUnstable { margin: usize, doubled: usize },
    #[error("ladder did not settle within {budget} strata")]
    NonConvergence { budget: usize },
    #[error("no candidate leaf for x_{index} within distance {searched}")]
    NoLeafCandidate { index: usize, searched: usize },
}

pub type EngineResult<T> = Result<T, EngineError>;
