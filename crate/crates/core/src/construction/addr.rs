//! Symbolic vertex addresses.
//!
//! Level 0 vertices are `ray(k)` on the doubly infinite ray and `leaf(k)`
//! hanging from each even non-negative ray vertex. A vertex of level `n+1`
//! is either `base(a)` for a level-`n` vertex `a`, or a vertex inside the
//! gadget attached at some host: `in(h=<host>;<local>)`.
//!
//! Gadget locals: `z` is the middle of the path from the host, `yp` its far
//! end, `r(s,j)` the `j`-th vertex on side `s` of the line through `yp`,
//! `cz(s,j)` the middle of the path hanging from `r(s,j)`, and `c(s,j,a)`
//! the vertex `a` of the level-`n` tree copy hanging below `cz(s,j)`.
//!
//! The derived `Ord` is the canonical order used for tie-breaking:
//! `ray < leaf < base < in`, locals `z < yp < r < cz < c`, then indices,
//! recursing into inner addresses.

use std::fmt;
use std::str::FromStr;

use crate::error::AddrParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }

    /// Signed position on the line through `yp` for distance `j` on this side.
    pub fn position(self, j: u64) -> i64 {
        match self {
            Side::One => j as i64,
            Side::Two => -(j as i64),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Local {
    Z,
    Yp,
    R(Side, u64),
    CZ(Side, u64),
    C(Side, u64, Box<Addr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Addr {
    Ray(i64),
    Leaf(i64),
    Base(Box<Addr>),
    In(Box<Addr>, Local),
}

impl Addr {
    pub fn base(a: Addr) -> Addr {
        Addr::Base(Box::new(a))
    }

    pub fn inside(host: Addr, local: Local) -> Addr {
        Addr::In(Box::new(host), local)
    }

    /// `base` applied `k` times.
    pub fn wrap(mut self, k: usize) -> Addr {
        for _ in 0..k {
            self = Addr::base(self);
        }
        self
    }

    /// The level this address is written for, read off its nesting.
    pub fn level(&self) -> usize {
        match self {
            Addr::Ray(_) | Addr::Leaf(_) => 0,
            Addr::Base(a) => a.level() + 1,
            Addr::In(h, _) => h.level(),
        }
    }

    /// Strips `base` wrappers: `base(base(ray(1)))` and `ray(1)` unwrap to
    /// the same address.
    pub fn unwrapped(&self) -> &Addr {
        let mut cur = self;
        while let Addr::Base(inner) = cur {
            cur = inner;
        }
        cur
    }

    /// Equality that ignores how many times an address was `base`-wrapped.
    pub fn same_vertex(&self, other: &Addr) -> bool {
        self.unwrapped() == other.unwrapped()
    }

    /// Nesting depth of gadgets, counting every `in(...)` along the way.
    pub fn gadget_depth(&self) -> usize {
        match self {
            Addr::Ray(_) | Addr::Leaf(_) => 0,
            Addr::Base(a) => a.gadget_depth(),
            Addr::In(h, l) => {
                1 + h.gadget_depth()
                    + match l {
                        Local::C(_, _, a) => a.gadget_depth(),
                        _ => 0,
                    }
            }
        }
    }
}

impl fmt::Display for Local {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Local::Z => f.write_str("z"),
            Local::Yp => f.write_str("yp"),
            Local::R(s, j) => write!(f, "r({},{})", s.index(), j),
            Local::CZ(s, j) => write!(f, "cz({},{})", s.index(), j),
            Local::C(s, j, a) => write!(f, "c({},{},{})", s.index(), j, a),
        }
    }
}

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Addr::Ray(k) => write!(f, "ray({k})"),
            Addr::Leaf(k) => write!(f, "leaf({k})"),
            Addr::Base(a) => write!(f, "base({a})"),
            Addr::In(h, l) => write!(f, "in(h={h};{l})"),
        }
    }
}

impl serde::Serialize for Addr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Addr {
    type Err = AddrParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.trim().as_bytes(),
            pos: 0,
        };
        let a = p.addr()?;
        if p.pos != p.src.len() {
            return Err(AddrParseError::Trailing { pos: p.pos });
        }
        Ok(a)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn eat(&mut self, lit: &str) -> bool {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &'static str, rule: &'static str) -> Result<(), AddrParseError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(AddrParseError::Expected {
                pos: self.pos,
                rule,
            })
        }
    }

    fn int(&mut self, rule: &'static str) -> Result<i64, AddrParseError> {
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or(AddrParseError::Expected { pos: start, rule })
    }

    fn side(&mut self) -> Result<Side, AddrParseError> {
        if self.eat("1") {
            Ok(Side::One)
        } else if self.eat("2") {
            Ok(Side::Two)
        } else {
            Err(AddrParseError::Expected {
                pos: self.pos,
                rule: "side `1` or `2`",
            })
        }
    }

    fn index(&mut self) -> Result<u64, AddrParseError> {
        let at = self.pos;
        let j = self.int("line index j >= 1")?;
        if j < 1 {
            return Err(AddrParseError::Expected {
                pos: at,
                rule: "line index j >= 1",
            });
        }
        Ok(j as u64)
    }

    fn addr(&mut self) -> Result<Addr, AddrParseError> {
        if self.eat("ray(") {
            let k = self.int("integer in `ray(k)`")?;
            self.expect(")", "`)` closing `ray(k)`")?;
            Ok(Addr::Ray(k))
        } else if self.eat("leaf(") {
            let k = self.int("integer in `leaf(k)`")?;
            self.expect(")", "`)` closing `leaf(k)`")?;
            Ok(Addr::Leaf(k))
        } else if self.eat("base(") {
            let a = self.addr()?;
            self.expect(")", "`)` closing `base(<addr>)`")?;
            Ok(Addr::base(a))
        } else if self.eat("in(") {
            self.expect("h=", "`h=` in `in(h=<addr>;<local>)`")?;
            let h = self.addr()?;
            self.expect(";", "`;` in `in(h=<addr>;<local>)`")?;
            let l = self.local()?;
            self.expect(")", "`)` closing `in(h=<addr>;<local>)`")?;
            Ok(Addr::inside(h, l))
        } else {
            Err(AddrParseError::Expected {
                pos: self.pos,
                rule: "one of `ray(k)`, `leaf(k)`, `base(<addr>)`, `in(h=<addr>;<local>)`",
            })
        }
    }

    fn local(&mut self) -> Result<Local, AddrParseError> {
        if self.eat("cz(") {
            let s = self.side()?;
            self.expect(",", "`,` in `cz(s,j)`")?;
            let j = self.index()?;
            self.expect(")", "`)` closing `cz(s,j)`")?;
            Ok(Local::CZ(s, j))
        } else if self.eat("c(") {
            let s = self.side()?;
            self.expect(",", "`,` in `c(s,j,<addr>)`")?;
            let j = self.index()?;
            self.expect(",", "`,` in `c(s,j,<addr>)`")?;
            let a = self.addr()?;
            self.expect(")", "`)` closing `c(s,j,<addr>)`")?;
            Ok(Local::C(s, j, Box::new(a)))
        } else if self.eat("r(") {
            let s = self.side()?;
            self.expect(",", "`,` in `r(s,j)`")?;
            let j = self.index()?;
            self.expect(")", "`)` closing `r(s,j)`")?;
            Ok(Local::R(s, j))
        } else if self.eat("yp") {
            Ok(Local::Yp)
        } else if self.eat("z") {
            Ok(Local::Z)
        } else {
            Err(AddrParseError::Expected {
                pos: self.pos,
                rule: "gadget local `z`, `yp`, `r(s,j)`, `cz(s,j)` or `c(s,j,<addr>)`",
            })
        }
    }
}
