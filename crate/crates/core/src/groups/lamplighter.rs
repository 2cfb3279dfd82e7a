use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lamp group of a lamplighter group over the base `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LampGroup {
    /// `Z/p`, written `z2`, `z3`, …
    Cyclic(i64),
    /// `Z`, written `z`.
    Integers,
}

impl TryFrom<String> for LampGroup {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "z" {
            return Ok(LampGroup::Integers);
        }
        match t.strip_prefix('z').and_then(|p| p.parse::<i64>().ok()) {
            Some(p) if p >= 2 => Ok(LampGroup::Cyclic(p)),
            _ => Err(Error::Parse(format!("unknown lamp group {s:?} (expected z2, z3, ... or z)"))),
        }
    }
}

impl From<LampGroup> for String {
    fn from(l: LampGroup) -> String {
        match l {
            LampGroup::Cyclic(p) => format!("z{p}"),
            LampGroup::Integers => "z".into(),
        }
    }
}

impl LampGroup {
    pub fn reduce(&self, v: i64) -> i64 {
        match self {
            LampGroup::Cyclic(p) => v.rem_euclid(*p),
            LampGroup::Integers => v,
        }
    }

    /// Word length of a lamp value under the generators `a^{±1}`.
    pub fn cost(&self, v: i64) -> i64 {
        match self {
            LampGroup::Cyclic(p) => {
                let r = v.rem_euclid(*p);
                r.min(p - r)
            }
            LampGroup::Integers => v.abs(),
        }
    }

    /// Lamp generators: `a` alone when it is an involution, else `a^{±1}`.
    pub fn generators(&self) -> Vec<i64> {
        match self {
            LampGroup::Cyclic(2) => vec![1],
            _ => vec![1, -1],
        }
    }
}

/// Element `(f, c)` of a lamplighter group: finitely supported lamp map `f`
/// and cursor `c`. Canonical: stored lamp values are reduced and nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LampElement {
    pub cursor: i64,
    pub lamps: BTreeMap<i64, i64>,
}

impl LampElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(cursor: i64, lamps: impl IntoIterator<Item = (i64, i64)>, lamp: LampGroup) -> Self {
        let mut e = LampElement { cursor, lamps: BTreeMap::new() };
        for (x, v) in lamps {
            e.bump(x, v, lamp);
        }
        e
    }

    fn bump(&mut self, x: i64, v: i64, lamp: LampGroup) {
        let cur = self.lamps.get(&x).copied().unwrap_or(0);
        let nv = lamp.reduce(cur + v);
        if nv == 0 {
            self.lamps.remove(&x);
        } else {
            self.lamps.insert(x, nv);
        }
    }

    /// Right multiplication by `t^s`.
    pub fn move_cursor(&self, s: i64) -> Self {
        LampElement { cursor: self.cursor + s, lamps: self.lamps.clone() }
    }

    /// Right multiplication by `a^v`: changes the lamp under the cursor.
    pub fn switch(&self, v: i64, lamp: LampGroup) -> Self {
        let mut e = self.clone();
        e.bump(self.cursor, v, lamp);
        e
    }

    /// `g⁻¹h = (shift_{-c}(f_h − f_g), c_h − c_g)`.
    pub fn relative(g: &Self, h: &Self, lamp: LampGroup) -> Self {
        let mut out = LampElement { cursor: h.cursor - g.cursor, lamps: BTreeMap::new() };
        for (&x, &v) in &h.lamps {
            out.bump(x - g.cursor, v, lamp);
        }
        for (&x, &v) in &g.lamps {
            out.bump(x - g.cursor, -v, lamp);
        }
        out
    }

    /// Word length: lamp costs plus the shortest cursor tour from `0` that
    /// visits every lit lamp and ends at the cursor.
    pub fn length(&self, lamp: LampGroup) -> i64 {
        let switches: i64 = self.lamps.values().map(|&v| lamp.cost(v)).sum();
        let c = self.cursor;
        let lo = self.lamps.keys().next().copied().unwrap_or(0).min(0).min(c);
        let hi = self.lamps.keys().next_back().copied().unwrap_or(0).max(0).max(c);
        let travel = (hi - lo) + (-lo + (hi - c)).min(hi + (c - lo));
        switches + travel
    }

    /// Distance on the fly, without materializing `g⁻¹h`.
    pub fn distance(g: &Self, h: &Self, lamp: LampGroup) -> i64 {
        // positions relative to g's cursor
        let mut switches = 0;
        let (mut lo, mut hi) = (0i64, 0i64);
        let mut note = |x: i64, v: i64| {
            let c = lamp.cost(v);
            if c != 0 {
                switches += c;
                lo = lo.min(x);
                hi = hi.max(x);
            }
        };
        let mut a = g.lamps.iter().peekable();
        let mut b = h.lamps.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(&(&x, &v)), None) => {
                    note(x - g.cursor, -v);
                    a.next();
                }
                (None, Some(&(&y, &w))) => {
                    note(y - g.cursor, w);
                    b.next();
                }
                (Some(&(&x, &v)), Some(&(&y, &w))) => {
                    if x == y {
                        note(x - g.cursor, w - v);
                        a.next();
                        b.next();
                    } else if x < y {
                        note(x - g.cursor, -v);
                        a.next();
                    } else {
                        note(y - g.cursor, w);
                        b.next();
                    }
                }
            }
        }
        let c = h.cursor - g.cursor;
        let lo = lo.min(c);
        let hi = hi.max(c);
        switches + (hi - lo) + (-lo + (hi - c)).min(hi + (c - lo))
    }
}

impl fmt::Display for LampElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{{", self.cursor)?;
        for (i, (x, v)) in self.lamps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}:{v}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z2: LampGroup = LampGroup::Cyclic(2);

    #[test]
    fn lengths() {
        assert_eq!(LampElement::identity().length(Z2), 0);
        // a t a: lamps at 0 and 1, cursor at 1
        let e = LampElement::new(1, [(0, 1), (1, 1)], Z2);
        assert_eq!(e.length(Z2), 3);
        // lamp at -2, cursor at 3: go left 2, then right 5
        let e = LampElement::new(3, [(-2, 1)], Z2);
        assert_eq!(e.length(Z2), 1 + 2 + 5);
        let z = LampGroup::Integers;
        assert_eq!(LampElement::new(0, [(1, -3)], z).length(z), 3 + 2);
    }

    #[test]
    fn relative_matches_distance() {
        let g = LampElement::new(2, [(0, 1), (5, 1)], Z2);
        let h = LampElement::new(-1, [(0, 1), (3, 1)], Z2);
        let r = LampElement::relative(&g, &h, Z2);
        assert_eq!(r.length(Z2), LampElement::distance(&g, &h, Z2));
    }

    #[test]
    fn lamp_names_round_trip() {
        for s in ["z2", "z5", "z"] {
            let l = LampGroup::try_from(s.to_string()).unwrap();
            assert_eq!(String::from(l), s);
        }
        assert!(LampGroup::try_from("z1".to_string()).is_err());
    }
}
