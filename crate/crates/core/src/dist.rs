use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

use serde::{Deserialize, Serialize};

/// Hop distance or infinity. `INF + x = INF`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dist(u32);

impl Dist {
    pub const INF: Dist = Dist(u32::MAX);
    pub const ZERO: Dist = Dist(0);

    pub fn new(hops: u32) -> Self {
        debug_assert!(hops != u32::MAX);
        Dist(hops)
    }

    pub fn is_finite(self) -> bool {
        self.0 != u32::MAX
    }

    pub fn get(self) -> Option<u32> {
        if self.is_finite() {
            Some(self.0)
        } else {
            None
        }
    }

    /// Raw value; `u32::MAX` for infinity.
    pub fn raw(self) -> u32 {
        self.0
    }

    /// `self - rhs` for finite operands with `self >= rhs`.
    pub fn minus(self, rhs: u32) -> Dist {
        match self.get() {
            Some(h) => Dist(h - rhs),
            None => Dist::INF,
        }
    }
}

impl Add for Dist {
    type Output = Dist;
    fn add(self, rhs: Dist) -> Dist {
        if self.is_finite() && rhs.is_finite() {
            Dist(self.0 + rhs.0)
        } else {
            Dist::INF
        }
    }
}

impl Add<u32> for Dist {
    type Output = Dist;
    fn add(self, rhs: u32) -> Dist {
        self + Dist::new(rhs)
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(h) => write!(f, "{h}"),
            None => f.write_str("INF"),
        }
    }
}

impl From<Option<u32>> for Dist {
    fn from(v: Option<u32>) -> Self {
        v.map_or(Dist::INF, Dist::new)
    }
}

/// Exact length in the perturbed graph: `hops + frac / M`, compared
/// lexicographically by `(hops, frac)`. Because every simple path has
/// `frac < M`, this order agrees with the true perturbed weights.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PLen {
    pub hops: u32,
    pub frac: u128,
}

impl PLen {
    pub const ZERO: PLen = PLen { hops: 0, frac: 0 };
    pub const INF: PLen = PLen {
        hops: u32::MAX,
        frac: u128::MAX,
    };

    pub fn new(hops: u32, frac: u128) -> Self {
        PLen { hops, frac }
    }

    pub fn is_finite(self) -> bool {
        self.hops != u32::MAX
    }

    pub fn dist(self) -> Dist {
        if self.is_finite() {
            Dist::new(self.hops)
        } else {
            Dist::INF
        }
    }

    /// One more edge of perturbation `r`.
    pub fn step(self, r: u128) -> PLen {
        if self.is_finite() {
            PLen::new(self.hops + 1, self.frac + r)
        } else {
            PLen::INF
        }
    }
}

impl Add for PLen {
    type Output = PLen;
    fn add(self, rhs: PLen) -> PLen {
        if self.is_finite() && rhs.is_finite() {
            PLen::new(self.hops + rhs.hops, self.frac + rhs.frac)
        } else {
            PLen::INF
        }
    }
}

impl Ord for PLen {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.hops, self.frac).cmp(&(other.hops, other.frac))
    }
}

impl PartialOrd for PLen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PLen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "({}, {})", self.hops, self.frac)
        } else {
            f.write_str("INF")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_propagates() {
        assert_eq!(Dist::INF + Dist::new(3), Dist::INF);
        assert_eq!(Dist::new(3) + Dist::INF, Dist::INF);
        assert_eq!(Dist::new(3) + 4, Dist::new(7));
        assert_eq!(Dist::INF.minus(2), Dist::INF);
        assert_eq!(PLen::INF + PLen::new(1, 1), PLen::INF);
        assert!(Dist::new(u32::MAX - 1) < Dist::INF);
    }

    #[test]
    fn plen_order_is_lexicographic() {
        assert!(PLen::new(1, 1000) < PLen::new(2, 0));
        assert!(PLen::new(2, 5) < PLen::new(2, 6));
        assert!(PLen::new(7, 0) < PLen::INF);
        let a = PLen::new(2, 5) + PLen::new(1, 3);
        assert_eq!(a, PLen::new(3, 8));
    }
}
