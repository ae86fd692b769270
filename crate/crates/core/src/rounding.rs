//! Geometric rounding to powers of `1 + eps`.
//!
//! Rounded values are kept as exponents, so comparisons between them never
//! touch floating point. `value` turns an exponent back into a number when
//! sums are needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dist, INF};

/// `Zero < Power(e) < Infinite`, and powers compare by exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rounded {
    Zero,
    Power(i32),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rounder {
    eps: f64,
    base: f64,
    ln_base: f64,
}

impl Rounder {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("rounding parameter {eps} not in (0,1)")));
        }
        let base = 1.0 + eps;
        Ok(Rounder { eps, base, ln_base: base.ln() })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Smallest `e` with `base^e >= x`, for `x > 0`.
    pub fn exponent(&self, x: f64) -> i32 {
        let mut e = (x.ln() / self.ln_base).ceil() as i32;
        while self.base.powi(e - 1) >= x {
            e -= 1;
        }
        while self.base.powi(e) < x {
            e += 1;
        }
        e
    }

    pub fn round(&self, d: Dist) -> Rounded {
        match d {
            0 => Rounded::Zero,
            INF => Rounded::Infinite,
            d => Rounded::Power(self.exponent(d as f64)),
        }
    }

    pub fn value(&self, r: Rounded) -> f64 {
        match r {
            Rounded::Zero => 0.0,
            Rounded::Power(e) => self.base.powi(e),
            Rounded::Infinite => f64::INFINITY,
        }
    }

    /// Rounds a real-valued sum, e.g. a heap minimum built from rounded parts.
    pub fn round_f64(&self, x: f64) -> Rounded {
        if x <= 0.0 {
            Rounded::Zero
        } else if x.is_infinite() {
            Rounded::Infinite
        } else {
            Rounded::Power(self.exponent(x))
        }
    }

    /// Number of distinct values a nondecreasing stream in `[1, bound]` can take.
    pub fn levels(&self, bound: f64) -> u64 {
        (bound.max(1.0).ln() / self.ln_base).ceil() as u64
    }
}

/// `(1+eps)^ceil(log_{1+eps} delta)`.
pub fn rounded(delta: f64, eps: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("cannot round {delta}")));
    }
    let r = Rounder::new(eps)?;
    Ok(r.value(r.round_f64(delta)))
}

/// Tracks one rounded quantity over a monotone stream and counts its changes.
#[derive(Debug, Clone)]
pub struct GeometricRounder {
    rounder: Rounder,
    current: Option<Rounded>,
    changes: u64,
}

impl GeometricRounder {
    pub fn new(eps: f64) -> Result<Self> {
        Ok(GeometricRounder { rounder: Rounder::new(eps)?, current: None, changes: 0 })
    }

    /// Feed a new raw value; returns true if the rounded value moved.
    pub fn observe(&mut self, d: Dist) -> bool {
        let r = self.rounder.round(d);
        match self.current {
            Some(c) if c == r => false,
            Some(_) => {
                self.current = Some(r);
                self.changes += 1;
                true
            }
            None => {
                self.current = Some(r);
                false
            }
        }
    }

    pub fn current(&self) -> Option<Rounded> {
        self.current
    }

    pub fn changes(&self) -> u64 {
        self.changes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_values() {
        assert_eq!(rounded(1.0, 0.3).unwrap(), 1.0);
        assert_eq!(rounded(1.5, 0.5).unwrap(), 1.5);
        assert_eq!(rounded(5.0, 0.5).unwrap(), 5.0625);
        assert!(rounded(0.0, 0.5).is_err());
        assert!(rounded(-2.0, 0.5).is_err());
        assert!(rounded(2.0, 1.0).is_err());
    }

    #[test]
    fn zero_and_infinity() {
        let r = Rounder::new(0.3).unwrap();
        assert_eq!(r.round(0), Rounded::Zero);
        assert_eq!(r.round(INF), Rounded::Infinite);
        assert!(Rounded::Zero < r.round(1));
        assert!(r.round(1_000_000) < Rounded::Infinite);
    }

    #[test]
    fn tracker_counts_changes() {
        let mut t = GeometricRounder::new(0.5).unwrap();
        for d in [1, 1, 2, 2, 3, 5, 5, 6] {
            t.observe(d);
        }
        // 1 -> 2.25 -> 3.375 -> 5.0625 -> 7.59
        assert_eq!(t.changes(), 4);
    }

    proptest! {
        #[test]
        fn within_factor(d in 1u64..10_000_000, eps in 0.01f64..0.99) {
            let r = Rounder::new(eps).unwrap();
            let v = r.value(r.round(d));
            prop_assert!(v >= d as f64);
            prop_assert!(v <= (1.0 + eps) * d as f64 * (1.0 + 1e-12));
        }

        #[test]
        fn monotone_and_idempotent(a in 1u64..1_000_000, b in 1u64..1_000_000, eps in 0.01f64..0.99) {
            let r = Rounder::new(eps).unwrap();
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(r.round(lo) <= r.round(hi));
            let once = r.value(r.round(a));
            prop_assert_eq!(r.round_f64(once), r.round(a));
        }

        #[test]
        fn change_count_bounded(mut xs in proptest::collection::vec(1u64..4096, 1..200)) {
            xs.sort_unstable();
            let eps = 0.3;
            let mut t = GeometricRounder::new(eps).unwrap();
            for &x in &xs {
                t.observe(x);
            }
            let bound = Rounder::new(eps).unwrap().levels(4096.0) + 1;
            prop_assert!(t.changes() < bound);
        }
    }
}
