use core::fmt;
use core::ops::{Add, Sub};
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::math;

/// Simulation clock in integer nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    const PER_SEC: u64 = 1_000_000_000;

    /// Rounds to the nearest nanosecond; negative and NaN inputs clamp to zero.
    pub fn from_secs(s: f64) -> Self {
        if !(s > 0.0) {
            return SimTime(0);
        }
        let ns = math::round(s * Self::PER_SEC as f64);
        if ns >= u64::MAX as f64 {
            SimTime(u64::MAX)
        } else {
            SimTime(ns as u64)
        }
    }

    pub fn secs(self) -> f64 {
        self.0 as f64 / Self::PER_SEC as f64
    }

    pub fn hours(self) -> f64 {
        self.0 as f64 / (3600.0 * Self::PER_SEC as f64)
    }

    /// Smallest multiple of `period` at or after `self`.
    pub fn ceil_to(self, period: SimTime) -> SimTime {
        if period.0 == 0 {
            return self;
        }
        SimTime(self.0.div_ceil(period.0).saturating_mul(period.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_add(rhs.0))
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

/// `seconds.nanoseconds`, always nine fractional digits.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:09}", self.0 / Self::PER_SEC, self.0 % Self::PER_SEC)
    }
}

impl FromStr for SimTime {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (whole, frac) = s.split_once('.').ok_or(())?;
        if frac.len() != 9 || !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        let w: u64 = whole.parse().map_err(|_| ())?;
        let n: u64 = frac.parse().map_err(|_| ())?;
        w.checked_mul(Self::PER_SEC).and_then(|v| v.checked_add(n)).map(SimTime).ok_or(())
    }
}
