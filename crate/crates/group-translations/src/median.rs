//! Interval medians: the set of points minimizing total interval distance
//! to a collection of closed intervals. The minimizer set is itself a
//! closed interval whose endpoints are the lower and upper medians of the
//! multiset of all interval endpoints.

use num::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A closed interval `[lo, hi]` on the rational line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::Malformed(format!(
                "interval lower bound exceeds upper bound ({lo} > {hi})"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Scalar) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Nearest point of the interval to `x`.
    pub fn clamp(&self, x: &Scalar) -> Scalar {
        if x < &self.lo {
            self.lo.clone()
        } else if x > &self.hi {
            self.hi.clone()
        } else {
            x.clone()
        }
    }
}

/// Distance from a point to a closed interval: zero inside, otherwise the
/// gap to the nearer endpoint.
pub fn interval_distance(x: &Scalar, iv: &Interval) -> Scalar {
    if x > &iv.hi {
        x - &iv.hi
    } else if x < &iv.lo {
        &iv.lo - x
    } else {
        Scalar::zero()
    }
}

/// Total distance from `x` to all intervals.
pub fn total_distance(x: &Scalar, intervals: &[Interval]) -> Scalar {
    intervals.iter().map(|iv| interval_distance(x, iv)).sum()
}

// Below this size plain sorting beats selection.
const SORT_CUTOFF: usize = 32;

/// The interval median of a nonempty collection: `[x, y]` where `x` and
/// `y` are the lower and upper medians of the multiset of all `2k`
/// endpoints (duplicates counted).
pub fn interval_median(intervals: &[Interval]) -> Result<Interval> {
    if intervals.is_empty() {
        return Err(Error::Malformed("interval median of empty collection".into()));
    }
    let mut endpoints: Vec<Scalar> = Vec::with_capacity(2 * intervals.len());
    for iv in intervals {
        endpoints.push(iv.lo.clone());
        endpoints.push(iv.hi.clone());
    }
    let k = intervals.len();
    if endpoints.len() < SORT_CUTOFF {
        endpoints.sort();
        Ok(Interval {
            lo: endpoints[k - 1].clone(),
            hi: endpoints[k].clone(),
        })
    } else {
        // select_nth_unstable partitions, so the upper median is the
        // minimum of the tail after selecting the lower median.
        let (_, lo, tail) = endpoints.select_nth_unstable(k - 1);
        let lo = lo.clone();
        let hi = tail.iter().min().expect("2k >= 2 endpoints").clone();
        Ok(Interval { lo, hi })
    }
}
