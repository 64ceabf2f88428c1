//! Positive-definiteness region of the binomial and Raney sequences.
//!
//! Binomial `C(np+r, n)`: positive definite exactly when `p >= 1, -1 <= r <= p-1`
//! or `p <= 0, p-1 <= r <= 0`. Raney: `p >= 1, 0 <= r <= p`, or
//! `p <= 0, p-1 <= r <= 0`, or `r = 0`. All boundaries are closed.

use std::cmp::Ordering;

use serde::Serialize;

use crate::exact::{ExactRational, Scalar};

/// Largest denominator tried when reading float inputs as rationals.
pub const RECONSTRUCT_MAX_DEN: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `p >= 1` part of the region.
    MainBranch,
    /// `p <= 0` part, the point reflection of the main branch.
    ReflectedBranch,
    /// Raney sequences with `r = 0` (the point mass at 0) outside both branches.
    RaneyZero,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegionVerdict {
    pub positive_definite: bool,
    pub branch: Branch,
}

impl RegionVerdict {
    fn of(branch: Branch) -> Self {
        Self {
            positive_definite: branch != Branch::Outside,
            branch,
        }
    }
}

/// Closed-interval comparisons over either exact or float values.
enum Pair {
    Exact(ExactRational, ExactRational),
    Float(f64, f64),
}

impl Pair {
    fn new(p: &Scalar, r: &Scalar) -> Self {
        match (p.rationalize(RECONSTRUCT_MAX_DEN), r.rationalize(RECONSTRUCT_MAX_DEN)) {
            (Some(p), Some(r)) => Pair::Exact(p, r),
            _ => Pair::Float(p.to_f64(), r.to_f64()),
        }
    }

    /// Evaluates `lhs(p, r) <= rhs(p, r)` for affine expressions `a p + b r + c`.
    fn le(&self, lhs: (i64, i64, i64), rhs: (i64, i64, i64)) -> bool {
        let (a, b, c) = (lhs.0 - rhs.0, lhs.1 - rhs.1, lhs.2 - rhs.2);
        match self {
            Pair::Exact(p, r) => {
                let v = p * &ExactRational::from_integer(a)
                    + r * &ExactRational::from_integer(b)
                    + ExactRational::from_integer(c);
                v.cmp(&ExactRational::from_integer(0)) != Ordering::Greater
            }
            Pair::Float(p, r) => a as f64 * p + b as f64 * r + c as f64 <= 0.0,
        }
    }

    fn r_is_zero(&self) -> bool {
        match self {
            Pair::Exact(_, r) => r.is_zero(),
            Pair::Float(_, r) => *r == 0.0,
        }
    }
}

// Affine forms (coefficient of p, coefficient of r, constant).
const P: (i64, i64, i64) = (1, 0, 0);
const R: (i64, i64, i64) = (0, 1, 0);
const ZERO: (i64, i64, i64) = (0, 0, 0);
const ONE: (i64, i64, i64) = (0, 0, 1);
const MINUS_ONE: (i64, i64, i64) = (0, 0, -1);
const P_MINUS_ONE: (i64, i64, i64) = (1, 0, -1);

pub fn classify_binomial(p: &Scalar, r: &Scalar) -> RegionVerdict {
    let v = Pair::new(p, r);
    let branch = if v.le(ONE, P) && v.le(MINUS_ONE, R) && v.le(R, P_MINUS_ONE) {
        Branch::MainBranch
    } else if v.le(P, ZERO) && v.le(P_MINUS_ONE, R) && v.le(R, ZERO) {
        Branch::ReflectedBranch
    } else {
        Branch::Outside
    };
    RegionVerdict::of(branch)
}

pub fn classify_raney(p: &Scalar, r: &Scalar) -> RegionVerdict {
    let v = Pair::new(p, r);
    let branch = if v.le(ONE, P) && v.le(ZERO, R) && v.le(R, P) {
        Branch::MainBranch
    } else if v.le(P, ZERO) && v.le(P_MINUS_ONE, R) && v.le(R, ZERO) {
        Branch::ReflectedBranch
    } else if v.r_is_zero() {
        Branch::RaneyZero
    } else {
        Branch::Outside
    };
    RegionVerdict::of(branch)
}

/// `2p^2 - 2p - r - r^2`: the 2x2 Hankel determinant of the binomial
/// sequence up to a positive factor.
pub fn hankel2_binomial(p: &Scalar, r: &Scalar) -> Scalar {
    let two = Scalar::int(2);
    &(&(&two * &(p * p)) - &(&two * p)) - &(r + &(r * r))
}

/// `r (2p - r - 1)`: the same criterion for the Raney sequence.
pub fn hankel2_raney(p: &Scalar, r: &Scalar) -> Scalar {
    r * &(&(&(&Scalar::int(2) * p) - r) - &Scalar::int(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Scalar {
        Scalar::Float(x)
    }

    #[test]
    fn binomial_examples() {
        let v = classify_binomial(&f(2.0), &f(0.5));
        assert_eq!(v, RegionVerdict { positive_definite: true, branch: Branch::MainBranch });
        let v = classify_binomial(&f(-1.0), &f(-1.5));
        assert_eq!(v.branch, Branch::ReflectedBranch);
        let v = classify_binomial(&f(0.75), &f(-0.5));
        assert!(!v.positive_definite);
        assert_eq!(v.branch, Branch::Outside);
    }

    #[test]
    fn raney_examples() {
        assert!(classify_raney(&f(2.0), &f(1.0)).positive_definite);
        assert_eq!(classify_raney(&f(0.6), &f(0.0)).branch, Branch::RaneyZero);
        assert_eq!(classify_raney(&f(0.75), &f(0.4)).branch, Branch::Outside);
        assert!(hankel2_raney(&f(0.75), &f(0.4)).to_f64() >= 0.0);
    }

    #[test]
    fn boundaries_are_closed() {
        assert!(classify_binomial(&Scalar::int(1), &Scalar::int(0)).positive_definite);
        assert!(classify_binomial(&Scalar::int(1), &Scalar::int(-1)).positive_definite);
        assert!(classify_binomial(&Scalar::ratio(5, 2), &Scalar::ratio(3, 2)).positive_definite);
        assert!(!classify_binomial(&Scalar::ratio(5, 2), &Scalar::ratio(3_000_001, 2_000_000)).positive_definite);
        // 0.1 + 0.2 is not exactly 0.3 in binary, but reconstructs to 3/10.
        assert!(classify_binomial(&f(1.3), &f(0.1 + 0.2)).positive_definite);
        assert!(classify_binomial(&f(0.0), &f(-1.0)).positive_definite);
        assert!(classify_raney(&Scalar::int(3), &Scalar::int(3)).positive_definite);
    }

    #[test]
    fn hankel_values() {
        assert_eq!(hankel2_binomial(&Scalar::int(1), &Scalar::int(0)), Scalar::int(0));
        assert_eq!(hankel2_binomial(&Scalar::int(2), &Scalar::int(1)), Scalar::int(2));
        // 2(0.81) - 1.8 + 0.5 - 0.25
        let v = hankel2_binomial(&Scalar::ratio(9, 10), &Scalar::ratio(-1, 2));
        assert_eq!(v, Scalar::ratio(7, 100));
        let v = hankel2_binomial(&Scalar::ratio(3, 5), &Scalar::ratio(-1, 2));
        assert_eq!(v, Scalar::ratio(-23, 100));
    }
}
