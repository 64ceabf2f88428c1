//! Generalized binomial coefficients, Raney numbers and the support endpoint `c(p)`.

use std::fmt;

use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ExactRational, Scalar};

/// Parameters `(p, r)` of a binomial or Raney sequence.
///
/// `p` is always exact and stored reduced as `k/l` with `l >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params {
    pub p: ExactRational,
    pub r: Scalar,
}

impl Params {
    pub fn new(p: ExactRational, r: Scalar) -> Self {
        Self { p, r }
    }

    /// Shorthand for small rational parameters, `r` exact.
    pub fn ratio(pn: i64, pd: i64, rn: i64, rd: i64) -> Self {
        Self::new(ExactRational::new(pn, pd), Scalar::ratio(rn, rd))
    }

    /// Numerator `k` of `p = k/l`.
    pub fn k(&self) -> Result<i64> {
        self.p
            .numer()
            .to_i64()
            .ok_or_else(|| Error::Domain(format!("numerator of p = {} too large", self.p)))
    }

    /// Denominator `l` of `p = k/l`.
    pub fn l(&self) -> Result<i64> {
        self.p
            .denom()
            .to_i64()
            .ok_or_else(|| Error::Domain(format!("denominator of p = {} too large", self.p)))
    }

    /// `(k, l)` after checking `p > 1`.
    pub fn k_l_above_one(&self) -> Result<(usize, usize)> {
        if self.p <= ExactRational::one() {
            return Err(Error::Domain(format!("p = {} must exceed 1", self.p)));
        }
        let (k, l) = (self.k()?, self.l()?);
        if k > 4096 {
            return Err(Error::Domain(format!("numerator of p = {} too large for a density expansion", self.p)));
        }
        Ok((k as usize, l as usize))
    }

    pub fn p_scalar(&self) -> Scalar {
        Scalar::Exact(self.p.clone())
    }

    pub fn p_f64(&self) -> f64 {
        self.p.to_f64()
    }

    pub fn r_f64(&self) -> f64 {
        self.r.to_f64()
    }

    pub fn c(&self) -> Result<Scalar> {
        c_of_p(&self.p)
    }

    pub fn c_f64(&self) -> Result<f64> {
        Ok(self.c()?.to_f64())
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p = {}, r = {})", self.p, self.r)
    }
}

/// Right endpoint of the support, `c(p) = p^p (p-1)^(1-p)` for `p > 1`.
///
/// Exact for integer `p`.
pub fn c_of_p(p: &ExactRational) -> Result<Scalar> {
    if *p <= ExactRational::one() {
        return Err(Error::Domain(format!("c(p) needs p > 1, got {p}")));
    }
    if p.is_integer() {
        if let Some(pi) = p.numer().to_i32() {
            let q = ExactRational::from_integer(pi as i64);
            let qm1 = ExactRational::from_integer(pi as i64 - 1);
            return Ok(Scalar::Exact(q.powi(pi) / qm1.powi(pi - 1)));
        }
    }
    let pf = p.to_f64();
    Ok(Scalar::Float((pf * pf.ln() - (pf - 1.0) * (pf - 1.0).ln()).exp()))
}

/// Unnormalized double-double accumulator for long float products.
#[derive(Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from_quotient(x: f64, y: f64) -> Self {
        let hi = x / y;
        let lo = (-hi).mul_add(y, x) / y;
        Self { hi, lo }
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let err = self.hi.mul_add(other.hi, -p);
        let lo = err + self.hi * other.lo + self.lo * other.hi;
        let hi = p + lo;
        Self { hi, lo: lo - (hi - p) }
    }
}

/// `C(np + r, n) = (np+r)(np+r-1)...(np+r-n+1)/n!`.
///
/// Exact when both `p` and `r` are exact; otherwise the float product is
/// accumulated in double-double precision.
pub fn binom_general(p: &Scalar, r: &Scalar, n: usize) -> Scalar {
    match (p, r) {
        (Scalar::Exact(p), Scalar::Exact(r)) => {
            let a = p * &ExactRational::from_integer(n as i64) + r;
            let mut acc = ExactRational::one();
            for i in 0..n {
                let i = ExactRational::from_integer(i as i64);
                acc = acc * (&a - &i) / (i + ExactRational::one());
            }
            Scalar::Exact(acc)
        }
        _ => Scalar::Float(binom_float(p.to_f64(), r.to_f64(), n)),
    }
}

fn binom_float(p: f64, r: f64, n: usize) -> f64 {
    let a = p.mul_add(n as f64, r);
    let mut acc = DoubleDouble { hi: 1.0, lo: 0.0 };
    for i in 0..n {
        acc = acc.mul(DoubleDouble::from_quotient(a - i as f64, (i + 1) as f64));
    }
    acc.hi + acc.lo
}

/// Raney number `C(np + r, n) r/(np + r)`, in the polynomial form
/// `r (np+r-1)...(np+r-n+1)/n!` that stays defined when `np + r = 0`.
pub fn raney_general(p: &Scalar, r: &Scalar, n: usize) -> Scalar {
    if n == 0 {
        return Scalar::int(1);
    }
    match (p, r) {
        (Scalar::Exact(p), Scalar::Exact(r)) => {
            let a = p * &ExactRational::from_integer(n as i64) + r;
            let mut acc = r.clone() / ExactRational::from_integer(n as i64);
            for i in 1..n {
                let i = ExactRational::from_integer(i as i64);
                acc = acc * (&a - &i) / i;
            }
            Scalar::Exact(acc)
        }
        _ => {
            let (pf, rf) = (p.to_f64(), r.to_f64());
            let a = pf.mul_add(n as f64, rf);
            let mut acc = DoubleDouble::from_quotient(rf, n as f64);
            for i in 1..n {
                acc = acc.mul(DoubleDouble::from_quotient(a - i as f64, i as f64));
            }
            Scalar::Float(acc.hi + acc.lo)
        }
    }
}

/// The first `count` binomial moments `C(np + r, n)`, `n = 0..count`.
pub fn binomial_moments(p: &Scalar, r: &Scalar, count: usize) -> Vec<Scalar> {
    (0..count).map(|n| binom_general(p, r, n)).collect()
}

/// The first `count` Raney moments.
pub fn raney_moments(p: &Scalar, r: &Scalar, count: usize) -> Vec<Scalar> {
    (0..count).map(|n| raney_general(p, r, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    /// Falling-factorial oracle over exact rationals.
    fn falling_oracle(a: ExactRational, n: usize) -> ExactRational {
        let mut num = ExactRational::one();
        let mut den = ExactRational::one();
        for i in 0..n {
            num = num * (&a - &ExactRational::from_integer(i as i64));
            den = den * ExactRational::from_integer(i as i64 + 1);
        }
        num / den
    }

    #[test]
    fn c_of_p_values() {
        assert_eq!(c_of_p(&ExactRational::from_integer(2)).unwrap(), Scalar::int(4));
        assert_eq!(c_of_p(&ExactRational::from_integer(3)).unwrap(), q(27, 4));
        let c = c_of_p(&ExactRational::new(3, 2)).unwrap().to_f64();
        assert!((c - 27f64.sqrt() / 2.0).abs() < 1e-14);
        assert!((c - 2.598076211).abs() < 1e-9);
        assert!(c_of_p(&ExactRational::one()).is_err());
        assert!(c_of_p(&ExactRational::new(1, 2)).is_err());
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom_general(&q(3, 1), &q(0, 1), 2), Scalar::int(15));
        assert_eq!(
            binom_general(&q(3, 1), &q(0, 1), 2),
            Scalar::Exact(falling_oracle(ExactRational::from_integer(6), 2))
        );
        assert_eq!(binom_general(&q(7, 3), &q(-5, 4), 0), Scalar::int(1));
        assert_eq!(binom_general(&Scalar::Float(0.3), &Scalar::Float(9.1), 0), Scalar::Float(1.0));
        // C(2n - 1/2, n) 4^n = C(4n, 2n) at n = 1
        let v = binom_general(&q(2, 1), &q(-1, 2), 1) * Scalar::int(4);
        assert_eq!(v, Scalar::int(6));
        // A091527(2) = 30
        let v = binom_general(&q(3, 2), &q(-1, 2), 2) * Scalar::int(16);
        assert_eq!(v, Scalar::int(30));
    }

    #[test]
    fn float_path_matches_exact() {
        for n in [0usize, 1, 5, 40, 200] {
            let exact = binom_general(&q(7, 3), &q(-5, 4), n).to_f64();
            let float = binom_general(&Scalar::Float(7.0 / 3.0), &Scalar::Float(-1.25), n).to_f64();
            assert!(((exact - float) / exact).abs() < 1e-13, "n = {n}: {exact} vs {float}");
        }
    }

    #[test]
    fn raney_examples() {
        let cat: Vec<_> = raney_moments(&q(2, 1), &q(1, 1), 6);
        assert_eq!(cat, [1, 1, 2, 5, 14, 42].map(Scalar::int));
        // r = 0 gives the moments of the point mass at 0.
        assert_eq!(raney_moments(&q(3, 5), &q(0, 1), 4), [1, 0, 0, 0].map(Scalar::int));
        // np + r = 0 handled by the polynomial form: p = 1/2, r = -1, n = 2.
        let v = raney_general(&q(1, 2), &q(-1, 1), 2);
        assert_eq!(v, q(1, 2));
    }
}
