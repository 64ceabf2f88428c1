//! Truncated formal power series.
//!
//! A [`TruncatedSeries`] of order `N` holds the coefficients of `z^0..z^N`;
//! every operation is exact modulo `z^(N+1)` when the coefficient type is.
//! Binary operations between series of different orders truncate to the
//! smaller order.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ExactRational, Scalar};

/// Coefficient field for series arithmetic.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(n: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// `self^w`, used for the constant term of a series power.
    fn pow_const(&self, w: &Self) -> Result<Self>;

    /// Equality, relaxed to a relative tolerance for inexact values.
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool;

    fn is_exact(&self) -> bool;
}

fn float_close(a: f64, b: f64, rel_tol: f64) -> bool {
    a == b || (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
}

impl Coeff for ExactRational {
    fn from_int(n: i64) -> Self {
        ExactRational::from_integer(n)
    }
    fn to_f64(&self) -> f64 {
        ExactRational::to_f64(self)
    }
    fn pow_const(&self, w: &Self) -> Result<Self> {
        self.try_pow(w)
            .ok_or_else(|| Error::Inexact(format!("({self})^({w})")))
    }
    fn approx_eq(&self, other: &Self, _: f64) -> bool {
        self == other
    }
    fn is_exact(&self) -> bool {
        true
    }
}

impl Coeff for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pow_const(&self, w: &Self) -> Result<Self> {
        Ok(self.powf(*w))
    }
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        float_close(*self, *other, rel_tol)
    }
    fn is_exact(&self) -> bool {
        false
    }
}

impl Coeff for Scalar {
    fn from_int(n: i64) -> Self {
        Scalar::int(n)
    }
    fn to_f64(&self) -> f64 {
        Scalar::to_f64(self)
    }
    fn pow_const(&self, w: &Self) -> Result<Self> {
        match (self, w) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.pow_const(b).map(Scalar::Exact),
            _ => Ok(Scalar::Float(self.to_f64().powf(w.to_f64()))),
        }
    }
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => float_close(self.to_f64(), other.to_f64(), rel_tol),
        }
    }
    fn is_exact(&self) -> bool {
        Scalar::is_exact(self)
    }
}

/// Coefficients `c_0..c_N` of a power series known modulo `z^(N+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Serialize> Serialize for TruncatedSeries<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TruncatedSeries", 2)?;
        st.serialize_field("order", &(self.coeffs.len() - 1))?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.end()
    }
}

impl<T: Coeff> TruncatedSeries<T> {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> T) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| T::zero())
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `z` (or `0` at order 0).
    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i| if i == 1 { T::one() } else { T::zero() })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_fn(order, |i| self.coeff(i))
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> TruncatedSeries<U> {
        TruncatedSeries::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self::from_fn(n, |i| self.coeffs[i].clone() + other.coeffs[i].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self::from_fn(n, |i| self.coeffs[i].clone() - other.coeffs[i].clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn add_constant(&self, c: &T) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = s.coeffs[0].clone() + c.clone();
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![T::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Multiplicative inverse; needs `c_0 != 0`.
    pub fn recip(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = T::one() / c0.clone();
        let mut out: Vec<T> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = T::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    acc = acc + self.coeffs[i].clone() * out[n - i].clone();
                }
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(Self::new(out))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Derivative, known to order `N - 1`.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |i| {
            self.coeffs[i + 1].clone() * T::from_int(i as i64 + 1)
        })
    }

    /// Antiderivative with zero constant term, order `N + 1`.
    pub fn integral(&self) -> Self {
        Self::from_fn(self.order() + 1, |i| {
            if i == 0 {
                T::zero()
            } else {
                self.coeffs[i - 1].clone() / T::from_int(i as i64)
            }
        })
    }

    /// `f(z)/z` for `f(0) = 0`, order `N - 1`.
    pub fn div_z(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        Ok(Self::from_fn(self.order() - 1, |i| self.coeffs[i + 1].clone()))
    }

    /// `z f(z)`, order `N + 1`.
    pub fn mul_z(&self) -> Self {
        Self::from_fn(self.order() + 1, |i| if i == 0 { T::zero() } else { self.coeffs[i - 1].clone() })
    }

    /// `f(c z)`.
    pub fn scale_argument(&self, c: &T) -> Self {
        let mut pow = T::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.clone() * pow.clone());
            pow = pow * c.clone();
        }
        Self::new(out)
    }

    /// `self ∘ inner`; needs `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Self::constant(self.coeffs[n].clone(), n);
        for i in (0..n).rev() {
            acc = acc.mul(&inner).add_constant(&self.coeffs[i]);
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `f(g(z)) = z`; needs `f(0) = 0`,
    /// `f'(0) != 0`. Uses Lagrange inversion: `[z^n] g = [w^(n-1)] (w/f(w))^n / n`.
    pub fn compositional_inverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.order();
        if n == 0 {
            return Ok(Self::zero(0));
        }
        if self.coeffs[1].is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let h = self.div_z()?.recip()?;
        let mut out = vec![T::zero(); n + 1];
        let mut h_pow = Self::one(n - 1);
        let h = h.truncate(n - 1);
        for (m, slot) in out.iter_mut().enumerate().skip(1) {
            h_pow = h_pow.mul(&h);
            *slot = h_pow.coeffs[m - 1].clone() / T::from_int(m as i64);
        }
        Ok(Self::new(out))
    }

    /// `exp(f)`; needs `f(0) = 0`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out: Vec<T> = Vec::with_capacity(self.coeffs.len());
        out.push(T::one());
        for n in 1..self.coeffs.len() {
            let mut acc = T::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc = acc + T::from_int(k as i64) * self.coeffs[k].clone() * out[n - k].clone();
                }
            }
            out.push(acc / T::from_int(n as i64));
        }
        Ok(Self::new(out))
    }

    /// `log(f)`; needs `f(0) = 1`.
    pub fn log(&self) -> Result<Self> {
        if !(self.coeffs[0].clone() - T::one()).is_zero() {
            return Err(Error::Domain("series logarithm needs constant term 1".into()));
        }
        let n = self.order();
        if n == 0 {
            return Ok(Self::zero(0));
        }
        let ratio = self.derivative().div(&self.truncate(n - 1))?;
        Ok(ratio.integral())
    }

    /// `f^e` for an integer exponent by repeated squaring.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// `f^w` for any exponent, as `c_0^w exp(w log(f/c_0))`.
    pub fn pow(&self, w: &T) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let lead = c0.pow_const(w)?;
        let normalized = self.scale(&(T::one() / c0));
        Ok(normalized.log()?.scale(w).exp()?.scale(&lead))
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c.to_f64())
    }

    /// Coefficientwise comparison (exact for exact coefficients).
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        self.order() == other.order()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.approx_eq(b, rel_tol))
    }
}
