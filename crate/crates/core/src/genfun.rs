//! Generating functions `B_p`, `D_{p,r}` and `B_p^r` as truncated series,
//! their elementary closed forms and coefficient identities.

use serde::Serialize;

use crate::binom::{binom_general, raney_general};
use crate::error::{Error, Result};
use crate::exact::{ExactRational, Scalar};
use crate::hypergeom::pfq;
use crate::series::{Coeff, TruncatedSeries};

pub type ScalarSeries = TruncatedSeries<Scalar>;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GenFunKind {
    /// `B_p(z) = sum C(np+1, n) z^n / (np+1)`.
    FussB,
    /// `D_{p,r}(z) = sum C(np+r, n) z^n`.
    BinomialD,
    /// `B_p(z)^r`, coefficients given by Lambert's formula.
    RaneyPower,
}

pub fn generating_series(kind: GenFunKind, p: &Scalar, r: &Scalar, order: usize) -> ScalarSeries {
    match kind {
        GenFunKind::FussB => fuss_series(p, order),
        GenFunKind::BinomialD => binomial_series(p, r, order),
        GenFunKind::RaneyPower => raney_power_series(p, r, order),
    }
}

pub fn fuss_series(p: &Scalar, order: usize) -> ScalarSeries {
    TruncatedSeries::from_fn(order, |n| raney_general(p, &Scalar::int(1), n))
}

pub fn binomial_series(p: &Scalar, r: &Scalar, order: usize) -> ScalarSeries {
    TruncatedSeries::from_fn(order, |n| binom_general(p, r, n))
}

pub fn raney_power_series(p: &Scalar, r: &Scalar, order: usize) -> ScalarSeries {
    TruncatedSeries::from_fn(order, |n| raney_general(p, r, n))
}

/// `D_{p,r} = B_p^(1+r) / (p - (p-1) B_p)`, built by series arithmetic.
pub fn d_series_from_b(p: &Scalar, r: &Scalar, order: usize) -> Result<ScalarSeries> {
    let b = fuss_series(p, order);
    let num = b.pow(&(r + &Scalar::int(1)))?;
    let den = b.scale(&-(p - &Scalar::int(1))).add_constant(p);
    num.div(&den)
}

/// Whether `b = 1 + z b^p` holds modulo `z^(N+1)`.
pub fn b_functional_equation_holds(b: &ScalarSeries, p: &Scalar) -> bool {
    if b.coeff(0) != Scalar::int(1) {
        return false;
    }
    let Ok(bp) = b.pow(p) else {
        return false;
    };
    let rhs = bp.mul_z().truncate(b.order()).add_constant(&Scalar::int(1));
    b.approx_eq(&rhs, 1e-12)
}

pub fn check_b_functional_equation(p: &Scalar, order: usize) -> bool {
    b_functional_equation_holds(&fuss_series(p, order), p)
}

/// `D_{p,-1} = 1/p + (p-1)/p D_{p,0}` and `D_{p,p-1} = (D_{p,0} - 1)/(p z)`.
pub fn check_prop21(p: &Scalar, order: usize) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::Domain("p = 0 has no such relations".into()));
    }
    let one = Scalar::int(1);
    let d0 = binomial_series(p, &Scalar::int(0), order + 1);
    let d_minus = binomial_series(p, &-&one, order);
    let d_top = binomial_series(p, &(p - &one), order);
    let first = d0
        .truncate(order)
        .scale(&(&(p - &one) / p))
        .add_constant(&p.recip());
    let second = d0.add_constant(&-&one).div_z()?.scale(&p.recip());
    Ok(d_minus.approx_eq(&first, 1e-12) && d_top.approx_eq(&second, 1e-12))
}

/// `D_{p,r}(z) = D_{1-p,-1-r}(-z)` modulo `z^(N+1)`.
pub fn reflection_check(p: &Scalar, r: &Scalar, order: usize) -> bool {
    let one = Scalar::int(1);
    let lhs = binomial_series(p, r, order);
    let rhs = binomial_series(&(&one - p), &(&-&one - r), order).scale_argument(&-&one);
    lhs.approx_eq(&rhs, 1e-12)
}

/// `B_{p-r}(z B_p(z)^r) = B_p(z)` modulo `z^(N+1)`.
pub fn check_composition_identity(p: &Scalar, r: &Scalar, order: usize) -> Result<bool> {
    let bp = fuss_series(p, order);
    let inner = bp.pow(r)?.mul_z().truncate(order);
    let outer = fuss_series(&(p - r), order);
    Ok(outer.compose(&inner)?.approx_eq(&bp, 1e-12))
}

fn poch(a: &Scalar, n: usize) -> Scalar {
    let mut acc = Scalar::int(1);
    for i in 0..n {
        acc = acc * (a + &Scalar::int(i as i64));
    }
    acc
}

/// `C(top, n)` as a falling factorial.
fn choose(top: &Scalar, n: usize) -> Scalar {
    binom_general(&Scalar::int(0), top, n)
}

fn factorial(n: usize) -> Scalar {
    (1..=n).fold(Scalar::int(1), |acc, i| acc * Scalar::int(i as i64))
}

/// `prod (a_i)_n / prod (b_j)_n * x^n / n!`.
fn hyper_term(a: &[Scalar], b: &[Scalar], x: &Scalar, n: usize) -> Result<Scalar> {
    let mut den = factorial(n);
    for bj in b {
        den = den * poch(bj, n);
    }
    if den.is_zero() {
        return Err(Error::Parameter("lower parameter hits a nonpositive integer".into()));
    }
    let mut num = x.powi(n as i32);
    for ai in a {
        num = num * poch(ai, n);
    }
    Ok(num / den)
}

fn thirds(r: &Scalar, shift: i64, den: i64) -> Scalar {
    &(r + &Scalar::int(shift)) / &Scalar::int(den)
}

/// Coefficients of `D_{3,r}` and `B_3^r` against their `3F2` term forms at `27/4`.
pub fn check_d3_hypergeometric(r: &Scalar, order: usize) -> Result<bool> {
    let x = Scalar::ratio(27, 4);
    let lower = [thirds(r, 1, 2), thirds(r, 2, 2)];
    let d_upper = [thirds(r, 1, 3), thirds(r, 2, 3), thirds(r, 3, 3)];
    let b_upper = [thirds(r, 0, 3), thirds(r, 1, 3), thirds(r, 2, 3)];
    let p = Scalar::int(3);
    for n in 0..=order {
        let d = hyper_term(&d_upper, &lower, &x, n)?;
        let b = hyper_term(&b_upper, &lower, &x, n)?;
        if !same(&d, &binom_general(&p, r, n)) || !same(&b, &raney_general(&p, r, n)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The even/odd split of `D_{3/2,r}`: the coefficient of `z^(2k)` is
/// `C(3k+r, 2k)`, that of `z^(2k+1)` is `C(3(2k+1)/2 + r, 2k+1)`, and both
/// match the two `3F2` term forms at `27 z^2 / 4`.
pub fn check_d32_split(r: &Scalar, order: usize) -> Result<bool> {
    let x = Scalar::ratio(27, 4);
    let d = binomial_series(&Scalar::ratio(3, 2), r, order);
    let two_r = r * &Scalar::int(2);
    let even_upper = [thirds(r, 1, 3), thirds(r, 2, 3), thirds(r, 3, 3)];
    let even_lower = [Scalar::ratio(1, 2), r + &Scalar::int(1)];
    let odd_upper = [thirds(&two_r, 5, 6), thirds(&two_r, 7, 6), thirds(&two_r, 9, 6)];
    let odd_lower = [Scalar::ratio(3, 2), thirds(&two_r, 3, 2)];
    let odd_lead = thirds(&two_r, 3, 2);
    for n in 0..=order {
        let k = n / 2;
        let (direct, term) = if n % 2 == 0 {
            let top = r + &Scalar::int(3 * k as i64);
            (choose(&top, n), hyper_term(&even_upper, &even_lower, &x, k)?)
        } else {
            let top = Scalar::ratio(3 * n as i64, 2) + r.clone();
            (choose(&top, n), odd_lead.clone() * hyper_term(&odd_upper, &odd_lower, &x, k)?)
        };
        if !same(&d.coeff(n), &direct) || !same(&d.coeff(n), &term) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The two `2F1` pieces of `B_{3/2}` reproduce its coefficients exactly.
pub fn check_b32_split(order: usize) -> Result<bool> {
    let x = Scalar::ratio(27, 4);
    let b = fuss_series(&Scalar::ratio(3, 2), order);
    for n in 0..=order {
        let k = n / 2;
        let v = if n % 2 == 0 {
            let t = hyper_term(&[Scalar::ratio(-2, 3), Scalar::ratio(-1, 3)], &[Scalar::ratio(-1, 2)], &x, k + 1)?;
            -(t / Scalar::int(3))
        } else {
            hyper_term(&[Scalar::ratio(5, 6), Scalar::ratio(7, 6)], &[Scalar::ratio(5, 2)], &x, k)?
        };
        if !same(&b.coeff(n), &v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest deviation between the two `2F1` functions in `B_{3/2}` and their
/// trigonometric forms over `u` in `grid` (all in `[0, 1)`).
pub fn b32_trig_residual(grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &u in grid {
        let beta = u.sqrt().asin() / 3.0;
        let f1 = pfq(&[-2.0 / 3.0, -1.0 / 3.0], &[-0.5], u)?.value;
        let g1 = 2.0 / 3.0 * (2.0 * beta).cos() + (4.0 * beta).cos() / 3.0;
        worst = worst.max((f1 - g1).abs());
        let f2 = pfq(&[5.0 / 6.0, 7.0 / 6.0], &[2.5], u)?.value;
        let g2 = if u == 0.0 {
            1.0
        } else {
            27.0 * beta.cos() * beta.sin().powi(3) / (3.0 * beta).sin().powi(3)
        };
        worst = worst.max((f2 - g2).abs());
    }
    Ok(worst)
}

fn same(a: &Scalar, b: &Scalar) -> bool {
    Coeff::approx_eq(a, b, 1e-12)
}

/// `D_{p,r}(z)` through its elementary closed form, for
/// `p` in `{0, 1, -1, 2, 1/2, 3, 3/2}`.
pub fn closed_form_d(p: &ExactRational, r: f64, z: f64) -> Result<f64> {
    let key = (p.numer().to_string(), p.denom().to_string());
    let radius = |rad: f64| -> Result<()> {
        if z.abs() < rad {
            Ok(())
        } else {
            Err(Error::Domain(format!("|z| = {} outside the disc |z| < {rad}", z.abs())))
        }
    };
    match (key.0.as_str(), key.1.as_str()) {
        ("0", "1") => {
            radius(1.0)?;
            Ok((1.0 + z).powf(r))
        }
        ("1", "1") => {
            radius(1.0)?;
            Ok((1.0 - z).powf(-1.0 - r))
        }
        ("-1", "1") => {
            radius(0.25)?;
            let s = (1.0 + 4.0 * z).sqrt();
            Ok(((1.0 + s) / 2.0).powf(1.0 + r) / s)
        }
        ("2", "1") => {
            radius(0.25)?;
            let s = (1.0 - 4.0 * z).sqrt();
            Ok((2.0 / (1.0 + s)).powf(r) / s)
        }
        ("1", "2") => {
            radius(2.0)?;
            let s = (4.0 + z * z).sqrt();
            let b = (2.0 + z * z + z * s) / 2.0;
            Ok(4.0 * b.powf(1.0 + r) / (4.0 + z * z + z * s))
        }
        ("3", "1") => {
            radius(4.0 / 27.0)?;
            let u = 27.0 * z / 4.0;
            // cos^2 and sin^2 of arcsin(sqrt(u))/3, continued to u < 0.
            let (c2, s2) = if u >= 0.0 {
                let a = u.sqrt().asin() / 3.0;
                (a.cos().powi(2), a.sin().powi(2))
            } else {
                let t = (-u).sqrt().asinh() / 3.0;
                (t.cosh().powi(2), -t.sinh().powi(2))
            };
            let b = 3.0 / (3.0 * c2 - s2);
            Ok(b.powf(r) / (c2 - 3.0 * s2))
        }
        ("3", "2") => {
            radius(2.0 / (3.0 * 3f64.sqrt()))?;
            let beta = (3.0 * z * 3f64.sqrt() / 2.0).asin() / 3.0;
            let (c, s) = (beta.cos(), beta.sin());
            let b = 3.0 / (3f64.sqrt() * c - s).powi(2);
            Ok(b.powf(r) / (c * (c - 3f64.sqrt() * s)))
        }
        _ => Err(Error::Domain(format!("no closed form for D with p = {p}"))),
    }
}

/// `1/c(p)`-style radius of convergence of `D_{p,r}`, for reporting.
pub fn convergence_radius(p: f64) -> f64 {
    if p == 0.0 {
        return f64::INFINITY;
    }
    if p == 1.0 {
        return 1.0;
    }
    let q = if p > 1.0 { p } else { 1.0 - p };
    ((q - 1.0) * (q - 1.0).ln() - q * q.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&n| Scalar::int(n)).collect()
    }

    #[test]
    fn fuss_examples() {
        assert_eq!(fuss_series(&Scalar::int(2), 4).into_coeffs(), ints(&[1, 1, 2, 5, 14]));
        assert_eq!(fuss_series(&Scalar::int(0), 4).into_coeffs(), ints(&[1, 1, 0, 0, 0]));
        assert_eq!(fuss_series(&Scalar::int(1), 4).into_coeffs(), ints(&[1; 5]));
    }

    #[test]
    fn binomial_series_examples() {
        assert_eq!(binomial_series(&Scalar::int(1), &Scalar::int(1), 4).into_coeffs(), ints(&[1, 2, 3, 4, 5]));
        assert_eq!(binomial_series(&Scalar::int(3), &Scalar::int(0), 3).into_coeffs(), ints(&[1, 3, 15, 84]));
        assert_eq!(binomial_series(&Scalar::int(2), &Scalar::int(0), 4).into_coeffs(), ints(&[1, 2, 6, 20, 70]));
    }

    #[test]
    fn d_from_b_examples() {
        let d = d_series_from_b(&Scalar::int(2), &Scalar::int(0), 4).unwrap();
        assert_eq!(d.into_coeffs(), ints(&[1, 2, 6, 20, 70]));
        let d = d_series_from_b(&Scalar::ratio(3, 2), &Scalar::ratio(-1, 2), 2).unwrap();
        assert_eq!(d.into_coeffs(), vec![Scalar::int(1), Scalar::int(1), Scalar::ratio(15, 8)]);
    }

    #[test]
    fn functional_equation() {
        assert!(check_b_functional_equation(&Scalar::int(2), 30));
        assert!(check_b_functional_equation(&Scalar::ratio(5, 3), 25));
        let b = fuss_series(&Scalar::ratio(5, 3), 25);
        let mut c = b.into_coeffs();
        c[3] = c[3].clone() + Scalar::ratio(1, 1_000_000);
        assert!(!b_functional_equation_holds(&TruncatedSeries::new(c), &Scalar::ratio(5, 3)));
    }

    #[test]
    fn prop21_cases() {
        for p in [Scalar::int(3), Scalar::ratio(3, 2), Scalar::ratio(7, 2)] {
            assert!(check_prop21(&p, 20).unwrap(), "p = {p}");
        }
        assert!(check_prop21(&Scalar::int(0), 5).is_err());
    }

    #[test]
    fn reflections() {
        assert!(reflection_check(&Scalar::int(2), &Scalar::int(0), 25));
        assert!(reflection_check(&Scalar::int(3), &Scalar::int(1), 25));
        assert!(reflection_check(&Scalar::ratio(1, 2), &Scalar::ratio(-1, 2), 25));
    }

    #[test]
    fn hypergeometric_coefficient_forms() {
        for r in [Scalar::int(0), Scalar::int(2), Scalar::ratio(1, 3), Scalar::ratio(-1, 2)] {
            assert!(check_d3_hypergeometric(&r, 20).unwrap(), "r = {r}");
            assert!(check_d32_split(&r, 20).unwrap(), "r = {r}");
        }
        assert!(check_b32_split(24).unwrap());
    }

    #[test]
    fn trig_forms_of_b32_pieces() {
        let grid: Vec<f64> = (0..99).map(|i| i as f64 / 100.0).collect();
        assert!(b32_trig_residual(&grid).unwrap() < 1e-10);
    }

    #[test]
    fn closed_forms_against_partial_sums() {
        let cases: [(ExactRational, f64); 7] = [
            (ExactRational::from_integer(0), 0.5),
            (ExactRational::from_integer(1), 0.5),
            (ExactRational::from_integer(-1), 0.125),
            (ExactRational::from_integer(2), 0.125),
            (ExactRational::new(1, 2), 1.0),
            (ExactRational::from_integer(3), 2.0 / 27.0),
            (ExactRational::new(3, 2), 1.0 / (3.0 * 3f64.sqrt())),
        ];
        for (p, half_radius) in cases {
            for r in [-1.0, -0.5, 0.0, 0.75, 2.0] {
                for z in [-half_radius, -half_radius / 3.0, half_radius / 2.0, half_radius] {
                    let series = binomial_series(&Scalar::Exact(p.clone()), &Scalar::Float(r), 120);
                    let want = series.eval(z);
                    let got = closed_form_d(&p, r, z).unwrap();
                    assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "p={p} r={r} z={z}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let two = ExactRational::from_integer(2);
        assert!((closed_form_d(&two, 0.0, 0.1).unwrap() - 1.2909944487).abs() < 1e-9);
        assert_eq!(closed_form_d(&ExactRational::from_integer(3), 0.0, 0.0).unwrap(), 1.0);
        let s = binomial_series(&Scalar::ratio(3, 2), &Scalar::ratio(-1, 2), 40).eval(0.05);
        assert!((closed_form_d(&ExactRational::new(3, 2), -0.5, 0.05).unwrap() - s).abs() < 1e-12);
        assert!(matches!(closed_form_d(&two, 0.0, 0.3), Err(Error::Domain(_))));
        assert!(matches!(closed_form_d(&ExactRational::from_integer(3), 0.0, 0.15), Err(Error::Domain(_))));
        assert!(closed_form_d(&ExactRational::from_integer(5), 0.0, 0.01).is_err());
    }

    fn exact_rational() -> impl Strategy<Value = Scalar> {
        (-12i64..=12, 1i64..=5).prop_map(|(n, d)| Scalar::ratio(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn d_from_b_matches_binomials(p in exact_rational(), r in exact_rational()) {
            let d = d_series_from_b(&p, &r, 30).unwrap();
            prop_assert_eq!(d, binomial_series(&p, &r, 30));
        }

        #[test]
        fn composition_identity(p in exact_rational(), r in exact_rational()) {
            prop_assert!(check_composition_identity(&p, &r, 14).unwrap());
        }

        #[test]
        fn binomial_relation(p in exact_rational(), n in 0usize..=30) {
            prop_assume!(!p.is_zero() && p != Scalar::int(1));
            let one = Scalar::int(1);
            let m = n + 1;
            let a = &binom_general(&p, &-&one, m) / &(&p - &one);
            let b = &binom_general(&p, &Scalar::int(0), m) / &p;
            let c = binom_general(&p, &(&p - &one), n);
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(&b, &c);
        }

        #[test]
        fn binomial_reflection(p in exact_rational(), r in exact_rational(), n in 0usize..=50) {
            let one = Scalar::int(1);
            let lhs = binom_general(&p, &r, n) * Scalar::int(if n % 2 == 0 { 1 } else { -1 });
            prop_assert_eq!(lhs, binom_general(&(&one - &p), &(&-&one - &r), n));
        }
    }
}
