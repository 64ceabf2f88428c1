//! Elementary densities for `p = 2`, `p = 3`, `p = 3/2`, and the measure
//! model used by certification, moments and witness search.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::binom::{binom_general, Params};
use crate::classify::classify_binomial;
use crate::error::{Error, Result};
use crate::exact::{ExactRational, Scalar};
use crate::gamma::ln_gamma;
use crate::mellin::{reflect, Density, MeasureModel, MomentFn};
use crate::quadrature::Abscissa;
use crate::slater::{build_slater, SlaterExpansion};

/// Densities with a closed form. `V32` carries `2r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ClosedFormId {
    V2(f64),
    V3(u8),
    V32(i8),
    A091527,
    A061162,
}

impl ClosedFormId {
    /// Closed form of `V_{p,r}`, if there is one.
    pub fn for_params(params: &Params) -> Option<Self> {
        let r = params.r.as_exact();
        let is = |n: i64, d: i64| params.p == ExactRational::new(n, d);
        if is(2, 1) {
            let rf = params.r_f64();
            return (rf >= -1.0 && rf <= 1.0).then_some(Self::V2(rf));
        }
        let r = r?;
        let twice = r * &ExactRational::from_integer(2);
        if !twice.is_integer() {
            return None;
        }
        let twice = twice.to_f64() as i64;
        if is(3, 1) && matches!(twice, 0 | 2 | 4) {
            return Some(Self::V3((twice / 2) as u8));
        }
        if is(3, 2) && (-1..=1).contains(&twice) {
            return Some(Self::V32(twice as i8));
        }
        None
    }

    pub fn support_upper(&self) -> f64 {
        match self {
            Self::V2(_) => 4.0,
            Self::V3(_) => 6.75,
            Self::V32(_) => 27f64.sqrt() / 2.0,
            Self::A091527 => 6.0 * 3f64.sqrt(),
            Self::A061162 => 108.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::V2(r) => r.is_finite(),
            Self::V3(r) => r <= 2,
            Self::V32(t) => (-1..=1).contains(&t),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("no closed form for {self}")))
        }
    }
}

impl fmt::Display for ClosedFormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::V2(r) => write!(f, "V(2,{r})"),
            Self::V3(r) => write!(f, "V(3,{r})"),
            Self::V32(t) => write!(f, "V(3/2,{})", *t as f64 / 2.0),
            Self::A091527 => write!(f, "A091527"),
            Self::A061162 => write!(f, "A061162"),
        }
    }
}

/// Closed-form density at `x` in `(0, support_upper)`.
pub fn eval_closed(id: ClosedFormId, x: f64) -> Result<f64> {
    eval_closed_at(id, x, id.support_upper() - x)
}

/// As [`eval_closed`], with `gap = upper - x` supplied without cancellation.
pub fn eval_closed_at(id: ClosedFormId, x: f64, gap: f64) -> Result<f64> {
    id.validate()?;
    let c = id.support_upper();
    if !(x > 0.0 && gap > 0.0 && x <= c) {
        return Err(Error::Domain(format!("x = {x} outside (0, {c}) for {id}")));
    }
    Ok(match id {
        ClosedFormId::V2(r) => {
            // arccos(sqrt(x/4)) = arcsin(sqrt(gap/4))
            let theta = if gap < 2.0 { (gap / 4.0).sqrt().asin() } else { (x / 4.0).sqrt().acos() };
            (r * theta).cos() / (PI * x.powf((1.0 - r) / 2.0) * gap.sqrt())
        }
        ClosedFormId::V3(r) => {
            let ln_z = (4.0 * x / 27.0).ln();
            let zp = |a: f64| (a * ln_z).exp();
            let w = 4.0 * gap / 27.0;
            let t = 1.0 + w.sqrt();
            let root = (3.0 * w).sqrt();
            match r {
                0 => (t.cbrt() * zp(-2.0 / 3.0) + zp(-1.0 / 3.0) / t.cbrt()) / (9.0 * PI * root),
                1 => (t.powf(2.0 / 3.0) * zp(-1.0 / 3.0) + zp(1.0 / 3.0) / t.powf(2.0 / 3.0)) / (6.0 * PI * root),
                _ => (t.cbrt() * zp(1.0 / 3.0) + zp(2.0 / 3.0) / t.cbrt()) / (4.0 * PI * root),
            }
        }
        ClosedFormId::V32(twice) => {
            // z = 4x^2/27 in logs: x^2 underflows next to 0
            let ln_z = (4.0f64 / 27.0).ln() + 2.0 * x.ln();
            let zp = |a: f64| (a * ln_z).exp();
            let w = gap * (2.0 * c - gap) / (c * c);
            let s = w.sqrt();
            let t = 1.0 + s;
            match twice {
                -1 => {
                    (t.powf(2.0 / 3.0) * zp(-1.0 / 3.0) + zp(1.0 / 3.0) / t.powf(2.0 / 3.0)) / (3.0 * PI * (3.0 * w).sqrt())
                }
                0 => (t.cbrt() * zp(-1.0 / 6.0) + zp(1.0 / 6.0) / t.cbrt()) / (3.0 * PI * s),
                _ => (t.cbrt() * zp(1.0 / 3.0) + zp(2.0 / 3.0) / t.cbrt()) / (PI * (3.0 * w).sqrt()),
            }
        }
        ClosedFormId::A091527 => eval_closed_at(ClosedFormId::V32(-1), x / 4.0, gap / 4.0)? / 4.0,
        ClosedFormId::A061162 => {
            let y = x.sqrt();
            let inner_gap = gap / (6.0 * 3f64.sqrt() + y);
            eval_closed_at(ClosedFormId::A091527, y, inner_gap)? / (2.0 * y)
        }
    })
}

/// Slater sum as a [`Density`].
pub struct SlaterDensity(pub SlaterExpansion);

impl Density for SlaterDensity {
    fn support(&self) -> (f64, f64) {
        (0.0, self.0.domain_upper)
    }

    fn eval_at(&self, at: &Abscissa) -> Result<f64> {
        Ok(self.0.eval_with_gap(at.from_lower, at.from_upper)?.value)
    }
}

struct ClosedDensity(ClosedFormId);

impl Density for ClosedDensity {
    fn support(&self) -> (f64, f64) {
        (0.0, self.0.support_upper())
    }

    fn eval_at(&self, at: &Abscissa) -> Result<f64> {
        eval_closed_at(self.0, at.from_lower, at.from_upper)
    }
}

struct Scaled {
    inner: Arc<dyn Density>,
    factor: f64,
}

impl Density for Scaled {
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn eval_at(&self, at: &Abscissa) -> Result<f64> {
        Ok(self.factor * self.inner.eval_at(at)?)
    }
}

/// `Beta(1+r, -r)` on `[0, 1]`, the measure `ν(1, r)` for `-1 < r < 0`.
struct UnitBeta {
    r: f64,
    log_norm: f64,
}

impl Density for UnitBeta {
    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn eval_at(&self, at: &Abscissa) -> Result<f64> {
        let r = self.r;
        Ok((r * at.from_lower.ln() - (1.0 + r) * at.from_upper.ln() - self.log_norm).exp())
    }
}

/// Density of `ν(p, r)` for `p > 1`, `-1 < r <= p - 1`.
fn absolutely_continuous(params: &Params) -> Result<Arc<dyn Density>> {
    Ok(match ClosedFormId::for_params(params) {
        Some(id) => Arc::new(ClosedDensity(id)),
        None => Arc::new(SlaterDensity(build_slater(params)?)),
    })
}

/// `V_{p,r}` for rational `p > 1` and any real `r`, inside the region or not.
///
/// Uses the closed form when one exists (all `r` for `p = 2`), else the
/// Slater sum.
pub fn density_v(params: &Params) -> Result<Arc<dyn Density>> {
    params.k_l_above_one()?;
    if params.p == ExactRational::from_integer(2) {
        let id = ClosedFormId::V2(params.r_f64());
        id.validate()?;
        return Ok(Arc::new(ClosedDensity(id)));
    }
    absolutely_continuous(params)
}

/// The measure `ν(p, r)` with moments `C(np+r, n)`.
///
/// Covers the whole region for rational `p`: `p > 1` directly (with the atom
/// `δ_0/p` at `r = -1`), `p < 0` by reflection of `ν(1-p, -1-r)`, and the
/// beta laws at `p ∈ {0, 1}`.
pub fn measure_model(params: &Params) -> Result<MeasureModel> {
    let verdict = classify_binomial(&params.p_scalar(), &params.r);
    if !verdict.positive_definite {
        return Err(Error::Region { p: params.p.to_string(), r: params.r.to_string() });
    }
    let ps = params.p_scalar();
    let rs = params.r.clone();
    let moments: MomentFn = Arc::new(move |n| binom_general(&ps, &rs, n));
    let label = format!("nu({params})");
    let one = ExactRational::from_integer(1);
    let p = &params.p;
    let r = params.r_f64();

    if p > &one {
        if params.r.is_exact() && params.r == Scalar::int(-1) {
            let base = absolutely_continuous(&Params::new(p.clone(), Scalar::int(0)))?;
            let weight = ((p - &one) / p.clone()).to_f64();
            let density: Arc<dyn Density> = Arc::new(Scaled { inner: base, factor: weight });
            return Ok(MeasureModel::new(label, p.recip().to_f64(), Some(density), moments));
        }
        return Ok(MeasureModel::new(label, 0.0, Some(absolutely_continuous(params)?), moments));
    }
    if p.is_negative() {
        let mirror = Params::new(&one - p, &Scalar::int(-1) - &params.r);
        let mut m = reflect(&measure_model(&mirror)?);
        m.label = label;
        return Ok(m);
    }
    if p.is_zero() {
        // ν(0, r) is the reflection of ν(1, -1-r).
        let mut m = reflect(&measure_model(&Params::new(one, &Scalar::int(-1) - &params.r))?);
        m.label = label;
        return Ok(m);
    }
    // p = 1, -1 <= r <= 0
    if r == -1.0 {
        return Ok(MeasureModel::new(label, 1.0, None, moments));
    }
    if r == 0.0 {
        return Err(Error::Domain("nu(1,0) is the point mass at 1".into()));
    }
    let log_norm = ln_gamma(1.0 + r).0 + ln_gamma(-r).0;
    let density: Arc<dyn Density> = Arc::new(UnitBeta { r, log_norm });
    Ok(MeasureModel::new(label, 0.0, Some(density), moments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::Execution;
    use crate::quadrature::{integrate_many, QuadratureMethod};

    fn params(pn: i64, pd: i64, rn: i64, rd: i64) -> Params {
        Params::ratio(pn, pd, rn, rd)
    }

    fn moments_of(m: &MeasureModel, count: usize) -> Vec<f64> {
        let d = m.density.clone().unwrap();
        let (lo, hi) = d.support();
        let tols = vec![1e-11; count];
        let res = integrate_many(
            |t| {
                let v = d.eval_at(t)?;
                Ok((0..count).map(|n| v * t.x.powi(n as i32)).collect())
            },
            lo,
            hi,
            &tols,
            QuadratureMethod::DoubleExponential,
            8,
            Execution::Sequential,
        )
        .unwrap();
        res.values.iter().enumerate().map(|(n, v)| if n == 0 { v + m.atom_at_zero } else { *v }).collect()
    }

    #[test]
    fn arcsine_value() {
        let v = eval_closed(ClosedFormId::V2(0.0), 2.0).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_have_the_right_moments() {
        for (p, id) in [
            (params(3, 1, 0, 1), ClosedFormId::V3(0)),
            (params(3, 1, 1, 1), ClosedFormId::V3(1)),
            (params(3, 1, 2, 1), ClosedFormId::V3(2)),
            (params(3, 2, -1, 2), ClosedFormId::V32(-1)),
            (params(3, 2, 0, 1), ClosedFormId::V32(0)),
            (params(3, 2, 1, 2), ClosedFormId::V32(1)),
            (params(2, 1, 1, 3), ClosedFormId::V2(1.0 / 3.0)),
        ] {
            assert_eq!(ClosedFormId::for_params(&p), Some(id));
            let m = measure_model(&p).unwrap();
            let got = moments_of(&m, 6);
            for (n, g) in got.iter().enumerate() {
                let want = m.moment(n).to_f64();
                assert!((g - want).abs() < 1e-8 * want.max(1.0), "{id} n={n}: {g} vs {want}");
            }
        }
    }

    #[test]
    fn oeis_densities() {
        let a091527 = [1.0, 4.0, 30.0, 256.0, 2310.0];
        for (id, seq) in [
            (ClosedFormId::A091527, a091527.to_vec()),
            (ClosedFormId::A061162, vec![1.0, 30.0, 2310.0]),
        ] {
            let c = id.support_upper();
            let res = integrate_many(
                |t| {
                    let v = eval_closed_at(id, t.x, t.from_upper)?;
                    Ok((0..seq.len()).map(|n| v * t.x.powi(n as i32)).collect())
                },
                0.0,
                c,
                &vec![1e-9; seq.len()],
                QuadratureMethod::DoubleExponential,
                8,
                Execution::Sequential,
            )
            .unwrap();
            for (g, w) in res.values.iter().zip(&seq) {
                assert!((g - w).abs() < 1e-8 * w, "{id}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn atom_models() {
        let m = measure_model(&params(3, 1, -1, 1)).unwrap();
        assert!((m.atom_at_zero - 1.0 / 3.0).abs() < 1e-16);
        let got = moments_of(&m, 5);
        for (n, g) in got.iter().enumerate() {
            let want = m.moment(n).to_f64();
            assert!((g - want).abs() < 1e-8 * want.max(1.0), "n={n}: {g} vs {want}");
        }
    }

    #[test]
    fn reflected_and_unit_models() {
        let m = measure_model(&params(-1, 1, -1, 2)).unwrap();
        assert_eq!((m.lower, m.upper), (-4.0, 0.0));
        assert_eq!(m.moment(1), Scalar::ratio(-3, 2));
        let got = moments_of(&m, 4);
        for (n, g) in got.iter().enumerate() {
            let want = m.moment(n).to_f64();
            assert!((g - want).abs() < 1e-8 * want.abs().max(1.0), "n={n}: {g} vs {want}");
        }
        let u = measure_model(&params(1, 1, -1, 3)).unwrap();
        let got = moments_of(&u, 4);
        for (n, g) in got.iter().enumerate() {
            assert!((g - u.moment(n).to_f64()).abs() < 1e-8);
        }
        assert!(measure_model(&params(1, 1, 0, 1)).is_err());
        assert!(measure_model(&params(2, 1, 2, 1)).is_err());
    }

    #[test]
    fn sign_change_outside_region() {
        let id = ClosedFormId::V2(1.5);
        assert!(eval_closed(id, 3.9).unwrap() > 0.0);
        assert!(eval_closed(id, 0.1).unwrap() < 0.0);
        assert_eq!(ClosedFormId::for_params(&Params::new(ExactRational::from_integer(2), Scalar::Float(1.5))), None);
        for r in [-1.0, -0.5, 0.0, 0.7, 1.0] {
            assert!((1..400).all(|i| eval_closed(ClosedFormId::V2(r), i as f64 / 100.0).unwrap() >= 0.0));
        }
    }

    #[test]
    fn scaling_relation() {
        // V_{2,0}(sqrt x) / (2 sqrt x) = V_{2,-1/2}(x/4) / 4
        for x in [0.1, 1.0, 5.0, 15.9] {
            let lhs = eval_closed(ClosedFormId::V2(0.0), f64::sqrt(x)).unwrap() / (2.0 * x.sqrt());
            let rhs = eval_closed(ClosedFormId::V2(-0.5), x / 4.0).unwrap() / 4.0;
            assert!((lhs - rhs).abs() < 1e-14 * lhs, "{x}");
        }
    }

    #[test]
    fn raw_densities_outside_the_region() {
        // p = 2 closed form against the Slater sum, for r beyond the region
        for r in [(3, 2), (-3, 2), (5, 4)] {
            let params = params(2, 1, r.0, r.1);
            let closed = density_v(&params).unwrap();
            let slater = build_slater(&params).unwrap();
            for x in [0.1, 1.0, 2.5, 3.9] {
                let (a, b) = (closed.eval(x).unwrap(), slater.eval(x).unwrap());
                assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "r={r:?} x={x}: {a} vs {b}");
            }
        }
        // V_{p,-1} is the continuous part of ν(p,-1) up to the factor (p-1)/p
        let v = density_v(&params(3, 2, -1, 1)).unwrap();
        let v0 = density_v(&params(3, 2, 0, 1)).unwrap();
        for x in [0.3, 1.2, 2.5] {
            let (a, b) = (v.eval(x).unwrap(), v0.eval(x).unwrap() / 3.0);
            assert!((a - b).abs() < 1e-11, "x={x}: {a} vs {b}");
        }
        // r = 1 for p = 3/2 goes negative somewhere
        let v = density_v(&params(3, 2, 1, 1)).unwrap();
        let c = 27f64.sqrt() / 2.0;
        assert!((1..200).any(|i| v.eval(c * i as f64 / 200.0).unwrap() < 0.0));
    }
}
