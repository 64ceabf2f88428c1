//! The density `V_{p,r}` for rational `p = k/l > 1` as a finite sum of
//! `kF(k-1)` hypergeometric functions, the Mellin symbol `psi_{p,r}`, and the
//! Raney density `W_{p,r}`.

use serde::Serialize;

use crate::binom::Params;
use crate::error::{Error, Result};
use crate::exact::{ExactRational, Scalar};
use crate::gamma::{gamma, ln_gamma, near_pole, rgamma};
use crate::hypergeom::pfq_with_gap;
use crate::parallel::Execution;
use crate::quadrature::{integrate, QuadratureMethod, QuadratureSpec};

/// Gamma-product parameters of `C(mp+r, m)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaQuotientSymbol {
    pub k: usize,
    pub l: usize,
    pub r: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Reordering of `alphas` with `betas[j] <= alphas_tilde[j]` in the region.
    pub alphas_tilde: Vec<f64>,
    /// Indices `j'_1 < ... < j'_l` (1-based) where `alphas_tilde` takes the values `i/l`.
    pub j_prime: Vec<usize>,
    pub scale: f64,
}

/// `j / k` style value: exact when `r` is exact.
fn affine(r: &Scalar, shift: i64, den: i64) -> Scalar {
    &(r + &Scalar::int(shift)) / &Scalar::int(den)
}

pub fn build_symbol(params: &Params) -> Result<GammaQuotientSymbol> {
    let (k, l) = params.k_l_above_one()?;
    let r = &params.r;
    let (ki, li) = (k as i64, l as i64);
    let alphas: Vec<f64> = (1..=ki)
        .map(|j| if j <= li { j as f64 / l as f64 } else { affine(r, j - li, ki - li).to_f64() })
        .collect();
    let betas: Vec<f64> = (1..=ki).map(|j| affine(r, j, ki).to_f64()).collect();

    // j'_i = floor(ik/l - r), exactly when r is exact.
    let j_prime: Vec<i64> = (1..=li)
        .map(|i| {
            let v = &Scalar::ratio(i * ki, li) - r;
            match v {
                Scalar::Exact(q) => num_traits::ToPrimitive::to_i64(&q.floor()).unwrap_or(i64::MAX),
                Scalar::Float(x) => x.floor() as i64,
            }
        })
        .collect();
    let mut alphas_tilde = Vec::with_capacity(k);
    for j in 1..=ki {
        let v = if let Some(pos) = j_prime.iter().position(|&jp| jp == j) {
            (pos + 1) as f64 / l as f64
        } else {
            // i = number of j'_i below j
            let i = j_prime.iter().filter(|&&jp| jp < j).count() as i64;
            affine(r, j - i, ki - li).to_f64()
        };
        alphas_tilde.push(v);
    }
    Ok(GammaQuotientSymbol {
        k,
        l,
        r: r.to_f64(),
        alphas,
        betas,
        alphas_tilde,
        j_prime: j_prime.iter().map(|&j| j.max(0) as usize).collect(),
        scale: params.c_f64()?,
    })
}

/// `psi_{p,r}(s) = Γ((s-1)p + r + 1) / (Γ(s) Γ((s-1)(p-1) + r + 1))`,
/// taking limits at removable singularities.
pub fn psi(params: &Params, sigma: f64) -> Result<f64> {
    let p = params.p_f64();
    let r = params.r_f64();
    let a = (sigma - 1.0) * p + r + 1.0;
    let b = (sigma - 1.0) * (p - 1.0) + r + 1.0;
    let Some(na) = near_pole(a) else {
        let (la, sa) = ln_gamma(a);
        let (ls, ss) = ln_gamma(sigma);
        let (lb, sb) = ln_gamma(b);
        if ls.is_infinite() || lb.is_infinite() {
            return Ok(0.0);
        }
        if la.abs() < 300.0 && ls.abs() < 300.0 && lb.abs() < 300.0 {
            return Ok(gamma(a)? * rgamma(sigma) * rgamma(b));
        }
        return Ok(sa * ss * sb * (la - ls - lb).exp());
    };
    // Γ(a + p e) ~ (-1)^N / (N! p e) near a = -N; 1/Γ(-M + e) ~ (-1)^M M! e.
    let n = -na;
    let residue = |m: f64| sign_of(m) * factorial(m);
    match (near_pole(sigma), near_pole(b)) {
        (Some(_), Some(_)) => Ok(0.0),
        (Some(ms), None) => Ok(residue(-ms) * sign_of(n) / (factorial(n) * p) * rgamma(b)),
        (None, Some(mb)) => Ok(residue(-mb) * (p - 1.0) * sign_of(n) / (factorial(n) * p) * rgamma(sigma)),
        (None, None) => Err(Error::Pole(sigma)),
    }
}

fn sign_of(m: f64) -> f64 {
    if (m as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(m: f64) -> f64 {
    gamma(m + 1.0).unwrap_or(f64::INFINITY)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlaterTerm {
    pub c_h: f64,
    pub a_vec: Vec<f64>,
    pub b_vec: Vec<f64>,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlaterExpansion {
    pub k: usize,
    pub l: usize,
    pub r: f64,
    pub gamma: f64,
    pub terms: Vec<SlaterTerm>,
    pub z_scale: f64,
    pub domain_upper: f64,
}

/// Whether `q` is a nonpositive integer, exactly when possible.
fn is_pole(exact: Option<ExactRational>, approx: f64) -> bool {
    match exact {
        Some(q) => q.is_integer() && !q.is_positive(),
        None => (approx - approx.round()).abs() < 1e-9 && approx.round() <= 0.0,
    }
}

pub fn build_slater(params: &Params) -> Result<SlaterExpansion> {
    let (k, l) = params.k_l_above_one()?;
    let (ki, li) = (k as i64, l as i64);
    let p = params.p_f64();
    let rs = &params.r;
    let r = rs.to_f64();
    let gamma_coef = l as f64 * (p - 1.0).powf(p - r - 1.0)
        / (p.powf(p - r - 0.5) * (2.0 * std::f64::consts::PI * (k - l) as f64).sqrt());

    let mut terms = Vec::with_capacity(k);
    for h in 1..=ki {
        let shift = affine(rs, h, ki); // (r+h)/k
        let mut num = 1.0;
        for j in (1..=ki).filter(|&j| j != h) {
            num *= gamma((j - h) as f64 / k as f64)?;
        }
        let mut den = 1.0;
        let mut den_pole = false;
        let mut a_vec = Vec::with_capacity(k);
        for j in 1..=ki {
            let (g_arg, a) = if j <= li {
                (&Scalar::ratio(j, li) - &shift, &shift - &Scalar::ratio(j - li, li))
            } else {
                let rj = affine(rs, j - li, ki - li);
                (&rj - &shift, &shift - &affine(rs, j - ki, ki - li))
            };
            if is_pole(g_arg.as_exact().cloned(), g_arg.to_f64()) {
                den_pole = true;
            } else {
                den *= rgamma(g_arg.to_f64());
            }
            a_vec.push(a.to_f64());
        }
        let c_h = if den_pole { 0.0 } else { num * den };
        let b_vec: Vec<f64> = (1..=ki).filter(|&j| j != h).map(|j| (ki + h - j) as f64 / k as f64).collect();
        terms.push(SlaterTerm { c_h, a_vec, b_vec, exponent: shift.to_f64() - 1.0 / l as f64 });
    }
    let c = params.c_f64()?;
    Ok(SlaterExpansion { k, l, r, gamma: gamma_coef, terms, z_scale: c.powi(l as i32), domain_upper: c })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityValue {
    pub value: f64,
    pub precision_loss: bool,
}

impl SlaterExpansion {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// `V(x)` for `0 < x < c(p)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_with_gap(x, self.domain_upper - x)?.value)
    }

    /// `V(x)` with `gap = c(p) - x` given separately, which keeps full
    /// accuracy next to the right endpoint.
    pub fn eval_with_gap(&self, x: f64, gap: f64) -> Result<DensityValue> {
        let c = self.domain_upper;
        if !(x > 0.0 && gap > 0.0 && x <= c) {
            return Err(Error::Domain(format!("x = {x} outside (0, {c})")));
        }
        let l = self.l as f64;
        let ln_ratio = (x / c).ln();
        let z = (l * ln_ratio).exp();
        let one_minus_z = -(l * (-gap / c).ln_1p()).exp_m1();
        let one_minus_z = if one_minus_z > 0.0 { one_minus_z } else { 1.0 - z };
        let mut sum = 0.0;
        let mut loss = false;
        for t in &self.terms {
            if t.c_h == 0.0 {
                continue;
            }
            let f = pfq_with_gap(&t.a_vec, &t.b_vec, z.min(1.0 - f64::EPSILON), one_minus_z)?;
            loss |= f.precision_loss;
            sum += t.c_h * f.value * (t.exponent * l * ln_ratio).exp();
        }
        Ok(DensityValue { value: self.gamma * sum, precision_loss: loss })
    }
}

/// `V_{p,r}(x)` through the Slater sum.
pub fn eval_v(expansion: &SlaterExpansion, x: f64) -> Result<f64> {
    expansion.eval(x)
}

/// Raney density `W_{p,r}(x) = c x^(c-1) ∫_x^{c(p)} V_{p,r-1}(y) y^(-c) dy`
/// with `c = r/(p-1)`, for `0 < r <= p`.
pub struct RaneyDensity {
    shifted: SlaterExpansion,
    c: f64,
    spec: QuadratureSpec,
}

impl RaneyDensity {
    pub fn new(params: &Params) -> Result<Self> {
        let r = params.r_f64();
        let p = params.p_f64();
        params.k_l_above_one()?;
        if !(r > 0.0 && r <= p) {
            return Err(Error::Region { p: params.p.to_string(), r: params.r.to_string() });
        }
        let shifted = build_slater(&Params::new(params.p.clone(), &params.r - &Scalar::int(1)))?;
        let spec = QuadratureSpec { method: QuadratureMethod::DoubleExponential, target_abs_tol: 1e-12, max_levels: 7 };
        Ok(Self { shifted, c: r / (p - 1.0), spec })
    }

    pub fn upper(&self) -> f64 {
        self.shifted.domain_upper
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let top = self.upper();
        if !(x > 0.0 && x < top) {
            return Err(Error::Domain(format!("x = {x} outside (0, {top})")));
        }
        let c = self.c;
        let v = &self.shifted;
        let res = integrate(
            |t| {
                let y = t.x;
                Ok(v.eval_with_gap(y, t.from_upper)?.value * y.powf(-c))
            },
            x,
            top,
            &self.spec,
            Execution::Sequential,
        )?;
        Ok(c * x.powf(c - 1.0) * res.value())
    }
}

pub fn raney_density_w(params: &Params, x: f64) -> Result<f64> {
    RaneyDensity::new(params)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(pn: i64, pd: i64, rn: i64, rd: i64) -> Params {
        Params::ratio(pn, pd, rn, rd)
    }

    #[test]
    fn symbol_three_halves() {
        let s = build_symbol(&params(3, 2, 0, 1)).unwrap();
        assert_eq!(s.j_prime, vec![1, 3]);
        assert_eq!(s.alphas_tilde, vec![0.5, 1.0, 1.0]);
        let b: Vec<f64> = s.betas.iter().map(|x| (x * 3.0).round() / 3.0).collect();
        assert_eq!(b, vec![1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let s = build_symbol(&params(2, 1, 0, 1)).unwrap();
        assert_eq!(s.alphas, vec![1.0, 1.0]);
        assert_eq!(s.betas, vec![0.5, 1.0]);
        assert!(build_symbol(&params(1, 1, 0, 1)).is_err());
    }

    #[test]
    fn psi_values() {
        assert!((psi(&params(2, 1, 0, 1), 3.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((psi(&params(2, 1, -1, 1), 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((psi(&params(3, 1, 1, 1), 2.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn vanishing_coefficients() {
        let e = build_slater(&params(3, 1, 0, 1)).unwrap();
        assert_eq!(e.terms[2].c_h, 0.0);
        let e = build_slater(&params(3, 1, 1, 1)).unwrap();
        assert_eq!(e.terms[1].c_h, 0.0);
        let e = build_slater(&params(3, 2, 0, 1)).unwrap();
        assert_eq!(e.terms[2].c_h, 0.0);
        assert_eq!(e.terms.len(), 3);
    }

    #[test]
    fn arcsine_value() {
        let e = build_slater(&params(2, 1, 0, 1)).unwrap();
        assert!((e.eval(2.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-14);
        for x in [1e-6f64, 0.3, 3.9, 4.0 - 1e-9] {
            let want = 1.0 / (PI * (x * (4.0 - x)).sqrt());
            let got = e.eval(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "x={x}: {got} vs {want}");
        }
        assert!(e.eval(0.0).is_err());
        assert!(e.eval(4.0).is_err());
    }

    #[test]
    fn marchenko_pastur_via_raney() {
        let w = raney_density_w(&params(2, 1, 1, 1), 2.0).unwrap();
        assert!((w - 1.0 / (2.0 * PI)).abs() < 1e-10, "{w}");
    }

    #[test]
    fn json_dump() {
        let js = build_slater(&params(3, 2, 0, 1)).unwrap().to_json();
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["terms"].as_array().unwrap().len(), 3);
        assert!(v["gamma"].as_f64().unwrap() > 0.0);
    }
}
