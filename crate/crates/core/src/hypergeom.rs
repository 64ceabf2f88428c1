//! Generalized hypergeometric series `pFq(a; b; z)` for real parameters and `|z| < 1`.
//!
//! Small `z` uses the defining series directly. Close to `z = 1` the
//! algebraic singularity `(1-z)^(s-1)`, with `s = sum(a) - sum(b) - 1`, is
//! peeled off with an asymptotic expansion of the coefficients, and the
//! (much faster converging) remainder series is summed instead.

use crate::error::{Error, Result};
use crate::gamma::{gamma, near_pole, rgamma};

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 1_000_000;

/// Above this `z` the singular part is subtracted when possible.
const ACCELERATE_ABOVE: f64 = 0.6;

/// Number of singular terms removed near `z = 1`.
const SINGULAR_TERMS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperValue {
    pub value: f64,
    pub terms: usize,
    /// Set when the term cap was hit or the tail could not be bounded.
    pub precision_loss: bool,
}

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_params(b: &[f64]) -> Result<()> {
    for &bj in b {
        if near_pole(bj).is_some() {
            return Err(Error::Parameter(format!("lower parameter {bj} is a nonpositive integer")));
        }
    }
    Ok(())
}

/// Ratio `T_(m+1)/T_m` of consecutive coefficients (without the `z^m`).
fn term_ratio(a: &[f64], b: &[f64], m: usize) -> f64 {
    let m = m as f64;
    let mut r = 1.0 / (m + 1.0);
    for &x in a {
        r *= x + m;
    }
    for &y in b {
        r /= y + m;
    }
    r
}

/// `pFq(a; b; z)` for `-1 < z < 1`.
pub fn pfq(a: &[f64], b: &[f64], z: f64) -> Result<HyperValue> {
    check_params(b)?;
    if !(z > -1.0 && z < 1.0) {
        return Err(Error::Domain(format!("hypergeometric argument {z} outside (-1, 1)")));
    }
    pfq_with_gap(a, b, z, 1.0 - z)
}

/// As [`pfq`], with `gap = 1 - z` supplied separately so it keeps full
/// relative precision near the endpoint.
pub fn pfq_with_gap(a: &[f64], b: &[f64], z: f64, gap: f64) -> Result<HyperValue> {
    check_params(b)?;
    if !(z > -1.0 && z < 1.0) || gap <= 0.0 {
        return Err(Error::Domain(format!("hypergeometric argument {z} outside (-1, 1)")));
    }
    if z == 0.0 {
        return Ok(HyperValue { value: 1.0, terms: 0, precision_loss: false });
    }
    if z > ACCELERATE_ABOVE && a.len() == b.len() + 1 {
        if let Some(v) = near_one(a, b, z, gap) {
            return Ok(v);
        }
    }
    Ok(direct(a, b, z))
}

/// Plain series summation. Stops after three consecutive terms below
/// `1e-16` of the partial sum.
pub fn direct(a: &[f64], b: &[f64], z: f64) -> HyperValue {
    let mut sum = Neumaier::default();
    sum.add(1.0);
    let mut term = 1.0;
    let mut quiet = 0;
    let mut m = 0;
    while m < MAX_TERMS {
        term *= term_ratio(a, b, m) * z;
        m += 1;
        if term == 0.0 {
            return HyperValue { value: sum.value(), terms: m, precision_loss: false };
        }
        sum.add(term);
        if term.abs() < 1e-16 * sum.value().abs() {
            quiet += 1;
            if quiet >= 3 {
                // Tail bound: geometric with the current ratio.
                let q = (term_ratio(a, b, m) * z).abs();
                let bounded = q < 0.5 || term.abs() * q / (1.0 - q) < 1e-14 * sum.value().abs();
                return HyperValue { value: sum.value(), terms: m, precision_loss: !bounded };
            }
        } else {
            quiet = 0;
        }
    }
    HyperValue { value: sum.value(), terms: m, precision_loss: true }
}

// Bernoulli numbers B_0..B_16 (B_1 = -1/2).
const BERNOULLI: [f64; 17] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
];

fn bernoulli_poly(n: usize, x: f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for k in 0..=n {
        acc += binom * BERNOULLI[k] * x.powi((n - k) as i32);
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    acc
}

/// Coefficients of the singular part of `pFq` at `z = 1`, in the basis
/// `(1-z)^(j-s-1)`, `j = 0..J`, where `s = sum(a) - sum(b) - 1`.
///
/// Returns `None` when `s` is an integer (logarithmic case).
pub fn singular_coefficients(a: &[f64], b: &[f64], count: usize) -> Option<(f64, Vec<f64>)> {
    let sigma = a.iter().sum::<f64>() - b.iter().sum::<f64>() - 1.0;
    if (sigma - sigma.round()).abs() < 1e-6 || count + 2 > BERNOULLI.len() {
        return None;
    }
    let num: Vec<f64> = a.iter().copied().chain([1.0]).collect();
    let den: Vec<f64> = b.iter().copied().chain([1.0, sigma + 1.0]).collect();

    // Coefficient ratio T_m / phi_0(m) = exp(sum_n d_n / m^n) in powers of w = 1/m.
    let mut d = vec![0.0; count];
    for (n, dn) in d.iter_mut().enumerate().skip(1) {
        let s: f64 = num.iter().map(|&x| bernoulli_poly(n + 1, x)).sum::<f64>()
            - den.iter().map(|&x| bernoulli_poly(n + 1, x)).sum::<f64>();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        *dn = sign * s / (n * (n + 1)) as f64;
    }
    let mut f = vec![0.0; count];
    f[0] = 1.0;
    for n in 1..count {
        f[n] = (1..=n).map(|k| k as f64 * d[k] * f[n - k]).sum::<f64>() / n as f64;
    }

    // phi_j(m) / phi_0(m) expanded in w: rho_j = prod_(i<j) (s-i) w / (1 + (s-i) w).
    let mul = |p: &[f64], q: &[f64]| {
        let mut r = vec![0.0; count];
        for (i, &x) in p.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in q.iter().enumerate().take(count - i) {
                r[i + j] += x * y;
            }
        }
        r
    };
    let mut rhos = Vec::with_capacity(count);
    let mut cur = vec![0.0; count];
    cur[0] = 1.0;
    for j in 0..count {
        rhos.push(cur.clone());
        let c = sigma - j as f64;
        let g: Vec<f64> = (0..count)
            .map(|n| if n == 0 { 0.0 } else { c * (-c).powi(n as i32 - 1) })
            .collect();
        cur = mul(&cur, &g);
    }
    let mut e = vec![0.0; count];
    for n in 0..count {
        let known: f64 = (0..n).map(|j| e[j] * rhos[j][n]).sum();
        e[n] = (f[n] - known) / rhos[n][n];
    }

    let mut c0 = gamma(sigma + 1.0).ok()?;
    for &y in b {
        c0 *= gamma(y).ok()?;
    }
    for &x in a {
        c0 *= rgamma(x);
    }
    Some((sigma, e.into_iter().map(|x| x * c0).collect()))
}

fn near_one(a: &[f64], b: &[f64], z: f64, gap: f64) -> Option<HyperValue> {
    let (sigma, e) = singular_coefficients(a, b, SINGULAR_TERMS)?;
    let count = e.len();
    let ln_gap = gap.ln();
    let singular: f64 = e
        .iter()
        .enumerate()
        .map(|(j, &ej)| ej * ((j as f64 - sigma - 1.0) * ln_gap).exp())
        .sum();

    // Remainder: sum_m (T_m - sum_j e_j phi_j(m)) z^m with phi_j(m) = (s+1-j)_m / m!.
    let mut t = 1.0;
    let mut phi = vec![1.0; count];
    let mut zm = 1.0;
    let mut sum = Neumaier::default();
    let mut quiet = 0;
    let mut m = 0;
    while m < MAX_TERMS {
        let p: f64 = e.iter().zip(&phi).map(|(ej, ph)| ej * ph).sum();
        let r = t - p;
        sum.add(r * zm);
        let tiny = r.abs() < 8.0 * f64::EPSILON * t.abs().max(p.abs())
            || (r * zm).abs() < 1e-18 * (sum.value() + singular).abs();
        if tiny {
            quiet += 1;
            if quiet >= 5 {
                return Some(HyperValue { value: singular + sum.value(), terms: m + 1, precision_loss: false });
            }
        } else {
            quiet = 0;
        }
        t *= term_ratio(a, b, m);
        let mf = m as f64;
        for (j, ph) in phi.iter_mut().enumerate() {
            *ph *= (sigma + 1.0 - j as f64 + mf) / (mf + 1.0);
        }
        zm *= z;
        m += 1;
        if !t.is_finite() {
            return None;
        }
    }
    Some(HyperValue { value: singular + sum.value(), terms: m, precision_loss: true })
}
