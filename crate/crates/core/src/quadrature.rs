//! Quadrature on finite intervals with integrable endpoint singularities.
//!
//! The double-exponential (tanh-sinh) rule clusters nodes at both ends.
//! Integrands receive an [`Abscissa`] carrying the distances to both
//! endpoints computed without cancellation, so densities with a
//! `(c - x)^(-1/2)` edge can be evaluated at nodes that round to `c`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::{pairwise_sum, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuadratureMethod {
    DoubleExponential,
    GaussLegendreComposite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub target_abs_tol: f64,
    pub max_levels: usize,
}

impl QuadratureSpec {
    pub fn new(method: QuadratureMethod, target_abs_tol: f64, max_levels: usize) -> Result<Self> {
        if !(target_abs_tol >= 1e-14) {
            return Err(Error::Parameter(format!("tolerance {target_abs_tol} below 1e-14")));
        }
        Ok(Self { method, target_abs_tol, max_levels })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { method: QuadratureMethod::DoubleExponential, target_abs_tol: 1e-10, max_levels: 8 }
    }
}

/// A node `x` in `[a, b]` with `x - a` and `b - x` kept separately.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lower: f64,
    pub from_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadResult {
    pub values: Vec<f64>,
    /// Difference between the last two refinement levels, per component.
    pub errors: Vec<f64>,
    pub levels: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn value(&self) -> f64 {
        self.values[0]
    }

    pub fn error(&self) -> f64 {
        self.errors[0]
    }
}

const DE_T_MAX: f64 = 6.0;
const DE_H0: f64 = 0.5;
const GL_POINTS: usize = 20;

struct Node {
    at: Abscissa,
    weight: f64,
}

fn de_node(t: f64, h: f64, a: f64, b: f64) -> Option<Node> {
    let len = b - a;
    let u = FRAC_PI_2 * t.sinh();
    let from_lower = len / (1.0 + (-2.0 * u).exp());
    let from_upper = len / (1.0 + (2.0 * u).exp());
    let cu = u.cosh();
    let weight = h * len * FRAC_PI_2 * t.cosh() / (2.0 * cu * cu);
    if from_lower < 1e-280 * len || from_upper < 1e-280 * len || weight == 0.0 || !weight.is_finite() {
        return None;
    }
    let x = if from_lower <= from_upper { a + from_lower } else { b - from_upper };
    Some(Node { at: Abscissa { x, from_lower, from_upper }, weight })
}

/// Nodes first used at `level`: all of them at level 0, odd multiples of
/// `h` afterwards.
fn de_level_nodes(level: usize, a: f64, b: f64) -> Vec<Node> {
    let h = DE_H0 / (1u64 << level) as f64;
    let count = (DE_T_MAX / h).floor() as i64;
    let step = if level == 0 { 1 } else { 2 };
    let start = if level == 0 { -count } else { -count + ((count + 1) % 2) };
    let mut out = Vec::new();
    let mut k = start;
    while k <= count {
        if let Some(n) = de_node(k as f64 * h, h, a, b) {
            out.push(n);
        }
        k += step;
    }
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gl_level_nodes(level: usize, a: f64, b: f64, rule: &[(f64, f64)]) -> Vec<Node> {
    let panels = 1usize << level;
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = p as f64 * width;
        for &(t, w) in rule {
            let off = lo + width * (t + 1.0) / 2.0;
            let from_upper = (b - a) - off;
            out.push(Node {
                at: Abscissa { x: a + off, from_lower: off, from_upper },
                weight: w * width / 2.0,
            });
        }
    }
    out
}

/// Integrates the vector-valued `f` over `[a, b]`, refining until every
/// component `i` changes by at most `tols[i]` between levels.
pub fn integrate_many<F>(
    f: F,
    a: f64,
    b: f64,
    tols: &[f64],
    method: QuadratureMethod,
    max_levels: usize,
    exec: Execution,
) -> Result<QuadResult>
where
    F: Fn(&Abscissa) -> Result<Vec<f64>> + Sync + Send,
{
    if !(a < b) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let dims = tols.len();
    let rule = gauss_legendre(GL_POINTS);
    let mut de_sums = vec![0.0; dims];
    let mut previous: Option<Vec<f64>> = None;
    let mut evaluations = 0;
    let mut errors = vec![f64::INFINITY; dims];
    for level in 0..=max_levels {
        let nodes = match method {
            QuadratureMethod::DoubleExponential => de_level_nodes(level, a, b),
            QuadratureMethod::GaussLegendreComposite => gl_level_nodes(level, a, b, &rule),
        };
        evaluations += nodes.len();
        let rows: Vec<Result<Vec<f64>>> = exec.map(&nodes, |n| {
            let v = f(&n.at)?;
            Ok(v.into_iter().map(|y| y * n.weight).collect())
        });
        let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
        let mut level_sums = vec![0.0; dims];
        for (d, s) in level_sums.iter_mut().enumerate() {
            let column: Vec<f64> = rows.iter().map(|r| r[d]).collect();
            *s = pairwise_sum(&column);
        }
        let current = match method {
            QuadratureMethod::DoubleExponential => {
                // Halving h: I_h = I_{2h}/2 + h * (new nodes), weights already carry h.
                for (s, add) in de_sums.iter_mut().zip(&level_sums) {
                    *s = if level == 0 { *add } else { *s / 2.0 + add };
                }
                de_sums.clone()
            }
            QuadratureMethod::GaussLegendreComposite => level_sums,
        };
        if let Some(bad) = current.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("integrand produced {bad}")));
        }
        if let Some(prev) = &previous {
            errors = current.iter().zip(prev).map(|(c, p)| (c - p).abs()).collect();
            if level >= 3 && errors.iter().zip(tols).all(|(e, t)| e <= t) {
                return Ok(QuadResult { values: current, errors, levels: level, evaluations, converged: true });
            }
        }
        previous = Some(current);
    }
    Ok(QuadResult {
        values: previous.unwrap_or_default(),
        errors,
        levels: max_levels,
        evaluations,
        converged: false,
    })
}

/// Scalar version of [`integrate_many`].
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec, exec: Execution) -> Result<QuadResult>
where
    F: Fn(&Abscissa) -> Result<f64> + Sync + Send,
{
    integrate_many(|x| f(x).map(|v| vec![v]), a, b, &[spec.target_abs_tol], spec.method, spec.max_levels, exec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn de() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn polynomial_exactness() {
        for method in [QuadratureMethod::DoubleExponential, QuadratureMethod::GaussLegendreComposite] {
            let spec = QuadratureSpec { method, ..de() };
            let r = integrate(|t| Ok(t.x.powi(5)), 0.0, 2.0, &spec, Execution::Sequential).unwrap();
            assert!((r.value() - 64.0 / 6.0).abs() < 1e-12, "{method:?}: {}", r.value());
            assert!(r.converged);
        }
    }

    #[test]
    fn arcsine_endpoint_singularities() {
        // ∫_0^4 x^3 / (π sqrt(x (4 - x))) dx = C(6, 3)
        let f = |t: &Abscissa| Ok(t.x.powi(3) / (std::f64::consts::PI * (t.from_lower * t.from_upper).sqrt()));
        let r = integrate(f, 0.0, 4.0, &de(), Execution::Parallel).unwrap();
        assert!((r.value() - 20.0).abs() < 1e-8, "{}", r.value());
    }

    #[test]
    fn strong_algebraic_singularity() {
        // ∫_0^1 x^(-0.8) dx = 5
        let r = integrate(|t| Ok(t.from_lower.powf(-0.8)), 0.0, 1.0, &de(), Execution::Sequential).unwrap();
        assert!((r.value() - 5.0).abs() < 1e-9, "{}", r.value());
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let f = |t: &Abscissa| Ok((t.x * 3.7).sin() / (t.from_upper).sqrt());
        let a = integrate(f, 0.0, 2.0, &de(), Execution::Sequential).unwrap();
        let b = integrate(f, 0.0, 2.0, &de(), Execution::Parallel).unwrap();
        assert_eq!(a.value().to_bits(), b.value().to_bits());
    }

    #[test]
    fn rejects_tiny_tolerance() {
        assert!(QuadratureSpec::new(QuadratureMethod::DoubleExponential, 1e-15, 5).is_err());
    }
}
