//! Numerical certificates: moments of a density against the exact
//! binomial numbers, Hankel positivity probes, and negativity witnesses
//! for pairs outside the region.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::binom::Params;
use crate::classify::classify_binomial;
use crate::closedform::measure_model;
use crate::error::{Error, Result};
use crate::exact::{ExactRational, Scalar};
use crate::freeconv::MomentVector;
use crate::mellin::MeasureModel;
use crate::parallel::Execution;
use crate::quadrature::{integrate_many, QuadratureMethod, QuadratureSpec};
use crate::slater::build_slater;

/// Relative tolerance of [`certify_measure`].
pub const CERTIFY_REL_TOL: f64 = 1e-7;

/// A witness must be below `-WITNESS_TOL` (after normalization).
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralValue {
    pub value: f64,
    pub error_estimate: f64,
    pub tolerance_met: bool,
}

/// `∫ x^n dν_ac` over the support of the density (the atom is not included).
pub fn integrate_density(m: &MeasureModel, n: usize, spec: &QuadratureSpec, exec: Execution) -> Result<IntegralValue> {
    let d = m.density.clone().ok_or_else(|| Error::Domain(format!("{} has no density", m.label)))?;
    let (lo, hi) = d.support();
    let res = integrate_many(
        |t| Ok(vec![d.eval_at(t)? * t.x.powi(n as i32)]),
        lo,
        hi,
        &[spec.target_abs_tol],
        spec.method,
        spec.max_levels,
        exec,
    )?;
    Ok(IntegralValue {
        value: res.value(),
        error_estimate: res.error(),
        tolerance_met: res.converged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCheck {
    pub n: usize,
    pub expected: f64,
    pub computed: f64,
    pub abs_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub p: String,
    pub r: String,
    pub n_max: usize,
    pub rel_tol: f64,
    pub atom_at_zero: f64,
    pub density: String,
    pub quadrature_levels: usize,
    pub quadrature_evaluations: usize,
    pub moments: Vec<MomentCheck>,
    pub passed: bool,
    pub runtime_ms: f64,
}

impl CertificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Integrates `x^n V` for `n <= n_max` on one shared node set and compares
/// `integral + atom 0^n` with `C(np+r, n)` to `1e-7 max(1, C)`.
pub fn certify_measure(params: &Params, n_max: usize, exec: Execution) -> Result<CertificationReport> {
    let start = Instant::now();
    let model = measure_model(params)?;
    let expected: Vec<f64> = (0..=n_max).map(|n| model.moment(n).to_f64()).collect();
    let (computed, levels, evaluations, density) = match &model.density {
        Some(d) => {
            let d = d.clone();
            let (lo, hi) = d.support();
            // Converge well inside the acceptance band.
            let tols: Vec<f64> = expected.iter().map(|e| 1e-3 * CERTIFY_REL_TOL * e.abs().max(1.0)).collect();
            let res = integrate_many(
                |t| {
                    let v = d.eval_at(t)?;
                    let mut pow = 1.0;
                    Ok((0..=n_max)
                        .map(|_| {
                            let y = v * pow;
                            pow *= t.x;
                            y
                        })
                        .collect())
                },
                lo,
                hi,
                &tols,
                QuadratureMethod::DoubleExponential,
                9,
                exec,
            )?;
            let name = if crate::closedform::ClosedFormId::for_params(params).is_some() { "closed form" } else { "slater" };
            (res.values, res.levels, res.evaluations, name.to_string())
        }
        None => (vec![0.0; n_max + 1], 0, 0, "none".to_string()),
    };
    let moments: Vec<MomentCheck> = (0..=n_max)
        .map(|n| {
            let atom = if n == 0 { model.atom_at_zero } else { 0.0 };
            let got = computed[n] + atom;
            let err = (got - expected[n]).abs();
            MomentCheck {
                n,
                expected: expected[n],
                computed: got,
                abs_error: err,
                passed: err <= CERTIFY_REL_TOL * expected[n].abs().max(1.0),
            }
        })
        .collect();
    Ok(CertificationReport {
        p: params.p.to_string(),
        r: params.r.to_string(),
        n_max,
        rel_tol: CERTIFY_REL_TOL,
        atom_at_zero: model.atom_at_zero,
        density,
        quadrature_levels: levels,
        quadrature_evaluations: evaluations,
        passed: moments.iter().all(|m| m.passed),
        moments,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn hankel(moments: &[f64], d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d + 1, d + 1, |i, j| moments[i + j])
}

fn check_depth(m: &MomentVector, d: usize) -> Result<()> {
    if 2 * d > m.order() {
        return Err(Error::Domain(format!("Hankel depth {d} needs {} moments, have {}", 2 * d + 1, m.order() + 1)));
    }
    Ok(())
}

/// Smallest eigenvalue of `(s_{i+j})_{i,j=0..d}`.
pub fn hankel_matrix_min_eig(moments: &MomentVector, d: usize) -> Result<f64> {
    check_depth(moments, d)?;
    let s: Vec<f64> = moments.as_slice().iter().map(Scalar::to_f64).collect();
    Ok(hankel(&s, d).symmetric_eigenvalues().min())
}

/// Smallest eigenvalue of the Hankel matrix scaled to unit diagonal.
fn normalized_min_eig(s: &[f64], d: usize) -> f64 {
    let h = hankel(s, d);
    let scale: Vec<f64> = (0..=d).map(|i| h[(i, i)].abs().sqrt().max(f64::MIN_POSITIVE)).collect();
    DMatrix::from_fn(d + 1, d + 1, |i, j| h[(i, j)] / (scale[i] * scale[j])).symmetric_eigenvalues().min()
}

/// First negative pivot of the exact `LDLᵀ` factorization of the Hankel
/// matrix, as `(index, pivot)`. A negative pivot before any zero pivot
/// means the matrix is not positive semidefinite.
pub fn hankel_exact_negative_pivot(moments: &[ExactRational], d: usize) -> Option<(usize, ExactRational)> {
    let n = d + 1;
    let mut a: Vec<Vec<ExactRational>> = (0..n).map(|i| (0..n).map(|j| moments[i + j].clone()).collect()).collect();
    for k in 0..n {
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return Some((k, pivot));
        }
        if pivot.is_zero() {
            return None;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let v = &a[i][j] - &(&f * &a[k][j]);
                a[i][j] = v;
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    NegativeDensityPoint,
    NegativeEvenMoment,
    NegativeHankel,
}

/// `location` is `x` for a density point, `2n` for an even moment and the
/// depth `d` for a Hankel matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub location: f64,
    pub value: f64,
}

/// Decades scanned next to `0`.
pub const WITNESS_DECADES: i32 = 12;
/// Largest Hankel depth tried.
pub const WITNESS_MAX_DEPTH: usize = 6;

/// Looks for a certificate that `C(np+r, n)` is not positive definite:
/// a negative value of `V_{p,r}` at `x = c(p) 10^-j`, `j = 1..12`, then a
/// negative even moment, then a Hankel matrix of depth `d <= 6` with a
/// negative eigenvalue.
pub fn find_negativity_witness(params: &Params) -> Result<Witness> {
    if classify_binomial(&params.p_scalar(), &params.r).positive_definite {
        return Err(Error::Domain(format!("{params} is inside the region")));
    }
    scan_for_witness(params)
}

/// The scan of [`find_negativity_witness`] without the region check, for
/// confirming that in-region pairs produce no witness.
pub fn scan_for_witness(params: &Params) -> Result<Witness> {
    params.k_l_above_one()?;
    if let Some(w) = density_witness(params) {
        return Ok(w);
    }
    let moments = MomentVector::binomial(&params.p_scalar(), &params.r, 2 * WITNESS_MAX_DEPTH);
    let s: Vec<f64> = moments.as_slice().iter().map(Scalar::to_f64).collect();
    for n in 1..=WITNESS_MAX_DEPTH {
        if s[2 * n] < -WITNESS_TOL {
            return Ok(Witness { kind: WitnessKind::NegativeEvenMoment, location: (2 * n) as f64, value: s[2 * n] });
        }
    }
    let exact: Option<Vec<ExactRational>> = moments.as_slice().iter().map(|m| m.as_exact().cloned()).collect();
    for d in 1..=WITNESS_MAX_DEPTH {
        let negative = match &exact {
            Some(q) => hankel_exact_negative_pivot(q, d).is_some(),
            None => true,
        };
        if negative {
            let v = normalized_min_eig(&s, d);
            if v < -WITNESS_TOL {
                return Ok(Witness { kind: WitnessKind::NegativeHankel, location: d as f64, value: v });
            }
        }
    }
    Err(Error::WitnessNotFound)
}

fn density_witness(params: &Params) -> Option<Witness> {
    let s = build_slater(params).ok()?;
    let c = s.domain_upper;
    (1..=WITNESS_DECADES).find_map(|j| {
        let x = c * 10f64.powi(-j);
        let v = s.eval(x).ok()?;
        (v < -WITNESS_TOL).then_some(Witness { kind: WitnessKind::NegativeDensityPoint, location: x, value: v })
    })
}
