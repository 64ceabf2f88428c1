//! Modified beta laws, Mellin products, the factorization of `ν(p,r)` into
//! `k` beta factors and a dilation, the `η(c)` factor, reflections and a
//! reproducible product sampler.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::binom::{binom_general, raney_general, Params};
use crate::error::{Error, Result};
use crate::exact::{ExactRational, Scalar};
use crate::gamma::ln_gamma;
use crate::parallel::Execution;
use crate::quadrature::Abscissa;
use crate::slater::build_symbol;

/// A density on an interval, evaluated at nodes that know their distance
/// to both endpoints.
pub trait Density: Send + Sync {
    fn support(&self) -> (f64, f64);

    fn eval_at(&self, at: &Abscissa) -> Result<f64>;

    fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        self.eval_at(&Abscissa { x, from_lower: x - lo, from_upper: hi - x })
    }
}

/// Moment function of a measure.
pub type MomentFn = Arc<dyn Fn(usize) -> Scalar + Send + Sync>;

/// An atom at `0` plus an absolutely continuous part.
#[derive(Clone)]
pub struct MeasureModel {
    pub atom_at_zero: f64,
    pub density: Option<Arc<dyn Density>>,
    pub lower: f64,
    pub upper: f64,
    moment_fn: MomentFn,
    pub label: String,
}

impl fmt::Debug for MeasureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureModel")
            .field("label", &self.label)
            .field("atom_at_zero", &self.atom_at_zero)
            .field("support", &(self.lower, self.upper))
            .finish()
    }
}

impl MeasureModel {
    pub fn new(
        label: impl Into<String>,
        atom_at_zero: f64,
        density: Option<Arc<dyn Density>>,
        moment_fn: MomentFn,
    ) -> Self {
        let (lower, upper) = density.as_ref().map(|d| d.support()).unwrap_or((0.0, 0.0));
        Self { atom_at_zero, density, lower, upper, moment_fn, label: label.into() }
    }

    pub fn moment(&self, n: usize) -> Scalar {
        (self.moment_fn)(n)
    }

    pub fn moments(&self, count: usize) -> Vec<Scalar> {
        (0..count).map(|n| self.moment(n)).collect()
    }

    /// Density value; zero outside the support.
    pub fn density_at(&self, x: f64) -> Result<f64> {
        match &self.density {
            Some(d) if x > self.lower && x < self.upper => d.eval(x),
            _ => Ok(0.0),
        }
    }
}

/// Modified beta law `b(u+v, u, l)`: density `l/B(u,v) x^(lu-1) (1-x^l)^(v-1)`
/// on `[0, 1]`; `v = 0` is the point mass at `1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaFactor {
    pub u: f64,
    pub v: f64,
    pub l: u32,
}

impl BetaFactor {
    pub fn new(u: f64, v: f64, l: u32) -> Result<Self> {
        if !(u > 0.0) || !(v >= 0.0) || l == 0 {
            return Err(Error::Parameter(format!("invalid beta factor u = {u}, v = {v}, l = {l}")));
        }
        Ok(Self { u, v, l })
    }

    pub fn is_point_mass(&self) -> bool {
        self.v == 0.0
    }
}

/// `Γ(u + n/l) Γ(u + v) / (Γ(u + v + n/l) Γ(u))`.
pub fn beta_moment(f: &BetaFactor, n: usize) -> f64 {
    if f.is_point_mass() || n == 0 {
        return 1.0;
    }
    let s = n as f64 / f.l as f64;
    let (a, _) = ln_gamma(f.u + s);
    let (b, _) = ln_gamma(f.u + f.v);
    let (c, _) = ln_gamma(f.u + f.v + s);
    let (d, _) = ln_gamma(f.u);
    ((a - c) + (b - d)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MellinFactorization {
    pub factors: Vec<BetaFactor>,
    pub dilation: f64,
}

/// `ν(p,r) = b(ã_1, β_1, l) ∘ ... ∘ b(ã_k, β_k, l) ∘ δ_c(p)` for
/// `p = k/l > 1`, `-1 < r <= p-1`.
pub fn factorize(params: &Params) -> Result<MellinFactorization> {
    let (k, l) = params.k_l_above_one()?;
    let r = &params.r;
    let upper = &params.p_scalar() - &Scalar::int(1);
    let above = r.cmp_value(&Scalar::int(-1)) == Some(std::cmp::Ordering::Greater);
    let below = r.cmp_value(&upper) != Some(std::cmp::Ordering::Greater);
    if !(above && below) {
        return Err(Error::Region { p: params.p.to_string(), r: r.to_string() });
    }
    let sym = build_symbol(params)?;
    let mut factors = Vec::with_capacity(k);
    for j in 0..k {
        let u = sym.betas[j];
        let mut v = sym.alphas_tilde[j] - u;
        if v.abs() < 1e-12 {
            v = 0.0;
        }
        if v < 0.0 {
            return Err(Error::Invariant(format!("negative beta parameter {v} in factor {}", j + 1)));
        }
        factors.push(BetaFactor::new(u, v, l as u32)?);
    }
    Ok(MellinFactorization { factors, dilation: sym.scale })
}

pub fn mellin_product_moments(f: &MellinFactorization, n: usize) -> f64 {
    f.factors.iter().map(|b| beta_moment(b, n)).product::<f64>() * f.dilation.powi(n as i32)
}

/// Samples drawn per independently seeded chunk.
pub const SAMPLE_CHUNK: usize = 4096;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of chunk `index`: `splitmix64(seed ^ splitmix64(index))`.
pub fn chunk_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

struct FactorSampler {
    shapes: Option<(Gamma<f64>, Gamma<f64>)>,
    inv_l: f64,
}

impl FactorSampler {
    fn new(f: &BetaFactor) -> Result<Self> {
        let shapes = if f.is_point_mass() {
            None
        } else {
            let g = |s: f64| Gamma::new(s, 1.0).map_err(|e| Error::Parameter(e.to_string()));
            Some((g(f.u)?, g(f.v)?))
        };
        Ok(Self { shapes, inv_l: 1.0 / f.l as f64 })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let Some((gu, gv)) = &self.shapes else {
            return 1.0;
        };
        loop {
            let a = gu.sample(rng);
            let b = gv.sample(rng);
            let s = a + b;
            if s > 0.0 {
                let t = a / s;
                return if self.inv_l == 1.0 { t } else { t.powf(self.inv_l) };
            }
        }
    }
}

/// `count` independent draws of `c(p) ∏ Y_j`, `Y_j ~ b(ã_j, β_j, l)`.
///
/// Output depends only on `(factorization, count, seed)`: chunk `i` of
/// [`SAMPLE_CHUNK`] draws uses its own generator seeded by [`chunk_seed`].
pub fn sample(f: &MellinFactorization, count: usize, seed: u64, exec: Execution) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Parameter("sample count must be positive".into()));
    }
    let samplers: Vec<FactorSampler> = f.factors.iter().map(FactorSampler::new).collect::<Result<_>>()?;
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let parts = exec.map_range(chunks, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, i as u64));
        let len = SAMPLE_CHUNK.min(count - i * SAMPLE_CHUNK);
        (0..len)
            .map(|_| samplers.iter().map(|s| s.draw(&mut rng)).product::<f64>() * f.dilation)
            .collect::<Vec<f64>>()
    });
    Ok(parts.concat())
}

struct EtaDensity {
    c: f64,
}

impl Density for EtaDensity {
    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn eval_at(&self, at: &Abscissa) -> Result<f64> {
        Ok(self.c * at.from_lower.powf(self.c - 1.0))
    }
}

/// `η(c) = c x^(c-1) dx` on `[0, 1]`, with moments `c/(n+c)`.
pub fn eta_factor(c: &Scalar) -> Result<MeasureModel> {
    if c.to_f64() <= 0.0 {
        return Err(Error::Parameter(format!("η(c) needs c > 0, got {c}")));
    }
    let cc = c.clone();
    let moments: MomentFn = Arc::new(move |n| &cc / &(&Scalar::int(n as i64) + &cc));
    Ok(MeasureModel::new(format!("eta({c})"), 0.0, Some(Arc::new(EtaDensity { c: c.to_f64() })), moments))
}

struct Reflected {
    inner: Arc<dyn Density>,
}

impl Density for Reflected {
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        (-hi, -lo)
    }

    fn eval_at(&self, at: &Abscissa) -> Result<f64> {
        self.inner.eval_at(&Abscissa { x: -at.x, from_lower: at.from_upper, from_upper: at.from_lower })
    }
}

/// Image of a measure under `x -> -x`.
pub fn reflect(m: &MeasureModel) -> MeasureModel {
    let inner = m.moment_fn.clone();
    let moments: MomentFn = Arc::new(move |n| {
        let s = inner(n);
        if n % 2 == 0 {
            s
        } else {
            -s
        }
    });
    let density = m.density.clone().map(|d| Arc::new(Reflected { inner: d }) as Arc<dyn Density>);
    let label = m.label.strip_prefix("reflect(").and_then(|s| s.strip_suffix(')'));
    let label = label.map(str::to_string).unwrap_or_else(|| format!("reflect({})", m.label));
    let mut out = MeasureModel::new(label, m.atom_at_zero, density, moments);
    if out.density.is_none() {
        (out.lower, out.upper) = (-m.upper, -m.lower);
    }
    out
}

/// Moment form of `ν(p, r-1) ∘ η(r/(p-1)) = μ(p, r)`, exact for `n <= nmax`.
pub fn raney_link_holds(p: &ExactRational, r: &ExactRational, nmax: usize) -> bool {
    let ps = Scalar::Exact(p.clone());
    let rs = Scalar::Exact(r.clone());
    let c = Scalar::Exact(r / &(p - &ExactRational::from_integer(1)));
    let shifted = &rs - &Scalar::int(1);
    (0..=nmax).all(|n| {
        let eta = &c / &(&Scalar::int(n as i64) + &c);
        binom_general(&ps, &shifted, n) * eta == raney_general(&ps, &rs, n)
    })
}
