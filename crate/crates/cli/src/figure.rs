//! CSV data behind the figures: the classification raster and density curves.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use binomoment::{classify_binomial, density_v, format_g17, Error, ExactRational, Params, Scalar};
use serde::Deserialize;

const DEFAULTS: &str = include_str!("../figures.toml");

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Raster {
    /// `[min, max]`
    pub p: [String; 2],
    pub r: [String; 2],
    pub step: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curves {
    pub points: usize,
    pub p: Vec<String>,
    pub r: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    fig1: Option<Raster>,
    fig2: Option<Curves>,
    fig3: Option<Curves>,
    fig4: Option<Curves>,
    fig5: Option<Curves>,
    fig6: Option<Curves>,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub raster: Raster,
    /// Figures 2 to 6.
    pub curves: [Curves; 5],
}

/// The bundled configuration, with any sections of `path` replacing it.
pub fn load_config(path: Option<&Path>) -> Result<Config, String> {
    let base: PartialConfig = toml::from_str(DEFAULTS).map_err(|e| format!("bundled figures.toml: {e}"))?;
    let over = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => PartialConfig::default(),
    };
    let pick = |a: Option<Curves>, b: Option<Curves>| a.or(b).ok_or("figures.toml lacks a section");
    Ok(Config {
        raster: over.fig1.or(base.fig1).ok_or("figures.toml lacks [fig1]")?,
        curves: [
            pick(over.fig2, base.fig2)?,
            pick(over.fig3, base.fig3)?,
            pick(over.fig4, base.fig4)?,
            pick(over.fig5, base.fig5)?,
            pick(over.fig6, base.fig6)?,
        ],
    })
}

fn exact(s: &str) -> Result<ExactRational, Error> {
    ExactRational::from_str(s)
}

/// Terminating decimals print exactly; anything else as a 17-digit float.
pub fn decimal(q: &ExactRational) -> String {
    let mut scaled = q.clone();
    for digits in 0..=6usize {
        if scaled.is_integer() {
            let n = scaled.numer().to_string();
            let (sign, n) = n.strip_prefix('-').map_or(("", n.as_str()), |m| ("-", m));
            if digits == 0 {
                return format!("{sign}{n}");
            }
            let n = format!("{n:0>width$}", width = digits + 1);
            let (int, frac) = n.split_at(n.len() - digits);
            return format!("{sign}{int}.{frac}");
        }
        scaled = scaled * ExactRational::from_integer(10);
    }
    format_g17(q.to_f64())
}

fn raster(out: &mut impl Write, cfg: &Raster) -> Result<(), Error> {
    let (p0, p1) = (exact(&cfg.p[0])?, exact(&cfg.p[1])?);
    let (r0, r1) = (exact(&cfg.r[0])?, exact(&cfg.r[1])?);
    let step = exact(&cfg.step)?;
    if !step.is_positive() {
        return Err(Error::Parameter(format!("step must be positive, got {step}")));
    }
    let axis = |lo: &ExactRational, hi: &ExactRational| -> Vec<ExactRational> {
        let mut v = Vec::new();
        let mut x = lo.clone();
        while x <= *hi {
            v.push(x.clone());
            x = x + step.clone();
        }
        v
    };
    let (ps, rs) = (axis(&p0, &p1), axis(&r0, &r1));
    writeln!(out, "p,r,verdict").map_err(io_err)?;
    for p in &ps {
        let pd = decimal(p);
        let p = Scalar::Exact(p.clone());
        for r in &rs {
            let v = classify_binomial(&p, &Scalar::Exact(r.clone()));
            writeln!(out, "{pd},{},{:?}", decimal(r), v.branch).map_err(io_err)?;
        }
    }
    Ok(())
}

/// One row per node `x_i = c(p) i/(points+1)`; the third column is `1` for
/// curves that take negative values on the grid.
fn curves(out: &mut impl Write, cfg: &Curves) -> Result<(), Error> {
    writeln!(out, "x,V,negative_part,p,r").map_err(io_err)?;
    for p in &cfg.p {
        let p = exact(p)?;
        for r in &cfg.r {
            let params = Params::new(p.clone(), Scalar::from_str(r)?);
            let d = density_v(&params)?;
            let (_, c) = d.support();
            let xs: Vec<f64> = (1..=cfg.points).map(|i| c * i as f64 / (cfg.points + 1) as f64).collect();
            let vs = xs.iter().map(|&x| d.eval(x)).collect::<Result<Vec<f64>, Error>>()?;
            let negative = u8::from(vs.iter().any(|&v| v < 0.0));
            for (x, v) in xs.iter().zip(&vs) {
                writeln!(out, "{},{},{negative},{},{}", format_g17(*x), format_g17(*v), params.p, params.r)
                    .map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parameter(format!("write failed: {e}"))
}

pub fn emit(id: u8, config: &Config, path: &Path) -> Result<(), Error> {
    let file = File::create(path).map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    match id {
        1 => raster(&mut out, &config.raster)?,
        2..=6 => curves(&mut out, &config.curves[id as usize - 2])?,
        _ => return Err(Error::Parameter(format!("no figure {id}"))),
    }
    out.flush().map_err(io_err)
}
