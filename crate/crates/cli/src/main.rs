//! `binomoment`: moments, series, densities, sampling and certificates for
//! the measures with binomial and Raney moment sequences.

mod figure;

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use binomoment::freeconv::{identity_ids, run_identity, run_identity_suite, IdentityCheck};
use binomoment::genfun::{generating_series, GenFunKind};
use binomoment::{
    binom_general, certify_measure, classify_binomial, classify_raney, density_v, factorize, find_negativity_witness,
    format_g17, measure_model, raney_general, sample, Error, ExactRational, Execution, Params, Scalar,
};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

const NUMBER_HELP: &str = "\
Numbers: `k/l` fractions, integers and decimals with at most six fractional
digits are read as exact rationals (0.75 is 3/4). Longer decimals and exponent
notation are read as floats. Commands that build densities need an exact p.

Exit codes: 0 success, 1 domain or region error (and usage errors),
2 verification failure, 3 no negativity witness found.

BINOMOMENT_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "binomoment", version, about = "Binomial and Raney moment sequences and their measures", after_help = NUMBER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Binomial,
    Raney,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesKind {
    /// D_{p,r}(z) = sum C(np+r, n) z^n
    Binomial,
    /// B_p(z)^r = sum C(np+r, n) r/(np+r) z^n
    Raney,
    /// B_p(z) = sum C(np+1, n) z^n/(np+1)
    Fuss,
}

#[derive(Clone, Copy)]
struct Grid {
    a: f64,
    b: f64,
    count: usize,
}

impl Grid {
    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let step = if self.count > 1 { (self.b - self.a) / (self.count - 1) as f64 } else { 0.0 };
        (0..self.count).map(move |i| self.a + step * i as f64)
    }
}

fn parse_number(s: &str) -> Result<Scalar, String> {
    Scalar::from_str(s).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, count] = parts[..] else {
        return Err(format!("expected a,b,count, got {s:?}"));
    };
    let a = a.parse::<f64>().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.parse::<f64>().map_err(|e| format!("{b:?}: {e}"))?;
    let count = count.parse::<usize>().map_err(|e| format!("{count:?}: {e}"))?;
    Ok(Grid { a, b, count })
}

#[derive(Subcommand)]
enum Command {
    /// Print C(np+r, n) for n = 0..=N, or the Raney numbers with --raney
    Moments {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        r: Scalar,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        raney: bool,
    },
    /// Print the coefficients of a generating function up to z^order
    Series {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number, default_value = "1")]
        r: Scalar,
        #[arg(long, default_value_t = 32)]
        order: usize,
        #[arg(long, value_enum, default_value = "binomial")]
        kind: SeriesKind,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the density V_{p,r} at a point or on a uniform grid
    #[command(group(ArgGroup::new("at").required(true).args(["x", "grid"])))]
    Density {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        r: Scalar,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        /// a,b,count
        #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
        grid: Option<Grid>,
    },
    /// Decide positive definiteness of the binomial or Raney sequence
    Classify {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        r: Scalar,
        #[arg(long, value_enum, default_value = "binomial")]
        family: Family,
    },
    /// Print the Mellin factorization into modified beta laws
    Factorize {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        r: Scalar,
        #[arg(long)]
        json: bool,
    },
    /// Draw samples from nu(p, r) through its Mellin factorization
    Sample {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        r: Scalar,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write little-endian f64 values instead of text
        #[arg(long)]
        binary: bool,
    },
    /// Check the free, Boolean and monotonic convolution identities
    ConvVerify {
        #[arg(long, conflicts_with = "id")]
        all: bool,
        #[arg(long)]
        id: Option<String>,
        /// List the identity names and exit
        #[arg(long, conflicts_with_all = ["all", "id"])]
        list: bool,
        /// Number of moments compared after m_0
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Integrate x^n against the density and compare with C(np+r, n)
    Certify {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        r: Scalar,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Find a certificate that C(np+r, n) is not positive definite
    Witness {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        p: Scalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
        r: Scalar,
    },
    /// Write the CSV data behind a figure
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        id: u8,
        #[arg(long)]
        out: PathBuf,
        /// TOML file overriding the bundled (p, r) lists
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

/// Failure modes mapped to exit codes.
enum Failure {
    Lib(Error),
    Io(io::Error),
    Config(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn exact_params(p: &Scalar, r: &Scalar) -> Result<Params, Error> {
    let p = p
        .as_exact()
        .cloned()
        .ok_or_else(|| Error::Parameter(format!("p = {p} must be an exact rational here")))?;
    Ok(Params::new(p, r.clone()))
}

fn moments(out: &mut impl Write, p: &Scalar, r: &Scalar, n: usize, raney: bool) -> Outcome {
    let f = if raney { raney_general } else { binom_general };
    let terms: Vec<String> = (0..=n).map(|k| f(p, r, k).to_string()).collect();
    writeln!(out, "{}", terms.join(" "))?;
    Ok(())
}

fn series(out: &mut impl Write, p: &Scalar, r: &Scalar, order: usize, kind: SeriesKind, json: bool) -> Outcome {
    let kind = match kind {
        SeriesKind::Binomial => GenFunKind::BinomialD,
        SeriesKind::Raney => GenFunKind::RaneyPower,
        SeriesKind::Fuss => GenFunKind::FussB,
    };
    let s = generating_series(kind, p, r, order);
    if json {
        writeln!(out, "{}", serde_json::to_string(&s).expect("series serializes"))?;
    } else {
        let terms: Vec<String> = s.coeffs().iter().map(Scalar::to_string).collect();
        writeln!(out, "{}", terms.join(" "))?;
    }
    Ok(())
}

/// `V_{p,r}` for `p > 1`; otherwise the density of `ν(p, r)`.
fn density_fn(params: &Params) -> Result<Box<dyn Fn(f64) -> Result<f64, Error>>, Error> {
    if params.p > ExactRational::from_integer(1) {
        let d = density_v(params)?;
        let (lo, hi) = d.support();
        return Ok(Box::new(move |x| if x > lo && x < hi { d.eval(x) } else { Ok(0.0) }));
    }
    let m = measure_model(params)?;
    Ok(Box::new(move |x| m.density_at(x)))
}

fn density(out: &mut impl Write, params: &Params, x: Option<f64>, grid: Option<Grid>) -> Outcome {
    let f = density_fn(params)?;
    let xs: Vec<f64> = match (x, grid) {
        (Some(x), _) => vec![x],
        (None, Some(g)) => g.points().collect(),
        (None, None) => unreachable!("clap requires --x or --grid"),
    };
    for x in xs {
        writeln!(out, "{} {}", format_g17(x), format_g17(f(x)?))?;
    }
    Ok(())
}

fn classify(out: &mut impl Write, p: &Scalar, r: &Scalar, family: Family) -> Outcome {
    let v = match family {
        Family::Binomial => classify_binomial(p, r),
        Family::Raney => classify_raney(p, r),
    };
    let head = if v.positive_definite { "positive definite" } else { "NOT positive definite" };
    writeln!(out, "{head} ({:?})", v.branch)?;
    Ok(())
}

fn factorization(out: &mut impl Write, params: &Params, json: bool) -> Outcome {
    let f = factorize(params)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&f).expect("factorization serializes"))?;
        return Ok(());
    }
    writeln!(out, "# b(u+v, u, l) factors: u v l")?;
    for b in &f.factors {
        writeln!(out, "{} {} {}", format_g17(b.u), format_g17(b.v), b.l)?;
    }
    writeln!(out, "# dilation")?;
    writeln!(out, "{}", format_g17(f.dilation))?;
    Ok(())
}

fn sampling(out: &mut impl Write, params: &Params, count: usize, seed: u64, binary: bool) -> Outcome {
    let f = factorize(params)?;
    let xs = sample(&f, count, seed, Execution::Parallel)?;
    for x in xs {
        if binary {
            out.write_all(&x.to_le_bytes())?;
        } else {
            writeln!(out, "{}", format_g17(x))?;
        }
    }
    Ok(())
}

fn conv_verify(out: &mut impl Write, id: Option<&str>, list: bool, order: usize) -> Outcome {
    if list {
        for id in identity_ids() {
            writeln!(out, "{id}")?;
        }
        return Ok(());
    }
    let checks: Vec<IdentityCheck> = match id {
        Some(id) => vec![run_identity(id, order)?],
        None => run_identity_suite(order)?,
    };
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let err = if c.exact { "exact".to_string() } else { format_g17(c.max_error) };
        writeln!(out, "{status} {} [{err}] {}", c.id, c.statement)?;
        failed += usize::from(!c.passed);
    }
    writeln!(out, "{} of {} identities hold", checks.len() - failed, checks.len())?;
    if failed > 0 {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn certify(out: &mut impl Write, params: &Params, nmax: usize) -> Outcome {
    let report = certify_measure(params, nmax, Execution::Parallel)?;
    // Wall time would make the output differ between runs.
    let mut json = serde_json::to_value(&report).expect("report serializes");
    if let Some(obj) = json.as_object_mut() {
        obj.remove("runtime_ms");
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&json).expect("report serializes"))?;
    if !report.passed {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn witness(out: &mut impl Write, params: &Params) -> Outcome {
    let w = find_negativity_witness(params)?;
    writeln!(out, "{:?} {} {}", w.kind, format_g17(w.location), format_g17(w.value))?;
    Ok(())
}

fn run(cmd: Command) -> Outcome {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cmd {
        Command::Moments { p, r, n, raney } => moments(&mut out, &p, &r, n, raney)?,
        Command::Series { p, r, order, kind, json } => series(&mut out, &p, &r, order, kind, json)?,
        Command::Density { p, r, x, grid } => density(&mut out, &exact_params(&p, &r)?, x, grid)?,
        Command::Classify { p, r, family } => classify(&mut out, &p, &r, family)?,
        Command::Factorize { p, r, json } => factorization(&mut out, &exact_params(&p, &r)?, json)?,
        Command::Sample { p, r, count, seed, binary } => {
            sampling(&mut out, &exact_params(&p, &r)?, count, seed, binary)?
        }
        Command::ConvVerify { all: _, id, list, order } => {
            // Flush partial results before reporting a failed identity.
            let res = conv_verify(&mut out, id.as_deref(), list, order);
            out.flush()?;
            res?
        }
        Command::Certify { p, r, nmax } => {
            let res = certify(&mut out, &exact_params(&p, &r)?, nmax);
            out.flush()?;
            res?
        }
        Command::Witness { p, r } => witness(&mut out, &exact_params(&p, &r)?)?,
        Command::Figure { id, out: path, params } => {
            let config = figure::load_config(params.as_deref()).map_err(Failure::Config)?;
            figure::emit(id, &config, &path)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BINOMOMENT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("BINOMOMENT_THREADS must be a positive integer, got {v:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(2),
        Err(Failure::Lib(Error::WitnessNotFound)) => {
            eprintln!("error: {}", Error::WitnessNotFound);
            ExitCode::from(3)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
