use std::f64::consts::PI;

use binomoment::quadrature::{integrate, QuadratureMethod, QuadratureSpec};
use binomoment::{density_v, factorize, sample, Execution, Params};

fn arcsine_cdf(x: f64) -> f64 {
    2.0 / PI * (x / 4.0).sqrt().clamp(0.0, 1.0).asin()
}

#[test]
fn arcsine_cdf_matches_quadrature_of_the_density() {
    let d = density_v(&Params::ratio(2, 1, 0, 1)).unwrap();
    let spec = QuadratureSpec::new(QuadratureMethod::DoubleExponential, 1e-11, 9).unwrap();
    for x in [0.01, 0.5, 1.0, 2.0, 3.3, 3.99] {
        let f = integrate(|t| d.eval(t.x), 0.0, x, &spec, Execution::Sequential).unwrap().value();
        assert!((f - arcsine_cdf(x)).abs() < 1e-9, "x={x}: {f}");
    }
}

#[test]
fn kolmogorov_smirnov_against_the_arcsine_law() {
    let f = factorize(&Params::ratio(2, 1, 0, 1)).unwrap();
    let mut xs = sample(&f, 100_000, 42, Execution::Parallel).unwrap();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = arcsine_cdf(x);
            (c - i as f64 / n).abs().max((i as f64 + 1.0) / n - c)
        })
        .fold(0.0, f64::max);
    assert!(ks <= 0.01, "KS distance {ks}");
}

#[test]
fn samples_stay_in_the_support() {
    for params in [Params::ratio(3, 2, -1, 2), Params::ratio(7, 2, 5, 2), Params::ratio(5, 3, 0, 1)] {
        let f = factorize(&params).unwrap();
        let c = params.c_f64().unwrap();
        let xs = sample(&f, 20_000, 1, Execution::Parallel).unwrap();
        assert!(xs.iter().all(|&x| (0.0..=c).contains(&x)), "{params}");
    }
}

#[test]
fn sequential_and_parallel_streams_are_identical() {
    let f = factorize(&Params::ratio(7, 3, 1, 2)).unwrap();
    let a = sample(&f, 30_000, 99, Execution::Sequential).unwrap();
    let b = sample(&f, 30_000, 99, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    // a prefix of a longer run is the shorter run
    let c = sample(&f, 10_000, 99, Execution::Parallel).unwrap();
    assert_eq!(&a[..10_000], &c[..]);
}
