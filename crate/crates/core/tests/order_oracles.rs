use approx::assert_relative_eq;
use nalgebra::{Complex, DMatrix};
use splitflow_core::order::{
    certification_window, certify_order, expm, local_order_slope, log2_range, scheme_matrix_error,
    Matrix, MatrixPair,
};
use splitflow_core::scheme::{lie_trotter, named, strang};
use splitflow_core::Complex64;

fn to_nalgebra(m: &Matrix) -> DMatrix<Complex<f64>> {
    let n = m.size();
    DMatrix::from_fn(n, n, |i, j| {
        let v = m.get(i, j);
        Complex::new(v.re, v.im)
    })
}

fn max_diff(a: &Matrix, b: &DMatrix<Complex<f64>>) -> f64 {
    let n = a.size();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a.get(i, j), b[(i, j)]);
            worst = worst.max(((x.re - y.re).powi(2) + (x.im - y.im).powi(2)).sqrt());
        }
    }
    worst
}

#[test]
fn expm_matches_nalgebra_on_random_matrices() {
    for seed in 0..10 {
        let pair = MatrixPair::random(3, seed);
        for scale in [
            Complex64::new(0.3, 0.0),
            Complex64::new(2.5, 0.0),
            Complex64::new(0.5, -0.8),
        ] {
            let m = pair.m1.add(&pair.m2).scale(scale);
            let ours = expm(&m);
            let theirs = to_nalgebra(&m).exp();
            let size = theirs.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(
                max_diff(&ours, &theirs) <= 1e-13 * size.max(1.0),
                "seed {seed} scale {scale}"
            );
        }
    }
}

#[test]
fn expm_inverse_is_expm_of_negation() {
    for seed in 0..10 {
        let m = MatrixPair::random(3, seed).m2;
        let prod = &expm(&m) * &expm(&m.scale(Complex64::new(-1.0, 0.0)));
        assert!(prod.sub(&Matrix::identity(3)).frobenius() <= 1e-12);
    }
}

#[test]
fn scalar_generators_reduce_to_exponentials() {
    let pair = MatrixPair::new(Matrix::from_real(1, &[0.4]), Matrix::from_real(1, &[-1.3]));
    let s = named("4th", 2).unwrap();
    assert!(scheme_matrix_error(&pair, &s, 0.7).unwrap() <= 1e-14);
    let e = expm(&Matrix::from_real(1, &[0.4]));
    assert_relative_eq!(e.get(0, 0).re, 0.4f64.exp(), max_relative = 1e-15);
}

#[test]
fn errors_decrease_with_t_over_the_fit_ranges() {
    for name in ["lie-trotter", "strang", "3rd", "4th", "6th", "8th"] {
        let s = named(name, 2).unwrap();
        let ts = certification_window(s.declared_order()).t_values();
        for seed in 0..5 {
            let pair = MatrixPair::random(3, seed);
            let errs: Vec<f64> = ts
                .iter()
                .map(|&t| scheme_matrix_error(&pair, &s, t).unwrap())
                .collect();
            assert!(
                errs.windows(2).all(|w| w[0] < w[1]),
                "{name} seed {seed}: {errs:?}"
            );
        }
    }
}

#[test]
fn registered_schemes_certify_on_five_seeds() {
    let seeds: Vec<u64> = (0..5).collect();
    for name in ["lie-trotter", "strang", "3rd", "4th", "6th", "8th"] {
        let s = named(name, 2).unwrap();
        for c in certify_order(&s, &seeds).unwrap() {
            assert!(
                c.passed(),
                "{name} seed {}: {:?} vs {} ± {}",
                c.seed,
                c.slope,
                c.expected,
                c.tolerance
            );
        }
    }
}

#[test]
fn documented_slope_examples() {
    let pair = MatrixPair::random(3, 0);
    let ts = log2_range(-10.0, -3.0, 8);
    let lt = local_order_slope(&pair, &lie_trotter(2).unwrap(), &ts).unwrap();
    assert!((lt - 2.0).abs() <= 0.2);
    let st = local_order_slope(&pair, &strang(2).unwrap(), &ts).unwrap();
    assert!((st - 3.0).abs() <= 0.3);
}
