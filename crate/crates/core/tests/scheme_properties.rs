use proptest::prelude::*;
use splitflow_core::scheme::{
    count_factors, expand_to_dimension, factor_count_table, lie_trotter, merge_adjacent, named,
    strang, substitute_coordinate, u_family, w_family, z_family, SCHEME_NAMES,
};
use splitflow_core::{Complex64, Factor, Scheme};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn assert_consistent(s: &Scheme) {
    for (i, sum) in s.coefficient_sums().iter().enumerate() {
        assert!(
            (sum - one()).norm() <= 1e-12,
            "{}: coordinate {} sums to {sum}",
            s.label(),
            i + 1
        );
    }
}

fn coeff() -> impl Strategy<Value = Complex64> {
    prop_oneof![
        Just(Complex64::new(0.5, 0.0)),
        Just(Complex64::new(-0.5, 0.0)),
        Just(Complex64::new(1.0, 0.0)),
        Just(Complex64::new(0.0, 0.25)),
        Just(Complex64::new(0.0, -0.25)),
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im)),
    ]
}

fn raw_scheme() -> impl Strategy<Value = Scheme> {
    (2usize..=4).prop_flat_map(|dim| {
        prop::collection::vec((1..=dim, coeff()), 0..16).prop_map(move |fs| {
            let factors = fs.into_iter().map(|(c, k)| Factor::new(c, k)).collect();
            Scheme::new(dim, factors, 1, "random").unwrap()
        })
    })
}

proptest! {
    #[test]
    fn merge_is_idempotent(s in raw_scheme()) {
        let once = merge_adjacent(&s);
        prop_assert!(once.is_normalized());
        prop_assert_eq!(merge_adjacent(&once), once);
    }

    #[test]
    fn merge_keeps_coefficient_sums(s in raw_scheme()) {
        let before = s.coefficient_sums();
        let after = merge_adjacent(&s).coefficient_sums();
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).norm() <= 1e-13);
        }
    }

    #[test]
    fn scaling_scales_sums(s in raw_scheme(), k in coeff()) {
        let scaled = s.scaled(k);
        for (a, b) in s.coefficient_sums().iter().zip(scaled.coefficient_sums()) {
            prop_assert!((a * k - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn strang_is_a_palindrome(n in 1usize..12) {
        let s = strang(n).unwrap();
        let rev: Vec<Factor> = s.factors().iter().rev().copied().collect();
        prop_assert_eq!(s.factors(), rev.as_slice());
        prop_assert_eq!(s.len(), 2 * n - 1);
    }

    #[test]
    fn lie_trotter_uses_each_coordinate_once(n in 1usize..12) {
        let s = lie_trotter(n).unwrap();
        prop_assert_eq!(s.multiplicities(), vec![1; n]);
        prop_assert!(!s.has_complex_coefficients());
    }
}

#[test]
fn every_constructor_is_consistent() {
    for n in 1..=8 {
        assert_consistent(&lie_trotter(n).unwrap());
        assert_consistent(&strang(n).unwrap());
    }
    for k in 0..=4 {
        assert_consistent(&u_family(k).unwrap());
    }
    for k in 0..=3 {
        assert_consistent(&w_family(k).unwrap());
    }
    for k in 0..=6 {
        assert_consistent(&z_family(k).unwrap());
    }
    for base in [
        u_family(1).unwrap(),
        w_family(1).unwrap(),
        u_family(2).unwrap(),
    ] {
        for n in 2..=6 {
            let e = expand_to_dimension(&base, n).unwrap();
            assert!(e.is_normalized());
            assert_consistent(&e);
        }
    }
    for name in SCHEME_NAMES {
        for dim in 2..=3 {
            if let Ok(s) = named(name, dim) {
                assert_consistent(&s);
            }
        }
    }
}

#[test]
fn expansion_counts_follow_the_recursion() {
    for (base, q) in [(u_family(1).unwrap(), 5), (w_family(1).unwrap(), 7)] {
        for n in 2..=6 {
            let e = expand_to_dimension(&base, n).unwrap();
            assert_eq!(e.len() as u64, count_factors(n, q).unwrap(), "q={q} N={n}");
        }
    }
    let u2 = u_family(2).unwrap();
    assert_eq!(
        expand_to_dimension(&u2, 3).unwrap().len() as u64,
        count_factors(3, 9).unwrap()
    );
    let w2 = w_family(2).unwrap();
    assert_eq!(
        expand_to_dimension(&w2, 4).unwrap().len() as u64,
        count_factors(4, 19).unwrap()
    );
}

#[test]
fn expansion_of_strang_base_follows_the_recursion() {
    let base = Scheme::new(
        2,
        vec![
            Factor::real(2, 0.5),
            Factor::real(1, 1.0),
            Factor::real(2, 0.5),
        ],
        2,
        "strang-yx",
    )
    .unwrap();
    for n in 2..=7 {
        let e = expand_to_dimension(&base, n).unwrap();
        assert_eq!(e.len() as u64, count_factors(n, 3).unwrap());
        assert_consistent(&e);
    }
}

#[test]
fn substitution_preserves_the_untouched_coordinate() {
    let u1 = u_family(1).unwrap();
    let e = substitute_coordinate(&u1, &u1, 2, 3).unwrap();
    let before: Vec<Complex64> = u1
        .factors()
        .iter()
        .filter(|f| f.coord == 1)
        .map(|f| f.coeff)
        .collect();
    let after: Vec<Complex64> = e
        .factors()
        .iter()
        .filter(|f| f.coord == 1)
        .map(|f| f.coeff)
        .collect();
    assert_eq!(before, after);
    assert_eq!(e.dim(), 3);
    assert_eq!(e.len() as u64, 3 * 5 + 2);
    assert_consistent(&e);
}

#[test]
fn table_rows_are_increasing() {
    for row in factor_count_table(8) {
        assert!(row.counts.windows(2).all(|w| w[0] < w[1]), "{}", row.name);
    }
}
