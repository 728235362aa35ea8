use drift_gauntlet::windowing::{build_weight_matrix, enumerate_pairs, union_scheme, WindowScheme};
use drift_gauntlet::Rational;
use drift_gauntlet_oracles as oracle;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn base_scheme() -> impl Strategy<Value = WindowScheme> {
    prop_oneof![
        (1usize..5, 1usize..4).prop_map(|(l, s)| WindowScheme::sliding(l).with_stride(s)),
        (1usize..5, 1usize..5, 1usize..4).prop_map(|(a, l, s)| WindowScheme::fixed(a, l).with_stride(s)),
        (1usize..5, 1usize..5, 1usize..4).prop_map(|(a, l, s)| WindowScheme::growing(a, l).with_stride(s)),
    ]
}

fn oracle_pairs(scheme: &WindowScheme, n: usize) -> Vec<oracle::Pair> {
    match *scheme {
        WindowScheme::Sliding { l, .. } => oracle::sliding_pairs(l, n),
        WindowScheme::Fixed { a, l, .. } => oracle::fixed_pairs(a, l, n),
        WindowScheme::Growing { a, l, .. } => oracle::growing_pairs(a, l, n),
        _ => unreachable!("base schemes only"),
    }
}

fn rational_profile(num: &[i64]) -> Vec<Rational> {
    num.iter().map(|&k| oracle::q(k, 7)).collect()
}

fn max_residual(scheme: &WindowScheme, v: &[Rational]) -> Rational {
    let w = build_weight_matrix::<Rational>(scheme, v.len()).unwrap();
    w.difference_residuals(v)
        .unwrap()
        .into_iter()
        .map(|r| r.abs())
        .fold(Rational::zero(), |m, x| if x > m { x } else { m })
}

/// Exact kernel of a scheme's difference rows, from the oracle.
fn oracle_kernel(scheme: &WindowScheme, n: usize) -> Vec<Vec<Rational>> {
    let pairs: Vec<_> = enumerate_pairs(scheme, n)
        .unwrap()
        .iter()
        .map(|p| ((p.w1.start, p.w1.end), (p.w2.start, p.w2.end)))
        .collect();
    oracle::nullspace(&oracle::difference_rows(&pairs, n), n)
}

proptest! {
    #[test]
    fn unit_stride_pairs_match_definitions(scheme in base_scheme(), n in 2usize..30) {
        let scheme = scheme.with_stride(1);
        let expected = oracle_pairs(&scheme, n);
        match enumerate_pairs(&scheme, n) {
            Ok(pairs) => {
                let got: Vec<_> = pairs.iter().map(|p| ((p.w1.start, p.w1.end), (p.w2.start, p.w2.end))).collect();
                prop_assert_eq!(got, expected);
            }
            Err(_) => prop_assert!(expected.is_empty()),
        }
    }

    #[test]
    fn weight_rows_match_oracle_rows(scheme in base_scheme(), n in 2usize..20) {
        if let Ok(w) = build_weight_matrix::<Rational>(&scheme, n) {
            prop_assert!(w.pair(0).is_none());
            for r in 1..w.row_count() {
                let p = w.pair(r).unwrap();
                let expected = oracle::difference_row(n, (p.w1.start, p.w1.end), (p.w2.start, p.w2.end));
                prop_assert_eq!(w.dense_row(r), expected);
            }
        }
    }

    #[test]
    fn constants_are_annihilated(scheme in base_scheme(), n in 2usize..30, k in -5i64..5) {
        if let Ok(w) = build_weight_matrix::<Rational>(&scheme, n) {
            let v = vec![oracle::q(k, 3); n];
            prop_assert!(w.difference_residuals(&v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn strided_pairs_are_a_regular_subset(scheme in base_scheme(), n in 2usize..40) {
        let full = enumerate_pairs(&scheme.clone().with_stride(1), n);
        if let (Ok(full), Ok(strided)) = (full, enumerate_pairs(&scheme, n)) {
            let stride = match scheme {
                WindowScheme::Sliding { stride, .. }
                | WindowScheme::Fixed { stride, .. }
                | WindowScheme::Growing { stride, .. } => stride,
                _ => unreachable!(),
            };
            let first = full[0].time();
            let expected: Vec<_> = full.into_iter().filter(|p| (p.time() - first) % stride == 0).collect();
            prop_assert_eq!(strided, expected);
        }
    }

    #[test]
    fn union_residual_is_member_maximum(
        s1 in base_scheme(),
        s2 in base_scheme(),
        num in prop::collection::vec(0i64..8, 10..25),
    ) {
        let v = rational_profile(&num);
        let n = v.len();
        let (Ok(_), Ok(_)) = (enumerate_pairs(&s1, n), enumerate_pairs(&s2, n)) else {
            return Ok(());
        };
        let u = union_scheme(&[s1.clone(), s2.clone()]).unwrap();
        let r1 = max_residual(&s1, &v);
        let r2 = max_residual(&s2, &v);
        prop_assert_eq!(max_residual(&u, &v), if r1 > r2 { r1 } else { r2 });
    }

    #[test]
    fn chunking_only_enlarges_the_kernel(scheme in base_scheme(), c in 1usize..4, n in 4usize..13) {
        let chunked = WindowScheme::chunked(scheme.clone(), c);
        if enumerate_pairs(&chunked, n).is_err() {
            return Ok(());
        }
        for v in oracle_kernel(&scheme, n) {
            prop_assert!(max_residual(&chunked, &v).is_zero());
        }
    }

    #[test]
    fn union_kernel_lies_in_every_member_kernel(s1 in base_scheme(), s2 in base_scheme(), n in 4usize..13) {
        let (Ok(_), Ok(_)) = (enumerate_pairs(&s1, n), enumerate_pairs(&s2, n)) else {
            return Ok(());
        };
        let u = union_scheme(&[s1.clone(), s2.clone()]).unwrap();
        for v in oracle_kernel(&u, n) {
            prop_assert!(max_residual(&s1, &v).is_zero());
            prop_assert!(max_residual(&s2, &v).is_zero());
        }
    }

    #[test]
    fn scheme_json_round_trip(scheme in base_scheme(), c in 1usize..5, wrap in any::<bool>()) {
        let scheme = if wrap { WindowScheme::chunked(scheme, c) } else { scheme };
        prop_assert_eq!(WindowScheme::from_json(&scheme.to_json()).unwrap(), scheme);
    }
}

#[test]
fn float_and_rational_residuals_agree() {
    let scheme = WindowScheme::growing(3, 2);
    let v = rational_profile(&[0, 7, 3, 5, 1, 2, 7, 0, 4]);
    let vf: Vec<f64> = v.iter().map(oracle::q_to_f64).collect();
    let wf = build_weight_matrix::<f64>(&scheme, v.len()).unwrap();
    let exact = max_residual(&scheme, &v);
    assert!((wf.max_residual(&vf).unwrap() - oracle::q_to_f64(&exact)).abs() < 1e-12);
}
