use drift_gauntlet::adversary::{
    binarize_profile, difference_nullspace, gen_periodic, gen_rand_const, gen_rand_periodic,
    sample_function_to_profile, solve_nullspace, uniform_grid, verify_function_limiting, verify_profile,
    AdversarialFunction, AdversarialProfile, Shape, DEFAULT_GRID_POINTS, DEFAULT_QUAD_PANELS,
};
use drift_gauntlet::linalg::{distance_to_span, orthonormalize};
use drift_gauntlet::rng::rng_from_seed;
use drift_gauntlet::windowing::{build_weight_matrix, enumerate_pairs, ContinuousScheme, WindowScheme};
use drift_gauntlet::{Error, Rational};
use drift_gauntlet_oracles as oracle;
use num_traits::Zero;
use proptest::prelude::*;

fn oracle_rows(scheme: &WindowScheme, n: usize) -> Vec<Vec<Rational>> {
    let pairs: Vec<_> = enumerate_pairs(scheme, n)
        .unwrap()
        .iter()
        .map(|p| ((p.w1.start, p.w1.end), (p.w2.start, p.w2.end)))
        .collect();
    oracle::difference_rows(&pairs, n)
}

fn small_scheme() -> impl Strategy<Value = WindowScheme> {
    prop_oneof![
        (1usize..4).prop_map(WindowScheme::sliding),
        (1usize..4, 1usize..4).prop_map(|(a, l)| WindowScheme::fixed(a, l)),
        (1usize..4, 1usize..4).prop_map(|(a, l)| WindowScheme::growing(a, l)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_kernel_spans_the_exact_kernel(scheme in small_scheme(), n in 2usize..11) {
        let Ok(w) = build_weight_matrix::<f64>(&scheme, n) else { return Ok(()); };
        let rows = oracle_rows(&scheme, n);
        let exact = oracle::nullspace(&rows, n);
        let svd = difference_nullspace(&w);
        prop_assert_eq!(svd.dimension, exact.len());
        for b in &svd.basis {
            prop_assert!(w.max_residual(b).unwrap() <= 1e-9);
        }
        let exact_f: Vec<Vec<f64>> = exact.iter().map(|v| v.iter().map(oracle::q_to_f64).collect()).collect();
        let exact_on = orthonormalize(&exact_f, 1e-12);
        for (e, v) in exact_f.iter().zip(&exact) {
            let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(distance_to_span(e, &svd.basis) <= 1e-9 * norm.max(1.0));
            prop_assert!(oracle::max_abs_residual(&rows, v).is_zero());
        }
        for b in &svd.basis {
            prop_assert!(distance_to_span(b, &exact_on) <= 1e-9);
        }
    }

    #[test]
    fn solve_agrees_with_exact_kernel_dimension(scheme in small_scheme(), n in 2usize..11) {
        let Ok(w) = build_weight_matrix::<f64>(&scheme, n) else { return Ok(()); };
        let dim = oracle::nullspace(&oracle_rows(&scheme, n), n).len();
        match solve_nullspace(&w) {
            Ok(v) => {
                prop_assert!(dim > 1);
                prop_assert!(!v.is_constant());
                prop_assert!(w.max_residual(v.values()).unwrap() <= 1e-9);
                prop_assert!(v.values().iter().all(|x| (0.0..=1.0).contains(x)));
            }
            Err(e) => {
                prop_assert!(matches!(e, Error::NoAdversarialExists));
                prop_assert_eq!(dim, 1);
            }
        }
    }

    #[test]
    fn constants_are_never_adversarial(scheme in small_scheme(), n in 2usize..20, k in 0i64..=4) {
        let v = AdversarialProfile::<Rational>::user(vec![oracle::q(k, 4); n]).unwrap();
        if let Ok(r) = verify_profile(&v, &scheme, n) {
            prop_assert!(r.exact_zero);
            prop_assert!(!r.is_adversarial);
        }
    }
}

#[test]
fn binarize_matches_brute_force_feasibility() {
    for scheme in [
        WindowScheme::sliding(2),
        WindowScheme::sliding(3),
        WindowScheme::fixed(2, 2),
        WindowScheme::growing(2, 1),
        WindowScheme::growing(2, 2),
    ] {
        for n in 6..=10 {
            let Ok(w) = build_weight_matrix::<f64>(&scheme, n) else {
                continue;
            };
            let members = oracle::binary_kernel_members(&oracle_rows(&scheme, n), n);
            let full = (1u32 << n) - 1;
            let nonconstant: Vec<u32> = members.into_iter().filter(|&m| m != 0 && m != full).collect();
            let start = AdversarialProfile::user(vec![0.5; n]).unwrap();
            match binarize_profile(&start, &w) {
                Ok(b) => {
                    let mask = b
                        .values()
                        .iter()
                        .enumerate()
                        .fold(0u32, |m, (i, &x)| m | ((x as u32) << i));
                    assert!(nonconstant.contains(&mask), "{} n={n}", scheme.label());
                }
                Err(Error::BinarizationInfeasible { .. }) => {
                    assert!(nonconstant.is_empty(), "{} n={n} has {:?}", scheme.label(), nonconstant);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn family_certificates_are_exact() {
    let n = 1000;
    let periodic = gen_periodic::<Rational>(100, 50, n).unwrap();
    for (scheme, hidden) in [
        (WindowScheme::sliding(100), true),
        (WindowScheme::fixed(100, 100), true),
        (WindowScheme::fixed(150, 100), false),
        (WindowScheme::growing(100, 100), false),
    ] {
        let r = verify_profile(&periodic, &scheme, n).unwrap();
        assert_eq!(r.is_adversarial, hidden, "{}", scheme.label());
    }
    let mut rng = rng_from_seed(8);
    let rc = gen_rand_const::<Rational, _>(100, n, &mut rng).unwrap();
    for scheme in [WindowScheme::growing(100, 100), WindowScheme::fixed(100, 100)] {
        assert!(verify_profile(&rc, &scheme, n).unwrap().is_adversarial);
    }
    let rp = gen_rand_periodic::<Rational, _>(100, 100, n, &mut rng).unwrap();
    assert!(
        verify_profile(&rp, &WindowScheme::fixed(100, 100), n)
            .unwrap()
            .is_adversarial
    );
    for scheme in [
        WindowScheme::fixed(150, 100),
        WindowScheme::growing(100, 100),
        WindowScheme::growing(150, 100),
        WindowScheme::sliding(100),
    ] {
        assert!(
            !verify_profile(&rp, &scheme, n).unwrap().is_adversarial,
            "{}",
            scheme.label()
        );
    }
}

#[test]
fn float_profiles_from_families_certify_exactly() {
    let v = gen_periodic::<f64>(10, 3, 100).unwrap();
    let r = verify_profile(&v, &WindowScheme::sliding(10), 100).unwrap();
    assert!(r.exact_zero && r.is_adversarial);
}

fn table_one() -> Vec<(AdversarialFunction, ContinuousScheme, (f64, f64))> {
    vec![
        (
            AdversarialFunction::Periodic {
                l: 100.0,
                pattern: Shape::square(1, 2),
            },
            ContinuousScheme::Sliding { l: 100.0 },
            (100.0, 900.0),
        ),
        (
            AdversarialFunction::PeriodicAfterMatchedMean {
                a: 150.0,
                l: 100.0,
                head: Shape::Steps {
                    values: vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0],
                },
                tail: Shape::Sine {
                    offset: 0.5,
                    amplitude: 0.4,
                },
            },
            ContinuousScheme::Fixed { a: 150.0, l: 100.0 },
            (150.0, 900.0),
        ),
        (
            AdversarialFunction::ConstantAfter {
                a: 100.0,
                head: Shape::Steps {
                    values: vec![0.0, 1.0, 1.0, 0.2],
                },
                c: 0.55,
            },
            ContinuousScheme::Growing { a: 100.0, l: 100.0 },
            (100.0, 900.0),
        ),
    ]
}

#[test]
fn table_one_families_satisfy_the_integral_identities() {
    for (f, scheme, (t0, t1)) in table_one() {
        f.validate().unwrap();
        let grid = uniform_grid(t0, t1, DEFAULT_GRID_POINTS);
        let r = verify_function_limiting(&f, &scheme, &grid, DEFAULT_QUAD_PANELS).unwrap();
        assert!(r.max_violation <= 1e-8, "{}: {r:?}", f.name());
        assert!(r.range_ok);
    }
}

#[test]
fn mismatched_mean_tail_is_caught() {
    let f = AdversarialFunction::PeriodicAfterMatchedMean {
        a: 100.0,
        l: 100.0,
        head: Shape::Constant { value: 0.7 },
        tail: Shape::square(1, 2),
    };
    assert!(f.validate().is_err());
    let grid = uniform_grid(100.0, 900.0, DEFAULT_GRID_POINTS);
    let r = verify_function_limiting(
        &f,
        &ContinuousScheme::Fixed { a: 100.0, l: 100.0 },
        &grid,
        DEFAULT_QUAD_PANELS,
    )
    .unwrap();
    assert!(r.max_violation >= 1e-3);
}

#[test]
fn sampled_square_waves_certify_exactly_against_integer_schemes() {
    // One sample per unit time: the sampled square wave is the finite family.
    let f = AdversarialFunction::Periodic {
        l: 10.0,
        pattern: Shape::square(4, 10),
    };
    let v = sample_function_to_profile(&f, 100, (0.0, 99.0)).unwrap();
    assert_eq!(v.values(), gen_periodic::<f64>(10, 4, 100).unwrap().values());
    let r = verify_profile(&v, &WindowScheme::sliding(10), 100).unwrap();
    assert!(r.exact_zero);

    let g = AdversarialFunction::ConstantAfter {
        a: 4.0,
        head: Shape::Steps {
            values: vec![1.0, 0.0, 0.0, 1.0],
        },
        c: 0.5,
    };
    let v = sample_function_to_profile(&g, 40, (0.0, 39.0)).unwrap();
    let r = verify_profile(&v, &WindowScheme::growing(4, 3), 40).unwrap();
    assert!(r.exact_zero && r.is_adversarial);
}

#[test]
fn smooth_periodic_sampling_has_small_residual() {
    let f = AdversarialFunction::Periodic {
        l: 100.0,
        pattern: Shape::Sine {
            offset: 0.5,
            amplitude: 0.5,
        },
    };
    let v = sample_function_to_profile(&f, 1000, (0.0, 999.0)).unwrap();
    let w = build_weight_matrix::<f64>(&WindowScheme::sliding(100), 1000).unwrap();
    assert!(w.max_residual(v.values()).unwrap() <= 1e-6);
}

#[test]
fn boundary_effect_passes_sliding_but_leaves_the_range() {
    let f = AdversarialFunction::BoundaryEffect {
        l: 1.0,
        p: Shape::Constant { value: 0.5 },
        q: Shape::Sine {
            offset: 0.0,
            amplitude: 0.1,
        },
    };
    f.validate().unwrap();
    let narrow = uniform_grid(-1.0, 1.0, DEFAULT_GRID_POINTS);
    let r = verify_function_limiting(&f, &ContinuousScheme::Sliding { l: 1.0 }, &narrow, DEFAULT_QUAD_PANELS).unwrap();
    assert!(r.max_violation <= 1e-8 && r.range_ok, "{r:?}");
    let wide = uniform_grid(-40.0, 40.0, DEFAULT_GRID_POINTS);
    let r = verify_function_limiting(&f, &ContinuousScheme::Sliding { l: 1.0 }, &wide, DEFAULT_QUAD_PANELS).unwrap();
    assert!(r.max_violation <= 1e-8, "{r:?}");
    assert!(!r.range_ok);
}
