//! The combinatorial brute-force route: H and K structural properties and
//! the cross-check against the determinant-based gap.

use proptest::prelude::*;
use qfivol::campaign::{random_faithful_state, random_observables, trial_rng};
use qfivol::metric::ObservableSet;
use qfivol::monotone::{default_order_grid, tilde_dominates, MonotoneFunction, TildeOrder};
use qfivol::oracle::{
    d_determinant, f_bruteforce, f_bruteforce_checked, h_value, k_value,
    k_value_permutation_route, multi_indices, product_sum_exchange_check,
    row_permutation_sign_check, MultiIndex, OracleBudget, ReImSelector,
};
use qfivol::volume::{build_gram_report, check_equality_condition};
use qfivol::{C64, Error, RMat};
use rand::seq::SliceRandom;
use rand::Rng;

fn random_tuple(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| 10f64.powf(rng.random_range(-2.0..0.3))).collect()
}

#[test]
fn h_positivity_minimality_and_upper_bound() {
    let mut rng = trial_rng(51, 0);
    for trial in 0..2000 {
        let len = 1 + trial % 4;
        let xs = random_tuple(&mut rng, len);
        let ys = random_tuple(&mut rng, len);
        let avg_product: f64 = xs.iter().zip(&ys).map(|(x, y)| 0.5 * (x + y)).product();
        let h_sld = h_value(MonotoneFunction::Sld, &xs, &ys).unwrap();
        assert!(h_sld > 0.0, "H_SLD not strictly positive at trial {trial}");
        for f in MonotoneFunction::regular_catalog() {
            let h = h_value(f, &xs, &ys).unwrap();
            assert!(h_sld <= h + 1e-12, "{f} undercuts the SLD floor");
            assert!(h <= avg_product + 1e-12, "{f} exceeds the product bound");
        }
    }
}

#[test]
fn h_respects_the_tilde_order() {
    let grid = default_order_grid();
    let fs = MonotoneFunction::regular_catalog();
    let mut rng = trial_rng(52, 0);
    for trial in 0..500 {
        let len = 1 + trial % 4;
        let xs = random_tuple(&mut rng, len);
        let ys = random_tuple(&mut rng, len);
        for i in 0..fs.len() {
            for j in 0..fs.len() {
                if i == j {
                    continue;
                }
                if tilde_dominates(&fs[i], &fs[j], &grid).unwrap() == TildeOrder::FLeG {
                    let hi = h_value(fs[i], &xs, &ys).unwrap();
                    let hj = h_value(fs[j], &xs, &ys).unwrap();
                    assert!(
                        hi <= hj + 1e-12,
                        "H^{} = {hi} > H^{} = {hj}",
                        fs[i],
                        fs[j]
                    );
                }
            }
        }
    }
}

#[test]
fn h_is_symmetric_under_simultaneous_permutations() {
    let mut rng = trial_rng(53, 0);
    for trial in 0..500 {
        let len = 2 + trial % 3;
        let xs = random_tuple(&mut rng, len);
        let ys = random_tuple(&mut rng, len);
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut rng);
        let xp: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
        let yp: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
        for f in MonotoneFunction::regular_catalog() {
            let a = h_value(f, &xs, &ys).unwrap();
            let b = h_value(f, &xp, &yp).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{f}: {a} vs {b}");
        }
    }
}

#[test]
fn h_edge_cases_and_errors() {
    let sld = MonotoneFunction::Sld;
    // single factor collapses to the tilde mean
    let h = h_value(sld, &[0.25], &[0.75]).unwrap();
    assert!((h - 0.375).abs() < 1e-15);
    // equal tuples leave the full product
    let h = h_value(sld, &[0.2, 0.5], &[0.2, 0.5]).unwrap();
    assert!((h - 0.1).abs() < 1e-15);
    // frozen two-factor value: (1/2)² − (1/2 − 3/8)²
    let h = h_value(sld, &[0.25, 0.25], &[0.75, 0.75]).unwrap();
    assert!((h - 15.0 / 64.0).abs() < 1e-15);

    assert!(h_value(sld, &[0.25], &[0.75, 0.5]).is_err());
    assert!(h_value(sld, &[0.0], &[0.5]).is_err());
    assert!(h_value(MonotoneFunction::Rld, &[0.25], &[0.75]).is_err());
}

#[test]
fn k_is_nonnegative_and_both_routes_agree_on_a_full_enumeration() {
    let mut rng = trial_rng(54, 0);
    for (dim, n_obs) in [(2usize, 2usize), (3, 2), (2, 3), (3, 3)] {
        let state = random_faithful_state(&mut rng, dim, 1e-3).unwrap();
        let obs = random_observables(&mut rng, dim, n_obs).unwrap();
        let eo = obs.in_eigenbasis(&state).unwrap();
        let indices = multi_indices(dim, n_obs);
        assert_eq!(indices.len(), dim.pow(n_obs as u32));
        for alpha in &indices {
            for beta in &indices {
                let k = k_value(alpha, beta, &eo).unwrap();
                let kp = k_value_permutation_route(alpha, beta, &eo).unwrap();
                assert!(k >= 0.0, "negative K: {k}");
                assert!(
                    (k - kp).abs() <= 1e-10 * k.abs().max(kp.abs()).max(1.0),
                    "route mismatch at n={dim} N={n_obs}: {k} vs {kp}"
                );
            }
        }
    }
}

#[test]
fn d_matrices_detect_independence() {
    // for independent centered observables some selector hits a
    // nonvanishing determinant; repeated observables never do
    let mut rng = trial_rng(55, 0);
    let state = random_faithful_state(&mut rng, 3, 1e-3).unwrap();
    let obs = random_observables(&mut rng, 3, 2).unwrap();
    assert!(!check_equality_condition(&state, &obs).unwrap());
    let eo = obs.in_eigenbasis(&state).unwrap();
    let indices = multi_indices(3, 2);
    let mut witness = 0.0f64;
    for u in ReImSelector::all(2) {
        for alpha in &indices {
            for beta in &indices {
                witness = witness.max(d_determinant(&u, alpha, beta, &eo).unwrap().abs());
            }
        }
    }
    assert!(witness > 1e-12, "no rank witness found: max |det D| = {witness}");

    let twice = ObservableSet::new(vec![obs.get(0).clone(), obs.get(0).clone()]).unwrap();
    let eo2 = twice.in_eigenbasis(&state).unwrap();
    for u in ReImSelector::all(2) {
        for alpha in &indices {
            for beta in &indices {
                let d = d_determinant(&u, alpha, beta, &eo2).unwrap();
                assert!(d.abs() <= 1e-14, "repeated rows gave det {d}");
            }
        }
    }
}

#[test]
fn bruteforce_agrees_with_the_determinant_route() {
    let mut rng = trial_rng(56, 0);
    for trial in 0..10u64 {
        let dim = 2 + (trial as usize) % 2;
        let n_obs = 1 + (trial as usize) % 3;
        let state = random_faithful_state(&mut rng, dim, 1e-3).unwrap();
        let obs = random_observables(&mut rng, dim, n_obs).unwrap();
        for f in MonotoneFunction::regular_catalog() {
            let det_route = build_gram_report(f, &state, &obs).unwrap().f_det;
            let out = f_bruteforce_checked(f, &state, &obs, &OracleBudget::default()).unwrap();
            assert!(
                (det_route - out.value).abs() <= 1e-8 * det_route.abs().max(1.0),
                "{f} trial {trial}: {det_route} vs {}",
                out.value
            );
            assert!(out.max_k_route_dev <= 1e-10);
            assert!(out.min_k >= -1e-12);
            assert!(out.value >= -1e-10);
        }
    }
}

#[test]
fn bruteforce_vanishes_on_dependent_sets() {
    let mut rng = trial_rng(57, 0);
    let state = random_faithful_state(&mut rng, 2, 1e-3).unwrap();
    let base = random_observables(&mut rng, 2, 1).unwrap();
    let obs = ObservableSet::new(vec![
        base.get(0).clone(),
        base.get(0) * C64::new(2.0, 0.0),
    ])
    .unwrap();
    for f in MonotoneFunction::regular_catalog() {
        let v = f_bruteforce(f, &state, &obs).unwrap();
        assert!(v.abs() <= 1e-10, "{f}: dependent oracle value {v}");
    }
}

#[test]
fn budget_is_enforced_with_diagnostics() {
    let mut rng = trial_rng(58, 0);
    let state = random_faithful_state(&mut rng, 4, 1e-3).unwrap();
    let obs = random_observables(&mut rng, 4, 2).unwrap();
    match f_bruteforce(MonotoneFunction::Sld, &state, &obs) {
        Err(Error::BudgetExceeded { n, n_obs, .. }) => {
            assert_eq!(n, 4);
            assert_eq!(n_obs, 2);
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
    // the widened budget admits n = 4 with two observables
    let v = qfivol::oracle::f_bruteforce_with_budget(
        MonotoneFunction::Sld,
        &state,
        &obs,
        &OracleBudget::wide(),
    )
    .unwrap();
    assert!(v >= -1e-10);

    // non-faithful states are rejected before any enumeration
    let pure = qfivol::spectral::SpectralState::from_diagonal(&[1.0, 0.0]).unwrap();
    let small = random_observables(&mut rng, 2, 1).unwrap();
    assert!(matches!(
        f_bruteforce(MonotoneFunction::Sld, &pure, &small),
        Err(Error::NotFaithful(_))
    ));
}

#[test]
fn exchange_identity_on_random_tables() {
    let mut rng = trial_rng(59, 0);
    for trial in 0..100 {
        let n_rows = 1 + trial % 3;
        let n_cols = 1 + (trial / 3) % 4;
        let t = RMat::from_fn(n_rows, n_cols, |_, _| rng.random_range(0.0..2.0));
        assert!(product_sum_exchange_check(&t).unwrap(), "trial {trial}");
    }
    let bad = RMat::from_element(1, 1, f64::NAN);
    assert!(product_sum_exchange_check(&bad).is_err());
}

#[test]
fn row_permutation_signs_on_random_matrices() {
    let mut rng = trial_rng(60, 0);
    for trial in 0..100 {
        let n = 2 + trial % 4;
        let m = RMat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut rng);
        assert!(row_permutation_sign_check(&m, &sigma).unwrap(), "trial {trial}");
    }
    let m = RMat::identity(3, 3);
    assert!(row_permutation_sign_check(&m, &[0, 0, 1]).is_err());
    assert!(row_permutation_sign_check(&m, &[0, 1]).is_err());
}

#[test]
fn multi_index_enumeration_is_lexicographic_and_complete() {
    let indices = multi_indices(3, 2);
    assert_eq!(indices.len(), 9);
    assert_eq!(indices[0].0, vec![0, 0]);
    assert_eq!(indices[1].0, vec![0, 1]);
    assert_eq!(indices[8].0, vec![2, 2]);
    let mi = MultiIndex(vec![2, 0]);
    assert_eq!(mi.select(&[10.0, 20.0, 30.0]), vec![30.0, 10.0]);
}

proptest! {
    #[test]
    fn h_is_symmetric_in_its_two_tuples(
        seed in 0u64..1000,
        len in 1usize..4,
    ) {
        let mut rng = trial_rng(61, seed);
        let xs = random_tuple(&mut rng, len);
        let ys = random_tuple(&mut rng, len);
        for f in MonotoneFunction::regular_catalog() {
            let a = h_value(f, &xs, &ys).unwrap();
            let b = h_value(f, &ys, &xs).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
