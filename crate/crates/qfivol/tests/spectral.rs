//! Spectral decomposition contracts and the scalar/superoperator mean
//! calculus, exercised through the public API with randomized inputs.

use proptest::prelude::*;
use qfivol::campaign::{random_faithful_state, random_observables, trial_rng};
use qfivol::monotone::MonotoneFunction;
use qfivol::spectral::{
    mean_superop_apply, mean_superop_solve, scalar_mean, tilde_mean_gap, SpectralState,
    RECONSTRUCTION_TOL,
};
use qfivol::{C64, CMat, Error};
use rand::Rng;

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Log-uniform draw over [1e-6, 1e3].
fn log_uniform(rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.random_range(-6.0..3.0))
}

#[test]
fn generated_states_satisfy_the_type_invariants() {
    for dim in 2..=8 {
        let mut rng = trial_rng(11, dim as u64);
        let state = random_faithful_state(&mut rng, dim, 1e-3).unwrap();
        let sum: f64 = state.eigenvalues().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "trace defect at n = {dim}");
        assert!(state.min_eigenvalue() >= 1e-3);
        assert!(state.is_faithful());
        let u = state.basis();
        let gram = u.adjoint() * u;
        let eye = CMat::identity(dim, dim);
        assert!(max_abs(&(gram - &eye)) <= 1e-10, "basis not unitary at n = {dim}");
        let rebuilt = SpectralState::decompose(&state.density(), true).unwrap();
        for (a, b) in state.eigenvalues().iter().zip(rebuilt.eigenvalues()) {
            assert!((a - b).abs() <= RECONSTRUCTION_TOL);
        }
    }
}

#[test]
fn decompose_recovers_a_rotated_spectrum() {
    let mut rng = trial_rng(12, 0);
    // borrow a Haar-ish unitary from a random state's eigenbasis
    let u = random_faithful_state(&mut rng, 2, 1e-3).unwrap().basis().clone();
    let diag = CMat::from_fn(2, 2, |k, l| {
        if k == l {
            C64::new(if k == 0 { 0.7 } else { 0.3 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let rho = &u * diag * u.adjoint();
    let state = SpectralState::decompose(&rho, true).unwrap();
    assert!((state.eigenvalues()[0] - 0.7).abs() <= 1e-10);
    assert!((state.eigenvalues()[1] - 0.3).abs() <= 1e-10);
    assert!(max_abs(&(state.density() - rho)) <= 1e-10);
}

#[test]
fn decompose_rejects_bad_input() {
    let mut bad = CMat::zeros(2, 2);
    bad[(0, 1)] = C64::new(1.0, 0.0); // not self-adjoint
    assert!(matches!(
        SpectralState::decompose(&bad, false),
        Err(Error::NotSelfAdjoint(_))
    ));

    let mut neg = CMat::zeros(2, 2);
    neg[(0, 0)] = C64::new(1.5, 0.0);
    neg[(1, 1)] = C64::new(-0.5, 0.0);
    assert!(matches!(
        SpectralState::decompose(&neg, true),
        Err(Error::NotPositiveSemidefinite(_))
    ));

    let half = CMat::identity(2, 2) * C64::new(0.25, 0.0);
    assert!(matches!(
        SpectralState::decompose(&half, true),
        Err(Error::TraceNotOne(_))
    ));
    // without the trace requirement the same matrix is fine
    assert!(SpectralState::decompose(&half, false).is_ok());
}

#[test]
fn scalar_mean_betweenness_ordering_and_symmetry_bulk() {
    let mut rng = trial_rng(13, 0);
    for _ in 0..10_000 {
        let x = log_uniform(&mut rng);
        let y = log_uniform(&mut rng);
        let (lo, hi) = (x.min(y), x.max(y));
        let harm = 2.0 * x * y / (x + y);
        let arith = 0.5 * (x + y);
        for f in MonotoneFunction::catalog() {
            let m = scalar_mean(f, x, y, false).unwrap();
            assert_eq!(m, scalar_mean(f, y, x, false).unwrap(), "{f} asymmetric");
            assert!(m >= lo - 1e-12 * hi, "{f} mean below min at ({x}, {y})");
            assert!(m <= hi + 1e-12 * hi, "{f} mean above max at ({x}, {y})");
            assert!(m >= harm - 1e-12 * hi, "{f} below harmonic at ({x}, {y})");
            assert!(m <= arith + 1e-12 * hi, "{f} above arithmetic at ({x}, {y})");
        }
    }
}

#[test]
fn gap_identity_in_the_ratio_form_bulk() {
    // (x+y)/2 − m_f̃(x,y) = (x−y)²/(2y) · f(0)/f(x/y)
    let mut rng = trial_rng(14, 0);
    for _ in 0..10_000 {
        let x = log_uniform(&mut rng);
        let y = log_uniform(&mut rng);
        for f in MonotoneFunction::regular_catalog() {
            let gap = tilde_mean_gap(f, x, y).unwrap();
            let rhs = (x - y) * (x - y) / (2.0 * y) * f.at_zero() / f.eval(x / y).unwrap();
            assert!(
                (gap - rhs).abs() <= 1e-10 * rhs.max(1e-300),
                "{f} gap identity fails at ({x}, {y}): {gap} vs {rhs}"
            );
        }
    }
}

#[test]
fn gap_matches_direct_subtraction_of_the_tilde_mean() {
    let mut rng = trial_rng(15, 0);
    for _ in 0..2_000 {
        let x = log_uniform(&mut rng);
        let y = log_uniform(&mut rng);
        for f in MonotoneFunction::regular_catalog() {
            let gap = tilde_mean_gap(f, x, y).unwrap();
            let direct = 0.5 * (x + y) - scalar_mean(f, x, y, true).unwrap();
            // direct subtraction cancels, so compare on the mean's scale
            assert!(
                (gap - direct).abs() <= 1e-12 * (x + y),
                "{f} at ({x}, {y}): {gap} vs {direct}"
            );
        }
    }
}

#[test]
fn zero_argument_handling() {
    let sld = MonotoneFunction::Sld;
    assert_eq!(scalar_mean(sld, 0.0, 0.6, true).unwrap(), 0.0);
    assert_eq!(scalar_mean(sld, 0.0, 0.0, true).unwrap(), 0.0);
    assert!(matches!(
        scalar_mean(sld, 0.0, 0.6, false),
        Err(Error::ZeroMeanArgument { .. })
    ));
    assert!(matches!(
        scalar_mean(MonotoneFunction::Rld, 1.0, 2.0, true),
        Err(Error::RequiresRegular(_))
    ));
    // gap with a zero argument collapses to the arithmetic mean
    assert_eq!(tilde_mean_gap(sld, 0.0, 0.6).unwrap(), 0.3);
    assert_eq!(tilde_mean_gap(sld, 0.5, 0.5).unwrap(), 0.0);
}

#[test]
fn superoperator_positivity_on_random_observables() {
    let mut rng = trial_rng(16, 0);
    for trial in 0..50u64 {
        let dim = 2 + (trial as usize) % 5;
        let state = random_faithful_state(&mut rng, dim, 1e-3).unwrap();
        let obs = random_observables(&mut rng, dim, 1).unwrap();
        let xh = state.to_eigenbasis(obs.get(0)).unwrap();
        for f in MonotoneFunction::catalog() {
            for use_tilde in [false, true] {
                if use_tilde && !f.is_regular() {
                    continue;
                }
                let y = mean_superop_apply(f, &state, &xh, use_tilde).unwrap();
                let quad: f64 = (0..dim)
                    .flat_map(|k| (0..dim).map(move |l| (k, l)))
                    .map(|(k, l)| (xh[(k, l)].conj() * y[(k, l)]).re)
                    .sum();
                assert!(quad >= -1e-10, "{f} tilde={use_tilde} gives Tr(X m(X)) = {quad}");
            }
        }
    }
}

#[test]
fn apply_then_solve_round_trips() {
    let mut rng = trial_rng(17, 0);
    for dim in [2usize, 4, 6] {
        let state = random_faithful_state(&mut rng, dim, 1e-3).unwrap();
        let obs = random_observables(&mut rng, dim, 1).unwrap();
        let xh = state.to_eigenbasis(obs.get(0)).unwrap();
        for f in MonotoneFunction::catalog() {
            let applied = mean_superop_apply(f, &state, &xh, false).unwrap();
            let back = mean_superop_solve(f, &state, &applied, false).unwrap();
            assert!(
                max_abs(&(&back - &xh)) <= 1e-12 * max_abs(&xh),
                "{f} round trip fails at n = {dim}"
            );
        }
    }
}

#[test]
fn superoperator_requires_faithful_state_off_the_tilde_path() {
    let state = SpectralState::from_diagonal(&[1.0, 0.0]).unwrap();
    let x = CMat::identity(2, 2);
    assert!(matches!(
        mean_superop_solve(MonotoneFunction::Sld, &state, &x, false),
        Err(Error::NotFaithful(_))
    ));
    assert!(mean_superop_apply(MonotoneFunction::Sld, &state, &x, false).is_err());
    // the tilde action stays defined: zero-index entries are annihilated
    let t = mean_superop_apply(MonotoneFunction::Sld, &state, &x, true).unwrap();
    assert_eq!(t[(1, 1)], C64::new(0.0, 0.0));
}

proptest! {
    #[test]
    fn scalar_mean_is_exactly_symmetric_and_between(
        ex in -6.0f64..3.0,
        ey in -6.0f64..3.0,
    ) {
        let (x, y) = (10f64.powf(ex), 10f64.powf(ey));
        for f in MonotoneFunction::catalog() {
            let m = scalar_mean(f, x, y, false).unwrap();
            prop_assert_eq!(m, scalar_mean(f, y, x, false).unwrap());
            prop_assert!(m >= x.min(y) - 1e-12 * x.max(y));
            prop_assert!(m <= x.max(y) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn equal_arguments_are_a_fixed_point(ex in -6.0f64..3.0) {
        let x = 10f64.powf(ex);
        for f in MonotoneFunction::catalog() {
            prop_assert_eq!(scalar_mean(f, x, x, false).unwrap(), x);
        }
        for f in MonotoneFunction::regular_catalog() {
            prop_assert_eq!(tilde_mean_gap(f, x, x).unwrap(), 0.0);
        }
    }
}
