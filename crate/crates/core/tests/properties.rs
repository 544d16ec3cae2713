use gaussian_cnp::audit::{random_state, StateFamily};
use gaussian_cnp::invariants::{invariants_from_nu, minor_invariants, partial_transpose, symplectic_eigenvalues};
use gaussian_cnp::polarity::transposed_spectrum;
use gaussian_cnp::state::{to_complex_basis, to_quadrature_basis};
use gaussian_cnp::{apply, random_passive_network, total_cnp, CovarianceState, GaussianOp, NetworkSpec};
use nalgebra::DVector;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = StateFamily> {
    prop_oneof![
        Just(StateFamily::Pure),
        Just(StateFamily::Mixed),
        Just(StateFamily::Product),
    ]
}

fn any_state() -> impl Strategy<Value = CovarianceState> {
    (family(), 2usize..=3, any::<u64>()).prop_map(|(f, n, seed)| random_state(f, n, seed, 1.5, 2.0).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn minor_sums_match_eigenvalue_form(st in any_state(), pt in proptest::option::of(0usize..3)) {
        let m = match pt {
            Some(mode) if mode < st.n_modes() => partial_transpose(st.matrix(), mode).unwrap(),
            _ => st.matrix().clone(),
        };
        let a = minor_invariants(&m).unwrap();
        let b = invariants_from_nu(&symplectic_eigenvalues(&m).unwrap());
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!(close(*x, *y, 1e-9), "{x} vs {y}");
        }
    }

    #[test]
    fn passive_networks_preserve_total_and_trace(st in any_state(), seed in any::<u64>(), depth in 0usize..15) {
        let net = random_passive_network(st.n_modes(), depth, seed).unwrap();
        let out = apply(&st, &net).unwrap();
        prop_assert!(close(total_cnp(&st).unwrap().total, total_cnp(&out).unwrap().total, 1e-9));
        prop_assert!(close(st.matrix().trace(), out.matrix().trace(), 1e-12));
        let mut a = symplectic_eigenvalues(st.matrix()).unwrap();
        let mut b = symplectic_eigenvalues(out.matrix()).unwrap();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(close(*x, *y, 1e-9));
        }
    }

    #[test]
    fn displacement_does_not_change_polarity(st in any_state(), d in proptest::collection::vec(-5.0f64..5.0, 6)) {
        let mean = DVector::from_iterator(2 * st.n_modes(), d.into_iter().take(2 * st.n_modes()));
        let shifted = st.with_mean(mean).unwrap();
        prop_assert_eq!(total_cnp(&st).unwrap(), total_cnp(&shifted).unwrap());
    }

    #[test]
    fn local_phase_leaves_report_unchanged(st in any_state(), mode in 0usize..3, angle in -3.2f64..3.2) {
        let mode = mode % st.n_modes();
        let net = NetworkSpec::new(st.n_modes(), vec![GaussianOp::Phase { mode, angle }]).unwrap();
        let a = total_cnp(&st).unwrap();
        let b = total_cnp(&apply(&st, &net).unwrap()).unwrap();
        for (x, y) in a.single.iter().zip(&b.single) {
            prop_assert!(close(*x, *y, 1e-9));
        }
        for (k, x) in &a.bipartite {
            prop_assert!(close(*x, b.bipartite[k], 1e-9));
        }
        for (k, x) in &a.pairs {
            prop_assert!(close(*x, b.pairs[k], 1e-9));
        }
    }

    #[test]
    fn reduced_modes_satisfy_uncertainty(st in any_state()) {
        for m in 0..st.n_modes() {
            let s = st.mode_stats(m).unwrap();
            prop_assert!(s.lambda_min * s.lambda_max >= 0.25 - 1e-12);
            prop_assert!(s.purity <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn complex_basis_round_trip(st in any_state()) {
        let c = to_complex_basis(st.matrix()).unwrap();
        prop_assert!((c.trace().re - st.matrix().trace()).abs() < 1e-12);
        let back = to_quadrature_basis(&c).unwrap();
        prop_assert!((back - st.matrix()).amax() < 1e-12);
    }

    #[test]
    fn at_most_one_transposed_eigenvalue_below_half(st in any_state()) {
        for m in 0..st.n_modes() {
            let below = transposed_spectrum(&st, m).unwrap().into_iter().filter(|&nu| nu < 0.5 - 1e-10).count();
            prop_assert!(below <= 1);
        }
    }

    #[test]
    fn pure_total_is_mean_photon_number(n in 2usize..=3, seed in any::<u64>()) {
        let st = random_state(StateFamily::Pure, n, seed, 1.5, 2.0).unwrap();
        let photons: f64 = (0..n).map(|m| st.mode_stats(m).unwrap().mean_photons).sum();
        prop_assert!(close(total_cnp(&st).unwrap().total, photons, 1e-9));
    }

    #[test]
    fn product_states_are_separable(seed in any::<u64>(), n in 2usize..=3) {
        let st = random_state(StateFamily::Product, n, seed, 1.5, 2.0).unwrap();
        let rep = total_cnp(&st).unwrap();
        for v in rep.bipartite.values().chain(rep.pairs.values()) {
            prop_assert!(*v <= 1e-10);
        }
    }
}
