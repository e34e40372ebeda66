use proptest::prelude::*;

use qsd::casebook::{self, BellFamilyParams};
use qsd::cli::{round_sig, StateFile};
use qsd::discriminate;
use qsd::locc;
use qsd::numkernel::{hermitian_eig, inner, partial_trace, Subsystem};
use qsd::random::{random_density, random_orthonormal_pair, random_state_vector, rng};
use qsd::states::{binary_entropy, validate_density, Ensemble, PureState, State};

fn orthogonal_pair(seed: u64, d_a: usize, d_b: usize) -> (PureState, PureState) {
    let (u, v) = random_orthonormal_pair(&mut rng(seed), d_a * d_b);
    (PureState::bipartite(u, d_a, d_b).unwrap(), PureState::bipartite(v, d_a, d_b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn walgate_is_perfect_with_padding(seed in any::<u64>(), d_a in 2usize..4, d_b in 2usize..4) {
        let (psi1, psi2) = orthogonal_pair(seed, d_a, d_b);
        let w = locc::walgate_protocol(&psi1, &psi2).unwrap();
        prop_assert!(w.padded.block_dim.is_power_of_two() && w.padded.block_dim >= d_a);
        prop_assert!(w.max_branch_overlap <= 1e-9);
        for input in 0..2 {
            prop_assert!(w.simulate(input).unwrap() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn local_discrimination_respects_global_bound(seed in any::<u64>(), p1 in 0.05f64..0.95) {
        let mut r = rng(seed);
        let psi1 = PureState::bipartite(random_state_vector(&mut r, 4), 2, 2).unwrap();
        let psi2 = PureState::bipartite(random_state_vector(&mut r, 4), 2, 2).unwrap();
        let v = locc::virmani_nonorthogonal(&psi1, &psi2, p1, 1.0 - p1).unwrap();
        let global = discriminate::helstrom_pure_bound(p1, 1.0 - p1, psi1.overlap(&psi2));
        prop_assert!(v.error_probability >= global - 1e-12);
        let first = v.branches[0].overlap;
        prop_assert!(v.branches.iter().all(|b| (b.overlap - first).norm() <= 1e-9));
    }

    #[test]
    fn nielsen_posteriors_hit_target(p1 in 0.5f64..1.0, frac in 0.0f64..1.0) {
        let q1 = p1 + frac * (1.0 - p1);
        let prot = locc::nielsen_protocol_2qubit(p1, q1).unwrap();
        let reduced = partial_trace(&prot.initial.projector(), 2, 2, Subsystem::B).unwrap();
        let lead = hermitian_eig(&reduced).unwrap().max_eigenvalue();
        prop_assert!((lead - p1).abs() <= 1e-9);
        prop_assert!(prot.schmidt_residual(q1).unwrap() <= 1e-9);
    }

    #[test]
    fn reciprocal_states_are_biorthogonal(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let states: Vec<PureState> = (0..n).map(|_| PureState::new(random_state_vector(&mut r, n + 1)).unwrap()).collect();
        let rec = discriminate::reciprocal_states(&states).unwrap();
        for (k, psi) in states.iter().enumerate() {
            for (i, dual) in rec.iter().enumerate() {
                let expected = if i == k { 1.0 } else { 0.0 };
                prop_assert!((inner(psi.amplitudes(), dual) - expected).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn helstrom_measurement_passes_optimality(seed in any::<u64>(), p1 in 0.05f64..0.95) {
        let mut r = rng(seed);
        let rho1 = validate_density(&random_density(&mut r, 3)).unwrap();
        let rho2 = validate_density(&random_density(&mut r, 3)).unwrap();
        let res = discriminate::helstrom_two_state(p1, &rho1, 1.0 - p1, &rho2).unwrap();
        let e = Ensemble::new(vec![(p1, State::from(rho1)), (1.0 - p1, State::from(rho2))]).unwrap();
        let report = discriminate::verify_min_error_optimality(&e, &res.measurement.as_povm()).unwrap();
        prop_assert!(report.optimal, "{report:?}");
        prop_assert!(res.error_probability <= p1.min(1.0 - p1) + 1e-12);
    }

    #[test]
    fn state_files_round_trip(seed in any::<u64>(), d_a in 1usize..4, d_b in 1usize..4, mixed in any::<bool>()) {
        let mut r = rng(seed);
        let state: State = if mixed {
            validate_density(&random_density(&mut r, d_a * d_b)).unwrap().with_dims(d_a, d_b).unwrap().into()
        } else {
            PureState::bipartite(random_state_vector(&mut r, d_a * d_b), d_a, d_b).unwrap().into()
        };
        let file = StateFile::from_state(&state);
        let text = serde_json::to_string(&file).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(StateFile::from_state(&back.to_state().unwrap()), file);
    }

    #[test]
    fn report_rounding_is_idempotent(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let once = round_sig(x);
        prop_assert_eq!(round_sig(once), once);
        prop_assert!((once - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn four_state_negativity_closed_form(a2 in 0.5f64..1.0, c2 in 0.5f64..1.0) {
        let p = BellFamilyParams::from_squares(a2, c2).unwrap();
        let r = casebook::ghosh4_negativity(&p).unwrap();
        prop_assert!((r.numeric - (a2 + c2).log2()).abs() <= 1e-8);
    }

    #[test]
    fn preservation_cost_dominates_average(a2 in 0.5f64..1.0, c2 in 0.5f64..1.0) {
        let p = BellFamilyParams::from_squares(a2, c2).unwrap();
        let r = casebook::preserve4_bell_bound(&p).unwrap();
        let avg = 0.5 * (binary_entropy(a2) + binary_entropy(c2));
        prop_assert!(r.cost >= avg - 1e-12);
        prop_assert!((r.rhs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn equidiag_unitary_preserves_trace(seed in any::<u64>(), k in 1u32..4) {
        let m = qsd::random::random_matrix(&mut rng(seed), 1 << k, 1 << k);
        let res = locc::equidiag_power2(&m).unwrap();
        let t = &(&res.unitary * &m) * &res.unitary.adjoint();
        prop_assert!((t.trace() - m.trace()).norm() <= 1e-9);
        prop_assert!(res.diagonal_spread() <= 1e-9);
        prop_assert!(res.unitary.unitarity_deviation() <= 1e-10);
        prop_assert!(t.max_abs_diff(&res.transformed) <= 1e-9);
    }
}
