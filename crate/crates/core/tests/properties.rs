use modvar_core::lattice::{overlap, GridSpec};
use modvar_core::modular::{inverse_zak, zak_transform};
use modvar_core::operators::{displace, rotate, weyl_phase, Displacement, Gate, RotationAxis, StepAxis};
use modvar_core::povm::povm_measure;
use modvar_core::random::random_state;
use modvar_core::readout::{bloch_estimate, expectation, Observable, ObservableSpec, PhaseSpaceObservable};
use modvar_core::WaveFunction;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grids() -> impl Strategy<Value = GridSpec<f64>> {
    (prop::sample::select(vec![(16usize, 8usize), (32, 16), (8, 4), (16, 16)]), 0.5f64..4.0)
        .prop_map(|((m, p), ell)| GridSpec::new(ell, m, p).unwrap())
}

fn state(g: &GridSpec<f64>, seed: u64) -> WaveFunction {
    random_state(g, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn max_diff(a: &WaveFunction, b: &WaveFunction) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zak_round_trip(g in grids(), seed in any::<u64>()) {
        let psi = state(&g, seed);
        let back = inverse_zak(&zak_transform(&psi));
        prop_assert!(max_diff(&back, &psi) < 1e-12);
    }

    #[test]
    fn zak_preserves_inner_products(g in grids(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (state(&g, s1), state(&g, s2));
        let direct = overlap(&a, &b).unwrap();
        let modular = zak_transform(&a).inner(&zak_transform(&b)).unwrap();
        prop_assert!((direct - modular).norm() < 1e-10);
    }

    #[test]
    fn displacements_compose_with_weyl_phase(
        g in grids(), seed in any::<u64>(),
        a in (-20i64..20, -20i64..20), b in (-20i64..20, -20i64..20),
    ) {
        let psi = state(&g, seed);
        let da = Displacement::new(a.0 as f64 * g.dx(), a.1 as f64 * g.dp());
        let db = Displacement::new(b.0 as f64 * g.dx(), b.1 as f64 * g.dp());
        let lhs = displace(&displace(&psi, db).unwrap(), da).unwrap();
        let rhs = displace(&psi, da.compose(&db)).unwrap();
        let phase = C::from_polar(1.0, weyl_phase(&da, &db));
        let d = lhs.amplitudes().iter().zip(rhs.amplitudes()).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-10);
    }

    #[test]
    fn axis_generators_square_to_one(g in grids(), seed in any::<u64>(), n in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)) {
        prop_assume!(n.0.abs() + n.1.abs() + n.2.abs() > 1e-3);
        let axis = RotationAxis::normalized([n.0, n.1, n.2]).unwrap();
        let psi = state(&g, seed);
        // A rotation by π is i(n·Γ¹), so two of them give -(n·Γ¹)² = -1.
        let twice = rotate(&rotate(&psi, &axis, std::f64::consts::PI), &axis, std::f64::consts::PI);
        let d = twice.amplitudes().iter().zip(psi.amplitudes()).map(|(x, y)| (x + y).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-10);
    }

    #[test]
    fn rotations_are_unitary(g in grids(), seed in any::<u64>(), angle in -7.0f64..7.0, n in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)) {
        prop_assume!(n.0.abs() + n.1.abs() + n.2.abs() > 1e-3);
        let axis = RotationAxis::normalized([n.0, n.1, n.2]).unwrap();
        let psi = state(&g, seed);
        let out = rotate(&psi, &axis, angle);
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        let back = rotate(&out, &axis, -angle);
        prop_assert!(max_diff(&back, &psi) < 1e-10);
    }

    #[test]
    fn z_squared_leaves_readouts_alone(g in grids(), seed in any::<u64>()) {
        let psi = state(&g, seed);
        let zz = Gate::Displace(Displacement::new(0.0, 4.0 * std::f64::consts::PI / g.ell)).apply(&psi).unwrap();
        for name in ["ReX", "ReY", "ReZ", "G1X", "G1Y", "G1Z"] {
            let o = Observable::builtin(name, g.ell).unwrap();
            prop_assert!((expectation(&zz, &o).unwrap() - expectation(&psi, &o).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn bloch_vector_stays_in_the_ball(g in grids(), seed in any::<u64>()) {
        let psi = state(&g, seed);
        let [x, y, z] = ["ReX", "ReY", "ReZ"].map(|n| Observable::builtin(n, g.ell).unwrap());
        let est = bloch_estimate(&psi, &x, &y, &z).unwrap();
        let len2: f64 = est.gamma.iter().map(|v| v * v).sum();
        prop_assert!(len2 <= 1.0 + 1e-9);
    }

    #[test]
    fn povm_probabilities_sum_to_one(g in grids(), seed in any::<u64>(), angle in -4.0f64..4.0) {
        let psi = state(&g, seed);
        for gate in [Gate::Rotate { axis: RotationAxis::y(), angle }, Gate::Step(StepAxis::Y), Gate::Shear { inverse: false }] {
            let out = povm_measure(&psi, &gate).unwrap();
            prop_assert!((out.p_plus + out.p_minus - 1.0).abs() < 1e-10);
            prop_assert!(out.p_plus >= -1e-15 && out.p_minus >= -1e-15);
        }
    }

    #[test]
    fn observable_spec_round_trips(
        l in 0.1f64..5.0, lp in 0.1f64..5.0,
        terms in prop::collection::vec((-3i64..=3, -3i64..=3, -1.0f64..1.0, -1.0f64..1.0), 0..6),
    ) {
        let obs = PhaseSpaceObservable::new(l, lp, terms.iter().map(|&(n, m, re, im)| (n, m, C::new(re, im)))).unwrap();
        let spec = ObservableSpec::from(&obs);
        let json = serde_json::to_string(&spec).unwrap();
        let back: ObservableSpec = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.build::<f64>().unwrap(), obs);
    }
}
