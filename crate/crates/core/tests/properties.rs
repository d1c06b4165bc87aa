use coherence_synth::closedform::{self, ProtocolCombinatorics};
use coherence_synth::linalg::{
    self, c64, dephase_full, kron, max_abs_diff, partial_trace, spectrum, von_neumann_entropy,
    CMatrix, C64,
};
use coherence_synth::measures::{
    average_energy, local_coherence, mutual_coherence, mutual_coherence_relative_entropy_form,
    rel_entropy_coherence,
};
use coherence_synth::states::{
    hamiltonian, initial_coherence, initial_energy, mixed_product_state, pure_product_state,
    QuantumState, SystemSpec, TlsParams,
};
use coherence_synth::validation::{random_density_matrix, simulate_pure};
use coherence_synth::{
    apply_protocol, dephase_local, kraus_oracle, run_experiment, success_mask, DephasingSpec,
    MeasurementPlan,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, seed: u64) -> QuantumState {
    random_density_matrix(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn assert_valid_density(m: &CMatrix) {
    assert!(linalg::hermiticity_residual(m) <= 1e-10);
    assert!((linalg::trace(m).re - 1.0).abs() <= 1e-12);
    let min = *spectrum(m).unwrap().eigenvalues.last().unwrap();
    assert!(min >= -1e-10, "min eigenvalue {min}");
}

fn uniform_pure(n: usize, p: f64) -> QuantumState {
    let spec = SystemSpec::with_unit_gap(n).unwrap();
    pure_product_state(&spec, &TlsParams::uniform(n, p, 1.0).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partial_trace_and_dephasing_keep_states_valid(n in 1usize..=6, seed: u64, keep_bits in 1u32..64) {
        let state = random_state(n, seed);
        let rho = state.density_matrix();
        let keep: Vec<usize> = (1..=n).filter(|k| keep_bits >> (k - 1) & 1 == 1).collect();
        let keep = if keep.is_empty() { vec![1] } else { keep };
        assert_valid_density(&partial_trace(&rho, &keep, n).unwrap());
        assert_valid_density(&dephase_full(&rho));
    }

    #[test]
    fn dephasing_never_lowers_entropy(n in 1usize..=5, seed: u64) {
        let rho = random_state(n, seed).density_matrix();
        let s = von_neumann_entropy(&rho).unwrap();
        let sd = von_neumann_entropy(&dephase_full(&rho)).unwrap();
        prop_assert!(sd >= s - 1e-10);
        prop_assert_eq!(dephase_full(&dephase_full(&rho)), dephase_full(&rho));
    }

    #[test]
    fn kron_is_trace_multiplicative_and_associative(a in 1usize..=2, b in 1usize..=2, seed: u64) {
        let ra = random_state(a, seed).density_matrix() * c64(1.7);
        let rb = random_state(b, seed ^ 1).density_matrix() * c64(-0.3);
        let rc = random_state(1, seed ^ 2).density_matrix();
        let t = linalg::trace(&kron(&ra, &rb));
        prop_assert!((t - linalg::trace(&ra) * linalg::trace(&rb)).norm() <= 1e-12);
        let left = kron(&kron(&ra, &rb), &rc);
        let right = kron(&ra, &kron(&rb, &rc));
        prop_assert!(max_abs_diff(&left, &right) <= 1e-14);
    }

    #[test]
    fn energy_is_blind_to_input_dephasing(
        ps in prop::collection::vec(0.0f64..=1.0, 2..=5),
        eps in prop::collection::vec(0.0f64..=1.0, 5),
    ) {
        let n = ps.len();
        let spec = SystemSpec::with_unit_gap(n).unwrap();
        let h = hamiltonian(&spec);
        let pure: Vec<TlsParams> = ps.iter().map(|&p| TlsParams::pure(p).unwrap()).collect();
        let mixed: Vec<TlsParams> = ps.iter().zip(&eps)
            .map(|(&p, &e)| TlsParams::new(p, e).unwrap()).collect();
        let e_pure = average_energy(&pure_product_state(&spec, &pure).unwrap(), &h).unwrap();
        let e_mixed = average_energy(&mixed_product_state(&spec, &mixed).unwrap(), &h).unwrap();
        prop_assert!((e_pure - e_mixed).abs() <= 1e-12);
    }

    #[test]
    fn heterogeneous_mixed_state_is_a_kron(
        ps in prop::collection::vec(0.0f64..=1.0, 1..=4),
        eps in prop::collection::vec(0.0f64..=1.0, 4),
    ) {
        let n = ps.len();
        let params: Vec<TlsParams> = ps.iter().zip(&eps)
            .map(|(&p, &e)| TlsParams::new(p, e).unwrap()).collect();
        let spec = SystemSpec::with_unit_gap(n).unwrap();
        let built = mixed_product_state(&spec, &params).unwrap().density_matrix();
        let mut expected = params[0].density_matrix();
        for t in &params[1..] {
            expected = kron(&expected, &t.density_matrix());
        }
        prop_assert!(max_abs_diff(&built, &expected) <= 1e-14);
    }

    #[test]
    fn mutual_coherence_forms_agree(n in 2usize..=4, seed: u64) {
        let state = random_state(n, seed);
        let a = mutual_coherence(&state).unwrap();
        let b = mutual_coherence_relative_entropy_form(&state).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn diagonal_phases_leave_coherence_alone(n in 1usize..=4, seed: u64, phases in prop::collection::vec(0.0f64..6.3, 16)) {
        let state = random_state(n, seed);
        let rho = state.density_matrix();
        let dim = rho.nrows();
        let u = CMatrix::from_diagonal(&linalg::CVector::from_iterator(
            dim, phases.iter().take(dim).map(|&t| C64::from_polar(1.0, t))));
        let rotated = QuantumState::mixed(n, &u * rho * u.adjoint()).unwrap();
        let before = rel_entropy_coherence(&state).unwrap();
        let after = rel_entropy_coherence(&rotated).unwrap();
        prop_assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn kraus_oracle_matches_elementwise_channel(n in 1usize..=4, seed: u64, eps in prop::collection::vec(0.0f64..=1.0, 4)) {
        let state = random_state(n, seed);
        let eps = &eps[..n];
        let fast = dephase_local(&state, eps).unwrap().density_matrix();
        let oracle = kraus_oracle(&state, eps).unwrap().density_matrix();
        prop_assert!(max_abs_diff(&fast, &oracle) <= 1e-12);
    }

    #[test]
    fn dephasing_composes_and_is_monotone(
        n in 1usize..=4, seed: u64,
        a in prop::collection::vec(0.0f64..=1.0, 4),
        b in prop::collection::vec(0.0f64..=1.0, 4),
    ) {
        let state = random_state(n, seed);
        let (a, b) = (&a[..n], &b[..n]);
        let twice = dephase_local(&dephase_local(&state, a).unwrap(), b).unwrap();
        let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        let once = dephase_local(&state, &ab).unwrap();
        prop_assert!(max_abs_diff(&twice.density_matrix(), &once.density_matrix()) <= 1e-12);
        let c_before = rel_entropy_coherence(&state).unwrap();
        let c_after = rel_entropy_coherence(&dephase_local(&state, a).unwrap()).unwrap();
        prop_assert!(c_after <= c_before + 1e-10);
    }

    #[test]
    fn measurement_order_is_irrelevant(n in 2usize..=6, seed: u64, p in 0.01f64..0.9) {
        let state = uniform_pure(n, p);
        let plan = MeasurementPlan::pairwise_chain(n);
        let mut order: Vec<usize> = (0..n - 1).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let a = apply_protocol(&state, &plan).unwrap();
        let b = apply_protocol(&state, &plan.reordered(&order).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&a.final_state.density_matrix(), &b.final_state.density_matrix()) <= 1e-12);
        prop_assert_eq!(a.success_mask, b.success_mask);
    }

    #[test]
    fn pure_and_density_routes_agree(n in 2usize..=6, seed: u64) {
        let mixed = random_state(n, seed);
        let plan = MeasurementPlan::pairwise_chain(n);
        // A pure state with generic complex amplitudes.
        let rho = mixed.density_matrix();
        let psi = spectrum(&rho).unwrap().eigenvectors.column(0).into_owned();
        let pure = QuantumState::pure(n, psi.clone() / c64(psi.norm())).unwrap();
        let via_pure = apply_protocol(&pure, &plan).unwrap();
        let via_rho = apply_protocol(&pure.to_mixed(), &plan).unwrap();
        prop_assert!((via_pure.success_probability - via_rho.success_probability).abs() <= 1e-12);
        prop_assert!(max_abs_diff(&via_pure.final_state.density_matrix(), &via_rho.final_state.density_matrix()) <= 1e-12);
        let again = apply_protocol(&via_rho.final_state, &plan).unwrap();
        prop_assert!((again.success_probability - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn channel_commutes_with_projectors(n in 2usize..=5, seed: u64, eps in prop::collection::vec(0.0f64..=1.0, 5)) {
        let state = random_state(n, seed);
        let eps = &eps[..n];
        let plan = MeasurementPlan::pairwise_chain(n);
        let a = apply_protocol(&dephase_local(&state, eps).unwrap(), &plan).unwrap();
        let b = apply_protocol(&state, &plan).unwrap();
        let b_state = dephase_local(&b.final_state, eps).unwrap();
        prop_assert!((a.success_probability - b.success_probability).abs() <= 1e-12);
        prop_assert!(max_abs_diff(&a.final_state.density_matrix(), &b_state.density_matrix()) <= 1e-12);
    }
}

#[test]
fn initial_coherence_matches_simulated_coherence() {
    for n in 1..=8 {
        let spec = SystemSpec::with_unit_gap(n).unwrap();
        for p in [0.005, 0.05, 0.3, 0.7] {
            let state = uniform_pure(n, p);
            let c = rel_entropy_coherence(&state).unwrap();
            assert!(
                (c - initial_coherence(&spec, p)).abs() <= 1e-10,
                "n={n} p={p}"
            );
            let e = average_energy(&state, &hamiltonian(&spec)).unwrap();
            assert!((e - initial_energy(&spec, p)).abs() <= 1e-12);
        }
    }
}

#[test]
fn large_register_partial_trace_stays_valid() {
    let n = 8;
    let state = random_state(n, 99);
    for keep in [vec![1], vec![4, 8], vec![2, 3, 5]] {
        assert_valid_density(&partial_trace(&state.density_matrix(), &keep, n).unwrap());
    }
}

#[test]
fn mask_sizes_follow_the_fibonacci_numbers() {
    let mut fib = vec![0u64, 1];
    for i in 2..=14 {
        fib.push(fib[i - 1] + fib[i - 2]);
    }
    for n in 2..=12usize {
        let mask = success_mask(&MeasurementPlan::pairwise_chain(n), n).unwrap();
        let comb = ProtocolCombinatorics::new(n as u64);
        let by_sum: u64 = (0..=comb.t)
            .map(|k| closedform::count_no_adjacent_ground(n as u64, k))
            .sum();
        assert_eq!(mask.len() as u64, by_sum);
        assert_eq!(mask.len() as u64, fib[n + 2]);
    }
}

#[test]
fn local_coherence_is_consumed_for_even_n() {
    for n in [2usize, 4, 6, 8] {
        for p in [0.001, 0.01, 0.05, 0.1] {
            let r = simulate_pure(n, p, &MeasurementPlan::pairwise_chain(n)).unwrap();
            assert!(r.delta_cm > r.delta_c, "n={n} p={p}");
            assert!(r.cf_loc < r.c0_loc, "n={n} p={p}");
            assert!((r.c0 - r.c0_loc).abs() < 1e-12);
        }
    }
}

#[test]
fn energy_gain_is_positive_for_every_p() {
    for n in 2..=8usize {
        for i in 1..40 {
            let p = i as f64 / 40.0;
            let r = simulate_pure(n, p, &MeasurementPlan::pairwise_chain(n)).unwrap();
            assert!(r.delta_e > 0.0, "n={n} p={p}");
        }
    }
}

#[test]
fn two_tls_energy_gain_closed_form() {
    let p = 0.1f64;
    let r = simulate_pure(2, p, &MeasurementPlan::pairwise_chain(2)).unwrap();
    let expected = 2.0 * (1.0 - p).powi(2) / (2.0 - p);
    assert!((r.delta_e - expected).abs() < 1e-12);
    assert!((r.delta_e - 0.852_631_578_947_368).abs() < 1e-12);
}

#[test]
fn four_tls_gain_is_near_leading_approximation() {
    let r = simulate_pure(4, 0.05, &MeasurementPlan::pairwise_chain(4)).unwrap();
    let approx = closedform::approx_dc(4, 0.05);
    assert!(
        (r.delta_c / approx - 1.0).abs() < 0.10,
        "{} vs {approx}",
        r.delta_c
    );
}

#[test]
fn four_tls_mutual_coherence_tends_to_ln3() {
    let state = apply_protocol(&uniform_pure(4, 1e-6), &MeasurementPlan::pairwise_chain(4))
        .unwrap()
        .final_state;
    let cm = mutual_coherence(&state).unwrap();
    assert!((cm - 3f64.ln()).abs() < 1e-3, "{cm}");
    assert!(local_coherence(&state).unwrap() < 1e-3);
}

#[test]
fn heterogeneous_pre_dephasing_runs() {
    let spec = SystemSpec::with_unit_gap(4).unwrap();
    let params = TlsParams::uniform(4, 0.02, 1.0).unwrap();
    let dephasing = DephasingSpec::new(vec![0.95, 0.9, 0.85, 0.9], vec![0.9; 4]);
    let r = run_experiment(
        &spec,
        &params,
        &MeasurementPlan::pairwise_chain(4),
        &dephasing,
    )
    .unwrap();
    let pure = run_experiment(
        &spec,
        &params,
        &MeasurementPlan::pairwise_chain(4),
        &DephasingSpec::none(),
    )
    .unwrap();
    assert!((r.delta_e - pure.delta_e).abs() < 1e-12);
    assert!(r.delta_c > 0.0 && r.delta_c < pure.delta_c);
}
