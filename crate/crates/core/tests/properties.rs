use num_complex::Complex64;
use proptest::prelude::*;

use qbpm::circuit::{Circuit, Gate};
use qbpm::classical::{propagate_1d, propagate_1d_with, Field1d, GridSpec};
use qbpm::propagator::{
    build_propagator, build_qbpm_circuit, decompose_monomial, diagonal_oracle, signed_index,
    DispersionPolynomial, PhaseAngle,
};
use qbpm::qft::{build_iqft, build_qft, dft_oracle, FourierSign};
use qbpm::qstate::{sample_distribution, StateVector};
use qbpm::Execution;

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1usize << n)
        .prop_filter("non-zero", |v| {
            v.iter().any(|(r, i)| r.abs() + i.abs() > 1e-3)
        })
        .prop_map(|v| v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
}

fn max_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn random_gate(n: usize) -> impl Strategy<Value = Gate> {
    let q = 0..n;
    prop_oneof![
        q.clone().prop_map(Gate::hadamard),
        (q.clone(), -7.0f64..7.0).prop_map(|(t, p)| Gate::phase(t, p)),
        (q.clone(), q.clone(), -7.0f64..7.0)
            .prop_filter("distinct", |(a, b, _)| a != b)
            .prop_map(|(a, b, p)| Gate::controlled_phase(a, b, p)),
        (q.clone(), q.clone())
            .prop_filter("distinct", |(a, b)| a != b)
            .prop_map(|(a, b)| Gate::swap(a, b)),
        (Just(()), -7.0f64..7.0).prop_map(move |(_, p)| Gate::multi_controlled_phase(
            vec![0, 1],
            n - 1,
            p
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn long_random_circuits_preserve_the_norm(
        gates in prop::collection::vec(random_gate(6), 10_000),
        amps in amplitudes(6),
    ) {
        let mut circuit = Circuit::new(6).unwrap();
        for g in gates {
            circuit.append(g).unwrap();
        }
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        circuit.run(&mut s).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn qft_matches_dense_dft(n in 1usize..=8, seed in any::<u64>(), positive in any::<bool>()) {
        let sign = if positive { FourierSign::Positive } else { FourierSign::Negative };
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|i| {
                let t = (i as u64 ^ seed) as f64 * 1e-3;
                Complex64::new(t.sin(), (1.7 * t).cos())
            })
            .collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        let expected = dft_oracle(s.amplitudes(), sign).unwrap();
        build_qft(n, sign).unwrap().run(&mut s).unwrap();
        prop_assert!(max_deviation(s.amplitudes(), &expected) < 1e-10);
    }

    #[test]
    fn iqft_undoes_qft(amps in amplitudes(7)) {
        let start = StateVector::from_amplitudes(amps).unwrap();
        let mut s = start.clone();
        build_qft(7, FourierSign::Negative).unwrap().run(&mut s).unwrap();
        build_iqft(7, FourierSign::Negative).unwrap().run(&mut s).unwrap();
        prop_assert!(s.fidelity(&start).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn monomial_terms_sum_to_the_integer_power(n in 1usize..=12, p in 1u32..=4, b in any::<usize>()) {
        let b = b % (1usize << n);
        let gamma = signed_index(b, n) as i128;
        let sum: i128 = decompose_monomial(n, p)
            .unwrap()
            .iter()
            .filter(|t| t.qubits.iter().all(|&q| b >> q & 1 == 1))
            .map(|t| t.coefficient)
            .sum();
        prop_assert_eq!(sum, gamma.pow(p));
    }

    #[test]
    fn propagator_matches_diagonal_oracle(
        n in 2usize..=7,
        phases in prop::collection::vec((1u32..=4, -3.0f64..3.0), 1..3),
        amps in amplitudes(7),
    ) {
        let phases: Vec<(u32, PhaseAngle)> = phases.into_iter().map(|(p, f)| (p, PhaseAngle(f))).collect();
        let amps = amps[..1 << n].to_vec();
        prop_assume!(amps.iter().any(|a| a.norm() > 1e-3));
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        let diag = diagonal_oracle(n, &phases).unwrap();
        let expected: Vec<Complex64> = s.amplitudes().iter().zip(&diag).map(|(a, d)| a * d).collect();
        build_propagator(n, &phases).unwrap().run(&mut s).unwrap();
        // both routes round phases as large as |phi| (N/2)^p
        let largest: f64 = phases
            .iter()
            .map(|(p, f)| f.0.abs() * ((1u64 << (n - 1)) as f64).powi(*p as i32))
            .sum();
        prop_assert!(max_deviation(s.amplitudes(), &expected) < 1e-13 + 1e-14 * largest);
    }

    #[test]
    fn quantum_and_classical_propagation_agree(
        n in 2usize..=10,
        log_z in -4.0f64..-1.0,
        quartic in any::<bool>(),
        amps in amplitudes(10),
    ) {
        let amps = amps[..1 << n].to_vec();
        prop_assume!(amps.iter().any(|a| a.norm() > 1e-3));
        let grid = GridSpec::new(n, 2e-6).unwrap();
        let poly = if quartic { DispersionPolynomial::quartic() } else { DispersionPolynomial::paraxial() };
        let z = 10f64.powf(log_z);
        let field = Field1d::new(grid, amps).unwrap().normalized();
        let oracle = propagate_1d_with(&field, 633e-9, z, &poly).unwrap();
        let mut s = StateVector::from_amplitudes(field.values().to_vec()).unwrap();
        build_qbpm_circuit(&grid, 633e-9, z, &poly).unwrap().run(&mut s).unwrap();
        prop_assert!(max_deviation(s.amplitudes(), oracle.values()) < 1e-9);
    }

    #[test]
    fn propagation_is_a_semigroup_in_z(
        z1 in 0.0f64..0.05,
        z2 in 0.0f64..0.05,
        amps in amplitudes(8),
    ) {
        let grid = GridSpec::new(8, 5e-6).unwrap();
        let poly = DispersionPolynomial::paraxial();
        let start = StateVector::from_amplitudes(amps).unwrap();

        let mut two_steps = start.clone();
        build_qbpm_circuit(&grid, 532e-9, z1, &poly).unwrap().run(&mut two_steps).unwrap();
        build_qbpm_circuit(&grid, 532e-9, z2, &poly).unwrap().run(&mut two_steps).unwrap();
        let mut one_step = start.clone();
        build_qbpm_circuit(&grid, 532e-9, z1 + z2, &poly).unwrap().run(&mut one_step).unwrap();
        prop_assert!(max_deviation(two_steps.amplitudes(), one_step.amplitudes()) < 1e-10);

        let field = Field1d::new(grid, start.amplitudes().to_vec()).unwrap();
        let a = propagate_1d(&propagate_1d(&field, 532e-9, z1).unwrap(), 532e-9, z2).unwrap();
        let b = propagate_1d(&field, 532e-9, z1 + z2).unwrap();
        prop_assert!(max_deviation(a.values(), b.values()) < 1e-12);
    }

    #[test]
    fn execution_modes_agree_bitwise(amps in amplitudes(12), z in 0.0f64..0.1) {
        let grid = GridSpec::new(12, 3e-6).unwrap();
        let circuit = build_qbpm_circuit(&grid, 532e-9, z, &DispersionPolynomial::paraxial()).unwrap();
        let mut seq = StateVector::from_amplitudes(amps).unwrap();
        let mut par = seq.clone();
        circuit.run_with(&mut seq, Execution::Sequential).unwrap();
        circuit.run_with(&mut par, Execution::Parallel).unwrap();
        prop_assert_eq!(seq.amplitudes(), par.amplitudes());
    }

    #[test]
    fn samples_account_for_every_shot(
        weights in prop::collection::vec(0.0f64..1.0, 1..64),
        shots in 1u64..1_000_000,
        seed in any::<u64>(),
    ) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let counts = sample_distribution(&probs, shots, seed).unwrap();
        prop_assert_eq!(counts.counts().iter().sum::<u64>(), shots);
        for (c, p) in counts.counts().iter().zip(&probs) {
            prop_assert!(*p > 0.0 || *c == 0);
        }
    }
}
