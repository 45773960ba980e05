use std::f64::consts::SQRT_2;

use loqc_core::gates::two_photon_cnot_matrix;
use loqc_core::multiport::evolve;
use loqc_core::random::random_amplitudes;
use loqc_core::{Complex, FockState, GateCircuit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Terms of the two-photon CNOT output, ket order `c_H c_V t_H t_V v_c v_t`, as
/// `(occupation, coefficients of (α, β, γ, δ))`, all over 3.
fn expected_terms() -> Vec<([u32; 6], [f64; 4])> {
    let s = SQRT_2;
    vec![
        ([1, 0, 1, 0, 0, 0], [1., 0., 0., 0.]),
        ([1, 0, 0, 1, 0, 0], [0., 1., 0., 0.]),
        ([0, 1, 0, 1, 0, 0], [0., 0., 1., 0.]),
        ([0, 1, 1, 0, 0, 0], [0., 0., 0., 1.]),
        ([0, 1, 0, 0, 1, 0], [s, s, 0., 0.]),
        ([0, 0, 0, 0, 1, 1], [s, -s, 0., 0.]),
        ([1, 1, 0, 0, 0, 0], [1., 1., 0., 0.]),
        ([1, 0, 0, 0, 0, 1], [1., -1., 0., 0.]),
        ([0, 0, 1, 0, 1, 0], [s, 0., 0., 0.]),
        ([0, 0, 0, 1, 1, 0], [0., s, 0., 0.]),
        ([0, 2, 0, 0, 0, 0], [0., 0., -s, -s]),
        ([0, 1, 0, 0, 0, 1], [0., 0., -1., 1.]),
        ([0, 0, 2, 0, 0, 0], [0., 0., s, 0.]),
        ([0, 0, 1, 0, 0, 1], [0., 0., 1., -1.]),
        ([0, 0, 1, 1, 0, 0], [0., 0., 1., 1.]),
        ([0, 0, 0, 1, 0, 1], [0., 0., 1., -1.]),
        ([0, 0, 0, 2, 0, 0], [0., 0., 0., s]),
    ]
}

fn two_photon_input(c: &[Complex]) -> FockState {
    FockState::from_terms(
        6,
        [
            (vec![1, 0, 1, 0, 0, 0], c[0]),
            (vec![1, 0, 0, 1, 0, 0], c[1]),
            (vec![0, 1, 1, 0, 0, 0], c[2]),
            (vec![0, 1, 0, 1, 0, 0], c[3]),
        ],
    )
    .unwrap()
}

#[test]
fn two_photon_cnot_output_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    assert!(two_photon_cnot_matrix().unitarity_error() < 1e-12);
    for _ in 0..20 {
        let c = random_amplitudes(4, &mut rng);
        let out = evolve(&two_photon_input(&c), &two_photon_cnot_matrix()).unwrap();
        let terms = expected_terms();
        assert_eq!(out.pruned(1e-14).len(), terms.len());
        for (occ, w) in terms {
            let want: Complex = w.iter().zip(&c).map(|(x, z)| z * (*x / 3.0)).sum();
            assert!((out.amplitude_of(&occ) - want).norm() < 1e-9, "{occ:?}");
        }
    }
}

#[test]
fn ns_gate_on_random_superpositions() {
    let g = GateCircuit::ns_gate();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..20 {
        let c = random_amplitudes(3, &mut rng);
        let run = g.run(&c).unwrap();
        assert!((run.success_probability - 0.25).abs() < 1e-9);
        for (k, sign) in [(0, 0.5), (1, 0.5), (2, -0.5)] {
            assert!((run.heralded[k] - c[k] * sign).norm() < 1e-9);
        }
    }
}

#[test]
fn cs_and_cnot_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for g in [GateCircuit::cs_gate(), GateCircuit::cnot_from_cs()] {
        for _ in 0..5 {
            let c = random_amplitudes(4, &mut rng);
            let run = g.run(&c).unwrap();
            assert!((run.success_probability - 1.0 / 16.0).abs() < 1e-9);
            let want = g.ideal.apply(&c);
            let out = run.readout[0].as_ref().unwrap();
            assert!(loqc_core::encodings::logical_fidelity(&want, out) > 1.0 - 1e-9);
        }
    }
}

#[test]
fn two_photon_cnot_on_random_inputs() {
    let g = GateCircuit::two_photon_cnot();
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..10 {
        let c = random_amplitudes(4, &mut rng);
        let run = g.run(&c).unwrap();
        assert!((run.success_probability - 1.0 / 9.0).abs() < 1e-9);
        let want = g.ideal.apply(&c);
        assert!(
            loqc_core::encodings::logical_fidelity(&want, run.readout[0].as_ref().unwrap())
                > 1.0 - 1e-9
        );
    }
}

#[test]
fn verified_reports() {
    for name in loqc_core::gates::GATE_NAMES {
        let rep = GateCircuit::by_name(name).unwrap().verify().unwrap();
        assert!(rep.process_fidelity > 1.0 - 1e-9, "{name}");
        assert!(rep.min_fidelity > 1.0 - 1e-9, "{name}");
    }
}
