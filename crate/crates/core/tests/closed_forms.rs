use std::f64::consts::TAU;

use loqc_core::multiport::{evolve, general3, general3_network, network_transform, ns_matrix};
use loqc_core::search::closed_form::{outcome, pair_in_port2_amplitude, surviving_photons};
use loqc_core::search::{
    case_pattern, ns_in_ns_corrected, parametrized_network, parametrized_ns_amplitudes,
    AngleTriple, TargetForm,
};
use loqc_core::{FockState, ModeTransform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_triple(rng: &mut ChaCha8Rng) -> AngleTriple {
    AngleTriple::new(
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
    .unwrap()
}

#[test]
fn closed_forms_match_simulator() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = random_triple(&mut rng);
        let table = parametrized_ns_amplitudes(&t);
        for case in 1..=3u8 {
            let (n2, n3) = case_pattern(case).unwrap();
            for k in 0..3u32 {
                let sim = table.amplitude(k, n2, n3).unwrap();
                let cf = outcome(case, k, t.as_array()).unwrap();
                worst = worst.max((sim.re - cf).abs()).max(sim.im.abs());
            }
        }
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn table_lists_only_single_click_outcomes() {
    let table = parametrized_ns_amplitudes(&AngleTriple::new(0.3, 1.2, 2.1).unwrap());
    assert!(table.entries.iter().all(|e| e.n2 <= 1 && e.n3 <= 1));
    for e in &table.entries {
        assert_eq!(e.signal_out + e.n2 + e.n3, e.k + 1);
    }
}

#[test]
fn zero_theta2_decouples_signal() {
    let table = parametrized_ns_amplitudes(&AngleTriple::new(0.7, 0.0, 1.9).unwrap());
    for k in 0..3u32 {
        let stay = table.amplitude(k, 1, 0).unwrap().norm_sqr()
            + table.amplitude(k, 0, 1).unwrap().norm_sqr();
        assert!((stay - 1.0).abs() < 1e-12);
    }
}

#[test]
fn splitter_network_reproduces_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let [a, b, c] = random_triple(&mut rng).as_array();
        let net = network_transform(&general3_network(a, b, c), 3).unwrap();
        assert!(net.max_abs_diff(&general3(a, b, c)) < 1e-12);
    }
    let p = AngleTriple::ns_point();
    let net = network_transform(&general3_network(p.theta1, p.theta2, p.theta3), 3).unwrap();
    assert!(net.transpose().max_abs_diff(&ns_matrix()) < 1e-9);
}

#[test]
fn pair_in_port2_forms_match_simulator() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let t = random_triple(&mut rng);
        let net = parametrized_network(&t);
        for k in 0..3u32 {
            let n = surviving_photons(1, k).unwrap();
            let out = evolve(&FockState::basis(vec![n, 1, 0]), &net).unwrap();
            let sim = out.amplitude_of(&[k, 2, 0]);
            let cf = pair_in_port2_amplitude(k, t.as_array()).unwrap();
            assert!((sim.re - cf).abs() < 1e-9 && sim.im.abs() < 1e-9);
        }
    }
}

#[test]
fn identity_second_gate_leaves_case_three_uncorrected() {
    let a = loqc_core::search::case_amplitudes(3).unwrap().amplitudes;
    let c = ns_in_ns_corrected(3, (1, 0), &ModeTransform::identity(3)).unwrap();
    for k in 0..3 {
        assert!((c[k].re - a[k]).abs() < 1e-12);
    }
    let as_complex: Vec<_> = a.iter().map(|&x| loqc_core::Complex::new(x, 0.0)).collect();
    let uncorrected = TargetForm::SignFlip.residual(&as_complex);
    assert!((TargetForm::SignFlip.residual(&c) - uncorrected).abs() < 1e-12);
}
