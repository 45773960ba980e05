use loqc_core::multiport::{general3, ns_matrix};
use loqc_core::search::{
    case_amplitudes, family_scan, ns_in_ns_corrected, ns_in_ns_feasibility, optimize_success,
    single_bs_infeasibility, two_bs_feasibility, Objective, OptimizeConfig, ScanConfig, TargetForm,
};
use loqc_core::Complex;

#[test]
fn case_amplitudes_match_rounded_values() {
    let c3 = case_amplitudes(3).unwrap().amplitudes;
    for (got, want) in c3.iter().zip([-0.21, 0.38, -0.28]) {
        assert!((got - want).abs() < 5e-3);
    }
    for case in 1..=3 {
        assert!(case_amplitudes(case)
            .unwrap()
            .amplitudes
            .iter()
            .all(|a| a.abs() <= 1.0));
    }
}

#[test]
fn single_splitter_is_infeasible_and_stable() {
    let fine = ScanConfig::default();
    let half = ScanConfig {
        grid_step: fine.grid_step / 2.0,
        ..fine.clone()
    };
    for case in [1u8, 3] {
        for target in [TargetForm::SignFlip, TargetForm::Identity] {
            let a = single_bs_infeasibility(case, &target, &fine).unwrap();
            let b = single_bs_infeasibility(case, &target, &half).unwrap();
            assert!(a.verdict.is_infeasible(), "case {case} {target:?}");
            assert_eq!(a.verdict, b.verdict);
            assert!(a.best_residual > 1e-3);
            assert!((a.best_residual - b.best_residual).abs() < 1e-6);
        }
    }
}

#[test]
fn one_condition_is_always_satisfiable() {
    let target = TargetForm::Partial {
        indices: vec![0],
        values: vec![1.0],
    };
    let r = single_bs_infeasibility(1, &target, &ScanConfig::default()).unwrap();
    assert!(r.verdict.is_feasible());
}

#[test]
fn two_splitters_cannot_flip_the_sign() {
    let cfg = ScanConfig {
        grid_step: 0.05,
        ..ScanConfig::default()
    };
    let r = two_bs_feasibility(3, &TargetForm::SignFlip, &cfg, true).unwrap();
    assert!(r.verdict.is_infeasible());
    assert!(r.extra("equal_angle_best_residual").unwrap() >= r.best_residual - 1e-12);
}

#[test]
fn candidate_family_misses_tolerance() {
    let r = family_scan(&TargetForm::SignFlip, &ScanConfig::default()).unwrap();
    assert!(!r.verdict.is_feasible());
}

#[test]
fn second_gate_corrects_case_one() {
    let cfg = ScanConfig::three_angle();
    let r = ns_in_ns_feasibility(1, (2, 0), &TargetForm::SignFlip, &cfg).unwrap();
    assert!(r.verdict.is_feasible());
    // re-evaluate at the reported angles
    let p: Vec<f64> = r.best_parameters.iter().map(|v| v.value).collect();
    let c = ns_in_ns_corrected(1, (2, 0), &general3(p[0], p[1], p[2]).transpose()).unwrap();
    assert!(TargetForm::SignFlip.residual(&c) <= cfg.tolerance);
    assert!(r.extra("min_corrected_probability").unwrap() > 0.0);
}

#[test]
fn optimizer_recovers_standard_point() {
    let cfg = OptimizeConfig::default();
    let r = optimize_success(Objective::NsSignFlip, &cfg).unwrap();
    assert!(r.probability >= 0.25 - 1e-6);
    assert!(r.residual <= 1e-6);
    assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
    // same matrix as the standard gate up to signs of rows and columns
    let net = general3(r.angles.theta1, r.angles.theta2, r.angles.theta3);
    let ns = ns_matrix();
    for i in 0..3 {
        for j in 0..3 {
            assert!((net.entry(i, j).norm() - ns.entry(i, j).norm()).abs() < 1e-3);
        }
    }

    let coarse = OptimizeConfig {
        grid_step: 0.5,
        rounds: 0,
        ..cfg
    };
    let c = optimize_success(Objective::NsSignFlip, &coarse).unwrap();
    assert!(c.objective <= r.objective);
}

#[test]
fn scans_are_deterministic_across_thread_counts() {
    let cfg = ScanConfig::default();
    let run = || single_bs_infeasibility(3, &TargetForm::SignFlip, &cfg).unwrap();
    let many = run();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    assert_eq!(many, one);

    let cfg3 = ScanConfig {
        grid_step: 0.3,
        ..ScanConfig::three_angle()
    };
    let run3 = || ns_in_ns_feasibility(3, (0, 1), &TargetForm::SignFlip, &cfg3).unwrap();
    let a = run3();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(run3);
    assert_eq!(a, b);
}

#[test]
fn residual_is_scale_and_phase_invariant() {
    let c = [
        Complex::new(0.3, 0.1),
        Complex::new(-0.2, 0.5),
        Complex::new(0.05, 0.0),
    ];
    let r = TargetForm::Identity.residual(&c);
    let k = Complex::from_polar(2.5, 1.1);
    let scaled: Vec<Complex> = c.iter().map(|z| z * k).collect();
    assert!((TargetForm::Identity.residual(&scaled) - r).abs() < 1e-12);
}
