//! Acceptance run: one pass/fail line per criterion, non-zero exit on any failure.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

/// Photon number, listed `(occupation, probability)` pairs, printed total.
type Table = (u32, Vec<([u32; 3], f64)>, f64);
type Criterion = (&'static str, fn() -> Check);

use loqc_core::encodings::{dual_rail_apply, logical_fidelity, zy_decompose};
use loqc_core::gates::two_photon_cnot_matrix;
use loqc_core::measurement::outcome_distribution;
use loqc_core::multiport::{amplitude_permanent_oracle, evolve, general3, ns_matrix, ElementSpec};
use loqc_core::random::{haar_unitary, random_amplitudes, random_state};
use loqc_core::search::closed_form::outcome;
use loqc_core::search::{
    case_amplitudes, case_pattern, optimize_success, parametrized_network,
    parametrized_ns_amplitudes, single_bs_infeasibility, AngleTriple, Objective, OptimizeConfig,
    ScanConfig, TargetForm,
};
use loqc_core::{
    Complex, Encoding, FockState, GateCircuit, OccupationVector, QubitUnitary, Scheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn criterion_1() -> Check {
    let g = GateCircuit::ns_gate();
    let signs = [0.5, 0.5, -0.5];
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let mut amps = vec![c(0.0); 3];
        amps[k] = c(1.0);
        let run = g.run(&amps).map_err(|e| e.to_string())?;
        ensure(
            (run.success_probability - 0.25).abs() <= 1e-9,
            format!("k={k}: p={}", run.success_probability),
        )?;
        worst = worst.max((run.heralded[k] - c(signs[k])).norm());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let a = random_amplitudes(3, &mut rng);
        let run = g.run(&a).map_err(|e| e.to_string())?;
        ensure(
            (run.success_probability - 0.25).abs() <= 1e-9,
            format!("p={}", run.success_probability),
        )?;
        for k in 0..3 {
            worst = worst.max((run.heralded[k] - a[k] * signs[k]).norm());
        }
    }
    ensure(worst <= 1e-9, format!("amplitude deviation {worst:e}"))?;
    Ok(format!("p = 0.25, amplitude deviation {worst:.1e}"))
}

fn criterion_2() -> Check {
    let rep = GateCircuit::cs_gate().verify().map_err(|e| e.to_string())?;
    for row in &rep.rows {
        ensure(
            (row.success_probability - 1.0 / 16.0).abs() <= 1e-9,
            format!("{}: p={}", row.input, row.success_probability),
        )?;
    }
    ensure(
        rep.process_fidelity >= 1.0 - 1e-9,
        format!("process fidelity {}", rep.process_fidelity),
    )?;
    Ok(format!(
        "p = 1/16 on all inputs, process fidelity {:.12}",
        rep.process_fidelity
    ))
}

fn criterion_3() -> Check {
    let m = two_photon_cnot_matrix();
    ensure(
        m.unitarity_error() <= 1e-12,
        format!("unitarity {}", m.unitarity_error()),
    )?;
    let s = std::f64::consts::SQRT_2;
    let terms: [([u32; 6], [f64; 4]); 17] = [
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
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = random_amplitudes(4, &mut rng);
        let input = FockState::from_terms(
            6,
            [
                (vec![1, 0, 1, 0, 0, 0], a[0]),
                (vec![1, 0, 0, 1, 0, 0], a[1]),
                (vec![0, 1, 1, 0, 0, 0], a[2]),
                (vec![0, 1, 0, 1, 0, 0], a[3]),
            ],
        )
        .map_err(|e| e.to_string())?;
        let out = evolve(&input, &m).map_err(|e| e.to_string())?;
        ensure(
            out.pruned(1e-14).len() == 17,
            format!("{} output terms", out.pruned(1e-14).len()),
        )?;
        for (occ, w) in &terms {
            let want: Complex = w.iter().zip(&a).map(|(x, z)| z * (*x / 3.0)).sum();
            worst = worst.max((out.amplitude_of(occ) - want).norm());
        }
    }
    ensure(worst <= 1e-9, format!("coefficient deviation {worst:e}"))?;
    let rep = GateCircuit::two_photon_cnot()
        .verify()
        .map_err(|e| e.to_string())?;
    for row in &rep.rows {
        ensure(
            (row.success_probability - 1.0 / 9.0).abs() <= 1e-9,
            format!("{}: p={}", row.input, row.success_probability),
        )?;
        ensure(
            row.fidelity >= 1.0 - 1e-12,
            format!("{}: fidelity {}", row.input, row.fidelity),
        )?;
    }
    Ok(format!(
        "17 terms within {worst:.1e}, p = 1/9, truth table exact"
    ))
}

fn criterion_4() -> Check {
    let tables: [Table; 3] = [
        (
            0,
            vec![
                ([1, 0, 0], 0.7071067816),
                ([0, 1, 0], 0.25),
                ([0, 0, 1], 0.04289321874),
            ],
            1.0,
        ),
        (
            1,
            vec![
                ([2, 0, 0], 0.2426406868),
                ([1, 1, 0], 0.25),
                ([1, 0, 1], 0.1433982819),
                ([0, 2, 0], 0.3535533908),
                ([0, 1, 1], 0.0),
                ([0, 0, 2], 0.01040764001),
            ],
            0.9999999995,
        ),
        (
            2,
            vec![
                ([0, 1, 2], 0.003679656346),
                ([1, 1, 1], 0.1213203433),
                ([2, 1, 0], 0.25),
                ([2, 0, 1], 0.07738110336),
                ([0, 2, 1], 0.02144660920),
                ([0, 0, 3], 0.001893987729),
                ([1, 2, 0], 0.06066017190),
                ([1, 0, 2], 0.02617228614),
                ([0, 3, 0], 0.3749999997),
                ([3, 0, 0], 0.06244584072),
            ],
            0.9999999983,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (k, rows, total) in &tables {
        let out =
            evolve(&FockState::basis(vec![*k, 1, 0]), &ns_matrix()).map_err(|e| e.to_string())?;
        let dist = outcome_distribution(&out, &[0, 1, 2]).map_err(|e| e.to_string())?;
        let mut sum = 0.0;
        for (occ, want) in rows {
            let got = dist.get(occ.as_slice()).copied().unwrap_or(0.0);
            worst = worst.max((got - want).abs());
            sum += got;
        }
        worst = worst.max((sum - total).abs());
    }
    ensure(worst <= 1e-6, format!("deviation {worst:e}"))?;
    Ok(format!("all listed entries and totals within {worst:.1e}"))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    for modes in 1..=3usize {
        for _ in 0..50 {
            let u = haar_unitary(modes, &mut rng);
            for n in 0..=3u32 {
                let basis = OccupationVector::all_with_total(modes, n);
                for input in &basis {
                    let out =
                        evolve(&FockState::basis(input.clone()), &u).map_err(|e| e.to_string())?;
                    for output in &basis {
                        let o = amplitude_permanent_oracle(input, output, &u)
                            .map_err(|e| e.to_string())?;
                        worst = worst.max((out.amplitude(output) - o).norm());
                        pairs += 1;
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-10, format!("deviation {worst:e}"))?;
    Ok(format!("{pairs} pairs, max deviation {worst:.1e}"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = AngleTriple::new(
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        )
        .map_err(|e| e.to_string())?;
        let table = parametrized_ns_amplitudes(&t);
        for case in 1..=3u8 {
            let (n2, n3) = case_pattern(case).map_err(|e| e.to_string())?;
            for k in 0..3u32 {
                let sim = table.amplitude(k, n2, n3).ok_or("missing outcome")?;
                let cf = outcome(case, k, t.as_array()).map_err(|e| e.to_string())?;
                worst = worst.max((sim - c(cf)).norm());
            }
        }
    }
    ensure(worst <= 1e-10, format!("closed-form deviation {worst:e}"))?;
    let printed = AngleTriple::from_degrees(22.5, 65.53, 22.5).map_err(|e| e.to_string())?;
    let d = parametrized_network(&printed).max_abs_diff(&ns_matrix());
    ensure(d <= 2e-3, format!("printed angles off by {d:e}"))?;
    Ok(format!(
        "closed forms within {worst:.1e}, printed angles within {d:.1e}"
    ))
}

fn criterion_7() -> Check {
    let fine = ScanConfig::default();
    let half = ScanConfig {
        grid_step: fine.grid_step / 2.0,
        ..fine.clone()
    };
    let mut lines = Vec::new();
    for case in [1u8, 3] {
        for target in [TargetForm::SignFlip, TargetForm::Identity] {
            let a = single_bs_infeasibility(case, &target, &fine).map_err(|e| e.to_string())?;
            let b = single_bs_infeasibility(case, &target, &half).map_err(|e| e.to_string())?;
            ensure(
                a.verdict.is_infeasible() && b.verdict.is_infeasible() && a.best_residual > 1e-3,
                format!(
                    "case {case} {}: residual {}",
                    target.name(),
                    a.best_residual
                ),
            )?;
            lines.push(format!("c{case}/{}={:.4}", target.name(), a.best_residual));
        }
    }
    // the equal-magnitude condition on the first two case-1 terms,
    // A₀ sin x = −A₁√2 sin x cos x, has only the root pair π ± iy off the real axis
    let a = case_amplitudes(1).map_err(|e| e.to_string())?.amplitudes;
    let cosh = a[0] / (-a[1] * 2f64.sqrt());
    ensure(cosh > 1.0, "a real nondegenerate root exists")?;
    let y = cosh.acosh();
    ensure(
        (y - 0.6329743207).abs() < 1e-6,
        format!("imaginary part {y}"),
    )?;
    Ok(format!("{}; complex root π ± {y:.10}i", lines.join(", ")))
}

fn criterion_8() -> Check {
    let r = optimize_success(Objective::NsSignFlip, &OptimizeConfig::default())
        .map_err(|e| e.to_string())?;
    ensure(
        r.probability >= 0.25 - 1e-6,
        format!("probability {}", r.probability),
    )?;
    ensure(r.residual <= 1e-6, format!("residual {:e}", r.residual))?;
    ensure(
        r.history.windows(2).all(|w| w[1] >= w[0]),
        "refinement not monotone",
    )?;
    Ok(format!(
        "p = {:.10}, residual {:.1e}",
        r.probability, r.residual
    ))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let cases = 200;
    for _ in 0..cases {
        // unitarity of every element kind
        let eta: f64 = rng.random_range(0.0..=1.0);
        let kinds = [
            ElementSpec::beam_splitter(eta, 0, 1).map_err(|e| e.to_string())?,
            ElementSpec::beam_splitter_angle(rng.random_range(0.0..TAU), 0, 1),
            ElementSpec::phase_shifter(rng.random_range(0.0..TAU), 0),
        ];
        for k in &kinds {
            let b = k.kind.block().map_err(|e| e.to_string())?;
            ensure(b.unitarity_error() <= 1e-9, "element not unitary")?;
        }
        let g = general3(
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        );
        ensure(g.unitarity_error() <= 1e-9, "family not unitary")?;

        // norm and photon number
        let u = haar_unitary(3, &mut rng);
        let basis: Vec<OccupationVector> = (0..=3)
            .flat_map(|n| OccupationVector::all_with_total(3, n))
            .collect();
        let psi = random_state(&basis, &mut rng);
        let out = evolve(&psi, &u).map_err(|e| e.to_string())?;
        ensure((out.norm() - 1.0).abs() <= 1e-9, "norm not conserved")?;
        let single = OccupationVector::new(vec![2, 0, 1]);
        let one = evolve(&FockState::basis(single), &u).map_err(|e| e.to_string())?;
        ensure(
            one.terms().all(|(o, _)| o.total() == 3),
            "photon number changed",
        )?;
        let back = evolve(&out, &u.adjoint()).map_err(|e| e.to_string())?;
        ensure(back.approx_eq(&psi, 1e-9), "inverse round trip")?;

        // encode/decode
        for scheme in [
            Scheme::SingleRail,
            Scheme::DualRail,
            Scheme::OneHot,
            Scheme::Polarization,
        ] {
            let n = if scheme == Scheme::SingleRail { 1 } else { 2 };
            let enc = Encoding::new(scheme, n).map_err(|e| e.to_string())?;
            let v = random_amplitudes(enc.logical_dim(), &mut rng);
            let dec = enc
                .decode(&enc.encode(&v).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(
                dec.leakage <= 1e-12 && logical_fidelity(&v, &dec.logical) >= 1.0 - 1e-12,
                "round trip",
            )?;
        }

        // Z-Y reconstruction
        let q = QubitUnitary::new(haar_unitary(2, &mut rng).matrix().clone())
            .map_err(|e| e.to_string())?;
        let zy = zy_decompose(&q).map_err(|e| e.to_string())?;
        ensure(
            zy.reconstruct().max_abs_diff(&q) <= 1e-9,
            "Z-Y reconstruction",
        )?;

        // dual-rail action vs the qubit matrix
        let enc = Encoding::dual_rail(2);
        let v = random_amplitudes(4, &mut rng);
        let qubit = rng.random_range(0..2usize);
        let state = enc.encode(&v).map_err(|e| e.to_string())?;
        let optical = dual_rail_apply(&q, qubit, &state).map_err(|e| e.to_string())?;
        let dec = enc.decode(&optical).map_err(|e| e.to_string())?;
        let want = q.apply_on(qubit, 2, &v).map_err(|e| e.to_string())?;
        let f = logical_fidelity(&want, &dec.logical);
        ensure(f >= 1.0 - 1e-9, format!("dual-rail fidelity {f}"))?;
    }
    Ok(format!("{cases} random cases per property"))
}

fn main() {
    let limits = [1.0, 1.0, 1.0, 1.0, 10.0, 5.0, 30.0, 120.0, 30.0];
    let criteria: [Criterion; 9] = [
        ("NS gate", criterion_1),
        ("CS gate", criterion_2),
        ("two-photon CNOT", criterion_3),
        ("NS outcome tables", criterion_4),
        ("oracle equivalence", criterion_5),
        ("closed-form agreement", criterion_6),
        ("single-splitter infeasibility", criterion_7),
        ("optimization sanity", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut failed = 0;
    for (i, ((name, run), limit)) in criteria.iter().zip(limits).enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_secs_f64(limit);
        let (status, detail) = match (&result, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; took longer than {limit} s")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {} [{name}]: {status} ({:.2} s) {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
