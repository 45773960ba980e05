use std::fmt::Write as _;
use std::path::Path;

use loqc_core::encodings::{dual_rail_apply, logical_fidelity};
use loqc_core::measurement::{outcome_distribution, postselect_branches};
use loqc_core::multiport::{amplitude_permanent_oracle, evolve, evolve_elements};
use loqc_core::random::{haar_unitary, random_amplitudes, random_state};
use loqc_core::search::{run_scheme, FeasibilityReport, SCHEMES};
use loqc_core::{Complex, Encoding, FockState, GateCircuit, OccupationVector, QubitUnitary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::circuit::parse_circuit;
use crate::report::{finish, fmt_num, metadata, round_floats};
use crate::CliError;

/// Simulations above this many photons are refused rather than left to run for hours.
pub const MAX_PHOTONS: u32 = 12;

fn core(context: &str) -> impl FnOnce(loqc_core::Error) -> CliError + '_ {
    move |source| CliError::Core {
        context: context.to_string(),
        source,
    }
}

fn amplitude_list(state: &FockState) -> Vec<Value> {
    state
        .terms()
        .map(|(o, z)| json!({"occupation": o.counts(), "re": z.re, "im": z.im}))
        .collect()
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

pub fn simulate(path: &Path, pretty: bool, digits: usize) -> Result<String, CliError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| CliError::Io {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Io {
        path: shown.clone(),
        message: "file is not valid UTF-8".into(),
    })?;
    let file = parse_circuit(&text).map_err(|source| CliError::Parse {
        path: shown.clone(),
        source,
    })?;

    let input = file.input_state().map_err(core("input"))?;
    if input.max_photons() > MAX_PHOTONS {
        return Err(CliError::Usage(format!(
            "{shown}: {} photons exceed the limit of {MAX_PHOTONS}",
            input.max_photons()
        )));
    }
    let elements = file.element_specs().map_err(core("elements"))?;
    let branches = file.outcome_branches().map_err(core("detect"))?;
    let output = evolve_elements(&input, &elements).map_err(core("evolution"))?;

    let detected = file.detected_modes();
    let measured: Vec<usize> = if detected.is_empty() {
        (0..file.modes).collect()
    } else {
        detected
    };
    let dist = outcome_distribution(&output, &measured).map_err(core("measurement"))?;
    let report = postselect_branches(&output, &branches).map_err(core("detect"))?;

    let outcomes: Vec<Value> = dist
        .iter()
        .map(|(k, p)| json!({"counts": k, "probability": p}))
        .collect();
    let branch_values: Vec<Value> = file
        .branches
        .iter()
        .zip(&report.outcomes)
        .map(|(b, o)| {
            let pattern: Map<String, Value> = b
                .pattern
                .iter()
                .map(|(m, c)| (m.to_string(), json!(c)))
                .collect();
            json!({
                "pattern": pattern,
                "correction": b.correction,
                "probability": o.result.probability,
                "conditional_state": o.result.conditional_state.as_ref().map(amplitude_list),
            })
        })
        .collect();
    let body = object(json!({
        "kind": "simulation",
        "modes": file.modes,
        "measured_modes": measured,
        "outcomes": outcomes,
        "total_probability": dist.values().sum::<f64>(),
        "branches": branch_values,
        "success_probability": (!file.branches.is_empty()).then_some(report.success_probability),
    }));
    if pretty {
        return Ok(pretty_simulation(&body, digits));
    }
    Ok(finish(body, metadata("simulate", &bytes, digits), digits))
}

fn pretty_simulation(body: &Map<String, Value>, digits: usize) -> String {
    let mut s = String::new();
    let num = |v: &Value| fmt_num(v.as_f64().unwrap_or(f64::NAN), digits);
    let _ = writeln!(
        s,
        "modes {}  measured {}",
        body["modes"], body["measured_modes"]
    );
    let _ = writeln!(s, "{:<16} probability", "counts");
    for o in body["outcomes"].as_array().into_iter().flatten() {
        let _ = writeln!(
            s,
            "{:<16} {}",
            o["counts"].to_string(),
            num(&o["probability"])
        );
    }
    for (i, b) in body["branches"]
        .as_array()
        .into_iter()
        .flatten()
        .enumerate()
    {
        let _ = writeln!(
            s,
            "branch {i} {}  p = {}",
            b["pattern"],
            num(&b["probability"])
        );
        for t in b["conditional_state"].as_array().into_iter().flatten() {
            let _ = writeln!(
                s,
                "  {:<14} {} {:+}i",
                t["occupation"].to_string(),
                num(&t["re"]),
                round(&t["im"], digits)
            );
        }
    }
    if !body["success_probability"].is_null() {
        let _ = writeln!(
            s,
            "success probability {}",
            num(&body["success_probability"])
        );
    }
    s
}

fn round(v: &Value, digits: usize) -> f64 {
    crate::report::round_significant(v.as_f64().unwrap_or(f64::NAN), digits)
}

/// Ket in slot order with descending mode subscripts, e.g. `|0101⟩₄₃₂₁`.
fn indexed_ket(counts: &[u32]) -> String {
    const SUB: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    let digits: String = counts.iter().map(|c| c.to_string()).collect();
    let subs: String = (1..=counts.len())
        .rev()
        .flat_map(|m| m.to_string().chars().collect::<Vec<_>>())
        .map(|c| SUB[c.to_digit(10).unwrap_or(0) as usize])
        .collect();
    format!("|{digits}⟩{subs}")
}

pub fn verify_gate(name: &str, pretty: bool, digits: usize) -> Result<String, CliError> {
    let gate = GateCircuit::by_name(name).map_err(|_| {
        CliError::Usage(format!(
            "unknown gate `{name}`; expected one of {}",
            loqc_core::gates::GATE_NAMES.join(", ")
        ))
    })?;
    let rep = gate.verify().map_err(core("verify"))?;
    let d = gate.readout.len();
    let diagonal = (0..d).all(|r| (0..d).all(|c| r == c || gate.ideal[(r, c)].norm() < 1e-12));
    let reference = rep.rows.first().and_then(|r| r.output.first().copied());
    let signs: Option<Vec<&str>> = match (diagonal, reference) {
        (true, Some(z0)) if z0.norm() > 1e-12 => Some(
            rep.rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let z = r.output.get(i).copied().unwrap_or_default() / z0;
                    if z.re >= 0.0 {
                        "+"
                    } else {
                        "-"
                    }
                })
                .collect(),
        ),
        _ => None,
    };
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            let output: Vec<Value> = rep
                .readout_labels
                .iter()
                .zip(&r.output)
                .map(|(l, z)| json!({"label": l, "re": z.re, "im": z.im}))
                .collect();
            json!({
                "input": r.input,
                "success_probability": r.success_probability,
                "fidelity": r.fidelity,
                "output": output,
            })
        })
        .collect();
    let readout: Vec<Value> = gate
        .readout
        .iter()
        .zip(&rep.readout_labels)
        .map(|(o, l)| json!({"label": l, "occupation": o.counts(), "indexed_ket": indexed_ket(o.counts())}))
        .collect();
    let body = object(json!({
        "kind": "gate_report",
        "gate": rep.gate,
        "readout": readout,
        "rows": rows,
        "success_probability": rep.success_probability,
        "min_success_probability": rep.min_success_probability,
        "max_success_probability": rep.max_success_probability,
        "min_fidelity": rep.min_fidelity,
        "process_fidelity": rep.process_fidelity,
        "diagonal_signs": signs,
    }));
    if pretty {
        let mut s = String::new();
        let _ = writeln!(s, "gate {}", rep.gate);
        let _ = writeln!(
            s,
            "{:<10} {:>14} {:>14}  output",
            "input", "probability", "fidelity"
        );
        for r in &rep.rows {
            let out: Vec<String> = r
                .output
                .iter()
                .map(|z| {
                    format!(
                        "{}{:+}i",
                        fmt_num(z.re, digits),
                        crate::report::round_significant(z.im, digits)
                    )
                })
                .collect();
            let _ = writeln!(
                s,
                "{:<10} {:>14} {:>14}  [{}]",
                r.input,
                fmt_num(r.success_probability, digits),
                fmt_num(r.fidelity, digits),
                out.join(", ")
            );
        }
        let _ = writeln!(
            s,
            "success probability {}",
            fmt_num(rep.success_probability, digits)
        );
        let _ = writeln!(
            s,
            "process fidelity {}",
            fmt_num(rep.process_fidelity, digits)
        );
        if let Some(signs) = signs {
            let _ = writeln!(s, "diagonal signs ({})", signs.join(","));
        }
        return Ok(s);
    }
    Ok(finish(
        body,
        metadata("verify-gate", name.as_bytes(), digits),
        digits,
    ))
}

pub fn search(
    scheme: &str,
    grid_step: Option<f64>,
    tolerance: Option<f64>,
    pretty: bool,
    digits: usize,
) -> Result<String, CliError> {
    if !SCHEMES.contains(&scheme) {
        return Err(CliError::Usage(format!(
            "unknown scheme `{scheme}`; expected one of {}",
            SCHEMES.join(", ")
        )));
    }
    if let Some(s) = grid_step {
        if !(s.is_finite() && s > 0.0) {
            return Err(CliError::Usage(format!(
                "--grid-step must be positive, got {s}"
            )));
        }
    }
    if let Some(t) = tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!(
                "--tolerance must be non-negative, got {t}"
            )));
        }
    }
    let report = run_scheme(scheme, grid_step, tolerance).map_err(core("search"))?;
    if pretty {
        return Ok(pretty_search(&report, digits));
    }
    let value = serde_json::to_value(&report).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut body = Map::new();
    body.insert("kind".into(), json!("feasibility_report"));
    body.extend(object(value));
    let request = format!("search {scheme} grid_step={grid_step:?} tolerance={tolerance:?}");
    Ok(finish(
        body,
        metadata("search", request.as_bytes(), digits),
        digits,
    ))
}

fn pretty_search(r: &FeasibilityReport, digits: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scheme {}  target {}", r.scheme, r.target);
    let _ = writeln!(
        s,
        "grid step {}  refinement rounds {}  evaluations {}",
        r.grid_step, r.rounds, r.evaluations
    );
    let _ = writeln!(s, "best residual {}", fmt_num(r.best_residual, digits));
    for p in &r.best_parameters {
        let _ = writeln!(s, "  {:<8} {}", p.name, fmt_num(p.value, digits));
    }
    let verdict = serde_json::to_value(&r.verdict).unwrap_or(Value::Null);
    let _ = writeln!(s, "verdict {}", verdict["kind"].as_str().unwrap_or("?"));
    for e in &r.extras {
        let _ = writeln!(s, "  {:<36} {}", e.name, fmt_num(e.value, digits));
    }
    s
}

struct CheckResult {
    name: &'static str,
    worst: f64,
    tolerance: f64,
}

fn check_norm(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let basis: Vec<OccupationVector> = (0..=3)
        .flat_map(|n| OccupationVector::all_with_total(3, n))
        .collect();
    (0..cases)
        .map(|_| {
            let u = haar_unitary(3, rng);
            let psi = random_state(&basis, rng);
            evolve(&psi, &u)
                .map(|o| (o.norm() - 1.0).abs())
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

fn check_oracle(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let basis = OccupationVector::all_with_total(3, 3);
    (0..cases)
        .map(|_| {
            let u = haar_unitary(3, rng);
            let a = &basis[rng.random_range(0..basis.len())];
            let b = &basis[rng.random_range(0..basis.len())];
            let sim = evolve(&FockState::basis(a.clone()), &u).map(|o| o.amplitude(b));
            let orc = amplitude_permanent_oracle(a, b, &u);
            match (sim, orc) {
                (Ok(x), Ok(y)) => (x - y).norm(),
                _ => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

fn check_round_trip(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let basis: Vec<OccupationVector> = (0..=2)
        .flat_map(|n| OccupationVector::all_with_total(4, n))
        .collect();
    (0..cases)
        .map(|_| {
            let u = haar_unitary(4, rng);
            let psi = random_state(&basis, rng);
            let back = evolve(&psi, &u).and_then(|o| evolve(&o, &u.adjoint()));
            match back {
                Ok(b) => b
                    .add(&psi.scale(Complex::new(-1.0, 0.0)))
                    .map(|d| d.norm())
                    .unwrap_or(f64::INFINITY),
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

fn check_ns(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let g = GateCircuit::ns_gate();
    (0..cases)
        .map(|_| {
            let a = random_amplitudes(3, rng);
            g.run(&a)
                .map(|r| (r.success_probability - 0.25).abs())
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

fn check_dual_rail(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let enc = Encoding::dual_rail(2);
    (0..cases)
        .map(|_| {
            let u = match QubitUnitary::new(haar_unitary(2, rng).matrix().clone()) {
                Ok(u) => u,
                Err(_) => return f64::INFINITY,
            };
            let v = random_amplitudes(4, rng);
            let q = rng.random_range(0..2);
            let run = || -> loqc_core::Result<f64> {
                let out = dual_rail_apply(&u, q, &enc.encode(&v)?)?;
                let want = u.apply_on(q, 2, &v)?;
                Ok(1.0 - logical_fidelity(&want, &enc.decode(&out)?.logical))
            };
            run().unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

pub fn selftest(seed: u64, cases: usize, pretty: bool, digits: usize) -> Result<String, CliError> {
    if cases == 0 {
        return Err(CliError::Usage("--cases must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = [
        CheckResult {
            name: "norm_conservation",
            worst: check_norm(&mut rng, cases),
            tolerance: 1e-9,
        },
        CheckResult {
            name: "permanent_oracle",
            worst: check_oracle(&mut rng, cases),
            tolerance: 1e-10,
        },
        CheckResult {
            name: "inverse_round_trip",
            worst: check_round_trip(&mut rng, cases),
            tolerance: 1e-9,
        },
        CheckResult {
            name: "ns_success_probability",
            worst: check_ns(&mut rng, cases),
            tolerance: 1e-9,
        },
        CheckResult {
            name: "dual_rail_vs_qubit_matrix",
            worst: check_dual_rail(&mut rng, cases),
            tolerance: 1e-9,
        },
    ];
    let passed = checks.iter().all(|c| c.worst <= c.tolerance);
    let text = if pretty {
        let mut s = String::new();
        for c in &checks {
            let ok = if c.worst <= c.tolerance {
                "ok"
            } else {
                "FAILED"
            };
            let _ = writeln!(
                s,
                "{:<28} {:<8} worst {:.3e} (tolerance {:.0e})",
                c.name, ok, c.worst, c.tolerance
            );
        }
        s
    } else {
        let items: Vec<Value> = checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "cases": cases,
                    "worst_deviation": c.worst,
                    "tolerance": c.tolerance,
                    "passed": c.worst <= c.tolerance,
                })
            })
            .collect();
        let mut body =
            object(json!({"kind": "selftest", "seed": seed, "checks": items, "passed": passed}));
        let mut v = Value::Object(std::mem::take(&mut body));
        round_floats(&mut v, digits);
        let request = format!("selftest seed={seed} cases={cases}");
        finish(
            object(v),
            metadata("selftest", request.as_bytes(), digits),
            digits,
        )
    };
    if passed {
        Ok(text)
    } else {
        Err(CliError::Failed(text))
    }
}
