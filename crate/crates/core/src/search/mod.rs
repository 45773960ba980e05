//! Numerical exploration of postcorrected NS variants.
//!
//! The scans evaluate a proportionality residual over grids of beam-splitter angles and
//! refine around the best cells. A verdict of "infeasible" is a numerical certificate
//! over the refined grid, not a proof.

pub mod closed_form;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{Complex, FockState, OccupationVector};
use crate::multiport::{amplitude_permanent_oracle, evolve, general3, ns_matrix, ModeTransform};

/// Angles of the three-mode family, wrapped into `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleTriple {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl AngleTriple {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        if ![theta1, theta2, theta3].iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            theta1: theta1.rem_euclid(TAU),
            theta2: theta2.rem_euclid(TAU),
            theta3: theta3.rem_euclid(TAU),
        })
    }

    pub fn from_degrees(t1: f64, t2: f64, t3: f64) -> Result<Self> {
        Self::new(t1.to_radians(), t2.to_radians(), t3.to_radians())
    }

    /// The standard NS point: `θ₁ = θ₃ = 22.5°`, `cos θ₂ = √2 − 1`.
    pub fn ns_point() -> Self {
        Self::new(PI / 8.0, (2f64.sqrt() - 1.0).acos(), PI / 8.0).expect("finite")
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }
}

/// The family as a network on (signal, ancilla, ancilla): input mode `j` is sent to row
/// `j` of the printed matrix, i.e. the transform is its transpose.
pub fn parametrized_network(angles: &AngleTriple) -> ModeTransform {
    general3(angles.theta1, angles.theta2, angles.theta3).transpose()
}

/// Ancilla counts `(n₂, n₃)` heralding each case.
pub fn case_pattern(case: u8) -> Result<(u32, u32)> {
    match case {
        1 => Ok((0, 0)),
        2 => Ok((1, 0)),
        3 => Ok((0, 1)),
        _ => Err(Error::InvalidCase(case)),
    }
}

/// `⟨k+1−n₂−n₃, n₂, n₃| U |k, 1, 0⟩` through a three-mode transform.
pub fn ns_outcome_amplitude(transform: &ModeTransform, k: u32, n2: u32, n3: u32) -> Complex {
    ns_transition(transform, k, 1, n2, n3)
}

fn ns_transition(
    transform: &ModeTransform,
    signal: u32,
    ancilla: u32,
    n2: u32,
    n3: u32,
) -> Complex {
    let total = signal + ancilla;
    if n2 + n3 > total {
        return Complex::new(0.0, 0.0);
    }
    let input = OccupationVector::new(vec![signal, ancilla, 0]);
    let output = OccupationVector::new(vec![total - n2 - n3, n2, n3]);
    amplitude_permanent_oracle(&input, &output, transform).expect("three modes")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeEntry {
    /// Signal photons in.
    pub k: u32,
    pub n2: u32,
    pub n3: u32,
    /// Photons left in the signal mode.
    pub signal_out: u32,
    pub amplitude: f64,
    pub amplitude_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeTable {
    pub angles: AngleTriple,
    pub entries: Vec<OutcomeEntry>,
}

impl OutcomeTable {
    pub fn amplitude(&self, k: u32, n2: u32, n3: u32) -> Option<Complex> {
        self.entries
            .iter()
            .find(|e| e.k == k && e.n2 == n2 && e.n3 == n3)
            .map(|e| Complex::new(e.amplitude, e.amplitude_im))
    }
}

/// Every outcome with at most one photon per ancilla detector for `k = 0, 1, 2` signal
/// photons and ancilla `|1,0⟩`, computed by evolving through the family.
pub fn parametrized_ns_amplitudes(angles: &AngleTriple) -> OutcomeTable {
    let net = parametrized_network(angles);
    let mut entries = Vec::new();
    for k in 0..=2u32 {
        let out = evolve(&FockState::basis(vec![k, 1, 0]), &net).expect("three modes");
        for (occ, amp) in out.terms() {
            let (n2, n3) = (occ.get(1), occ.get(2));
            if n2 <= 1 && n3 <= 1 {
                entries.push(OutcomeEntry {
                    k,
                    n2,
                    n3,
                    signal_out: occ.get(0),
                    amplitude: amp.re,
                    amplitude_im: amp.im,
                });
            }
        }
    }
    entries.sort_by_key(|e| (e.k, e.n2, e.n3));
    OutcomeTable {
        angles: *angles,
        entries,
    }
}

/// Amplitudes left on the signal mode in one heralded case, for `k = 0, 1, 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseAmplitudes {
    pub case: u8,
    pub amplitudes: [f64; 3],
}

/// Case amplitudes of the closed-form NS network.
pub fn case_amplitudes(case: u8) -> Result<CaseAmplitudes> {
    case_amplitudes_for(case, &ns_matrix())
}

pub fn case_amplitudes_for(case: u8, transform: &ModeTransform) -> Result<CaseAmplitudes> {
    let (n2, n3) = case_pattern(case)?;
    let mut amplitudes = [0.0; 3];
    for (k, a) in amplitudes.iter_mut().enumerate() {
        *a = ns_outcome_amplitude(transform, k as u32, n2, n3).re;
    }
    Ok(CaseAmplitudes { case, amplitudes })
}

/// Desired shape of the corrected amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetForm {
    /// `∝ (1, 1, −1)`.
    SignFlip,
    /// `∝ (1, 1, 1)`.
    Identity,
    /// Only the listed components, proportional to the given values.
    Partial {
        indices: Vec<usize>,
        values: Vec<f64>,
    },
}

impl TargetForm {
    pub fn name(&self) -> String {
        match self {
            TargetForm::SignFlip => "sign_flip".into(),
            TargetForm::Identity => "identity".into(),
            TargetForm::Partial { indices, values } => {
                let parts: Vec<String> = indices
                    .iter()
                    .zip(values)
                    .map(|(i, v)| format!("{i}:{v}"))
                    .collect();
                format!("partial[{}]", parts.join(","))
            }
        }
    }

    fn project(&self, corrected: &[Complex]) -> (Vec<f64>, Vec<Complex>) {
        match self {
            TargetForm::SignFlip => (vec![1.0, 1.0, -1.0], corrected.to_vec()),
            TargetForm::Identity => (vec![1.0, 1.0, 1.0], corrected.to_vec()),
            TargetForm::Partial { indices, values } => (
                values.clone(),
                indices.iter().map(|&i| corrected[i]).collect(),
            ),
        }
    }

    /// Residual of a corrected amplitude vector against this form.
    pub fn residual(&self, corrected: &[Complex]) -> f64 {
        let (t, c) = self.project(corrected);
        proportionality_residual(&t, &c)
    }
}

/// `min_s ‖t·s − c‖² / ‖c‖²` over complex `s`, i.e. `1 − |⟨t̂, ĉ⟩|²`.
/// Returns 1 when `c` has no support.
pub fn proportionality_residual(target: &[f64], corrected: &[Complex]) -> f64 {
    let cn: f64 = corrected.iter().map(|z| z.norm_sqr()).sum();
    let tn: f64 = target.iter().map(|x| x * x).sum();
    if cn.sqrt() < 1e-12 || tn == 0.0 {
        return 1.0;
    }
    let overlap: Complex = target.iter().zip(corrected).map(|(t, c)| c * *t).sum();
    (1.0 - overlap.norm_sqr() / (cn * tn)).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Feasible { tolerance: f64 },
    Infeasible { margin: f64 },
    Inconclusive { tolerance: f64, margin: f64 },
}

impl Verdict {
    pub fn classify(best_residual: f64, tolerance: f64, margin: f64) -> Self {
        if best_residual <= tolerance {
            Verdict::Feasible { tolerance }
        } else if best_residual > margin {
            Verdict::Infeasible { margin }
        } else {
            Verdict::Inconclusive { tolerance, margin }
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Verdict::Infeasible { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

fn named(name: &str, value: f64) -> NamedValue {
    NamedValue {
        name: name.to_string(),
        value,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub scheme: String,
    pub case: Option<u8>,
    pub target: String,
    pub grid_step: f64,
    pub rounds: u32,
    pub evaluations: u64,
    pub best_residual: f64,
    pub best_parameters: Vec<NamedValue>,
    pub verdict: Verdict,
    pub extras: Vec<NamedValue>,
}

impl FeasibilityReport {
    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.best_parameters
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.value)
    }
}

/// Grid and verdict settings shared by the scans.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub grid_step: f64,
    pub rounds: u32,
    /// Feasible when the best residual is at most this.
    pub tolerance: f64,
    /// Infeasible when the best residual exceeds this.
    pub margin: f64,
    /// Angles this close to `0, π/2, π` are skipped in the splitter scans.
    pub exclusion_radius: f64,
    /// Refinement seeds kept from the coarse grid.
    pub candidates: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid_step: 1e-2,
            rounds: 3,
            tolerance: 1e-6,
            margin: 1e-3,
            exclusion_radius: 1e-3,
            candidates: 8,
        }
    }
}

impl ScanConfig {
    /// Defaults for scans over all three angles, where `1e-2` would need `~2.5·10⁸` points.
    pub fn three_angle() -> Self {
        Self {
            grid_step: 0.1,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.grid_step.is_finite() && self.grid_step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {}",
                self.grid_step
            )));
        }
        if self.candidates == 0 {
            return Err(Error::InvalidParameter(
                "at least one candidate is needed".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Axis {
    lo: f64,
    hi: f64,
    periodic: bool,
}

impl Axis {
    fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: false,
        }
    }

    fn angle() -> Self {
        Self {
            lo: 0.0,
            hi: TAU,
            periodic: true,
        }
    }

    fn count(&self, step: f64) -> usize {
        let n = ((self.hi - self.lo) / step).floor() as usize;
        if self.periodic {
            n.max(1)
        } else {
            n + 1
        }
    }

    fn admit(&self, x: f64) -> Option<f64> {
        if self.periodic {
            Some(self.lo + (x - self.lo).rem_euclid(self.hi - self.lo))
        } else if x >= self.lo && x <= self.hi {
            Some(x)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
struct ScanOutcome {
    point: Vec<f64>,
    value: f64,
    evaluations: u64,
    /// Best value after the coarse pass and after each refinement round.
    history: Vec<f64>,
}

const CHUNK: usize = 1 << 14;
const POOL: usize = 64;

/// Keeps the `POOL` smallest `(value, index)` pairs.
fn push_best(best: &mut Vec<(f64, usize)>, item: (f64, usize)) {
    if best.len() == POOL && !lt(item, best[POOL - 1]) {
        return;
    }
    let pos = best.partition_point(|&b| lt(b, item));
    best.insert(pos, item);
    best.truncate(POOL);
}

fn lt(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn grid_point(axes: &[Axis], counts: &[usize], step: f64, mut index: usize) -> Vec<f64> {
    let mut p = vec![0.0; axes.len()];
    for d in (0..axes.len()).rev() {
        p[d] = axes[d].lo + (index % counts[d]) as f64 * step;
        index /= counts[d];
    }
    p
}

/// Minimizes `f` over the grid, then refines the best separated cells by factors of ten.
/// `f` returns `None` for excluded points. The result does not depend on thread scheduling.
fn grid_search<F>(
    axes: &[Axis],
    step: f64,
    rounds: u32,
    candidates: usize,
    f: F,
) -> Option<ScanOutcome>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let counts: Vec<usize> = axes.iter().map(|a| a.count(step)).collect();
    let total: usize = counts.iter().product();
    let chunks = total.div_ceil(CHUNK);
    let pools: Vec<(Vec<(f64, usize)>, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best = Vec::with_capacity(POOL + 1);
            let mut evals = 0u64;
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                if let Some(v) = f(&grid_point(axes, &counts, step, i)) {
                    evals += 1;
                    if v.is_finite() {
                        push_best(&mut best, (v, i));
                    }
                }
            }
            (best, evals)
        })
        .collect();
    let mut evaluations: u64 = pools.iter().map(|p| p.1).sum();
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for (pool, _) in &pools {
        for &item in pool {
            push_best(&mut merged, item);
        }
    }
    if merged.is_empty() {
        return None;
    }

    // Seeds at least two cells apart along some axis.
    let mut seeds: Vec<(Vec<f64>, f64)> = Vec::new();
    for &(v, i) in &merged {
        let p = grid_point(axes, &counts, step, i);
        let far = seeds.iter().all(|(q, _)| {
            p.iter()
                .zip(q)
                .zip(axes)
                .any(|((a, b), ax)| axis_distance(ax, *a, *b) > 2.5 * step)
        });
        if far {
            seeds.push((p, v));
            if seeds.len() == candidates {
                break;
            }
        }
    }

    let mut history = vec![seeds[0].1];
    let mut local_step = step;
    for _ in 0..rounds {
        local_step /= 10.0;
        let mut evals = 0u64;
        for seed in seeds.iter_mut() {
            let (p, v, n) = refine(axes, &seed.0, seed.1, local_step, &f);
            *seed = (p, v);
            evals += n;
        }
        evaluations += evals;
        history.push(seeds.iter().map(|s| s.1).fold(f64::INFINITY, f64::min));
    }
    let best = seeds
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .map(|(_, s)| s.clone())
        .expect("at least one seed");
    Some(ScanOutcome {
        point: best.0,
        value: best.1,
        evaluations,
        history,
    })
}

fn axis_distance(axis: &Axis, a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if axis.periodic {
        d.min((axis.hi - axis.lo) - d)
    } else {
        d
    }
}

/// One refinement pass: the `21^d` grid of spacing `step` centred on `center`.
fn refine<F>(axes: &[Axis], center: &[f64], value: f64, step: f64, f: &F) -> (Vec<f64>, f64, u64)
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    const HALF: i64 = 10;
    let side = (2 * HALF + 1) as usize;
    let dims = axes.len();
    let total = side.pow(dims as u32);
    let results: Vec<Option<(f64, Vec<f64>)>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut p = vec![0.0; dims];
            for d in (0..dims).rev() {
                let off = (idx % side) as i64 - HALF;
                idx /= side;
                p[d] = axes[d].admit(center[d] + off as f64 * step)?;
            }
            f(&p).filter(|v| v.is_finite()).map(|v| (v, p))
        })
        .collect();
    let mut best = (center.to_vec(), value);
    let mut evals = 0u64;
    for (v, p) in results.into_iter().flatten() {
        evals += 1;
        if v < best.1 {
            best = (p, v);
        }
    }
    (best.0, best.1, evals)
}

fn near_degenerate(x: f64, radius: f64) -> bool {
    [0.0, FRAC_PI_2, PI].iter().any(|d| (x - d).abs() < radius)
}

fn check_correctable(case: u8) -> Result<CaseAmplitudes> {
    match case {
        1 | 3 => case_amplitudes(case),
        2 => Err(Error::UnsupportedPattern(
            "case 2 already carries the target signs".into(),
        )),
        _ => Err(Error::InvalidCase(case)),
    }
}

/// Corrected amplitudes for one splitter at angle `x`.
pub fn single_bs_corrected(case: u8, x: f64) -> Result<[Complex; 3]> {
    let a = check_correctable(case)?;
    let mut out = [Complex::new(0.0, 0.0); 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = Complex::new(
            a.amplitudes[k] * closed_form::single_bs_factor(case, k as u32, x)?,
            0.0,
        );
    }
    Ok(out)
}

/// Scans one correcting splitter over `(0, π)`, skipping angles within the exclusion
/// radius of `0, π/2, π`.
pub fn single_bs_infeasibility(
    case: u8,
    target: &TargetForm,
    cfg: &ScanConfig,
) -> Result<FeasibilityReport> {
    cfg.validate()?;
    let a = check_correctable(case)?;
    let factors = |x: f64| -> [Complex; 3] {
        std::array::from_fn(|k| {
            let f = closed_form::single_bs_factor(case, k as u32, x).expect("valid case");
            Complex::new(a.amplitudes[k] * f, 0.0)
        })
    };
    let radius = cfg.exclusion_radius;
    let scan = grid_search(
        &[Axis::closed(0.0, PI)],
        cfg.grid_step,
        cfg.rounds,
        cfg.candidates,
        |p| (!near_degenerate(p[0], radius)).then(|| target.residual(&factors(p[0]))),
    )
    .ok_or_else(|| Error::InvalidParameter("grid step leaves no admissible angle".into()))?;
    Ok(FeasibilityReport {
        scheme: "single_bs".into(),
        case: Some(case),
        target: target.name(),
        grid_step: cfg.grid_step,
        rounds: cfg.rounds,
        evaluations: scan.evaluations,
        best_residual: scan.value,
        best_parameters: vec![named("x", scan.point[0])],
        verdict: Verdict::classify(scan.value, cfg.tolerance, cfg.margin),
        extras: vec![named("exclusion_radius", radius)],
    })
}

/// Runs both full target forms and merges them; infeasible only if both are.
pub fn single_bs_both_forms(case: u8, cfg: &ScanConfig) -> Result<FeasibilityReport> {
    let flip = single_bs_infeasibility(case, &TargetForm::SignFlip, cfg)?;
    let ident = single_bs_infeasibility(case, &TargetForm::Identity, cfg)?;
    let best = if ident.best_residual < flip.best_residual {
        &ident
    } else {
        &flip
    };
    let verdict = if flip.verdict.is_infeasible() && ident.verdict.is_infeasible() {
        Verdict::Infeasible { margin: cfg.margin }
    } else {
        Verdict::classify(best.best_residual, cfg.tolerance, cfg.margin)
    };
    Ok(FeasibilityReport {
        scheme: "single_bs".into(),
        case: Some(case),
        target: "sign_flip+identity".into(),
        grid_step: cfg.grid_step,
        rounds: cfg.rounds,
        evaluations: flip.evaluations + ident.evaluations,
        best_residual: best.best_residual,
        best_parameters: best.best_parameters.clone(),
        verdict,
        extras: vec![
            named("sign_flip_best_residual", flip.best_residual),
            named("sign_flip_best_x", flip.best_parameters[0].value),
            named("identity_best_residual", ident.best_residual),
            named("identity_best_x", ident.best_parameters[0].value),
            named("exclusion_radius", cfg.exclusion_radius),
        ],
    })
}

/// Corrected case-3 amplitudes after adding a photon with splitter `x`, a phase `φ` per
/// photon and removing a photon with splitter `y`.
pub fn two_bs_corrected(case: u8, x: f64, y: f64, phi: f64) -> Result<[Complex; 3]> {
    let a = two_bs_amplitudes(case)?;
    let mut out = [Complex::new(0.0, 0.0); 3];
    for k in 0..3 {
        out[k] = Complex::from_polar(
            a[k] * closed_form::two_bs_factor(k as u32, x, y),
            phi * k as f64,
        );
    }
    Ok(out)
}

fn two_bs_amplitudes(case: u8) -> Result<[f64; 3]> {
    match case {
        3 => Ok(case_amplitudes(3)?.amplitudes),
        1 => Err(Error::UnsupportedPattern(
            "the two-splitter scheme is modelled for case 3 only".into(),
        )),
        2 => Err(Error::UnsupportedPattern(
            "case 2 already carries the target signs".into(),
        )),
        _ => Err(Error::InvalidCase(case)),
    }
}

/// Scans `(x, y)` over `(0, π)²`, and the phase `φ` over `[0, 2π)` when requested.
/// Also reports the best point on the slice `x = y`.
pub fn two_bs_feasibility(
    case: u8,
    target: &TargetForm,
    cfg: &ScanConfig,
    with_phase: bool,
) -> Result<FeasibilityReport> {
    cfg.validate()?;
    two_bs_amplitudes(case)?;
    let radius = cfg.exclusion_radius;
    let eval = |x: f64, y: f64, phi: f64| -> Option<f64> {
        if near_degenerate(x, radius) || near_degenerate(y, radius) {
            return None;
        }
        Some(target.residual(&two_bs_corrected(case, x, y, phi).expect("case checked")))
    };
    let mut axes = vec![Axis::closed(0.0, PI), Axis::closed(0.0, PI)];
    if with_phase {
        axes.push(Axis::angle());
    }
    let scan = grid_search(&axes, cfg.grid_step, cfg.rounds, cfg.candidates, |p| {
        eval(p[0], p[1], p.get(2).copied().unwrap_or(0.0))
    })
    .ok_or_else(|| Error::InvalidParameter("grid step leaves no admissible angle".into()))?;

    let mut slice_axes = vec![Axis::closed(0.0, PI)];
    if with_phase {
        slice_axes.push(Axis::angle());
    }
    let slice = grid_search(
        &slice_axes,
        cfg.grid_step,
        cfg.rounds,
        cfg.candidates,
        |p| eval(p[0], p[0], p.get(1).copied().unwrap_or(0.0)),
    )
    .ok_or_else(|| Error::InvalidParameter("grid step leaves no admissible angle".into()))?;

    let mut params = vec![named("x", scan.point[0]), named("y", scan.point[1])];
    if with_phase {
        params.push(named("phi", scan.point[2]));
    }
    Ok(FeasibilityReport {
        scheme: "two_bs".into(),
        case: Some(case),
        target: target.name(),
        grid_step: cfg.grid_step,
        rounds: cfg.rounds,
        evaluations: scan.evaluations + slice.evaluations,
        best_residual: scan.value,
        best_parameters: params,
        verdict: Verdict::classify(scan.value, cfg.tolerance, cfg.margin),
        extras: vec![
            named("equal_angle_best_residual", slice.value),
            named("equal_angle_best_y", slice.point[0]),
            named("exclusion_radius", radius),
        ],
    })
}

fn check_ns_in_ns_pattern(case: u8, pattern: (u32, u32)) -> Result<()> {
    let allowed: &[(u32, u32)] = match case {
        1 => &[(2, 0), (0, 2), (1, 1)],
        3 => &[(1, 0), (0, 1)],
        2 => {
            return Err(Error::UnsupportedPattern(
                "case 2 already carries the target signs".into(),
            ))
        }
        _ => return Err(Error::InvalidCase(case)),
    };
    if allowed.contains(&pattern) {
        Ok(())
    } else {
        Err(Error::UnsupportedPattern(format!(
            "n2={}, n3={} is not a candidate for case {case}",
            pattern.0, pattern.1
        )))
    }
}

/// Corrected amplitudes when the case state is fed, with a fresh ancilla `|1,0⟩`, into a
/// second three-mode network and `pattern` is detected.
pub fn ns_in_ns_corrected(
    case: u8,
    pattern: (u32, u32),
    transform: &ModeTransform,
) -> Result<[Complex; 3]> {
    check_ns_in_ns_pattern(case, pattern)?;
    let a = case_amplitudes(case)?;
    ns_in_ns_with(case, &a.amplitudes, pattern, transform)
}

fn ns_in_ns_with(
    case: u8,
    amps: &[f64; 3],
    pattern: (u32, u32),
    transform: &ModeTransform,
) -> Result<[Complex; 3]> {
    if transform.dim() != 3 {
        return Err(Error::DimensionMismatch {
            left: 3,
            right: transform.dim(),
        });
    }
    let mut out = [Complex::new(0.0, 0.0); 3];
    for k in 0..3u32 {
        let n = closed_form::surviving_photons(case, k)?;
        out[k as usize] = ns_transition(transform, n, 1, pattern.0, pattern.1) * amps[k as usize];
    }
    Ok(out)
}

/// Scans all three angles of the second network.
pub fn ns_in_ns_feasibility(
    case: u8,
    pattern: (u32, u32),
    target: &TargetForm,
    cfg: &ScanConfig,
) -> Result<FeasibilityReport> {
    cfg.validate()?;
    check_ns_in_ns_pattern(case, pattern)?;
    let amps = case_amplitudes(case)?.amplitudes;
    let axes = [Axis::angle(), Axis::angle(), Axis::angle()];
    let scan = grid_search(&axes, cfg.grid_step, cfg.rounds, cfg.candidates, |p| {
        let net = general3(p[0], p[1], p[2]).transpose();
        Some(target.residual(&ns_in_ns_with(case, &amps, pattern, &net).expect("checked")))
    })
    .expect("periodic axes are never empty");
    let net = general3(scan.point[0], scan.point[1], scan.point[2]).transpose();
    let corrected = ns_in_ns_with(case, &amps, pattern, &net)?;
    Ok(FeasibilityReport {
        scheme: "ns_in_ns".into(),
        case: Some(case),
        target: format!("{} n2={} n3={}", target.name(), pattern.0, pattern.1),
        grid_step: cfg.grid_step,
        rounds: cfg.rounds,
        evaluations: scan.evaluations,
        best_residual: scan.value,
        best_parameters: vec![
            named("theta1", scan.point[0]),
            named("theta2", scan.point[1]),
            named("theta3", scan.point[2]),
        ],
        verdict: Verdict::classify(scan.value, cfg.tolerance, cfg.margin),
        extras: vec![named(
            "min_corrected_probability",
            min_probability(&corrected),
        )],
    })
}

fn min_probability(amps: &[Complex]) -> f64 {
    amps.iter()
        .map(|a| a.norm_sqr())
        .fold(f64::INFINITY, f64::min)
}

/// `θ₂` of the candidate family solving the operator-coefficient system for case 1 with
/// two photons detected in port 2.
pub const FAMILY_THETA2: f64 = 2.466864691;
const FAMILY_RATIO: f64 = 0.6614985514;

/// Member of the candidate family for a given `θ₁` and sign of `θ₂`.
pub fn family_member(theta1: f64, positive: bool) -> [f64; 3] {
    let t2 = if positive {
        FAMILY_THETA2
    } else {
        -FAMILY_THETA2
    };
    let t3 = -(-FAMILY_RATIO / theta1.tan()).atan();
    [theta1, t2, t3]
}

/// Residual along the candidate family, scanning `θ₁` for both signs of `θ₂`.
pub fn family_scan(target: &TargetForm, cfg: &ScanConfig) -> Result<FeasibilityReport> {
    cfg.validate()?;
    let amps = case_amplitudes(1)?.amplitudes;
    let eval = |t1: f64, positive: bool| -> Option<f64> {
        let t = family_member(t1, positive);
        if !t.iter().all(|x| x.is_finite()) {
            return None;
        }
        let net = general3(t[0], t[1], t[2]).transpose();
        Some(target.residual(&ns_in_ns_with(1, &amps, (2, 0), &net).expect("valid")))
    };
    let mut best: Option<(ScanOutcome, bool)> = None;
    for positive in [true, false] {
        if let Some(s) = grid_search(
            &[Axis::angle()],
            cfg.grid_step,
            cfg.rounds,
            cfg.candidates,
            |p| eval(p[0], positive),
        ) {
            if best.as_ref().is_none_or(|(b, _)| s.value < b.value) {
                best = Some((s, positive));
            }
        }
    }
    let (scan, positive) = best.expect("periodic axis is never empty");
    let t = family_member(scan.point[0], positive);
    Ok(FeasibilityReport {
        scheme: "ns_in_ns_family".into(),
        case: Some(1),
        target: format!("{} n2=2 n3=0", target.name()),
        grid_step: cfg.grid_step,
        rounds: cfg.rounds,
        evaluations: scan.evaluations,
        best_residual: scan.value,
        best_parameters: vec![
            named("theta1", t[0]),
            named("theta2", t[1]),
            named("theta3", t[2]),
        ],
        verdict: Verdict::classify(scan.value, cfg.tolerance, cfg.margin),
        extras: Vec::new(),
    })
}

/// Objectives understood by [`optimize_success`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Herald on one photon in port 2 and none in port 3; outputs `∝ (1, 1, −1)`.
    NsSignFlip,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig {
    pub grid_step: f64,
    pub rounds: u32,
    /// Weight of the residual in `min_k p_k − λ·r`.
    pub penalty: f64,
    pub candidates: usize,
    /// Residual accepted as satisfying the constraint.
    pub tolerance: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.1,
            rounds: 7,
            penalty: 1e3,
            candidates: 8,
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub angles: AngleTriple,
    /// `min_k` of the heralding probability over `k = 0, 1, 2`.
    pub probability: f64,
    pub residual: f64,
    pub objective: f64,
    /// Objective after the coarse grid and after each refinement round.
    pub history: Vec<f64>,
    pub evaluations: u64,
}

/// Upper bound on NS success quoted in the literature; reported for comparison only.
pub const CITED_NS_CEILING: f64 = 0.5;

fn sign_flip_terms(t: [f64; 3]) -> (f64, f64) {
    let net = general3(t[0], t[1], t[2]).transpose();
    let amps: Vec<Complex> = (0..3)
        .map(|k| ns_outcome_amplitude(&net, k, 1, 0))
        .collect();
    (min_probability(&amps), TargetForm::SignFlip.residual(&amps))
}

/// Maximizes `min_k p_k − λ·r` over the three angles by a coarse grid and refinement.
pub fn optimize_success(objective: Objective, cfg: &OptimizeConfig) -> Result<OptimizationResult> {
    let Objective::NsSignFlip = objective;
    if !(cfg.grid_step.is_finite() && cfg.grid_step > 0.0) || cfg.candidates == 0 {
        return Err(Error::InvalidParameter(
            "grid step and candidates must be positive".into(),
        ));
    }
    let axes = [Axis::angle(), Axis::angle(), Axis::angle()];
    let lambda = cfg.penalty;
    let scan = grid_search(&axes, cfg.grid_step, cfg.rounds, cfg.candidates, |p| {
        let (prob, r) = sign_flip_terms([p[0], p[1], p[2]]);
        Some(-(prob - lambda * r))
    })
    .expect("periodic axes are never empty");
    let t = [scan.point[0], scan.point[1], scan.point[2]];
    let (probability, residual) = sign_flip_terms(t);
    Ok(OptimizationResult {
        angles: AngleTriple::new(t[0], t[1], t[2])?,
        probability,
        residual,
        objective: -scan.value,
        history: scan.history.iter().map(|v| -v).collect(),
        evaluations: scan.evaluations,
    })
}

impl OptimizationResult {
    pub fn report(&self, cfg: &OptimizeConfig) -> FeasibilityReport {
        FeasibilityReport {
            scheme: "optimize_ns".into(),
            case: Some(2),
            target: "sign_flip".into(),
            grid_step: cfg.grid_step,
            rounds: cfg.rounds,
            evaluations: self.evaluations,
            best_residual: self.residual,
            best_parameters: vec![
                named("theta1", self.angles.theta1),
                named("theta2", self.angles.theta2),
                named("theta3", self.angles.theta3),
            ],
            verdict: if self.residual <= cfg.tolerance {
                Verdict::Feasible {
                    tolerance: cfg.tolerance,
                }
            } else {
                Verdict::Inconclusive {
                    tolerance: cfg.tolerance,
                    margin: cfg.tolerance,
                }
            },
            extras: vec![
                named("success_probability", self.probability),
                named("objective", self.objective),
                named("penalty", cfg.penalty),
                named("cited_ceiling", CITED_NS_CEILING),
            ],
        }
    }
}

/// Scheme names accepted by [`run_scheme`].
pub const SCHEMES: [&str; 5] = [
    "single_bs:case1",
    "single_bs:case3",
    "two_bs:case3",
    "ns_in_ns:case1",
    "optimize_ns",
];

/// Runs a named scheme. `grid_step` overrides the scheme's default step.
pub fn run_scheme(
    name: &str,
    grid_step: Option<f64>,
    tolerance: Option<f64>,
) -> Result<FeasibilityReport> {
    let base = |three: bool| {
        let mut c = if three {
            ScanConfig::three_angle()
        } else {
            ScanConfig::default()
        };
        if let Some(s) = grid_step {
            c.grid_step = s;
        }
        if let Some(t) = tolerance {
            c.tolerance = t;
        }
        c
    };
    match name {
        "single_bs:case1" => single_bs_both_forms(1, &base(false)),
        "single_bs:case3" => single_bs_both_forms(3, &base(false)),
        "two_bs:case3" => {
            let mut cfg = base(false);
            if grid_step.is_none() {
                cfg.grid_step = 0.05;
            }
            two_bs_feasibility(3, &TargetForm::SignFlip, &cfg, true)
        }
        "ns_in_ns:case1" => {
            let cfg = base(true);
            let mut best: Option<FeasibilityReport> = None;
            let mut extras = Vec::new();
            for pattern in [(2, 0), (0, 2), (1, 1)] {
                let r = ns_in_ns_feasibility(1, pattern, &TargetForm::SignFlip, &cfg)?;
                let tag = format!("n2={}_n3={}", pattern.0, pattern.1);
                extras.push(named(&format!("{tag}_best_residual"), r.best_residual));
                extras.push(named(
                    &format!("{tag}_min_corrected_probability"),
                    r.extra("min_corrected_probability").unwrap_or(0.0),
                ));
                if best
                    .as_ref()
                    .is_none_or(|b| r.best_residual < b.best_residual)
                {
                    best = Some(r);
                }
            }
            let family = family_scan(&TargetForm::SignFlip, &base(false))?;
            extras.push(named("family_best_residual", family.best_residual));
            extras.push(named("family_best_theta1", family.best_parameters[0].value));
            let mut report = best.expect("three patterns");
            report.evaluations += family.evaluations;
            report.extras = extras;
            Ok(report)
        }
        "optimize_ns" => {
            let mut cfg = OptimizeConfig::default();
            if let Some(s) = grid_step {
                cfg.grid_step = s;
            }
            if let Some(t) = tolerance {
                cfg.tolerance = t;
            }
            Ok(optimize_success(Objective::NsSignFlip, &cfg)?.report(&cfg))
        }
        _ => Err(Error::InvalidParameter(format!(
            "unknown scheme `{name}`; expected one of {}",
            SCHEMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_triple_wraps() {
        let a = AngleTriple::new(-0.5, 7.0, TAU).unwrap();
        assert!((a.theta1 - (TAU - 0.5)).abs() < 1e-15);
        assert!((a.theta2 - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(a.theta3, 0.0);
        assert_eq!(AngleTriple::new(f64::NAN, 0.0, 0.0), Err(Error::NonFinite));
    }

    #[test]
    fn ns_point_reproduces_closed_form_matrix() {
        let net = parametrized_network(&AngleTriple::ns_point());
        assert!(net.max_abs_diff(&ns_matrix()) < 1e-12);
    }

    #[test]
    fn residual_basics() {
        let t = [1.0, 1.0, -1.0];
        let c: Vec<Complex> = [2.0, 2.0, -2.0]
            .iter()
            .map(|&x| Complex::new(0.0, x))
            .collect();
        assert!(proportionality_residual(&t, &c) < 1e-15);
        let zero = vec![Complex::new(0.0, 0.0); 3];
        assert_eq!(proportionality_residual(&t, &zero), 1.0);
        let c: Vec<Complex> = [1.0, 1.0, 1.0]
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .collect();
        assert!((proportionality_residual(&t, &c) - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn verdict_thresholds() {
        assert!(Verdict::classify(1e-8, 1e-6, 1e-3).is_feasible());
        assert!(Verdict::classify(0.1, 1e-6, 1e-3).is_infeasible());
        assert!(matches!(
            Verdict::classify(1e-4, 1e-6, 1e-3),
            Verdict::Inconclusive { .. }
        ));
    }

    #[test]
    fn case_amplitude_values() {
        let c2 = case_amplitudes(2).unwrap().amplitudes;
        for (got, want) in c2.iter().zip([0.5, 0.5, -0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let c1 = case_amplitudes(1).unwrap().amplitudes;
        assert!((c1[0] - 0.8408964155).abs() < 1e-9);
        assert!((c1[2] - 0.2498916572).abs() < 1e-9);
        assert_eq!(case_amplitudes(4), Err(Error::InvalidCase(4)));
    }

    #[test]
    fn bad_patterns_rejected() {
        let cfg = ScanConfig::three_angle();
        assert!(matches!(
            ns_in_ns_feasibility(1, (1, 0), &TargetForm::SignFlip, &cfg),
            Err(Error::UnsupportedPattern(_))
        ));
        assert!(matches!(
            ns_in_ns_feasibility(3, (2, 0), &TargetForm::SignFlip, &cfg),
            Err(Error::UnsupportedPattern(_))
        ));
        assert!(
            two_bs_feasibility(1, &TargetForm::SignFlip, &ScanConfig::default(), false).is_err()
        );
        let bad = ScanConfig {
            grid_step: 0.0,
            ..ScanConfig::default()
        };
        assert!(single_bs_infeasibility(1, &TargetForm::SignFlip, &bad).is_err());
        assert!(run_scheme("nope", None, None).is_err());
    }

    #[test]
    fn grid_search_finds_quadratic_minimum() {
        let axes = [Axis::closed(-1.0, 1.0), Axis::angle()];
        let s = grid_search(&axes, 0.1, 4, 4, |p| {
            Some((p[0] - 0.123456).powi(2) + (1.0 - (p[1] - 2.0).cos()))
        })
        .unwrap();
        assert!((s.point[0] - 0.123456).abs() < 1e-4);
        assert!((s.point[1] - 2.0).abs() < 1e-4);
        assert!(s.history.windows(2).all(|w| w[1] <= w[0]));
    }
}
