//! Photon-counting measurement, postselection and postcorrection.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{Complex, FockState, OccupationVector};
use crate::multiport::{evolve, ModeTransform};
use crate::TOLERANCE;

/// Below this kept norm² no conditional state is returned.
const EMPTY_PROJECTION: f64 = 1e-24;

/// Exact photon counts required on a set of measured modes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DetectionPattern(BTreeMap<usize, u32>);

impl DetectionPattern {
    pub fn new(constraints: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (mode, count) in constraints {
            if map.insert(mode, count).is_some() {
                return Err(Error::DuplicateMode(mode));
            }
        }
        Ok(Self(map))
    }

    pub fn modes(&self) -> Vec<usize> {
        self.0.keys().copied().collect()
    }

    pub fn count(&self, mode: usize) -> Option<u32> {
        self.0.get(&mode).copied()
    }

    pub fn constraints(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn matches(&self, occ: &OccupationVector) -> bool {
        self.0.iter().all(|(&m, &c)| occ.get(m) == c)
    }

    /// True when no occupation vector can satisfy both patterns.
    pub fn excludes(&self, other: &Self) -> bool {
        self.0
            .iter()
            .any(|(m, c)| other.0.get(m).is_some_and(|d| d != c))
    }

    fn check_range(&self, num_modes: usize) -> Result<()> {
        match self.0.keys().find(|&&m| m >= num_modes) {
            Some(&mode) => Err(Error::ModeOutOfRange { mode, num_modes }),
            None => Ok(()),
        }
    }
}

impl fmt::Debug for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(m, c)| format!("{m}={c}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A heralding pattern and the correction applied to the surviving modes when it fires.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeBranch {
    pub pattern: DetectionPattern,
    pub correction: Option<ModeTransform>,
}

impl OutcomeBranch {
    pub fn new(pattern: DetectionPattern) -> Self {
        Self {
            pattern,
            correction: None,
        }
    }

    pub fn with_correction(pattern: DetectionPattern, correction: ModeTransform) -> Self {
        Self {
            pattern,
            correction: Some(correction),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PostselectionResult {
    pub probability: f64,
    /// Normalized state on the unmeasured modes; `None` when nothing survives.
    pub conditional_state: Option<FockState>,
}

impl PostselectionResult {
    fn from_projection(projected: FockState) -> Self {
        let probability = projected.norm_sqr();
        let conditional_state = if probability > EMPTY_PROJECTION {
            projected.normalize().ok().map(|(s, _)| s)
        } else {
            None
        };
        Self {
            probability,
            conditional_state,
        }
    }
}

/// Keeps the terms matching `pattern` and removes the measured modes, without renormalizing.
pub fn project(state: &FockState, pattern: &DetectionPattern) -> Result<FockState> {
    pattern.check_range(state.num_modes())?;
    let measured = pattern.modes();
    let mut out = FockState::zero(state.num_modes() - measured.len());
    for (occ, &amp) in state.terms() {
        if pattern.matches(occ) {
            out.accumulate(occ.without_modes(&measured), amp);
        }
    }
    Ok(out)
}

/// Projects onto `pattern` and renormalizes.
pub fn postselect(state: &FockState, pattern: &DetectionPattern) -> Result<PostselectionResult> {
    Ok(PostselectionResult::from_projection(project(
        state, pattern,
    )?))
}

/// Fails unless every pair of branch patterns is mutually exclusive.
pub fn check_exclusive(branches: &[OutcomeBranch]) -> Result<()> {
    for i in 0..branches.len() {
        for j in i + 1..branches.len() {
            if !branches[i].pattern.excludes(&branches[j].pattern) {
                return Err(Error::OverlappingPatterns(i, j));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchOutcome {
    pub branch: usize,
    pub result: PostselectionResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchReport {
    pub outcomes: Vec<BranchOutcome>,
    /// Sum of the branch probabilities.
    pub success_probability: f64,
    /// Mass left outside every branch.
    pub failure_probability: f64,
}

fn corrected_projection(state: &FockState, branch: &OutcomeBranch) -> Result<FockState> {
    let projected = project(state, &branch.pattern)?;
    match &branch.correction {
        Some(v) => evolve(&projected, v),
        None => Ok(projected),
    }
}

/// Postselects on each branch and applies its correction.
pub fn postselect_branches(state: &FockState, branches: &[OutcomeBranch]) -> Result<BranchReport> {
    check_exclusive(branches)?;
    let outcomes = branches
        .iter()
        .enumerate()
        .map(|(branch, b)| {
            Ok(BranchOutcome {
                branch,
                result: PostselectionResult::from_projection(corrected_projection(state, b)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let success_probability: f64 = outcomes.iter().map(|o| o.result.probability).sum();
    Ok(BranchReport {
        outcomes,
        success_probability,
        failure_probability: (state.norm_sqr() - success_probability).max(0.0),
    })
}

/// Probability of every photon-count record on `measured` modes, keyed by the counts
/// in the order the modes are given.
pub fn outcome_distribution(
    state: &FockState,
    measured: &[usize],
) -> Result<BTreeMap<Vec<u32>, f64>> {
    if let Some(&mode) = measured.iter().find(|&&m| m >= state.num_modes()) {
        return Err(Error::ModeOutOfRange {
            mode,
            num_modes: state.num_modes(),
        });
    }
    // Amplitudes sharing a full label never collide, so probabilities add.
    let mut dist = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let key: Vec<u32> = measured.iter().map(|&m| occ.get(m)).collect();
        *dist.entry(key).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(dist)
}

/// Which modes carry the computational state and how the ancillas are prepared.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeLayout {
    pub num_modes: usize,
    /// Computational modes in increasing order.
    pub computational: Vec<usize>,
    /// Ancilla modes with their prepared photon counts.
    pub ancilla: Vec<(usize, u32)>,
}

impl ModeLayout {
    pub fn new(num_modes: usize, ancilla: Vec<(usize, u32)>) -> Result<Self> {
        let mut seen = vec![false; num_modes];
        for &(m, _) in &ancilla {
            if m >= num_modes {
                return Err(Error::ModeOutOfRange { mode: m, num_modes });
            }
            if seen[m] {
                return Err(Error::DuplicateMode(m));
            }
            seen[m] = true;
        }
        let computational = (0..num_modes).filter(|&m| !seen[m]).collect();
        Ok(Self {
            num_modes,
            computational,
            ancilla,
        })
    }

    pub fn ancilla_modes(&self) -> Vec<usize> {
        self.ancilla.iter().map(|&(m, _)| m).collect()
    }

    /// Interleaves a computational-mode state with the prepared ancillas.
    pub fn prepare(&self, computational: &FockState) -> Result<FockState> {
        if computational.num_modes() != self.computational.len() {
            return Err(Error::ModeCountMismatch {
                expected: self.computational.len(),
                found: computational.num_modes(),
            });
        }
        let mut out = FockState::zero(self.num_modes);
        for (occ, &amp) in computational.terms() {
            let mut counts = vec![0u32; self.num_modes];
            for (&m, &n) in self.computational.iter().zip(occ.counts()) {
                counts[m] = n;
            }
            for &(m, n) in &self.ancilla {
                counts[m] = n;
            }
            out.accumulate(OccupationVector::new(counts), amp);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchIndependence {
    pub branch: usize,
    /// Branch probability for each probe, in probe order.
    pub probabilities: Vec<f64>,
    pub max_deviation: f64,
    /// The heralded map is a scaled isometry on the span of the probes.
    pub unitary_on_probes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport {
    pub branches: Vec<BranchIndependence>,
    pub max_deviation: f64,
    pub operationally_unitary: bool,
}

/// Checks that each branch fires with the same probability on every probe and acts
/// as a scaled isometry on them.
pub fn input_independence_check(
    branches: &[OutcomeBranch],
    transform: &ModeTransform,
    layout: &ModeLayout,
    probes: &[FockState],
) -> Result<IndependenceReport> {
    check_exclusive(branches)?;
    let outputs = probes
        .iter()
        .map(|p| {
            let (p, _) = p.normalize()?;
            let out = evolve(&layout.prepare(&p)?, transform)?;
            Ok((p, out))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut reports = Vec::with_capacity(branches.len());
    for (id, branch) in branches.iter().enumerate() {
        let kept = outputs
            .iter()
            .map(|(_, out)| corrected_projection(out, branch))
            .collect::<Result<Vec<_>>>()?;
        let probabilities: Vec<f64> = kept.iter().map(|k| k.norm_sqr()).collect();
        let lo = probabilities.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = probabilities
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let max_deviation = if probabilities.is_empty() {
            0.0
        } else {
            hi - lo
        };

        // ⟨Kψ_i|Kψ_j⟩ = p ⟨ψ_i|ψ_j⟩ for one constant p.
        let p = probabilities.first().copied().unwrap_or(0.0);
        let mut unitary = true;
        'outer: for i in 0..kept.len() {
            for j in i..kept.len() {
                let lhs: Complex = kept[i].inner_product(&kept[j])?;
                let rhs = outputs[i].0.inner_product(&outputs[j].0)? * p;
                if (lhs - rhs).norm() > TOLERANCE {
                    unitary = false;
                    break 'outer;
                }
            }
        }
        reports.push(BranchIndependence {
            branch: id,
            probabilities,
            max_deviation,
            unitary_on_probes: unitary && max_deviation <= TOLERANCE,
        });
    }
    let max_deviation = reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    let operationally_unitary = reports.iter().all(|r| r.unitary_on_probes);
    Ok(IndependenceReport {
        branches: reports,
        max_deviation,
        operationally_unitary,
    })
}
