//! Heralded gate constructions: NS, CS from two NS gates, CNOT from CS, and the
//! two-photon coincidence-basis CNOT.

use std::f64::consts::SQRT_2;

use crate::encodings::{logical_fidelity, Encoding, QubitGate};
use crate::error::{Error, Result};
use crate::fock::{Complex, FockState, OccupationVector};
use crate::linalg::CMatrix;
use crate::measurement::{
    postselect_branches, project, DetectionPattern, ModeLayout, OutcomeBranch,
};
use crate::multiport::{evolve, network_transform, ns_matrix, ElementSpec, ModeTransform};

/// Gate names accepted by [`GateCircuit::by_name`].
pub const GATE_NAMES: [&str; 4] = ["ns", "cs", "cnot_klm", "cnot_2photon"];

/// A heralded linear-optical gate together with the action it should implement.
#[derive(Clone, Debug)]
pub struct GateCircuit {
    pub name: String,
    pub layout: ModeLayout,
    pub elements: Vec<ElementSpec>,
    pub branches: Vec<OutcomeBranch>,
    /// Basis of the computational modes in which the ideal action is written.
    pub readout: Vec<OccupationVector>,
    pub readout_labels: Vec<String>,
    /// Ideal action on the readout basis (columns are images).
    pub ideal: CMatrix,
    /// Count success only when the surviving photons land in the readout subspace.
    pub logical_postselection: bool,
}

/// One heralded run of a gate.
#[derive(Clone, Debug)]
pub struct GateRun {
    pub branch_probabilities: Vec<f64>,
    pub success_probability: f64,
    /// Normalized readout amplitudes per branch; `None` when the branch never fires.
    pub readout: Vec<Option<Vec<Complex>>>,
    /// Unnormalized heralded readout amplitudes summed over branches.
    pub heralded: Vec<Complex>,
}

#[derive(Clone, Debug)]
pub struct TruthRow {
    pub input: String,
    pub branch_probabilities: Vec<f64>,
    pub success_probability: f64,
    pub fidelity: f64,
    /// Conditional readout amplitudes of the first branch that fired.
    pub output: Vec<Complex>,
}

#[derive(Clone, Debug)]
pub struct GateReport {
    pub gate: String,
    pub readout_labels: Vec<String>,
    pub rows: Vec<TruthRow>,
    /// Mean over the truth-table inputs.
    pub success_probability: f64,
    pub min_success_probability: f64,
    pub max_success_probability: f64,
    pub min_fidelity: f64,
    /// `|Tr(U†M)|² / (d·Tr(M†M))` for the heralded map `M`; 1 iff `M ∝ U`.
    pub process_fidelity: f64,
}

fn dual_rail_readout(num_qubits: usize) -> (Vec<OccupationVector>, Vec<String>) {
    let enc = Encoding::dual_rail(num_qubits);
    let labels = (0..enc.logical_dim())
        .map(|i| format!("|{:0width$b}⟩_L", i, width = num_qubits))
        .collect();
    (
        (0..enc.logical_dim()).map(|i| enc.basis_label(i)).collect(),
        labels,
    )
}

fn pattern(pairs: &[(usize, u32)]) -> DetectionPattern {
    DetectionPattern::new(pairs.iter().copied()).expect("distinct modes")
}

fn cs_elements() -> Vec<ElementSpec> {
    let ns = ns_matrix();
    vec![
        ElementSpec::beam_splitter(0.5, 1, 3).expect("valid"),
        ElementSpec::raw(ns.clone(), vec![1, 4, 5]).expect("valid"),
        ElementSpec::raw(ns, vec![3, 6, 7]).expect("valid"),
        ElementSpec::beam_splitter(0.5, 1, 3).expect("valid"),
    ]
}

fn cs_layout() -> ModeLayout {
    ModeLayout::new(8, vec![(4, 1), (5, 0), (6, 1), (7, 0)]).expect("valid layout")
}

/// Rows are output modes `c_H, c_V, t_H, t_V, v_c, v_t`; columns the input modes.
pub fn two_photon_cnot_matrix() -> ModeTransform {
    let s = 1.0 / 3f64.sqrt();
    let r = SQRT_2 * s;
    ModeTransform::from_real_rows(&[
        &[s, 0., 0., 0., r, 0.],
        &[0., -s, s, s, 0., 0.],
        &[0., s, s, 0., 0., s],
        &[0., s, 0., s, 0., -s],
        &[r, 0., 0., 0., -s, 0.],
        &[0., 0., s, -s, 0., -s],
    ])
    .expect("orthogonal")
}

impl GateCircuit {
    /// Nonlinear sign gate: signal on mode 0, ancilla `|1,0⟩` on modes 1 and 2.
    pub fn ns_gate() -> Self {
        let readout = (0..3).map(|k| OccupationVector::new(vec![k])).collect();
        let one = Complex::new(1.0, 0.0);
        Self {
            name: "ns".into(),
            layout: ModeLayout::new(3, vec![(1, 1), (2, 0)]).expect("valid layout"),
            elements: vec![ElementSpec::raw(ns_matrix(), vec![0, 1, 2]).expect("valid")],
            branches: vec![OutcomeBranch::new(pattern(&[(1, 1), (2, 0)]))],
            readout,
            readout_labels: (0..3).map(|k| format!("|{k}⟩")).collect(),
            ideal: CMatrix::diagonal(&[one, one, -one]),
            logical_postselection: false,
        }
    }

    /// Conditional sign flip on two dual-rail qubits (modes 0-3), with NS ancillas on
    /// modes 4,5 and 6,7.
    pub fn cs_gate() -> Self {
        let (readout, readout_labels) = dual_rail_readout(2);
        let one = Complex::new(1.0, 0.0);
        Self {
            name: "cs".into(),
            layout: cs_layout(),
            elements: cs_elements(),
            branches: vec![OutcomeBranch::new(pattern(&[
                (4, 1),
                (5, 0),
                (6, 1),
                (7, 0),
            ]))],
            readout,
            readout_labels,
            ideal: CMatrix::diagonal(&[one, one, one, -one]),
            logical_postselection: false,
        }
    }

    /// CNOT built by sandwiching the CS gate between balanced splitters on the target.
    pub fn cnot_from_cs() -> Self {
        let mut elements = vec![ElementSpec::beam_splitter(0.5, 2, 3).expect("valid")];
        elements.extend(cs_elements());
        elements.push(ElementSpec::beam_splitter(0.5, 2, 3).expect("valid"));
        let (readout, readout_labels) = dual_rail_readout(2);
        Self {
            name: "cnot_klm".into(),
            layout: cs_layout(),
            elements,
            branches: vec![OutcomeBranch::new(pattern(&[
                (4, 1),
                (5, 0),
                (6, 1),
                (7, 0),
            ]))],
            readout,
            readout_labels,
            ideal: QubitGate::Cnot.unitary().matrix().clone(),
            logical_postselection: false,
        }
    }

    /// Coincidence-basis CNOT on modes `c_H, c_V, t_H, t_V` with vacuum ancillas `v_c, v_t`.
    pub fn two_photon_cnot() -> Self {
        let (readout, _) = dual_rail_readout(2);
        Self {
            name: "cnot_2photon".into(),
            layout: ModeLayout::new(6, vec![(4, 0), (5, 0)]).expect("valid layout"),
            elements: vec![
                ElementSpec::raw(two_photon_cnot_matrix(), (0..6).collect()).expect("valid")
            ],
            branches: vec![OutcomeBranch::new(pattern(&[(4, 0), (5, 0)]))],
            readout,
            readout_labels: ["|HH⟩", "|HV⟩", "|VH⟩", "|VV⟩"].map(String::from).to_vec(),
            ideal: QubitGate::Cnot.unitary().matrix().clone(),
            logical_postselection: true,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "ns" => Ok(Self::ns_gate()),
            "cs" => Ok(Self::cs_gate()),
            "cnot_klm" => Ok(Self::cnot_from_cs()),
            "cnot_2photon" => Ok(Self::two_photon_cnot()),
            _ => Err(Error::UnknownGate(name.to_string())),
        }
    }

    pub fn num_modes(&self) -> usize {
        self.layout.num_modes
    }

    pub fn transform(&self) -> Result<ModeTransform> {
        network_transform(&self.elements, self.num_modes())
    }

    /// Full pre-measurement output for a state on the computational modes.
    pub fn output_state(&self, input: &FockState) -> Result<FockState> {
        evolve(&self.layout.prepare(input)?, &self.transform()?)
    }

    /// Computational-mode state `Σ_i c_i |readout_i⟩`.
    pub fn readout_state(&self, amplitudes: &[Complex]) -> Result<FockState> {
        if amplitudes.len() != self.readout.len() {
            return Err(Error::DimensionMismatch {
                left: self.readout.len(),
                right: amplitudes.len(),
            });
        }
        FockState::from_terms(
            self.layout.computational.len(),
            self.readout.iter().cloned().zip(amplitudes.iter().copied()),
        )
    }

    /// Runs the gate on readout amplitudes.
    pub fn run(&self, amplitudes: &[Complex]) -> Result<GateRun> {
        let transform = self.transform()?;
        self.run_with(&transform, &self.readout_state(amplitudes)?)
    }

    fn run_with(&self, transform: &ModeTransform, input: &FockState) -> Result<GateRun> {
        let (input, _) = input.normalize()?;
        let out = evolve(&self.layout.prepare(&input)?, transform)?;
        let report = postselect_branches(&out, &self.branches)?;
        let mut heralded = vec![Complex::new(0.0, 0.0); self.readout.len()];
        let mut branch_probabilities = Vec::with_capacity(self.branches.len());
        let mut readout = Vec::with_capacity(self.branches.len());
        for (branch, outcome) in self.branches.iter().zip(&report.outcomes) {
            let mut kept = project(&out, &branch.pattern)?;
            if let Some(v) = &branch.correction {
                kept = evolve(&kept, v)?;
            }
            let amps: Vec<Complex> = self.readout.iter().map(|o| kept.amplitude(o)).collect();
            let logical_mass: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            let p = if self.logical_postselection {
                logical_mass
            } else {
                outcome.result.probability
            };
            branch_probabilities.push(p);
            for (h, a) in heralded.iter_mut().zip(&amps) {
                *h += a;
            }
            readout.push(if logical_mass > 1e-24 {
                let s = 1.0 / logical_mass.sqrt();
                Some(amps.iter().map(|z| z * s).collect())
            } else {
                None
            });
        }
        Ok(GateRun {
            success_probability: branch_probabilities.iter().sum(),
            branch_probabilities,
            readout,
            heralded,
        })
    }

    /// Truth table on the readout basis plus the process fidelity of the heralded map.
    pub fn verify(&self) -> Result<GateReport> {
        let transform = self.transform()?;
        let d = self.readout.len();
        let mut rows = Vec::with_capacity(d);
        let mut heralded = CMatrix::zeros(d);
        for i in 0..d {
            let input = FockState::basis(self.readout[i].clone());
            let run = self.run_with(&transform, &input)?;
            let ideal_col: Vec<Complex> = (0..d).map(|r| self.ideal[(r, i)]).collect();
            let output = run
                .readout
                .iter()
                .flatten()
                .next()
                .cloned()
                .unwrap_or_default();
            let fidelity = if output.is_empty() {
                0.0
            } else {
                logical_fidelity(&ideal_col, &output)
            };
            for (r, z) in run.heralded.iter().enumerate() {
                heralded[(r, i)] = *z;
            }
            rows.push(TruthRow {
                input: self.readout_labels[i].clone(),
                branch_probabilities: run.branch_probabilities,
                success_probability: run.success_probability,
                fidelity,
                output,
            });
        }
        let overlap: Complex = (0..d)
            .flat_map(|r| (0..d).map(move |c| (r, c)))
            .map(|(r, c)| self.ideal[(r, c)].conj() * heralded[(r, c)])
            .sum();
        let mass: f64 = (0..d)
            .flat_map(|r| (0..d).map(move |c| (r, c)))
            .map(|(r, c)| heralded[(r, c)].norm_sqr())
            .sum();
        let process_fidelity = if mass > 0.0 {
            overlap.norm_sqr() / (d as f64 * mass)
        } else {
            0.0
        };
        let probs: Vec<f64> = rows.iter().map(|r| r.success_probability).collect();
        Ok(GateReport {
            gate: self.name.clone(),
            readout_labels: self.readout_labels.clone(),
            success_probability: probs.iter().sum::<f64>() / d as f64,
            min_success_probability: probs.iter().copied().fold(f64::INFINITY, f64::min),
            max_success_probability: probs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_fidelity: rows
                .iter()
                .map(|r| r.fidelity)
                .fold(f64::INFINITY, f64::min),
            process_fidelity,
            rows,
        })
    }
}
