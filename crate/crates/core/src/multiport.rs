//! Mode transformations and evolution of Fock states through them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::{factorial, Complex, FockState, OccupationVector};
use crate::linalg::CMatrix;
use crate::TOLERANCE;

/// A unitary `N×N` matrix acting on mode operators.
///
/// Column `j` holds the image of `a_j†`: `a_j† ↦ Σ_l Λ[l][j] a_l†`.
#[derive(Clone, PartialEq, Debug)]
pub struct ModeTransform(CMatrix);

impl ModeTransform {
    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    /// Wraps a matrix after checking `‖Λ†Λ − I‖_max ≤ 1e-9`.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let deviation = matrix.unitarity_error();
        if !deviation.is_finite() {
            return Err(Error::NonFinite);
        }
        if deviation > TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(matrix))
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        Self::from_matrix(CMatrix::from_rows(rows)?)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_matrix(CMatrix::from_real_rows(rows)?)
    }

    fn real(rows: [[f64; 3]; 3]) -> Self {
        Self(CMatrix::from_real_rows(&[&rows[0], &rows[1], &rows[2]]).expect("square"))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn unitarity_error(&self) -> f64 {
        self.0.unitarity_error()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

/// `[[√η, √(1−η)], [√(1−η), −√η]]`.
pub fn beam_splitter(eta: f64) -> Result<ModeTransform> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidReflectivity(eta));
    }
    let t = eta.sqrt();
    let r = (1.0 - eta).sqrt();
    Ok(ModeTransform(
        CMatrix::from_real_rows(&[&[t, r], &[r, -t]]).expect("square"),
    ))
}

/// `[[cos θ, sin θ], [sin θ, −cos θ]]`; equal to `beam_splitter(cos²θ)` for θ in `[0, π/2]`.
pub fn beam_splitter_angle(theta: f64) -> ModeTransform {
    let (s, c) = theta.sin_cos();
    ModeTransform(CMatrix::from_real_rows(&[&[c, s], &[s, -c]]).expect("square"))
}

/// `diag(e^{iΔ}, 1)`.
pub fn phase_shifter(delta: f64) -> ModeTransform {
    ModeTransform(CMatrix::diagonal(&[
        Complex::from_polar(1.0, delta),
        Complex::new(1.0, 0.0),
    ]))
}

/// The real three-mode family parametrized by three angles.
pub fn general3(theta1: f64, theta2: f64, theta3: f64) -> ModeTransform {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let (s3, c3) = theta3.sin_cos();
    ModeTransform::real([
        [-c2, s2 * c3, s2 * s3],
        [c1 * s2, s1 * s3 + c1 * c2 * c3, -s1 * c3 + c1 * c2 * s3],
        [s1 * s2, -c1 * s3 + s1 * c2 * c3, c1 * c3 + s1 * c2 * s3],
    ])
}

/// The nonlinear-sign network in closed form.
pub fn ns_matrix() -> ModeTransform {
    let r2 = 2f64.sqrt();
    let a = 1.0 - r2;
    let b = 2f64.powf(-0.25);
    let c = (3.0 / r2 - 2.0).sqrt();
    let d = 0.5 - 1.0 / r2;
    let e = r2 - 0.5;
    ModeTransform::real([[a, b, c], [b, 0.5, d], [c, d, e]])
}

/// Three splitters and two phase shifters whose product is `general3(θ1, θ2, θ3)`.
pub fn general3_network(theta1: f64, theta2: f64, theta3: f64) -> Vec<ElementSpec> {
    use std::f64::consts::PI;
    vec![
        ElementSpec::beam_splitter_angle(theta3, 1, 2),
        ElementSpec::phase_shifter(PI, 1),
        ElementSpec::beam_splitter_angle(theta2, 0, 1),
        ElementSpec::phase_shifter(PI, 0),
        ElementSpec::beam_splitter_angle(theta1, 1, 2),
    ]
}

/// Matrix product in circuit order: `first` acts, then `then`.
pub fn compose(first: &ModeTransform, then: &ModeTransform) -> Result<ModeTransform> {
    Ok(ModeTransform(then.0.try_mul(&first.0)?))
}

#[derive(Clone, PartialEq, Debug)]
pub enum ElementKind {
    BeamSplitter {
        eta: f64,
    },
    /// Splitter given by its angle, `η = cos²θ`.
    BeamSplitterAngle {
        theta: f64,
    },
    /// Phase `e^{iΔ}` on a single mode.
    PhaseShifter {
        delta: f64,
    },
    General3 {
        theta1: f64,
        theta2: f64,
        theta3: f64,
    },
    Raw(ModeTransform),
}

impl ElementKind {
    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::BeamSplitter { .. } | ElementKind::BeamSplitterAngle { .. } => {
                "beam splitter"
            }
            ElementKind::PhaseShifter { .. } => "phase shifter",
            ElementKind::General3 { .. } => "general3",
            ElementKind::Raw(_) => "raw transform",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            ElementKind::BeamSplitter { .. } | ElementKind::BeamSplitterAngle { .. } => 2,
            ElementKind::PhaseShifter { .. } => 1,
            ElementKind::General3 { .. } => 3,
            ElementKind::Raw(m) => m.dim(),
        }
    }

    /// The block acting on the element's own target modes.
    pub fn block(&self) -> Result<ModeTransform> {
        Ok(match self {
            ElementKind::BeamSplitter { eta } => beam_splitter(*eta)?,
            ElementKind::BeamSplitterAngle { theta } => beam_splitter_angle(*theta),
            ElementKind::PhaseShifter { delta } => {
                ModeTransform(CMatrix::diagonal(&[Complex::from_polar(1.0, *delta)]))
            }
            ElementKind::General3 {
                theta1,
                theta2,
                theta3,
            } => general3(*theta1, *theta2, *theta3),
            ElementKind::Raw(m) => m.clone(),
        })
    }
}

/// An optical element placed on specific modes.
#[derive(Clone, PartialEq, Debug)]
pub struct ElementSpec {
    pub kind: ElementKind,
    pub targets: Vec<usize>,
}

impl ElementSpec {
    pub fn new(kind: ElementKind, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::ArityMismatch {
                element: kind.name(),
                expected: kind.arity(),
                found: targets.len(),
            });
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::DuplicateMode(*t));
            }
        }
        if let ElementKind::BeamSplitter { eta } = kind {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidReflectivity(eta));
            }
        }
        Ok(Self { kind, targets })
    }

    pub fn beam_splitter(eta: f64, i: usize, j: usize) -> Result<Self> {
        Self::new(ElementKind::BeamSplitter { eta }, vec![i, j])
    }

    pub fn beam_splitter_angle(theta: f64, i: usize, j: usize) -> Self {
        Self::new(ElementKind::BeamSplitterAngle { theta }, vec![i, j]).expect("two modes")
    }

    pub fn phase_shifter(delta: f64, mode: usize) -> Self {
        Self::new(ElementKind::PhaseShifter { delta }, vec![mode]).expect("one mode")
    }

    pub fn general3(theta1: f64, theta2: f64, theta3: f64, modes: [usize; 3]) -> Result<Self> {
        Self::new(
            ElementKind::General3 {
                theta1,
                theta2,
                theta3,
            },
            modes.to_vec(),
        )
    }

    pub fn raw(transform: ModeTransform, targets: Vec<usize>) -> Result<Self> {
        Self::new(ElementKind::Raw(transform), targets)
    }
}

/// Places the element's block on its target modes of an `N`-mode identity.
pub fn embed(element: &ElementSpec, total_modes: usize) -> Result<ModeTransform> {
    for (i, &t) in element.targets.iter().enumerate() {
        if t >= total_modes {
            return Err(Error::ModeOutOfRange {
                mode: t,
                num_modes: total_modes,
            });
        }
        if element.targets[..i].contains(&t) {
            return Err(Error::DuplicateMode(t));
        }
    }
    let block = element.kind.block()?;
    if block.dim() != element.targets.len() {
        return Err(Error::ArityMismatch {
            element: element.kind.name(),
            expected: block.dim(),
            found: element.targets.len(),
        });
    }
    let mut m = CMatrix::identity(total_modes);
    for (a, &ta) in element.targets.iter().enumerate() {
        for (b, &tb) in element.targets.iter().enumerate() {
            m[(ta, tb)] = block.entry(a, b);
        }
    }
    Ok(ModeTransform(m))
}

/// Product of the embedded elements in circuit order.
pub fn network_transform(elements: &[ElementSpec], total_modes: usize) -> Result<ModeTransform> {
    let mut acc = ModeTransform::identity(total_modes);
    for el in elements {
        acc = compose(&acc, &embed(el, total_modes)?)?;
    }
    Ok(acc)
}

/// Sends every basis term through `Λ` by expanding `∏_k (Σ_l Λ[l][k] a_l†)^{n_k} / √∏n_k!`
/// on the vacuum. Output terms are accumulated in label order.
pub fn evolve(state: &FockState, transform: &ModeTransform) -> Result<FockState> {
    let n = transform.dim();
    if state.num_modes() != n {
        return Err(Error::ModeCountMismatch {
            expected: n,
            found: state.num_modes(),
        });
    }
    let m = transform.matrix();
    let zero = Complex::new(0.0, 0.0);
    let mut out = FockState::zero(n);
    for (occ, &amp) in state.terms() {
        if amp == zero {
            continue;
        }
        let mut poly: BTreeMap<Vec<u32>, Complex> = BTreeMap::new();
        poly.insert(vec![0; n], amp / occ.factorial_product().sqrt());
        for (k, &nk) in occ.counts().iter().enumerate() {
            for _ in 0..nk {
                let mut next: BTreeMap<Vec<u32>, Complex> = BTreeMap::new();
                for (mono, &c) in &poly {
                    for l in 0..n {
                        let lk = m[(l, k)];
                        if lk == zero {
                            continue;
                        }
                        let mut key = mono.clone();
                        key[l] += 1;
                        *next.entry(key).or_insert(zero) += c * lk;
                    }
                }
                poly = next;
            }
        }
        for (mono, c) in poly {
            let norm: f64 = mono.iter().map(|&x| factorial(x)).product();
            out.accumulate(OccupationVector::new(mono), c * norm.sqrt());
        }
    }
    Ok(out)
}

/// Evolves through a list of elements in order.
pub fn evolve_elements(state: &FockState, elements: &[ElementSpec]) -> Result<FockState> {
    evolve(state, &network_transform(elements, state.num_modes())?)
}

/// Permanent by direct summation over permutations.
pub fn permanent(m: &CMatrix) -> Complex {
    fn rec(m: &CMatrix, row: usize, used: &mut [bool]) -> Complex {
        let n = m.dim();
        if row == n {
            return Complex::new(1.0, 0.0);
        }
        let mut acc = Complex::new(0.0, 0.0);
        for col in 0..n {
            if !used[col] {
                used[col] = true;
                acc += m[(row, col)] * rec(m, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.dim()])
}

/// Permanent by Ryser's inclusion-exclusion formula.
pub fn permanent_ryser(m: &CMatrix) -> Complex {
    let n = m.dim();
    if n == 0 {
        return Complex::new(1.0, 0.0);
    }
    let mut total = Complex::new(0.0, 0.0);
    for subset in 1u64..(1 << n) {
        let mut prod = Complex::new(1.0, 0.0);
        for i in 0..n {
            let row_sum: Complex = (0..n)
                .filter(|j| subset & (1 << j) != 0)
                .map(|j| m[(i, j)])
                .sum();
            prod *= row_sum;
        }
        let sign = if (n - subset.count_ones() as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += prod * sign;
    }
    total
}

/// `⟨output| U |input⟩` computed as `per(Λ_sub) / √(∏n!∏m!)`, where `Λ_sub` repeats
/// column `j` `n_j` times and row `i` `m_i` times.
pub fn amplitude_permanent_oracle(
    input: &OccupationVector,
    output: &OccupationVector,
    transform: &ModeTransform,
) -> Result<Complex> {
    let n = transform.dim();
    for occ in [input, output] {
        if occ.num_modes() != n {
            return Err(Error::ModeCountMismatch {
                expected: n,
                found: occ.num_modes(),
            });
        }
    }
    if input.total() != output.total() {
        return Ok(Complex::new(0.0, 0.0));
    }
    let expand = |occ: &OccupationVector| -> Vec<usize> {
        occ.counts()
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
            .collect()
    };
    let cols = expand(input);
    let rows = expand(output);
    let mut sub = CMatrix::zeros(rows.len());
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            sub[(a, b)] = transform.entry(r, c);
        }
    }
    let denom = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent(&sub) / denom)
}
