//! Logical qubits on optical modes, reference qubit gates and the single-qubit
//! Z-Y decomposition into splitters and phase shifters.
//!
//! Logical basis indices treat qubit 0 as the most significant bit, so for two qubits
//! index 1 is `|01⟩_L`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{Complex, FockState, OccupationVector};
use crate::linalg::CMatrix;
use crate::multiport::{evolve_elements, ElementSpec};
use crate::TOLERANCE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// One mode per qubit; `|1⟩_L` is a single photon.
    SingleRail,
    /// Qubit `q` on modes `(2q, 2q+1)`, `|0⟩_L = |10⟩`.
    DualRail,
    /// One photon in `2^n` modes; the occupied mode is the logical index.
    OneHot,
    /// Dual rail with H on the first mode of each pair and V on the second.
    Polarization,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::SingleRail => "single_rail",
            Scheme::DualRail => "dual_rail",
            Scheme::OneHot => "one_hot",
            Scheme::Polarization => "polarization",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "single_rail" | "singlerail" => Ok(Scheme::SingleRail),
            "dual_rail" | "dualrail" => Ok(Scheme::DualRail),
            "one_hot" | "onehot" => Ok(Scheme::OneHot),
            "polarization" => Ok(Scheme::Polarization),
            _ => Err(Error::EncodingMismatch(format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Encoding {
    pub scheme: Scheme,
    pub num_qubits: usize,
}

/// Result of projecting a Fock state onto an encoding's logical subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    /// Renormalized logical amplitudes.
    pub logical: Vec<Complex>,
    /// Probability mass outside the logical subspace.
    pub leakage: f64,
}

impl Encoding {
    pub fn new(scheme: Scheme, num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > 16 {
            return Err(Error::EncodingMismatch(format!(
                "unsupported qubit count {num_qubits}"
            )));
        }
        Ok(Self { scheme, num_qubits })
    }

    pub fn dual_rail(num_qubits: usize) -> Self {
        Self::new(Scheme::DualRail, num_qubits).expect("valid qubit count")
    }

    pub fn logical_dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn mode_budget(&self) -> usize {
        match self.scheme {
            Scheme::SingleRail => self.num_qubits,
            Scheme::DualRail | Scheme::Polarization => 2 * self.num_qubits,
            Scheme::OneHot => self.logical_dim(),
        }
    }

    fn bit(&self, index: usize, qubit: usize) -> bool {
        (index >> (self.num_qubits - 1 - qubit)) & 1 == 1
    }

    /// Occupation vector of logical basis state `index`.
    pub fn basis_label(&self, index: usize) -> OccupationVector {
        let n = self.num_qubits;
        let counts = match self.scheme {
            Scheme::SingleRail => (0..n).map(|q| u32::from(self.bit(index, q))).collect(),
            Scheme::DualRail | Scheme::Polarization => (0..n)
                .flat_map(|q| if self.bit(index, q) { [0, 1] } else { [1, 0] })
                .collect(),
            Scheme::OneHot => {
                let mut v = vec![0; self.logical_dim()];
                v[index] = 1;
                v
            }
        };
        OccupationVector::new(counts)
    }

    /// Encodes a normalized logical amplitude vector.
    pub fn encode(&self, logical: &[Complex]) -> Result<FockState> {
        if logical.len() != self.logical_dim() {
            return Err(Error::EncodingMismatch(format!(
                "expected {} amplitudes for {} qubits, got {}",
                self.logical_dim(),
                self.num_qubits,
                logical.len()
            )));
        }
        let norm: f64 = logical.iter().map(|z| z.norm_sqr()).sum();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        FockState::from_terms(
            self.mode_budget(),
            logical
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() > 0.0)
                .map(|(i, &z)| (self.basis_label(i), z)),
        )
    }

    /// Encodes a bitstring such as `"01"`, qubit 0 first.
    pub fn encode_bits(&self, bits: &str) -> Result<FockState> {
        if bits.len() != self.num_qubits || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::EncodingMismatch(format!(
                "`{bits}` is not a {}-bit string",
                self.num_qubits
            )));
        }
        let index = usize::from_str_radix(bits, 2).expect("binary digits");
        Ok(FockState::basis(self.basis_label(index)))
    }

    /// Projects onto the logical subspace.
    pub fn decode(&self, state: &FockState) -> Result<Decoded> {
        if state.num_modes() != self.mode_budget() {
            return Err(Error::ModeCountMismatch {
                expected: self.mode_budget(),
                found: state.num_modes(),
            });
        }
        let logical: Vec<Complex> = (0..self.logical_dim())
            .map(|i| state.amplitude(&self.basis_label(i)))
            .collect();
        let total = state.norm_sqr();
        let kept: f64 = logical.iter().map(|z| z.norm_sqr()).sum();
        if kept <= 0.0 || total <= 0.0 {
            return Err(Error::NoLogicalSupport);
        }
        let scale = 1.0 / kept.sqrt();
        Ok(Decoded {
            logical: logical.into_iter().map(|z| z * scale).collect(),
            leakage: ((total - kept) / total).max(0.0),
        })
    }
}

/// A unitary on `n` qubits in the logical basis.
#[derive(Clone, PartialEq, Debug)]
pub struct QubitUnitary(CMatrix);

impl QubitUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: dim.next_power_of_two(),
            });
        }
        let deviation = matrix.unitarity_error();
        if !deviation.is_finite() {
            return Err(Error::NonFinite);
        }
        if deviation > TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(matrix))
    }

    fn from_entries(rows: [[Complex; 2]; 2]) -> Self {
        Self(CMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("square"))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.0[(row, col)]
    }

    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        Ok(self.0.apply(v))
    }

    /// Applies a single-qubit unitary to `qubit` of an `num_qubits`-qubit vector.
    pub fn apply_on(&self, qubit: usize, num_qubits: usize, v: &[Complex]) -> Result<Vec<Complex>> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: 2,
                right: self.dim(),
            });
        }
        if qubit >= num_qubits {
            return Err(Error::ModeOutOfRange {
                mode: qubit,
                num_modes: num_qubits,
            });
        }
        if v.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                left: 1 << num_qubits,
                right: v.len(),
            });
        }
        let mask = 1 << (num_qubits - 1 - qubit);
        let mut out = v.to_vec();
        for i in 0..v.len() {
            if i & mask == 0 {
                let (a, b) = (v[i], v[i | mask]);
                out[i] = self.entry(0, 0) * a + self.entry(0, 1) * b;
                out[i | mask] = self.entry(1, 0) * a + self.entry(1, 1) * b;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(Self(self.0.try_mul(&rhs.0)?))
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

/// The named reference gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QubitGate {
    X,
    Y,
    Z,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cnot,
}

impl QubitGate {
    pub fn unitary(&self) -> QubitUnitary {
        let o = Complex::new(0.0, 0.0);
        let l = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        match *self {
            QubitGate::X => QubitUnitary::from_entries([[o, l], [l, o]]),
            QubitGate::Y => QubitUnitary::from_entries([[o, -i], [i, o]]),
            QubitGate::Z => QubitUnitary::from_entries([[l, o], [o, -l]]),
            QubitGate::Rx(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                QubitUnitary::from_entries([[l * c, -i * s], [-i * s, l * c]])
            }
            QubitGate::Ry(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                QubitUnitary::from_entries([[l * c, -l * s], [l * s, l * c]])
            }
            QubitGate::Rz(t) => QubitUnitary::from_entries([
                [Complex::from_polar(1.0, -t / 2.0), o],
                [o, Complex::from_polar(1.0, t / 2.0)],
            ]),
            QubitGate::Cnot => {
                let mut m = CMatrix::zeros(4);
                m[(0, 0)] = l;
                m[(1, 1)] = l;
                m[(2, 3)] = l;
                m[(3, 2)] = l;
                QubitUnitary(m)
            }
        }
    }
}

impl FromStr for QubitGate {
    type Err = Error;

    /// Accepts `X`, `Y`, `Z`, `CNOT` and `Rx(θ)`, `Ry(θ)`, `Rz(θ)` with θ in radians.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let unknown = || Error::UnknownGate(s.to_string());
        match t.to_ascii_uppercase().as_str() {
            "X" => return Ok(QubitGate::X),
            "Y" => return Ok(QubitGate::Y),
            "Z" => return Ok(QubitGate::Z),
            "CNOT" => return Ok(QubitGate::Cnot),
            _ => {}
        }
        let open = t.find('(').ok_or_else(unknown)?;
        if !t.ends_with(')') {
            return Err(unknown());
        }
        let angle: f64 = t[open + 1..t.len() - 1]
            .trim()
            .parse()
            .map_err(|_| unknown())?;
        if !angle.is_finite() {
            return Err(unknown());
        }
        match t[..open].trim().to_ascii_lowercase().as_str() {
            "rx" => Ok(QubitGate::Rx(angle)),
            "ry" => Ok(QubitGate::Ry(angle)),
            "rz" => Ok(QubitGate::Rz(angle)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for QubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitGate::X => write!(f, "X"),
            QubitGate::Y => write!(f, "Y"),
            QubitGate::Z => write!(f, "Z"),
            QubitGate::Rx(t) => write!(f, "Rx({t})"),
            QubitGate::Ry(t) => write!(f, "Ry({t})"),
            QubitGate::Rz(t) => write!(f, "Rz({t})"),
            QubitGate::Cnot => write!(f, "CNOT"),
        }
    }
}

/// `U = e^{iα} R_z(β) R_y(γ) R_z(δ)` together with an optical realization.
#[derive(Clone, Debug, PartialEq)]
pub struct ZyDecomposition {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl ZyDecomposition {
    /// Rebuilds `e^{iα} R_z(β) R_y(γ) R_z(δ)`.
    pub fn reconstruct(&self) -> QubitUnitary {
        let rz_b = QubitGate::Rz(self.beta).unitary();
        let ry = QubitGate::Ry(self.gamma).unitary();
        let rz_d = QubitGate::Rz(self.delta).unitary();
        rz_b.mul(&ry)
            .and_then(|m| m.mul(&rz_d))
            .expect("2x2 products")
            .scale(Complex::from_polar(1.0, self.alpha))
    }

    /// Phase shifters and one splitter on modes `(2q, 2q+1)`, in circuit order.
    /// The product equals the decomposed unitary up to a global phase.
    pub fn elements(&self, qubit: usize) -> Vec<ElementSpec> {
        let (m0, m1) = (2 * qubit, 2 * qubit + 1);
        let eta = (self.gamma / 2.0).cos().powi(2).clamp(0.0, 1.0);
        vec![
            ElementSpec::phase_shifter(self.delta, m1),
            ElementSpec::phase_shifter(PI, m1),
            ElementSpec::beam_splitter(eta, m0, m1).expect("eta within [0, 1]"),
            ElementSpec::phase_shifter(self.beta, m1),
        ]
    }
}

/// Extracts Z-Y Euler angles from a 2×2 unitary.
pub fn zy_decompose(u: &QubitUnitary) -> Result<ZyDecomposition> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: u.dim(),
        });
    }
    let deviation = u.matrix().unitarity_error();
    if deviation > TOLERANCE {
        return Err(Error::NotUnitary { deviation });
    }
    let alpha = u.matrix().determinant().arg() / 2.0;
    let v = u.scale(Complex::from_polar(1.0, -alpha));
    let (v00, v10, v11) = (v.entry(0, 0), v.entry(1, 0), v.entry(1, 1));
    let gamma = 2.0 * v10.norm().atan2(v00.norm());
    const TIE: f64 = 1e-12;
    let (beta, delta) = if v10.norm() < TIE {
        (2.0 * v11.arg(), 0.0)
    } else if v00.norm() < TIE {
        (2.0 * v10.arg(), 0.0)
    } else {
        (v11.arg() + v10.arg(), v11.arg() - v10.arg())
    };
    Ok(ZyDecomposition {
        alpha,
        beta,
        gamma,
        delta,
    })
}

/// Applies a single-qubit unitary to dual-rail qubit `qubit` with optical elements.
pub fn dual_rail_apply(u: &QubitUnitary, qubit: usize, state: &FockState) -> Result<FockState> {
    if 2 * qubit + 1 >= state.num_modes() {
        return Err(Error::ModeOutOfRange {
            mode: 2 * qubit + 1,
            num_modes: state.num_modes(),
        });
    }
    let d = zy_decompose(u)?;
    evolve_elements(state, &d.elements(qubit))
}

/// `|⟨a|b⟩|²` for normalized logical vectors.
pub fn logical_fidelity(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex>()
        .norm_sqr()
}
