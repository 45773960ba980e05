//! Fock basis labels and sparse multimode states.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::PRUNE_THRESHOLD;

pub type Complex = Complex64;

const ZERO: Complex = Complex::new(0.0, 0.0);

/// Photon count per mode. Index 0 is the leftmost slot of the printed ket.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(num_modes: usize) -> Self {
        Self(vec![0; num_modes])
    }

    pub fn num_modes(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Product of `n_k!` over all modes.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    pub(crate) fn with(&self, mode: usize, count: u32) -> Self {
        let mut v = self.0.clone();
        v[mode] = count;
        Self(v)
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// Drops the given modes, keeping the rest in order.
    pub fn without_modes(&self, modes: &[usize]) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !modes.contains(i))
                .map(|(_, &n)| n)
                .collect(),
        )
    }

    /// Every occupation vector over `num_modes` modes with exactly `photons` photons,
    /// in lexicographic order.
    pub fn all_with_total(num_modes: usize, photons: u32) -> Vec<Self> {
        fn rec(prefix: &mut Vec<u32>, left: usize, photons: u32, out: &mut Vec<OccupationVector>) {
            if left == 1 {
                prefix.push(photons);
                out.push(OccupationVector(prefix.clone()));
                prefix.pop();
                return;
            }
            for n in (0..=photons).rev() {
                prefix.push(n);
                rec(prefix, left - 1, photons - n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if num_modes == 0 {
            if photons == 0 {
                out.push(Self(Vec::new()));
            }
            return out;
        }
        rec(
            &mut Vec::with_capacity(num_modes),
            num_modes,
            photons,
            &mut out,
        );
        out.sort();
        out
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl From<&[u32]> for OccupationVector {
    fn from(v: &[u32]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn check_finite(z: Complex) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// A pure state as a sparse map from occupation vectors to amplitudes.
#[derive(Clone, PartialEq)]
pub struct FockState {
    num_modes: usize,
    amplitudes: BTreeMap<OccupationVector, Complex>,
}

impl FockState {
    /// The zero vector on `num_modes` modes.
    pub fn zero(num_modes: usize) -> Self {
        Self {
            num_modes,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn vacuum(num_modes: usize) -> Self {
        Self::basis(OccupationVector::vacuum(num_modes))
    }

    pub fn basis(occupation: impl Into<OccupationVector>) -> Self {
        let occupation = occupation.into();
        let mut amplitudes = BTreeMap::new();
        let num_modes = occupation.num_modes();
        amplitudes.insert(occupation, Complex::new(1.0, 0.0));
        Self {
            num_modes,
            amplitudes,
        }
    }

    /// Builds a state from `(occupation, amplitude)` pairs; repeated labels are summed.
    pub fn from_terms<I, O>(num_modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, Complex)>,
        O: Into<OccupationVector>,
    {
        let mut state = Self::zero(num_modes);
        for (occ, amp) in terms {
            state.add_term(occ.into(), amp)?;
        }
        Ok(state)
    }

    pub fn add_term(&mut self, occupation: OccupationVector, amplitude: Complex) -> Result<()> {
        check_finite(amplitude)?;
        if occupation.num_modes() != self.num_modes {
            return Err(Error::ModeCountMismatch {
                expected: self.num_modes,
                found: occupation.num_modes(),
            });
        }
        *self.amplitudes.entry(occupation).or_insert(ZERO) += amplitude;
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, occupation: OccupationVector, amplitude: Complex) {
        *self.amplitudes.entry(occupation).or_insert(ZERO) += amplitude;
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn amplitude(&self, occupation: &OccupationVector) -> Complex {
        self.amplitudes.get(occupation).copied().unwrap_or(ZERO)
    }

    pub fn amplitude_of(&self, counts: &[u32]) -> Complex {
        self.amplitude(&OccupationVector::from(counts))
    }

    /// Terms in lexicographic order of their occupation vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &Complex)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.num_modes {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                mode,
                num_modes: self.num_modes,
            })
        }
    }

    fn check_same_modes(&self, other: &Self) -> Result<()> {
        if self.num_modes == other.num_modes {
            Ok(())
        } else {
            Err(Error::ModeCountMismatch {
                expected: self.num_modes,
                found: other.num_modes,
            })
        }
    }

    /// Applies `a†` on `mode`: `|n⟩ ↦ √(n+1)|n+1⟩`.
    pub fn create(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = Self::zero(self.num_modes);
        for (occ, &amp) in &self.amplitudes {
            let n = occ.get(mode);
            out.accumulate(occ.with(mode, n + 1), amp * f64::from(n + 1).sqrt());
        }
        Ok(out)
    }

    /// Applies `a` on `mode`: `|n⟩ ↦ √n|n−1⟩`, and `a|0⟩ = 0`.
    pub fn annihilate(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = Self::zero(self.num_modes);
        for (occ, &amp) in &self.amplitudes {
            let n = occ.get(mode);
            if n > 0 {
                out.accumulate(occ.with(mode, n - 1), amp * f64::from(n).sqrt());
            }
        }
        Ok(out)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex> {
        self.check_same_modes(other)?;
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = ZERO;
        for (occ, &a) in &small.amplitudes {
            if let Some(&b) = large.amplitudes.get(occ) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns the unit-norm state and the norm it had before.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok((self.scale(Complex::new(1.0 / norm, 0.0)), norm))
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            num_modes: self.num_modes,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(k, &v)| (k.clone(), v * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_modes(other)?;
        let mut out = self.clone();
        for (occ, &amp) in &other.amplitudes {
            out.accumulate(occ.clone(), amp);
        }
        Ok(out)
    }

    /// Drops every amplitude with modulus below `threshold`.
    pub fn pruned(&self, threshold: f64) -> Self {
        Self {
            num_modes: self.num_modes,
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|(_, v)| v.norm() >= threshold)
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
        }
    }

    /// Drops amplitudes below [`PRUNE_THRESHOLD`].
    pub fn pruned_default(&self) -> Self {
        self.pruned(PRUNE_THRESHOLD)
    }

    /// Tensor product with `self` on the leading modes.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.num_modes + other.num_modes);
        for (a, &x) in &self.amplitudes {
            for (b, &y) in &other.amplitudes {
                out.accumulate(a.concat(b), x * y);
            }
        }
        out
    }

    /// Largest photon count that appears with nonzero amplitude.
    pub fn max_photons(&self) -> u32 {
        self.amplitudes.keys().map(|o| o.total()).max().unwrap_or(0)
    }

    /// Entrywise comparison within `tol`, treating missing labels as zero.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.num_modes != other.num_modes {
            return false;
        }
        self.amplitudes
            .keys()
            .chain(other.amplitudes.keys())
            .all(|k| (self.amplitude(k) - other.amplitude(k)).norm() <= tol)
    }

    /// `|⟨self|other⟩|²` for normalized arguments.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amplitudes.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .amplitudes
            .iter()
            .map(|(k, v)| format!("({:.6}{:+.6}i){}", v.re, v.im, k))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
