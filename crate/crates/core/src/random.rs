//! Random unitaries and states for property tests and benches.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::fock::{Complex, FockState, OccupationVector};
use crate::linalg::CMatrix;
use crate::multiport::ModeTransform;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im)
}

/// Haar-random unitary from Gram-Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ModeTransform {
    let mut cols: Vec<Vec<Complex>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex> = (0..dim).map(|_| gaussian(rng)).collect();
        for q in &cols {
            let proj: Complex = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut m = CMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    ModeTransform::from_matrix(m).expect("Gram-Schmidt output is unitary")
}

/// Random normalized amplitude vector of length `len`.
pub fn random_amplitudes<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex> {
    loop {
        let v: Vec<Complex> = (0..len).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random normalized superposition over the given basis labels.
pub fn random_state<R: Rng + ?Sized>(basis: &[OccupationVector], rng: &mut R) -> FockState {
    let num_modes = basis.first().map_or(0, |o| o.num_modes());
    let amps = random_amplitudes(basis.len(), rng);
    FockState::from_terms(num_modes, basis.iter().cloned().zip(amps)).expect("finite amplitudes")
}
