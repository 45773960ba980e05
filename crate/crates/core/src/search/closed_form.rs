//! Hand-expanded trigonometric amplitudes for the three-mode family, used both as
//! fast evaluators in the scans and as an independent check on the simulator.
//!
//! The printed forms below write the case-1 and case-3 outcomes with the opposite
//! overall sign to the simulator; [`PRINTED_SIGN`] records the factor.

use crate::error::{Error, Result};

/// Factor taking a printed outcome to the simulated amplitude, indexed by `case - 1`.
pub const PRINTED_SIGN: [f64; 3] = [-1.0, 1.0, -1.0];

/// Photons left in the signal mode for an input of `k` photons.
pub fn surviving_photons(case: u8, k: u32) -> Result<u32> {
    match case {
        1 => Ok(k + 1),
        2 | 3 => Ok(k),
        _ => Err(Error::InvalidCase(case)),
    }
}

/// Printed outcome for `k ∈ {0,1,2}` signal photons and the given case
/// (1: no ancilla clicks, 2: one photon in port 2, 3: one photon in port 3).
pub fn printed_outcome(case: u8, k: u32, t: [f64; 3]) -> Result<f64> {
    let (s1, c1) = t[0].sin_cos();
    let (s2, c2) = t[1].sin_cos();
    let (s3, c3) = t[2].sin_cos();
    let v = match (case, k) {
        (1, 0) => -c1 * s2,
        (1, 1) => 2f64.sqrt() * c1 * c2 * s2,
        (1, 2) => -(3f64.sqrt()) * c1 * c2 * c2 * s2,
        (2, 0) => s1 * s3 + c1 * c2 * c3,
        (2, 1) => c1 * s2 * s2 * c3 - s1 * c2 * s3 - c1 * c2 * c2 * c3,
        (2, 2) => s1 * c2 * c2 * s3 + c1 * c2.powi(3) * c3 - 2.0 * c1 * c2 * s2 * s2 * c3,
        (3, 0) => s1 * c3 - c1 * c2 * s3,
        (3, 1) => c1 * c2 * c2 * s3 - s1 * c2 * c3 - c1 * s2 * s2 * s3,
        (3, 2) => s1 * c2 * c2 * c3 - c1 * c2.powi(3) * s3 + 2.0 * c1 * c2 * s2 * s2 * s3,
        (1..=3, _) => {
            return Err(Error::InvalidParameter(format!(
                "photon count {k} outside 0..=2"
            )))
        }
        _ => return Err(Error::InvalidCase(case)),
    };
    Ok(v)
}

/// Simulator-convention amplitude: `PRINTED_SIGN · printed_outcome`.
pub fn outcome(case: u8, k: u32, t: [f64; 3]) -> Result<f64> {
    Ok(PRINTED_SIGN[usize::from(case - 1)] * printed_outcome(case, k, t)?)
}

/// Amplitude factor picked up by the surviving `k`-photon term when one balanced-by-`x`
/// splitter mixes the signal with a single ancilla mode and one photon is detected there.
///
/// Case 1 carries `k + 1` photons and a vacuum ancilla; case 3 carries `k` photons and a
/// one-photon ancilla.
pub fn single_bs_factor(case: u8, k: u32, x: f64) -> Result<f64> {
    let (s, c) = x.sin_cos();
    match case {
        1 => {
            let n = f64::from(k + 1);
            Ok(n.sqrt() * c.powi(k as i32) * s)
        }
        3 => match k {
            0 => Ok(-c),
            1 => Ok(s * s - c * c),
            2 => Ok(2.0 * s * s * c - c.powi(3)),
            _ => Err(Error::InvalidParameter(format!(
                "photon count {k} outside 0..=2"
            ))),
        },
        2 => Err(Error::UnsupportedPattern(
            "case 2 needs no correction".into(),
        )),
        _ => Err(Error::InvalidCase(case)),
    }
}

/// Factor for adding one photon with splitter `x` (ancilla photon, no click) and removing
/// one with splitter `y` (vacuum ancilla, one click): `(k+1) sin x cosᵏx sin y cosᵏy`.
pub fn two_bs_factor(k: u32, x: f64, y: f64) -> f64 {
    let (sx, cx) = x.sin_cos();
    let (sy, cy) = y.sin_cos();
    f64::from(k + 1) * sx * cx.powi(k as i32) * sy * cy.powi(k as i32)
}

/// Operator coefficient of `a₁†^{n−1} a₂†²` in `dⁿ e` for `n = k + 1`, where `d`, `e` are
/// the first two rows of the family. Case-1 state, two photons detected in port 2.
pub fn pair_in_port2_coefficient(k: u32, t: [f64; 3]) -> Result<f64> {
    let (s1, c1) = t[0].sin_cos();
    let (s2, c2) = t[1].sin_cos();
    let (s3, c3) = t[2].sin_cos();
    let d1 = -c2;
    let d2 = s2 * c3;
    let e1 = c1 * s2;
    let e2 = s1 * s3 + c1 * c2 * c3;
    match k {
        0 => Ok(d2 * e2),
        1 => Ok(2.0 * d1 * d2 * e2 + d2 * d2 * e1),
        2 => Ok(3.0 * d1 * d1 * d2 * e2 + 3.0 * d1 * d2 * d2 * e1),
        _ => Err(Error::InvalidParameter(format!(
            "photon count {k} outside 0..=2"
        ))),
    }
}

/// Physical amplitude `⟨k, 2, 0| U |k+1, 1, 0⟩` from [`pair_in_port2_coefficient`].
pub fn pair_in_port2_amplitude(k: u32, t: [f64; 3]) -> Result<f64> {
    let n = f64::from(k + 1);
    let fact = |m: f64| (1..=m as u32).map(f64::from).product::<f64>();
    Ok(pair_in_port2_coefficient(k, t)? * (fact(n - 1.0) * 2.0 / fact(n)).sqrt())
}
