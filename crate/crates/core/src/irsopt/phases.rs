//! Phase extraction from a lifted matrix, binary quantisation and random
//! baselines.

use std::f64::consts::PI;

use rand::Rng;

use super::LiftedMatrix;
use crate::model::PhaseProfile;
use crate::{CVector, C64};

const ZERO_ENTRY: f64 = 1e-300;
const QUANTIZE_TIE: f64 = 1e-12;

/// First `M` entries of the last column of `V`, projected to unit modulus.
/// Zero entries become `1`.
pub fn extract_phases(v: &LiftedMatrix) -> PhaseProfile {
    let m = v.m_elements();
    let col = v.as_matrix().column(m);
    let phases = CVector::from_fn(m, |k, _| {
        let z = col[k];
        let r = z.norm();
        if r > ZERO_ENTRY {
            z / r
        } else {
            C64::new(1.0, 0.0)
        }
    });
    PhaseProfile::new(phases).expect("entries normalised to unit modulus")
}

/// Rounds each phase to the nearer of `0` and `π`; `π/2` and `3π/2` go to `0`.
pub fn quantize_phases(v: &PhaseProfile) -> PhaseProfile {
    let angles: Vec<f64> = v
        .as_vector()
        .iter()
        .map(|z| if z.re < -QUANTIZE_TIE { PI } else { 0.0 })
        .collect();
    let out = CVector::from_iterator(
        angles.len(),
        angles.iter().map(|&t| C64::new(if t == 0.0 { 1.0 } else { -1.0 }, 0.0)),
    );
    PhaseProfile::new(out).expect("±1 entries")
}

/// `θ_m` i.i.d. uniform on `[0, 2π)`.
pub fn random_phases<R: Rng + ?Sized>(m: usize, rng: &mut R) -> PhaseProfile {
    let theta: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    PhaseProfile::from_angles(&theta)
}
