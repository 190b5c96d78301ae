//! Velocity dependence of the face density that would cancel R_E.

use super::energy::kinetic_density;
use crate::dec_ops::Dec;
use crate::dynamics::{SchemeConfig, State};
use serde::{Deserialize, Serialize};

/// Faces with |Δψ| below this are excluded.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// Required ρ̄_j for each velocity; None on degenerate faces.
    pub required: [Vec<Option<f64>>; 2],
    pub degenerate_faces: Vec<usize>,
    /// Fraction of non-degenerate faces whose required values differ by
    /// more than `threshold` relative.
    pub differing_fraction: f64,
    pub threshold: f64,
}

/// ρ̄_j = 1 + (e^kin_a − e^kin_b)/(ψ_a − ψ_b) makes the face term of R_E vanish.
pub fn required_face_density(dec: &Dec, rho: &[f64], v: &[f64], cfg: &SchemeConfig) -> Vec<Option<f64>> {
    let c = &dec.mesh;
    let ek = kinetic_density(dec, v);
    let psi: Vec<f64> = (0..c.n_cells)
        .map(|i| cfg.eos.enthalpy_unchecked(rho[i] / c.cell_volume[i]) + cfg.geopotential[i])
        .collect();
    (0..c.n_faces)
        .map(|j| {
            let [a, b] = c.face_cells[j];
            let dpsi = psi[a] - psi[b];
            (dpsi.abs() >= DEGENERATE_TOL).then(|| 1.0 + (ek[a] - ek[b]) / dpsi)
        })
        .collect()
}

pub fn nogo_witness(dec: &Dec, rho: &[f64], v1: &[f64], v2: &[f64], cfg: &SchemeConfig) -> WitnessReport {
    let threshold = 1e-6;
    let r1 = required_face_density(dec, rho, v1, cfg);
    let r2 = required_face_density(dec, rho, v2, cfg);
    let mut degenerate = Vec::new();
    let mut differ = 0usize;
    let mut total = 0usize;
    for j in 0..r1.len() {
        match (r1[j], r2[j]) {
            (Some(a), Some(b)) => {
                total += 1;
                if (a - b).abs() > threshold * a.abs().max(b.abs()) {
                    differ += 1;
                }
            }
            _ => degenerate.push(j),
        }
    }
    let differing_fraction = if total == 0 { 0.0 } else { differ as f64 / total as f64 };
    WitnessReport { required: [r1, r2], degenerate_faces: degenerate, differing_fraction, threshold }
}

/// Convenience for the witness state: ρ from `state`, v and 2v.
pub fn nogo_witness_doubling(dec: &Dec, state: &State, cfg: &SchemeConfig) -> WitnessReport {
    let v2: Vec<f64> = state.v.iter().map(|x| 2.0 * x).collect();
    nogo_witness(dec, &state.rho, &state.v, &v2, cfg)
}
