//! Extrusion contraction I_v and its bilinear polarisation.
//!
//! With u = Pv and the cell vorticity reconstruction Q, the velocity-weighted
//! incidence acts as Ũ_v α = 2·Pᵀ[|K_i| (Qα)_i × u_i]. Then Ũ_vᵀ w =
//! 2·Qᵀ[|K_i| u_i × (Pw)_i], which vanishes identically for w = v.

use super::Dec;
use crate::geom::{self, V3};
use crate::sparse::{self, Csr};

/// Per-call scratch: reconstructed velocities reused across evaluations.
pub struct Contraction<'a> {
    pub dec: &'a Dec,
    pub u: Vec<V3>,
}

impl<'a> Contraction<'a> {
    pub fn new(dec: &'a Dec, v: &[f64]) -> Self {
        Contraction { dec, u: dec.rec.apply(v) }
    }

    /// Ũ_v α.
    pub fn utilde(&self, alpha: &[f64]) -> Vec<f64> {
        let d = self.dec;
        let w = d.rec.vorticity(alpha);
        let x: Vec<V3> = (0..d.mesh.n_cells)
            .map(|i| geom::scale(geom::cross(w[i], self.u[i]), 2.0 * d.mesh.cell_volume[i]))
            .collect();
        d.rec.apply_t(&x)
    }

    /// Ũ_vᵀ w.
    pub fn utilde_t(&self, w: &[f64]) -> Vec<f64> {
        let d = self.dec;
        let pw = d.rec.apply(w);
        let x: Vec<V3> = (0..d.mesh.n_cells)
            .map(|i| geom::scale(geom::cross(self.u[i], pw[i]), 2.0 * d.mesh.cell_volume[i]))
            .collect();
        d.rec.vorticity_t(&x)
    }
}

/// Ũ_aᵀ v for a second cochain a.
pub fn utilde_t_apply(dec: &Dec, a: &[f64], v: &[f64]) -> Vec<f64> {
    Contraction::new(dec, a).utilde_t(v)
}

/// Lamb term I_v(CURL v) = ½M1⁻¹(Ũ_v CURL v − CURLᵀ Ũ_vᵀ v).
pub fn lamb(dec: &Dec, v: &[f64]) -> Vec<f64> {
    lamb_bilinear(dec, v, v)
}

/// K_v(a) = ½M1⁻¹(Ũ_v CURL a − CURLᵀ Ũ_aᵀ v).
pub fn lamb_bilinear(dec: &Dec, v: &[f64], a: &[f64]) -> Vec<f64> {
    let cv = Contraction::new(dec, v);
    let mut r = cv.utilde(&dec.curl(a));
    // u × u vanishes exactly, so the second term drops on the diagonal.
    if v != a {
        let t = dec.curl_t(&utilde_t_apply(dec, a, v));
        for (x, y) in r.iter_mut().zip(&t) {
            *x -= y;
        }
    }
    for (x, m) in r.iter_mut().zip(&dec.stars.m1) {
        *x *= 0.5 / m;
    }
    r
}

/// Dense-assembled Ũ_v (faces x dual faces), column by column. Test oracle
/// and small-mesh diagnostics only.
pub fn contraction_matrix(dec: &Dec, v: &[f64]) -> Csr {
    let c = Contraction::new(dec, v);
    let nd = dec.mesh.n_dualfaces;
    let mut t = Vec::new();
    let mut e = vec![0.0; nd];
    for k in 0..nd {
        e[k] = 1.0;
        for (j, x) in c.utilde(&e).into_iter().enumerate() {
            if x != 0.0 {
                t.push((j, k, x));
            }
        }
        e[k] = 0.0;
    }
    sparse::from_triplets(dec.mesh.n_faces, nd, &t)
}
