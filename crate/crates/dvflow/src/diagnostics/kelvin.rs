//! Circulation along a materially advected dual 1-chain.
//!
//! The chain moves by dγ/dt = ½CURLᵀŨ_vᵀM1⁻¹γ, the adjoint of the curl part
//! of the Lie derivative, so that vᵀγ̇ = lamb(v)ᵀγ. The gradient part pairs
//! to zero with cycles and is dropped.

use crate::dec_ops::{Contraction, Dec};
use crate::dynamics::{self, rk4_step, DynError, Integrator, SchemeConfig, State};
use crate::mesh::CellComplex;
use serde::{Deserialize, Serialize};

pub const CYCLE_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum KelvinError {
    #[error("chain is not a cycle: |boundary| = {0:e}")]
    NotACycle(f64),
    #[error(transparent)]
    Dyn(#[from] DynError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub gamma: Vec<f64>,
    pub is_cycle: bool,
}

impl ChainState {
    pub fn new(c: &CellComplex, gamma: Vec<f64>) -> Self {
        let is_cycle = boundary_norm(c, &gamma) <= CYCLE_TOL;
        ChainState { gamma, is_cycle }
    }
}

/// ‖GRADᵀγ‖_∞.
pub fn boundary_norm(c: &CellComplex, gamma: &[f64]) -> f64 {
    crate::dynamics::norm_inf(&c.divergence(gamma))
}

/// Dual edges crossed by the straight loop x_axis = offset (axis 0) or
/// y = offset (axis 1), oriented along the loop direction.
pub fn straight_loop(c: &CellComplex, axis: usize, offset: f64) -> ChainState {
    // Loop y = offset runs along +x and crosses faces whose segment spans
    // that height; orientation is sign(n·e_x).
    let (across, along) = if axis == 1 { (1, 0) } else { (0, 1) };
    let l = c.torus_extent[across];
    let gamma = (0..c.n_faces)
        .map(|j| {
            let crate::mesh::FaceGeom::Segment([p, q]) = c.face_geom[j] else {
                return 0.0;
            };
            let (lo, hi) = if p[across] < q[across] { (p[across], q[across]) } else { (q[across], p[across]) };
            let k = ((lo - offset) / l).ceil();
            let y = offset + k * l;
            if y > lo && y < hi {
                c.face_normal[j][along].signum()
            } else {
                0.0
            }
        })
        .collect();
    ChainState::new(c, gamma)
}

/// Boundary of a dual 2-chain, CURLᵀσ.
pub fn boundary_of(c: &CellComplex, sigma: &[f64]) -> ChainState {
    ChainState::new(c, c.curl_t(sigma))
}

pub fn chain_rate(dec: &Dec, v: &[f64], gamma: &[f64]) -> Vec<f64> {
    let w = Contraction::new(dec, v).utilde_t(&dec.m1_inv(gamma));
    dec.curl_t(&w).into_iter().map(|x| 0.5 * x).collect()
}

/// Instantaneous dΓ/dt = v̇ᵀγ + vᵀγ̇.
pub fn circulation_rate(dec: &Dec, state: &State, cfg: &SchemeConfig, gamma: &[f64]) -> Result<f64, DynError> {
    let r = dynamics::rhs(dec, state, cfg)?;
    let g = chain_rate(dec, &state.v, gamma);
    Ok(r.dv.iter().zip(gamma).map(|(a, b)| a * b).sum::<f64>() + state.v.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KelvinSample {
    pub t: f64,
    pub circulation: f64,
    pub boundary: f64,
}

/// Co-evolve (v, ρ, γ) with one integrator and record Γ = vᵀγ per step.
pub fn kelvin(
    dec: &Dec,
    state: &State,
    cfg: &SchemeConfig,
    chain0: &ChainState,
    dt: f64,
    steps: usize,
    method: Integrator,
) -> Result<(Vec<KelvinSample>, State, ChainState), KelvinError> {
    let c = &dec.mesh;
    if !chain0.is_cycle {
        return Err(KelvinError::NotACycle(boundary_norm(c, &chain0.gamma)));
    }
    let nf = c.n_faces;
    let nc = c.n_cells;
    let sample = |t: f64, y: &[f64]| KelvinSample {
        t,
        circulation: y[..nf].iter().zip(&y[nf + nc..]).map(|(a, b)| a * b).sum(),
        boundary: boundary_norm(c, &y[nf + nc..]),
    };
    let mut f = |t: f64, y: &[f64]| -> Result<Vec<f64>, DynError> {
        let s = State { v: y[..nf].to_vec(), rho: y[nf..nf + nc].to_vec(), t };
        if let Some(i) = s.admissible() {
            return Err(DynError::VacuumEvent { t, cell: i, mass: s.rho[i], snapshot: Box::new(s) });
        }
        let r = dynamics::rhs(dec, &s, cfg)?;
        let mut out = r.dv;
        out.extend(r.drho);
        out.extend(chain_rate(dec, &s.v, &y[nf + nc..]));
        Ok(out)
    };
    let mut y = state.v.clone();
    y.extend_from_slice(&state.rho);
    y.extend_from_slice(&chain0.gamma);
    let mut t = state.t;
    let mut out = vec![sample(t, &y)];
    let mut weights = dec.stars.m1.clone();
    weights.extend(c.cell_volume.iter().map(|k| 1.0 / k));
    weights.extend(dec.stars.m1.iter().map(|m| 1.0 / m));
    for _ in 0..steps {
        y = match method {
            Integrator::Rk4 => rk4_step(&mut f, t, &y, dt)?.0,
            Integrator::ImplicitMidpoint => dynamics::midpoint_step(&mut f, t, &y, dt, &weights)?.0,
        };
        t += dt;
        out.push(sample(t, &y));
    }
    let s = State { v: y[..nf].to_vec(), rho: y[nf..nf + nc].to_vec(), t };
    let chain = ChainState::new(c, y[nf + nc..].to_vec());
    Ok((out, s, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FluxKind, Scheme};
    use crate::geom;
    use crate::mesh::{build_dv_complex, lattice_points};
    use crate::thermo::EquationOfState;
    use std::f64::consts::PI;

    fn setup(scheme: Scheme) -> (Dec, SchemeConfig, State) {
        let dec = Dec::new(build_dv_complex(&lattice_points(8, 0.15, 1), [1.0, 1.0]).unwrap()).unwrap();
        let cfg = SchemeConfig::new(scheme, FluxKind::Centred, EquationOfState::new(1.0, 2.0, 0.0, None).unwrap(), &dec.mesh);
        let c = &dec.mesh;
        let v = (0..c.n_faces)
            .map(|j| {
                let x = c.dual_edge_midpoint(j);
                geom::dot([0.5 * (2.0 * PI * x[1]).sin(), 0.3 * (2.0 * PI * x[0]).sin(), 0.0], c.dual_edge[j])
            })
            .collect();
        let rv: Vec<f64> = c.circumcentre.iter().map(|x| 1.0 + 0.2 * (2.0 * PI * x[0]).cos()).collect();
        (dec.clone(), cfg, State::from_volumetric(&dec.mesh, v, &rv))
    }

    #[test]
    fn straight_loops_are_cycles() {
        let (dec, _, _) = setup(Scheme::Df);
        for axis in [0, 1] {
            let ch = straight_loop(&dec.mesh, axis, 0.3217);
            assert!(ch.is_cycle);
            assert!(ch.gamma.iter().filter(|x| **x != 0.0).count() >= 8);
        }
        let mut g = straight_loop(&dec.mesh, 1, 0.3217).gamma;
        let k = g.iter().position(|x| *x != 0.0).unwrap();
        g[k] = 0.0;
        assert!(!ChainState::new(&dec.mesh, g).is_cycle);
    }

    #[test]
    fn df_circulation_rate_vanishes() {
        let (dec, cfg, s) = setup(Scheme::Df);
        let ch = straight_loop(&dec.mesh, 1, 0.3217);
        let r = circulation_rate(&dec, &s, &cfg, &ch.gamma).unwrap();
        let scale = s.v.iter().zip(&ch.gamma).map(|(a, b)| (a * b).abs()).sum::<f64>();
        assert!(r.abs() < 1e-13 * scale.max(1.0), "{r}");
        // Contractible cycle: boundary of a single Voronoi cell.
        let mut sigma = vec![0.0; dec.mesh.n_dualfaces];
        sigma[5] = 1.0;
        let b = boundary_of(&dec.mesh, &sigma);
        assert!(b.is_cycle);
        assert!(circulation_rate(&dec, &s, &cfg, &b.gamma).unwrap().abs() < 1e-13);
    }

    #[test]
    fn midpoint_conserves_circulation_and_cycle() {
        let (dec, cfg, s) = setup(Scheme::Df);
        let ch = straight_loop(&dec.mesh, 1, 0.3217);
        let (samples, _, end) = kelvin(&dec, &s, &cfg, &ch, 0.01, 10, Integrator::ImplicitMidpoint).unwrap();
        let g0 = samples[0].circulation;
        for x in &samples {
            assert!((x.circulation - g0).abs() < 1e-10 * g0.abs().max(1.0));
            assert!(x.boundary < 1e-10);
        }
        assert!(end.is_cycle || boundary_norm(&dec.mesh, &end.gamma) < 1e-10);
    }

    #[test]
    fn not_a_cycle_is_rejected() {
        let (dec, cfg, s) = setup(Scheme::Df);
        let mut g = vec![0.0; dec.mesh.n_faces];
        g[0] = 1.0;
        let ch = ChainState::new(&dec.mesh, g);
        assert!(matches!(kelvin(&dec, &s, &cfg, &ch, 0.01, 1, Integrator::Rk4), Err(KelvinError::NotACycle(_))));
    }
}
