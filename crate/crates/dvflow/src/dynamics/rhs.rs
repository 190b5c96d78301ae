use super::{DensityMassMatrix, DynError, FluxKind, Forcing, Scheme, SchemeConfig, State};
use crate::dec_ops::{lamb, Dec};
use crate::geom;

/// Time derivatives of (v, ρ).
#[derive(Clone, Debug, PartialEq)]
pub struct Rates {
    pub dv: Vec<f64>,
    pub drho: Vec<f64>,
}

impl Rates {
    pub fn zeros(dec: &Dec) -> Self {
        Rates { dv: vec![0.0; dec.mesh.n_faces], drho: vec![0.0; dec.mesh.n_cells] }
    }

    pub fn add(&mut self, other: &Rates) {
        super::axpy(&mut self.dv, 1.0, &other.dv);
        super::axpy(&mut self.drho, 1.0, &other.drho);
    }
}

/// Φ = M1 v.
pub fn volume_flux(dec: &Dec, v: &[f64]) -> Vec<f64> {
    dec.m1(v)
}

/// F_j = ρ̄_j Φ_j with the centred or upwind face density.
pub fn mass_flux_df(dec: &Dec, state: &State, kind: FluxKind) -> Vec<f64> {
    let c = &dec.mesh;
    let phi = volume_flux(dec, &state.v);
    let rv = state.rho_vol(c);
    phi.iter()
        .zip(&c.face_cells)
        .map(|(&f, &[a, b])| {
            let rb = match kind {
                FluxKind::Upwind => {
                    if f >= 0.0 {
                        rv[a]
                    } else {
                        rv[b]
                    }
                }
                _ => 0.5 * (rv[a] + rv[b]),
            };
            rb * f
        })
        .collect()
}

/// F_ρ = M1ρ(ρ) v.
pub fn mass_flux_dw(dec: &Dec, state: &State) -> Vec<f64> {
    DensityMassMatrix::new(dec, &state.rho).apply(&state.v)
}

pub fn mass_flux(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Vec<f64> {
    match cfg.scheme {
        Scheme::Df => mass_flux_df(dec, state, cfg.flux),
        Scheme::Dw => mass_flux_dw(dec, state),
    }
}

/// B_i = h(ρ_i/|K_i|) + ½|Pv|_i² + Φ_geo,i, less h(ρ̄) when shifted.
pub fn bernoulli(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<Vec<f64>, DynError> {
    let c = &dec.mesh;
    let u = dec.rec.apply(&state.v);
    (0..c.n_cells)
        .map(|i| {
            let r = state.rho[i] / c.cell_volume[i];
            let h = match cfg.bernoulli_shift {
                Some(r0) => {
                    cfg.eos.enthalpy(r)?;
                    cfg.eos.enthalpy_offset(r, r0)
                }
                None => cfg.eos.enthalpy(r)?,
            };
            Ok(h + 0.5 * geom::dot(u[i], u[i]) + cfg.geopotential[i])
        })
        .collect()
}

/// DF momentum and continuity without forcing.
pub fn rhs_df(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<Rates, DynError> {
    let b = bernoulli(dec, state, cfg)?;
    let f = mass_flux_df(dec, state, cfg.flux);
    let drho: Vec<f64> = dec.div(&f).into_iter().map(|x| -x).collect();
    if cfg.frozen_velocity {
        return Ok(Rates { dv: vec![0.0; dec.mesh.n_faces], drho });
    }
    let mut dv = super::viscous_force(dec, &state.v, &cfg.viscosity);
    super::axpy(&mut dv, -1.0, &lamb(dec, &state.v));
    super::axpy(&mut dv, -1.0, &dec.grad(&b));
    Ok(Rates { dv, drho })
}

/// DW momentum and continuity without forcing. The mass-matrix ratio
/// M1ρ⁻¹M1 multiplies only the Lamb term: M1·lamb lies in range(Pᵀ), M1·f_visc
/// in general does not.
pub fn rhs_dw(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<Rates, DynError> {
    let b = bernoulli(dec, state, cfg)?;
    let m = DensityMassMatrix::new(dec, &state.rho);
    let f = m.apply(&state.v);
    let drho: Vec<f64> = dec.div(&f).into_iter().map(|x| -x).collect();
    if cfg.frozen_velocity {
        return Ok(Rates { dv: vec![0.0; dec.mesh.n_faces], drho });
    }
    let mut dv = m.solve(&dec.m1(&lamb(dec, &state.v)))?;
    for x in dv.iter_mut() {
        *x = -*x;
    }
    super::axpy(&mut dv, -1.0, &dec.grad(&b));
    super::axpy(&mut dv, 1.0, &super::viscous_force(dec, &state.v, &cfg.viscosity));
    Ok(Rates { dv, drho })
}

pub fn rhs_unforced(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<Rates, DynError> {
    match cfg.scheme {
        Scheme::Df => rhs_df(dec, state, cfg),
        Scheme::Dw => rhs_dw(dec, state, cfg),
    }
}

/// Full right-hand side including any manufactured forcing.
pub fn rhs(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<Rates, DynError> {
    let mut r = rhs_unforced(dec, state, cfg)?;
    match &cfg.forcing {
        None => {}
        Some(Forcing::Mms(m)) => r.add(&m.forcing(dec, cfg, state.t)?),
        Some(Forcing::DiscreteResidual(m)) => r.add(&m.discrete_forcing(dec, cfg, state.t)?),
    }
    if cfg.frozen_velocity {
        r.dv.iter_mut().for_each(|x| *x = 0.0);
    }
    Ok(r)
}
