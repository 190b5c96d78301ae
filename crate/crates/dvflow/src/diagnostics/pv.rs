//! Potential vorticity: pointwise q, mass-weighted flux form on dual
//! 2-chains, and the Ertel quotient on cell sets.

use super::kelvin::chain_rate;
use crate::dec_ops::{lamb, Dec};
use crate::dynamics::{self, DensityMassMatrix, DynError, Scheme, SchemeConfig, State};
use serde::{Deserialize, Serialize};

/// Cells around each dual face's primal partner.
pub fn dualface_cells(dec: &Dec) -> Vec<Vec<usize>> {
    let c = &dec.mesh;
    let mut out = vec![Vec::new(); c.n_dualfaces];
    for (i, dfs) in c.cell_dualfaces.iter().enumerate() {
        for &k in dfs {
            out[k].push(i);
        }
    }
    out
}

/// q_k = ω_k/(ρ̄_k^vol |f_k*|).
pub fn potential_vorticity(dec: &Dec, state: &State) -> Vec<f64> {
    let c = &dec.mesh;
    let w = dec.curl(&state.v);
    let rv = state.rho_vol(c);
    dualface_cells(dec)
        .iter()
        .enumerate()
        .map(|(k, cells)| {
            let rb = cells.iter().map(|&i| rv[i]).sum::<f64>() / cells.len() as f64;
            w[k] / (rb * c.dual_face_area[k])
        })
        .collect()
}

/// 𝒫_Σ = Σ_k σ_k |f_k*| ρ̄_k q_k = σᵀω.
pub fn mass_weighted_pv(dec: &Dec, state: &State, sigma: &[f64]) -> f64 {
    let c = &dec.mesh;
    let q = potential_vorticity(dec, state);
    let rv = state.rho_vol(c);
    dualface_cells(dec)
        .iter()
        .enumerate()
        .map(|(k, cells)| {
            let rb = cells.iter().map(|&i| rv[i]).sum::<f64>() / cells.len() as f64;
            sigma[k] * c.dual_face_area[k] * rb * q[k]
        })
        .sum()
}

/// Momentum terms other than −GRAD B, as the scheme applies them.
fn advective_terms(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<Vec<f64>, DynError> {
    let l = lamb(dec, &state.v);
    let mut out = match cfg.scheme {
        Scheme::Df => l.iter().map(|x| -x).collect(),
        Scheme::Dw => {
            let m = DensityMassMatrix::new(dec, &state.rho);
            m.solve(&dec.m1(&l))?.into_iter().map(|x| -x).collect::<Vec<f64>>()
        }
    };
    dynamics::axpy(&mut out, 1.0, &dynamics::viscous_force(dec, &state.v, &cfg.viscosity));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PvBalance {
    /// σᵀCURL(dv/dt) from the full right-hand side.
    pub rate: f64,
    /// Flux form: the contracted vorticity evaluated on ∂Σ = CURLᵀσ.
    pub boundary_flux: f64,
    pub scale: f64,
}

pub fn mwpv_balance(dec: &Dec, state: &State, cfg: &SchemeConfig, sigma: &[f64]) -> Result<PvBalance, DynError> {
    let r = dynamics::rhs(dec, state, cfg)?;
    let dw = dec.curl(&r.dv);
    let rate: f64 = sigma.iter().zip(&dw).map(|(a, b)| a * b).sum();
    let bd = dec.curl_t(sigma);
    let a = advective_terms(dec, state, cfg)?;
    let boundary_flux: f64 = bd.iter().zip(&a).map(|(x, y)| x * y).sum();
    let scale = bd.iter().zip(&a).map(|(x, y)| (x * y).abs()).sum::<f64>()
        + sigma.iter().zip(&dw).map(|(x, y)| (x * y).abs()).sum::<f64>();
    Ok(PvBalance { rate, boundary_flux, scale })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErtelBalance {
    pub q: f64,
    /// dQ/dt from the right-hand side and the chain rate.
    pub rate: f64,
    /// Q·F_∂𝒱/ρ_𝒱.
    pub predicted: f64,
    pub boundary_flux: f64,
}

/// Q = vᵀγ/ρ_𝒱 for an advected cycle γ (e.g. ∂Σ) and a cell set 𝒱.
pub fn ertel_balance(
    dec: &Dec,
    state: &State,
    cfg: &SchemeConfig,
    gamma: &[f64],
    cells: &[usize],
) -> Result<ErtelBalance, DynError> {
    let r = dynamics::rhs(dec, state, cfg)?;
    let gdot = chain_rate(dec, &state.v, gamma);
    let circ: f64 = state.v.iter().zip(gamma).map(|(a, b)| a * b).sum();
    let dcirc: f64 = r.dv.iter().zip(gamma).map(|(a, b)| a * b).sum::<f64>()
        + state.v.iter().zip(&gdot).map(|(a, b)| a * b).sum::<f64>();
    let mv: f64 = cells.iter().map(|&i| state.rho[i]).sum();
    let dmv: f64 = cells.iter().map(|&i| r.drho[i]).sum();
    let f = dynamics::mass_flux(dec, state, cfg);
    let div = dec.div(&f);
    let boundary_flux: f64 = cells.iter().map(|&i| div[i]).sum();
    let q = circ / mv;
    Ok(ErtelBalance { q, rate: (dcirc * mv - circ * dmv) / (mv * mv), predicted: q * boundary_flux / mv, boundary_flux })
}
