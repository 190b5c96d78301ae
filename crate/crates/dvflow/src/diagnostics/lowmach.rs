use super::energy::kinetic_density;
use crate::dec_ops::Dec;
use crate::dynamics::{rhs, DensityMassMatrix, DynError, Scheme, SchemeConfig, State};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationEnergy {
    pub kinetic: f64,
    /// (1/2M²)Σ|K_i|Ĥ″(ξ_i)(ρ_i^vol − ρ̄)².
    pub potential: f64,
    pub total: f64,
}

/// ℰ_M with the exact Taylor point per cell. The EoS carries the Mach
/// factor, so its H″ already includes M⁻².
pub fn fluctuation_energy(dec: &Dec, state: &State, cfg: &SchemeConfig, rho_bar: f64) -> FluctuationEnergy {
    let c = &dec.mesh;
    let kinetic = match cfg.scheme {
        Scheme::Df => 0.5 * dec.m1_dot(&state.v, &state.v),
        Scheme::Dw => kinetic_density(dec, &state.v).iter().zip(&state.rho).map(|(e, r)| e * r).sum(),
    };
    let potential = (0..c.n_cells)
        .map(|i| {
            let r = state.rho[i] / c.cell_volume[i];
            let xi = cfg.eos.taylor_point(r, rho_bar);
            0.5 * c.cell_volume[i] * cfg.eos.free_energy_dd(xi) * (r - rho_bar).powi(2)
        })
        .sum::<f64>();
    FluctuationEnergy { kinetic, potential, total: kinetic + potential }
}

/// dℰ_M/dt by the chain rule; the potential part differentiates to
/// Σ(h(ρ_i^vol) − h(ρ̄)) dρ_i/dt.
pub fn fluctuation_energy_rate(dec: &Dec, state: &State, cfg: &SchemeConfig, rho_bar: f64) -> Result<(f64, f64), DynError> {
    let c = &dec.mesh;
    let r = rhs(dec, state, cfg)?;
    let kin = match cfg.scheme {
        Scheme::Df => dec.m1_dot(&state.v, &r.dv),
        Scheme::Dw => {
            let m = DensityMassMatrix::new(dec, &state.rho);
            let ek = kinetic_density(dec, &state.v);
            m.dot(&state.v, &r.dv) + ek.iter().zip(&r.drho).map(|(e, d)| e * d).sum::<f64>()
        }
    };
    let mut rate = kin;
    let mut scale = kin.abs();
    for i in 0..c.n_cells {
        let rv = state.rho[i] / c.cell_volume[i];
        let t = (cfg.eos.enthalpy_offset(rv, rho_bar) + cfg.geopotential[i]) * r.drho[i];
        rate += t;
        scale += t.abs();
    }
    Ok((rate, scale))
}

/// ‖ρ^vol − ρ̄‖ in the volume-weighted L2 norm.
pub fn density_deviation(dec: &Dec, state: &State, rho_bar: f64) -> f64 {
    let c = &dec.mesh;
    (0..c.n_cells)
        .map(|i| c.cell_volume[i] * (state.rho[i] / c.cell_volume[i] - rho_bar).powi(2))
        .sum::<f64>()
        .sqrt()
}
