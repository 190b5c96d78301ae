use crate::dec_ops::Dec;
use crate::dynamics::{bernoulli, mass_flux_df, rhs, volume_flux, DensityMassMatrix, DynError, Scheme, SchemeConfig, State};
use crate::geom;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energies {
    pub kinetic: f64,
    pub internal: f64,
    pub potential: f64,
    pub total: f64,
}

/// ½|Pv|² per cell.
pub fn kinetic_density(dec: &Dec, v: &[f64]) -> Vec<f64> {
    dec.rec.apply(v).iter().map(|u| 0.5 * geom::dot(*u, *u)).collect()
}

/// E_kin = ½vᵀM1v (DF) or ½Σρ_i|Pv|_i² (DW); E_int = Σρ_i e(ρ_i^vol);
/// E_pot = Σρ_iΦ_i.
pub fn energy(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Energies {
    let c = &dec.mesh;
    let kinetic = match cfg.scheme {
        Scheme::Df => 0.5 * dec.m1_dot(&state.v, &state.v),
        Scheme::Dw => kinetic_density(dec, &state.v).iter().zip(&state.rho).map(|(e, r)| e * r).sum(),
    };
    let internal = (0..c.n_cells)
        .map(|i| state.rho[i] * cfg.eos.internal_energy_unchecked(state.rho[i] / c.cell_volume[i]))
        .sum();
    let potential = state.rho.iter().zip(&cfg.geopotential).map(|(r, p)| r * p).sum();
    Energies { kinetic, internal, potential, total: kinetic + internal + potential }
}

/// dE_tot/dt by the chain rule on the right-hand side, with the
/// magnitude of the summed terms for relative tolerances.
pub fn energy_rate(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<(f64, f64), DynError> {
    let r = rhs(dec, state, cfg)?;
    let c = &dec.mesh;
    let kin = match cfg.scheme {
        Scheme::Df => dec.m1_dot(&state.v, &r.dv),
        Scheme::Dw => {
            let m = DensityMassMatrix::new(dec, &state.rho);
            let ek = kinetic_density(dec, &state.v);
            m.dot(&state.v, &r.dv) + ek.iter().zip(&r.drho).map(|(e, d)| e * d).sum::<f64>()
        }
    };
    let mut scale = kin.abs();
    let mut rate = kin;
    for i in 0..c.n_cells {
        let rv = state.rho[i] / c.cell_volume[i];
        let h = match cfg.bernoulli_shift {
            Some(r0) => cfg.eos.enthalpy_offset(rv, r0),
            None => cfg.eos.enthalpy_unchecked(rv),
        };
        let t = (h + cfg.geopotential[i]) * r.drho[i];
        rate += t;
        scale += t.abs();
    }
    Ok((rate, scale))
}

/// Enthalpy plus geopotential ψ_i = h(ρ_i^vol) + Φ_i.
fn psi(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Vec<f64> {
    let c = &dec.mesh;
    (0..c.n_cells)
        .map(|i| {
            let rv = state.rho[i] / c.cell_volume[i];
            let h = match cfg.bernoulli_shift {
                Some(r0) => cfg.eos.enthalpy_offset(rv, r0),
                None => cfg.eos.enthalpy_unchecked(rv),
            };
            h + cfg.geopotential[i]
        })
        .collect()
}

/// R_E = (e^kin)ᵀDIV Φ + (h+Φ_geo)ᵀDIV(Φ − F).
pub fn energy_residual(dec: &Dec, state: &State, cfg: &SchemeConfig) -> f64 {
    let phi = volume_flux(dec, &state.v);
    let f = mass_flux_df(dec, state, cfg.flux);
    let ek = kinetic_density(dec, &state.v);
    let p = psi(dec, state, cfg);
    let d1 = dec.div(&phi);
    let diff: Vec<f64> = phi.iter().zip(&f).map(|(a, b)| a - b).collect();
    let d2 = dec.div(&diff);
    ek.iter().zip(&d1).map(|(a, b)| a * b).sum::<f64>() + p.iter().zip(&d2).map(|(a, b)| a * b).sum::<f64>()
}

/// Per-face terms [(e_a − e_b) − (ψ_a − ψ_b)(ρ̄_j − 1)]Φ_j, whose sum is R_E.
pub fn energy_residual_faces(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Vec<f64> {
    let c = &dec.mesh;
    let phi = volume_flux(dec, &state.v);
    let f = mass_flux_df(dec, state, cfg.flux);
    let ek = kinetic_density(dec, &state.v);
    let p = psi(dec, state, cfg);
    (0..c.n_faces)
        .map(|j| {
            let [a, b] = c.face_cells[j];
            // ρ̄_j recovered from F = ρ̄Φ without dividing by Φ.
            (ek[a] - ek[b]) * phi[j] - (p[a] - p[b]) * (f[j] - phi[j])
        })
        .collect()
}

pub fn energy_residual_face_form(dec: &Dec, state: &State, cfg: &SchemeConfig) -> f64 {
    energy_residual_faces(dec, state, cfg).iter().sum()
}

/// Kinetic part alone: dE_kin/dt = ⟨B, DIV Φ⟩ for the DF scheme.
pub fn kinetic_rate_df(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<(f64, f64), DynError> {
    let r = rhs(dec, state, cfg)?;
    let lhs = dec.m1_dot(&state.v, &r.dv);
    let b = bernoulli(dec, state, cfg)?;
    let d = dec.div(&volume_flux(dec, &state.v));
    let rhs_: f64 = b.iter().zip(&d).map(|(x, y)| x * y).sum();
    Ok((lhs, rhs_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FluxKind, GeopotentialPreset};
    use crate::mesh::{build_dv_complex, lattice_points};
    use crate::thermo::EquationOfState;
    use rand::{Rng, SeedableRng};

    fn setup() -> (Dec, State) {
        let dec = Dec::new(build_dv_complex(&lattice_points(8, 0.15, 2), [1.0, 1.0]).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let v = (0..dec.mesh.n_faces).map(|j| rng.gen_range(-1.0..1.0) * dec.mesh.dual_edge_length[j]).collect();
        let rv: Vec<f64> = (0..dec.mesh.n_cells).map(|_| rng.gen_range(0.5..2.0)).collect();
        let s = State::from_volumetric(&dec.mesh, v, &rv);
        (dec, s)
    }

    fn eos() -> EquationOfState {
        EquationOfState::new(1.0, 2.0, 0.0, None).unwrap()
    }

    #[test]
    fn three_assemblies_agree() {
        let (dec, s) = setup();
        for flux in [FluxKind::Centred, FluxKind::Upwind] {
            let mut cfg = SchemeConfig::new(Scheme::Df, flux, eos(), &dec.mesh);
            cfg.geopotential = GeopotentialPreset::PeriodicWell { g: 0.7 }.sample(&dec.mesh);
            let a = energy_residual(&dec, &s, &cfg);
            let b = energy_residual_face_form(&dec, &s, &cfg);
            let (c, scale) = energy_rate(&dec, &s, &cfg).unwrap();
            assert!((a - b).abs() <= 1e-12 * scale);
            assert!((a - c).abs() <= 1e-12 * scale, "{a} {c} {scale}");
            let (k1, k2) = kinetic_rate_df(&dec, &s, &cfg).unwrap();
            assert!((k1 - k2).abs() <= 1e-12 * k1.abs().max(k2.abs()));
        }
    }

    #[test]
    fn examples() {
        let (dec, s) = setup();
        let cfg = SchemeConfig::new(Scheme::Dw, FluxKind::DwConjugate, eos(), &dec.mesh);
        let rest = State::from_volumetric(&dec.mesh, vec![0.0; dec.mesh.n_faces], &vec![2.0; dec.mesh.n_cells]);
        let e = energy(&dec, &rest, &cfg);
        assert_eq!(e.kinetic, 0.0);
        assert!((e.internal - 4.0).abs() < 1e-13);
        let uni = State::from_volumetric(&dec.mesh, s.v.clone(), &vec![1.5; dec.mesh.n_cells]);
        let dw = energy(&dec, &uni, &cfg).kinetic;
        let pv = dec.rec.apply_flat(&s.v);
        let want: f64 = (0..dec.mesh.n_cells)
            .map(|i| 0.75 * dec.mesh.cell_volume[i] * (pv[3 * i].powi(2) + pv[3 * i + 1].powi(2)))
            .sum();
        assert!((dw - want).abs() < 1e-13 * want);
        let df = energy(&dec, &uni, &SchemeConfig::new(Scheme::Df, FluxKind::Centred, eos(), &dec.mesh)).kinetic;
        assert!((df - dw).abs() > 1e-3 * df);
    }

    #[test]
    fn unit_density_centred_residual_is_kinetic_only() {
        let (dec, s) = setup();
        let s = State::from_volumetric(&dec.mesh, s.v, &vec![1.0; dec.mesh.n_cells]);
        let cfg = SchemeConfig::new(Scheme::Df, FluxKind::Centred, eos(), &dec.mesh);
        let ek = kinetic_density(&dec, &s.v);
        let d = dec.div(&volume_flux(&dec, &s.v));
        let want: f64 = ek.iter().zip(&d).map(|(a, b)| a * b).sum();
        assert!((energy_residual(&dec, &s, &cfg) - want).abs() < 1e-14);
    }
}
