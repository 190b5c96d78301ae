use super::config::{acoustic_cfl, DtPolicy, MeshFamily, MAX_ACOUSTIC_CFL};
use super::{Check, HarnessError, RateFit};
use crate::dec_ops::Dec;
use crate::dynamics::{step, DensityMassMatrix, Forcing, Integrator, MmsReference, Scheme, SchemeConfig, State, ViscositySpec};
use crate::thermo::EquationOfState;
use crate::FluxKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn one() -> f64 {
    1.0
}

fn order_tol() -> f64 {
    0.3
}

fn inviscid() -> Vec<ViscositySpec> {
    vec![ViscositySpec::None]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub family: MeshFamily,
    pub scheme: Scheme,
    #[serde(default = "super::config::default_flux")]
    pub flux: FluxKind,
    pub eos: EquationOfState,
    pub mms: MmsReference,
    pub t_end: f64,
    pub dt: DtPolicy,
    #[serde(default = "super::config::default_integrator")]
    pub integrator: Integrator,
    #[serde(default = "inviscid")]
    pub viscosities: Vec<ViscositySpec>,
    #[serde(default = "one")]
    pub expected_order: f64,
    #[serde(default = "order_tol")]
    pub order_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeLevel {
    pub viscosity: usize,
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    /// dt/h.
    pub c: f64,
    pub steps: usize,
    pub acoustic_cfl: f64,
    pub velocity_error: f64,
    pub density_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViscositySweep {
    pub viscosity: ViscositySpec,
    pub velocity: RateFit,
    pub density: RateFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeReport {
    pub levels: Vec<ConvergeLevel>,
    pub sweeps: Vec<ViscositySweep>,
    pub checks: Vec<Check>,
}

/// ‖e_v‖ in the scheme's mass-matrix norm (M1 for DF, M1ρ(ρ_h) for DW)
/// and (Σ|K_i| D_H(ρ_h^vol ‖ ρ̄^vol))^{1/2}.
pub fn mms_errors(dec: &Dec, s: &State, reference: &State, scheme: &SchemeConfig) -> (f64, f64) {
    let c = &dec.mesh;
    let e: Vec<f64> = s.v.iter().zip(&reference.v).map(|(a, b)| a - b).collect();
    let ev = match scheme.scheme {
        Scheme::Df => dec.m1_dot(&e, &e),
        Scheme::Dw => DensityMassMatrix::new(dec, &s.rho).dot(&e, &e),
    };
    let br: f64 = (0..c.n_cells)
        .map(|i| {
            let k = c.cell_volume[i];
            k * scheme.eos.bregman_unchecked(s.rho[i] / k, reference.rho[i] / k)
        })
        .sum();
    (ev.sqrt(), br.max(0.0).sqrt())
}

fn level(cfg: &ConvergeConfig, vi: usize, n: usize) -> Result<ConvergeLevel, HarnessError> {
    if cfg.mms.extent != cfg.family.extent {
        return Err(HarnessError::Config("mms extent must match the mesh extent".into()));
    }
    let dec = cfg.family.member(n).build()?;
    let c = &dec.mesh;
    let mut scheme = SchemeConfig::new(cfg.scheme, cfg.flux, cfg.eos, c);
    scheme.viscosity = cfg.viscosities[vi].clone();
    scheme.forcing = Some(Forcing::Mms(cfg.mms));
    scheme.validate(c)?;
    let mut s = cfg.mms.state(&dec, 0.0);
    let (dt, steps) = cfg.dt.resolve(&dec, &s, &cfg.eos, cfg.t_end)?;
    let mut cfl = acoustic_cfl(&dec, &s, &cfg.eos, dt);
    for _ in 0..steps {
        s = step(&dec, &s, &scheme, dt, cfg.integrator)?;
        cfl = cfl.max(acoustic_cfl(&dec, &s, &cfg.eos, dt));
    }
    let reference = cfg.mms.state(&dec, s.t);
    let (ev, er) = mms_errors(&dec, &s, &reference, &scheme);
    let h = c.h_max();
    Ok(ConvergeLevel {
        viscosity: vi,
        n,
        h,
        dt,
        c: dt / h,
        steps,
        acoustic_cfl: cfl,
        velocity_error: ev,
        density_error: er,
    })
}

pub fn converge(cfg: &ConvergeConfig) -> Result<ConvergeReport, HarnessError> {
    if cfg.family.n.len() < 3 {
        return Err(HarnessError::Config("converge needs at least three mesh levels".into()));
    }
    if cfg.viscosities.is_empty() {
        return Err(HarnessError::Config("converge needs at least one viscosity".into()));
    }
    let jobs: Vec<(usize, usize)> =
        (0..cfg.viscosities.len()).flat_map(|v| cfg.family.n.iter().map(move |&n| (v, n))).collect();
    let mut levels = jobs.par_iter().map(|&(v, n)| level(cfg, v, n)).collect::<Result<Vec<_>, _>>()?;
    levels.sort_by(|a, b| (a.viscosity, a.n).cmp(&(b.viscosity, b.n)));

    let mut sweeps = Vec::new();
    let mut checks = Vec::new();
    for (vi, visc) in cfg.viscosities.iter().enumerate() {
        let lv: Vec<&ConvergeLevel> = levels.iter().filter(|l| l.viscosity == vi).collect();
        let velocity = RateFit::new(lv.iter().map(|l| (l.h, l.velocity_error)).collect())?;
        let density = RateFit::new(lv.iter().map(|l| (l.h, l.density_error)).collect())?;
        checks.push(Check::order(format!("velocity_order[{vi}]"), velocity.observed_order, cfg.expected_order, cfg.order_tol));
        checks.push(Check::order(format!("density_order[{vi}]"), density.observed_order, cfg.expected_order, cfg.order_tol));
        sweeps.push(ViscositySweep { viscosity: visc.clone(), velocity, density });
    }
    let spread = |f: &dyn Fn(&ViscositySweep) -> f64| {
        let xs: Vec<f64> = sweeps.iter().map(f).collect();
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    checks.push(Check::le("velocity_order_spread", spread(&|s| s.velocity.slope), cfg.order_tol));
    checks.push(Check::le("density_order_spread", spread(&|s| s.density.slope), cfg.order_tol));
    let cmax = levels.iter().map(|l| l.acoustic_cfl).fold(0.0, f64::max);
    checks.push(Check::le("acoustic_cfl", cmax, MAX_ACOUSTIC_CFL));
    Ok(ConvergeReport { levels, sweeps, checks })
}
