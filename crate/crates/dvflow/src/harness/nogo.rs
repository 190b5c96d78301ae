use super::config::{InitialCondition, MeshFamily, MeshSpec};
use super::{Check, HarnessError, RateFit};
use crate::diagnostics::{energy_residual, nogo_witness_doubling, WitnessReport};
use crate::dynamics::{FluxKind, Scheme, SchemeConfig};
use crate::thermo::EquationOfState;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn vortical() -> InitialCondition {
    InitialCondition::Vortical { u0: 0.5, rho_amp: 0.2 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NogoConfig {
    pub family: MeshFamily,
    pub eos: EquationOfState,
    #[serde(default = "vortical")]
    pub initial: InitialCondition,
    pub witness_mesh: MeshSpec,
    #[serde(default = "vortical")]
    pub witness_initial: InitialCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NogoLevel {
    pub n: usize,
    pub h: f64,
    pub centred: f64,
    pub upwind: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NogoReport {
    pub levels: Vec<NogoLevel>,
    pub centred: RateFit,
    pub upwind: RateFit,
    pub witness: WitnessReport,
    pub checks: Vec<Check>,
}

fn level(cfg: &NogoConfig, n: usize) -> Result<NogoLevel, HarnessError> {
    let dec = cfg.family.member(n).build()?;
    let c = &dec.mesh;
    let cen = SchemeConfig::new(Scheme::Df, FluxKind::Centred, cfg.eos, c);
    let up = SchemeConfig::new(Scheme::Df, FluxKind::Upwind, cfg.eos, c);
    let s = cfg.initial.build(&dec, &cen, None)?;
    Ok(NogoLevel {
        n,
        h: c.h_max(),
        centred: energy_residual(&dec, &s, &cen).abs(),
        upwind: energy_residual(&dec, &s, &up).abs(),
    })
}

/// |R_E| against h for both density-only fluxes, plus the v/2v witness.
pub fn nogo(cfg: &NogoConfig) -> Result<NogoReport, HarnessError> {
    let mut levels = cfg.family.n.par_iter().map(|&n| level(cfg, n)).collect::<Result<Vec<_>, _>>()?;
    levels.sort_by_key(|l| l.n);
    let centred = RateFit::new(levels.iter().map(|l| (l.h, l.centred)).collect())?;
    let upwind = RateFit::new(levels.iter().map(|l| (l.h, l.upwind)).collect())?;

    let dec = cfg.witness_mesh.build()?;
    let sc = SchemeConfig::new(Scheme::Df, FluxKind::Centred, cfg.eos, &dec.mesh);
    let s = cfg.witness_initial.build(&dec, &sc, None)?;
    let witness = nogo_witness_doubling(&dec, &s, &sc);

    let checks = vec![
        Check::order("centred_order", centred.observed_order, 2.0, 0.4),
        Check::order("upwind_order", upwind.observed_order, 1.0, 0.4),
        Check::ge("witness_fraction", witness.differing_fraction, 0.95),
    ];
    Ok(NogoReport { levels, centred, upwind, witness, checks })
}
