use super::config::{InitialCondition, MeshFamily, MeshSpec};
use super::{Check, HarnessError, RateFit};
use crate::diagnostics::{circulation_rate, kelvin as advect, straight_loop};
use crate::dynamics::{FluxKind, Integrator, Scheme, SchemeConfig};
use crate::thermo::EquationOfState;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn vortical() -> InitialCondition {
    InitialCondition::Vortical { u0: 0.5, rho_amp: 0.2 }
}

fn default_offset() -> f64 {
    0.37
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KelvinConfig {
    /// DF mesh for the dt-refinement.
    pub mesh: MeshSpec,
    pub eos: EquationOfState,
    #[serde(default = "vortical")]
    pub initial: InitialCondition,
    /// Loop y = loop_offset·L_y.
    #[serde(default = "default_offset")]
    pub loop_offset: f64,
    pub t_end: f64,
    /// Step counts over [0, t_end], at least three.
    pub steps: Vec<usize>,
    /// DW family for the circulation defect against h.
    pub family: MeshFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfLevel {
    pub steps: usize,
    pub dt: f64,
    pub drift: f64,
    pub max_boundary: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DwLevel {
    pub n: usize,
    pub h: f64,
    /// |dΓ/dt| along the advected loop at t = 0.
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KelvinReport {
    pub df: Vec<DfLevel>,
    pub df_fit: RateFit,
    pub dw: Vec<DwLevel>,
    pub dw_fit: RateFit,
    pub checks: Vec<Check>,
}

pub fn kelvin(cfg: &KelvinConfig) -> Result<KelvinReport, HarnessError> {
    let dec = cfg.mesh.build()?;
    let c = &dec.mesh;
    let sc = SchemeConfig::new(Scheme::Df, FluxKind::Centred, cfg.eos, c);
    let s0 = cfg.initial.build(&dec, &sc, None)?;
    let chain = straight_loop(c, 1, cfg.loop_offset * c.torus_extent[1]);
    let mut df = cfg
        .steps
        .par_iter()
        .map(|&n| {
            let dt = cfg.t_end / n as f64;
            let (samples, _, _) = advect(&dec, &s0, &sc, &chain, dt, n, Integrator::Rk4)?;
            let g0 = samples[0].circulation;
            Ok(DfLevel {
                steps: n,
                dt,
                drift: (samples.last().map_or(g0, |s| s.circulation) - g0).abs(),
                max_boundary: samples.iter().map(|s| s.boundary).fold(0.0, f64::max),
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    df.sort_by_key(|l| l.steps);
    let df_fit = RateFit::new(df.iter().map(|l| (l.dt, l.drift)).collect())?;

    let mut dw = cfg
        .family
        .n
        .par_iter()
        .map(|&n| {
            let dec = cfg.family.member(n).build()?;
            let c = &dec.mesh;
            let sc = SchemeConfig::new(Scheme::Dw, FluxKind::DwConjugate, cfg.eos, c);
            let s = cfg.initial.build(&dec, &sc, None)?;
            let chain = straight_loop(c, 1, cfg.loop_offset * c.torus_extent[1]);
            Ok(DwLevel { n, h: c.h_max(), defect: circulation_rate(&dec, &s, &sc, &chain.gamma)?.abs() })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    dw.sort_by_key(|l| l.n);
    let dw_fit = RateFit::new(dw.iter().map(|l| (l.h, l.defect)).collect())?;

    let boundary = df.iter().map(|l| l.max_boundary).fold(0.0, f64::max);
    let checks = vec![
        Check::le("chain_boundary", boundary, 1e-10),
        Check::order("df_drift_order", df_fit.observed_order, 4.0, 0.5),
        Check::order("dw_defect_order", dw_fit.observed_order, 2.0, 0.5),
    ];
    Ok(KelvinReport { df, df_fit, dw, dw_fit, checks })
}
