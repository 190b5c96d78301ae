use super::{Check, HarnessError, RunConfig};
use crate::dec_ops::Dec;
use crate::diagnostics::{straight_loop, InvariantReport, ReportContext};
use crate::dynamics::{step, SchemeConfig, State};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dt: f64,
    pub steps: usize,
    pub acoustic_cfl: f64,
    pub invariants: InvariantReport,
    pub final_state: State,
    pub checks: Vec<Check>,
}

pub fn report_context(dec: &Dec, cfg: &RunConfig) -> ReportContext {
    let c = &dec.mesh;
    ReportContext {
        chain: cfg.outputs.loop_offset.map(|o| straight_loop(c, 1, o * c.torus_extent[1]).gamma),
        sigma: None,
        rho_bar: cfg.outputs.rho_bar,
        momentum: cfg.outputs.momentum,
    }
}

/// Time loop from `state` with invariant rows every `every` steps and at
/// the end.
pub fn integrate(
    dec: &Dec,
    state: &State,
    scheme: &SchemeConfig,
    cfg: &RunConfig,
    dt: f64,
    steps: usize,
) -> Result<(InvariantReport, State), HarnessError> {
    let ctx = report_context(dec, cfg);
    let every = cfg.outputs.every.max(1);
    let mut rep = InvariantReport::default();
    rep.push(dec, state, scheme, &ctx);
    let mut s = state.clone();
    for k in 1..=steps {
        s = step(dec, &s, scheme, dt, cfg.integrator)?;
        if k % every == 0 || k == steps {
            rep.push(dec, &s, scheme, &ctx);
        }
    }
    Ok((rep, s))
}

fn relative_drift(rep: &InvariantReport, name: &str) -> f64 {
    let col = rep.column(name).unwrap_or_default();
    let q0 = col.first().copied().unwrap_or(0.0);
    let d = rep.drift(name).unwrap_or(f64::NAN);
    d / q0.abs().max(f64::MIN_POSITIVE)
}

pub fn run(cfg: &RunConfig) -> Result<RunReport, HarnessError> {
    let dec = cfg.mesh.build()?;
    let scheme = cfg.scheme_config(&dec)?;
    let s0 = cfg.initial.build(&dec, &scheme, cfg.mms.as_ref())?;
    let (dt, steps) = cfg.dt.resolve(&dec, &s0, &cfg.eos, cfg.t_end)?;
    let cfl = super::config::acoustic_cfl(&dec, &s0, &cfg.eos, dt);
    let (invariants, final_state) = integrate(&dec, &s0, &scheme, cfg, dt, steps)?;
    let mut checks = vec![
        Check::le("mass_drift", relative_drift(&invariants, "mass"), 1e-12),
        Check::le("total_vorticity_drift", invariants.drift("total_vorticity").unwrap_or(f64::NAN), 1e-12),
    ];
    if let Some(tol) = cfg.outputs.energy_tol {
        checks.push(Check::le("energy_drift", relative_drift(&invariants, "e_tot"), tol));
    }
    Ok(RunReport { dt, steps, acoustic_cfl: cfl, invariants, final_state, checks })
}
