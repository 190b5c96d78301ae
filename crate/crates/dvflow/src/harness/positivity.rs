use super::config::{InitialCondition, MeshSpec};
use super::{Check, HarnessError};
use crate::diagnostics::{kappa, positivity_run, PositivityReport};
use crate::dynamics::{FluxKind, Scheme, SchemeConfig, State};
use crate::thermo::EquationOfState;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn compressive() -> InitialCondition {
    InitialCondition::Compressive { u0: 0.05, width: 0.3, rho: 1.0, centre: [0.5, 0.43] }
}

fn default_steps() -> usize {
    500
}

fn default_tol() -> f64 {
    1e-12
}

fn default_amp() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivityConfig {
    pub mesh: MeshSpec,
    pub eos: EquationOfState,
    #[serde(default = "compressive")]
    pub initial: InitialCondition,
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Transport only, with v held at its initial value.
    #[serde(default)]
    pub frozen_velocity: bool,
    /// Stream-function amplitude of the solenoidal max-principle run.
    #[serde(default = "default_amp")]
    pub solenoidal_amplitude: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityStressReport {
    pub compressive: PositivityReport,
    pub solenoidal: PositivityReport,
    /// Same compressive data under the centred flux; recorded only.
    pub centred_rho_min: f64,
    pub centred_vacuum: Option<String>,
    pub checks: Vec<Check>,
}

fn upwind(cfg: &PositivityConfig, dec: &crate::dec_ops::Dec, flux: FluxKind, frozen: bool) -> SchemeConfig {
    let mut s = SchemeConfig::new(Scheme::Df, flux, cfg.eos, &dec.mesh);
    s.frozen_velocity = frozen;
    s
}

pub fn positivity(cfg: &PositivityConfig) -> Result<PositivityStressReport, HarnessError> {
    let dec = cfg.mesh.build()?;
    let c = &dec.mesh;
    let up = upwind(cfg, &dec, FluxKind::Upwind, cfg.frozen_velocity);
    let s0 = cfg.initial.build(&dec, &up, None)?;
    let compressive = positivity_run(&dec, &s0, &up, cfg.dt, cfg.steps, cfg.tol);

    let cen = upwind(cfg, &dec, FluxKind::Centred, cfg.frozen_velocity);
    let rc = positivity_run(&dec, &s0, &cen, cfg.dt, cfg.steps, cfg.tol);
    let centred_rho_min = rc.samples.iter().map(|s| s.rho_min).fold(f64::INFINITY, f64::min);

    // v = M1⁻¹CURLᵀψ with ψ on the mesh vertices, so DIV M1 v = 0.
    let [lx, ly] = [c.torus_extent[0], c.torus_extent[1]];
    let psi: Vec<f64> = (0..c.n_dualfaces)
        .map(|k| {
            let x = c.vertices[k];
            cfg.solenoidal_amplitude * ((2.0 * PI * x[0] / lx).sin() * (2.0 * PI * x[1] / ly + 0.5).cos())
        })
        .collect();
    let v = dec.m1_inv(&dec.curl_t(&psi));
    let (kp, km) = kappa(&dec, &v);
    let rv: Vec<f64> = c
        .circumcentre
        .iter()
        .map(|x| 1.0 + 0.5 * (2.0 * PI * (x[0] / lx + x[1] / ly)).cos())
        .collect();
    let frozen = upwind(cfg, &dec, FluxKind::Upwind, true);
    let solenoidal = positivity_run(&dec, &State::from_volumetric(c, v, &rv), &frozen, cfg.dt, cfg.steps, cfg.tol);

    let checks = vec![
        Check::flag(
            "no_vacuum",
            compressive.vacuum.is_none() && compressive.samples.len() == cfg.steps + 1,
            compressive.vacuum.clone().unwrap_or_default(),
        ),
        Check::flag("gronwall_envelope", compressive.envelope_holds, ""),
        Check::le("solenoidal_divergence", kp.max(km), 1e-12),
        Check::flag("max_principle", solenoidal.vacuum.is_none() && solenoidal.max_principle_holds, ""),
    ];
    Ok(PositivityStressReport { compressive, solenoidal, centred_rho_min, centred_vacuum: rc.vacuum, checks })
}
