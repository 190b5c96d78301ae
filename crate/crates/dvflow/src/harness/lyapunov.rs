use super::config::{InitialCondition, MeshSpec};
use super::{Check, HarnessError};
use crate::dec_ops::Dec;
use crate::diagnostics::{lyapunov_check, momentum_x_rate, EquilibriumClass, HessianReport};
use crate::dynamics::{hydrostatic_density, FluxKind, GeopotentialPreset, Scheme, SchemeConfig, State};
use crate::thermo::EquationOfState;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn well() -> GeopotentialPreset {
    GeopotentialPreset::PeriodicWell { g: 0.5 }
}

fn default_lambda() -> f64 {
    3.0
}

fn default_decay_gamma() -> f64 {
    1.4
}

fn default_flow_u() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

fn default_perturbation() -> InitialCondition {
    InitialCondition::Vortical { u0: 0.5, rho_amp: 0.2 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovConfig {
    /// Mesh of the hydrostatic equilibria.
    pub mesh: MeshSpec,
    pub eos: EquationOfState,
    #[serde(default = "well")]
    pub geopotential: GeopotentialPreset,
    /// Hydrostatic level h(ρ) + Φ = λ.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Adiabatic exponent of the second hydrostatic check, where the
    /// right-hand side is not quadratic and the FD bridge decays.
    #[serde(default = "default_decay_gamma")]
    pub decay_gamma: f64,
    pub flow_mesh: MeshSpec,
    #[serde(default = "default_flow_u")]
    pub flow_u: Vec<f64>,
    pub flow_rho: f64,
    /// Added to the constant flow for the P_x rate, which is trivially
    /// zero at the equilibrium itself.
    #[serde(default = "default_perturbation")]
    pub momentum_perturbation: InitialCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRow {
    pub u: f64,
    pub hessian: HessianReport,
    pub momentum_rate: f64,
    pub momentum_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub hydrostatic: HessianReport,
    pub decay: HessianReport,
    /// log₂ of successive bridge-residual ratios under FD-step halving.
    pub decay_orders: Vec<f64>,
    pub flows: Vec<FlowRow>,
    pub checks: Vec<Check>,
}

fn hydrostatic(dec: &Dec, cfg: &LyapunovConfig, eos: EquationOfState) -> Result<HessianReport, HarnessError> {
    let c = &dec.mesh;
    let mut sc = SchemeConfig::new(Scheme::Dw, FluxKind::DwConjugate, eos, c);
    sc.geopotential = cfg.geopotential.sample(c);
    let rv = hydrostatic_density(&sc.eos, &sc.geopotential, cfg.lambda)
        .ok_or_else(|| HarnessError::Config(format!("level {} leaves a cell without density", cfg.lambda)))?;
    let eq = State::from_volumetric(c, vec![0.0; c.n_faces], &rv);
    Ok(lyapunov_check(dec, &eq, &sc, EquilibriumClass::Hydrostatic)?)
}

fn flow(dec: &Dec, cfg: &LyapunovConfig, u: f64) -> Result<FlowRow, HarnessError> {
    let c = &dec.mesh;
    let sc = SchemeConfig::new(Scheme::Dw, FluxKind::DwConjugate, cfg.eos, c);
    let eq = InitialCondition::ConstantFlow { u, rho: cfg.flow_rho }.build(dec, &sc, None)?;
    let hessian = lyapunov_check(dec, &eq, &sc, EquilibriumClass::ConstantFlow { u })?;
    let p = cfg.momentum_perturbation.build(dec, &sc, None)?;
    let s = State::new(eq.v.iter().zip(&p.v).map(|(a, b)| a + b).collect(), p.rho);
    let (momentum_rate, momentum_scale) = momentum_x_rate(dec, &s, &sc)?;
    Ok(FlowRow { u, hessian, momentum_rate, momentum_scale })
}

pub fn lyapunov(cfg: &LyapunovConfig) -> Result<LyapunovReport, HarnessError> {
    let dec = cfg.mesh.build()?;
    let hyd = hydrostatic(&dec, cfg, cfg.eos)?;
    let eos14 = EquationOfState::new(cfg.eos.kappa, cfg.decay_gamma, cfg.eos.rho_ref, cfg.eos.mach)?;
    let decay = hydrostatic(&dec, cfg, eos14)?;
    let decay_orders: Vec<f64> = decay.bridge_decay.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect();

    let fdec = cfg.flow_mesh.build()?;
    let flows = cfg.flow_u.par_iter().map(|&u| flow(&fdec, cfg, u)).collect::<Result<Vec<_>, _>>()?;

    let mut checks = vec![
        Check::le("hydrostatic_rhs", hyd.rhs_norm, 1e-9),
        Check::gt("hydrostatic_min_eig", hyd.min_eigenvalue, 0.0),
        Check::le("hydrostatic_bridge", hyd.bridge_residual, 1e-5),
    ];
    for (k, p) in decay_orders.iter().enumerate() {
        checks.push(Check::within(format!("bridge_decay[{k}]"), *p, 2.0, 0.3));
    }
    for r in &flows {
        checks.push(Check::le(format!("constant_flow_rhs[{}]", r.u), r.hessian.rhs_norm, 1e-9));
        checks.push(Check::gt(format!("constant_flow_min_eig[{}]", r.u), r.hessian.min_eigenvalue, 0.0));
        checks.push(Check::le(format!("momentum_rate[{}]", r.u), r.momentum_rate.abs() / r.momentum_scale, 1e-10));
    }
    Ok(LyapunovReport { hydrostatic: hyd, decay, decay_orders, flows, checks })
}
