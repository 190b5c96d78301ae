use super::config::{DtPolicy, InitialCondition, MeshSpec};
use super::{Check, HarnessError, RateFit};
use crate::dec_ops::Dec;
use crate::diagnostics::{density_deviation, energy_residual, fluctuation_energy, fluctuation_energy_rate};
use crate::dynamics::{step, FluxKind, Integrator, Scheme, SchemeConfig, State};
use crate::thermo::EquationOfState;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowMachConfig {
    pub mesh: MeshSpec,
    pub machs: Vec<f64>,
    pub kappa: f64,
    pub gamma: f64,
    pub rho_bar: f64,
    /// δ amplitude in ρ = ρ̄ + Mδ.
    pub delta: f64,
    pub u0: f64,
    pub t_end: f64,
    pub dt: DtPolicy,
    #[serde(default = "super::config::default_integrator")]
    pub integrator: Integrator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowMachRow {
    pub mach: f64,
    pub dt: f64,
    pub steps: usize,
    /// max over the DF run of |R_E|.
    pub df_max_re: f64,
    /// max over the DW run of |ℰ_M(t) − ℰ_M(0)|.
    pub dw_fluctuation_drift: f64,
    /// max over the DW run of |dℰ_M/dt| / (sum of |terms|).
    pub dw_fluctuation_rate: f64,
    /// max over the DW run of ‖ρ^vol − ρ̄‖.
    pub density_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowMachReport {
    pub rows: Vec<LowMachRow>,
    pub df_re_fit: RateFit,
    pub density_fit: RateFit,
    pub checks: Vec<Check>,
}

fn scheme_at(dec: &Dec, cfg: &LowMachConfig, scheme: Scheme, m: f64) -> Result<SchemeConfig, HarnessError> {
    let eos = EquationOfState::new(cfg.kappa, cfg.gamma, 0.0, Some(m))?;
    let mut s = SchemeConfig::new(scheme, FluxKind::Centred, eos, &dec.mesh);
    s.bernoulli_shift = Some(cfg.rho_bar);
    s.validate(&dec.mesh)?;
    Ok(s)
}

fn row(dec: &Dec, cfg: &LowMachConfig, m: f64) -> Result<LowMachRow, HarnessError> {
    let df = scheme_at(dec, cfg, Scheme::Df, m)?;
    let dw = scheme_at(dec, cfg, Scheme::Dw, m)?;
    let init = InitialCondition::WellPrepared { rho_bar: cfg.rho_bar, delta: cfg.delta, u0: cfg.u0 };
    let s0 = init.build(dec, &df, None)?;
    let (dt, steps) = cfg.dt.resolve(dec, &s0, &df.eos, cfg.t_end)?;

    let mut s: State = s0.clone();
    let mut df_max_re = energy_residual(dec, &s, &df).abs();
    for _ in 0..steps {
        s = step(dec, &s, &df, dt, cfg.integrator)?;
        df_max_re = df_max_re.max(energy_residual(dec, &s, &df).abs());
    }

    let mut s = s0;
    let e0 = fluctuation_energy(dec, &s, &dw, cfg.rho_bar).total;
    let (mut drift, mut rate, mut dev) = (0.0f64, 0.0f64, density_deviation(dec, &s, cfg.rho_bar));
    for k in 0..=steps {
        let (r, scale) = fluctuation_energy_rate(dec, &s, &dw, cfg.rho_bar)?;
        rate = rate.max(r.abs() / scale.max(f64::MIN_POSITIVE));
        if k == steps {
            break;
        }
        s = step(dec, &s, &dw, dt, cfg.integrator)?;
        drift = drift.max((fluctuation_energy(dec, &s, &dw, cfg.rho_bar).total - e0).abs());
        dev = dev.max(density_deviation(dec, &s, cfg.rho_bar));
    }
    Ok(LowMachRow {
        mach: m,
        dt,
        steps,
        df_max_re,
        dw_fluctuation_drift: drift,
        dw_fluctuation_rate: rate,
        density_deviation: dev,
    })
}

pub fn lowmach(cfg: &LowMachConfig) -> Result<LowMachReport, HarnessError> {
    if cfg.machs.len() < 3 {
        return Err(HarnessError::Config("lowmach needs at least three Mach numbers".into()));
    }
    let dec = cfg.mesh.build()?;
    let mut rows = cfg.machs.par_iter().map(|&m| row(&dec, cfg, m)).collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| b.mach.total_cmp(&a.mach));
    let df_re_fit = RateFit::new(rows.iter().map(|r| (r.mach, r.df_max_re)).collect())?;
    let density_fit = RateFit::new(rows.iter().map(|r| (r.mach, r.density_deviation)).collect())?;
    let top = rows[0].dw_fluctuation_drift;
    let worst_drift = rows.iter().map(|r| r.dw_fluctuation_drift).fold(0.0, f64::max);
    let worst_rate = rows.iter().map(|r| r.dw_fluctuation_rate).fold(0.0, f64::max);
    let checks = vec![
        Check::order("df_re_slope", df_re_fit.observed_order, -1.0, 0.3),
        Check::le("dw_fluctuation_rate", worst_rate, 1e-10),
        Check::le("dw_fluctuation_drift", worst_drift, 2.0 * top),
        Check::order("density_deviation_slope", density_fit.observed_order, 1.0, 0.3),
    ];
    Ok(LowMachReport { rows, df_re_fit, density_fit, checks })
}
