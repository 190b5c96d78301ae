//! Experiment drivers, configuration and report emission.

mod checks;
pub mod config;
mod converge;
mod kelvin;
mod lowmach;
mod lyapunov;
mod manifest;
mod meshgen;
mod nogo;
mod output;
mod positivity;
mod ratefit;
mod run;

pub use checks::{all_passed, Check, CHECK_INVENTORY};
pub use config::{DtPolicy, InitialCondition, MeshFamily, MeshSpec, OutputSpec, RunConfig, MAX_ACOUSTIC_CFL};
pub use converge::{converge, ConvergeConfig, ConvergeLevel, ConvergeReport, ViscositySweep};
pub use kelvin::{kelvin, DfLevel, DwLevel, KelvinConfig, KelvinReport};
pub use lowmach::{lowmach, LowMachConfig, LowMachReport, LowMachRow};
pub use lyapunov::{lyapunov, FlowRow, LyapunovConfig, LyapunovReport};
pub use manifest::{config_hash, git_describe, Manifest};
pub use meshgen::{mesh_gen, MeshGenReport};
pub use nogo::{nogo, NogoConfig, NogoLevel, NogoReport};
pub use output::{csv_table, load_config, write_outputs, Config};
pub use positivity::{positivity, PositivityConfig, PositivityStressReport};
pub use ratefit::RateFit;
pub use run::{integrate, run, RunReport};

use crate::dec_ops::DecError;
use crate::diagnostics::{KelvinError, LyapunovError};
use crate::dynamics::DynError;
use crate::mesh::MeshError;
use crate::thermo::ThermoError;

/// Fits below this r² report no order.
pub const R2_MIN: f64 = 0.98;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("rate fit: {0}")]
    Fit(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error(transparent)]
    Dyn(#[from] DynError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error(transparent)]
    Kelvin(#[from] KelvinError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
