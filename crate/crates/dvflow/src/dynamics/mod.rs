//! Semi-discrete density-free (DF) and density-weighted (DW) vector-invariant
//! schemes, their time integrators and manufactured forcing.

mod integrate;
mod massmatrix;
pub mod mms;
mod rhs;
mod viscous;

pub use integrate::{integrate_rhs, midpoint_step, rk4_step, state_weights, step, Integrator, PICARD_MAX_ITER, PICARD_TOL};
pub use massmatrix::{DensityMassMatrix, SolverDivergence, DENSE_LIMIT};
pub use mms::MmsReference;
pub use rhs::{
    bernoulli, mass_flux, mass_flux_df, mass_flux_dw, rhs, rhs_df, rhs_dw, rhs_unforced, volume_flux, Rates,
};
pub use viscous::viscous_force;

use crate::geom::V3;
use crate::mesh::CellComplex;
use crate::thermo::{EquationOfState, ThermoError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DynError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Solver(#[from] SolverDivergence),
    #[error("implicit midpoint did not converge: update {residual:e} after {iterations} iterations")]
    PicardNonconvergence { residual: f64, iterations: usize },
    #[error("vacuum at t = {t}: cell {cell} has mass {mass:e}")]
    VacuumEvent { t: f64, cell: usize, mass: f64, snapshot: Box<State> },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Velocity circulations on dual edges and cell masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub v: Vec<f64>,
    pub rho: Vec<f64>,
    pub t: f64,
}

impl State {
    pub fn new(v: Vec<f64>, rho: Vec<f64>) -> Self {
        State { v, rho, t: 0.0 }
    }

    /// Masses from volumetric densities.
    pub fn from_volumetric(c: &CellComplex, v: Vec<f64>, rho_vol: &[f64]) -> Self {
        let rho = rho_vol.iter().zip(&c.cell_volume).map(|(r, k)| r * k).collect();
        State::new(v, rho)
    }

    pub fn rho_vol(&self, c: &CellComplex) -> Vec<f64> {
        self.rho.iter().zip(&c.cell_volume).map(|(r, k)| r / k).collect()
    }

    pub fn mass(&self) -> f64 {
        self.rho.iter().sum()
    }

    pub fn admissible(&self) -> Option<usize> {
        self.rho.iter().position(|&r| !(r > 0.0 && r.is_finite()))
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut y = self.v.clone();
        y.extend_from_slice(&self.rho);
        y
    }

    pub fn from_flat(y: &[f64], nf: usize, t: f64) -> Self {
        State { v: y[..nf].to_vec(), rho: y[nf..].to_vec(), t }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Df,
    Dw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    Centred,
    Upwind,
    DwConjugate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViscositySpec {
    None,
    Newtonian { nu: f64, zeta: f64 },
    /// Per-dual-face coefficients; `nu_dil` adds the dilatational block.
    Anisotropic { nu_k: Vec<f64>, nu_dil: f64 },
    Smagorinsky { cs: f64 },
}

impl Default for ViscositySpec {
    fn default() -> Self {
        ViscositySpec::None
    }
}

impl ViscositySpec {
    pub fn validate(&self, c: &CellComplex) -> Result<(), DynError> {
        let bad = |m: String| Err(DynError::InvalidConfig(m));
        match self {
            ViscositySpec::None => Ok(()),
            ViscositySpec::Newtonian { nu, zeta } if *nu >= 0.0 && *zeta >= 0.0 => Ok(()),
            ViscositySpec::Newtonian { nu, zeta } => bad(format!("nu = {nu}, zeta = {zeta} must be >= 0")),
            ViscositySpec::Anisotropic { nu_k, nu_dil } => {
                if nu_k.len() != c.n_dualfaces {
                    bad(format!("{} coefficients for {} dual faces", nu_k.len(), c.n_dualfaces))
                } else if nu_k.iter().any(|&x| !(x >= 0.0)) || !(*nu_dil >= 0.0) {
                    bad("anisotropic coefficients must be >= 0".into())
                } else {
                    Ok(())
                }
            }
            ViscositySpec::Smagorinsky { cs } if *cs > 0.0 => Ok(()),
            ViscositySpec::Smagorinsky { cs } => bad(format!("C_s = {cs} must be positive")),
        }
    }

    /// ν_dil = 4ν/3 + ζ for the Newtonian operator.
    pub fn dilatational(&self) -> f64 {
        match self {
            ViscositySpec::Newtonian { nu, zeta } => 4.0 * nu / 3.0 + zeta,
            ViscositySpec::Anisotropic { nu_dil, .. } => *nu_dil,
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Forcing {
    /// Continuum residual of the reference, de Rham mapped.
    Mms(MmsReference),
    /// Discrete residual of the reference interpolant, so that the
    /// interpolant itself solves the forced system.
    DiscreteResidual(MmsReference),
}

#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub flux: FluxKind,
    pub viscosity: ViscositySpec,
    pub eos: EquationOfState,
    /// Φ_geo at cell circumcentres.
    pub geopotential: Vec<f64>,
    pub forcing: Option<Forcing>,
    /// Hold v fixed (transport-only runs).
    pub frozen_velocity: bool,
    /// Subtract h(ρ̄) from the Bernoulli function. Leaves every gradient and
    /// every mass-weighted rate unchanged while avoiding the M⁻² cancellation.
    pub bernoulli_shift: Option<f64>,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, flux: FluxKind, eos: EquationOfState, c: &CellComplex) -> Self {
        let flux = if scheme == Scheme::Dw { FluxKind::DwConjugate } else { flux };
        SchemeConfig {
            scheme,
            flux,
            viscosity: ViscositySpec::None,
            eos,
            geopotential: vec![0.0; c.n_cells],
            forcing: None,
            frozen_velocity: false,
            bernoulli_shift: None,
        }
    }

    pub fn validate(&self, c: &CellComplex) -> Result<(), DynError> {
        self.eos.validate()?;
        self.viscosity.validate(c)?;
        if self.geopotential.len() != c.n_cells {
            return Err(DynError::InvalidConfig(format!(
                "geopotential has {} entries for {} cells",
                self.geopotential.len(),
                c.n_cells
            )));
        }
        match (self.scheme, self.flux) {
            (Scheme::Dw, FluxKind::DwConjugate) | (Scheme::Df, FluxKind::Centred | FluxKind::Upwind) => Ok(()),
            (s, f) => Err(DynError::InvalidConfig(format!("flux {f:?} is not available for scheme {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeopotentialPreset {
    Zero,
    /// g·cos(2πy/L_y).
    PeriodicWell { g: f64 },
    /// g·z, prisms only.
    Linear { g: f64 },
}

impl Default for GeopotentialPreset {
    fn default() -> Self {
        GeopotentialPreset::Zero
    }
}

impl GeopotentialPreset {
    pub fn eval(&self, x: V3, c: &CellComplex) -> f64 {
        match *self {
            GeopotentialPreset::Zero => 0.0,
            GeopotentialPreset::PeriodicWell { g } => g * (2.0 * PI * x[1] / c.torus_extent[1]).cos(),
            GeopotentialPreset::Linear { g } => g * x[2],
        }
    }

    pub fn sample(&self, c: &CellComplex) -> Vec<f64> {
        (0..c.n_cells).map(|i| self.eval(cell_point(c, i), c)).collect()
    }
}

/// Evaluation point of cell i: the circumcentre, lifted to the layer
/// midpoint on prisms.
pub fn cell_point(c: &CellComplex, i: usize) -> V3 {
    let mut x = c.circumcentre[i];
    if c.dimension == 3 {
        x[2] = 0.5 * (c.cell_z[i][0] + c.cell_z[i][1]);
    }
    x
}

/// Volumetric density in hydrostatic balance h(ρ̄) + Φ = λ. None when the
/// chosen level leaves some cell without positive density.
pub fn hydrostatic_density(eos: &EquationOfState, phi: &[f64], lambda: f64) -> Option<Vec<f64>> {
    phi.iter().map(|p| eos.density_from_enthalpy(lambda - p)).collect()
}

pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (u, w) in y.iter_mut().zip(x) {
        *u += a * w;
    }
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
