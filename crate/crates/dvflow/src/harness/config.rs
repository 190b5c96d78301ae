//! JSON configuration shared by every driver.

use super::HarnessError;
use crate::dec_ops::{de_rham, Dec, Field, Side};
use crate::diagnostics::killing_cochain;
use crate::dynamics::{
    cell_point, hydrostatic_density, Forcing, FluxKind, GeopotentialPreset, Integrator, MmsReference, Scheme,
    SchemeConfig, State, ViscositySpec,
};
use crate::geom::{self, V3};
use crate::mesh::{build_dv_complex, extrude_prismatic, lattice_points_in, warp_points, CellComplex};
use crate::thermo::EquationOfState;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub fn equilateral_extent() -> [f64; 2] {
    [1.0, 0.75f64.sqrt()]
}

/// Triangular lattice with n rows of n points, optionally perturbed and
/// extruded into prisms. The default extent makes the unperturbed lattice
/// equilateral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub n: usize,
    #[serde(default)]
    pub perturbation: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "equilateral_extent")]
    pub extent: [f64; 2],
    /// Smooth displacement amplitude as a fraction of L_x, fixed across n.
    #[serde(default)]
    pub warp: f64,
    /// Layer thicknesses of a periodic prismatic column.
    #[serde(default)]
    pub layers: Option<Vec<f64>>,
}

/// Lipschitz bound of the warp displacement; below 1 the map is injective.
fn warp_lipschitz(warp: f64, extent: [f64; 2]) -> f64 {
    let (kx, ky) = (1.0 / extent[0], 1.0 / extent[1]);
    2.0 * std::f64::consts::PI * (warp * extent[0]).abs() * ((kx + ky).powi(2) + (kx + 2.0 * ky).powi(2)).sqrt()
}

impl MeshSpec {
    pub fn lattice(n: usize) -> Self {
        MeshSpec { n, perturbation: 0.0, seed: 0, extent: equilateral_extent(), warp: 0.0, layers: None }
    }

    pub fn complex(&self) -> Result<CellComplex, HarnessError> {
        if !(0.0..0.3).contains(&self.perturbation) {
            return Err(HarnessError::Config(format!("perturbation {} outside [0, 0.3)", self.perturbation)));
        }
        if self.n < 2 {
            return Err(HarnessError::Config(format!("mesh needs n >= 2, got {}", self.n)));
        }
        if warp_lipschitz(self.warp, self.extent) >= 1.0 {
            return Err(HarnessError::Config(format!("warp {} folds the mesh", self.warp)));
        }
        let mut pts = lattice_points_in(self.n, self.perturbation, self.seed, self.extent);
        if self.warp != 0.0 {
            warp_points(&mut pts, self.warp, self.extent);
        }
        let base = build_dv_complex(&pts, self.extent)?;
        Ok(match &self.layers {
            Some(dz) => extrude_prismatic(&base, dz, true)?,
            None => base,
        })
    }

    pub fn build(&self) -> Result<Dec, HarnessError> {
        Ok(Dec::new(self.complex()?)?)
    }
}

/// Mesh sweep: shared generator settings with one member per n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFamily {
    pub n: Vec<usize>,
    #[serde(default)]
    pub perturbation: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "equilateral_extent")]
    pub extent: [f64; 2],
    #[serde(default)]
    pub warp: f64,
}

impl MeshFamily {
    pub fn case_b(n: &[usize]) -> Self {
        MeshFamily { n: n.to_vec(), perturbation: 0.0, seed: 0, extent: equilateral_extent(), warp: 0.0 }
    }

    pub fn member(&self, n: usize) -> MeshSpec {
        MeshSpec { n, perturbation: self.perturbation, seed: self.seed, extent: self.extent, warp: self.warp, layers: None }
    }
}

/// Time-step rule. `Scaled` ties dt to the mesh, dt = c·h_max; `Cfl` picks
/// dt = cfl·h_min / max(|u| + c_sound) from the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DtPolicy {
    Fixed { dt: f64 },
    Scaled { c: f64 },
    Cfl { cfl: f64 },
}

pub const MAX_ACOUSTIC_CFL: f64 = 0.3;

/// max_i (|Pv|_i + c_sound(ρ_i^vol)).
pub fn max_signal_speed(dec: &Dec, state: &State, eos: &EquationOfState) -> f64 {
    let pv = dec.rec.apply(&state.v);
    (0..dec.mesh.n_cells)
        .map(|i| geom::norm(pv[i]) + eos.sound_speed_sq_unchecked(state.rho[i] / dec.mesh.cell_volume[i]).sqrt())
        .fold(0.0, f64::max)
}

pub fn acoustic_cfl(dec: &Dec, state: &State, eos: &EquationOfState, dt: f64) -> f64 {
    max_signal_speed(dec, state, eos) * dt / dec.mesh.h_min()
}

impl DtPolicy {
    /// Step size and step count covering [0, t_end] exactly.
    pub fn resolve(&self, dec: &Dec, state: &State, eos: &EquationOfState, t_end: f64) -> Result<(f64, usize), HarnessError> {
        let raw = match *self {
            DtPolicy::Fixed { dt } => dt,
            DtPolicy::Scaled { c } => c * dec.mesh.h_max(),
            DtPolicy::Cfl { cfl } => cfl * dec.mesh.h_min() / max_signal_speed(dec, state, eos),
        };
        if !(raw > 0.0 && raw.is_finite()) || !(t_end >= 0.0) {
            return Err(HarnessError::Config(format!("time step {raw:e} over [0, {t_end}] is not usable")));
        }
        let steps = (t_end / raw).ceil().max(1.0) as usize;
        Ok((t_end / steps as f64, steps))
    }
}

/// Initial data. Fields use the torus extent (L_x, L_y); phases are fixed
/// so the data have no lattice symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    Rest { rho: f64 },
    /// v = 0, h(ρ) + Φ = λ.
    Hydrostatic { lambda: f64 },
    /// The MMS reference at t = 0 (needs `mms`).
    Mms,
    /// Solenoidal shear u = (u0 sin(2πy/L_y + 0.4), 0) over a density
    /// varying in x and y.
    Shear { u0: f64, rho_amp: f64 },
    /// Rotational, divergent flow
    /// u = u0 (sin(2πy/L_y + 0.4) + 0.3 sin(2πx/L_x + 0.2), 0.6 sin(2πx/L_x + 1.1) + 0.3 cos(2πy/L_y + 0.9))
    /// with ρ = 1 + a cos(2π(x/L_x + y/L_y) + 0.3).
    Vortical { u0: f64, rho_amp: f64 },
    /// Vortical velocity with ρ = ρ̄ + M·δ cos(2π(x/L_x + y/L_y) + 0.3),
    /// M the EoS Mach number.
    WellPrepared { rho_bar: f64, delta: f64, u0: f64 },
    /// v = GRAD(u0·g), g a periodic bump of width w at `centre`: the flow
    /// converges onto the bump centre.
    Compressive { u0: f64, width: f64, rho: f64, centre: [f64; 2] },
    /// v = U·ā^x over uniform density.
    ConstantFlow { u: f64, rho: f64 },
}

fn shear_velocity(x: V3, c: &CellComplex, u0: f64) -> V3 {
    [u0 * (2.0 * PI * x[1] / c.torus_extent[1] + 0.4).sin(), 0.0, 0.0]
}

fn vortical_velocity(x: V3, c: &CellComplex, u0: f64) -> V3 {
    let [lx, ly] = [c.torus_extent[0], c.torus_extent[1]];
    let (sx, sy) = (2.0 * PI * x[0] / lx, 2.0 * PI * x[1] / ly);
    [
        u0 * ((sy + 0.4).sin() + 0.3 * (sx + 0.2).sin()),
        u0 * (0.6 * (sx + 1.1).sin() + 0.3 * (sy + 0.9).cos()),
        0.0,
    ]
}

fn wave(x: V3, c: &CellComplex) -> f64 {
    (2.0 * PI * (x[0] / c.torus_extent[0] + x[1] / c.torus_extent[1]) + 0.3).cos()
}

fn circulations(c: &CellComplex, u: &dyn Fn(V3) -> V3) -> Result<Vec<f64>, HarnessError> {
    Ok(de_rham(&Field::Vector(u), c, 1, Side::Dual)?.values)
}

fn masses(c: &CellComplex, r: &dyn Fn(V3) -> f64) -> Result<Vec<f64>, HarnessError> {
    Ok(de_rham(&Field::Scalar(r), c, c.dimension, Side::Primal)?.values)
}

/// Periodic bump exp((cos 2π(x−x0)/L_x + cos 2π(y−y0)/L_y − 2)/w²).
pub fn bump(x: V3, c: &CellComplex, centre: [f64; 2], width: f64) -> f64 {
    let a = (2.0 * PI * (x[0] - centre[0]) / c.torus_extent[0]).cos();
    let b = (2.0 * PI * (x[1] - centre[1]) / c.torus_extent[1]).cos();
    ((a + b - 2.0) / (width * width)).exp()
}

impl InitialCondition {
    pub fn build(&self, dec: &Dec, cfg: &SchemeConfig, mms: Option<&MmsReference>) -> Result<State, HarnessError> {
        let c = &dec.mesh;
        let nf = c.n_faces;
        let state = match *self {
            InitialCondition::Rest { rho } => State::from_volumetric(c, vec![0.0; nf], &vec![rho; c.n_cells]),
            InitialCondition::Hydrostatic { lambda } => {
                let rv = hydrostatic_density(&cfg.eos, &cfg.geopotential, lambda)
                    .ok_or_else(|| HarnessError::Config(format!("level {lambda} leaves a cell without density")))?;
                State::from_volumetric(c, vec![0.0; nf], &rv)
            }
            InitialCondition::Mms => {
                let m = mms.ok_or_else(|| HarnessError::Config("initial kind mms needs an mms reference".into()))?;
                m.state(dec, 0.0)
            }
            InitialCondition::Shear { u0, rho_amp } => {
                let ly = c.torus_extent[1];
                let lx = c.torus_extent[0];
                let r = |x: V3| {
                    1.0 + rho_amp * (2.0 * PI * x[1] / ly).cos()
                        + 0.5 * rho_amp * (2.0 * PI * (x[0] / lx + 2.0 * x[1] / ly) + 0.7).sin()
                };
                State::new(circulations(c, &|x| shear_velocity(x, c, u0))?, masses(c, &r)?)
            }
            InitialCondition::Vortical { u0, rho_amp } => State::new(
                circulations(c, &|x| vortical_velocity(x, c, u0))?,
                masses(c, &|x| 1.0 + rho_amp * wave(x, c))?,
            ),
            InitialCondition::WellPrepared { rho_bar, delta, u0 } => {
                let m = cfg.eos.mach.unwrap_or(1.0);
                State::new(
                    circulations(c, &|x| vortical_velocity(x, c, u0))?,
                    masses(c, &|x| rho_bar + m * delta * wave(x, c))?,
                )
            }
            InitialCondition::Compressive { u0, width, rho, centre } => {
                let g: Vec<f64> = (0..c.n_cells).map(|i| u0 * bump(cell_point(c, i), c, centre, width)).collect();
                State::from_volumetric(c, dec.grad(&g), &vec![rho; c.n_cells])
            }
            InitialCondition::ConstantFlow { u, rho } => {
                let a = killing_cochain(dec);
                State::from_volumetric(c, a.iter().map(|x| u * x).collect(), &vec![rho; c.n_cells])
            }
        };
        if let Some(i) = state.admissible() {
            return Err(HarnessError::Config(format!("initial density is not positive in cell {i}")));
        }
        Ok(state)
    }
}

fn default_every() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Invariant row cadence in steps.
    #[serde(default = "default_every")]
    pub every: usize,
    /// Record Γ on the loop y = loop_offset·L_y.
    #[serde(default)]
    pub loop_offset: Option<f64>,
    /// Record ℰ_M about this reference density.
    #[serde(default)]
    pub rho_bar: Option<f64>,
    #[serde(default)]
    pub momentum: bool,
    /// Assert relative E_tot drift below this value.
    #[serde(default)]
    pub energy_tol: Option<f64>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { every: 1, loop_offset: None, rho_bar: None, momentum: false, energy_tol: None }
    }
}

pub(crate) fn default_flux() -> FluxKind {
    FluxKind::Centred
}

pub(crate) fn default_integrator() -> Integrator {
    Integrator::Rk4
}

/// Single time-dependent run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    pub scheme: Scheme,
    /// Ignored for DW, which always uses the conjugate flux.
    #[serde(default = "default_flux")]
    pub flux: FluxKind,
    #[serde(default)]
    pub viscosity: ViscositySpec,
    pub eos: EquationOfState,
    #[serde(default)]
    pub geopotential: GeopotentialPreset,
    pub dt: DtPolicy,
    pub t_end: f64,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    /// Manufactured reference; adds its forcing to the right-hand side.
    #[serde(default)]
    pub mms: Option<MmsReference>,
    pub initial: InitialCondition,
    #[serde(default)]
    pub bernoulli_shift: Option<f64>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl RunConfig {
    pub fn scheme_config(&self, dec: &Dec) -> Result<SchemeConfig, HarnessError> {
        let c = &dec.mesh;
        let mut cfg = SchemeConfig::new(self.scheme, self.flux, self.eos, c);
        cfg.viscosity = self.viscosity.clone();
        cfg.geopotential = self.geopotential.sample(c);
        cfg.forcing = self.mms.map(Forcing::Mms);
        cfg.bernoulli_shift = self.bernoulli_shift;
        cfg.validate(c)?;
        Ok(cfg)
    }
}
