//! Conserved and balanced quantities of the two schemes.

mod energy;
mod kelvin;
mod lowmach;
mod lyapunov;
mod positivity;
mod pv;
mod report;
mod witness;

pub use energy::{
    energy, energy_rate, energy_residual, energy_residual_face_form, energy_residual_faces, kinetic_density,
    kinetic_rate_df, Energies,
};
pub use kelvin::{
    boundary_norm, boundary_of, chain_rate, circulation_rate, kelvin, straight_loop, ChainState, KelvinError,
    KelvinSample, CYCLE_TOL,
};
pub use lowmach::{density_deviation, fluctuation_energy, fluctuation_energy_rate, FluctuationEnergy};
pub use lyapunov::{
    bridge_residual, fd_jacobian, hessian, killing_cochain, lyapunov_check, momentum_x, momentum_x_rate,
    EquilibriumClass, HessianReport, LyapunovError, EQUILIBRIUM_TOL, FD_STEP,
};
pub use positivity::{kappa, positivity_run, EnvelopeSample, PositivityReport};
pub use pv::{dualface_cells, ertel_balance, mass_weighted_pv, mwpv_balance, potential_vorticity, ErtelBalance, PvBalance};
pub use report::{invariant_report, InvariantReport, ReportContext, CSV_HEADER};
pub use witness::{nogo_witness, nogo_witness_doubling, required_face_density, WitnessReport, DEGENERATE_TOL};
