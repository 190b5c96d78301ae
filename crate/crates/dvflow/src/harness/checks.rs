use serde::{Deserialize, Serialize};

/// One asserted invariant: `value` compared against `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when value ≤ tolerance (NaN fails).
    pub fn le(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, passed: value <= tolerance, detail: format!("<= {tolerance:e}") }
    }

    pub fn gt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, tolerance: bound, passed: value > bound, detail: format!("> {bound:e}") }
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, tolerance: bound, passed: value >= bound, detail: format!(">= {bound}") }
    }

    /// |value − target| ≤ tolerance.
    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            passed: (value - target).abs() <= tolerance,
            detail: format!("{target} +- {tolerance}"),
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), value: ok as u8 as f64, tolerance: 1.0, passed: ok, detail: detail.into() }
    }

    /// `order` is None when the fit was refused.
    pub fn order(name: impl Into<String>, order: Option<f64>, target: f64, tolerance: f64) -> Self {
        match order {
            Some(p) => Check::within(name, p, target, tolerance),
            None => Check {
                name: name.into(),
                value: f64::NAN,
                tolerance,
                passed: false,
                detail: format!("{target} +- {tolerance}; fit refused (r^2 < {})", super::R2_MIN),
            },
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: value {:.6e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.detail
        )
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// (command, check, criterion) for every assertion the CLI can make.
pub const CHECK_INVENTORY: &[(&str, &str, &str)] = &[
    ("mesh gen", "mesh_valid", "Delaunay, orthogonal, SPD Gram matrices"),
    ("run", "mass_drift", "relative mass drift <= 1e-12"),
    ("run", "total_vorticity_drift", "|sum CURL v| drift <= 1e-12"),
    ("run", "energy_drift", "relative E_tot drift <= outputs.energy_tol (when set)"),
    ("converge", "velocity_order[nu]", "M1rho-norm order = expected +- tol (default 1 +- 0.3)"),
    ("converge", "density_order[nu]", "sqrt Bregman order = expected +- tol"),
    ("converge", "velocity_order_spread", "max - min over nu <= tol"),
    ("converge", "density_order_spread", "max - min over nu <= tol"),
    ("converge", "acoustic_cfl", "max(|u|+c) dt / h_min <= 0.3 at every level"),
    ("lowmach", "df_re_slope", "slope of max|R_E| vs M = -1 +- 0.3"),
    ("lowmach", "dw_fluctuation_rate", "relative d(E_M)/dt <= 1e-10 at every M"),
    ("lowmach", "dw_fluctuation_drift", "max drift <= 2x drift at the largest M"),
    ("lowmach", "density_deviation_slope", "slope of ||rho - rho_bar|| vs M = 1 +- 0.3"),
    ("nogo", "centred_order", "|R_E| order = 2 +- 0.4"),
    ("nogo", "upwind_order", "|R_E| order = 1 +- 0.4"),
    ("nogo", "witness_fraction", "fraction of non-degenerate faces with v/2v discrepancy >= 0.95"),
    ("positivity", "no_vacuum", "no VacuumEvent over the run"),
    ("positivity", "gronwall_envelope", "envelope holds at every step"),
    ("positivity", "solenoidal_divergence", "kappa of the solenoidal field <= 1e-12"),
    ("positivity", "max_principle", "solenoidal field: min/max do not expand"),
    ("lyapunov", "hydrostatic_rhs", "||RHS|| <= 1e-9"),
    ("lyapunov", "hydrostatic_min_eig", "min eig > 0"),
    ("lyapunov", "hydrostatic_bridge", "bridge residual <= 1e-5"),
    ("lyapunov", "bridge_decay[k]", "log2 ratio under FD-step halving = 2 +- 0.3"),
    ("lyapunov", "constant_flow_rhs[U]", "||RHS|| <= 1e-9"),
    ("lyapunov", "constant_flow_min_eig[U]", "min eig > 0"),
    ("lyapunov", "momentum_rate[U]", "relative dP_x/dt <= 1e-10"),
    ("kelvin", "chain_boundary", "|boundary of the loop chain| <= 1e-10"),
    ("kelvin", "df_drift_order", "DF circulation drift order in dt = 4 +- 0.5 (RK4)"),
    ("kelvin", "dw_defect_order", "DW |dGamma/dt| order in h = 2 +- 0.5"),
];
