//! Manufactured reference: an irrotational travelling velocity
//! u = A(cos(k_x x + αt), cos(k_y y + αt), 0) with potential ψ, and density
//! ρ_c = ρ₀ + ε sin(k_x x + k_y y − βt). Since u = ∇ψ the momentum residual
//! is the gradient of χ = ∂_tψ + ½|u|² + h(ρ_c) + Φ − ν_dil div u, so its
//! de Rham image is GRAD applied to χ at the cell points.

use super::{cell_point, DynError, Rates, SchemeConfig, State};
use crate::dec_ops::{de_rham, Dec, Field, Side};
use crate::geom::V3;
use crate::mesh::CellComplex;
use crate::thermo::EquationOfState;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsReference {
    pub amplitude: f64,
    pub alpha: f64,
    pub rho0: f64,
    pub epsilon: f64,
    pub beta: f64,
    /// Torus extent (L_x, L_y).
    pub extent: [f64; 2],
}

impl Default for MmsReference {
    fn default() -> Self {
        MmsReference { amplitude: 0.2, alpha: 2.0 * PI, rho0: 1.0, epsilon: 0.1, beta: 2.0 * PI, extent: [1.0, 1.0] }
    }
}

impl MmsReference {
    fn k(&self) -> [f64; 2] {
        [2.0 * PI / self.extent[0], 2.0 * PI / self.extent[1]]
    }

    pub fn potential(&self, x: V3, t: f64) -> f64 {
        let [kx, ky] = self.k();
        self.amplitude * ((kx * x[0] + self.alpha * t).sin() / kx + (ky * x[1] + self.alpha * t).sin() / ky)
    }

    pub fn potential_dt(&self, x: V3, t: f64) -> f64 {
        let [kx, ky] = self.k();
        self.amplitude * self.alpha * ((kx * x[0] + self.alpha * t).cos() / kx + (ky * x[1] + self.alpha * t).cos() / ky)
    }

    pub fn velocity(&self, x: V3, t: f64) -> V3 {
        let [kx, ky] = self.k();
        [self.amplitude * (kx * x[0] + self.alpha * t).cos(), self.amplitude * (ky * x[1] + self.alpha * t).cos(), 0.0]
    }

    pub fn velocity_dt(&self, x: V3, t: f64) -> V3 {
        let [kx, ky] = self.k();
        let a = -self.amplitude * self.alpha;
        [a * (kx * x[0] + self.alpha * t).sin(), a * (ky * x[1] + self.alpha * t).sin(), 0.0]
    }

    pub fn divergence(&self, x: V3, t: f64) -> f64 {
        let [kx, ky] = self.k();
        -self.amplitude * (kx * (kx * x[0] + self.alpha * t).sin() + ky * (ky * x[1] + self.alpha * t).sin())
    }

    fn theta(&self, x: V3, t: f64) -> f64 {
        let [kx, ky] = self.k();
        kx * x[0] + ky * x[1] - self.beta * t
    }

    pub fn density(&self, x: V3, t: f64) -> f64 {
        self.rho0 + self.epsilon * self.theta(x, t).sin()
    }

    pub fn density_dt(&self, x: V3, t: f64) -> f64 {
        -self.beta * self.epsilon * self.theta(x, t).cos()
    }

    pub fn density_grad(&self, x: V3, t: f64) -> V3 {
        let [kx, ky] = self.k();
        let c = self.epsilon * self.theta(x, t).cos();
        [kx * c, ky * c, 0.0]
    }

    /// ∂_tρ + div(ρu).
    pub fn mass_residual(&self, x: V3, t: f64) -> f64 {
        let u = self.velocity(x, t);
        let g = self.density_grad(x, t);
        self.density_dt(x, t) + u[0] * g[0] + u[1] * g[1] + self.density(x, t) * self.divergence(x, t)
    }

    /// Momentum residual potential χ (without Φ).
    pub fn chi(&self, x: V3, t: f64, eos: &EquationOfState, nu_dil: f64) -> f64 {
        let u = self.velocity(x, t);
        self.potential_dt(x, t) + 0.5 * (u[0] * u[0] + u[1] * u[1]) + eos.enthalpy_unchecked(self.density(x, t))
            - nu_dil * self.divergence(x, t)
    }

    /// De Rham interpolant: circulations GRAD ψ (exact line integrals of
    /// ∇ψ) and cell masses.
    pub fn state(&self, dec: &Dec, t: f64) -> State {
        let c = &dec.mesh;
        let psi: Vec<f64> = (0..c.n_cells).map(|i| self.potential(cell_point(c, i), t)).collect();
        let rho = self.cell_integral(c, &|x| self.density(x, t));
        State { v: dec.grad(&psi), rho, t }
    }

    /// Time derivative of the interpolant.
    pub fn state_dt(&self, dec: &Dec, t: f64) -> Rates {
        let c = &dec.mesh;
        let psi: Vec<f64> = (0..c.n_cells).map(|i| self.potential_dt(cell_point(c, i), t)).collect();
        Rates { dv: dec.grad(&psi), drho: self.cell_integral(c, &|x| self.density_dt(x, t)) }
    }

    fn cell_integral(&self, c: &CellComplex, f: &dyn Fn(V3) -> f64) -> Vec<f64> {
        de_rham(&Field::Scalar(f), c, c.dimension, Side::Primal).expect("primal top degree").values
    }

    /// De Rham image of the continuum residual.
    pub fn forcing(&self, dec: &Dec, cfg: &SchemeConfig, t: f64) -> Result<Rates, DynError> {
        let c = &dec.mesh;
        let nu_dil = cfg.viscosity.dilatational();
        let chi: Vec<f64> =
            (0..c.n_cells).map(|i| self.chi(cell_point(c, i), t, &cfg.eos, nu_dil) + cfg.geopotential[i]).collect();
        Ok(Rates { dv: dec.grad(&chi), drho: self.cell_integral(c, &|x| self.mass_residual(x, t)) })
    }

    /// Forcing under which the interpolant is an exact semi-discrete solution.
    pub fn discrete_forcing(&self, dec: &Dec, cfg: &SchemeConfig, t: f64) -> Result<Rates, DynError> {
        let s = self.state(dec, t);
        let r = super::rhs_unforced(dec, &s, cfg)?;
        let mut out = self.state_dt(dec, t);
        super::axpy(&mut out.dv, -1.0, &r.dv);
        super::axpy(&mut out.drho, -1.0, &r.drho);
        Ok(out)
    }
}
