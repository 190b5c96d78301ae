//! Grönwall envelope for upwind transport:
//! ρ_min(0)·exp(−∫κ⁺) ≤ ρ_i^vol(t) ≤ ρ_max(0)·exp(∫κ⁻), with
//! κ^± = max_i (DIV Φ)_i^±/|K_i|.

use crate::dec_ops::Dec;
use crate::dynamics::{rk4_step, volume_flux, DynError, SchemeConfig, State};
use serde::{Deserialize, Serialize};

/// (κ⁺, κ⁻) for the velocity v.
pub fn kappa(dec: &Dec, v: &[f64]) -> (f64, f64) {
    let d = dec.div(&volume_flux(dec, v));
    let mut kp: f64 = 0.0;
    let mut km: f64 = 0.0;
    for (x, k) in d.iter().zip(&dec.mesh.cell_volume) {
        kp = kp.max(x.max(0.0) / k);
        km = km.max((-x).max(0.0) / k);
    }
    (kp, km)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub t: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub samples: Vec<EnvelopeSample>,
    pub vacuum: Option<String>,
    /// Every step satisfies lower ≤ ρ_min and ρ_max ≤ upper (relative
    /// slack `tol`).
    pub envelope_holds: bool,
    /// min/max of ρ^vol never expand (meaningful for solenoidal fields).
    pub max_principle_holds: bool,
    pub tol: f64,
}

/// RK4 run recording the envelope with ∫κ^± accumulated from the largest
/// stage value in each step.
pub fn positivity_run(dec: &Dec, state: &State, cfg: &SchemeConfig, dt: f64, steps: usize, tol: f64) -> PositivityReport {
    let c = &dec.mesh;
    let nf = c.n_faces;
    let minmax = |s: &State| {
        let rv = s.rho_vol(c);
        (rv.iter().copied().fold(f64::INFINITY, f64::min), rv.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };
    let (m0, x0) = minmax(state);
    let mut samples = vec![EnvelopeSample { t: state.t, rho_min: m0, rho_max: x0, lower: m0, upper: x0 }];
    let (mut ip, mut im) = (0.0, 0.0);
    let mut s = state.clone();
    let mut vacuum = None;
    let mut envelope = true;
    let mut maxp = true;
    let (mut pmin, mut pmax) = (m0, x0);
    let mut f = crate::dynamics::integrate_rhs(dec, cfg);
    for _ in 0..steps {
        let y = s.flat();
        let (out, stages) = match rk4_step(&mut f, s.t, &y, dt) {
            Ok(r) => r,
            Err(e) => {
                vacuum = Some(e.to_string());
                break;
            }
        };
        let (mut kp, mut km) = (0.0f64, 0.0f64);
        for st in &stages {
            let (a, b) = kappa(dec, &st[..nf]);
            kp = kp.max(a);
            km = km.max(b);
        }
        ip += kp * dt;
        im += km * dt;
        s = State::from_flat(&out, nf, s.t + dt);
        if let Some(i) = s.admissible() {
            vacuum = Some(DynError::VacuumEvent { t: s.t, cell: i, mass: s.rho[i], snapshot: Box::new(s.clone()) }.to_string());
            break;
        }
        let (mn, mx) = minmax(&s);
        let lower = m0 * (-ip).exp();
        let upper = x0 * im.exp();
        envelope &= mn >= lower * (1.0 - tol) && mx <= upper * (1.0 + tol);
        maxp &= mn >= pmin * (1.0 - tol) && mx <= pmax * (1.0 + tol);
        pmin = pmin.min(mn);
        pmax = pmax.max(mx);
        samples.push(EnvelopeSample { t: s.t, rho_min: mn, rho_max: mx, lower, upper });
    }
    PositivityReport { samples, vacuum, envelope_holds: envelope, max_principle_holds: maxp, tol }
}
