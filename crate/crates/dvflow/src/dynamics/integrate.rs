use super::{rhs, DynError, SchemeConfig, State};
use crate::dec_ops::Dec;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Rk4,
    ImplicitMidpoint,
}

pub const PICARD_TOL: f64 = 1e-12;
pub const PICARD_MAX_ITER: usize = 50;

/// Classical RK4 on a flat vector. Returns the new vector and the four
/// stage arguments.
pub fn rk4_step<E>(
    f: &mut dyn FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
    t: f64,
    y: &[f64],
    dt: f64,
) -> Result<(Vec<f64>, [Vec<f64>; 4]), E> {
    let shifted = |k: &[f64], a: f64| -> Vec<f64> { y.iter().zip(k).map(|(u, w)| u + a * w).collect() };
    let y1 = y.to_vec();
    let k1 = f(t, &y1)?;
    let y2 = shifted(&k1, 0.5 * dt);
    let k2 = f(t + 0.5 * dt, &y2)?;
    let y3 = shifted(&k2, 0.5 * dt);
    let k3 = f(t + 0.5 * dt, &y3)?;
    let y4 = shifted(&k3, dt);
    let k4 = f(t + dt, &y4)?;
    let out = (0..y.len()).map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    Ok((out, [y1, y2, y3, y4]))
}

/// Implicit midpoint y' = y + dt·f(t + dt/2, (y + y')/2) by Picard
/// iteration, converged when the weighted norm of the update falls below
/// PICARD_TOL relative to the state. Returns the new vector and the
/// midpoint.
pub fn midpoint_step<E: From<DynError>>(
    f: &mut dyn FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
    t: f64,
    y: &[f64],
    dt: f64,
    weights: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), E> {
    let wnorm = |x: &[f64]| x.iter().zip(weights).map(|(a, w)| w * a * a).sum::<f64>().sqrt();
    let scale = wnorm(y).max(f64::MIN_POSITIVE);
    let mut mid = y.to_vec();
    let mut next = y.to_vec();
    let mut res = f64::INFINITY;
    for _ in 0..PICARD_MAX_ITER {
        let k = f(t + 0.5 * dt, &mid)?;
        let cand: Vec<f64> = y.iter().zip(&k).map(|(a, b)| a + dt * b).collect();
        let diff: Vec<f64> = cand.iter().zip(&next).map(|(a, b)| a - b).collect();
        res = wnorm(&diff) / scale;
        next = cand;
        mid = y.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        if res <= PICARD_TOL {
            return Ok((next, mid));
        }
    }
    Err(DynError::PicardNonconvergence { residual: res, iterations: PICARD_MAX_ITER }.into())
}

/// Norm weights for (v, ρ): M1 on velocity, 1/|K| on masses.
pub fn state_weights(dec: &Dec) -> Vec<f64> {
    let mut w = dec.stars.m1.clone();
    w.extend(dec.mesh.cell_volume.iter().map(|k| 1.0 / k));
    w
}

/// Flat right-hand side over (v, ρ), refusing inadmissible states.
pub fn integrate_rhs<'a>(
    dec: &'a Dec,
    cfg: &'a SchemeConfig,
) -> impl FnMut(f64, &[f64]) -> Result<Vec<f64>, DynError> + 'a {
    let nf = dec.mesh.n_faces;
    move |t, y| {
        let s = State::from_flat(y, nf, t);
        if let Some(i) = s.admissible() {
            return Err(DynError::VacuumEvent { t, cell: i, mass: s.rho[i], snapshot: Box::new(s) });
        }
        let r = rhs(dec, &s, cfg)?;
        let mut out = r.dv;
        out.extend(r.drho);
        Ok(out)
    }
}

/// Advance one step; any nonpositive mass afterwards aborts with the state
/// as snapshot.
pub fn step(dec: &Dec, state: &State, cfg: &SchemeConfig, dt: f64, method: Integrator) -> Result<State, DynError> {
    if !(dt > 0.0) {
        return Err(DynError::InvalidConfig(format!("dt = {dt} must be positive")));
    }
    let nf = dec.mesh.n_faces;
    let y = state.flat();
    let mut f = integrate_rhs(dec, cfg);
    let out = match method {
        Integrator::Rk4 => rk4_step(&mut f, state.t, &y, dt)?.0,
        Integrator::ImplicitMidpoint => midpoint_step(&mut f, state.t, &y, dt, &state_weights(dec))?.0,
    };
    let next = State::from_flat(&out, nf, state.t + dt);
    if let Some(i) = next.admissible() {
        return Err(DynError::VacuumEvent { t: next.t, cell: i, mass: next.rho[i], snapshot: Box::new(next) });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::super::{hydrostatic_density, FluxKind, GeopotentialPreset, Scheme};
    use super::*;
    use crate::geom;
    use crate::mesh::{build_dv_complex, lattice_points};
    use crate::thermo::EquationOfState;
    use std::f64::consts::PI;

    fn setup(scheme: Scheme) -> (Dec, SchemeConfig, State) {
        let dec = Dec::new(build_dv_complex(&lattice_points(8, 0.15, 5), [1.0, 1.0]).unwrap()).unwrap();
        let cfg = SchemeConfig::new(scheme, FluxKind::Centred, EquationOfState::new(1.0, 2.0, 0.0, None).unwrap(), &dec.mesh);
        let c = &dec.mesh;
        let v = (0..c.n_faces)
            .map(|j| {
                let x = c.dual_edge_midpoint(j);
                let u = [0.3 * (2.0 * PI * x[1]).sin(), 0.2 * (2.0 * PI * x[0]).cos(), 0.0];
                geom::dot(u, c.dual_edge[j])
            })
            .collect();
        let rv: Vec<f64> = c.circumcentre.iter().map(|x| 1.0 + 0.1 * (2.0 * PI * (x[0] + x[1])).sin()).collect();
        let s = State::from_volumetric(c, v, &rv);
        (dec, cfg, s)
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        for method in [Integrator::Rk4, Integrator::ImplicitMidpoint] {
            let (dec, mut cfg, _) = setup(Scheme::Dw);
            cfg.geopotential = GeopotentialPreset::PeriodicWell { g: 0.4 }.sample(&dec.mesh);
            let rv = hydrostatic_density(&cfg.eos, &cfg.geopotential, 3.0).unwrap();
            let s = State::from_volumetric(&dec.mesh, vec![0.0; dec.mesh.n_faces], &rv);
            let n = step(&dec, &s, &cfg, 0.01, method).unwrap();
            for (a, b) in s.rho.iter().zip(&n.rho) {
                assert!((a - b).abs() <= 1e-13 * a);
            }
            assert!(n.v.iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn mass_preserved_per_step() {
        for scheme in [Scheme::Df, Scheme::Dw] {
            for method in [Integrator::Rk4, Integrator::ImplicitMidpoint] {
                let (dec, cfg, s) = setup(scheme);
                let n = step(&dec, &s, &cfg, 0.005, method).unwrap();
                assert!((n.mass() - s.mass()).abs() <= 1e-13 * s.mass());
            }
        }
    }

    #[test]
    fn rk4_self_convergence_order_four() {
        let (dec, cfg, s0) = setup(Scheme::Df);
        let t_end = 0.2;
        let run = |n: usize| {
            let mut s = s0.clone();
            for _ in 0..n {
                s = step(&dec, &s, &cfg, t_end / n as f64, Integrator::Rk4).unwrap();
            }
            s
        };
        let runs: Vec<State> = [10, 20, 40, 80].iter().map(|&n| run(n)).collect();
        let diff = |a: &State, b: &State| {
            let dv: Vec<f64> = a.v.iter().zip(&b.v).map(|(x, y)| x - y).collect();
            dec.m1_dot(&dv, &dv).sqrt()
        };
        let e: Vec<f64> = (0..3).map(|k| diff(&runs[k], &runs[k + 1])).collect();
        println!("{e:?}");
        let order = (e[1] / e[2]).log2();
        assert!((order - 4.0).abs() <= 0.3, "order {order}");
    }

    #[test]
    fn deterministic() {
        let (dec, cfg, s) = setup(Scheme::Dw);
        let a = step(&dec, &s, &cfg, 0.01, Integrator::ImplicitMidpoint).unwrap();
        let b = step(&dec, &s, &cfg, 0.01, Integrator::ImplicitMidpoint).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vacuum_aborts() {
        let (dec, cfg, mut s) = setup(Scheme::Df);
        s.rho[0] = -1.0;
        assert!(matches!(step(&dec, &s, &cfg, 0.01, Integrator::Rk4), Err(DynError::VacuumEvent { cell: 0, .. })));
        assert!(step(&dec, &s, &cfg, 0.0, Integrator::Rk4).is_err());
    }
}
