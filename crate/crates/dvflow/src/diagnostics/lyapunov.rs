//! Energy-Casimir checks at DW equilibria in the coordinates (v, ρ^vol).

use crate::dec_ops::Dec;
use crate::dynamics::{rhs, DensityMassMatrix, DynError, Scheme, SchemeConfig, State};
use crate::geom;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub const EQUILIBRIUM_TOL: f64 = 1e-9;
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LyapunovError {
    #[error("not an equilibrium: |RHS| = {0:e}")]
    NotAnEquilibrium(f64),
    #[error("the Lyapunov check applies to the DW scheme")]
    WrongScheme,
    #[error(transparent)]
    Dyn(#[from] DynError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquilibriumClass {
    Hydrostatic,
    ConstantFlow { u: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    pub rhs_norm: f64,
    /// Smallest eigenvalue on the complement of ker P (the admissible
    /// velocity space) joined with the density block.
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue of the full assembled H̃.
    pub min_eigenvalue_full: f64,
    pub kernel_dim: usize,
    pub bridge_residual: f64,
    /// (FD step, bridge residual) for successively halved steps.
    pub bridge_decay: Vec<(f64, f64)>,
}

/// ā^x_j = (t̂_j·ê_x)|e_j*|.
pub fn killing_cochain(dec: &Dec) -> Vec<f64> {
    dec.mesh.dual_edge.iter().map(|e| e[0]).collect()
}

/// P_x = (ā^x)ᵀM1ρ v.
pub fn momentum_x(dec: &Dec, state: &State) -> f64 {
    DensityMassMatrix::new(dec, &state.rho).dot(&killing_cochain(dec), &state.v)
}

/// dP_x/dt = āᵀM1ρ v̇ + Σ_i ρ̇_i (Pā)_i·(Pv)_i, with the magnitude of the terms.
pub fn momentum_x_rate(dec: &Dec, state: &State, cfg: &SchemeConfig) -> Result<(f64, f64), DynError> {
    let a = killing_cochain(dec);
    let r = rhs(dec, state, cfg)?;
    let m = DensityMassMatrix::new(dec, &state.rho);
    let t1 = m.dot(&a, &r.dv);
    let pa = dec.rec.apply(&a);
    let pv = dec.rec.apply(&state.v);
    let mut rate = t1;
    let mut scale = t1.abs();
    for i in 0..dec.mesh.n_cells {
        let t = r.drho[i] * geom::dot(pa[i], pv[i]);
        rate += t;
        scale += t.abs();
    }
    Ok((rate, scale))
}

/// blockdiag(M1ρ(ρ̄), diag(|K_i|c²(ρ̄_i)/ρ̄_i)).
pub fn hessian(dec: &Dec, eq: &State, cfg: &SchemeConfig) -> DMatrix<f64> {
    let c = &dec.mesh;
    let nf = c.n_faces;
    let n = nf + c.n_cells;
    let mv = DensityMassMatrix::new(dec, &eq.rho).dense();
    let mut h = DMatrix::zeros(n, n);
    h.view_mut((0, 0), (nf, nf)).copy_from(&mv);
    for i in 0..c.n_cells {
        let r = eq.rho[i] / c.cell_volume[i];
        h[(nf + i, nf + i)] = c.cell_volume[i] * cfg.eos.sound_speed_sq_unchecked(r) / r;
    }
    h
}

fn flat_rates(dec: &Dec, x: &[f64], cfg: &SchemeConfig) -> Result<Vec<f64>, DynError> {
    let c = &dec.mesh;
    let nf = c.n_faces;
    let s = State::from_volumetric(c, x[..nf].to_vec(), &x[nf..]);
    let r = rhs(dec, &s, cfg)?;
    let mut out = r.dv;
    out.extend(r.drho.iter().zip(&c.cell_volume).map(|(d, k)| d / k));
    Ok(out)
}

/// Central-difference Jacobian of (v̇, ρ̇^vol) with step s·(1 + |x_k|).
pub fn fd_jacobian(dec: &Dec, eq: &State, cfg: &SchemeConfig, s: f64) -> Result<DMatrix<f64>, DynError> {
    let c = &dec.mesh;
    let mut x = eq.v.clone();
    x.extend(eq.rho_vol(c));
    let n = x.len();
    let mut a = DMatrix::zeros(n, n);
    for k in 0..n {
        let hk = s * (1.0 + x[k].abs());
        let mut xp = x.clone();
        xp[k] += hk;
        let mut xm = x.clone();
        xm[k] -= hk;
        let fp = flat_rates(dec, &xp, cfg)?;
        let fm = flat_rates(dec, &xm, cfg)?;
        for r in 0..n {
            a[(r, k)] = (fp[r] - fm[r]) / (2.0 * hk);
        }
    }
    Ok(a)
}

pub fn bridge_residual(a: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    let b = a.transpose() * h + h * a;
    b.norm() / (a.norm() * h.norm())
}

/// Energy-Casimir verification at a DW equilibrium.
pub fn lyapunov_check(dec: &Dec, eq: &State, cfg: &SchemeConfig, _class: EquilibriumClass) -> Result<HessianReport, LyapunovError> {
    if cfg.scheme != Scheme::Dw {
        return Err(LyapunovError::WrongScheme);
    }
    let c = &dec.mesh;
    let nf = c.n_faces;
    let r = rhs(dec, eq, cfg)?;
    let rhs_norm = r.dv.iter().chain(&r.drho).fold(0.0f64, |m, x| m.max(x.abs()));
    if !(rhs_norm <= EQUILIBRIUM_TOL) {
        return Err(LyapunovError::NotAnEquilibrium(rhs_norm));
    }
    let h = hessian(dec, eq, cfg);
    let min_eigenvalue_full = h.clone().symmetric_eigen().eigenvalues.min();
    // Orthonormal basis of the complement of ker P.
    let ptp = DensityMassMatrix::new(dec, &c.cell_volume).dense();
    let eig = ptp.symmetric_eigen();
    let cut = 1e-10 * eig.eigenvalues.amax();
    let keep: Vec<usize> = (0..nf).filter(|&k| eig.eigenvalues[k] > cut).collect();
    let kernel_dim = nf - keep.len();
    let z = DMatrix::from_columns(&keep.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect::<Vec<DVector<f64>>>());
    let hv = h.view((0, 0), (nf, nf)).into_owned();
    let vmin = (z.transpose() * hv * &z).symmetric_eigen().eigenvalues.min();
    let dmin = (nf..h.nrows()).map(|k| h[(k, k)]).fold(f64::INFINITY, f64::min);
    let a = fd_jacobian(dec, eq, cfg, FD_STEP)?;
    let bridge = bridge_residual(&a, &h);
    let mut decay = Vec::new();
    let mut s = 1e-2;
    for _ in 0..3 {
        decay.push((s, bridge_residual(&fd_jacobian(dec, eq, cfg, s)?, &h)));
        s *= 0.5;
    }
    Ok(HessianReport {
        rhs_norm,
        min_eigenvalue: vmin.min(dmin),
        min_eigenvalue_full,
        kernel_dim,
        bridge_residual: bridge,
        bridge_decay: decay,
    })
}
