//! Polytropic barotropic thermodynamics with optional Mach scaling
//! p = M⁻²·κρ^γ.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("nonpositive density {0}")]
    NonpositiveDensity(f64),
    #[error("no vacuum bound provable: {0}")]
    Infeasible(String),
    #[error("invalid equation of state: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationOfState {
    pub kappa: f64,
    pub gamma: f64,
    /// Reference density where e vanishes. Zero drops both integration
    /// constants, giving e = κρ^{γ-1}/(γ-1) and h = κγρ^{γ-1}/(γ-1).
    pub rho_ref: f64,
    pub mach: Option<f64>,
}

impl EquationOfState {
    pub fn new(kappa: f64, gamma: f64, rho_ref: f64, mach: Option<f64>) -> Result<Self, ThermoError> {
        let eos = EquationOfState { kappa, gamma, rho_ref, mach };
        eos.validate()?;
        Ok(eos)
    }

    pub fn validate(&self) -> Result<(), ThermoError> {
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(ThermoError::InvalidParameter(format!("gamma = {} must exceed 1", self.gamma)));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(ThermoError::InvalidParameter(format!("kappa = {} must be positive", self.kappa)));
        }
        if !(self.rho_ref >= 0.0 && self.rho_ref.is_finite()) {
            return Err(ThermoError::InvalidParameter(format!("rho_ref = {} must be >= 0", self.rho_ref)));
        }
        if let Some(m) = self.mach {
            if !(m > 0.0 && m.is_finite()) {
                return Err(ThermoError::InvalidParameter(format!("mach = {m} must be positive")));
            }
        }
        Ok(())
    }

    /// Pressure prefactor M⁻² (1 without Mach scaling).
    pub fn scale(&self) -> f64 {
        self.mach.map_or(1.0, |m| 1.0 / (m * m))
    }

    /// Same EoS without the Mach factor.
    pub fn unscaled(&self) -> Self {
        EquationOfState { mach: None, ..*self }
    }

    fn sk(&self) -> f64 {
        self.scale() * self.kappa
    }

    fn ref_term(&self) -> f64 {
        if self.rho_ref == 0.0 {
            0.0
        } else {
            self.rho_ref.powf(self.gamma - 1.0)
        }
    }

    fn check(r: f64) -> Result<(), ThermoError> {
        if r > 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(ThermoError::NonpositiveDensity(r))
        }
    }

    pub fn pressure(&self, r: f64) -> Result<f64, ThermoError> {
        Self::check(r)?;
        Ok(self.pressure_unchecked(r))
    }

    pub fn internal_energy(&self, r: f64) -> Result<f64, ThermoError> {
        Self::check(r)?;
        Ok(self.internal_energy_unchecked(r))
    }

    pub fn enthalpy(&self, r: f64) -> Result<f64, ThermoError> {
        Self::check(r)?;
        Ok(self.enthalpy_unchecked(r))
    }

    pub fn sound_speed_sq(&self, r: f64) -> Result<f64, ThermoError> {
        Self::check(r)?;
        Ok(self.sound_speed_sq_unchecked(r))
    }

    #[inline]
    pub fn pressure_unchecked(&self, r: f64) -> f64 {
        self.scale() * (self.kappa * r.powf(self.gamma))
    }

    #[inline]
    pub fn internal_energy_unchecked(&self, r: f64) -> f64 {
        self.sk() / (self.gamma - 1.0) * (r.powf(self.gamma - 1.0) - self.ref_term())
    }

    #[inline]
    pub fn enthalpy_unchecked(&self, r: f64) -> f64 {
        let g = self.gamma;
        self.sk() * (g / (g - 1.0) * r.powf(g - 1.0) - self.ref_term() / (g - 1.0))
    }

    #[inline]
    pub fn sound_speed_sq_unchecked(&self, r: f64) -> f64 {
        self.sk() * self.gamma * r.powf(self.gamma - 1.0)
    }

    /// h(r) − h(r0) without cancellation when r is close to r0.
    pub fn enthalpy_offset(&self, r: f64, r0: f64) -> f64 {
        let g = self.gamma;
        self.sk() * g / (g - 1.0) * r0.powf(g - 1.0) * ((g - 1.0) * ((r - r0) / r0).ln_1p()).exp_m1()
    }

    /// Free energy H(ρ) = ρ·e(ρ).
    pub fn free_energy(&self, r: f64) -> f64 {
        r * self.internal_energy_unchecked(r)
    }

    /// H″(ρ) = c²/ρ.
    pub fn free_energy_dd(&self, r: f64) -> f64 {
        self.sk() * self.gamma * r.powf(self.gamma - 2.0)
    }

    /// Inverse of the enthalpy; None when `h` lies below h(0⁺).
    pub fn density_from_enthalpy(&self, h: f64) -> Option<f64> {
        let g = self.gamma;
        let x = (h / self.sk() + self.ref_term() / (g - 1.0)) * (g - 1.0) / g;
        (x > 0.0).then(|| x.powf(1.0 / (g - 1.0)))
    }

    /// D_H(a‖b) = H(a) − H(b) − h(b)(a − b), evaluated as
    /// sκ/(γ−1)·b^γ·φ(a/b) with φ(x) = x^γ − 1 − γ(x − 1) so no cancellation
    /// occurs near a = b.
    pub fn bregman(&self, a: f64, b: f64) -> Result<f64, ThermoError> {
        Self::check(a)?;
        Self::check(b)?;
        Ok(self.bregman_unchecked(a, b))
    }

    pub fn bregman_unchecked(&self, a: f64, b: f64) -> f64 {
        let g = self.gamma;
        let t = a / b - 1.0;
        let phi = if t.abs() < 1e-3 {
            // Σ_{k≥2} C(γ, k) t^k, truncated after t^7.
            let mut c = 1.0;
            let mut tk = 1.0;
            let mut s = 0.0;
            for k in 1..=7 {
                c *= (g - (k - 1) as f64) / k as f64;
                tk *= t;
                if k >= 2 {
                    s += c * tk;
                }
            }
            s
        } else {
            (1.0 + t).powf(g) - 1.0 - g * t
        };
        (self.sk() / (g - 1.0) * b.powf(g) * phi).max(0.0)
    }

    /// ξ between a and b with H(a) − H(b) − h(b)(a−b) = ½H″(ξ)(a−b)².
    pub fn taylor_point(&self, a: f64, b: f64) -> f64 {
        if a == b || (self.gamma - 2.0).abs() < 1e-15 {
            return 0.5 * (a + b);
        }
        let target = 2.0 * self.bregman_unchecked(a, b) / ((a - b) * (a - b));
        let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
        // H″ is monotone: increasing for γ > 2, decreasing for γ < 2.
        let inc = self.gamma > 2.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let above = self.free_energy_dd(mid) > target;
            if above == inc {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Lower bound on every cell's volumetric density implied by
/// E_int ≤ `e_bound`, total mass `m_total` and the cell volumes.
///
/// Per cell the bound is the root of μ_iε^γ + (1−μ_i)((ρ̄ − μ_iε)/(1−μ_i))^γ = E*
/// on (0, ρ̄], found by bisection; the result is the minimum over cells.
pub fn vacuum_lower_bound(
    e_bound: f64,
    m_total: f64,
    volumes: &[f64],
    eos: &EquationOfState,
) -> Result<f64, ThermoError> {
    eos.validate()?;
    if volumes.len() < 2 {
        return Err(ThermoError::Infeasible("need at least two cells".into()));
    }
    if !(m_total > 0.0) || !e_bound.is_finite() {
        return Err(ThermoError::Infeasible("need finite energy and positive mass".into()));
    }
    let g = eos.gamma;
    let c1 = eos.sk() / (g - 1.0);
    let c2 = eos.sk() * eos.ref_term() / (g - 1.0);
    let v: f64 = volumes.iter().sum();
    let rbar = m_total / v;
    let e_star = (e_bound + c2 * m_total) / (c1 * v);
    let mu_max = volumes.iter().cloned().fold(0.0, f64::max) / v;
    let mu_min = volumes.iter().cloned().fold(f64::INFINITY, f64::min) / v;

    let threshold = |mu: f64| rbar.powf(g) / (1.0 - mu).powf(g - 1.0);
    if e_star >= threshold(mu_max) {
        return Err(ThermoError::Infeasible(format!(
            "E* = {e_star:e} violates the threshold {:e}",
            threshold(mu_max)
        )));
    }
    // g_i(0⁺) grows with μ_i, so the cell that binds is the smallest one.
    if e_star >= threshold(mu_min) {
        return Err(ThermoError::Infeasible(format!(
            "E* = {e_star:e} exceeds the smallest-cell limit {:e}",
            threshold(mu_min)
        )));
    }
    if e_star < rbar.powf(g) * (1.0 - 1e-14) {
        return Err(ThermoError::Infeasible(format!(
            "E* = {e_star:e} lies below the uniform-state minimum {:e}",
            rbar.powf(g)
        )));
    }

    let mut best = f64::INFINITY;
    let mut seen = Vec::new();
    for &k in volumes {
        let mu = k / v;
        if seen.iter().any(|&m: &f64| m == mu) {
            continue;
        }
        seen.push(mu);
        let f = |eps: f64| mu * eps.powf(g) + (1.0 - mu) * ((rbar - mu * eps) / (1.0 - mu)).powf(g);
        let (mut lo, mut hi) = (0.0, rbar);
        if f(hi) > e_star {
            best = best.min(hi);
            continue;
        }
        while hi - lo > 1e-10 * rbar {
            let mid = 0.5 * (lo + hi);
            if f(mid) > e_star {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(lo);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quad() -> EquationOfState {
        EquationOfState::new(1.0, 2.0, 0.0, None).unwrap()
    }

    #[test]
    fn enthalpy_offset_matches_difference_without_cancellation() {
        let e = EquationOfState::new(1.0, 1.4, 0.0, Some(1e-3)).unwrap();
        for r in [0.5, 1.9, 2.0, 2.0 + 1e-9, 3.0] {
            let d = e.enthalpy_unchecked(r) - e.enthalpy_unchecked(2.0);
            let o = e.enthalpy_offset(r, 2.0);
            assert!((o - d).abs() <= 1e-9 * d.abs().max(1.0), "{r}: {o} vs {d}");
        }
        // Near the reference the offset keeps relative accuracy.
        let r = 2.0 + 1e-9;
        let o = e.enthalpy_offset(r, 2.0);
        let lin = e.sound_speed_sq_unchecked(2.0) / 2.0 * (r - 2.0);
        assert!((o / lin - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gamma_two_closed_forms() {
        let e = quad();
        for r in [0.1, 1.0, 2.0, 7.5] {
            assert!((e.enthalpy(r).unwrap() - 2.0 * r).abs() < 1e-14 * r);
            assert!((e.internal_energy(r).unwrap() - r).abs() < 1e-14 * r);
            assert!((e.sound_speed_sq(r).unwrap() - 2.0 * r).abs() < 1e-14 * r);
            for b in [0.3, 1.0, 4.0] {
                assert!((e.bregman(r, b).unwrap() - (r - b).powi(2)).abs() < 1e-12 * (1.0 + (r - b).powi(2)));
            }
        }
    }

    #[test]
    fn reference_density_zeroes_e() {
        let e = EquationOfState::new(1.3, 1.4, 0.8, None).unwrap();
        assert!(e.internal_energy(0.8).unwrap().abs() < 1e-15);
    }

    #[test]
    fn identities_and_fd() {
        let e = EquationOfState::new(1.3, 1.4, 0.8, Some(0.3)).unwrap();
        for r in [0.2, 0.9, 3.0] {
            let p = e.pressure(r).unwrap();
            assert!((e.enthalpy(r).unwrap() - e.internal_energy(r).unwrap() - p / r).abs() < 1e-12 * e.enthalpy(r).unwrap().abs().max(1.0));
            let d = 1e-5;
            let fd = (e.enthalpy(r + d).unwrap() - e.enthalpy(r - d).unwrap()) / (2.0 * d);
            let c2r = e.sound_speed_sq(r).unwrap() / r;
            assert!((fd - c2r).abs() < 1e-8 * c2r.max(1.0), "{fd} vs {c2r}");
            for b in [0.5, 1.7] {
                let fd = (e.bregman(r + d, b).unwrap() - e.bregman(r - d, b).unwrap()) / (2.0 * d);
                let want = e.enthalpy(r).unwrap() - e.enthalpy(b).unwrap();
                assert!((fd - want).abs() < 1e-8 * want.abs().max(1.0));
                let direct = e.free_energy(r) - e.free_energy(b) - e.enthalpy(b).unwrap() * (r - b);
                assert!((e.bregman(r, b).unwrap() - direct).abs() < 1e-10 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EquationOfState::new(1.0, 1.0, 1.0, None).is_err());
        assert!(EquationOfState::new(-1.0, 1.4, 1.0, None).is_err());
        assert!(EquationOfState::new(1.0, 1.4, 1.0, Some(0.0)).is_err());
        assert_eq!(quad().pressure(0.0), Err(ThermoError::NonpositiveDensity(0.0)));
        assert!(quad().bregman(-1.0, 1.0).is_err());
    }

    #[test]
    fn mach_scaling_exact() {
        let e = EquationOfState::new(1.3, 1.4, 0.8, None).unwrap();
        let m = EquationOfState { mach: Some(0.1), ..e };
        for r in [0.3, 1.0, 2.0] {
            assert_eq!(m.pressure(r).unwrap(), m.scale() * e.pressure(r).unwrap());
            assert_eq!(e.pressure(r).unwrap(), 1.3 * r.powf(1.4));
        }
        let one = EquationOfState { mach: Some(1.0), ..e };
        assert_eq!(one.pressure(1.7), e.pressure(1.7));
    }

    #[test]
    fn taylor_point_exact() {
        let e = EquationOfState::new(1.0, 1.4, 1.0, None).unwrap();
        for (a, b) in [(1.2, 1.0), (0.7, 1.0), (1.0 + 1e-4, 1.0)] {
            let xi = e.taylor_point(a, b);
            assert!(xi >= a.min(b) && xi <= a.max(b));
            let lhs = e.bregman(a, b).unwrap();
            let rhs = 0.5 * e.free_energy_dd(xi) * (a - b) * (a - b);
            assert!((lhs - rhs).abs() < 1e-10 * lhs);
        }
    }

    #[test]
    fn vacuum_bound_uniform_near_mean() {
        let e = quad();
        let vols = vec![0.25; 4];
        // Uniform ρ̄ = 2 has E_int = Σ ρ_i e(ρ̄) = 2·2 = 4.
        let r = vacuum_lower_bound(4.0 * (1.0 + 1e-8), 2.0, &vols, &e).unwrap();
        assert!((r - 2.0).abs() < 1e-2, "{r}");
        assert!(matches!(vacuum_lower_bound(1e3, 2.0, &vols, &e), Err(ThermoError::Infeasible(_))));
    }

    /// Brute-force min of min_i ρ_i over {Σμ_iρ_i = ρ̄, Σμ_iρ_i^γ ≤ E*} on
    /// three cells: for each candidate minimal cell and trial value ε, a
    /// zooming grid over how the remaining mass splits gives the smallest
    /// achievable moment; ε is then located by a zooming scan.
    fn grid_oracle(mu: [f64; 3], rbar: f64, e_star: f64, g: f64) -> f64 {
        let min_moment = |k: usize, eps: f64| -> f64 {
            let (j, l) = ((k + 1) % 3, (k + 2) % 3);
            let rest = rbar - mu[k] * eps;
            if rest <= 0.0 {
                return f64::INFINITY;
            }
            let moment = |rj: f64| {
                let rl = (rest - mu[j] * rj) / mu[l];
                mu[k] * eps.powf(g) + mu[j] * rj.powf(g) + mu[l] * rl.max(0.0).powf(g)
            };
            let (mut lo, mut hi) = (0.0, rest / mu[j]);
            let mut best = (f64::INFINITY, 0.0);
            for _ in 0..30 {
                let n = 400;
                for a in 0..=n {
                    let rj = lo + (hi - lo) * a as f64 / n as f64;
                    let m = moment(rj);
                    if m < best.0 {
                        best = (m, rj);
                    }
                }
                let w = 2.0 * (hi - lo) / n as f64;
                lo = (best.1 - w).max(0.0);
                hi = best.1 + w;
            }
            best.0
        };
        let mut out = f64::INFINITY;
        for k in 0..3 {
            let feasible = |eps: f64| min_moment(k, eps) <= e_star;
            let (mut lo, mut hi) = (0.0, rbar);
            for _ in 0..12 {
                let n = 200;
                let mut first = hi;
                for a in 0..=n {
                    let eps = lo + (hi - lo) * a as f64 / n as f64;
                    if feasible(eps) {
                        first = eps;
                        break;
                    }
                }
                let w = (hi - lo) / n as f64;
                lo = (first - w).max(0.0);
                hi = first;
            }
            out = out.min(hi);
        }
        out
    }

    #[test]
    fn vacuum_bound_matches_grid_search() {
        let e = quad();
        let vols = [0.3, 0.45, 0.25];
        let m = 1.5;
        let rbar = m;
        let e_star = 2.6;
        // E* = (E_bound + C2·M)/(C1·V) with C1 = 1, C2 = 0, V = 1.
        let bound = vacuum_lower_bound(e_star, m, &vols, &e).unwrap();
        let oracle = grid_oracle([0.3, 0.45, 0.25], rbar, e_star, 2.0);
        assert!((bound - oracle).abs() < 1e-6, "{bound} vs {oracle}");
    }

    proptest! {
        #[test]
        fn thermo_properties(a in 0.05f64..10.0, b in 0.05f64..10.0, g in 1.05f64..3.0) {
            let e = EquationOfState::new(1.0, g, 1.0, None).unwrap();
            let d = e.bregman(a, b).unwrap();
            prop_assert!(d >= 0.0);
            let hmin = e.free_energy_dd(a).min(e.free_energy_dd(b));
            prop_assert!(d >= 0.5 * hmin * (a - b).powi(2) * (1.0 - 1e-9) - 1e-15);
            prop_assert!(e.enthalpy(a.max(b)).unwrap() >= e.enthalpy(a.min(b)).unwrap());
            prop_assert!(e.free_energy_dd(a) > 0.0);
            prop_assert!(e.internal_energy(a).unwrap() >= -1.0 / (g - 1.0) - 1e-12);
        }
    }
}
