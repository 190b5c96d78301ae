//! M1ρ = Pᵀ diag(ρ_i I) P and its solve.

use crate::dec_ops::Dec;
use crate::sparse;

/// Unknown count below which the solve factors a dense copy.
pub const DENSE_LIMIT: usize = 500;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("M1rho solve stalled at relative residual {residual:e} after {iterations} iterations")]
pub struct SolverDivergence {
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct DensityMassMatrix<'a> {
    pub dec: &'a Dec,
    /// Cell masses ρ_i.
    pub rho: Vec<f64>,
    pub diag: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl<'a> DensityMassMatrix<'a> {
    pub fn new(dec: &'a Dec, rho: &[f64]) -> Self {
        let mut diag = vec![0.0; dec.mesh.n_faces];
        for (r, c, x) in sparse::triplets(&dec.rec.p) {
            diag[c] += rho[r / 3] * x * x;
        }
        DensityMassMatrix { dec, rho: rho.to_vec(), diag, tol: 1e-12, max_iter: 10_000 }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut u = self.dec.rec.apply_flat(x);
        for (k, val) in u.iter_mut().enumerate() {
            *val *= self.rho[k / 3];
        }
        sparse::mul_t(&self.dec.rec.p, &u)
    }

    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let pa = self.dec.rec.apply_flat(a);
        let pb = self.dec.rec.apply_flat(b);
        pa.iter().zip(&pb).enumerate().map(|(k, (x, y))| self.rho[k / 3] * x * y).sum()
    }

    pub fn dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dec.mesh.n_faces;
        let mut m = nalgebra::DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for k in 0..n {
            e[k] = 1.0;
            for (j, x) in self.apply(&e).into_iter().enumerate() {
                m[(j, k)] = x;
            }
            e[k] = 0.0;
        }
        m
    }

    /// Smallest eigenvalue of the assembled matrix (small meshes only).
    pub fn min_eigenvalue(&self) -> f64 {
        self.dense().symmetric_eigen().eigenvalues.min()
    }

    /// Solve M1ρ x = b by PCG, falling back to a dense factorisation on
    /// small systems when the iteration stalls. Right-hand sides produced by
    /// the schemes lie in range(Pᵀ) = range(M1ρ), so the system stays
    /// consistent when P has a kernel (checkerboard modes on bipartite
    /// triangulations, vertical checkerboards on an even number of layers).
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolverDivergence> {
        match self.solve_cg(b) {
            Ok(x) => Ok(x),
            Err(_) if b.len() < DENSE_LIMIT => self.solve_dense(b),
            Err(e) => Err(e),
        }
    }

    /// Cholesky, or an eigenvalue pseudo-inverse when M1ρ is singular.
    pub fn solve_dense(&self, b: &[f64]) -> Result<Vec<f64>, SolverDivergence> {
        let m = self.dense();
        let rhs = nalgebra::DVector::from_column_slice(b);
        let x = match m.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => {
                let eig = m.symmetric_eigen();
                let cut = 1e-12 * eig.eigenvalues.amax();
                let qtb = eig.eigenvectors.transpose() * &rhs;
                let scaled = nalgebra::DVector::from_iterator(
                    qtb.len(),
                    qtb.iter().zip(eig.eigenvalues.iter()).map(|(c, &l)| if l > cut { c / l } else { 0.0 }),
                );
                &eig.eigenvectors * scaled
            }
        };
        Ok(x.iter().copied().collect())
    }

    /// Jacobi-preconditioned conjugate gradients.
    pub fn solve_cg(&self, b: &[f64]) -> Result<Vec<f64>, SolverDivergence> {
        let n = b.len();
        let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let pre: Vec<f64> = self.diag.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&pre).map(|(a, p)| a * p).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut res = 1.0;
        for it in 0..self.max_iter {
            let ap = self.apply(&p);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(SolverDivergence { residual: res, iterations: it });
            }
            let alpha = rz / pap;
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            res = r.iter().map(|x| x * x).sum::<f64>().sqrt() / bnorm;
            if res <= self.tol {
                return Ok(x);
            }
            for k in 0..n {
                z[k] = r[k] * pre[k];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        Err(SolverDivergence { residual: res, iterations: self.max_iter })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dv_complex, lattice_points};
    use rand::{Rng, SeedableRng};

    #[test]
    fn symmetric_positive_definite_and_solvers_agree() {
        let dec = Dec::new(build_dv_complex(&lattice_points(8, 0.15, 4), [1.0, 1.0]).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rho: Vec<f64> = dec.mesh.cell_volume.iter().map(|k| k * rng.gen_range(0.5..2.0)).collect();
        let m = DensityMassMatrix::new(&dec, &rho);
        let d = m.dense();
        assert!((&d - d.transpose()).abs().max() <= 1e-14 * d.abs().max());
        for j in 0..dec.mesh.n_faces {
            assert!((d[(j, j)] - m.diag[j]).abs() <= 1e-14 * m.diag[j]);
        }
        // Consistent right-hand side in range(Pᵀ).
        let w: Vec<f64> = (0..3 * dec.mesh.n_cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = sparse::mul_t(&dec.rec.p, &w);
        let x1 = m.solve_dense(&b).unwrap();
        let x2 = m.solve_cg(&b).unwrap();
        let s = b.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for x in [x1, x2] {
            for (a, c) in m.apply(&x).iter().zip(&b) {
                assert!((a - c).abs() <= 1e-10 * s);
            }
        }
    }

    /// Alternating cell colouring s: on a bipartite triangulation
    /// k_j = s_a|f_j|ℓ*_j satisfies Σ_j n̂_j k_j/ℓ*_j = 0 in every cell.
    fn checkerboard(dec: &Dec) -> Option<Vec<f64>> {
        let c = &dec.mesh;
        let mut s = vec![0i8; c.n_cells];
        s[0] = 1;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for &j in &c.cell_faces[i] {
                let [a, b] = c.face_cells[j];
                let o = if a == i { b } else { a };
                if s[o] == 0 {
                    s[o] = -s[i];
                    stack.push(o);
                } else if s[o] == s[i] {
                    return None;
                }
            }
        }
        Some((0..c.n_faces).map(|j| s[c.face_cells[j][0]] as f64 * c.face_measure[j] * c.dual_edge_length[j]).collect())
    }

    #[test]
    fn kernel_is_the_checkerboard_on_bipartite_meshes() {
        let dec = Dec::new(build_dv_complex(&lattice_points(4, 0.15, 4), [1.0, 1.0]).unwrap()).unwrap();
        let k = checkerboard(&dec).expect("lattice family is bipartite");
        let pk = dec.rec.apply_flat(&k);
        assert!(pk.iter().all(|x| x.abs() < 1e-13));
        let m = DensityMassMatrix::new(&dec, &dec.mesh.cell_volume);
        let mut e: Vec<f64> = m.dense().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(e[0].abs() < 1e-13 && e[1] > 1e-3);
    }

    #[test]
    fn uniform_density_scales_ptp() {
        let dec = Dec::new(build_dv_complex(&lattice_points(4, 0.1, 4), [1.0, 1.0]).unwrap()).unwrap();
        let rho: Vec<f64> = dec.mesh.cell_volume.iter().map(|k| 3.0 * k).collect();
        let vol: Vec<f64> = dec.mesh.cell_volume.clone();
        let a = DensityMassMatrix::new(&dec, &rho).dense();
        let b = DensityMassMatrix::new(&dec, &vol).dense();
        assert!((&a - &b * 3.0).abs().max() <= 1e-13 * a.abs().max());
    }

    #[test]
    fn positive_definite_on_non_bipartite_mesh() {
        let dec = Dec::new(build_dv_complex(&lattice_points(6, 0.29, 0), [1.0, 1.0]).unwrap()).unwrap();
        assert!(checkerboard(&dec).is_none());
        let rho: Vec<f64> = dec.mesh.cell_volume.iter().map(|k| 0.7 * k).collect();
        assert!(DensityMassMatrix::new(&dec, &rho).min_eigenvalue() > 1e-4);
    }
}
