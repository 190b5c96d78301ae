use super::DecError;
use crate::geom::{self, M3, V3};
use crate::mesh::{CellComplex, FaceClass};
use crate::sparse::{self, Csr};

/// Cell velocity reconstruction P (dual 1-cochain -> one vector per cell)
/// and the matching cell vorticity reconstruction Q (dual 2-cochain -> one
/// vector per cell). Both are assembled as sparse maps whose rows are
/// (cell, component) pairs, row index 3·i + c.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub p: Csr,
    pub q: Csr,
    /// Inverse Gram matrix of each cell (horizontal block only on prisms).
    pub gram_inv: Vec<M3>,
    pub gram_min_eig: Vec<f64>,
    /// Largest Gram condition number over cells.
    pub gram_condition: f64,
    /// Per-cell weight λ_i^j on each horizontal face, in `cell_faces` order
    /// (zero for vertical faces).
    pub vertical_weights: Vec<Vec<f64>>,
}

const GRAM_TOL: f64 = 1e-8;

impl Reconstruction {
    pub fn new(c: &CellComplex) -> Result<Self, DecError> {
        let nc = c.n_cells;
        let mut p_t = Vec::new();
        let mut q_t = Vec::new();
        let mut gram_inv = Vec::with_capacity(nc);
        let mut gram_min_eig = Vec::with_capacity(nc);
        let mut vertical_weights = Vec::with_capacity(nc);
        let mut cond: f64 = 1.0;
        for i in 0..nc {
            let faces = &c.cell_faces[i];
            let mut g = [[0.0; 3]; 3];
            for &j in faces {
                if c.face_class[j] != FaceClass::Horizontal {
                    geom::outer_acc(&mut g, c.face_normal[j], 1.0);
                }
            }
            let (ginv, lmin) = geom::spd_inverse(&g, 2);
            if !(lmin > GRAM_TOL) {
                return Err(DecError::SingularGram { cell: i, min_eig: lmin });
            }
            let tr = g[0][0] + g[1][1];
            cond = cond.max((tr - lmin) / lmin);
            gram_inv.push(ginv);
            gram_min_eig.push(lmin);

            let mut wts = vec![0.0; faces.len()];
            for (s, &j) in faces.iter().enumerate() {
                let n = c.face_normal[j];
                let l = c.dual_edge_length[j];
                if c.face_class[j] == FaceClass::Horizontal {
                    let [a, _] = c.face_cells[j];
                    let lam = if a == i { c.face_lambda[j][0] } else { c.face_lambda[j][1] };
                    wts[s] = lam;
                    p_t.push((3 * i + 2, j, lam * n[2] / l));
                } else {
                    let col = geom::scale(geom::matvec(&ginv, n), 1.0 / l);
                    for (k, &x) in col.iter().enumerate().take(2) {
                        if x != 0.0 {
                            p_t.push((3 * i + k, j, x));
                        }
                    }
                }
            }
            vertical_weights.push(wts);

            // Vorticity: least squares for ω̃ from the normal components
            // ω_k/|f_k*| along each dual face direction touching the cell.
            let dfs = &c.cell_dualfaces[i];
            let mut gq = [[0.0; 3]; 3];
            for &k in dfs {
                geom::outer_acc(&mut gq, c.dualface_dir[k], 1.0);
            }
            if c.dimension == 2 {
                let w = 1.0 / dfs.len() as f64;
                for &k in dfs {
                    q_t.push((3 * i + 2, k, w / c.dual_face_area[k]));
                }
            } else {
                let (gqi, lq) = geom::spd_inverse(&gq, 3);
                if !(lq > GRAM_TOL) {
                    return Err(DecError::SingularGram { cell: i, min_eig: lq });
                }
                for &k in dfs {
                    let col = geom::scale(geom::matvec(&gqi, c.dualface_dir[k]), 1.0 / c.dual_face_area[k]);
                    for (r, &x) in col.iter().enumerate() {
                        if x != 0.0 {
                            q_t.push((3 * i + r, k, x));
                        }
                    }
                }
            }
        }
        Ok(Reconstruction {
            p: sparse::from_triplets(3 * nc, c.n_faces, &p_t),
            q: sparse::from_triplets(3 * nc, c.n_dualfaces, &q_t),
            gram_inv,
            gram_min_eig,
            gram_condition: cond,
            vertical_weights,
        })
    }

    /// Flat (3·n_cells) vector of cell velocities.
    pub fn apply_flat(&self, v: &[f64]) -> Vec<f64> {
        sparse::mul(&self.p, v)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<V3> {
        to_vectors(&self.apply_flat(v))
    }

    pub fn apply_t(&self, x: &[V3]) -> Vec<f64> {
        sparse::mul_t(&self.p, &from_vectors(x))
    }

    pub fn vorticity(&self, w: &[f64]) -> Vec<V3> {
        to_vectors(&sparse::mul(&self.q, w))
    }

    pub fn vorticity_t(&self, x: &[V3]) -> Vec<f64> {
        sparse::mul_t(&self.q, &from_vectors(x))
    }

    /// ū_j = ½(u_a + u_b).
    pub fn face_velocity(&self, c: &CellComplex, cell_u: &[V3]) -> Vec<V3> {
        c.face_cells.iter().map(|&[a, b]| geom::scale(geom::add(cell_u[a], cell_u[b]), 0.5)).collect()
    }
}

pub fn to_vectors(flat: &[f64]) -> Vec<V3> {
    flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
}

pub fn from_vectors(x: &[V3]) -> Vec<f64> {
    x.iter().flat_map(|v| v.iter().copied()).collect()
}
