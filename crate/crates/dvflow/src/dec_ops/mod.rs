//! Cochains and the operators acting on them.
//!
//! Operators work on plain slices for the time loop; [`Cochain`] carries
//! degree/side tags for the checked public API.

mod contraction;
mod derham;
mod laplacian;
pub mod quadrature;
mod recon;

pub use contraction::{contraction_matrix, lamb, lamb_bilinear, utilde_t_apply, Contraction};
pub use derham::{de_rham, Field};
pub use laplacian::{codifferential_1, codifferential_2, hodge_laplacian};
pub use recon::Reconstruction;

use crate::mesh::CellComplex;
use crate::sparse;
use serde::{Deserialize, Serialize};
use std::hash::{Hash, Hasher};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Primal,
    Dual,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DecError {
    #[error("no exterior derivative out of top degree {0}")]
    TopDegree(usize),
    #[error("de Rham map not defined for {side:?} degree {degree}")]
    UnsupportedDegree { degree: usize, side: Side },
    #[error("Gram matrix of cell {cell} is singular (smallest eigenvalue {min_eig:e})")]
    SingularGram { cell: usize, min_eig: f64 },
    #[error("expected {expected}, got {got}")]
    Mismatch { expected: String, got: String },
}

/// Cheap identity tag for a complex: counts plus a hash of its measures.
pub fn complex_id(c: &CellComplex) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    (c.dimension, c.n_cells, c.n_faces, c.n_dualfaces).hash(&mut h);
    for x in c.cell_volume.iter().chain(&c.dual_edge_length).chain(&c.dual_face_area) {
        x.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Number of cells carrying a cochain of `degree` on `side`.
pub fn cochain_len(c: &CellComplex, degree: usize, side: Side) -> Option<usize> {
    let d = c.dimension;
    let dual_k = match side {
        Side::Dual => degree,
        Side::Primal => d.checked_sub(degree)?,
    };
    match dual_k {
        0 => Some(c.n_cells),
        1 => Some(c.n_faces),
        2 => Some(c.n_dualfaces),
        3 if d == 3 => Some(c.n_vertices),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    pub side: Side,
    pub values: Vec<f64>,
    pub complex_id: u64,
}

impl Cochain {
    pub fn new(c: &CellComplex, degree: usize, side: Side, values: Vec<f64>) -> Result<Self, DecError> {
        let n = cochain_len(c, degree, side).ok_or_else(|| DecError::Mismatch {
            expected: format!("degree <= {}", c.dimension),
            got: format!("{side:?} degree {degree}"),
        })?;
        if values.len() != n {
            return Err(DecError::Mismatch { expected: format!("{n} values"), got: format!("{}", values.len()) });
        }
        Ok(Cochain { degree, side, values, complex_id: complex_id(c) })
    }

    pub fn zeros(c: &CellComplex, degree: usize, side: Side) -> Result<Self, DecError> {
        let n = cochain_len(c, degree, side).unwrap_or(0);
        Self::new(c, degree, side, vec![0.0; n])
    }

    fn check(&self, c: &CellComplex) -> Result<(), DecError> {
        if self.complex_id != complex_id(c) {
            return Err(DecError::Mismatch { expected: "cochain of this complex".into(), got: "foreign cochain".into() });
        }
        Ok(())
    }
}

/// Signed incidence matrix of the coboundary out of (`degree`, `side`).
pub fn coboundary_matrix(c: &CellComplex, degree: usize, side: Side) -> Result<sparse::Csr, DecError> {
    let d = c.dimension;
    if degree >= d {
        return Err(DecError::TopDegree(degree));
    }
    Ok(match (side, degree) {
        (Side::Dual, 0) => sparse::transpose(&c.div).map(|v| -v),
        (Side::Dual, 1) => c.curl.clone(),
        (Side::Dual, 2) => sparse::transpose(&c.primal_d0),
        (Side::Primal, k) if k == d - 1 => c.div.clone(),
        (Side::Primal, k) if k + 2 == d => sparse::transpose(&c.curl),
        (Side::Primal, 0) => c.primal_d0.clone(),
        _ => unreachable!(),
    })
}

pub fn exterior_derivative(c: &CellComplex, x: &Cochain) -> Result<Cochain, DecError> {
    x.check(c)?;
    let m = coboundary_matrix(c, x.degree, x.side)?;
    Cochain::new(c, x.degree + 1, x.side, sparse::mul(&m, &x.values))
}

/// Diagonal Hodge stars taking dual k-cochains to primal (d-k)-cochains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HodgeStars {
    pub m0: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
}

impl HodgeStars {
    pub fn new(c: &CellComplex) -> Self {
        HodgeStars {
            m0: c.cell_volume.clone(),
            m1: c.face_measure.iter().zip(&c.dual_edge_length).map(|(a, l)| a / l).collect(),
            m2: c.lowdim_measure.iter().zip(&c.dual_face_area).map(|(s, a)| s / a).collect(),
        }
    }

    pub fn diag(&self, k: usize) -> &[f64] {
        match k {
            0 => &self.m0,
            1 => &self.m1,
            2 => &self.m2,
            _ => panic!("no Hodge star M{k}"),
        }
    }
}

/// Apply M_k to a dual k-cochain, or its inverse to a primal (d-k)-cochain.
pub fn hodge_apply(c: &CellComplex, stars: &HodgeStars, x: &Cochain, k: usize) -> Result<Cochain, DecError> {
    x.check(c)?;
    let d = c.dimension;
    if k > 2 {
        return Err(DecError::Mismatch { expected: "star index 0..=2".into(), got: k.to_string() });
    }
    let m = stars.diag(k);
    match x.side {
        Side::Dual if x.degree == k => {
            Cochain::new(c, d - k, Side::Primal, x.values.iter().zip(m).map(|(a, b)| a * b).collect())
        }
        Side::Primal if x.degree + k == d => {
            Cochain::new(c, k, Side::Dual, x.values.iter().zip(m).map(|(a, b)| a / b).collect())
        }
        _ => Err(DecError::Mismatch {
            expected: format!("dual {k} or primal {}", d as isize - k as isize),
            got: format!("{:?} {}", x.side, x.degree),
        }),
    }
}

/// Everything the schemes need, built once per mesh.
#[derive(Clone, Debug)]
pub struct Dec {
    pub mesh: CellComplex,
    pub stars: HodgeStars,
    pub rec: Reconstruction,
    pub id: u64,
}

impl Dec {
    pub fn new(mesh: CellComplex) -> Result<Self, DecError> {
        let stars = HodgeStars::new(&mesh);
        let rec = Reconstruction::new(&mesh)?;
        let id = complex_id(&mesh);
        Ok(Dec { mesh, stars, rec, id })
    }

    pub fn grad(&self, b: &[f64]) -> Vec<f64> {
        self.mesh.grad(b)
    }

    pub fn div(&self, f: &[f64]) -> Vec<f64> {
        self.mesh.divergence(f)
    }

    pub fn curl(&self, v: &[f64]) -> Vec<f64> {
        self.mesh.curl(v)
    }

    pub fn curl_t(&self, w: &[f64]) -> Vec<f64> {
        self.mesh.curl_t(w)
    }

    pub fn m1(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.stars.m1).map(|(a, b)| a * b).collect()
    }

    pub fn m1_inv(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.stars.m1).map(|(a, b)| a / b).collect()
    }

    pub fn m1_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.stars.m1).map(|((x, y), m)| x * y * m).sum()
    }

    pub fn cochain(&self, degree: usize, side: Side, values: Vec<f64>) -> Result<Cochain, DecError> {
        Cochain::new(&self.mesh, degree, side, values)
    }
}
