//! Thin helpers over `sprs` CSR matrices used for incidence operators.

use sprs::{CsMat, TriMat};

pub type Csr = CsMat<f64>;

pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Csr {
    let mut tri = TriMat::new((nrows, ncols));
    for &(r, c, v) in entries {
        tri.add_triplet(r, c, v);
    }
    tri.to_csr()
}

/// `y = A x`
pub fn mul(a: &Csr, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    mul_into(a, x, &mut y);
    y
}

pub fn mul_into(a: &Csr, x: &[f64], y: &mut [f64]) {
    assert_eq!(a.cols(), x.len());
    for (r, row) in a.outer_iterator().enumerate() {
        let mut s = 0.0;
        for (c, &v) in row.iter() {
            s += v * x[c];
        }
        y[r] = s;
    }
}

/// `y = Aᵀ x`
pub fn mul_t(a: &Csr, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.rows(), x.len());
    let mut y = vec![0.0; a.cols()];
    for (r, row) in a.outer_iterator().enumerate() {
        let xr = x[r];
        if xr == 0.0 {
            continue;
        }
        for (c, &v) in row.iter() {
            y[c] += v * xr;
        }
    }
    y
}

pub fn triplets(a: &Csr) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(a.nnz());
    for (r, row) in a.outer_iterator().enumerate() {
        for (c, &v) in row.iter() {
            out.push((r, c, v));
        }
    }
    out
}

pub fn transpose(a: &Csr) -> Csr {
    a.transpose_view().to_csr()
}

/// Integer product `A B` of two incidence matrices, returned as a dense count
/// of nonzero entries (exact since entries are small integers).
pub fn product_nnz(a: &Csr, b: &Csr) -> usize {
    let p = a * b;
    p.iter().filter(|(v, _)| **v != 0.0).count()
}
