use super::CellComplex;
use crate::geom::{self, V3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// Longest and shortest primal edge.
    pub h_max: f64,
    pub h_min: f64,
    pub quasi_uniformity: f64,
    /// Inscribed radius over longest edge, minimised over base triangles.
    pub min_shape_ratio: f64,
    /// Every circumcentre lies in the closure of its own triangle.
    pub delaunay_ok: bool,
    /// Cells whose circumcentre falls outside; empty when `delaunay_ok`.
    pub non_delaunay_cells: Vec<usize>,
    pub max_valence: usize,
    pub centroid_offset_max: f64,
}

fn triangle_stats(t: &[V3; 3]) -> (f64, bool) {
    let e = [geom::sub(t[1], t[0]), geom::sub(t[2], t[1]), geom::sub(t[0], t[2])];
    let len = [geom::norm(e[0]), geom::norm(e[1]), geom::norm(e[2])];
    let area = 0.5 * geom::cross(e[0], geom::scale(e[2], -1.0))[2].abs();
    let inr = 2.0 * area / (len[0] + len[1] + len[2]);
    let diam = len.iter().cloned().fold(0.0, f64::max);
    // Circumcentre of a cell sits at the local origin of `cell_tri`.
    let o = [0.0, 0.0, 0.0];
    let scale = diam * diam;
    let inside = (0..3).all(|k| {
        let a = t[k];
        let b = t[(k + 1) % 3];
        let s = (b[0] - a[0]) * (o[1] - a[1]) - (b[1] - a[1]) * (o[0] - a[0]);
        s >= -1e-12 * scale
    });
    (inr / diam, inside)
}

pub fn mesh_report(c: &CellComplex) -> RegularityReport {
    let edges: Vec<f64> = if c.dimension == 2 {
        c.face_measure.clone()
    } else {
        c.lowdim_measure.clone()
    };
    let h_max = edges.iter().cloned().fold(0.0, f64::max);
    let h_min = edges.iter().cloned().fold(f64::INFINITY, f64::min);

    let nbase = c.n_cells / c.n_layers();
    let mut min_shape = f64::INFINITY;
    let mut bad = Vec::new();
    for i in 0..nbase {
        let tri = c.cell_tri[i];
        let cc = c.circumcentre[i];
        let local = [
            geom::sub(tri[0], [cc[0], cc[1], tri[0][2]]),
            geom::sub(tri[1], [cc[0], cc[1], tri[1][2]]),
            geom::sub(tri[2], [cc[0], cc[1], tri[2][2]]),
        ];
        let (r, ok) = triangle_stats(&local);
        min_shape = min_shape.min(r);
        if !ok {
            bad.push(i);
        }
    }

    let mut valence = vec![0usize; c.n_vertices];
    for (_, v, _) in crate::sparse::triplets(&c.primal_d0) {
        valence[v] += 1;
    }

    let centroid_offset_max = (0..c.n_faces)
        .map(|j| geom::norm(geom::sub(c.dual_edge_midpoint(j), c.face_centroid(j))))
        .fold(0.0, f64::max);

    RegularityReport {
        h_max,
        h_min,
        quasi_uniformity: h_max / h_min,
        min_shape_ratio: min_shape,
        delaunay_ok: bad.is_empty(),
        non_delaunay_cells: bad,
        max_valence: valence.into_iter().max().unwrap_or(0),
        centroid_offset_max,
    }
}
