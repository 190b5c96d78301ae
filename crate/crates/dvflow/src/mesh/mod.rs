//! Periodic Delaunay-Voronoi complexes on the flat torus, planar or extruded
//! into prism layers.

mod io;
mod planar;
mod prism;
mod report;

pub use io::{load_json, save_json, MeshFile};
pub use planar::{build_dv_complex, lattice_points, lattice_points_in, warp_points};
pub use prism::extrude_prismatic;
pub use report::{mesh_report, RegularityReport};

use crate::geom::V3;
use crate::sparse::Csr;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("degenerate point set: {0}")]
    DegeneratePointSet(String),
    #[error("circumcentre of cell {0} lies outside the cell")]
    NonDelaunayCell(usize),
    #[error("prismatic extrusion requires periodic_z = true")]
    NonPeriodicVertical,
    #[error("invalid mesh input: {0}")]
    InvalidInput(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceClass {
    /// Edge of a planar triangulation.
    Planar,
    /// Quad inside a layer, normal horizontal.
    Vertical,
    /// Triangle between layers, normal ±ẑ.
    Horizontal,
}

/// Primal face geometry in the frame of `circumcentre[a]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FaceGeom {
    Segment([V3; 2]),
    VerticalQuad { seg: [V3; 2], z: [f64; 2] },
    Horizontal { tri: [V3; 3], z: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layers {
    pub dz: Vec<f64>,
    pub base_cells: usize,
    pub base_faces: usize,
    pub base_vertices: usize,
}

/// Primal/dual complex. Dual 0-cells are circumcentres (one per cell), dual
/// 1-cells cross faces, dual 2-cells surround primal (d-2)-cells.
#[derive(Clone, Debug, PartialEq)]
pub struct CellComplex {
    pub dimension: usize,
    pub torus_extent: Vec<f64>,
    pub n_cells: usize,
    pub n_faces: usize,
    pub n_dualfaces: usize,
    pub n_vertices: usize,
    /// cells x faces, +1 where n̂ is outward.
    pub div: Csr,
    /// dual faces x faces.
    pub curl: Csr,
    /// primal vertices -> primal (d-2)... edges in 3D; equals CURLᵀ in 2D.
    pub primal_d0: Csr,
    pub cell_volume: Vec<f64>,
    pub face_measure: Vec<f64>,
    pub dual_edge_length: Vec<f64>,
    pub dual_face_area: Vec<f64>,
    pub lowdim_measure: Vec<f64>,
    pub face_normal: Vec<V3>,
    pub face_cells: Vec<[usize; 2]>,
    pub face_class: Vec<FaceClass>,
    /// (λ_a, λ_b); one half on every non-horizontal face.
    pub face_lambda: Vec<[f64; 2]>,
    pub face_geom: Vec<FaceGeom>,
    /// Vector from `circumcentre[a]` to the adjacent image of `circumcentre[b]`.
    pub dual_edge: Vec<V3>,
    pub circumcentre: Vec<V3>,
    /// Direction of each dual face's primal partner (ẑ in 2D).
    pub dualface_dir: Vec<V3>,
    pub cell_faces: Vec<Vec<usize>>,
    pub cell_dualfaces: Vec<Vec<usize>>,
    /// Base triangle of each cell, in the frame of its circumcentre.
    pub cell_tri: Vec<[V3; 3]>,
    /// Vertical extent of each cell (3D only).
    pub cell_z: Vec<[f64; 2]>,
    pub vertices: Vec<V3>,
    pub layers: Option<Layers>,
}

impl CellComplex {
    /// GRAD := −DIVᵀ, faces x cells.
    pub fn grad(&self, b: &[f64]) -> Vec<f64> {
        let mut g = crate::sparse::mul_t(&self.div, b);
        for x in &mut g {
            *x = -*x;
        }
        g
    }

    pub fn divergence(&self, f: &[f64]) -> Vec<f64> {
        crate::sparse::mul(&self.div, f)
    }

    pub fn curl(&self, v: &[f64]) -> Vec<f64> {
        crate::sparse::mul(&self.curl, v)
    }

    pub fn curl_t(&self, w: &[f64]) -> Vec<f64> {
        crate::sparse::mul_t(&self.curl, w)
    }

    pub fn total_volume(&self) -> f64 {
        self.cell_volume.iter().sum()
    }

    /// Midpoint of the dual edge through face `j`, in the frame of
    /// `circumcentre[a]`.
    pub fn dual_edge_midpoint(&self, j: usize) -> V3 {
        let a = self.face_cells[j][0];
        crate::geom::add(self.circumcentre[a], crate::geom::scale(self.dual_edge[j], 0.5))
    }

    pub fn face_centroid(&self, j: usize) -> V3 {
        use crate::geom::{add, scale};
        match &self.face_geom[j] {
            FaceGeom::Segment(s) => scale(add(s[0], s[1]), 0.5),
            FaceGeom::VerticalQuad { seg, z } => {
                let m = scale(add(seg[0], seg[1]), 0.5);
                [m[0], m[1], 0.5 * (z[0] + z[1])]
            }
            FaceGeom::Horizontal { tri, z } => {
                let c = scale(add(add(tri[0], tri[1]), tri[2]), 1.0 / 3.0);
                [c[0], c[1], *z]
            }
        }
    }

    /// Largest dual edge length; the mesh size used in rate fits.
    pub fn h_max(&self) -> f64 {
        self.dual_edge_length.iter().cloned().fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.dual_edge_length.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Cells per base triangle: 1 in 2D, number of layers in 3D.
    pub fn n_layers(&self) -> usize {
        self.layers.as_ref().map_or(1, |l| l.dz.len())
    }
}
