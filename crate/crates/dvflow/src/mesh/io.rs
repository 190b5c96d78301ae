//! JSON round-trip of a [`CellComplex`]. Floats go through serde_json's
//! round-trip formatter, so load(save(c)) == c bit for bit.

use super::{CellComplex, FaceClass, FaceGeom, Layers};
use crate::geom::V3;
use crate::sparse::{self, Csr};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coo {
    pub shape: [usize; 2],
    pub entries: Vec<(usize, usize, f64)>,
}

impl From<&Csr> for Coo {
    fn from(m: &Csr) -> Self {
        Coo { shape: [m.rows(), m.cols()], entries: sparse::triplets(m) }
    }
}

impl From<&Coo> for Csr {
    fn from(c: &Coo) -> Self {
        sparse::from_triplets(c.shape[0], c.shape[1], &c.entries)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecords {
    pub volume: Vec<f64>,
    pub circumcentre: Vec<V3>,
    pub faces: Vec<Vec<usize>>,
    pub dualfaces: Vec<Vec<usize>>,
    pub triangle: Vec<[V3; 3]>,
    pub z_range: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceRecords {
    pub measure: Vec<f64>,
    pub dual_edge_length: Vec<f64>,
    pub normal: Vec<V3>,
    pub cells: Vec<[usize; 2]>,
    pub class: Vec<FaceClass>,
    pub lambda: Vec<[f64; 2]>,
    pub geometry: Vec<FaceGeom>,
    pub dual_edge: Vec<V3>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualFaceRecords {
    pub area: Vec<f64>,
    pub lowdim_measure: Vec<f64>,
    pub direction: Vec<V3>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Incidence {
    pub div: Coo,
    pub curl: Coo,
    pub primal_d0: Coo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub dimension: usize,
    pub torus_extent: Vec<f64>,
    pub vertices: Vec<V3>,
    pub cells: CellRecords,
    pub faces: FaceRecords,
    pub dual_faces: DualFaceRecords,
    pub incidence: Incidence,
    pub layers: Option<Layers>,
}

impl From<&CellComplex> for MeshFile {
    fn from(c: &CellComplex) -> Self {
        MeshFile {
            dimension: c.dimension,
            torus_extent: c.torus_extent.clone(),
            vertices: c.vertices.clone(),
            cells: CellRecords {
                volume: c.cell_volume.clone(),
                circumcentre: c.circumcentre.clone(),
                faces: c.cell_faces.clone(),
                dualfaces: c.cell_dualfaces.clone(),
                triangle: c.cell_tri.clone(),
                z_range: c.cell_z.clone(),
            },
            faces: FaceRecords {
                measure: c.face_measure.clone(),
                dual_edge_length: c.dual_edge_length.clone(),
                normal: c.face_normal.clone(),
                cells: c.face_cells.clone(),
                class: c.face_class.clone(),
                lambda: c.face_lambda.clone(),
                geometry: c.face_geom.clone(),
                dual_edge: c.dual_edge.clone(),
            },
            dual_faces: DualFaceRecords {
                area: c.dual_face_area.clone(),
                lowdim_measure: c.lowdim_measure.clone(),
                direction: c.dualface_dir.clone(),
            },
            incidence: Incidence {
                div: (&c.div).into(),
                curl: (&c.curl).into(),
                primal_d0: (&c.primal_d0).into(),
            },
            layers: c.layers.clone(),
        }
    }
}

impl From<MeshFile> for CellComplex {
    fn from(m: MeshFile) -> Self {
        CellComplex {
            dimension: m.dimension,
            torus_extent: m.torus_extent,
            n_cells: m.cells.volume.len(),
            n_faces: m.faces.measure.len(),
            n_dualfaces: m.dual_faces.area.len(),
            n_vertices: m.vertices.len(),
            div: (&m.incidence.div).into(),
            curl: (&m.incidence.curl).into(),
            primal_d0: (&m.incidence.primal_d0).into(),
            cell_volume: m.cells.volume,
            face_measure: m.faces.measure,
            dual_edge_length: m.faces.dual_edge_length,
            dual_face_area: m.dual_faces.area,
            lowdim_measure: m.dual_faces.lowdim_measure,
            face_normal: m.faces.normal,
            face_cells: m.faces.cells,
            face_class: m.faces.class,
            face_lambda: m.faces.lambda,
            face_geom: m.faces.geometry,
            dual_edge: m.faces.dual_edge,
            circumcentre: m.cells.circumcentre,
            dualface_dir: m.dual_faces.direction,
            cell_faces: m.cells.faces,
            cell_dualfaces: m.cells.dualfaces,
            cell_tri: m.cells.triangle,
            cell_z: m.cells.z_range,
            vertices: m.vertices,
            layers: m.layers,
        }
    }
}

pub fn save_json(c: &CellComplex, path: &Path) -> std::io::Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(f, &MeshFile::from(c)).map_err(std::io::Error::other)
}

pub fn load_json(path: &Path) -> std::io::Result<CellComplex> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let m: MeshFile = serde_json::from_reader(f).map_err(std::io::Error::other)?;
    Ok(m.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dv_complex, extrude_prismatic, lattice_points};

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let c = build_dv_complex(&lattice_points(6, 0.2, 7), [1.0, 1.0]).unwrap();
        let p = extrude_prismatic(&c, &[0.4, 0.6, 1.0], true).unwrap();
        for (k, m) in [c, p].into_iter().enumerate() {
            let f = dir.path().join(format!("m{k}.json"));
            save_json(&m, &f).unwrap();
            assert_eq!(load_json(&f).unwrap(), m);
        }
    }
}
