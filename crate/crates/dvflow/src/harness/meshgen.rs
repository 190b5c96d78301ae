use super::config::MeshSpec;
use super::{Check, HarnessError};
use crate::mesh::{mesh_report, CellComplex, RegularityReport};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshGenReport {
    pub n_cells: usize,
    pub n_faces: usize,
    pub regularity: RegularityReport,
    pub checks: Vec<Check>,
}

/// Build the complex; construction already rejects non-Delaunay or
/// non-orthogonal input, so the remaining check is the report itself.
pub fn mesh_gen(spec: &MeshSpec) -> Result<(CellComplex, MeshGenReport), HarnessError> {
    let c = spec.complex()?;
    let regularity = mesh_report(&c);
    let checks = vec![Check::flag(
        "mesh_valid",
        regularity.delaunay_ok,
        format!("{} non-Delaunay cells", regularity.non_delaunay_cells.len()),
    )];
    let rep = MeshGenReport { n_cells: c.n_cells, n_faces: c.n_faces, regularity, checks };
    Ok((c, rep))
}
