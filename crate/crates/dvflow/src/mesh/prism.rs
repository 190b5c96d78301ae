use super::{CellComplex, FaceClass, FaceGeom, Layers, MeshError};
use crate::geom::{self, EZ};
use crate::sparse;

/// Extrude a planar complex into `layer_thicknesses.len()` flat prism layers,
/// periodic in z.
///
/// Index layout (nc, nf, nv = base cells, faces, vertices; L = layers):
/// cell (t, l) = l·nc + t; vertical face (e, l) = l·nf + e; horizontal face
/// between layers l and l+1 (mod L) for base cell t = nf·L + l·nc + t;
/// horizontal primal edge (e, l) at the top of layer l = l·nf + e; vertical
/// primal edge (v, l) = nf·L + l·nv + v; primal vertex (v, l) at the bottom of
/// layer l = l·nv + v.
pub fn extrude_prismatic(
    base: &CellComplex,
    layer_thicknesses: &[f64],
    periodic_z: bool,
) -> Result<CellComplex, MeshError> {
    if !periodic_z {
        return Err(MeshError::NonPeriodicVertical);
    }
    if base.dimension != 2 {
        return Err(MeshError::InvalidInput("extrusion needs a planar base".into()));
    }
    let nl = layer_thicknesses.len();
    if nl < 2 {
        return Err(MeshError::InvalidInput("need at least two layers for a periodic column".into()));
    }
    if layer_thicknesses.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(MeshError::InvalidInput("layer thicknesses must be positive".into()));
    }
    let dz = layer_thicknesses;
    let (nc, nf, nv) = (base.n_cells, base.n_faces, base.n_vertices);
    let mut z0 = vec![0.0; nl + 1];
    for l in 0..nl {
        z0[l + 1] = z0[l] + dz[l];
    }
    let lz = z0[nl];
    let up = |l: usize| (l + 1) % nl;

    let cell = |t: usize, l: usize| l * nc + t;
    let vface = |e: usize, l: usize| l * nf + e;
    let hface = |t: usize, l: usize| nf * nl + l * nc + t;
    let hedge = |e: usize, l: usize| l * nf + e;
    let vedge = |v: usize, l: usize| nf * nl + l * nv + v;
    let vert = |v: usize, l: usize| l * nv + v;

    let n_cells = nc * nl;
    let n_faces = nf * nl + nc * nl;
    let n_dualfaces = nf * nl + nv * nl;
    let n_vertices = nv * nl;

    // Head/tail of each base edge under the planar CURL convention.
    let mut head = vec![usize::MAX; nf];
    let mut tail = vec![usize::MAX; nf];
    for (r, c, v) in sparse::triplets(&base.curl) {
        if v > 0.0 {
            head[c] = r;
        } else {
            tail[c] = r;
        }
    }

    let mut cell_volume = Vec::with_capacity(n_cells);
    let mut circumcentre = Vec::with_capacity(n_cells);
    let mut cell_tri = Vec::with_capacity(n_cells);
    let mut cell_z = Vec::with_capacity(n_cells);
    let mut cell_faces = Vec::with_capacity(n_cells);
    let mut cell_dualfaces = Vec::with_capacity(n_cells);
    for l in 0..nl {
        for t in 0..nc {
            cell_volume.push(base.cell_volume[t] * dz[l]);
            let c = base.circumcentre[t];
            circumcentre.push([c[0], c[1], z0[l] + 0.5 * dz[l]]);
            cell_tri.push(base.cell_tri[t]);
            cell_z.push([z0[l], z0[l + 1]]);
            let mut f: Vec<usize> = base.cell_faces[t].iter().map(|&e| vface(e, l)).collect();
            f.push(hface(t, l));
            f.push(hface(t, (l + nl - 1) % nl));
            cell_faces.push(f);
            let mut d: Vec<usize> = base.cell_faces[t].iter().map(|&e| hedge(e, l)).collect();
            d.extend(base.cell_faces[t].iter().map(|&e| hedge(e, (l + nl - 1) % nl)));
            d.extend(base.cell_dualfaces[t].iter().map(|&v| vedge(v, l)));
            cell_dualfaces.push(d);
        }
    }

    let mut face_cells = Vec::with_capacity(n_faces);
    let mut face_normal = Vec::with_capacity(n_faces);
    let mut face_measure = Vec::with_capacity(n_faces);
    let mut dual_edge = Vec::with_capacity(n_faces);
    let mut dual_len = Vec::with_capacity(n_faces);
    let mut face_class = Vec::with_capacity(n_faces);
    let mut face_lambda = Vec::with_capacity(n_faces);
    let mut face_geom = Vec::with_capacity(n_faces);
    for l in 0..nl {
        for e in 0..nf {
            let [a, b] = base.face_cells[e];
            face_cells.push([cell(a, l), cell(b, l)]);
            face_normal.push(base.face_normal[e]);
            face_measure.push(base.face_measure[e] * dz[l]);
            dual_edge.push(base.dual_edge[e]);
            dual_len.push(base.dual_edge_length[e]);
            face_class.push(FaceClass::Vertical);
            face_lambda.push([0.5, 0.5]);
            let seg = match &base.face_geom[e] {
                FaceGeom::Segment(s) => *s,
                _ => unreachable!("planar base has segment faces"),
            };
            face_geom.push(FaceGeom::VerticalQuad { seg, z: [z0[l], z0[l + 1]] });
        }
    }
    for l in 0..nl {
        let lu = up(l);
        for t in 0..nc {
            let (c_lo, c_hi) = (cell(t, l), cell(t, lu));
            let d = 0.5 * (dz[l] + dz[lu]);
            // a is the lower index; on the wrap face that is the layer-0 cell,
            // whose outward normal there points down.
            let (a, b, dza, dzb, sgn, zf) = if c_lo < c_hi {
                (c_lo, c_hi, dz[l], dz[lu], 1.0, z0[l + 1])
            } else {
                (c_hi, c_lo, dz[lu], dz[l], -1.0, 0.0)
            };
            face_cells.push([a, b]);
            face_normal.push(geom::scale(EZ, sgn));
            face_measure.push(base.cell_volume[t]);
            dual_edge.push(geom::scale(EZ, sgn * d));
            dual_len.push(d);
            face_class.push(FaceClass::Horizontal);
            face_lambda.push([dzb / (dza + dzb), dza / (dza + dzb)]);
            face_geom.push(FaceGeom::Horizontal { tri: base.cell_tri[t], z: zf });
        }
    }

    let mut div_t = Vec::with_capacity(2 * n_faces);
    for (j, &[a, b]) in face_cells.iter().enumerate() {
        div_t.push((a, j, 1.0));
        div_t.push((b, j, -1.0));
    }

    let mut curl_t = Vec::new();
    let mut d0_t = Vec::new();
    let mut dual_face_area = vec![0.0; n_dualfaces];
    let mut lowdim = vec![0.0; n_dualfaces];
    let mut dualface_dir = vec![EZ; n_dualfaces];
    for l in 0..nl {
        let lu = up(l);
        for e in 0..nf {
            let k = hedge(e, l);
            let [a, b] = base.face_cells[e];
            curl_t.push((k, vface(e, lu), 1.0));
            curl_t.push((k, vface(e, l), -1.0));
            let (ha, hb) = (hface(a, l), hface(b, l));
            let nz = |f: usize| face_normal[f][2];
            curl_t.push((k, hb, -nz(hb)));
            curl_t.push((k, ha, nz(ha)));
            dual_face_area[k] = base.dual_edge_length[e] * 0.5 * (dz[l] + dz[lu]);
            lowdim[k] = base.face_measure[e];
            let s = match &base.face_geom[e] {
                FaceGeom::Segment(s) => *s,
                _ => unreachable!(),
            };
            dualface_dir[k] = geom::unit(geom::sub(s[1], s[0]));
            d0_t.push((k, vert(head[e], lu), 1.0));
            d0_t.push((k, vert(tail[e], lu), -1.0));
        }
        for v in 0..nv {
            let k = vedge(v, l);
            dual_face_area[k] = base.dual_face_area[v];
            lowdim[k] = dz[l];
            d0_t.push((k, vert(v, lu), 1.0));
            d0_t.push((k, vert(v, l), -1.0));
        }
    }
    for (r, c, val) in sparse::triplets(&base.curl) {
        for l in 0..nl {
            curl_t.push((vedge(r, l), vface(c, l), val));
        }
    }

    let vertices = (0..nl)
        .flat_map(|l| { let z = z0[l]; base.vertices.iter().map(move |p| [p[0], p[1], z]) })
        .collect();
    let mut extent = base.torus_extent.clone();
    extent.push(lz);

    Ok(CellComplex {
        dimension: 3,
        torus_extent: extent,
        n_cells,
        n_faces,
        n_dualfaces,
        n_vertices,
        div: sparse::from_triplets(n_cells, n_faces, &div_t),
        curl: sparse::from_triplets(n_dualfaces, n_faces, &curl_t),
        primal_d0: sparse::from_triplets(n_dualfaces, n_vertices, &d0_t),
        cell_volume,
        face_measure,
        dual_edge_length: dual_len,
        dual_face_area,
        lowdim_measure: lowdim,
        face_normal,
        face_cells,
        face_class,
        face_lambda,
        face_geom,
        dual_edge,
        circumcentre,
        dualface_dir,
        cell_faces,
        cell_dualfaces,
        cell_tri,
        cell_z,
        vertices,
        layers: Some(Layers { dz: dz.to_vec(), base_cells: nc, base_faces: nf, base_vertices: nv }),
    })
}
