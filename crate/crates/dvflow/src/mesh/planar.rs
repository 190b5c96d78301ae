use super::{CellComplex, FaceClass, FaceGeom, MeshError};
use crate::geom::{self, V3};
use crate::sparse;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// n² points of a triangular lattice on the unit torus.
pub fn lattice_points(n: usize, perturbation: f64, seed: u64) -> Vec<[f64; 2]> {
    lattice_points_in(n, perturbation, seed, [1.0, 1.0])
}

/// Triangular lattice with n rows of n points on an `extent` torus. Row j is
/// shifted by j·⌊n/2⌋/n of the column spacing so rows stay periodic for odd n.
/// On extent (1, √3/2) the lattice is equilateral.
pub fn lattice_points_in(n: usize, perturbation: f64, seed: u64, extent: [f64; 2]) -> Vec<[f64; 2]> {
    assert!(n >= 2, "lattice needs n >= 2");
    assert!((0.0..0.3).contains(&perturbation), "perturbation must lie in [0, 0.3)");
    let (dx, dy) = (extent[0] / n as f64, extent[1] / n as f64);
    let shift = (n / 2) as f64 / n as f64;
    let spacing = dx.min(dy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n * n);
    for j in 0..n {
        let s = (j as f64 * shift).fract();
        for i in 0..n {
            let mut x = (i as f64 + s + 0.25) * dx;
            let mut y = (j as f64 + 0.5) * dy;
            if perturbation > 0.0 {
                let r = perturbation * spacing * rng.gen::<f64>().sqrt();
                let th = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                x += r * th.cos();
                y += r * th.sin();
            }
            pts.push([geom::wrap(x, extent[0]), geom::wrap(y, extent[1])]);
        }
    }
    pts
}

/// Smooth periodic displacement of amplitude `warp`·L_x, the same map at
/// every resolution. A displacement that shrinks with h would converge back
/// to the lattice, whose symmetries cancel the leading truncation terms.
pub fn warp_points(points: &mut [[f64; 2]], warp: f64, extent: [f64; 2]) {
    use std::f64::consts::PI;
    let a = warp * extent[0];
    for p in points.iter_mut() {
        let (sx, sy) = (2.0 * PI * p[0] / extent[0], 2.0 * PI * p[1] / extent[1]);
        let x = p[0] + a * (sx + sy + 0.3).sin();
        let y = p[1] + a * (sx - 2.0 * sy + 0.5).cos();
        *p = [geom::wrap(x, extent[0]), geom::wrap(y, extent[1])];
    }
}

struct Tri {
    base: [usize; 3],
    pos: [[f64; 2]; 3],
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn circumcentre(p: &[[f64; 2]; 3]) -> [f64; 2] {
    let (ax, ay) = (p[0][0], p[0][1]);
    let (bx, by) = (p[1][0] - ax, p[1][1] - ay);
    let (cx, cy) = (p[2][0] - ax, p[2][1] - ay);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    [ax + (cy * b2 - by * c2) / d, ay + (bx * c2 - cx * b2) / d]
}

fn v3(p: [f64; 2]) -> V3 {
    [p[0], p[1], 0.0]
}

/// Periodic Delaunay-Voronoi complex of `points` on the torus `extent`,
/// via triangulation of the 3x3 tiling and quotient back to one copy.
pub fn build_dv_complex(points: &[[f64; 2]], extent: [f64; 2]) -> Result<CellComplex, MeshError> {
    let n = points.len();
    let (lx, ly) = (extent[0], extent[1]);
    if n < 4 {
        return Err(MeshError::InvalidInput(format!("need at least 4 points, got {n}")));
    }
    if !(lx > 0.0 && ly > 0.0) {
        return Err(MeshError::InvalidInput("torus extent must be positive".into()));
    }
    for p in points {
        if !(p[0] >= 0.0 && p[0] < lx && p[1] >= 0.0 && p[1] < ly) {
            return Err(MeshError::InvalidInput(format!("point {p:?} outside the fundamental domain")));
        }
    }
    {
        let mut sorted: Vec<[f64; 2]> = points.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(MeshError::DegeneratePointSet("duplicate points".into()));
        }
    }

    let offsets: Vec<(i64, i64)> = (-1..=1).flat_map(|oy| (-1..=1).map(move |ox| (ox, oy))).collect();
    let mut tile = Vec::with_capacity(9 * n);
    for &(ox, oy) in &offsets {
        for p in points {
            tile.push(delaunator::Point { x: p[0] + ox as f64 * lx, y: p[1] + oy as f64 * ly });
        }
    }
    let tri = delaunator::triangulate(&tile);
    let centre_tile = offsets.iter().position(|&o| o == (0, 0)).unwrap();

    // Keep the image of each periodic triangle whose lowest-index vertex sits
    // in the central copy.
    let mut tris: Vec<Tri> = Vec::new();
    for t in tri.triangles.chunks(3) {
        let mut ids = [t[0], t[1], t[2]];
        let p = |i: usize| [tile[i].x, tile[i].y];
        if orient(p(ids[0]), p(ids[1]), p(ids[2])) < 0.0 {
            ids.swap(1, 2);
        }
        let base = [ids[0] % n, ids[1] % n, ids[2] % n];
        if base[0] == base[1] || base[1] == base[2] || base[0] == base[2] {
            continue;
        }
        let k = (0..3).min_by_key(|&k| base[k]).unwrap();
        if ids[k] / n != centre_tile {
            continue;
        }
        let rot = [k, (k + 1) % 3, (k + 2) % 3];
        tris.push(Tri {
            base: [base[rot[0]], base[rot[1]], base[rot[2]]],
            pos: [p(ids[rot[0]]), p(ids[rot[1]]), p(ids[rot[2]])],
        });
    }
    // Deterministic cell order independent of the triangulator.
    tris.sort_by(|a, b| {
        a.base
            .cmp(&b.base)
            .then_with(|| a.pos.partial_cmp(&b.pos).unwrap_or(std::cmp::Ordering::Equal))
    });

    let tile_lo = [-lx, -ly];
    let tile_hi = [2.0 * lx, 2.0 * ly];
    let mut cc_unwrapped = Vec::with_capacity(tris.len());
    for (i, t) in tris.iter().enumerate() {
        let c = circumcentre(&t.pos);
        let r = ((t.pos[0][0] - c[0]).powi(2) + (t.pos[0][1] - c[1]).powi(2)).sqrt();
        if c[0] - r < tile_lo[0] || c[1] - r < tile_lo[1] || c[0] + r > tile_hi[0] || c[1] + r > tile_hi[1] {
            return Err(MeshError::InvalidInput(format!(
                "circumdisk of cell {i} leaves the 3x3 tiling; point set too sparse for this torus"
            )));
        }
        cc_unwrapped.push(c);
    }

    // Periodic edge key: lower base id, higher base id, lattice offset of the
    // higher endpoint relative to the lower one.
    let lattice_offset = |pa: [f64; 2], ia: usize, pb: [f64; 2], ib: usize| -> (i64, i64) {
        let dx = (pb[0] - points[ib][0]) - (pa[0] - points[ia][0]);
        let dy = (pb[1] - points[ib][1]) - (pa[1] - points[ia][1]);
        ((dx / lx).round() as i64, (dy / ly).round() as i64)
    };
    let mut edge_map: BTreeMap<(usize, usize, i64, i64), Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (i0, i1) = (t.base[k], t.base[(k + 1) % 3]);
            let (p0, p1) = (t.pos[k], t.pos[(k + 1) % 3]);
            let key = if i0 < i1 {
                let o = lattice_offset(p0, i0, p1, i1);
                (i0, i1, o.0, o.1)
            } else {
                let o = lattice_offset(p1, i1, p0, i0);
                (i1, i0, o.0, o.1)
            };
            edge_map.entry(key).or_default().push((ci, k));
        }
    }

    let n_cells = tris.len();
    let n_faces = edge_map.len();
    if n + n_cells != n_faces || 3 * n_cells != 2 * n_faces {
        return Err(MeshError::DegeneratePointSet(format!(
            "quotient is not a closed triangulated torus (V={n}, E={n_faces}, F={n_cells})"
        )));
    }

    // Circumcentres wrapped into the fundamental domain; each cell's frame is
    // shifted by the same amount.
    let wrapped: Vec<[f64; 2]> = cc_unwrapped.iter().map(|c| [geom::wrap(c[0], lx), geom::wrap(c[1], ly)]).collect();
    let shift: Vec<[f64; 2]> = (0..n_cells)
        .map(|i| [wrapped[i][0] - cc_unwrapped[i][0], wrapped[i][1] - cc_unwrapped[i][1]])
        .collect();
    let in_frame = |ci: usize, p: [f64; 2]| -> [f64; 2] { [p[0] + shift[ci][0], p[1] + shift[ci][1]] };

    let mut face_cells = Vec::with_capacity(n_faces);
    let mut face_normal = Vec::with_capacity(n_faces);
    let mut face_measure = Vec::with_capacity(n_faces);
    let mut dual_edge = Vec::with_capacity(n_faces);
    let mut dual_len = Vec::with_capacity(n_faces);
    let mut face_geom = Vec::with_capacity(n_faces);
    let mut cell_faces = vec![vec![usize::MAX; 3]; n_cells];
    let mut div_t = Vec::with_capacity(2 * n_faces);
    let mut curl_t = Vec::with_capacity(2 * n_faces);

    for (j, (_key, adj)) in edge_map.iter().enumerate() {
        if adj.len() != 2 {
            return Err(MeshError::DegeneratePointSet(format!("edge shared by {} cells", adj.len())));
        }
        let (mut ea, mut eb) = (adj[0], adj[1]);
        if ea.0 > eb.0 {
            std::mem::swap(&mut ea, &mut eb);
        }
        let (a, ka) = ea;
        let (b, kb) = eb;
        if a == b {
            return Err(MeshError::DegeneratePointSet("cell adjacent to itself".into()));
        }
        let ta = &tris[a];
        let tb = &tris[b];
        let p = in_frame(a, ta.pos[ka]);
        let q = in_frame(a, ta.pos[(ka + 1) % 3]);
        let (ip, iq) = (ta.base[ka], ta.base[(ka + 1) % 3]);
        let t = [q[0] - p[0], q[1] - p[1]];
        let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
        let nrm = [t[1] / len, -t[0] / len];
        // Same vertex in b's local ordering (b traverses the edge as q -> p).
        let pb = if tb.base[kb] == iq { tb.pos[kb] } else { tb.pos[(kb + 1) % 3] };
        let qa = ta.pos[(ka + 1) % 3];
        let cc_b = [cc_unwrapped[b][0] + qa[0] - pb[0], cc_unwrapped[b][1] + qa[1] - pb[1]];
        let de = [cc_b[0] - cc_unwrapped[a][0], cc_b[1] - cc_unwrapped[a][1]];
        let ls = de[0] * nrm[0] + de[1] * nrm[1];
        let de_len = (de[0] * de[0] + de[1] * de[1]).sqrt();
        if ls <= 1e-9 * len {
            return Err(MeshError::DegeneratePointSet(format!(
                "cocircular quadruple across edge ({ip},{iq}): dual edge length {ls:e}"
            )));
        }
        if (de_len - ls).abs() > 1e-9 * de_len {
            return Err(MeshError::DegeneratePointSet(format!("dual edge of face {j} not orthogonal")));
        }
        face_cells.push([a, b]);
        face_normal.push([nrm[0], nrm[1], 0.0]);
        face_measure.push(len);
        dual_edge.push([de[0], de[1], 0.0]);
        dual_len.push(ls);
        face_geom.push(FaceGeom::Segment([v3(p), v3(q)]));
        cell_faces[a][ka] = j;
        cell_faces[b][kb] = j;
        div_t.push((a, j, 1.0));
        div_t.push((b, j, -1.0));
        // Tangent ẑ × n̂ runs p -> q: q is the head.
        curl_t.push((iq, j, 1.0));
        curl_t.push((ip, j, -1.0));
    }

    let div = sparse::from_triplets(n_cells, n_faces, &div_t);
    let curl = sparse::from_triplets(n, n_faces, &curl_t);
    let primal_d0 = sparse::transpose(&curl);

    let mut dual_face_area = vec![0.0; n];
    for &(r, c, _) in curl_t.iter() {
        dual_face_area[r] += 0.25 * face_measure[c] * dual_len[c];
    }
    let cell_volume: Vec<f64> = tris.iter().map(|t| 0.5 * orient(t.pos[0], t.pos[1], t.pos[2])).collect();
    let cell_tri: Vec<[V3; 3]> = tris
        .iter()
        .enumerate()
        .map(|(i, t)| [v3(in_frame(i, t.pos[0])), v3(in_frame(i, t.pos[1])), v3(in_frame(i, t.pos[2]))])
        .collect();
    let cell_dualfaces: Vec<Vec<usize>> = tris.iter().map(|t| t.base.to_vec()).collect();

    Ok(CellComplex {
        dimension: 2,
        torus_extent: vec![lx, ly],
        n_cells,
        n_faces,
        n_dualfaces: n,
        n_vertices: n,
        div,
        curl,
        primal_d0,
        cell_volume,
        face_measure,
        dual_edge_length: dual_len,
        dual_face_area,
        lowdim_measure: vec![1.0; n],
        face_normal,
        face_cells,
        face_class: vec![FaceClass::Planar; n_faces],
        face_lambda: vec![[0.5, 0.5]; n_faces],
        face_geom,
        dual_edge,
        circumcentre: wrapped.iter().map(|&c| v3(c)).collect(),
        dualface_dir: vec![geom::EZ; n],
        cell_faces,
        cell_dualfaces,
        cell_tri,
        cell_z: Vec::new(),
        vertices: points.iter().map(|&p| v3(p)).collect(),
        layers: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::triplets;

    fn curl_grad_zero(c: &CellComplex) -> bool {
        let grad = sparse::transpose(&c.div).map(|v| -v);
        let p = &c.curl * &grad;
        p.iter().all(|(v, _)| *v == 0.0)
    }

    #[test]
    fn two_by_two_counts() {
        let pts = lattice_points(2, 0.0, 0);
        assert_eq!(pts.len(), 4);
        let c = build_dv_complex(&pts, [1.0, 1.0]).unwrap();
        assert_eq!((c.n_cells, c.n_faces, c.n_dualfaces), (8, 12, 4));
        assert!(curl_grad_zero(&c));
    }

    #[test]
    fn equilateral_lattice_measures() {
        let n = 6;
        let ext = [1.0, 3f64.sqrt() / 2.0];
        let c = build_dv_complex(&lattice_points_in(n, 0.0, 0, ext), ext).unwrap();
        let a = 1.0 / n as f64;
        for j in 0..c.n_faces {
            assert!((c.face_measure[j] - a).abs() < 1e-14);
            assert!((c.dual_edge_length[j] - a / 3f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn incidence_structure() {
        for (n, pert) in [(4, 0.0), (8, 0.2), (7, 0.1)] {
            let c = build_dv_complex(&lattice_points(n, pert, 42), [1.0, 1.0]).unwrap();
            assert!(curl_grad_zero(&c));
            let mut col = vec![0.0; c.n_faces];
            let mut cnt = vec![0; c.n_faces];
            for (_, j, v) in triplets(&c.div) {
                col[j] += v;
                cnt[j] += 1;
            }
            assert!(col.iter().all(|&s| s == 0.0) && cnt.iter().all(|&k| k == 2));
            let mut col = vec![0.0; c.n_faces];
            for (_, j, v) in triplets(&c.curl) {
                col[j] += v;
            }
            assert!(col.iter().all(|&s| s == 0.0));
            for j in 0..c.n_faces {
                let t = geom::unit(c.dual_edge[j]);
                assert!(1.0 - geom::dot(t, c.face_normal[j]).abs() <= 1e-12);
                assert!(c.face_measure[j] > 0.0 && c.dual_edge_length[j] > 0.0);
            }
            let tot: f64 = c.dual_face_area.iter().sum();
            assert!((tot - 1.0).abs() < 1e-12);
            assert!((c.total_volume() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_is_deterministic() {
        let a = lattice_points(8, 0.2, 42);
        let b = lattice_points(8, 0.2, 42);
        assert!(a.iter().zip(&b).all(|(p, q)| p[0].to_bits() == q[0].to_bits() && p[1].to_bits() == q[1].to_bits()));
        assert_ne!(a, lattice_points(8, 0.2, 43));
    }

    #[test]
    fn rejects_cocircular_square_grid() {
        let pts: Vec<[f64; 2]> = (0..16).map(|k| [(k % 4) as f64 / 4.0, (k / 4) as f64 / 4.0]).collect();
        assert!(matches!(build_dv_complex(&pts, [1.0, 1.0]), Err(MeshError::DegeneratePointSet(_))));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_dv_complex(&[[0.1, 0.1]; 3], [1.0, 1.0]), Err(MeshError::InvalidInput(_))));
        let mut p = lattice_points(3, 0.0, 0);
        p[0] = [1.5, 0.0];
        assert!(matches!(build_dv_complex(&p, [1.0, 1.0]), Err(MeshError::InvalidInput(_))));
        let mut p = lattice_points(3, 0.0, 0);
        p[1] = p[0];
        assert!(matches!(build_dv_complex(&p, [1.0, 1.0]), Err(MeshError::DegeneratePointSet(_))));
    }

    #[test]
    fn h_max_halves_under_refinement() {
        let h: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| build_dv_complex(&lattice_points(n, 0.0, 0), [1.0, 1.0]).unwrap().h_max())
            .collect();
        for w in h.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 0.1);
        }
    }
}
