use super::{Cochain, DecError, Side};
use crate::geom::{self, V3};
use crate::mesh::{CellComplex, FaceGeom};

use super::quadrature;

/// A smooth periodic field, sampled at arbitrary (unwrapped) points.
pub enum Field<'a> {
    Scalar(&'a dyn Fn(V3) -> f64),
    Vector(&'a dyn Fn(V3) -> V3),
}

fn need_scalar<'a>(f: &'a Field<'a>, degree: usize, side: Side) -> Result<&'a dyn Fn(V3) -> f64, DecError> {
    match f {
        Field::Scalar(s) => Ok(*s),
        Field::Vector(_) => Err(DecError::UnsupportedDegree { degree, side }),
    }
}

fn need_vector<'a>(f: &'a Field<'a>, degree: usize, side: Side) -> Result<&'a dyn Fn(V3) -> V3, DecError> {
    match f {
        Field::Vector(v) => Ok(*v),
        Field::Scalar(_) => Err(DecError::UnsupportedDegree { degree, side }),
    }
}

/// Circulations along dual edges, point values at circumcentres, cell
/// integrals, or face fluxes.
pub fn de_rham(field: &Field, c: &CellComplex, degree: usize, side: Side) -> Result<Cochain, DecError> {
    let d = c.dimension;
    let vals = match (side, degree) {
        (Side::Dual, 0) => {
            let f = need_scalar(field, degree, side)?;
            c.circumcentre.iter().map(|&x| f(x)).collect()
        }
        (Side::Dual, 1) => {
            let u = need_vector(field, degree, side)?;
            (0..c.n_faces)
                .map(|j| {
                    let p = c.circumcentre[c.face_cells[j][0]];
                    let q = geom::add(p, c.dual_edge[j]);
                    let t = geom::unit(c.dual_edge[j]);
                    quadrature::line_integral(p, q, &|x| geom::dot(u(x), t))
                })
                .collect()
        }
        (Side::Primal, k) if k == d => {
            let f = need_scalar(field, degree, side)?;
            (0..c.n_cells)
                .map(|i| {
                    if d == 2 {
                        quadrature::triangle_integral(&c.cell_tri[i], f)
                    } else {
                        quadrature::prism_integral(&c.cell_tri[i], c.cell_z[i], f)
                    }
                })
                .collect()
        }
        (Side::Primal, k) if k + 1 == d => {
            let u = need_vector(field, degree, side)?;
            (0..c.n_faces).map(|j| face_flux(c, j, u)).collect()
        }
        _ => return Err(DecError::UnsupportedDegree { degree, side }),
    };
    Cochain::new(c, degree, side, vals)
}

fn face_flux(c: &CellComplex, j: usize, u: &dyn Fn(V3) -> V3) -> f64 {
    let n = c.face_normal[j];
    let un = |x: V3| geom::dot(u(x), n);
    match &c.face_geom[j] {
        FaceGeom::Segment(s) => quadrature::line_integral(s[0], s[1], &un),
        FaceGeom::VerticalQuad { seg, z } => {
            let h = z[1] - z[0];
            quadrature::gl5()
                .map(|(s, w)| {
                    let zz = z[0] + s * h;
                    let p = [seg[0][0], seg[0][1], zz];
                    let q = [seg[1][0], seg[1][1], zz];
                    w * quadrature::line_integral(p, q, &un)
                })
                .sum::<f64>()
                * h
        }
        FaceGeom::Horizontal { tri, z } => {
            let t = [[tri[0][0], tri[0][1], *z], [tri[1][0], tri[1][1], *z], [tri[2][0], tri[2][1], *z]];
            quadrature::triangle_integral(&t, &un)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dv_complex, extrude_prismatic, lattice_points};
    use std::f64::consts::PI;

    #[test]
    fn constant_field_is_exact() {
        let c = build_dv_complex(&lattice_points(6, 0.2, 5), [1.0, 1.0]).unwrap();
        let v = de_rham(&Field::Vector(&|_| [1.0, 0.0, 0.0]), &c, 1, Side::Dual).unwrap();
        for j in 0..c.n_faces {
            assert!((v.values[j] - c.face_normal[j][0] * c.dual_edge_length[j]).abs() < 1e-15);
        }
        let r = de_rham(&Field::Scalar(&|_| 2.5), &c, 2, Side::Primal).unwrap();
        for i in 0..c.n_cells {
            assert!((r.values[i] - 2.5 * c.cell_volume[i]).abs() < 1e-15);
        }
        let f = de_rham(&Field::Vector(&|_| [1.0, 0.0, 0.0]), &c, 1, Side::Primal).unwrap();
        for j in 0..c.n_faces {
            assert!((f.values[j] - c.face_normal[j][0] * c.face_measure[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn commutes_with_gradient() {
        let c = build_dv_complex(&lattice_points(8, 0.2, 11), [1.0, 1.0]).unwrap();
        let f = |x: V3| (2.0 * PI * x[0]).sin();
        let df = |x: V3| [2.0 * PI * (2.0 * PI * x[0]).cos(), 0.0, 0.0];
        let b = de_rham(&Field::Scalar(&f), &c, 0, Side::Dual).unwrap();
        let v = de_rham(&Field::Vector(&df), &c, 1, Side::Dual).unwrap();
        let g = c.grad(&b.values);
        for j in 0..c.n_faces {
            assert!((g[j] - v.values[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn circulation_matches_fine_quadrature() {
        let c = build_dv_complex(&lattice_points(32, 0.0, 0), [1.0, 1.0]).unwrap();
        let u = |x: V3| [(2.0 * PI * x[1]).sin(), 0.0, 0.0];
        let v = de_rham(&Field::Vector(&u), &c, 1, Side::Dual).unwrap();
        for j in 0..c.n_faces {
            let p = c.circumcentre[c.face_cells[j][0]];
            let d = c.dual_edge[j];
            let t = geom::unit(d);
            // Composite Simpson oracle, 50 panels.
            let m = 50;
            let mut s = 0.0;
            for k in 0..=2 * m {
                let w = if k == 0 || k == 2 * m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                let x = geom::add(p, geom::scale(d, k as f64 / (2 * m) as f64));
                s += w * geom::dot(u(x), t);
            }
            s *= geom::norm(d) / (6 * m) as f64;
            assert!((v.values[j] - s).abs() < 1e-12, "{} vs {}", v.values[j], s);
        }
    }

    #[test]
    fn prism_cell_integrals() {
        let b = build_dv_complex(&lattice_points(4, 0.1, 2), [1.0, 1.0]).unwrap();
        let c = extrude_prismatic(&b, &[0.5, 0.25, 0.25], true).unwrap();
        let r = de_rham(&Field::Scalar(&|x| x[2]), &c, 3, Side::Primal).unwrap();
        let total: f64 = r.values.iter().sum();
        assert!((total - 0.5).abs() < 1e-13);
        let f = de_rham(&Field::Vector(&|_| [0.0, 0.0, 1.0]), &c, 2, Side::Primal).unwrap();
        let div = c.divergence(&f.values);
        assert!(div.iter().all(|x| x.abs() < 1e-14));
        assert!(de_rham(&Field::Scalar(&|_| 1.0), &c, 1, Side::Dual).is_err());
    }

    fn hodge_flux_errors(pert: f64) -> Vec<f64> {
        [8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let c = build_dv_complex(&lattice_points(n, pert, 21), [1.0, 1.0]).unwrap();
                let u = |x: V3| [(2.0 * PI * x[1]).sin(), (2.0 * PI * x[0]).cos(), 0.0];
                let v = de_rham(&Field::Vector(&u), &c, 1, Side::Dual).unwrap();
                let f = de_rham(&Field::Vector(&u), &c, 1, Side::Primal).unwrap();
                let s = crate::dec_ops::HodgeStars::new(&c);
                (0..c.n_faces)
                    .map(|j| (s.m1[j] * v.values[j] - f.values[j]).abs() / c.face_measure[j])
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    fn fit(e: &[f64], n0: f64) -> f64 {
        let pts: Vec<(f64, f64)> = e.iter().enumerate().map(|(k, &y)| ((1.0 / (n0 * 2f64.powi(k as i32))).ln(), y.ln())).collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
    }

    #[test]
    fn hodge_star_consistency_rates() {
        let b = fit(&hodge_flux_errors(0.0), 8.0);
        let a = fit(&hodge_flux_errors(0.2), 8.0);
        assert!((b - 2.0).abs() <= 0.3, "case B order {b}");
        assert!((a - 1.0).abs() <= 0.3, "case A order {a}");
    }

    #[test]
    fn equilateral_hodge_star() {
        let ext = [1.0, 3f64.sqrt() / 2.0];
        let c = build_dv_complex(&crate::mesh::lattice_points_in(8, 0.0, 0, ext), ext).unwrap();
        let s = crate::dec_ops::HodgeStars::new(&c);
        assert!(s.m1.iter().all(|&m| (m - 3f64.sqrt()).abs() < 1e-12));
    }
}
