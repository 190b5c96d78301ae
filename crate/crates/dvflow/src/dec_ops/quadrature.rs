//! Fixed quadrature rules: 5-point Gauss-Legendre on [0, 1] and the
//! 6-point degree-4 rule on triangles.

use crate::geom::{self, V3};

const GL5_X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Nodes and weights on [0, 1]; weights sum to 1.
pub fn gl5() -> impl Iterator<Item = (f64, f64)> {
    GL5_X.iter().zip(GL5_W.iter()).map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
}

const TRI_A1: f64 = 0.445_948_490_915_964_886_32;
const TRI_W1: f64 = 0.223_381_589_678_011_465_70;
const TRI_A2: f64 = 0.091_576_213_509_770_743_46;
const TRI_W2: f64 = 0.109_951_743_655_321_867_64;

/// Barycentric nodes and weights (summing to 1), exact for degree 4.
pub fn tri6() -> [([f64; 3], f64); 6] {
    let b1 = 1.0 - 2.0 * TRI_A1;
    let b2 = 1.0 - 2.0 * TRI_A2;
    [
        ([b1, TRI_A1, TRI_A1], TRI_W1),
        ([TRI_A1, b1, TRI_A1], TRI_W1),
        ([TRI_A1, TRI_A1, b1], TRI_W1),
        ([b2, TRI_A2, TRI_A2], TRI_W2),
        ([TRI_A2, b2, TRI_A2], TRI_W2),
        ([TRI_A2, TRI_A2, b2], TRI_W2),
    ]
}

pub fn line_integral(p: V3, q: V3, f: &dyn Fn(V3) -> f64) -> f64 {
    let d = geom::sub(q, p);
    let len = geom::norm(d);
    gl5().map(|(s, w)| w * f(geom::add(p, geom::scale(d, s)))).sum::<f64>() * len
}

/// Integral over a planar triangle (z taken from the vertices).
pub fn triangle_integral(t: &[V3; 3], f: &dyn Fn(V3) -> f64) -> f64 {
    let area = 0.5 * geom::norm(geom::cross(geom::sub(t[1], t[0]), geom::sub(t[2], t[0])));
    tri6()
        .iter()
        .map(|(b, w)| {
            let x = geom::add(geom::add(geom::scale(t[0], b[0]), geom::scale(t[1], b[1])), geom::scale(t[2], b[2]));
            w * f(x)
        })
        .sum::<f64>()
        * area
}

/// Integral over triangle × [z0, z1].
pub fn prism_integral(t: &[V3; 3], z: [f64; 2], f: &dyn Fn(V3) -> f64) -> f64 {
    gl5()
        .map(|(s, w)| {
            let zz = z[0] + s * (z[1] - z[0]);
            w * triangle_integral(t, &|x| f([x[0], x[1], zz]))
        })
        .sum::<f64>()
        * (z[1] - z[0])
}
