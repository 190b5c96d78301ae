//! Small fixed-size vector helpers. Everything is stored as `[f64; 3]`;
//! planar meshes keep `z = 0`.

pub type V3 = [f64; 3];

#[inline]
pub fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn unit(a: V3) -> V3 {
    scale(a, 1.0 / norm(a))
}

pub const EZ: V3 = [0.0, 0.0, 1.0];

/// Wrap a coordinate into `[0, l)`.
#[inline]
pub fn wrap(x: f64, l: f64) -> f64 {
    let r = x.rem_euclid(l);
    if r >= l {
        0.0
    } else {
        r
    }
}

/// Symmetric 3x3 matrix stored row-major; used for per-cell Gram matrices.
pub type M3 = [[f64; 3]; 3];

pub fn outer_acc(m: &mut M3, a: V3, w: f64) {
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] += w * a[r] * a[c];
        }
    }
}

/// Inverse of a symmetric positive definite block restricted to the first `d`
/// coordinates. Returns the inverse and the smallest eigenvalue.
pub fn spd_inverse(m: &M3, d: usize) -> (M3, f64) {
    let mut out = [[0.0; 3]; 3];
    match d {
        1 => {
            out[0][0] = 1.0 / m[0][0];
            (out, m[0][0])
        }
        2 => {
            let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
            let det = a * c - b * b;
            out[0][0] = c / det;
            out[0][1] = -b / det;
            out[1][0] = -b / det;
            out[1][1] = a / det;
            let tr = a + c;
            let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
            (out, 0.5 * (tr - disc))
        }
        _ => {
            let mat = nalgebra::Matrix3::from_fn(|r, c| m[r][c]);
            let eig = mat.symmetric_eigenvalues();
            let inv = mat.try_inverse().unwrap_or_else(nalgebra::Matrix3::zeros);
            for r in 0..3 {
                for c in 0..3 {
                    out[r][c] = inv[(r, c)];
                }
            }
            (out, eig.min())
        }
    }
}

#[inline]
pub fn matvec(m: &M3, a: V3) -> V3 {
    [
        m[0][0] * a[0] + m[0][1] * a[1] + m[0][2] * a[2],
        m[1][0] * a[0] + m[1][1] * a[1] + m[1][2] * a[2],
        m[2][0] * a[0] + m[2][1] * a[1] + m[2][2] * a[2],
    ]
}
