//! Euclidean 3-space as su(2): basis, inner product, rotations, frame lifts.
//!
//! The identification uses the basis
//! `e1 = [[0,-i],[-i,0]]`, `e2 = [[0,1],[-1,0]]`, `e3 = [[i,0],[0,-i]]`
//! with inner product `<X,Y> = -tr(XY)/2`, so `<e_i,e_j> = delta_ij`.
//! These satisfy the quaternion relations `e1 e2 = e3` etc., which is what
//! makes the unit-quaternion lift of SO(3) frames below work.

use crate::mat2::{Mat2, I_C, ONE_C, ZERO_C};
use num_complex::Complex64;

pub fn e1() -> Mat2 {
    Mat2::new(ZERO_C, -I_C, -I_C, ZERO_C)
}

pub fn e2() -> Mat2 {
    Mat2::new(ZERO_C, ONE_C, -ONE_C, ZERO_C)
}

pub fn e3() -> Mat2 {
    Mat2::new(I_C, ZERO_C, ZERO_C, -I_C)
}

/// p1 e1 + p2 e2 + p3 e3.
pub fn su2_from_vec3(p: [f64; 3]) -> Mat2 {
    Mat2::new(
        Complex64::new(0.0, p[2]),
        Complex64::new(p[1], -p[0]),
        Complex64::new(-p[1], -p[0]),
        Complex64::new(0.0, -p[2]),
    )
}

/// Coordinates of X in the basis (e1,e2,e3): x_i = -Re tr(X e_i)/2.
///
/// Also returns the defect, the Frobenius mass of X outside su(2); callers
/// that require X to be a genuine vector should check it.
pub fn vec3_from_su2(x: &Mat2) -> ([f64; 3], f64) {
    // From X = p1 e1 + p2 e2 + p3 e3:
    //   X = [[ i p3, p2 - i p1], [-p2 - i p1, -i p3]]
    let p1 = -0.5 * (x.m[0][1].im + x.m[1][0].im);
    let p2 = 0.5 * (x.m[0][1].re - x.m[1][0].re);
    let p3 = 0.5 * (x.m[0][0].im - x.m[1][1].im);
    let defect = (*x - su2_from_vec3([p1, p2, p3])).frobenius();
    ([p1, p2, p3], defect)
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn normalize3(a: [f64; 3]) -> [f64; 3] {
    scale3(a, 1.0 / norm3(a))
}

/// Apply a rotation stored as rows: (R v)_i = <row_i, v>.
pub fn mat3_apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [dot3(r[0], v), dot3(r[1], v), dot3(r[2], v)]
}

/// Apply the transpose of `r`.
pub fn mat3_apply_t(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        r[0][0] * v[0] + r[1][0] * v[1] + r[2][0] * v[2],
        r[0][1] * v[0] + r[1][1] * v[1] + r[2][1] * v[2],
        r[0][2] * v[0] + r[1][2] * v[1] + r[2][2] * v[2],
    ]
}

/// Unit quaternion (w, x, y, z); the associated SU(2) matrix is
/// `w I + x e1 + y e2 + z e3`.
pub type Quat = [f64; 4];

pub fn su2_from_quat(q: Quat) -> Mat2 {
    Mat2::new(
        Complex64::new(q[0], q[3]),
        Complex64::new(q[2], -q[1]),
        Complex64::new(-q[2], -q[1]),
        Complex64::new(q[0], -q[3]),
    )
}

/// Rotation matrix (columns = images of e1,e2,e3) of Ad(U), U = su2_from_quat(q).
pub fn rotation_from_quat(q: Quat) -> [[f64; 3]; 3] {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Quaternion of a rotation matrix (Shepperd's method). Sign is the one with
/// the largest component positive; continuity is the caller's business.
pub fn quat_from_rotation(r: &[[f64; 3]; 3]) -> Quat {
    let tr = r[0][0] + r[1][1] + r[2][2];
    let q: Quat = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        [
            0.25 * s,
            (r[2][1] - r[1][2]) / s,
            (r[0][2] - r[2][0]) / s,
            (r[1][0] - r[0][1]) / s,
        ]
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt() * 2.0;
        [
            (r[2][1] - r[1][2]) / s,
            0.25 * s,
            (r[0][1] + r[1][0]) / s,
            (r[0][2] + r[2][0]) / s,
        ]
    } else if r[1][1] > r[2][2] {
        let s = (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt() * 2.0;
        [
            (r[0][2] - r[2][0]) / s,
            (r[0][1] + r[1][0]) / s,
            0.25 * s,
            (r[1][2] + r[2][1]) / s,
        ]
    } else {
        let s = (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt() * 2.0;
        [
            (r[1][0] - r[0][1]) / s,
            (r[0][2] + r[2][0]) / s,
            (r[1][2] + r[2][1]) / s,
            0.25 * s,
        ]
    };
    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

pub fn quat_dot(a: Quat, b: Quat) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn quat_neg(a: Quat) -> Quat {
    [-a[0], -a[1], -a[2], -a[3]]
}
