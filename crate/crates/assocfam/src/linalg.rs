//! Small fixed-size matrix/vector helpers over any [`Scalar`].
//!
//! Everything the engine needs is 2x2 or 3x3; explicit adjugate inverses keep
//! the arithmetic exact under jet semantics.

use crate::scalar::Scalar;

pub type V2<S> = [S; 2];
pub type M2<S> = [[S; 2]; 2];
pub type V3<S> = [S; 3];
pub type M3<S> = [[S; 3]; 3];

pub type Vec2 = V2<f64>;
pub type Mat2 = M2<f64>;
pub type Vec3 = V3<f64>;
pub type Mat3 = M3<f64>;

pub fn mat2_mul<S: Scalar>(a: &M2<S>, b: &M2<S>) -> M2<S> {
    let mut out = [[S::from_f64(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_vec<S: Scalar>(a: &M2<S>, v: &V2<S>) -> V2<S> {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn mat2_add<S: Scalar>(a: &M2<S>, b: &M2<S>) -> M2<S> {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn mat2_sub<S: Scalar>(a: &M2<S>, b: &M2<S>) -> M2<S> {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn mat2_scale<S: Scalar>(a: &M2<S>, s: S) -> M2<S> {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat2_det<S: Scalar>(a: &M2<S>) -> S {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat2_trace<S: Scalar>(a: &M2<S>) -> S {
    a[0][0] + a[1][1]
}

pub fn mat2_inv<S: Scalar>(a: &M2<S>) -> M2<S> {
    let r = mat2_det(a).recip();
    [[a[1][1] * r, -a[0][1] * r], [-a[1][0] * r, a[0][0] * r]]
}

pub fn mat2_identity<S: Scalar>() -> M2<S> {
    [[S::from_f64(1.0), S::from_f64(0.0)], [S::from_f64(0.0), S::from_f64(1.0)]]
}

pub fn vec2_add<S: Scalar>(a: &V2<S>, b: &V2<S>) -> V2<S> {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn vec2_sub<S: Scalar>(a: &V2<S>, b: &V2<S>) -> V2<S> {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn vec2_scale<S: Scalar>(a: &V2<S>, s: S) -> V2<S> {
    [a[0] * s, a[1] * s]
}

/// g-inner product of two tangent vectors in the coordinate frame.
pub fn g_dot<S: Scalar>(g: &M2<S>, a: &V2<S>, b: &V2<S>) -> S {
    a[0] * (g[0][0] * b[0] + g[0][1] * b[1]) + a[1] * (g[1][0] * b[0] + g[1][1] * b[1])
}

pub fn g_norm(g: &Mat2, a: &Vec2) -> f64 {
    g_dot(g, a, a).max(0.0).sqrt()
}

/// Frobenius norm of a (1,1)-tensor taken with the metric:
/// |O|^2 = g_ij O^i_k O^j_l g^kl.
pub fn g_op_norm(g: &Mat2, ginv: &Mat2, op: &Mat2) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    s += g[i][j] * op[i][k] * op[j][l] * ginv[k][l];
                }
            }
        }
    }
    s.max(0.0).sqrt()
}

pub fn mat3_vec<S: Scalar>(a: &M3<S>, v: &V3<S>) -> V3<S> {
    let mut out = [S::from_f64(0.0); 3];
    for i in 0..3 {
        out[i] = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
    }
    out
}

pub fn mat3_det<S: Scalar>(a: &M3<S>) -> S {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Inverse by adjugate over the scalar ring. Constants are never mixed in,
/// so jet arguments of any degree are fine.
pub fn mat3_inv<S: Scalar>(a: &M3<S>) -> M3<S> {
    let r = mat3_det(a).recip();
    let mut out = [[a[0][0]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
            let signed = if (i + j) % 2 == 0 { minor } else { -minor };
            out[i][j] = signed * r;
        }
    }
    out
}

/// G-inner product of ambient vectors.
pub fn metric_dot<S: Scalar>(gm: &M3<S>, a: &V3<S>, b: &V3<S>) -> S {
    let mut s = gm[0][0] * a[0] * b[0];
    for i in 0..3 {
        for j in 0..3 {
            if i == 0 && j == 0 {
                continue;
            }
            s = s + gm[i][j] * a[i] * b[j];
        }
    }
    s
}
