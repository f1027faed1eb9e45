//! Small helpers on `[f64; 3]`.

pub type Point = [f64; 3];

pub type Matrix3 = [[f64; 3]; 3];

pub const ORIGIN: Point = [0.0; 3];

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    libm::sqrt(dot(a, a))
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(s: f64, a: Point) -> Point {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn is_finite(a: Point) -> bool {
    a.iter().all(|x| x.is_finite())
}

#[inline]
pub fn trace(m: &Matrix3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

/// `M · v`.
#[inline]
pub fn mat_vec(m: &Matrix3, v: Point) -> Point {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

#[inline]
pub fn scale_mat(s: f64, m: &Matrix3) -> Matrix3 {
    let mut out = *m;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}
