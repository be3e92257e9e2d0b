//! Small dense 3×3 complex matrices stored as plain arrays.

use num_complex::Complex64;

pub type Mat3 = [[Complex64; 3]; 3];
pub type Vec3 = [Complex64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn zeros() -> Mat3 {
    [[ZERO; 3]; 3]
}

pub fn identity() -> Mat3 {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mul_vec(a: &Mat3, x: &Vec3) -> Vec3 {
    [
        a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2],
        a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2],
        a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2],
    ]
}

pub fn adjoint(a: &Mat3) -> Mat3 {
    let mut out = zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

pub fn scale(a: &Mat3, k: Complex64) -> Mat3 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= k;
        }
    }
    out
}

pub fn trace(a: &Mat3) -> Complex64 {
    a[0][0] + a[1][1] + a[2][2]
}

pub fn det(a: &Mat3) -> Complex64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Transposed cofactor matrix, so that `a * adjugate(a) = det(a) I`.
pub fn adjugate(a: &Mat3) -> Mat3 {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
    [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ]
}

pub fn inverse(a: &Mat3) -> Option<Mat3> {
    let d = det(a);
    if d.norm() == 0.0 || !d.is_finite() {
        return None;
    }
    Some(scale(&adjugate(a), d.inv()))
}

pub fn vec_norm(x: &Vec3) -> f64 {
    (x[0].norm_sqr() + x[1].norm_sqr() + x[2].norm_sqr()).sqrt()
}

pub fn frobenius(a: &Mat3) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// Spectral norm (largest singular value), from a backward-stable SVD so that
/// clustered singular values (near-unitary matrices) keep full accuracy.
pub fn spectral_norm(m: &Mat3) -> f64 {
    // Normalise first so that the SVD neither overflows nor underflows.
    let s = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(0.0, f64::max);
    if s == 0.0 {
        return 0.0;
    }
    if !s.is_finite() {
        return f64::INFINITY;
    }
    let na = nalgebra::Matrix3::from_fn(|r, c| m[r][c] / s);
    na.singular_values().max() * s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let mut m = zeros();
        m[0][0] = c(3.0, 0.0);
        m[1][1] = c(0.0, -5.0);
        m[2][2] = c(1.0, 1.0);
        assert!((spectral_norm(&m) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_matches_nalgebra_svd() {
        use nalgebra::Matrix3;
        let m: Mat3 = [
            [c(1.0, 2.0), c(-0.5, 0.1), c(3.0, 0.0)],
            [c(0.0, 0.0), c(2.0, -1.0), c(0.25, 0.75)],
            [c(-1.0, 0.3), c(0.0, 4.0), c(1e-3, 0.0)],
        ];
        let na = Matrix3::from_fn(|i, j| m[i][j]);
        let sv = na.singular_values();
        let expected = sv.iter().cloned().fold(0.0, f64::max);
        assert!((spectral_norm(&m) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn spectral_norm_of_repeated_singular_values() {
        let m = scale(&identity(), c(0.0, 2.0));
        assert!((spectral_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_roundtrip() {
        let m: Mat3 = [
            [c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)],
        ];
        let inv = inverse(&m).unwrap();
        assert!(max_abs_diff(&mul(&m, &inv), &identity()) < 1e-14);
    }
}
