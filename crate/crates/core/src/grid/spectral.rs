//! Closed-form spectral matrices on uniform grids.

use std::f64::consts::PI;

use faer::Mat;

/// First-derivative matrix of trigonometric interpolation on m periodic
/// points with spacing h (m even, Nyquist mode dropped).
pub fn periodic_derivative(m: usize, h: f64) -> Mat<f64> {
    let scale = 2.0 * PI / (m as f64 * h);
    Mat::from_fn(m, m, |i, j| {
        if i == j {
            0.0
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            0.5 * sign * scale / (d * PI / m as f64).tan()
        }
    })
}

/// The square of `periodic_derivative`, so the Nyquist mode is annihilated
/// rather than weighted by -(m/2)^2.
pub fn periodic_second_derivative(m: usize, h: f64) -> Mat<f64> {
    let scale = 2.0 * PI / (m as f64 * h);
    let mf = m as f64;
    let nyquist = 0.25 * mf;
    Mat::from_fn(m, m, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        let full = if i == j {
            -mf * mf / 12.0 - 1.0 / 6.0
        } else {
            let s = ((i as f64 - j as f64) * PI / mf).sin();
            -0.5 * sign / (s * s)
        };
        scale * scale * (full + nyquist * sign)
    })
}

/// Orthonormal DST-IV matrix, symmetric and involutory.
pub fn dst4(m: usize) -> Mat<f64> {
    let c = (2.0 / m as f64).sqrt();
    Mat::from_fn(m, m, |i, j| c * (PI * (i as f64 + 0.5) * (j as f64 + 0.5) / m as f64).sin())
}

/// Orthonormal DCT-IV matrix.
pub fn dct4(m: usize) -> Mat<f64> {
    let c = (2.0 / m as f64).sqrt();
    Mat::from_fn(m, m, |i, j| c * (PI * (i as f64 + 0.5) * (j as f64 + 0.5) / m as f64).cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_a_resolved_mode() {
        let m = 32;
        let h = 0.3;
        let len = m as f64 * h;
        let x: Vec<f64> = (0..m).map(|j| j as f64 * h).collect();
        let kk = 2.0 * PI * 3.0 / len;
        let d = periodic_derivative(m, h);
        let d2 = periodic_second_derivative(m, h);
        for i in 0..m {
            let a: f64 = (0..m).map(|j| d[(i, j)] * (kk * x[j]).sin()).sum();
            let b: f64 = (0..m).map(|j| d2[(i, j)] * (kk * x[j]).sin()).sum();
            assert!((a - kk * (kk * x[i]).cos()).abs() < 1e-12);
            assert!((b + kk * kk * (kk * x[i]).sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn second_derivative_is_square_of_first() {
        let d = periodic_derivative(24, 0.7);
        let sq = &d * &d;
        let d2 = periodic_second_derivative(24, 0.7);
        assert!((&sq - &d2).norm_max() < 1e-12 * d2.norm_max());
    }

    #[test]
    fn sine_transform_is_involution() {
        let s = dst4(17);
        let c = dct4(17);
        let id = Mat::<f64>::identity(17, 17);
        assert!((&(&s * &s) - &id).norm_max() < 1e-14);
        assert!((&(&c * &c) - &id).norm_max() < 1e-14);
    }
}
