//! Dense operator matrices tagged with the basis they act in.

use std::fmt;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Representation a matrix is written in. Operators may only be combined
/// when their bases agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Basis {
    /// Truncated Fock basis |k, n>, n < N.
    Fock,
    /// Monomial basis z^n of the analytic representation.
    Monomial,
    /// Uniform momentum grid on [-half_width, half_width].
    MomentumLine { points: usize, half_width: f64 },
    /// Uniform staggered position grid on (0, length).
    PositionHalfLine { points: usize, length: f64 },
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Fock => write!(f, "fock"),
            Basis::Monomial => write!(f, "monomial"),
            Basis::MomentumLine { points, half_width } => {
                write!(f, "momentum-line/{points}/{half_width}")
            }
            Basis::PositionHalfLine { points, length } => {
                write!(f, "position-half-line/{points}/{length}")
            }
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 1,
            reason: format!("unknown basis tag `{s}`"),
        };
        let mut parts = s.split('/');
        let kind = parts.next().ok_or_else(bad)?;
        let mut grid = || -> Result<(usize, f64)> {
            let m = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let l = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            Ok((m, l))
        };
        match kind {
            "fock" => Ok(Basis::Fock),
            "monomial" => Ok(Basis::Monomial),
            "momentum-line" => {
                let (points, half_width) = grid()?;
                Ok(Basis::MomentumLine { points, half_width })
            }
            "position-half-line" => {
                let (points, length) = grid()?;
                Ok(Basis::PositionHalfLine { points, length })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub basis: Basis,
    pub mat: Mat<c64>,
}

impl OperatorMatrix {
    pub fn new(basis: Basis, mat: Mat<c64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { basis, mat }
    }

    pub fn from_fn(basis: Basis, n: usize, f: impl FnMut(usize, usize) -> c64) -> Self {
        Self::new(basis, Mat::from_fn(n, n, f))
    }

    pub fn zeros(basis: Basis, n: usize) -> Self {
        Self::new(basis, Mat::zeros(n, n))
    }

    pub fn identity(basis: Basis, n: usize) -> Self {
        Self::new(basis, Mat::identity(n, n))
    }

    pub fn diagonal(basis: Basis, d: &[c64]) -> Self {
        let n = d.len();
        Self::from_fn(basis, n, |i, j| if i == j { d[i] } else { c64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.to_string(),
                right: other.basis.to_string(),
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self::new(self.basis.clone(), &self.mat * &other.mat))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self::new(self.basis.clone(), &self.mat + &other.mat))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self::new(self.basis.clone(), &self.mat - &other.mat))
    }

    pub fn scale(&self, s: c64) -> Self {
        Self::new(self.basis.clone(), Mat::from_fn(self.dim(), self.dim(), |i, j| s * self.mat[(i, j)]))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c64::new(s, 0.0))
    }

    /// a A + b B
    pub fn lin_comb(a: c64, x: &Self, b: c64, y: &Self) -> Result<Self> {
        x.same_space(y)?;
        let n = x.dim();
        Ok(Self::from_fn(x.basis.clone(), n, |i, j| a * x.mat[(i, j)] + b * y.mat[(i, j)]))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.basis.clone(), self.mat.adjoint().to_owned())
    }

    /// [A, B] = AB - BA
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self::new(
            self.basis.clone(),
            &self.mat * &other.mat - &other.mat * &self.mat,
        ))
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match operator dimension");
        (0..n)
            .map(|i| {
                let mut s = c64::new(0.0, 0.0);
                for (j, vj) in v.iter().enumerate() {
                    s += self.mat[(i, j)] * vj;
                }
                s
            })
            .collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.mat.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.norm_max()
    }

    /// ||A - A^dag||_F / ||A||_F
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        for i in 0..n {
            for j in 0..n {
                num += (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm_sqr();
            }
        }
        let den = self.frobenius();
        if den == 0.0 {
            0.0
        } else {
            num.sqrt() / den
        }
    }

    /// Largest |entry| over rows r0..r1 and columns c0..c1.
    pub fn block_max_abs(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> f64 {
        let mut m: f64 = 0.0;
        for i in rows {
            for j in cols.clone() {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    /// Largest |entry| of self - other in the leading n x n block.
    pub fn block_distance(&self, other: &Self, n: usize) -> Result<f64> {
        self.same_space(other)?;
        let mut m: f64 = 0.0;
        for i in 0..n.min(self.dim()) {
            for j in 0..n.min(self.dim()) {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(m)
    }

    /// Leading n x n block.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.dim());
        Self::from_fn(self.basis.clone(), n, |i, j| self.mat[(i, j)])
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.mat.partial_piv_lu();
        let inv = lu.inverse();
        if inv.norm_max().is_finite() {
            Ok(Self::new(self.basis.clone(), inv))
        } else {
            Err(Error::Singular { context: "operator inverse" })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.mat.norm_max().is_finite()
    }
}

pub fn inner(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// <psi| [A, B] |psi> / <psi|psi> from matrix-vector products, for
/// Hermitian A: <A psi | B psi> - <B^dag psi | A psi>.
pub fn commutator_expectation(a: &OperatorMatrix, b: &OperatorMatrix, psi: &[c64]) -> c64 {
    let apsi = a.apply(psi);
    let bpsi = b.apply(psi);
    let badj = b.adjoint().apply(psi);
    (inner(&apsi, &bpsi) - inner(&badj, &apsi)) / inner(psi, psi)
}

fn one_norm(a: &Mat<c64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// e^A by scaling and squaring with the degree-13 Pade approximant.
/// Fails with `ExpOverflow` as soon as an intermediate stops being finite.
pub fn expm(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = a.dim();
    let norm = one_norm(&a.mat);
    if !norm.is_finite() {
        return Err(Error::ExpOverflow { norm });
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scale = c64::new(0.5f64.powi(s), 0.0);
    let x = Mat::from_fn(n, n, |i, j| scale * a.mat[(i, j)]);
    let ident = Mat::<c64>::identity(n, n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let b = |k: usize| c64::new(PADE13[k], 0.0);
    let comb = |m6: c64, m4: c64, m2: c64, m0: c64| {
        Mat::from_fn(n, n, |i, j| m6 * x6[(i, j)] + m4 * x4[(i, j)] + m2 * x2[(i, j)] + m0 * ident[(i, j)])
    };
    let u_inner = &x6 * &comb(b(13), b(11), b(9), c64::new(0.0, 0.0));
    let u_tail = comb(b(7), b(5), b(3), b(1));
    let u = &x * &(&u_inner + &u_tail);
    let v_inner = &x6 * &comb(b(12), b(10), b(8), c64::new(0.0, 0.0));
    let v = &v_inner + &comb(b(6), b(4), b(2), b(0));
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.partial_piv_lu().inverse() * &p;
    check_finite(&r)?;
    for _ in 0..s {
        r = &r * &r;
        check_finite(&r)?;
    }
    Ok(OperatorMatrix::new(a.basis.clone(), r))
}

fn check_finite(m: &Mat<c64>) -> Result<()> {
    let mx = m.norm_max();
    if !mx.is_finite() || mx > 1e300 {
        return Err(Error::ExpOverflow { norm: mx });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Side;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn exp_of_nilpotent_is_polynomial() {
        let a = OperatorMatrix::from_fn(Basis::Fock, 3, |i, j| {
            if j == i + 1 {
                c(2.0, 1.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let e = expm(&a).unwrap();
        let want = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let z = c(2.0, 1.0);
        for i in 0..3 {
            for j in 0..3 {
                let mut w = c(want[i][j], 0.0);
                if j == i + 1 {
                    w += z;
                }
                if j == i + 2 {
                    w += z * z / 2.0;
                }
                assert!((e.get(i, j) - w).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn exp_of_hermitian_matches_spectral_formula() {
        let n = 12;
        let a = OperatorMatrix::from_fn(Basis::Fock, n, |i, j| {
            let x = ((i * 7 + j * 3) % 11) as f64 - 5.0;
            let y = if i == j { 0.0 } else { ((i + 2 * j) % 5) as f64 - 2.0 };
            let s = if i <= j { 1.0 } else { -1.0 };
            c(x + ((j * 7 + i * 3) % 11) as f64 - 5.0, s * y)
        });
        let a = a.add(&a.adjoint()).unwrap().scale_re(0.5);
        let e = expm(&a).unwrap();
        let eig = a.mat.self_adjoint_eigen(Side::Lower).unwrap();
        let u = eig.U();
        let w = eig.S();
        let ref_ = Mat::from_fn(n, n, |i, j| {
            (0..n).map(|k| u[(i, k)] * w[k].re.exp() * u[(j, k)].conj()).sum::<c64>()
        });
        let rel = (&e.mat - &ref_).norm_l2() / ref_.norm_l2();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn exp_inverse_pair() {
        let a = OperatorMatrix::from_fn(Basis::Fock, 8, |i, j| c((i as f64 - j as f64) * 0.7, (i * j) as f64 * 0.05));
        let p = expm(&a).unwrap();
        let m = expm(&a.scale_re(-1.0)).unwrap();
        let prod = p.mul(&m).unwrap();
        let d = prod.block_distance(&OperatorMatrix::identity(Basis::Fock, 8), 8).unwrap();
        assert!(d < 1e-11, "{d}");
    }

    #[test]
    fn exp_overflow_is_reported() {
        let a = OperatorMatrix::diagonal(Basis::Fock, &[c(800.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(expm(&a), Err(Error::ExpOverflow { .. })));
    }

    #[test]
    fn basis_mismatch_is_an_error() {
        let a = OperatorMatrix::identity(Basis::Fock, 2);
        let b = OperatorMatrix::identity(Basis::Monomial, 2);
        assert!(matches!(a.mul(&b), Err(Error::BasisMismatch { .. })));
        let c3 = OperatorMatrix::identity(Basis::Fock, 3);
        assert!(matches!(a.add(&c3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn basis_tags_round_trip() {
        for b in [
            Basis::Fock,
            Basis::Monomial,
            Basis::MomentumLine { points: 512, half_width: 16.0 },
            Basis::PositionHalfLine { points: 256, length: 10.5 },
        ] {
            assert_eq!(b.to_string().parse::<Basis>().unwrap(), b);
        }
        assert!("grid".parse::<Basis>().is_err());
    }
}
