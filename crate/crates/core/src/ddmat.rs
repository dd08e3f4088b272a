//! Double-double real arithmetic (about 32 significant digits) and the few
//! dense matrix operations needed to conjugate by large exponentials
//! without hitting the f64 roundoff floor.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step on the f64 root
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Dd { hi, lo }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Dense square matrix of double-doubles, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct DdMatrix {
    n: usize,
    data: Vec<Dd>,
}

impl DdMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Dd::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Dd::ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Dd) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Dd {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, o.n);
        let mut out = vec![Dd::ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.hi == 0.0 {
                    continue;
                }
                let orow = &o.data[k * n..(k + 1) * n];
                for (r, b) in row.iter_mut().zip(orow) {
                    *r = *r + a * *b;
                }
            }
        }
        Self { n, data: out }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn scale(&self, s: Dd) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| *a * s).collect(),
        }
    }

    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).hi.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.hi.abs()))
    }

    /// e^A by scaling to norm <= 1/2, a Taylor series to double-double
    /// precision, and repeated squaring.
    pub fn expm(&self) -> Self {
        let norm = self.one_norm();
        let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let x = self.scale(Dd::new(0.5f64.powi(s)));
        let mut sum = DdMatrix::identity(self.n);
        let mut term = DdMatrix::identity(self.n);
        for k in 1..60 {
            term = term.mul(&x).scale(Dd::ONE / Dd::new(k as f64));
            sum = sum.add(&term);
            if term.max_abs() < 1e-34 * sum.max_abs() {
                break;
            }
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_f64() {
        let third = Dd::ONE / Dd::new(3.0);
        let back = third * Dd::new(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let r2 = Dd::new(2.0).sqrt();
        assert!((r2 * r2 - Dd::new(2.0)).to_f64().abs() < 1e-31);
        // 1 + 2^-70 survives
        let tiny = 2f64.powi(-70);
        let s = Dd::ONE + Dd::new(tiny) - Dd::ONE;
        assert_eq!(s.to_f64(), tiny);
    }

    #[test]
    fn expm_of_rotation_generator() {
        // exp([[0, t], [-t, 0]]) = [[cos t, sin t], [-sin t, cos t]]
        let t = 3.0;
        let a = DdMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => Dd::new(t),
            (1, 0) => Dd::new(-t),
            _ => Dd::ZERO,
        });
        let e = a.expm();
        assert!((e.get(0, 0).to_f64() - t.cos()).abs() < 1e-15);
        assert!((e.get(0, 1).to_f64() - t.sin()).abs() < 1e-15);
    }

    #[test]
    fn exp_pair_cancels_to_double_double_precision() {
        let n = 6;
        let a = DdMatrix::from_fn(n, |i, j| Dd::new(((i + 2 * j) % 5) as f64 - 1.5));
        let p = a.expm();
        let m = a.scale(Dd::new(-1.0)).expm();
        let prod = p.mul(&m);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                let err = (prod.get(i, j) - Dd::new(want)).to_f64().abs();
                assert!(err < 1e-20, "{i} {j} {err}");
            }
        }
    }
}
