//! Barut-Girardello coherent states |z, k> (eigenvectors of K-) in the
//! truncated Fock basis, their overlaps, the analytic (Bargmann-like)
//! representation, and cubature over the BG measure
//!
//!   dmu(z) = 2 K_{2k-1}(2|z|) I_{2k-1}(2|z|) d^2z / pi.
//!
//! Coefficients are c_n = P(z) z^n / sqrt(n! Gamma(2k+n)) with
//! P(z) = |z|^{k-1/2} e^{i theta (k-1/2)} / sqrt(I_{2k-1}(2|z|)); the phase
//! depends on the branch chosen for theta = arg z.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::report::CheckReport;
use crate::specfun::{bessel_k_scaled, ln_bessel_i, ln_gamma, QuadratureSpec};
use crate::su11_fock::{build_generators, kplus_element, ModelParams};

/// Largest tail weight a stored state may drop.
pub const TAIL_LIMIT: f64 = 1e-12;
/// Largest truncation the automatic rule will try.
pub const MAX_TRUNCATION: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchConvention {
    /// theta in (-pi, pi]
    #[default]
    Principal,
    /// theta in [0, 2 pi)
    Positive,
}

impl BranchConvention {
    pub fn theta(self, z: c64) -> f64 {
        let t = z.im.atan2(z.re);
        match self {
            BranchConvention::Principal => {
                if t <= -PI {
                    PI
                } else {
                    t
                }
            }
            BranchConvention::Positive => {
                if t < 0.0 {
                    let s = t + 2.0 * PI;
                    if s >= 2.0 * PI {
                        0.0
                    } else {
                        s
                    }
                } else {
                    t
                }
            }
        }
    }

    /// Lower end of the angular interval.
    pub fn theta_start(self) -> f64 {
        match self {
            BranchConvention::Principal => -PI,
            BranchConvention::Positive => 0.0,
        }
    }
}

impl std::str::FromStr for BranchConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "principal" => Ok(Self::Principal),
            "positive" => Ok(Self::Positive),
            _ => Err(Error::Config {
                field: "branch".into(),
                reason: format!("expected principal|positive, got `{s}`"),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentVector {
    pub z: c64,
    pub k: f64,
    pub coeffs: Vec<c64>,
    pub branch: BranchConvention,
    /// analytic bound on the weight beyond the truncation
    pub tail: f64,
}

impl CoherentVector {
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ||K- v - z v||
    pub fn eigen_residual(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for m in 0..n {
            let kv = if m + 1 < n {
                self.coeffs[m + 1] * kplus_element(m, self.k)
            } else {
                c64::new(0.0, 0.0)
            };
            s += (kv - self.z * self.coeffs[m]).norm_sqr();
        }
        s.sqrt()
    }
}

fn ln_norm(n: usize, k: f64) -> f64 {
    // 1/2 ln(n! Gamma(2k+n))
    0.5 * (ln_gamma(n as f64 + 1.0).unwrap_or(0.0) + ln_gamma(2.0 * k + n as f64).unwrap_or(0.0))
}

/// Upper bound on sum_{n >= N} |c_n|^2 for a normalised state.
pub fn tail_bound(r: f64, k: f64, n: usize) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let rho = r * r / ((nf + 1.0) * (nf + 2.0 * k));
    if rho >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let ln_t = 2.0 * nf * r.ln() - 2.0 * ln_norm(n, k);
    let ln_s = (1.0 - 2.0 * k) * r.ln() + ln_bessel_i(2.0 * k - 1.0, 2.0 * r)?;
    Ok((ln_t - ln_s).exp() / (1.0 - rho))
}

/// max(32, ceil(4|z| + 20)), doubled until the tail bound holds.
pub fn auto_truncation(z: c64, k: f64) -> Result<usize> {
    let r = z.norm();
    let mut n = 32usize.max((4.0 * r + 20.0).ceil() as usize);
    loop {
        let tail = tail_bound(r, k, n)?;
        if tail <= TAIL_LIMIT {
            return Ok(n);
        }
        if n >= MAX_TRUNCATION {
            return Err(Error::Truncation {
                n,
                tail,
                limit: TAIL_LIMIT,
            });
        }
        n = (2 * n).min(MAX_TRUNCATION);
    }
}

/// z^n / sqrt(n! Gamma(2k+n)) for n < N, without the prefactor.
pub fn unnormalized_coefficients(z: c64, k: f64, n: usize) -> Result<Vec<c64>> {
    let r = z.norm();
    let mut out = Vec::with_capacity(n);
    if r == 0.0 {
        out.push(c64::new((-ln_norm(0, k)).exp(), 0.0));
        out.resize(n, c64::new(0.0, 0.0));
        return Ok(out);
    }
    let u = z / r;
    let mut phase = c64::new(1.0, 0.0);
    for m in 0..n {
        let mag = (m as f64 * r.ln() - ln_norm(m, k)).exp();
        out.push(phase * mag);
        phase *= u;
    }
    Ok(out)
}

/// Eq (11) coefficients at truncation N; errors if the tail bound exceeds
/// TAIL_LIMIT. z = 0 gives the Fock vacuum.
pub fn bg_state(z: c64, params: &ModelParams, n: usize, branch: BranchConvention) -> Result<CoherentVector> {
    if n == 0 {
        return Err(invalid("N", "truncation must be positive"));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(invalid("z", "label must be finite"));
    }
    let k = params.k;
    let r = z.norm();
    if r == 0.0 {
        let mut coeffs = vec![c64::new(0.0, 0.0); n];
        coeffs[0] = c64::new(1.0, 0.0);
        return Ok(CoherentVector {
            z,
            k,
            coeffs,
            branch,
            tail: 0.0,
        });
    }
    let tail = tail_bound(r, k, n)?;
    if tail > TAIL_LIMIT {
        return Err(Error::Truncation {
            n,
            tail,
            limit: TAIL_LIMIT,
        });
    }
    let theta = branch.theta(z);
    let ln_p = (k - 0.5) * r.ln() - 0.5 * ln_bessel_i(2.0 * k - 1.0, 2.0 * r)?;
    let u = z / r;
    let mut phase = c64::from_polar(1.0, (k - 0.5) * theta);
    let mut coeffs = Vec::with_capacity(n);
    for m in 0..n {
        let mag = (ln_p + m as f64 * r.ln() - ln_norm(m, k)).exp();
        coeffs.push(phase * mag);
        phase *= u;
    }
    Ok(CoherentVector {
        z,
        k,
        coeffs,
        branch,
        tail,
    })
}

/// bg_state with the automatic truncation rule.
pub fn bg_state_auto(z: c64, params: &ModelParams, branch: BranchConvention) -> Result<CoherentVector> {
    let n = auto_truncation(z, params.k)?;
    bg_state(z, params, n, branch)
}

/// Eq (16): e^{z K+ (K3+k)^-1}|0>, summed exactly (the exponent is
/// nilpotent under truncation), then normalised and given the branch phase
/// e^{i theta (k-1/2)} of the leading coefficient.
pub fn bg_state_exponential(
    z: c64,
    params: &ModelParams,
    n: usize,
    branch: BranchConvention,
) -> Result<CoherentVector> {
    let reference_tail = tail_bound(z.norm(), params.k, n)?;
    if reference_tail > TAIL_LIMIT {
        return Err(Error::Truncation {
            n,
            tail: reference_tail,
            limit: TAIL_LIMIT,
        });
    }
    let k = params.k;
    let mut term = vec![c64::new(0.0, 0.0); n];
    term[0] = c64::new(1.0, 0.0);
    let mut sum = term.clone();
    for j in 1..n {
        // term <- z A term / j with A = K+ (K3 + k)^-1, a lower shift
        let mut next = vec![c64::new(0.0, 0.0); n];
        for m in 0..n - 1 {
            next[m + 1] = term[m] * (kplus_element(m, k) / (m as f64 + 2.0 * k)) * z / j as f64;
        }
        term = next;
        let mut any = false;
        for (s, t) in sum.iter_mut().zip(&term) {
            if *t != c64::new(0.0, 0.0) {
                any = true;
            }
            *s += t;
        }
        if !any {
            break;
        }
    }
    let norm = sum.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let phase = if z.norm() == 0.0 {
        c64::new(1.0, 0.0)
    } else {
        c64::from_polar(1.0, (k - 0.5) * branch.theta(z))
    };
    Ok(CoherentVector {
        z,
        k,
        coeffs: sum.into_iter().map(|c| c * phase / norm).collect(),
        branch,
        tail: reference_tail,
    })
}

/// sum_n w^n / (n! Gamma(2k+n)) for complex w.
fn reduced_bessel_series(w: c64, k: f64) -> c64 {
    let mut term = c64::new((-ln_gamma(2.0 * k).unwrap_or(0.0)).exp(), 0.0);
    let mut sum = term;
    let mut peak = term.norm();
    let min_terms = 2.0 * w.norm().sqrt() + 10.0;
    for n in 0..100_000usize {
        let nf = n as f64;
        term *= w / ((nf + 1.0) * (nf + 2.0 * k));
        sum += term;
        peak = peak.max(term.norm());
        if nf > min_terms && term.norm() < 1e-18 * peak {
            break;
        }
    }
    sum
}

/// Eq (12) overlap <z1|z2>, with the Bessel function of complex argument
/// taken as a power series in conj(z1) z2 and the branch phases of the two
/// states kept explicitly.
pub fn overlap(z1: c64, z2: c64, params: &ModelParams, branch: BranchConvention) -> Result<c64> {
    let (r1, r2) = (z1.norm(), z2.norm());
    if r1 > 50.0 || r2 > 50.0 {
        return Err(invalid("z", "overlap series is limited to |z| <= 50"));
    }
    let k = params.k;
    let nu = 2.0 * k - 1.0;
    let ln_p = |r: f64| -> Result<f64> {
        Ok((k - 0.5) * r.ln() - 0.5 * ln_bessel_i(nu, 2.0 * r)?)
    };
    let c0 = |z: c64, r: f64| -> Result<c64> {
        // <0|z>
        let mag = (ln_p(r)? - 0.5 * ln_gamma(2.0 * k)?).exp();
        Ok(c64::from_polar(mag, (k - 0.5) * branch.theta(z)))
    };
    match (r1 == 0.0, r2 == 0.0) {
        (true, true) => return Ok(c64::new(1.0, 0.0)),
        (true, false) => return c0(z2, r2),
        (false, true) => return Ok(c0(z1, r1)?.conj()),
        _ => {}
    }
    let s = reduced_bessel_series(z1.conj() * z2, k);
    let mag = (ln_p(r1)? + ln_p(r2)?).exp();
    let phase = c64::from_polar(1.0, (k - 0.5) * (branch.theta(z2) - branch.theta(z1)));
    Ok(s * phase * mag)
}

/// Fock inner product of two coefficient vectors.
pub fn inner_product(a: &CoherentVector, b: &CoherentVector) -> c64 {
    a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.conj() * y).sum()
}

/// Polynomial f(z) = sum a_n z^n of the analytic representation, with the
/// common prefactor removed: |n,k> <-> z^n sqrt-free, i.e. Fock
/// coefficients psi_n map to a_n = psi_n / sqrt(n! Gamma(2k+n)).
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticPoly {
    pub coeffs: Vec<c64>,
    pub k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Kplus,
    Kminus,
    K3,
}

impl AnalyticPoly {
    pub fn monomial(n: usize, capacity: usize, k: f64) -> Self {
        let mut coeffs = vec![c64::new(0.0, 0.0); capacity];
        coeffs[n] = c64::new(1.0, 0.0);
        Self { coeffs, k }
    }

    pub fn from_fock(psi: &[c64], k: f64) -> Self {
        let coeffs = psi
            .iter()
            .enumerate()
            .map(|(n, c)| c * (-ln_norm(n, k)).exp())
            .collect();
        Self { coeffs, k }
    }

    pub fn to_fock(&self) -> Vec<c64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * ln_norm(n, self.k).exp())
            .collect()
    }

    pub fn capacity(&self) -> usize {
        self.coeffs.len()
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != c64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: c64) -> c64 {
        self.coeffs.iter().rev().fold(c64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

/// K+ = z, K- = 2k d/dz + z d^2/dz^2, K3 = k + z d/dz on polynomial
/// coefficients.
pub fn analytic_apply(op: Generator, f: &AnalyticPoly) -> Result<AnalyticPoly> {
    let n = f.capacity();
    let k = f.k;
    let mut out = vec![c64::new(0.0, 0.0); n];
    match op {
        Generator::Kplus => {
            if f.degree().is_some_and(|d| d + 1 >= n) {
                return Err(invalid("degree", format!("K+ would exceed degree {}", n - 1)));
            }
            if n > 0 {
                out[1..].copy_from_slice(&f.coeffs[..n - 1]);
            }
        }
        Generator::Kminus => {
            for m in 1..n {
                let mf = m as f64;
                out[m - 1] = f.coeffs[m] * (mf * (2.0 * k + mf - 1.0));
            }
        }
        Generator::K3 => {
            for m in 0..n {
                out[m] = f.coeffs[m] * (k + m as f64);
            }
        }
    }
    Ok(AnalyticPoly { coeffs: out, k })
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const CHUNK: usize = 16;

/// Radial moments R_nm = sum_r w_r W(r) a_n(r) a_m(r) with
/// W(r) = (2/pi) K_{2k-1}(2r) r^{2k} and a_n(r) = r^n / sqrt(n! Gamma(2k+n)).
/// Nodes are split into fixed chunks, each accumulated with compensation,
/// and the chunks are combined in order, so the result does not depend on
/// the number of worker threads.
pub(crate) fn radial_moments(k: f64, n: usize, quad: &QuadratureSpec) -> Result<Vec<f64>> {
    let nu = 2.0 * k - 1.0;
    let lnorm: Vec<f64> = (0..n).map(|m| ln_norm(m, k)).collect();
    let nodes: Vec<(f64, f64)> = quad
        .radial
        .nodes
        .iter()
        .copied()
        .zip(quad.radial.weights.iter().copied())
        .collect();
    let partials: Vec<Result<Vec<Kahan>>> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![Kahan::default(); n * n];
            let mut amp = vec![0.0; n];
            for &(r, w) in chunk {
                if r <= 0.0 || w <= 0.0 {
                    continue;
                }
                let ln_w = (2.0 / PI).ln() + bessel_k_scaled(nu, 2.0 * r)?.ln() - 2.0 * r + 2.0 * k * r.ln();
                let half = 0.5 * (ln_w + w.ln());
                for (m, a) in amp.iter_mut().enumerate() {
                    *a = (half + m as f64 * r.ln() - lnorm[m]).exp();
                }
                for i in 0..n {
                    for j in i..n {
                        acc[i * n + j].add(amp[i] * amp[j]);
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![Kahan::default(); n * n];
    for p in partials {
        let p = p?;
        for (t, c) in total.iter_mut().zip(&p) {
            t.add(c.sum);
            t.add(c.comp);
        }
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = total[i * n + j].value();
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Ok(out)
}

/// Angular sums A_q = sum_theta w_theta g(theta) e^{i q theta} for
/// q in (-N, N), indexed by q + N - 1.
pub(crate) fn angular_sums(n: usize, quad: &QuadratureSpec, g: impl Fn(f64) -> f64) -> Vec<c64> {
    let mut out = Vec::with_capacity(2 * n - 1);
    for q in -(n as i64 - 1)..=(n as i64 - 1) {
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (&t, &w) in quad.angular.nodes.iter().zip(&quad.angular.weights) {
            let gw = w * g(t);
            let (s, c) = (q as f64 * t).sin_cos();
            re.add(gw * c);
            im.add(gw * s);
        }
        out.push(c64::new(re.value(), im.value()));
    }
    out
}

/// Cubature of (1/norm) int dmu g(theta) |z><z| on the leading n x n block.
pub(crate) fn disc_integral(
    k: f64,
    n: usize,
    quad: &QuadratureSpec,
    g: impl Fn(f64) -> f64,
) -> Result<Mat<c64>> {
    let radial = radial_moments(k, n, quad)?;
    let ang = angular_sums(n, quad, g);
    Ok(Mat::from_fn(n, n, |i, j| {
        let q = i as i64 - j as i64;
        ang[(q + n as i64 - 1) as usize] * radial[i * n + j]
    }))
}

/// int dmu |z><z| on the top n_check block, compared with the identity,
/// plus a node-doubling stability check.
pub fn resolution_of_identity(
    params: &ModelParams,
    n_check: usize,
    quad: &QuadratureSpec,
    tol: f64,
    drift_tol: f64,
) -> Result<(Mat<c64>, CheckReport)> {
    if n_check == 0 || n_check > 16 {
        return Err(invalid("N_check", "must be in 1..=16"));
    }
    let k = params.k;
    let m = disc_integral(k, n_check, quad, |_| 1.0)?;
    let err = Mat::from_fn(n_check, n_check, |i, j| {
        let want = if i == j { 1.0 } else { 0.0 };
        c64::new((m[(i, j)] - c64::new(want, 0.0)).norm(), 0.0)
    })
    .norm_max();
    let m2 = disc_integral(k, n_check, &quad.doubled()?, |_| 1.0)?;
    let drift = (&m2 - &m).norm_max();
    let mut rep = CheckReport::new("resolution-of-identity").with_params(params);
    rep.set_config("N_check", n_check);
    rep.set_config("radial_nodes", quad.radial.len());
    rep.set_config("angular_nodes", quad.angular.len());
    rep.set_config("r_max", quad.r_max);
    rep.at_most("max |block - I|", err, tol);
    rep.at_most("node-doubling drift", drift, drift_tol);
    rep.info("entry (0,0)", m[(0, 0)].re);
    if n_check > 5 {
        rep.info("entry (5,5)", m[(5, 5)].re);
    }
    Ok((m, rep))
}

/// Standard quadrature for level-n_max moments: mapped Gauss-Legendre
/// radial rule and the given angular rule.
pub fn default_quadrature(
    k: f64,
    n_max: usize,
    radial_nodes: usize,
    angular_nodes: usize,
    rule: crate::specfun::AngularRule,
    branch: BranchConvention,
) -> Result<QuadratureSpec> {
    QuadratureSpec::for_measure(k, n_max, radial_nodes, angular_nodes, rule, branch.theta_start())
}

/// Fock matrix of a generator restricted to its leading block, as seen
/// through the analytic representation.
pub fn analytic_matrix(op: Generator, n: usize, k: f64) -> Result<Mat<c64>> {
    let mut m = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        let f = AnalyticPoly::monomial(j, n + 1, k);
        let g = analytic_apply(op, &f)?;
        for i in 0..n {
            m[(i, j)] = g.coeffs[i];
        }
    }
    Ok(m)
}

/// Max deviation between analytic-representation and Fock matrix elements
/// of K+, K-, K3 on the leading n x n block, after the sqrt(n! Gamma(2k+n))
/// rescaling.
pub fn analytic_fock_deviation(params: &ModelParams, n: usize) -> Result<f64> {
    let k = params.k;
    let g = build_generators(params, n + 1)?;
    let mut worst: f64 = 0.0;
    for (op, fock) in [
        (Generator::Kplus, &g.kplus),
        (Generator::Kminus, &g.kminus),
        (Generator::K3, &g.k3),
    ] {
        let a = analytic_matrix(op, n, k)?;
        for i in 0..n {
            for j in 0..n {
                let scaled = a[(i, j)] * (ln_norm(i, k) - ln_norm(j, k)).exp();
                worst = worst.max((scaled - fock.get(i, j)).norm());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::AngularRule;

    fn p(g: f64) -> ModelParams {
        ModelParams::new(1.0, g).unwrap()
    }

    #[test]
    fn vacuum_limit() {
        let v = bg_state(c64::new(0.0, 0.0), &p(2.0), 16, BranchConvention::Principal).unwrap();
        assert_eq!(v.coeffs[0], c64::new(1.0, 0.0));
        assert_eq!(v.eigen_residual(), 0.0);
        let e = bg_state_exponential(c64::new(0.0, 0.0), &p(2.0), 16, BranchConvention::Principal).unwrap();
        assert_eq!(e.coeffs, v.coeffs);
    }

    #[test]
    fn eigenvector_and_norm() {
        let v = bg_state(c64::new(1.0, 0.0), &p(2.0), 64, BranchConvention::Principal).unwrap();
        assert!(v.eigen_residual() <= 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        // coefficient ratio from the K- matrix elements
        for n in 1..10 {
            let lhs = v.coeffs[n] * kplus_element(n - 1, v.k);
            assert!((lhs - v.coeffs[n - 1]).norm() < 1e-15);
        }
    }

    #[test]
    fn truncation_error() {
        let r = bg_state(c64::new(20.0, 0.0), &p(2.0), 16, BranchConvention::Principal);
        assert!(matches!(r, Err(Error::Truncation { .. })));
        assert!(auto_truncation(c64::new(20.0, 0.0), 1.25).unwrap() >= 100);
    }

    #[test]
    fn overlap_example() {
        let o = overlap(c64::new(1.0, 0.0), c64::new(-1.0, 0.0), &p(2.0), BranchConvention::Principal).unwrap();
        // J_{3/2}(2) / I_{3/2}(2) from the half-integer closed forms
        let x: f64 = 2.0;
        let pref = (2.0 / (PI * x)).sqrt();
        let j = pref * (x.sin() / x - x.cos());
        let i = pref * (x.cosh() - x.sinh() / x);
        assert!((o.norm() - j / i).abs() < 1e-13, "{}", o.norm());
        assert!((o.norm() - 0.4469).abs() < 1e-4);
        assert!((o.arg() - 0.75 * PI).abs() < 1e-12);
        let s = overlap(c64::new(0.3, 1.1), c64::new(0.3, 1.1), &p(2.0), BranchConvention::Principal).unwrap();
        assert!((s - c64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn branch_angles() {
        let b = BranchConvention::Principal;
        assert_eq!(b.theta(c64::new(-1.0, -0.0)), PI);
        assert_eq!(b.theta(c64::new(-1.0, 0.0)), PI);
        let q = BranchConvention::Positive;
        assert!((q.theta(c64::new(0.0, -1.0)) - 1.5 * PI).abs() < 1e-15);
        assert_eq!(q.theta(c64::new(1.0, -0.0)), 0.0);
    }

    #[test]
    fn analytic_examples() {
        let k = 1.25;
        let f = AnalyticPoly::monomial(3, 8, k);
        let g = analytic_apply(Generator::K3, &f).unwrap();
        assert_eq!(g.coeffs[3], c64::new(k + 3.0, 0.0));
        let z1 = AnalyticPoly::monomial(1, 8, k);
        let g = analytic_apply(Generator::Kminus, &z1).unwrap();
        assert_eq!(g.coeffs[0], c64::new(2.0 * k, 0.0));
        let top = AnalyticPoly::monomial(7, 8, k);
        assert!(analytic_apply(Generator::Kplus, &top).is_err());
        assert!(analytic_fock_deviation(&p(2.0), 12).unwrap() < 1e-12);
    }

    #[test]
    fn identity_resolution_small() {
        let k = p(2.0).k;
        let q = default_quadrature(k, 5, 200, 64, AngularRule::Trapezoid, BranchConvention::Principal).unwrap();
        let (m, _) = resolution_of_identity(&p(2.0), 6, &q, 1e-8, 1e-9).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - c64::new(want, 0.0)).norm() < 1e-10, "{i} {j}");
            }
        }
    }
}
