//! The time operator
//!
//!   T = (4 pi i)^-1 int dmu(z) ln(z / z*) |z,k><z,k|,   ln(z/z*) = 2 i theta,
//!
//! as a Fock-basis matrix. The formal definition through ln K- - ln K+ is
//! not usable here: truncated K- is nilpotent and has no logarithm, so the
//! coherent-state integral is the working definition.
//!
//! Entries reduce to T_nm = (1/pi^2) A_q R_nm / sqrt(n! Gamma(2k+n) m! Gamma(2k+m))
//! with q = n - m, R_nm = int K_{2k-1}(2r) r^{2k+n+m} dr and
//! A_q = int theta e^{i q theta} d theta over the branch interval.

use std::f64::consts::PI;

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::bg_coherent::{bg_state, default_quadrature, disc_integral, BranchConvention};
use crate::error::{invalid, Error, Result};
use crate::operator::{Basis, OperatorMatrix};
use crate::report::{CheckReport, ConvergenceTable};
use crate::specfun::{ln_gamma, AngularRule, QuadratureSpec};
use crate::su11_fock::{build_generators, ModelParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefactorMode {
    /// (4 pi i)^-1 exactly as in the integral above
    #[default]
    AsWritten,
    /// an extra 1/(2 omega), matching the 1/(4 i omega) of the formal
    /// logarithmic definition
    FrequencyScaled,
}

impl PrefactorMode {
    pub fn factor(self, omega: f64) -> f64 {
        match self {
            PrefactorMode::AsWritten => 1.0,
            PrefactorMode::FrequencyScaled => 1.0 / (2.0 * omega),
        }
    }
}

impl std::str::FromStr for PrefactorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-written" => Ok(Self::AsWritten),
            "frequency-scaled" => Ok(Self::FrequencyScaled),
            _ => Err(Error::Config {
                field: "prefactor".into(),
                reason: format!("expected as-written|frequency-scaled, got `{s}`"),
            }),
        }
    }
}

pub const DEFAULT_RADIAL_NODES: usize = 200;
pub const DEFAULT_ANGULAR_NODES: usize = 256;

#[derive(Clone, Debug)]
pub struct TimeOperatorConfig {
    pub params: ModelParams,
    pub n: usize,
    pub branch: BranchConvention,
    pub prefactor: PrefactorMode,
    pub quad: QuadratureSpec,
}

impl TimeOperatorConfig {
    /// Default cubature: 200 mapped Gauss-Legendre radial nodes and 256
    /// Gauss-Legendre angular nodes on the branch interval.
    pub fn new(params: ModelParams, n: usize, branch: BranchConvention, prefactor: PrefactorMode) -> Result<Self> {
        Self::with_nodes(params, n, branch, prefactor, DEFAULT_RADIAL_NODES, DEFAULT_ANGULAR_NODES)
    }

    pub fn with_nodes(
        params: ModelParams,
        n: usize,
        branch: BranchConvention,
        prefactor: PrefactorMode,
        radial_nodes: usize,
        angular_nodes: usize,
    ) -> Result<Self> {
        if n < 2 {
            return Err(invalid("N", "truncation must be >= 2"));
        }
        let quad = default_quadrature(params.k, n - 1, radial_nodes, angular_nodes, AngularRule::GaussLegendre, branch)?;
        Ok(Self {
            params,
            n,
            branch,
            prefactor,
            quad,
        })
    }
}

/// int theta e^{i q theta} d theta over the branch interval.
pub fn angular_factor(q: i64, branch: BranchConvention) -> c64 {
    let qf = q as f64;
    match (branch, q) {
        (BranchConvention::Principal, 0) => c64::new(0.0, 0.0),
        (BranchConvention::Principal, _) => {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            c64::new(0.0, -2.0 * PI * sign / qf)
        }
        (BranchConvention::Positive, 0) => c64::new(2.0 * PI * PI, 0.0),
        (BranchConvention::Positive, _) => c64::new(0.0, -2.0 * PI / qf),
    }
}

/// R_nm / sqrt(n! Gamma(2k+n) m! Gamma(2k+m)) from the Mellin transform of K.
pub fn radial_factor(n: usize, m: usize, k: f64) -> Result<f64> {
    let s = (n + m) as f64;
    let ln = (0.25f64).ln() + ln_gamma(2.0 * k + 0.5 * s)? + ln_gamma(0.5 * s + 1.0)?
        - 0.5 * (ln_gamma(n as f64 + 1.0)? + ln_gamma(2.0 * k + n as f64)?)
        - 0.5 * (ln_gamma(m as f64 + 1.0)? + ln_gamma(2.0 * k + m as f64)?);
    Ok(ln.exp())
}

pub fn assemble_t_closed_form(cfg: &TimeOperatorConfig) -> Result<OperatorMatrix> {
    let n = cfg.n;
    let k = cfg.params.k;
    let scale = cfg.prefactor.factor(cfg.params.omega) / (PI * PI);
    let mut radial = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let r = radial_factor(i, j, k)?;
            radial[i * n + j] = r;
            radial[j * n + i] = r;
        }
    }
    Ok(OperatorMatrix::from_fn(Basis::Fock, n, |i, j| {
        angular_factor(i as i64 - j as i64, cfg.branch) * radial[i * n + j] * scale
    }))
}

/// Cubature of the defining integral with the configured rule.
pub fn assemble_t_quadrature(cfg: &TimeOperatorConfig) -> Result<OperatorMatrix> {
    assemble_with(cfg, &cfg.quad)
}

fn assemble_with(cfg: &TimeOperatorConfig, quad: &QuadratureSpec) -> Result<OperatorMatrix> {
    let scale = cfg.prefactor.factor(cfg.params.omega);
    let m = disc_integral(cfg.params.k, cfg.n, quad, |t| t / (2.0 * PI))?;
    Ok(OperatorMatrix::from_fn(Basis::Fock, cfg.n, |i, j| m[(i, j)] * scale))
}

/// Cubature plus a node-doubling re-run; fails when any entry moves by
/// more than `drift_limit` relative to the largest entry.
pub fn assemble_t_quadrature_checked(cfg: &TimeOperatorConfig, drift_limit: f64) -> Result<(OperatorMatrix, f64)> {
    let t = assemble_with(cfg, &cfg.quad)?;
    let t2 = assemble_with(cfg, &cfg.quad.doubled()?)?;
    let drift = t2.sub(&t)?.max_abs() / t.max_abs().max(f64::MIN_POSITIVE);
    if drift > drift_limit {
        return Err(Error::UnderResolved {
            drift,
            limit: drift_limit,
        });
    }
    Ok((t, drift))
}

/// Largest entrywise |a - b| / |b| over the leading block, with entries of
/// b that vanish exactly compared absolutely.
pub fn relative_block_deviation(a: &OperatorMatrix, b: &OperatorMatrix, block: usize) -> Result<f64> {
    if a.basis != b.basis || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let n = block.min(a.dim());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = (a.get(i, j) - b.get(i, j)).norm();
            let s = b.get(i, j).norm();
            worst = worst.max(if s > 0.0 { d / s } else { d });
        }
    }
    Ok(worst)
}

/// C = [H_CS, T]: exact zero diagonal, C_nm = 2 omega (n - m) T_nm, and
/// the canonical defect |C_nn - i| (which cannot vanish in this basis).
pub fn commutator_structure(t: &OperatorMatrix, params: &ModelParams) -> Result<CheckReport> {
    let n = t.dim();
    let g = build_generators(params, n)?;
    let c = g.h_cs.commutator(t)?;
    let w = params.omega;
    let mut rep = CheckReport::new("commutator-structure").with_params(params);
    rep.set_config("N", n);
    let diag = (0..n).map(|i| c.get(i, i).norm()).fold(0.0, f64::max);
    rep.at_most("max |diag [H_CS, T]|", diag, 0.0);
    let recon = OperatorMatrix::from_fn(Basis::Fock, n, |i, j| t.get(i, j) * (2.0 * w * (i as f64 - j as f64)));
    let dev = c.sub(&recon)?.max_abs() / c.max_abs().max(f64::MIN_POSITIVE);
    rep.at_most("[H_CS, T] vs 2 omega (n-m) T_nm (relative)", dev, 1e-13);
    let ident = OperatorMatrix::identity(Basis::Fock, n).scale(c64::new(0.0, 1.0));
    let defect = c.sub(&ident)?;
    let mut table = ConvergenceTable::new("canonical-defect-diagonal", "n");
    for i in 0..n {
        table.push(i as f64, defect.get(i, i).norm());
    }
    rep.add_table(table);
    rep.info("||[H_CS, T] - i||_F / sqrt(N)", defect.frobenius() / (n as f64).sqrt());
    rep.info("min |[H_CS,T]_nn - i|", (0..n).map(|i| defect.get(i, i).norm()).fold(f64::INFINITY, f64::min));
    Ok(rep)
}

/// T + phi(H_CS) for a real polynomial phi (coefficients lowest degree first).
pub fn gauge_shift(t: &OperatorMatrix, phi: &[f64], params: &ModelParams) -> Result<OperatorMatrix> {
    if t.basis != Basis::Fock {
        return Err(invalid("T", "gauge shift needs a Fock-basis matrix"));
    }
    let n = t.dim();
    let shift: Vec<f64> = (0..n)
        .map(|i| {
            let h = 2.0 * params.omega * (i as f64 + params.k);
            phi.iter().rev().fold(0.0, |acc, c| acc * h + c)
        })
        .collect();
    Ok(OperatorMatrix::from_fn(Basis::Fock, n, |i, j| {
        if i == j {
            t.get(i, j) + shift[i]
        } else {
            t.get(i, j)
        }
    }))
}

/// max |[H_CS, T + phi(H_CS)] - [H_CS, T]|; zero in exact and in floating
/// point arithmetic since H_CS and phi(H_CS) are diagonal.
pub fn gauge_commutator_change(t: &OperatorMatrix, phi: &[f64], params: &ModelParams) -> Result<f64> {
    let g = build_generators(params, t.dim())?;
    let shifted = gauge_shift(t, phi, params)?;
    Ok(g.h_cs.commutator(&shifted)?.sub(&g.h_cs.commutator(t)?)?.max_abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    /// standard deviation of H_CS from matrix moments
    pub dh: f64,
    /// the same from the coefficient series
    pub dh_series: f64,
    pub dt: f64,
    pub product: f64,
}

/// Standard deviations of H_CS and T on |z,k> at T's truncation.
pub fn uncertainty_report(
    z: c64,
    t: &OperatorMatrix,
    params: &ModelParams,
    branch: BranchConvention,
) -> Result<Uncertainty> {
    let n = t.dim();
    let v = bg_state(z, params, n, branch)?;
    if v.tail > 1e-10 {
        return Err(Error::Truncation {
            n,
            tail: v.tail,
            limit: 1e-10,
        });
    }
    let psi = &v.coeffs;
    let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    let g = build_generators(params, n)?;
    let moments = |op: &OperatorMatrix| -> (f64, f64) {
        let a = op.apply(psi);
        let mean: c64 = psi.iter().zip(&a).map(|(x, y)| x.conj() * y).sum::<c64>() / norm2;
        let second: f64 = a.iter().map(|y| y.norm_sqr()).sum::<f64>() / norm2;
        (mean.re, second)
    };
    let (hm, h2) = moments(&g.h_cs);
    let (tm, t2) = moments(t);
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (i, c) in psi.iter().enumerate() {
        let e = 2.0 * params.omega * (i as f64 + params.k);
        m1 += e * c.norm_sqr() / norm2;
        m2 += e * e * c.norm_sqr() / norm2;
    }
    let dh = (h2 - hm * hm).max(0.0).sqrt();
    let dt = (t2 - tm * tm).max(0.0).sqrt();
    Ok(Uncertainty {
        dh,
        dh_series: (m2 - m1 * m1).max(0.0).sqrt(),
        dt,
        product: dh * dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(branch: BranchConvention) -> TimeOperatorConfig {
        TimeOperatorConfig::new(ModelParams::new(1.0, 2.0).unwrap(), 16, branch, PrefactorMode::AsWritten).unwrap()
    }

    #[test]
    fn closed_form_reference_entry() {
        let t = assemble_t_closed_form(&cfg(BranchConvention::Principal)).unwrap();
        let e = t.get(0, 1);
        assert!(e.re.abs() < 1e-17);
        assert!((e.im + 0.134_211_232_278_632_08).abs() < 1e-15, "{e}");
        assert_eq!(t.get(1, 0), e.conj());
        for i in 0..16 {
            assert_eq!(t.get(i, i), c64::new(0.0, 0.0));
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for branch in [BranchConvention::Principal, BranchConvention::Positive] {
            let c = cfg(branch);
            let q = assemble_t_quadrature(&c).unwrap();
            let f = assemble_t_closed_form(&c).unwrap();
            let d = relative_block_deviation(&q, &f, 12).unwrap();
            assert!(d < 1e-8, "{branch:?}: {d}");
        }
    }

    #[test]
    fn angular_factors() {
        assert_eq!(angular_factor(0, BranchConvention::Principal), c64::new(0.0, 0.0));
        assert!((angular_factor(1, BranchConvention::Principal) - c64::new(0.0, 2.0 * PI)).norm() < 1e-15);
        assert!((angular_factor(1, BranchConvention::Positive) - c64::new(0.0, -2.0 * PI)).norm() < 1e-15);
    }

    #[test]
    fn gauge_examples() {
        let p = ModelParams::new(1.0, 2.0).unwrap();
        let t = assemble_t_closed_form(&cfg(BranchConvention::Principal)).unwrap();
        let same = gauge_shift(&t, &[], &p).unwrap();
        assert_eq!(same.sub(&t).unwrap().max_abs(), 0.0);
        let one = gauge_shift(&t, &[1.0], &p).unwrap();
        assert_eq!(one.get(3, 3), c64::new(1.0, 0.0));
        assert_eq!(gauge_commutator_change(&t, &[0.0, 1.0], &p).unwrap(), 0.0);
    }

    #[test]
    fn vacuum_has_sharp_energy() {
        let p = ModelParams::new(1.0, 2.0).unwrap();
        let t = assemble_t_closed_form(&cfg(BranchConvention::Principal)).unwrap();
        let u = uncertainty_report(c64::new(0.0, 0.0), &t, &p, BranchConvention::Principal).unwrap();
        assert_eq!(u.dh, 0.0);
    }
}
