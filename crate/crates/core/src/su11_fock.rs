//! Truncated Fock-space matrices of the su(1,1) discrete series D+(k) and
//! checks of the operator identities they satisfy away from the
//! truncation boundary.
//!
//! Identity checks split a truncated matrix into an interior block (all
//! but the last ceil(N/4) rows and columns) and the boundary. Shift
//! operator relations break only at the boundary, so interior residuals
//! are expected at roundoff level.

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::bg_coherent;
use crate::ddmat::{Dd, DdMatrix};
use crate::error::{invalid, Result};
use crate::operator::{expm, Basis, OperatorMatrix};
use crate::report::{CheckReport, ConvergenceTable};
use crate::specfun::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub g: f64,
    /// Bargmann index, always recomputed from g.
    pub k: f64,
}

impl ModelParams {
    pub fn new(omega: f64, g: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(invalid("omega", format!("must be positive and finite, got {omega}")));
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(invalid("g", format!("must be non-negative and finite, got {g}")));
        }
        Ok(Self {
            omega,
            g,
            k: bargmann_index(g),
        })
    }

    /// Parameters whose Bargmann index is (up to rounding) `k`.
    pub fn with_bargmann_index(omega: f64, k: f64) -> Result<Self> {
        if !(k >= 0.75) {
            return Err(invalid("k", format!("Bargmann index must be >= 3/4, got {k}")));
        }
        let s = 2.0 * k - 1.0;
        Self::new(omega, (s * s - 0.25).max(0.0))
    }

    /// k(k-1), the Casimir value on the representation.
    pub fn casimir_value(&self) -> f64 {
        self.k * (self.k - 1.0)
    }
}

pub fn bargmann_index(g: f64) -> f64 {
    0.5 * (1.0 + (g + 0.25).sqrt())
}

/// Number of rows/columns treated as interior for a truncation N.
pub fn interior_size(n: usize) -> usize {
    n - n.div_ceil(4)
}

#[derive(Clone, Debug)]
pub struct Generators {
    pub params: ModelParams,
    pub k3: OperatorMatrix,
    pub kplus: OperatorMatrix,
    pub kminus: OperatorMatrix,
    pub k1: OperatorMatrix,
    pub k2: OperatorMatrix,
    /// K = (K3 + K1)/omega
    pub k: OperatorMatrix,
    /// H = omega (K3 - K1)
    pub h: OperatorMatrix,
    /// H_CS = 2 omega K3
    pub h_cs: OperatorMatrix,
}

fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub fn kplus_element(n: usize, k: f64) -> f64 {
    // <n+1|K+|n>
    ((n as f64 + 1.0) * (n as f64 + 2.0 * k)).sqrt()
}

pub fn build_generators(params: &ModelParams, n: usize) -> Result<Generators> {
    if n < 4 {
        return Err(invalid("N", format!("truncation must be >= 4, got {n}")));
    }
    let p = ModelParams::new(params.omega, params.g)?;
    let k = p.k;
    let w = p.omega;
    let b = Basis::Fock;
    let k3 = OperatorMatrix::from_fn(b.clone(), n, |i, j| if i == j { re(i as f64 + k) } else { re(0.0) });
    let kplus = OperatorMatrix::from_fn(b.clone(), n, |i, j| {
        if i == j + 1 {
            re(kplus_element(j, k))
        } else {
            re(0.0)
        }
    });
    let kminus = kplus.adjoint();
    let k1 = OperatorMatrix::lin_comb(re(0.5), &kplus, re(0.5), &kminus)?;
    let k2 = OperatorMatrix::lin_comb(c64::new(0.0, -0.5), &kplus, c64::new(0.0, 0.5), &kminus)?;
    let k_op = OperatorMatrix::lin_comb(re(1.0 / w), &k3, re(1.0 / w), &k1)?;
    let h = OperatorMatrix::lin_comb(re(w), &k3, re(-w), &k1)?;
    let h_cs = k3.scale_re(2.0 * w);
    Ok(Generators {
        params: p,
        k3,
        kplus,
        kminus,
        k1,
        k2,
        k: k_op,
        h,
        h_cs,
    })
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.commutator(b)
}

/// K3^2 - K1^2 - K2^2
pub fn casimir(params: &ModelParams, n: usize) -> Result<OperatorMatrix> {
    let g = build_generators(params, n)?;
    let k33 = g.k3.mul(&g.k3)?;
    let k11 = g.k1.mul(&g.k1)?;
    let k22 = g.k2.mul(&g.k2)?;
    k33.sub(&k11)?.sub(&k22)
}

fn interior_max(m: &OperatorMatrix) -> f64 {
    let ni = interior_size(m.dim());
    m.block_max_abs(0..ni, 0..ni)
}

/// Largest entry outside the interior block.
fn boundary_max(m: &OperatorMatrix) -> f64 {
    let n = m.dim();
    let ni = interior_size(n);
    m.block_max_abs(ni..n, 0..n).max(m.block_max_abs(0..n, ni..n))
}

/// Interior residuals of the su(1,1) commutation relations and the
/// Casimir, gated at `tol`.
pub fn verify_algebra(params: &ModelParams, n: usize, tol: f64) -> Result<CheckReport> {
    let g = build_generators(params, n)?;
    let mut rep = CheckReport::new("su11-algebra").with_params(&g.params);
    rep.set_config("N", n);
    let i = c64::new(0.0, 1.0);
    let r_plus = g.k3.commutator(&g.kplus)?.sub(&g.kplus)?;
    let r_minus = g.k3.commutator(&g.kminus)?.add(&g.kminus)?;
    let r_mp = g.kminus.commutator(&g.kplus)?.sub(&g.k3.scale_re(2.0))?;
    let r_31 = g.k3.commutator(&g.k1)?.sub(&g.k2.scale(i))?;
    let r_32 = g.k3.commutator(&g.k2)?.add(&g.k1.scale(i))?;
    rep.at_most("[K3,K+] - K+ interior", interior_max(&r_plus), tol);
    rep.at_most("[K3,K-] + K- interior", interior_max(&r_minus), tol);
    rep.at_most("[K-,K+] - 2K3 interior", interior_max(&r_mp), tol);
    rep.at_most("[K3,K1] - iK2 interior", interior_max(&r_31), tol);
    rep.at_most("[K3,K2] + iK1 interior", interior_max(&r_32), tol);
    rep.info("[K-,K+] - 2K3 boundary", boundary_max(&r_mp));
    let adj = g.kplus.adjoint().sub(&g.kminus)?.max_abs();
    rep.at_most("K- - (K+)^dag", adj, 0.0);
    let eq1 = g
        .h_cs
        .sub(&g.k.scale_re(g.params.omega * g.params.omega))?
        .sub(&g.h)?
        .max_abs();
    rep.info("H_CS - omega^2 K - H", eq1);
    let c = casimir(&g.params, n)?;
    let ident = OperatorMatrix::identity(Basis::Fock, n);
    let cv = g.params.casimir_value();
    let c_dev = interior_max(&c.sub(&ident.scale_re(cv))?);
    let quarter = (4.0 * g.params.g - 3.0) / 16.0;
    let c_dev2 = interior_max(&c.sub(&ident.scale_re(quarter))?);
    rep.at_most("Casimir - k(k-1) interior", c_dev, tol);
    rep.at_most("Casimir - (4g-3)/16 interior", c_dev2, tol);
    rep.info("Casimir interior (0,0)", c.get(0, 0).re);
    Ok(rep)
}

fn shifted_inverse(g: &Generators) -> OperatorMatrix {
    // (K3 + k)^-1, entrywise on the diagonal
    let k = g.params.k;
    let n = g.k3.dim();
    let d: Vec<c64> = (0..n).map(|i| re(1.0 / (i as f64 + 2.0 * k))).collect();
    OperatorMatrix::diagonal(Basis::Fock, &d)
}

/// [K+ (K3+k)^-1]^n against K+^n Gamma(K3+k)/Gamma(K3+k+n) for n = 0..=n_max.
pub fn verify_identity_17(params: &ModelParams, n: usize, n_max: usize, tol: f64) -> Result<CheckReport> {
    if n_max > n / 2 {
        return Err(invalid("n_max", format!("must be <= N/2 = {}", n / 2)));
    }
    let g = build_generators(params, n)?;
    let k = g.params.k;
    let mut rep = CheckReport::new("identity-17").with_params(&g.params);
    rep.set_config("N", n);
    let a = g.kplus.mul(&shifted_inverse(&g))?;
    let mut lhs = OperatorMatrix::identity(Basis::Fock, n);
    let mut kp_pow = OperatorMatrix::identity(Basis::Fock, n);
    for p in 0..=n_max {
        if p > 0 {
            lhs = lhs.mul(&a)?;
            kp_pow = kp_pow.mul(&g.kplus)?;
        }
        let ratio: Vec<c64> = (0..n)
            .map(|i| {
                let x = i as f64 + 2.0 * k;
                Ok(re((ln_gamma(x)? - ln_gamma(x + p as f64)?).exp()))
            })
            .collect::<Result<_>>()?;
        let rhs = kp_pow.mul(&OperatorMatrix::diagonal(Basis::Fock, &ratio))?;
        let dev = interior_max(&lhs.sub(&rhs)?);
        rep.at_most(format!("n={p} interior deviation"), dev, tol);
    }
    Ok(rep)
}

/// [K-, K+ (K3+k)^-1] - 1
pub fn verify_identity_18(params: &ModelParams, n: usize, tol: f64) -> Result<CheckReport> {
    let g = build_generators(params, n)?;
    let mut rep = CheckReport::new("identity-18").with_params(&g.params);
    rep.set_config("N", n);
    let a = g.kplus.mul(&shifted_inverse(&g))?;
    let r = g.kminus.commutator(&a)?.sub(&OperatorMatrix::identity(Basis::Fock, n))?;
    rep.at_most("interior max", interior_max(&r), tol);
    rep.info("boundary max", boundary_max(&r));
    rep.info("entry (N-1,N-1)", r.get(n - 1, n - 1).norm());
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    /// plain f64 Pade exponentials; hits a roundoff floor near 1e-7
    Double,
    /// double-double exponentials and products
    DoubleDouble,
}

/// Largest |entry| of the top-left block of e^{-omega K} H e^{omega K} + 2 omega K-.
pub fn similarity_19_residual(params: &ModelParams, n: usize, block: usize, prec: Precision) -> Result<f64> {
    let p = ModelParams::new(params.omega, params.g)?;
    if n < 4 {
        return Err(invalid("N", "truncation must be >= 4"));
    }
    let block = block.min(n);
    match prec {
        Precision::Double => {
            let g = build_generators(&p, n)?;
            let a = g.k.scale_re(p.omega);
            let e = expm(&a)?;
            let ei = expm(&a.scale_re(-1.0))?;
            let r = ei.mul(&g.h)?.mul(&e)?.add(&g.kminus.scale_re(2.0 * p.omega))?;
            Ok(r.block_max_abs(0..block, 0..block))
        }
        Precision::DoubleDouble => {
            // all matrices are real: omega K = K3 + K1, H = omega (K3 - K1)
            let k = p.k;
            let kp = |j: usize| -> Dd {
                (Dd::new(j as f64 + 1.0) * (Dd::new(j as f64) + Dd::new(2.0) * Dd::new(k))).sqrt()
            };
            let half = Dd::new(0.5);
            let diag = |i: usize| Dd::new(i as f64) + Dd::new(k);
            let a = DdMatrix::from_fn(n, |i, j| {
                if i == j {
                    diag(i)
                } else if i == j + 1 {
                    half * kp(j)
                } else if j == i + 1 {
                    half * kp(i)
                } else {
                    Dd::ZERO
                }
            });
            let w = Dd::new(p.omega);
            let h = DdMatrix::from_fn(n, |i, j| {
                if i == j {
                    w * diag(i)
                } else if i == j + 1 {
                    -(w * half * kp(j))
                } else if j == i + 1 {
                    -(w * half * kp(i))
                } else {
                    Dd::ZERO
                }
            });
            let e = a.expm();
            let ei = a.scale(Dd::new(-1.0)).expm();
            let conj = ei.mul(&h).mul(&e);
            let two_w = Dd::new(2.0) * w;
            let mut worst: f64 = 0.0;
            for i in 0..block {
                for j in 0..block {
                    let km = if j == i + 1 { kp(i) } else { Dd::ZERO };
                    let r = conj.get(i, j) + two_w * km;
                    worst = worst.max(r.to_f64().abs());
                }
            }
            Ok(worst)
        }
    }
}

/// Default truncations of the similarity convergence table.
pub const SIMILARITY_19_NS: [usize; 4] = [32, 64, 96, 128];

/// Residual of e^{-omega K} H e^{omega K} = -2 omega K- on the top-left
/// block at truncation `n`, with convergence tables over `ns`.
pub fn verify_similarity_19(
    params: &ModelParams,
    n: usize,
    block: usize,
    ns: &[usize],
    tol: f64,
) -> Result<CheckReport> {
    if block > n / 8 {
        return Err(invalid("block", format!("must be <= N/8 = {}", n / 8)));
    }
    let p = ModelParams::new(params.omega, params.g)?;
    let mut rep = CheckReport::new("similarity-19").with_params(&p);
    rep.set_config("N", n);
    rep.set_config("block", block);
    rep.at_most(
        format!("top-left {block}x{block} residual at N={n}"),
        similarity_19_residual(&p, n, block, Precision::DoubleDouble)?,
        tol,
    );
    let mut table = ConvergenceTable::new("similarity-19", "N");
    let mut plain = ConvergenceTable::new("similarity-19-f64", "N");
    for &m in ns {
        table.push(m as f64, similarity_19_residual(&p, m, block, Precision::DoubleDouble)?);
        plain.push(m as f64, similarity_19_residual(&p, m, block, Precision::Double)?);
    }
    // doubling steps only, for the factor-of-ten criterion
    let mut doubling = ConvergenceTable::new("similarity-19-doubling", "N");
    for r in &table.rows {
        let m = r.resolution as usize;
        if m.is_power_of_two() {
            doubling.push(r.resolution, r.residual);
        }
    }
    rep.add_table(table);
    rep.add_table(doubling);
    rep.add_table(plain);
    rep.trend("strictly decreasing in N", "similarity-19", 1.0);
    rep.trend("shrinks >= 10x per doubling of N", "similarity-19-doubling", 10.0);
    rep.note("double-double arithmetic; the f64 table shows the roundoff floor of the plain route");
    Ok(rep)
}

/// e^{omega K} applied to the unnormalised BG coefficient vector at
/// z = -E/(2 omega); the E -> 0 limit is the vacuum.
pub fn energy_eigenstate_vector(params: &ModelParams, n: usize, energy: f64) -> Result<Vec<c64>> {
    if !(energy >= 0.0) || !energy.is_finite() {
        return Err(invalid("E", format!("must be a finite energy >= 0, got {energy}")));
    }
    let g = build_generators(params, n)?;
    let z = c64::new(-energy / (2.0 * g.params.omega), 0.0);
    let c = bg_coherent::unnormalized_coefficients(z, g.params.k, n)?;
    let e = expm(&g.k.scale_re(g.params.omega))?;
    Ok(e.apply(&c))
}

/// |E> = e^{omega K} |-E/(2 omega), k> and the residual of H|E> = E|E>
/// over N, measured on the interior rows.
pub fn energy_eigenstate_20(
    params: &ModelParams,
    n: usize,
    energy: f64,
    ns: &[usize],
) -> Result<(Vec<c64>, CheckReport)> {
    if !(energy > 0.0) {
        return Err(invalid("E", format!("must be positive, got {energy}")));
    }
    let p = ModelParams::new(params.omega, params.g)?;
    let mut rep = CheckReport::new("energy-eigenstate-20").with_params(&p);
    rep.set_config("E", energy);
    rep.set_config("N", n);
    rep.info("coherent label z", -energy / (2.0 * p.omega));
    let residual = |m: usize, e: f64| -> Result<f64> {
        let g = build_generators(&p, m)?;
        let v = energy_eigenstate_vector(&p, m, e)?;
        let hv = g.h.apply(&v);
        let ni = interior_size(m);
        let num: f64 = (0..ni).map(|i| (hv[i] - v[i] * e).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = (0..ni).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        Ok(num / den)
    };
    let mut table = ConvergenceTable::new("energy-eigenstate-20", "N");
    for &m in ns {
        table.push(m as f64, residual(m, energy)?);
    }
    rep.add_table(table);
    rep.trend("interior residual decreases in N", "energy-eigenstate-20", 1.0);
    rep.info("E -> 0 limit residual (non-normalizable state)", residual(n, 0.0)?);
    let v = energy_eigenstate_vector(&p, n, energy)?;
    Ok((v, rep))
}
