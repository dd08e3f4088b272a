//! Momentum line: free Hamiltonian, the Aharonov-Bohm time of arrival and
//! the arctan construction of a time operator for the harmonic oscillator.
//!
//! Position acts as x = -i d/dp through periodic spectral differentiation.
//! Products with 1/p are written with the product rule,
//!   T0 = -P^-1 X - (i/2) P^-2,   Q = P^-1 X + i P^-2 = -i d/dp P^-1,
//! so no singular function is ever differentiated spectrally.

use faer::{Mat, Side};
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use super::spectral::{periodic_derivative, periodic_second_derivative};
use super::{GridKind, GridSpec, PacketSpec, Wavepacket, EDGE_DECAY};
use crate::error::{invalid, Error, Result};
use crate::operator::{inner, vec_norm, OperatorMatrix};
use crate::report::{CheckReport, ConvergenceTable};

const I: c64 = c64::new(0.0, 1.0);

/// Eigenvector condition numbers above this make an eigen-based matrix
/// function untrustworthy.
pub const ARCTAN_COND_LIMIT: f64 = 1e6;
/// The arctan Taylor series is used only below this spectral radius.
pub const TAYLOR_RADIUS: f64 = 0.9;

pub struct MomentumOps {
    pub grid: GridSpec,
    pub omega: f64,
    pub h0: OperatorMatrix,
    pub t0: OperatorMatrix,
    pub q: OperatorMatrix,
    pub k: OperatorMatrix,
    pub h_h: OperatorMatrix,
}

fn require_momentum(grid: &GridSpec) -> Result<()> {
    if grid.kind != GridKind::MomentumLine {
        return Err(invalid("grid", "expected a momentum-line grid"));
    }
    Ok(())
}

fn require_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(invalid("omega", format!("must be positive, got {omega}")));
    }
    Ok(())
}

fn free_hamiltonian(grid: &GridSpec, p: &[f64]) -> OperatorMatrix {
    let d: Vec<c64> = p.iter().map(|p| c64::new(0.5 * p * p, 0.0)).collect();
    OperatorMatrix::diagonal(grid.basis(), &d)
}

fn oscillator(grid: &GridSpec, p: &[f64], omega: f64) -> OperatorMatrix {
    let d2 = periodic_second_derivative(grid.count, grid.spacing());
    let w2 = omega * omega;
    OperatorMatrix::from_fn(grid.basis(), grid.count, |i, j| {
        let diag = if i == j { 0.5 * p[i] * p[i] } else { 0.0 };
        c64::new(diag - 0.5 * w2 * d2[(i, j)], 0.0)
    })
}

pub fn build_momentum_ops(grid: &GridSpec, omega: f64) -> Result<MomentumOps> {
    require_momentum(grid)?;
    require_omega(omega)?;
    let m = grid.count;
    let p = grid.points();
    let d = periodic_derivative(m, grid.spacing());
    let d2 = periodic_second_derivative(m, grid.spacing());
    let basis = grid.basis();
    let t0 = OperatorMatrix::from_fn(basis.clone(), m, |i, j| {
        let diag = if i == j { -0.5 * I / (p[i] * p[i]) } else { c64::new(0.0, 0.0) };
        I * d[(i, j)] / p[i] + diag
    });
    let q = OperatorMatrix::from_fn(basis.clone(), m, |i, j| {
        let diag = if i == j { I / (p[i] * p[i]) } else { c64::new(0.0, 0.0) };
        -I * d[(i, j)] / p[i] + diag
    });
    let k = OperatorMatrix::from_fn(basis.clone(), m, |i, j| c64::new(-0.5 * d2[(i, j)], 0.0));
    let h0 = free_hamiltonian(grid, &p);
    let h_h = h0.add(&k.scale_re(omega * omega))?;
    Ok(MomentumOps {
        grid: *grid,
        omega,
        h0,
        t0,
        q,
        k,
        h_h,
    })
}

/// <psi|AB - BA|psi> / <psi|psi>, with no symmetry assumed.
pub(crate) fn bracket(a: &OperatorMatrix, b: &OperatorMatrix, psi: &[c64]) -> c64 {
    let ab = a.apply(&b.apply(psi));
    let ba = b.apply(&a.apply(psi));
    (inner(psi, &ab) - inner(psi, &ba)) / inner(psi, psi)
}

fn check_packet(grid: &GridSpec, w: &Wavepacket) -> Result<()> {
    if w.grid != *grid {
        return Err(invalid("packet", "wavepacket lives on a different grid"));
    }
    Ok(())
}

/// Relative residuals of the two decompositions of K on one packet:
/// (T0 H0 T0 + 1/(16 H0), Q H0 Q - (i/2) Q, mutual distance).
pub fn identity_22_residuals(ops: &MomentumOps, w: &Wavepacket) -> Result<(f64, f64, f64)> {
    check_packet(&ops.grid, w)?;
    let psi = &w.values;
    let p = ops.grid.points();
    let kpsi = ops.k.apply(psi);
    let t = ops.t0.apply(psi);
    let mut f1 = ops.t0.apply(&ops.h0.apply(&t));
    for (j, v) in f1.iter_mut().enumerate() {
        *v += psi[j] / (8.0 * p[j] * p[j]);
    }
    let qpsi = ops.q.apply(psi);
    let mut f2 = ops.q.apply(&ops.h0.apply(&qpsi));
    for (v, qv) in f2.iter_mut().zip(&qpsi) {
        *v -= 0.5 * I * qv;
    }
    let kn = vec_norm(&kpsi);
    let diff = |a: &[c64], b: &[c64]| vec_norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()) / kn;
    Ok((diff(&f1, &kpsi), diff(&f2, &kpsi), diff(&f1, &f2)))
}

/// Both decompositions of K on each packet. Packets that overlap p = 0 are
/// reported but not gated.
pub fn verify_identity_22(grid: &GridSpec, omega: f64, packets: &[Wavepacket]) -> Result<CheckReport> {
    let ops = build_momentum_ops(grid, omega)?;
    let mut rep = CheckReport::new("identity-22");
    rep.set_config("grid", grid.basis());
    rep.set_config("omega", omega);
    for (n, w) in packets.iter().enumerate() {
        let (r1, r2, r12) = identity_22_residuals(&ops, w)?;
        let tag = format!("packet {n} (p0={}, sigma={})", w.spec.center, w.spec.width);
        if w.origin_weight() > EDGE_DECAY {
            rep.info(format!("{tag} T0 H0 T0 form [singular domain]"), r1);
            rep.info(format!("{tag} Q H0 Q form [singular domain]"), r2);
            rep.note(format!("{tag} overlaps p = 0; residuals are not gated"));
        } else {
            rep.at_most(format!("{tag} T0 H0 T0 form"), r1, 1e-6);
            rep.at_most(format!("{tag} Q H0 Q form"), r2, 1e-6);
            rep.at_most(format!("{tag} form vs form"), r12, 1e-8);
        }
    }
    Ok(rep)
}

/// Decomposition residuals of one packet across grid sizes; tables are
/// named "identity-22-t0" and "identity-22-q".
pub fn identity_22_refinement(
    counts: &[usize],
    half_width: f64,
    omega: f64,
    spec: PacketSpec,
) -> Result<(ConvergenceTable, ConvergenceTable)> {
    let mut a = ConvergenceTable::new("identity-22-t0", "M");
    let mut b = ConvergenceTable::new("identity-22-q", "M");
    for &m in counts {
        let grid = GridSpec::momentum_line(m, half_width)?;
        let ops = build_momentum_ops(&grid, omega)?;
        let w = Wavepacket::gaussian(&grid, spec)?;
        let (r1, r2, _) = identity_22_residuals(&ops, &w)?;
        a.push(m as f64, r1);
        b.push(m as f64, r2);
    }
    Ok((a, b))
}

/// <[T0, H0]> on a packet.
pub fn t0_commutator(grid: &GridSpec, spec: PacketSpec) -> Result<c64> {
    let ops = build_momentum_ops(grid, 1.0)?;
    let w = Wavepacket::gaussian(grid, spec)?;
    Ok(bracket(&ops.t0, &ops.h0, &w.values))
}

/// Eigenvalues of H_h restricted to odd functions of p, ascending.
pub fn odd_sector_eigenvalues(grid: &GridSpec, omega: f64) -> Result<Vec<f64>> {
    require_momentum(grid)?;
    require_omega(omega)?;
    let m = grid.count;
    let h = m / 2;
    let p = grid.points();
    let d2 = periodic_second_derivative(m, grid.spacing());
    let w2 = omega * omega;
    let full = |i: usize, j: usize| -> f64 {
        let diag = if i == j { 0.5 * p[i] * p[i] } else { 0.0 };
        diag - 0.5 * w2 * d2[(i, j)]
    };
    let r = Mat::from_fn(h, h, |i, j| full(h + i, h + j) - full(h + i, h - 1 - j));
    let r = Mat::from_fn(h, h, |i, j| 0.5 * (r[(i, j)] + r[(j, i)]));
    r.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence {
            function: "odd-sector eigenvalues",
            iterations: 0,
            argument: m as f64,
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArctanRoute {
    /// eigenbasis from a Hermitian matrix similar to omega Q
    HermitianSimilarity,
    /// general complex eigendecomposition
    Eigen,
    Taylor,
}

#[derive(Clone, Debug)]
pub struct ArctanResult {
    pub value: Mat<c64>,
    /// ||V||_F ||V^-1||_F of the eigenvector matrix
    pub condition: f64,
    pub spectral_radius: f64,
    pub route: ArctanRoute,
}

fn arctan_taylor(a: &Mat<c64>) -> Result<Mat<c64>> {
    let a2 = a * a;
    let mut term = a.clone();
    let mut sum = a.clone();
    for j in 1..20_000 {
        term = -(&a2 * &term);
        let add = Mat::from_fn(a.nrows(), a.ncols(), |r, c| term[(r, c)] / (2 * j + 1) as f64);
        sum += &add;
        if add.norm_max() <= 1e-17 * sum.norm_max() {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence {
        function: "matrix arctan Taylor series",
        iterations: 20_000,
        argument: a.norm_max(),
    })
}

/// arctan of a general matrix through its eigendecomposition, with the
/// Taylor series as fallback when the eigenvectors are ill-conditioned.
pub fn matrix_arctan(a: &Mat<c64>, cond_limit: f64) -> Result<ArctanResult> {
    let n = a.nrows();
    let eig = a.eigen().map_err(|_| Error::NoConvergence {
        function: "complex eigendecomposition",
        iterations: 0,
        argument: n as f64,
    })?;
    let v = eig.U().to_owned();
    let w: Vec<c64> = (0..n).map(|j| eig.S()[j]).collect();
    let rho = w.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let vinv = crate::operator::OperatorMatrix::new(crate::operator::Basis::Monomial, v.clone())
        .inverse()
        .map(|m| m.mat);
    let condition = match &vinv {
        Ok(vi) => v.norm_l2() * vi.norm_l2(),
        Err(_) => f64::INFINITY,
    };
    let near_pole = w.iter().any(|x| (x * x + 1.0).norm() < 1e-12);
    if condition.is_finite() && condition <= cond_limit && !near_pole {
        let vi = vinv?;
        let scaled = Mat::from_fn(n, n, |i, j| v[(i, j)] * w[j].atan());
        return Ok(ArctanResult {
            value: &scaled * &vi,
            condition,
            spectral_radius: rho,
            route: ArctanRoute::Eigen,
        });
    }
    if rho < TAYLOR_RADIUS {
        return Ok(ArctanResult {
            value: arctan_taylor(a)?,
            condition,
            spectral_radius: rho,
            route: ArctanRoute::Taylor,
        });
    }
    Err(Error::IllConditioned {
        condition,
        limit: cond_limit,
    })
}

pub struct ArrivalOps {
    pub grid: GridSpec,
    pub omega: f64,
    /// Hermitian T_h = (f + f^dag)/2, f = arctan(omega Q)/omega
    pub th: OperatorMatrix,
    /// (Q + Q^dag)/2 for the same branch-wise Q
    pub q_sym: OperatorMatrix,
    pub condition: f64,
    pub spectral_radius: f64,
    pub route: ArctanRoute,
}

pub(crate) struct BranchFunction {
    pub(crate) f: Mat<c64>,
    pub(crate) q: Mat<c64>,
    pub(crate) condition: f64,
    pub(crate) spectral_radius: f64,
    pub(crate) route: ArctanRoute,
}

/// arctan(omega Q_b)/omega on one sign branch of p. With D_b the periodic
/// derivative on the branch, Q_b = -i D_b P^-1 equals V Lambda V^-1 where
/// V = |P|^1/2 U and U diagonalizes the Hermitian -i sgn |P|^-1/2 D_b |P|^-1/2.
pub(crate) fn branch_arctan(p: &[f64], dp: f64, omega: f64) -> Result<BranchFunction> {
    let h = p.len();
    let sg = p[0].signum();
    let a: Vec<f64> = p.iter().map(|x| x.abs()).collect();
    let sa: Vec<f64> = a.iter().map(|x| x.sqrt()).collect();
    let db = periodic_derivative(h, dp);
    let herm = Mat::from_fn(h, h, |i, j| -I * sg * db[(i, j)] / (sa[i] * sa[j]));
    let q = Mat::from_fn(h, h, |i, j| -I * db[(i, j)] / p[j]);
    let eig = herm.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence {
        function: "Hermitian eigendecomposition",
        iterations: 0,
        argument: h as f64,
    })?;
    let u = eig.U();
    let lam: Vec<f64> = (0..h).map(|j| eig.S()[j].re).collect();
    let rho = omega * lam.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let amax = a.iter().cloned().fold(0.0, f64::max);
    let amin = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = (amax / amin).sqrt();
    if condition <= ARCTAN_COND_LIMIT {
        let scaled = Mat::from_fn(h, h, |i, j| u[(i, j)] * ((omega * lam[j]).atan() / omega));
        let w = &scaled * u.adjoint();
        let f = Mat::from_fn(h, h, |i, j| w[(i, j)] * (sa[i] / sa[j]));
        return Ok(BranchFunction {
            f,
            q,
            condition,
            spectral_radius: rho,
            route: ArctanRoute::HermitianSimilarity,
        });
    }
    if rho < TAYLOR_RADIUS {
        let wq = Mat::from_fn(h, h, |i, j| q[(i, j)] * omega);
        let f = arctan_taylor(&wq)?;
        let f = Mat::from_fn(h, h, |i, j| f[(i, j)] / omega);
        return Ok(BranchFunction {
            f,
            q,
            condition,
            spectral_radius: rho,
            route: ArctanRoute::Taylor,
        });
    }
    Err(Error::IllConditioned {
        condition,
        limit: ARCTAN_COND_LIMIT,
    })
}

/// T_h on the momentum line, assembled branch-wise on p < 0 and p > 0.
pub fn build_th(grid: &GridSpec, omega: f64) -> Result<ArrivalOps> {
    require_momentum(grid)?;
    require_omega(omega)?;
    let m = grid.count;
    if !m.is_multiple_of(4) {
        return Err(invalid("M", "branch-wise construction needs M divisible by 4"));
    }
    let h = m / 2;
    let p = grid.points();
    let lo = branch_arctan(&p[..h], grid.spacing(), omega)?;
    let hi = branch_arctan(&p[h..], grid.spacing(), omega)?;
    let block = |pick: &dyn Fn(&BranchFunction) -> &Mat<c64>, i: usize, j: usize| -> c64 {
        match (i < h, j < h) {
            (true, true) => pick(&lo)[(i, j)],
            (false, false) => pick(&hi)[(i - h, j - h)],
            _ => c64::new(0.0, 0.0),
        }
    };
    let th = OperatorMatrix::from_fn(grid.basis(), m, |i, j| {
        0.5 * (block(&|b| &b.f, i, j) + block(&|b| &b.f, j, i).conj())
    });
    let q_sym = OperatorMatrix::from_fn(grid.basis(), m, |i, j| {
        0.5 * (block(&|b| &b.q, i, j) + block(&|b| &b.q, j, i).conj())
    });
    let route = if lo.route == ArctanRoute::Taylor || hi.route == ArctanRoute::Taylor {
        ArctanRoute::Taylor
    } else {
        lo.route
    };
    Ok(ArrivalOps {
        grid: *grid,
        omega,
        th,
        q_sym,
        condition: lo.condition.max(hi.condition),
        spectral_radius: lo.spectral_radius.max(hi.spectral_radius),
        route,
    })
}

/// T_h from the eigendecomposition of omega Q on the whole line. Kept as a
/// diagnostic: across p = 0 the eigenvectors are numerically dependent and
/// the guard rejects the result.
pub fn build_th_full_line(grid: &GridSpec, omega: f64) -> Result<ArrivalOps> {
    let ops = build_momentum_ops(grid, omega)?;
    let wq = ops.q.scale_re(omega);
    let r = matrix_arctan(&wq.mat, ARCTAN_COND_LIMIT)?;
    let f = OperatorMatrix::new(grid.basis(), r.value).scale_re(1.0 / omega);
    let th = f.add(&f.adjoint())?.scale_re(0.5);
    let q_sym = ops.q.add(&ops.q.adjoint())?.scale_re(0.5);
    Ok(ArrivalOps {
        grid: *grid,
        omega,
        th,
        q_sym,
        condition: r.condition,
        spectral_radius: r.spectral_radius,
        route: r.route,
    })
}

/// <[H_h, T_h]> on one packet per grid size; table "arrival-commutator"
/// holds |<[H_h, T_h]> - i|.
pub fn arrival_refinement(
    counts: &[usize],
    half_width: f64,
    omega: f64,
    spec: PacketSpec,
) -> Result<(ConvergenceTable, Vec<c64>)> {
    let mut table = ConvergenceTable::new("arrival-commutator", "M");
    let mut values = Vec::new();
    for &m in counts {
        let grid = GridSpec::momentum_line(m, half_width)?;
        let w = Wavepacket::gaussian(&grid, spec)?;
        let hh = oscillator(&grid, &grid.points(), omega);
        let ar = build_th(&grid, omega)?;
        let c = bracket(&hh, &ar.th, &w.values);
        table.push(m as f64, (c - I).norm());
        values.push(c);
    }
    Ok((table, values))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSweep {
    pub omegas: Vec<f64>,
    /// ||(T_h - (Q+Q^dag)/2) psi|| / ||(Q+Q^dag)/2 psi||
    pub packet_residuals: Vec<f64>,
    /// ||T_h - (Q+Q^dag)/2||_F / ||Q||_F
    pub operator_residuals: Vec<f64>,
    /// least-squares slope of log residual against log omega
    pub exponent: f64,
}

pub fn omega_sweep(grid: &GridSpec, omegas: &[f64], spec: PacketSpec) -> Result<OmegaSweep> {
    if omegas.len() < 2 {
        return Err(invalid("omegas", "need at least two frequencies"));
    }
    let w = Wavepacket::gaussian(grid, spec)?;
    let mut packet_residuals = Vec::new();
    let mut operator_residuals = Vec::new();
    let q_norm = build_momentum_ops(grid, 1.0)?.q.frobenius();
    for &om in omegas {
        let ar = build_th(grid, om)?;
        let diff = ar.th.sub(&ar.q_sym)?;
        packet_residuals.push(vec_norm(&diff.apply(&w.values)) / vec_norm(&ar.q_sym.apply(&w.values)));
        operator_residuals.push(diff.frobenius() / q_norm);
    }
    let exponent = fit_exponent(omegas, &packet_residuals);
    Ok(OmegaSweep {
        omegas: omegas.to_vec(),
        packet_residuals,
        operator_residuals,
        exponent,
    })
}

pub(crate) fn fit_exponent(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
