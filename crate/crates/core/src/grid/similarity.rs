//! The singular similarity S = e^{-K-(k)} e^{K-(k0)} on the position grid,
//! the intertwining H_CS S = S H_h, and T_CS = S T_h S^-1.
//!
//! S is unbounded: e^{-K-} contains e^{H/(2 omega)}, whose grid norm grows
//! like e^{p_max^2/4}. Where the exponential overflows the report says so
//! and keeps the spectral lower bound on the intertwining residual,
//!   ||(H_CS - E_n) S psi_n|| >= dist(E_n, spec H_CS) ||S psi_n||,
//! which holds because H_CS is Hermitian.

use faer::{Mat, Side};
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use super::momentum::{bracket, branch_arctan};
use super::position::{build_position_ops, hermitian_eigenvalues, PositionOps};
use super::{GridSpec, PacketSpec, Wavepacket};
use crate::error::{invalid, Error, Result};
use crate::operator::{expm, vec_norm, OperatorMatrix};
use crate::report::{CheckReport, ConvergenceTable};
use crate::su11_fock::{interior_size, ModelParams};

const I: c64 = c64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    pub params: ModelParams,
    pub length: f64,
    pub counts: Vec<usize>,
    pub n_low: usize,
    pub packet: PacketSpec,
}

impl SimilarityConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            length: 10.0,
            counts: vec![256, 512, 1024],
            n_low: 4,
            packet: PacketSpec::new(4.0, 0.5),
        }
    }
}

/// Everything measured at one grid size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPoint {
    pub count: usize,
    /// odd-sector oscillator levels used
    pub levels: Vec<f64>,
    /// dist(E_n, spec H_CS), a floor for the intertwining residual
    pub lower_bounds: Vec<f64>,
    /// None when the exponential overflowed
    pub transformed: Option<Transformed>,
    /// largest real part in the spectrum of -K-(k), when S overflows
    pub growth_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transformed {
    pub intertwining: Vec<f64>,
    /// max |S^-1 S - I| over the interior block
    pub inverse_defect: f64,
    /// ||T_CS - T_CS^dag||_F / ||T_CS||_F
    pub non_hermiticity: f64,
    /// <[H_CS, T_CS]> on the normalized S psi
    pub commutator: [f64; 2],
}

/// T_h on the half-line: the p > 0 branch construction on the DST momenta,
/// carried to position space by the same transform.
pub fn position_th(ops: &PositionOps) -> Result<OperatorMatrix> {
    let m = ops.grid.count;
    let dp = std::f64::consts::PI / ops.grid.extent;
    let b = branch_arctan(&ops.momenta, dp, ops.params.omega)?;
    let th_p = Mat::from_fn(m, m, |i, j| 0.5 * (b.f[(i, j)] + b.f[(j, i)].conj()));
    let s = Mat::from_fn(m, m, |i, j| c64::new(ops.sine[(i, j)], 0.0));
    Ok(OperatorMatrix::new(ops.grid.basis(), &(&s * &th_p) * &s))
}

pub fn similarity_point(grid: &GridSpec, params: &ModelParams, n_low: usize, packet: PacketSpec) -> Result<SimilarityPoint> {
    if n_low == 0 || n_low > 4 {
        return Err(invalid("n_low", "must be between 1 and 4"));
    }
    let ops = build_position_ops(grid, params)?;
    let m = grid.count;
    let hh = Mat::from_fn(m, m, |i, j| 0.5 * (ops.h_h.get(i, j) + ops.h_h.get(j, i).conj()));
    let eig = hh.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence {
        function: "Hermitian eigendecomposition",
        iterations: 0,
        argument: m as f64,
    })?;
    let levels: Vec<f64> = (0..n_low).map(|n| eig.S()[n].re).collect();
    let spec_cs = hermitian_eigenvalues(&ops.h_cs)?;
    let lower_bounds = levels
        .iter()
        .map(|e| spec_cs.iter().map(|v| (v - e).abs()).fold(f64::INFINITY, f64::min))
        .collect();
    let s = expm(&ops.kminus_k.scale_re(-1.0)).and_then(|a| a.mul(&expm(&ops.kminus_k0)?));
    let s = match s {
        Ok(s) if s.is_finite() => s,
        Ok(_) | Err(Error::ExpOverflow { .. }) => {
            let growth = ops
                .kminus_k
                .scale_re(-1.0)
                .mat
                .eigenvalues()
                .ok()
                .map(|w| w.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max));
            return Ok(SimilarityPoint {
                count: m,
                levels,
                lower_bounds,
                transformed: None,
                growth_rate: growth,
            });
        }
        Err(e) => return Err(e),
    };
    let u = eig.U();
    let mut intertwining = Vec::with_capacity(n_low);
    for n in 0..n_low {
        let psi: Vec<c64> = (0..m).map(|i| u[(i, n)]).collect();
        let spsi = s.apply(&psi);
        let lhs = ops.h_cs.apply(&spsi);
        let rhs = s.apply(&ops.h_h.apply(&psi));
        let r: Vec<c64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        intertwining.push(vec_norm(&r) / vec_norm(&spsi));
    }
    let s_inv = s.inverse()?;
    let id = s_inv.mul(&s)?;
    let interior = interior_size(m);
    let mut inverse_defect: f64 = 0.0;
    for i in 0..interior {
        for j in 0..interior {
            let want = if i == j { 1.0 } else { 0.0 };
            inverse_defect = inverse_defect.max((id.get(i, j) - want).norm());
        }
    }
    let th = position_th(&ops)?;
    let tcs = s.mul(&th)?.mul(&s_inv)?;
    let non_hermiticity = tcs.sub(&tcs.adjoint())?.frobenius() / tcs.frobenius();
    let w = Wavepacket::gaussian(grid, packet)?;
    let phi = s.apply(&w.values);
    let c = bracket(&ops.h_cs, &tcs, &phi);
    Ok(SimilarityPoint {
        count: m,
        levels,
        lower_bounds,
        transformed: Some(Transformed {
            intertwining,
            inverse_defect,
            non_hermiticity,
            commutator: [c.re, c.im],
        }),
        growth_rate: None,
    })
}

pub fn verify_similarity_21_26(cfg: &SimilarityConfig) -> Result<(CheckReport, Vec<SimilarityPoint>)> {
    let mut rep = CheckReport::new("similarity-21-26").with_params(&cfg.params);
    rep.set_config("L", cfg.length);
    rep.set_config("M", format!("{:?}", cfg.counts));
    rep.set_config("n_low", cfg.n_low);
    let mut points = Vec::new();
    for &m in &cfg.counts {
        let grid = GridSpec::position_half_line(m, cfg.length)?;
        points.push(similarity_point(&grid, &cfg.params, cfg.n_low, cfg.packet)?);
    }
    for n in 0..cfg.n_low {
        let mut table = ConvergenceTable::new(format!("intertwining-n{n}"), "M");
        let mut floor = ConvergenceTable::new(format!("intertwining-floor-n{n}"), "M");
        for pt in &points {
            let r = pt
                .transformed
                .as_ref()
                .map_or(f64::INFINITY, |t| t.intertwining[n]);
            table.push(pt.count as f64, r);
            floor.push(pt.count as f64, pt.lower_bounds[n]);
        }
        rep.add_table(table);
        rep.add_table(floor);
        rep.trend(format!("intertwining residual n={n} decreases in M"), &format!("intertwining-n{n}"), 1.0);
    }
    let mut comm = ConvergenceTable::new("tcs-commutator", "M");
    for pt in &points {
        match (&pt.transformed, pt.growth_rate) {
            (Some(t), _) => {
                rep.at_most(format!("M={} S^-1 S - I interior", pt.count), t.inverse_defect, 1e-8);
                comm.push(pt.count as f64, (c64::new(t.commutator[0], t.commutator[1]) - I).norm());
            }
            (None, g) => {
                rep.note(format!(
                    "M={}: exp(-K-) overflows; largest real eigenvalue of -K- is {}",
                    pt.count,
                    g.map_or("unavailable".to_string(), |v| format!("{v:.6e}"))
                ));
                comm.push(pt.count as f64, f64::NAN);
            }
        }
    }
    rep.add_table(comm);
    let finest = points.iter().rev().find_map(|pt| pt.transformed.as_ref().map(|t| (pt.count, t)));
    match finest {
        Some((m, t)) => {
            rep.at_least(format!("||T_CS - T_CS^dag|| / ||T_CS|| at M={m}"), t.non_hermiticity, 1e-3);
        }
        None => {
            rep.info("||T_CS - T_CS^dag|| / ||T_CS|| (no grid with finite S)", f64::NAN);
            rep.note("no refinement grid has a finite S; non-Hermiticity must be measured on a coarser grid");
        }
    }
    Ok((rep, points))
}
