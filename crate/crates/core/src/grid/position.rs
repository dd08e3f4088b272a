//! Position half-line with Dirichlet condition at x = 0, differentiated
//! through the DST-IV, whose momenta are p_m = (m + 1/2) pi / L.

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64 as c64;

use super::spectral::{dct4, dst4};
use super::{GridKind, GridSpec};
use crate::error::{invalid, Error, Result};
use crate::operator::OperatorMatrix;
use crate::report::CheckReport;
use crate::su11_fock::{interior_size, ModelParams};

const I: c64 = c64::new(0.0, 1.0);

pub struct PositionOps {
    pub grid: GridSpec,
    pub params: ModelParams,
    /// x^2 / 2
    pub k: OperatorMatrix,
    /// -(xp + px)/4
    pub d: OperatorMatrix,
    /// p^2/2 + g/(2 x^2)
    pub h: OperatorMatrix,
    pub h_cs: OperatorMatrix,
    /// omega^2 K + p^2/2, the oscillator whose odd sector has k0 = 3/4
    pub h_h: OperatorMatrix,
    pub kminus_k: OperatorMatrix,
    pub kminus_k0: OperatorMatrix,
    /// orthonormal DST-IV: position values to sine coefficients and back
    pub sine: Mat<f64>,
    /// the DST-IV momenta
    pub momenta: Vec<f64>,
}

pub fn dst_momenta(grid: &GridSpec) -> Vec<f64> {
    (0..grid.count)
        .map(|m| (m as f64 + 0.5) * PI / grid.extent)
        .collect()
}

pub fn build_position_ops(grid: &GridSpec, params: &ModelParams) -> Result<PositionOps> {
    if grid.kind != GridKind::PositionHalfLine {
        return Err(invalid("grid", "expected a position half-line grid"));
    }
    let m = grid.count;
    let x = grid.points();
    let p = dst_momenta(grid);
    let s = dst4(m);
    let c = dct4(m);
    let sp = Mat::from_fn(m, m, |i, j| s[(i, j)] * p[j] * p[j]);
    let lap = &sp * &s;
    let cp = Mat::from_fn(m, m, |i, j| c[(i, j)] * p[j]);
    let cps = &cp * &s;
    // A = X C P S is x d/dx
    let a = Mat::from_fn(m, m, |i, j| x[i] * cps[(i, j)]);
    let basis = grid.basis();
    let w = params.omega;
    let g = params.g;
    let real = |f: &dyn Fn(usize, usize) -> f64| OperatorMatrix::from_fn(basis.clone(), m, |i, j| c64::new(f(i, j), 0.0));
    let k = real(&|i, j| if i == j { 0.5 * x[i] * x[i] } else { 0.0 });
    let h0 = real(&|i, j| 0.5 * 0.5 * (lap[(i, j)] + lap[(j, i)]));
    let h = real(&|i, j| {
        let v = 0.5 * 0.5 * (lap[(i, j)] + lap[(j, i)]);
        if i == j {
            v + g / (2.0 * x[i] * x[i])
        } else {
            v
        }
    });
    let d = OperatorMatrix::from_fn(basis.clone(), m, |i, j| 0.25 * I * (a[(i, j)] - a[(j, i)]));
    let h_cs = k.scale_re(w * w).add(&h)?;
    let h_h = k.scale_re(w * w).add(&h0)?;
    let lower = |hh: &OperatorMatrix| -> Result<OperatorMatrix> {
        let k1 = k.scale_re(0.5 * w).sub(&hh.scale_re(0.5 / w))?;
        k1.sub(&d.scale(I))
    };
    let kminus_k = lower(&h)?;
    let kminus_k0 = lower(&h0)?;
    Ok(PositionOps {
        grid: *grid,
        params: *params,
        k,
        d,
        h,
        h_cs,
        h_h,
        kminus_k,
        kminus_k0,
        sine: s,
        momenta: p,
    })
}

/// Eigenvalues of a Hermitian operator matrix, ascending.
pub fn hermitian_eigenvalues(a: &OperatorMatrix) -> Result<Vec<f64>> {
    let herm = Mat::from_fn(a.dim(), a.dim(), |i, j| 0.5 * (a.get(i, j) + a.get(j, i).conj()));
    let ev = herm.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence {
        function: "Hermitian eigenvalues",
        iterations: 0,
        argument: a.dim() as f64,
    })?;
    Ok(ev)
}

/// Interior Hermiticity defect max |A_ij - conj A_ji| over the leading
/// block that excludes the last quarter of the grid.
pub fn interior_hermiticity(a: &OperatorMatrix) -> f64 {
    let n = interior_size(a.dim());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a.get(i, j) - a.get(j, i).conj()).norm());
        }
    }
    worst
}

/// Grid spectrum of H_CS against 2 omega (n + k), the odd oscillator levels
/// 2 omega (n + 3/4), and the structural identities of the grid operators.
pub fn position_spectrum_check(grid: &GridSpec, params: &ModelParams, tol: f64) -> Result<CheckReport> {
    let ops = build_position_ops(grid, params)?;
    let w = params.omega;
    let mut rep = CheckReport::new("position-spectrum").with_params(params);
    rep.set_config("grid", grid.basis());
    let ev = hermitian_eigenvalues(&ops.h_cs)?;
    if ev.len() < 6 {
        return Err(invalid("M", "grid too coarse for the spectrum check"));
    }
    for (n, e) in ev.iter().take(3).enumerate() {
        let exact = 2.0 * w * (n as f64 + params.k);
        rep.at_most(format!("H_CS level {n} (exact {exact})"), (e - exact).abs(), tol);
    }
    let gap = (0..5).map(|n| (ev[n + 1] - ev[n] - 2.0 * w).abs()).fold(0.0, f64::max);
    rep.at_most("H_CS gaps vs 2 omega, lowest 5", gap, tol);
    let eh = hermitian_eigenvalues(&ops.h_h)?;
    for (n, e) in eh.iter().take(2).enumerate() {
        let exact = 2.0 * w * (n as f64 + 0.75);
        rep.at_most(format!("H_h odd level {n} (exact {exact})"), (e - exact).abs(), tol);
    }
    let eq1 = ops.h_cs.sub(&ops.k.scale_re(w * w))?.sub(&ops.h)?.max_abs();
    rep.at_most("H_CS - omega^2 K - H", eq1, 0.0);
    for (label, op) in [("H_CS", &ops.h_cs), ("H_h", &ops.h_h), ("H", &ops.h)] {
        let scale = op.max_abs();
        rep.at_most(format!("{label} interior Hermiticity (relative)"), interior_hermiticity(op) / scale, 1e-10);
    }
    rep.at_most("D interior Hermiticity (relative)", interior_hermiticity(&ops.d) / ops.d.max_abs(), 1e-10);
    Ok(rep)
}

/// Residuals of [K3, K+] - K+ and [K3, K-] + K- on a vector, relative to
/// ||K+- psi||, with K3 = H_CS / (2 omega) and K+- = K1 +- i D.
pub fn closure_residuals(ops: &PositionOps, psi: &[c64]) -> Result<(f64, f64)> {
    let w = ops.params.omega;
    let k3 = ops.h_cs.scale_re(0.5 / w);
    let k1 = ops.k.scale_re(0.5 * w).sub(&ops.h.scale_re(0.5 / w))?;
    let kplus = k1.add(&ops.d.scale(I))?;
    let kminus = &ops.kminus_k;
    let res = |op: &OperatorMatrix, sign: f64| -> f64 {
        let a = k3.apply(&op.apply(psi));
        let b = op.apply(&k3.apply(psi));
        let o = op.apply(psi);
        let r: Vec<c64> = (0..psi.len()).map(|j| a[j] - b[j] - sign * o[j]).collect();
        crate::operator::vec_norm(&r) / crate::operator::vec_norm(&o)
    };
    Ok((res(&kplus, 1.0), res(kminus, -1.0)))
}
