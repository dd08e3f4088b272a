//! Check suites behind the `run` command, their output files and the exit
//! code contract: 0 all toleranced checks pass, 2 some check or trend
//! fails, 1 a suite could not run, 64 invalid configuration.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bg_coherent::{
    analytic_fock_deviation, bg_state, bg_state_auto, bg_state_exponential, default_quadrature, inner_product,
    overlap, resolution_of_identity, BranchConvention,
};
use crate::config::{RunConfig, Suite};
use crate::error::{Error, Result};
use crate::grid::{
    arrival_refinement, build_position_ops, build_th, closure_residuals, build_th_full_line, identity_22_refinement, odd_sector_eigenvalues, omega_sweep,
    position_spectrum_check, similarity_point, t0_commutator, verify_identity_22, verify_similarity_21_26, GridSpec,
    PacketSpec, SimilarityConfig, Wavepacket,
};
use crate::operator::OperatorMatrix;
use crate::report::{dump_matrix, emit_plotdata, timestamp_from_env, CheckReport, ConvergenceTable};
use crate::specfun::AngularRule;
use crate::su11_fock::{
    energy_eigenstate_20, verify_algebra, verify_identity_17, verify_identity_18, verify_similarity_19, ModelParams,
    SIMILARITY_19_NS,
};
use crate::time_operator::{
    assemble_t_closed_form, assemble_t_quadrature_checked, commutator_structure, gauge_commutator_change,
    relative_block_deviation, uncertainty_report, TimeOperatorConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROGRAM: i32 = 1;
pub const EXIT_CHECKS: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;

/// Packet overlapping p = 0 at the 3e-4 level, reported but not gated.
pub const NEAR_PACKET: PacketSpec = PacketSpec { center: 2.0, width: 0.5, slope: 0.0 };
/// Narrow packet still unresolved at M = 512, for the refinement trend.
pub const TREND_PACKET: PacketSpec = PacketSpec { center: 3.0, width: 0.08, slope: 0.0 };
/// Packet with weight below the edge threshold at p = 0, for T_h checks.
pub const SAFE_PACKET: PacketSpec = PacketSpec { center: 4.0, width: 0.5, slope: 0.0 };
/// Narrow safe packet resolved only at M = 2048, for the arrival trend.
pub const ARRIVAL_TREND_PACKET: PacketSpec = PacketSpec { center: 4.0, width: 0.03, slope: 0.0 };
/// Packet centred on the singularity, reported but not gated.
pub const SINGULAR_PACKET: PacketSpec = PacketSpec { center: 0.5, width: 0.5, slope: 0.0 };
/// Frequencies of the small-omega sweep.
pub const SWEEP_OMEGAS: [f64; 3] = [0.2, 0.1, 0.05];
/// Frozen tolerance for the Fock similarity residual at N = 64, 8x8
/// block, omega = 1, g = 2 (measured 7.2325e-8).
pub const SIMILARITY_19_TOL: f64 = 1e-7;
/// Energy of the continuum eigenstate check; at E = 1 the f64 residual
/// reaches its roundoff floor by N = 64 and grows after it.
pub const EIGENSTATE_ENERGY: f64 = 0.5;
/// Grids on which e^{-K-} is still finite in f64.
pub const COARSE_SIMILARITY_M: [usize; 3] = [32, 48, 64];
/// Coherent labels used by the coherent and timeop suites.
pub const COHERENT_LABELS: [(f64, f64); 5] = [(0.5, 0.0), (1.0, 1.0), (-2.0, 0.5), (0.0, 3.0), (-1.5, -1.5)];

pub struct SuiteOutput {
    pub suite: Suite,
    pub report: CheckReport,
    pub matrices: Vec<(String, OperatorMatrix)>,
}

fn base_report(name: &str, cfg: &RunConfig, p: &ModelParams) -> CheckReport {
    let mut rep = CheckReport::new(name).with_params(p);
    for (k, v) in cfg.echo() {
        rep.set_config(k, v);
    }
    rep
}

fn branch_name(b: BranchConvention) -> &'static str {
    match b {
        BranchConvention::Principal => "principal",
        BranchConvention::Positive => "positive",
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<SuiteOutput> {
    let p = cfg.params()?;
    let (report, matrices) = match suite {
        Suite::Algebra => (algebra(cfg, &p)?, Vec::new()),
        Suite::Coherent => (coherent(cfg, &p)?, Vec::new()),
        Suite::Timeop => timeop(cfg, &p)?,
        Suite::Arrival => (arrival(cfg)?, Vec::new()),
        Suite::Similarity => (similarity(cfg, &p)?, Vec::new()),
    };
    Ok(SuiteOutput { suite, report, matrices })
}

fn algebra(cfg: &RunConfig, p: &ModelParams) -> Result<CheckReport> {
    let mut rep = base_report("algebra", cfg, p);
    let n = cfg.n;
    rep.absorb("su11", verify_algebra(p, n, 1e-12)?);
    rep.absorb("identity-17", verify_identity_17(p, n, 3, 1e-12)?);
    rep.absorb("identity-18", verify_identity_18(p, n, 1e-12)?);
    let mut sim = verify_similarity_19(p, 64, 8, &SIMILARITY_19_NS, SIMILARITY_19_TOL)?;
    if p.omega != 1.0 || p.g != 2.0 {
        // the frozen tolerance only applies to the calibrated parameters
        for r in &mut sim.rows {
            if r.label.starts_with("top-left") {
                r.tolerance = crate::report::Tolerance::Informational;
                r.outcome = crate::report::Outcome::Informational;
            }
        }
        sim.note("calibrated tolerance applies to omega = 1, g = 2 only");
    }
    rep.absorb("similarity-19", sim);
    let (_, e20) = energy_eigenstate_20(p, n, EIGENSTATE_ENERGY, &[32, 64, 128])?;
    rep.absorb("energy-eigenstate-20", e20);
    Ok(rep)
}

fn labels() -> impl Iterator<Item = c64> {
    COHERENT_LABELS.iter().map(|&(a, b)| c64::new(a, b))
}

fn coherent(cfg: &RunConfig, p: &ModelParams) -> Result<CheckReport> {
    let mut rep = base_report("coherent", cfg, p);
    let branch = cfg.branches[0];
    let mut worst_eigen: f64 = 0.0;
    let mut worst_construct: f64 = 0.0;
    let mut n_max = 0;
    for z in labels() {
        let v = bg_state_auto(z, p, branch)?;
        worst_eigen = worst_eigen.max(v.eigen_residual());
        let e = bg_state_exponential(z, p, v.dim(), branch)?;
        let d = v.coeffs.iter().zip(&e.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst_construct = worst_construct.max(d);
        n_max = n_max.max(v.dim());
    }
    rep.at_most("max ||K- v - z v||, |z| <= 3, auto N", worst_eigen, 1e-10);
    rep.at_most("series vs exponential construction, entrywise", worst_construct, 1e-12);
    let zs: Vec<c64> = labels().collect();
    let mut worst_overlap: f64 = 0.0;
    for (a, za) in zs.iter().enumerate() {
        for zb in zs.iter().skip(a) {
            let va = bg_state(*za, p, n_max, branch)?;
            let vb = bg_state(*zb, p, n_max, branch)?;
            let direct = inner_product(&va, &vb);
            let closed = overlap(*za, *zb, p, branch)?;
            worst_overlap = worst_overlap.max((direct - closed).norm() / closed.norm());
        }
    }
    rep.at_most("closed-form overlap vs inner product (relative)", worst_overlap, 1e-10);
    let quad = default_quadrature(p.k, 11, 200, 256, AngularRule::Trapezoid, branch)?;
    let (_, id) = resolution_of_identity(p, 12, &quad, 1e-8, 1e-9)?;
    rep.absorb("identity", id);
    rep.at_most("analytic representation vs Fock, 12x12", analytic_fock_deviation(p, 12)?, 1e-10);
    Ok(rep)
}

/// Assembly size for the quadrature cross-check; the comparison uses the
/// top 12x12 block.
pub const T_QUADRATURE_N: usize = 16;

fn timeop(cfg: &RunConfig, p: &ModelParams) -> Result<(CheckReport, Vec<(String, OperatorMatrix)>)> {
    let mut rep = base_report("timeop", cfg, p);
    let mut mats = Vec::new();
    for &branch in &cfg.branches {
        let tag = branch_name(branch);
        let small = TimeOperatorConfig::with_nodes(
            *p,
            T_QUADRATURE_N,
            branch,
            cfg.prefactor,
            cfg.radial_nodes,
            cfg.angular_nodes,
        )?;
        let closed_small = assemble_t_closed_form(&small)?;
        match assemble_t_quadrature_checked(&small, 1e-9) {
            Ok((quad, drift)) => {
                rep.at_most(
                    format!("{tag}: quadrature vs closed form, top 12x12 (relative)"),
                    relative_block_deviation(&quad, &closed_small, 12)?,
                    1e-8,
                );
                rep.at_most(format!("{tag}: node-doubling drift (relative)"), drift, 1e-9);
            }
            Err(Error::UnderResolved { drift, limit }) => {
                rep.at_most(format!("{tag}: node-doubling drift (relative)"), drift, limit);
            }
            Err(e) => return Err(e),
        }
        let full = TimeOperatorConfig {
            n: cfg.n,
            ..small.clone()
        };
        let t = assemble_t_closed_form(&full)?;
        let diag = (0..t.dim()).map(|i| t.get(i, i).norm()).fold(0.0, f64::max);
        if branch == BranchConvention::Principal {
            rep.at_most(format!("{tag}: Hermiticity defect"), t.hermiticity_defect(), 1e-12);
            rep.at_most(format!("{tag}: max |diag T|"), diag, 0.0);
        } else {
            rep.at_most(format!("{tag}: Hermiticity defect"), t.hermiticity_defect(), 1e-12);
            rep.info(format!("{tag}: max |diag T|"), diag);
        }
        rep.absorb(tag, commutator_structure(&t, p)?);
        let mut gauge: f64 = 0.0;
        for degree in 0..=6 {
            let phi: Vec<f64> = (0..=degree).map(|j| 1.0 / (j as f64 + 1.0)).collect();
            gauge = gauge.max(gauge_commutator_change(&t, &phi, p)?);
        }
        rep.at_most(format!("{tag}: [H_CS, T + phi(H_CS)] - [H_CS, T], deg <= 6"), gauge, 0.0);
        let u = uncertainty_report(c64::new(1.0, 1.0), &t, p, branch)?;
        rep.at_most(
            format!("{tag}: Delta H matrix vs series route (relative)"),
            (u.dh - u.dh_series).abs() / u.dh,
            1e-12,
        );
        rep.info(format!("{tag}: Delta H at z = 1+i"), u.dh);
        rep.info(format!("{tag}: Delta T at z = 1+i"), u.dt);
        rep.info(format!("{tag}: Delta H Delta T at z = 1+i"), u.product);
        mats.push((format!("t_{tag}"), t));
    }
    if mats.len() == 2 {
        let (a, b) = (&mats[0].1, &mats[1].1);
        let mut table = ConvergenceTable::new("branch-diagonal-difference", "n");
        for i in 0..a.dim() {
            table.push(i as f64, (b.get(i, i) - a.get(i, i)).norm());
        }
        rep.add_table(table);
        let off = (0..a.dim())
            .flat_map(|i| (0..a.dim()).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| (b.get(i, j) - a.get(i, j)).norm())
            .fold(0.0, f64::max);
        rep.info("max off-diagonal branch difference", off);
    }
    Ok((rep, mats))
}

fn arrival(cfg: &RunConfig) -> Result<CheckReport> {
    let omega = cfg.omega;
    let l = cfg.momentum_half_width;
    let ms = &cfg.momentum_points;
    let p = cfg.params()?;
    let mut rep = base_report("arrival", cfg, &p);
    let gate_m = ms[1.min(ms.len() - 1)];
    let grid = GridSpec::momentum_line(gate_m, l)?;
    let packets = vec![
        Wavepacket::gaussian(&grid, SAFE_PACKET)?,
        Wavepacket::gaussian(&grid, NEAR_PACKET)?,
        Wavepacket::gaussian(&grid, SINGULAR_PACKET)?,
    ];
    rep.absorb("identity-22", verify_identity_22(&grid, omega, &packets)?);
    let pair = &ms[..2.min(ms.len())];
    let (a, b) = identity_22_refinement(pair, l, omega, TREND_PACKET)?;
    rep.add_table(a);
    rep.add_table(b);
    rep.trend("identity-22 T0 H0 T0 form improves >= 10x", "identity-22-t0", 10.0);
    rep.trend("identity-22 Q H0 Q form improves >= 10x", "identity-22-q", 10.0);
    let mut t0 = ConvergenceTable::new("t0-h0-commutator", "M");
    for &m in ms {
        let g = GridSpec::momentum_line(m, l)?;
        let c = t0_commutator(&g, SAFE_PACKET)?;
        t0.push(m as f64, (c - c64::new(0.0, 1.0)).norm());
    }
    let worst = t0.rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    rep.add_table(t0);
    rep.at_most("<[T0, H0]> - i on all grids", worst, 1e-6);
    let odd = odd_sector_eigenvalues(&grid, omega)?;
    rep.at_most("lowest odd level of H_h vs 1.5 omega", (odd[0] - 1.5 * omega).abs(), 1e-6);
    let ar = build_th(&GridSpec::momentum_line(ms[0], l)?, omega)?;
    rep.at_most("T_h Hermiticity defect", ar.th.hermiticity_defect(), 1e-12);
    rep.info("T_h eigenvector condition", ar.condition);
    let top = ms[ms.len() - 1];
    let (safe, safe_values) = arrival_refinement(ms, l, omega, SAFE_PACKET)?;
    let (table, values) = arrival_refinement(ms, l, omega, ARRIVAL_TREND_PACKET)?;
    for (tag, v) in [("p0=4, sigma=0.5", &safe_values), ("p0=4, sigma=0.03", &values)] {
        let last = v.last().copied().unwrap_or(c64::new(f64::NAN, f64::NAN));
        rep.at_most(format!("<[H_h, T_h]> - i at M={top}, packet {tag}"), (last - c64::new(0.0, 1.0)).norm(), 5e-3);
    }
    let mut safe = safe;
    safe.name = "arrival-commutator-resolved".into();
    rep.add_table(safe);
    rep.add_table(table);
    rep.trend("<[H_h, T_h]> - i improves under refinement", "arrival-commutator", 1.0);
    let sweep_grid = grid;
    let sweep = omega_sweep(&sweep_grid, &SWEEP_OMEGAS, SAFE_PACKET)?;
    let mut st = ConvergenceTable::new("omega-sweep", "omega");
    let mut so = ConvergenceTable::new("omega-sweep-operator-norm", "omega");
    for ((w, r), o) in sweep.omegas.iter().zip(&sweep.packet_residuals).zip(&sweep.operator_residuals) {
        st.push(*w, *r);
        so.push(*w, *o);
    }
    rep.add_table(st);
    rep.add_table(so);
    rep.at_least("small-omega fitted exponent", sweep.exponent, 1.8);
    let diag = GridSpec::momentum_line(64, 8.0)?;
    match build_th_full_line(&diag, omega) {
        Ok(r) => rep.info("full-line eigen route condition (accepted)", r.condition),
        Err(Error::IllConditioned { condition, .. }) => {
            rep.info("full-line eigen route condition (rejected)", condition);
            rep.note("full-line eigendecomposition of omega Q rejected by the condition guard; T_h is built per sign branch");
        }
        Err(e) => return Err(e),
    }
    Ok(rep)
}

fn similarity(cfg: &RunConfig, p: &ModelParams) -> Result<CheckReport> {
    let mut rep = base_report("similarity", cfg, p);
    let grid = GridSpec::position_half_line(cfg.position_points, cfg.position_length)?;
    rep.absorb("spectrum", position_spectrum_check(&grid, p, 1e-4)?);
    let sc = SimilarityConfig {
        counts: cfg.similarity_points.clone(),
        length: cfg.position_length,
        ..SimilarityConfig::new(*p)
    };
    let (sim, _) = verify_similarity_21_26(&sc)?;
    rep.absorb("", sim);
    let mut finest = None;
    let mut table = ConvergenceTable::new("intertwining-coarse-n0", "M");
    for m in COARSE_SIMILARITY_M {
        let g = GridSpec::position_half_line(m, cfg.position_length)?;
        let pt = similarity_point(&g, p, sc.n_low, sc.packet)?;
        if let Some(t) = &pt.transformed {
            rep.info(format!("coarse M={m}: intertwining n=0"), t.intertwining[0]);
            rep.info(format!("coarse M={m}: floor dist(E_0, spec H_CS)"), pt.lower_bounds[0]);
            rep.info(format!("coarse M={m}: S^-1 S - I interior"), t.inverse_defect);
            table.push(m as f64, t.intertwining[0]);
            finest = Some((m, t.non_hermiticity));
        }
    }
    rep.add_table(table);
    match finest {
        Some((m, v)) => {
            rep.at_least(format!("||T_CS - T_CS^dag|| / ||T_CS|| at M={m}, finest grid with finite S"), v, 1e-3);
        }
        None => {
            rep.at_least("||T_CS - T_CS^dag|| / ||T_CS|| (no grid with finite S)", f64::NAN, 1e-3);
        }
    }
    let probe = Wavepacket::gaussian(&grid, sc.packet)?;
    let (plus, minus) = closure_residuals(&build_position_ops(&grid, p)?, &probe.values)?;
    rep.info("grid [K3, K+] - K+ on packet (relative)", plus);
    rep.info("grid [K3, K-] + K- on packet (relative)", minus);
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteStatus {
    pub name: String,
    /// pass | fail | error
    pub status: String,
    pub failures: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub exit_code: i32,
    pub suites: Vec<SuiteStatus>,
    pub timestamp: String,
    pub artifact_version: String,
}

/// Runs the selected suites, in parallel with `parallel`; results keep
/// suite order either way.
pub fn run_all(cfg: &RunConfig) -> Vec<(Suite, Result<SuiteOutput>)> {
    if cfg.parallel {
        cfg.suites.par_iter().map(|&s| (s, run_suite(s, cfg))).collect()
    } else {
        cfg.suites.iter().map(|&s| (s, run_suite(s, cfg))).collect()
    }
}

/// Writes `<suite>.json`, the plot CSVs, dumped matrices and summary.json
/// into `dir`.
pub fn write_outputs(dir: &Path, params: &ModelParams, results: &[(Suite, Result<SuiteOutput>)]) -> Result<Summary> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", dir.display()))))?;
    let mut suites = Vec::new();
    let mut code = EXIT_OK;
    for (suite, res) in results {
        match res {
            Ok(out) => {
                out.report.write_json(&dir.join(format!("{}.json", suite.name())))?;
                emit_plotdata(&out.report, dir)?;
                for (name, m) in &out.matrices {
                    dump_matrix(m, params, &dir.join(format!("{name}.txt")))?;
                }
                let failures: Vec<String> = out.report.failures().map(|r| r.label.clone()).collect();
                if !failures.is_empty() && code == EXIT_OK {
                    code = EXIT_CHECKS;
                }
                suites.push(SuiteStatus {
                    name: suite.name().into(),
                    status: if failures.is_empty() { "pass" } else { "fail" }.into(),
                    failures,
                    error: None,
                });
            }
            Err(e) => {
                code = EXIT_PROGRAM;
                suites.push(SuiteStatus {
                    name: suite.name().into(),
                    status: "error".into(),
                    failures: Vec::new(),
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let summary = Summary {
        exit_code: code,
        suites,
        timestamp: timestamp_from_env(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    let path = dir.join("summary.json");
    fs::write(&path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(summary)
}

/// Validates, runs and writes one configuration; returns the exit code.
pub fn run_config(cfg: &RunConfig) -> Result<Summary> {
    cfg.validate()?;
    let params = cfg.params()?;
    let results = run_all(cfg);
    write_outputs(&cfg.out, &params, &results)
}

/// Output directory of one sweep point.
pub fn sweep_dir(base: &Path, param: &str, value: &str) -> PathBuf {
    base.join(format!("{param}={value}"))
}

/// Runs `cfg` once per value of `param`; the worst exit code wins, with
/// program errors ranked above check failures.
pub fn run_sweep(cfg: &RunConfig, param: &str, values: &[String]) -> Result<(i32, Vec<Summary>)> {
    let mut code = EXIT_OK;
    let mut out = Vec::new();
    for v in values {
        let mut c = cfg.clone();
        c.set(param, v)?;
        c.out = sweep_dir(&cfg.out, param, v);
        let s = run_config(&c)?;
        code = match (code, s.exit_code) {
            (EXIT_PROGRAM, _) | (_, EXIT_PROGRAM) => EXIT_PROGRAM,
            (EXIT_CHECKS, _) | (_, EXIT_CHECKS) => EXIT_CHECKS,
            _ => EXIT_OK,
        };
        out.push(s);
    }
    Ok((code, out))
}

/// Exit code for an error that escaped before any suite ran.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Parse { .. } => EXIT_CONFIG,
        _ => EXIT_PROGRAM,
    }
}
