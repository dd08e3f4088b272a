//! Acceptance criteria 1-14 at their stated tolerances, one PASS/FAIL line
//! each. Criterion 12 is expected to fail: its trend half cannot hold on
//! these grids (see README, "Known failure").

use std::fs;
use std::path::Path;
use std::time::Instant;

use timeops::bg_coherent::{
    bg_state, bg_state_auto, bg_state_exponential, default_quadrature, inner_product, overlap, resolution_of_identity,
    BranchConvention,
};
use timeops::c64;
use timeops::config::{parse_suites, RunConfig};
use timeops::grid::{
    arrival_refinement, identity_22_refinement, omega_sweep, position_spectrum_check, similarity_point,
    verify_identity_22, verify_similarity_21_26, GridSpec, PacketSpec, SimilarityConfig, Wavepacket,
};
use timeops::report::Outcome;
use timeops::specfun::AngularRule;
use timeops::su11_fock::{
    casimir, interior_size, verify_algebra, verify_identity_17, verify_identity_18, verify_similarity_19, ModelParams,
    SIMILARITY_19_NS,
};
use timeops::suites::{run_all, write_outputs};
use timeops::time_operator::{
    assemble_t_closed_form, assemble_t_quadrature_checked, commutator_structure, gauge_commutator_change,
    relative_block_deviation, PrefactorMode, TimeOperatorConfig,
};

const KS: [f64; 3] = [0.8, 1.25, 3.0];
const SAFE: PacketSpec = PacketSpec { center: 4.0, width: 0.5, slope: 0.0 };

type Criterion = fn() -> (bool, String);

struct Record {
    id: u32,
    pass: bool,
    detail: String,
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn k_params(k: f64) -> ModelParams {
    ModelParams::with_bargmann_index(1.0, k).unwrap()
}

fn c1() -> (bool, String) {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for k in KS {
        let rep = verify_algebra(&k_params(k), 64, 1e-12).unwrap();
        for r in rep.rows.iter().filter(|r| r.label.contains("interior") && r.label.starts_with('[')) {
            worst = worst.max(r.value);
            ok &= r.outcome == Outcome::Pass;
        }
    }
    let s = t.elapsed().as_secs_f64();
    (ok && s < 1.0, format!("max interior residual {worst:.2e} (<= 1e-12), {s:.2}s"))
}

fn c2() -> (bool, String) {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for g in [0.0, 0.5, 2.0, 8.0] {
        let p = ModelParams::new(1.0, g).unwrap();
        let c = casimir(&p, 64).unwrap();
        let want = (4.0 * g - 3.0) / 16.0;
        for i in 0..interior_size(64) {
            for j in 0..interior_size(64) {
                let target = if i == j { want } else { 0.0 };
                worst = worst.max((c.get(i, j) - target).norm());
            }
        }
    }
    let s = t.elapsed().as_secs_f64();
    (worst <= 1e-12 && s < 1.0, format!("max |C - (4g-3)/16 I| {worst:.2e}, {s:.2}s"))
}

fn c3() -> (bool, String) {
    let t = Instant::now();
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let a = verify_identity_17(&p, 64, 3, 1e-12).unwrap();
    let b = verify_identity_18(&p, 64, 1e-12).unwrap();
    let worst = a.rows.iter().chain(&b.rows).filter(|r| r.outcome != Outcome::Informational).map(|r| r.value).fold(0.0, f64::max);
    let s = t.elapsed().as_secs_f64();
    (a.passed() && b.passed() && s < 1.0, format!("max interior residual {worst:.2e}, {s:.2}s"))
}

fn labels() -> Vec<c64> {
    let mut out = Vec::new();
    for r in [0.0, 0.3, 1.0, 2.0, 3.0] {
        for j in 0..8 {
            out.push(c64::from_polar(r, -3.0 + 0.8 * j as f64));
        }
    }
    out
}

fn c4() -> (bool, String) {
    let t = Instant::now();
    let mut eig: f64 = 0.0;
    let mut ov: f64 = 0.0;
    let mut cons: f64 = 0.0;
    for k in KS {
        let p = k_params(k);
        for b in [BranchConvention::Principal, BranchConvention::Positive] {
            let zs = labels();
            for z in &zs {
                let v = bg_state_auto(*z, &p, b).unwrap();
                eig = eig.max(v.eigen_residual());
                let e = bg_state_exponential(*z, &p, v.dim(), b).unwrap();
                for (x, y) in v.coeffs.iter().zip(&e.coeffs) {
                    cons = cons.max((x - y).norm());
                }
            }
            for (i, z1) in zs.iter().enumerate().step_by(3) {
                for z2 in zs.iter().skip(i).step_by(5) {
                    let a = bg_state(*z1, &p, 96, b).unwrap();
                    let c = bg_state(*z2, &p, 96, b).unwrap();
                    let d = inner_product(&a, &c);
                    let o = overlap(*z1, *z2, &p, b).unwrap();
                    ov = ov.max((d - o).norm() / o.norm());
                }
            }
        }
    }
    let s = t.elapsed().as_secs_f64();
    (
        eig <= 1e-10 && ov <= 1e-10 && cons <= 1e-12 && s < 5.0,
        format!("eigen {eig:.2e}, overlap {ov:.2e} (rel), constructions {cons:.2e}, {s:.2}s"),
    )
}

fn c5() -> (bool, String) {
    let t = Instant::now();
    let mut ok = true;
    let (mut dev, mut drift): (f64, f64) = (0.0, 0.0);
    for k in KS {
        let p = k_params(k);
        let q = default_quadrature(p.k, 11, 200, 256, AngularRule::Trapezoid, BranchConvention::Principal).unwrap();
        let (_, rep) = resolution_of_identity(&p, 12, &q, 1e-8, 1e-9).unwrap();
        ok &= rep.passed();
        dev = dev.max(rep.row("max |block - I|").unwrap().value);
        drift = drift.max(rep.row("node-doubling drift").unwrap().value);
    }
    let s = t.elapsed().as_secs_f64();
    (ok && s < 30.0, format!("max |block - I| {dev:.2e}, drift {drift:.2e}, {s:.2}s"))
}

fn c6() -> (bool, String) {
    let t = Instant::now();
    let mut ok = true;
    let (mut rel, mut herm, mut diag_t, mut diag_c): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for k in KS {
        let p = k_params(k);
        for b in [BranchConvention::Principal, BranchConvention::Positive] {
            let cfg = TimeOperatorConfig::new(p, 16, b, PrefactorMode::AsWritten).unwrap();
            let closed = assemble_t_closed_form(&cfg).unwrap();
            let (quad, _) = assemble_t_quadrature_checked(&cfg, 1e-9).unwrap();
            rel = rel.max(relative_block_deviation(&quad, &closed, 12).unwrap());
            let big = assemble_t_closed_form(&TimeOperatorConfig::new(p, 64, b, PrefactorMode::AsWritten).unwrap()).unwrap();
            let rep = commutator_structure(&big, &p).unwrap();
            diag_c = diag_c.max(rep.row("max |diag [H_CS, T]|").unwrap().value);
            if b == BranchConvention::Principal {
                herm = herm.max(big.hermiticity_defect());
                diag_t = diag_t.max((0..64).map(|i| big.get(i, i).norm()).fold(0.0, f64::max));
            }
        }
    }
    ok &= rel <= 1e-8 && herm <= 1e-12 && diag_t == 0.0 && diag_c == 0.0;
    let s = t.elapsed().as_secs_f64();
    (
        ok && s < 60.0,
        format!("quadrature vs closed {rel:.2e}, Hermiticity {herm:.1e}, |diag T| {diag_t}, |diag [H,T]| {diag_c}, {s:.2}s"),
    )
}

fn c7() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for k in KS {
        let p = k_params(k);
        let t = assemble_t_closed_form(&TimeOperatorConfig::new(p, 64, BranchConvention::Principal, PrefactorMode::AsWritten).unwrap())
            .unwrap();
        for deg in 0..=6 {
            let phi: Vec<f64> = (0..=deg).map(|j| (-1.0f64).powi(j) * 0.7 / (j as f64 + 1.0)).collect();
            worst = worst.max(gauge_commutator_change(&t, &phi, &p).unwrap());
        }
    }
    (worst == 0.0, format!("max |[H_CS, T + phi(H_CS)] - [H_CS, T]| = {worst} for degree <= 6"))
}

fn c8() -> (bool, String) {
    let t = Instant::now();
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let rep = verify_similarity_19(&p, 64, 8, &SIMILARITY_19_NS, 1e-7).unwrap();
    let trend = rep.row("shrinks >= 10x per doubling of N").unwrap();
    let table = rep.table("similarity-19").unwrap();
    let vals: Vec<String> = table.rows.iter().map(|r| format!("N={}: {:.3e}", r.resolution, r.residual)).collect();
    (
        trend.outcome == Outcome::Pass,
        format!("worst doubling ratio {:.3e} (>= 10); {}; {:.1}s", trend.value, vals.join(", "), t.elapsed().as_secs_f64()),
    )
}

fn c9() -> (bool, String) {
    let t = Instant::now();
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let rep = position_spectrum_check(&GridSpec::position_half_line(1024, 10.0).unwrap(), &p, 1e-4).unwrap();
    let levels: Vec<f64> = rep.rows.iter().filter(|r| r.label.starts_with("H_CS level")).map(|r| r.value).collect();
    let ok = levels.len() == 3 && levels.iter().all(|v| *v <= 1e-4);
    let s = t.elapsed().as_secs_f64();
    (ok && s < 30.0, format!("level errors {} (<= 1e-4), {s:.2}s", sci(&levels)))
}

fn c10() -> (bool, String) {
    let grid = GridSpec::momentum_line(1024, 16.0).unwrap();
    let w = Wavepacket::gaussian(&grid, SAFE).unwrap();
    let rep = verify_identity_22(&grid, 1.0, &[w]).unwrap();
    let gate = rep.rows.iter().filter(|r| r.outcome != Outcome::Informational).map(|r| r.value).fold(0.0, f64::max);
    let (a, b) = identity_22_refinement(&[512, 1024], 16.0, 1.0, PacketSpec::new(3.0, 0.08)).unwrap();
    let ra = a.rows[0].residual / a.rows[1].residual;
    let rb = b.rows[0].residual / b.rows[1].residual;
    (
        rep.passed() && gate <= 1e-6 && ra >= 10.0 && rb >= 10.0,
        format!("M=1024 residual {gate:.2e} (<= 1e-6); M=512 -> 1024 improvement {ra:.2e} and {rb:.2e} (>= 10)"),
    )
}

fn c11() -> (bool, String) {
    let ms = [512, 1024, 2048];
    let (safe, sv) = arrival_refinement(&ms, 16.0, 1.0, SAFE).unwrap();
    let (trend, tv) = arrival_refinement(&ms, 16.0, 1.0, PacketSpec::new(4.0, 0.03)).unwrap();
    let i = c64::new(0.0, 1.0);
    let guard = (sv[2] - i).norm().max((tv[2] - i).norm());
    let monotone = trend.strictly_decreasing(1.0);
    let r: Vec<String> = trend.rows.iter().map(|r| format!("{:.2e}", r.residual)).collect();
    let rs: Vec<String> = safe.rows.iter().map(|r| format!("{:.1e}", r.residual)).collect();
    (
        guard <= 5e-3 && monotone,
        format!("M=2048 guard {guard:.2e} (<= 5e-3); refinement {} (strictly decreasing); resolved packet {}", r.join(" > "), rs.join(", ")),
    )
}

fn c12() -> (bool, String) {
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let (rep, points) = verify_similarity_21_26(&SimilarityConfig::new(p)).unwrap();
    let trend_ok = rep.rows.iter().filter(|r| r.label.starts_with("intertwining residual")).all(|r| r.outcome == Outcome::Pass);
    let overflow = points.iter().filter(|pt| pt.transformed.is_none()).map(|pt| pt.count.to_string()).collect::<Vec<_>>();
    // non-Hermiticity where S exists
    let g = GridSpec::position_half_line(64, 10.0).unwrap();
    let pt = similarity_point(&g, &p, 1, SAFE).unwrap();
    let nh = pt.transformed.as_ref().map_or(f64::NAN, |t| t.non_hermiticity);
    let floor = points.iter().map(|pt| pt.lower_bounds[0]).fold(f64::INFINITY, f64::min);
    (
        trend_ok && nh > 1e-3,
        format!(
            "intertwining trend {}: exp(-K-) overflows at M={}, residual floor dist(E_0, spec H_CS) >= {floor:.4}; \
             non-Hermiticity at M=64 {nh:.4} (> 1e-3)",
            if trend_ok { "holds" } else { "not attainable" },
            overflow.join(",")
        ),
    )
}

fn c13() -> (bool, String) {
    let grid = GridSpec::momentum_line(1024, 16.0).unwrap();
    let sw = omega_sweep(&grid, &[0.2, 0.1, 0.05], SAFE).unwrap();
    (
        sw.exponent >= 1.8,
        format!("fitted exponent {:.3} (>= 1.8), residuals {}", sw.exponent, sci(&sw.packet_residuals)),
    )
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn c14() -> (bool, String) {
    let mut cfg = RunConfig { suites: parse_suites("coherent,timeop,arrival,similarity").unwrap(), ..RunConfig::default() };
    cfg.apply_file("branch = principal,positive\nmomentum-M = 256,512\nposition-M = 256\nsimilarity-M = 32,48,64\n").unwrap();
    let params = cfg.params().unwrap();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (i, d) in dirs.iter().enumerate() {
        let mut c = cfg.clone();
        c.parallel = i == 2;
        write_outputs(d.path(), &params, &run_all(&c)).unwrap();
    }
    let a = tree(dirs[0].path());
    let same = a == tree(dirs[1].path()) && a == tree(dirs[2].path());
    (same, format!("{} files byte-identical across two sequential runs and one parallel run", a.len()))
}

fn main() {
    faer::set_global_parallelism(faer::Par::Seq);
    let criteria: Vec<(u32, Criterion)> = vec![
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
        (11, c11),
        (12, c12),
        (13, c13),
        (14, c14),
    ];
    let mut results = Vec::new();
    for (id, f) in criteria {
        let (pass, detail) = f();
        println!("criterion {id:>2}: {} {detail}", if pass { "PASS" } else { "FAIL" });
        results.push(Record { id, pass, detail });
    }
    let expected_fail = [12];
    let unexpected: Vec<String> = results
        .iter()
        .filter(|r| r.pass == expected_fail.contains(&r.id))
        .map(|r| format!("criterion {}: {} ({})", r.id, if r.pass { "PASS, expected FAIL" } else { "FAIL" }, r.detail))
        .collect();
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes: {unexpected:#?}");
        std::process::exit(1);
    }
    println!("acceptance: outcomes as expected (criterion 12 fails by analysis)");
}
