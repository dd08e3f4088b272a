use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use timeops::bg_coherent::BranchConvention;
use timeops::report::{emit_plotdata, load_matrix, CheckReport, ConvergenceTable};
use timeops::su11_fock::ModelParams;
use timeops::suites::{Summary, EXIT_CHECKS, EXIT_CONFIG, EXIT_OK, EXIT_PROGRAM};
use timeops::time_operator::{assemble_t_closed_form, PrefactorMode, TimeOperatorConfig};
use timeops::Error;

fn timeops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timeops"))
        .args(args)
        .env_remove("TIMEOPS_DEFAULT_OUT")
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn invalid_configuration_exits_64_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = timeops(&["run", "--suite", "nope", "--out", out]);
    assert_eq!(code(&o), EXIT_CONFIG);
    assert!(stderr(&o).contains("suite"), "{}", stderr(&o));
    let o = timeops(&["run", "--suite", "algebra", "--omega", "-1", "--out", out]);
    assert_eq!(code(&o), EXIT_CONFIG);
    assert!(stderr(&o).contains("omega"), "{}", stderr(&o));
    let o = timeops(&["run", "--branch", "sideways", "--out", out]);
    assert_eq!(code(&o), EXIT_CONFIG);
    assert!(stderr(&o).contains("branch"));
    let o = timeops(&["run", "--prefactor", "doubled", "--out", out]);
    assert_eq!(code(&o), EXIT_CONFIG);
    assert!(stderr(&o).contains("prefactor"));
    let o = timeops(&["run", "--no-such-flag"]);
    assert_eq!(code(&o), EXIT_CONFIG);
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "suite = timeop\nmystery = 3\n").unwrap();
    let o = timeops(&["run", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&o), EXIT_CONFIG);
    assert!(stderr(&o).contains("mystery"));
    fs::write(&cfg, "suite timeop\n").unwrap();
    let o = timeops(&["run", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&o), EXIT_CONFIG);
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn missing_config_file_is_a_program_error() {
    let o = timeops(&["run", "--config", "/nonexistent/timeops.cfg"]);
    assert_eq!(code(&o), EXIT_PROGRAM);
    assert!(stderr(&o).contains("/nonexistent/timeops.cfg"));
}

#[test]
fn algebra_defaults_pass_and_report_the_casimir() {
    let dir = tempfile::tempdir().unwrap();
    let o = timeops(&["run", "--suite", "algebra", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stdout));
    let rep = CheckReport::from_json(&fs::read_to_string(dir.path().join("algebra.json")).unwrap()).unwrap();
    let c = rep.rows.iter().find(|r| r.label.contains("Casimir interior (0,0)")).unwrap();
    assert!((c.value - 0.3125).abs() <= 1e-12);
    let csv = fs::read_to_string(dir.path().join("algebra__similarity-19_similarity-19.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "resolution,residual");
    assert_eq!(lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect::<Vec<_>>(), ["32", "64", "96", "128"]);
    let summary: Summary = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.exit_code, EXIT_OK);
    assert_eq!(summary.timestamp, "1970-01-01T00:00:00Z");
}

#[test]
fn both_branches_dump_two_matrices_and_the_difference_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = timeops(&["run", "--suite", "timeop", "--branch", "principal,positive", "--N", "32", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK);
    let p = ModelParams::new(1.0, 2.0).unwrap();
    for (name, b) in [("t_principal.txt", BranchConvention::Principal), ("t_positive.txt", BranchConvention::Positive)] {
        let (h, m) = load_matrix(&dir.path().join(name)).unwrap();
        assert_eq!(h.dim, 32);
        assert_eq!(h.k, 1.25);
        let t = assemble_t_closed_form(&TimeOperatorConfig::new(p, 32, b, PrefactorMode::AsWritten).unwrap()).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                assert_eq!(m.get(i, j), t.get(i, j));
            }
        }
    }
    let csv = fs::read_to_string(dir.path().join("timeop__branch-diagonal-difference.csv")).unwrap();
    assert_eq!(csv.lines().count(), 33);
    for line in csv.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 0.5).abs() <= 1e-13);
    }
}

#[test]
fn identical_configurations_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "run".to_string(),
            "--suite".into(),
            "coherent,timeop".into(),
            "--branch".into(),
            "principal,positive".into(),
            "--N".into(),
            "32".into(),
            "--out".into(),
            d.to_str().unwrap().into(),
        ]
    };
    let run = |v: Vec<String>| timeops(&v.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&run(args(a.path()))), EXIT_OK);
    let mut par = args(b.path());
    par.push("--parallel".into());
    assert_eq!(code(&run(par)), EXIT_OK);
    assert_eq!(read_tree(a.path()), read_tree(b.path()));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_timeops"))
        .args(["run", "--suite", "coherent"])
        .env("TIMEOPS_DEFAULT_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(code(&o), EXIT_OK);
    assert!(target.join("coherent.json").exists());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# timeop at a small truncation\nsuite = timeop\nN = 24\nomega = 3\n").unwrap();
    let out = dir.path().join("o");
    let o = timeops(&["run", "--config", cfg.to_str().unwrap(), "--omega", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK);
    let rep = CheckReport::from_json(&fs::read_to_string(out.join("timeop.json")).unwrap()).unwrap();
    assert_eq!(rep.config.get("omega").map(String::as_str), Some("2"));
    assert_eq!(rep.config.get("N").map(String::as_str), Some("24"));
}

#[test]
fn dump_t_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sub/t.txt");
    let o = timeops(&["dump-t", "--N", "16", "--g", "2", "--file", file.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK);
    let (h, m) = load_matrix(&file).unwrap();
    assert_eq!((h.dim, h.k, h.omega), (16, 1.25, 1.0));
    assert_eq!(m.get(0, 1).im, -0.13421123227863216);
    let o = timeops(&["dump-t", "--N", "16", "--quadrature", "--file", file.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK);
    let (_, q) = load_matrix(&file).unwrap();
    assert!((q.get(0, 1) - m.get(0, 1)).norm() <= 1e-12);

    let out = dir.path().join("sweep");
    let o = timeops(&["sweep", "--suite", "coherent", "--param", "g", "--values", "0.5,2,8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK);
    for v in ["0.5", "2", "8"] {
        assert!(out.join(format!("g={v}")).join("coherent.json").exists());
    }
    let o = timeops(&["sweep", "--suite", "coherent", "--param", "colour", "--values", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_CONFIG);
}

#[test]
fn failed_checks_exit_2() {
    // quadrature this coarse misses the 1e-8 agreement but still runs
    let dir = tempfile::tempdir().unwrap();
    let o = timeops(&[
        "run",
        "--suite",
        "timeop",
        "--N",
        "16",
        "--radial-nodes",
        "10",
        "--angular-nodes",
        "12",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), EXIT_CHECKS, "{}", String::from_utf8_lossy(&o.stdout));
    let summary: Summary = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.suites[0].status, "fail");
}

#[test]
fn truncated_matrix_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.txt");
    let o = timeops(&["dump-t", "--N", "16", "--file", file.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK);
    let text = fs::read_to_string(&file).unwrap();
    let cut: Vec<_> = text.lines().take(10).collect();
    fs::write(&file, cut.join("\n")).unwrap();
    assert!(matches!(load_matrix(&file), Err(Error::Parse { .. })));
    match load_matrix(&dir.path().join("absent.txt")) {
        Err(e) => assert!(e.to_string().contains("absent.txt")),
        Ok(_) => panic!("loaded a missing file"),
    }
}

#[test]
fn empty_table_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut rep = CheckReport::new("empty");
    rep.add_table(ConvergenceTable::new("nothing", "N"));
    let paths = emit_plotdata(&rep, dir.path()).unwrap();
    assert_eq!(fs::read_to_string(&paths[0]).unwrap(), "resolution,residual\n");
}
