use proptest::prelude::*;

use timeops::bg_coherent::{bg_state, bg_state_auto, inner_product, overlap, BranchConvention};
use timeops::c64;
use timeops::config::{RunConfig, Suite};
use timeops::operator::{Basis, OperatorMatrix};
use timeops::report::{matrix_from_str, matrix_to_string, CheckReport, ConvergenceTable};
use timeops::su11_fock::{build_generators, casimir, interior_size, ModelParams};
use timeops::time_operator::{
    assemble_t_closed_form, commutator_structure, gauge_commutator_change, PrefactorMode, TimeOperatorConfig,
};

fn branch() -> impl Strategy<Value = BranchConvention> {
    prop_oneof![Just(BranchConvention::Principal), Just(BranchConvention::Positive)]
}

fn label(max: f64) -> impl Strategy<Value = c64> {
    (0.0..max, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| c64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kminus_is_the_adjoint_of_kplus(g in 0.0..20.0f64, n in 4usize..48) {
        let gens = build_generators(&ModelParams::new(1.0, g).unwrap(), n).unwrap();
        let adj = gens.kplus.adjoint();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(gens.kminus.get(i, j), adj.get(i, j));
            }
        }
    }

    #[test]
    fn casimir_is_k_k_minus_one_on_the_interior(g in 0.0..20.0f64, omega in 0.1..5.0f64) {
        let p = ModelParams::new(omega, g).unwrap();
        let c = casimir(&p, 48).unwrap();
        let want = (4.0 * g - 3.0) / 16.0;
        for i in 0..interior_size(48) {
            prop_assert!((c.get(i, i).re - want).abs() <= 1e-12 * want.abs().max(1.0) * 48.0);
        }
    }

    #[test]
    fn coherent_state_is_a_unit_eigenvector(z in label(3.0), g in 0.0..10.0f64, b in branch()) {
        let p = ModelParams::new(1.0, g).unwrap();
        let v = bg_state_auto(z, &p, b).unwrap();
        prop_assert!(v.eigen_residual() <= 1e-10);
        prop_assert!((v.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn overlap_is_hermitian_and_matches_vectors(z1 in label(3.0), z2 in label(3.0), b in branch()) {
        let p = ModelParams::new(1.0, 2.0).unwrap();
        let a = overlap(z1, z2, &p, b).unwrap();
        let c = overlap(z2, z1, &p, b).unwrap();
        prop_assert!((a - c.conj()).norm() <= 1e-13);
        let direct = inner_product(&bg_state(z1, &p, 64, b).unwrap(), &bg_state(z2, &p, 64, b).unwrap());
        prop_assert!((a - direct).norm() <= 1e-10 * direct.norm().max(1e-3));
    }

    #[test]
    fn branch_phase_cancels_in_the_projector(z in label(3.0), g in 0.0..10.0f64) {
        let p = ModelParams::new(1.0, g).unwrap();
        let a = bg_state(z, &p, 48, BranchConvention::Principal).unwrap();
        let b = bg_state(z, &p, 48, BranchConvention::Positive).unwrap();
        for i in 0..48 {
            for j in 0..48 {
                let pa = a.coeffs[i] * a.coeffs[j].conj();
                let pb = b.coeffs[i] * b.coeffs[j].conj();
                prop_assert!((pa - pb).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn t_is_hermitian_with_exact_commutator_diagonal(g in 0.0..20.0f64, omega in 0.2..3.0f64, b in branch()) {
        let p = ModelParams::new(omega, g).unwrap();
        let t = assemble_t_closed_form(&TimeOperatorConfig::new(p, 24, b, PrefactorMode::AsWritten).unwrap()).unwrap();
        prop_assert!(t.hermiticity_defect() <= 1e-12);
        if b == BranchConvention::Principal {
            for i in 0..24 {
                prop_assert_eq!(t.get(i, i), c64::new(0.0, 0.0));
            }
        }
        let rep = commutator_structure(&t, &p).unwrap();
        prop_assert!(rep.passed());
    }

    #[test]
    fn gauge_freedom_is_exact(coeffs in prop::collection::vec(-2.0..2.0f64, 0..7), g in 0.0..10.0f64) {
        let p = ModelParams::new(1.0, g).unwrap();
        let t = assemble_t_closed_form(
            &TimeOperatorConfig::new(p, 16, BranchConvention::Principal, PrefactorMode::AsWritten).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(gauge_commutator_change(&t, &coeffs, &p).unwrap(), 0.0);
    }

    #[test]
    fn matrix_text_round_trips_bitwise(entries in prop::collection::vec((any::<f64>(), any::<f64>()), 9), g in 0.0..10.0f64) {
        prop_assume!(entries.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
        let p = ModelParams::new(1.0, g).unwrap();
        let m = OperatorMatrix::from_fn(Basis::Fock, 3, |i, j| {
            let (a, b) = entries[3 * i + j];
            c64::new(a, b)
        });
        let (h, back) = matrix_from_str(&matrix_to_string(&m, &p)).unwrap();
        prop_assert_eq!(h.dim, 3);
        prop_assert_eq!(h.k.to_bits(), p.k.to_bits());
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(back.get(i, j).re.to_bits(), m.get(i, j).re.to_bits());
                prop_assert_eq!(back.get(i, j).im.to_bits(), m.get(i, j).im.to_bits());
            }
        }
    }

    #[test]
    fn report_json_round_trips(values in prop::collection::vec(prop_oneof![any::<f64>(), Just(f64::NAN), Just(f64::INFINITY)], 1..8)) {
        let mut rep = CheckReport::new("prop");
        let mut t = ConvergenceTable::new("t", "N");
        for (i, v) in values.iter().enumerate() {
            rep.at_most(format!("row {i}"), *v, 1e-3);
            rep.info(format!("info {i}"), *v);
            t.push(i as f64, *v);
        }
        rep.add_table(t);
        rep.trend("trend", "t", 1.0);
        let text = rep.to_json().unwrap();
        let back = CheckReport::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn toleranced_rows_pass_iff_within_bound(value in -1.0..1.0f64, bound in 0.0..1.0f64) {
        let mut rep = CheckReport::new("x");
        prop_assert_eq!(rep.at_most("a", value.abs(), bound), value.abs() <= bound);
        prop_assert_eq!(rep.at_least("b", value.abs(), bound), value.abs() >= bound);
    }

    #[test]
    fn trend_rows_pass_iff_strictly_decreasing(residuals in prop::collection::vec(1e-12..1.0f64, 2..6)) {
        let mut t = ConvergenceTable::new("t", "M");
        for (i, r) in residuals.iter().enumerate() {
            t.push(i as f64, *r);
        }
        let strict = residuals.windows(2).all(|w| w[1] < w[0]);
        prop_assert_eq!(t.strictly_decreasing(1.0), strict);
    }

    #[test]
    fn flags_override_file_values(omega in 0.1..10.0f64, file_omega in 0.1..10.0f64) {
        let mut cfg = RunConfig::default();
        cfg.apply_file(&format!("omega = {file_omega}\nsuite = arrival\n")).unwrap();
        cfg.set("omega", &omega.to_string()).unwrap();
        prop_assert_eq!(cfg.omega, omega);
        prop_assert_eq!(&cfg.suites, &vec![Suite::Arrival]);
    }
}
