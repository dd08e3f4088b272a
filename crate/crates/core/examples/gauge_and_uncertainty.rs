//! T + phi(H_CS) leaves [H_CS, T] unchanged; Delta H Delta T on coherent
//! states.
use timeops::bg_coherent::BranchConvention;
use timeops::su11_fock::ModelParams;
use timeops::time_operator::{
    assemble_t_closed_form, gauge_commutator_change, uncertainty_report, PrefactorMode, TimeOperatorConfig,
};
use timeops::c64;

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    let b = BranchConvention::Principal;
    let t = assemble_t_closed_form(&TimeOperatorConfig::new(p, 64, b, PrefactorMode::AsWritten)?)?;
    for phi in [vec![1.0], vec![0.0, 2.0, -1.0], vec![0.3, -0.1, 0.05, 0.0, 0.0, 0.0, 1e-3]] {
        println!("phi coefficients {phi:?}: commutator change {:e}", gauge_commutator_change(&t, &phi, &p)?);
    }
    for z in [c64::new(0.5, 0.0), c64::new(1.0, 1.0), c64::new(0.0, 2.0)] {
        let u = uncertainty_report(z, &t, &p, b)?;
        println!("z={z}: dH={:.6} (series {:.6}) dT={:.6} product={:.6}", u.dh, u.dh_series, u.dt, u.product);
    }
    Ok(())
}
