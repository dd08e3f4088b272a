//! The time operator in the Fock basis: closed form against cubature,
//! both branch conventions, and its commutator with H_CS.
use timeops::bg_coherent::BranchConvention;
use timeops::su11_fock::ModelParams;
use timeops::time_operator::{
    assemble_t_closed_form, assemble_t_quadrature_checked, commutator_structure, relative_block_deviation,
    PrefactorMode, TimeOperatorConfig,
};

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    for branch in [BranchConvention::Principal, BranchConvention::Positive] {
        let cfg = TimeOperatorConfig::new(p, 16, branch, PrefactorMode::AsWritten)?;
        let closed = assemble_t_closed_form(&cfg)?;
        let (quad, drift) = assemble_t_quadrature_checked(&cfg, 1e-9)?;
        println!(
            "{branch:?}: T(0,1)={:.17} T(0,0)={:.6} cubature vs closed {:.2e}, drift {:.2e}, Hermiticity {:.1e}",
            closed.get(0, 1),
            closed.get(0, 0),
            relative_block_deviation(&quad, &closed, 12)?,
            drift,
            closed.hermiticity_defect()
        );
        let rep = commutator_structure(&closed, &p)?;
        for row in &rep.rows {
            println!("  {:<52} {:.3e}", row.label, row.value);
        }
    }
    Ok(())
}
