//! Disc cubature of |z><z| against the BG measure; the leading block
//! should be the identity.
use timeops::bg_coherent::{default_quadrature, resolution_of_identity, BranchConvention};
use timeops::specfun::AngularRule;
use timeops::su11_fock::ModelParams;

fn main() -> timeops::Result<()> {
    for g in [0.36, 2.0, 20.0] {
        let p = ModelParams::new(1.0, g)?;
        let quad = default_quadrature(p.k, 11, 200, 256, AngularRule::Trapezoid, BranchConvention::Principal)?;
        let (block, rep) = resolution_of_identity(&p, 12, &quad, 1e-8, 1e-9)?;
        println!("g={g} k={:.4} r_max={:.2} block(0,0)={:.15}", p.k, quad.r_max, block[(0, 0)].re);
        for row in &rep.rows {
            println!("  {:<28} {:.3e} {:?}", row.label, row.value, row.outcome);
        }
    }
    Ok(())
}
