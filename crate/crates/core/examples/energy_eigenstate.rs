//! Continuum energy eigenstates e^{omega K}|z = -E/(2 omega)> and their
//! truncation behaviour.
use timeops::su11_fock::{energy_eigenstate_20, ModelParams};

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    for e in [0.5, 1.0] {
        let (v, rep) = energy_eigenstate_20(&p, 64, e, &[32, 64, 96, 128])?;
        println!("E={e}: |v|_0..3 = {:?}", v.iter().take(4).map(|c| c.norm()).collect::<Vec<_>>());
        for t in &rep.convergence {
            for r in &t.rows {
                println!("  N={:<4} interior residual {:.3e}", r.resolution, r.residual);
            }
        }
        for row in rep.rows.iter().filter(|r| r.label.contains("limit") || r.label.contains("label")) {
            println!("  {}: {:.6e}", row.label, row.value);
        }
    }
    Ok(())
}
