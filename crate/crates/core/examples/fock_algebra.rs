//! Truncated su(1,1) generators: commutators, Casimir and the two
//! operator identities, on the interior block.
use timeops::su11_fock::{build_generators, casimir, verify_algebra, verify_identity_17, verify_identity_18, ModelParams};

fn main() -> timeops::Result<()> {
    for g in [0.0, 0.5, 2.0, 8.0] {
        let p = ModelParams::new(1.0, g)?;
        let c = casimir(&p, 64)?;
        println!("g={g:<4} k={:.6} Casimir(0,0)={:+.15} (4g-3)/16={:+.15}", p.k, c.get(0, 0).re, (4.0 * g - 3.0) / 16.0);
    }
    let p = ModelParams::new(1.0, 2.0)?;
    let gens = build_generators(&p, 8)?;
    println!("K3 diagonal: {:?}", (0..4).map(|i| gens.k3.get(i, i).re).collect::<Vec<_>>());
    for rep in [verify_algebra(&p, 64, 1e-12)?, verify_identity_17(&p, 64, 3, 1e-12)?, verify_identity_18(&p, 64, 1e-12)?] {
        for row in &rep.rows {
            println!("{:<48} {:.3e} {:?}", row.label, row.value, row.outcome);
        }
    }
    Ok(())
}
