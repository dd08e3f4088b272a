//! Barut-Girardello states: automatic truncation, eigen-residual, the two
//! constructions and the closed-form overlap.
use timeops::bg_coherent::{bg_state, bg_state_auto, bg_state_exponential, inner_product, overlap, BranchConvention};
use timeops::su11_fock::ModelParams;
use timeops::c64;

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    let b = BranchConvention::Principal;
    for z in [c64::new(0.5, 0.0), c64::new(-2.0, 0.5), c64::new(0.0, 3.0)] {
        let v = bg_state_auto(z, &p, b)?;
        let e = bg_state_exponential(z, &p, v.dim(), b)?;
        let diff = v.coeffs.iter().zip(&e.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!(
            "z={z}: N={} tail<={:.1e} |K-v - zv|={:.2e} series vs exponential {:.2e}",
            v.dim(),
            v.tail,
            v.eigen_residual(),
            diff
        );
    }
    let (z1, z2) = (c64::new(1.0, 1.0), c64::new(-1.5, 0.5));
    let a = bg_state(z1, &p, 64, b)?;
    let c = bg_state(z2, &p, 64, b)?;
    println!("<z1|z2> direct {} closed form {}", inner_product(&a, &c), overlap(z1, z2, &p, b)?);
    Ok(())
}
