//! Position half-line grid with the DST-IV derivative: H_CS levels
//! 2 omega (n + k) and the odd oscillator levels.
use timeops::grid::{build_position_ops, hermitian_eigenvalues, position_spectrum_check, GridSpec};
use timeops::su11_fock::ModelParams;

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    for m in [256, 512, 1024] {
        let grid = GridSpec::position_half_line(m, 10.0)?;
        let ev = hermitian_eigenvalues(&build_position_ops(&grid, &p)?.h_cs)?;
        println!("M={m}: lowest H_CS levels {:.9?}", &ev[..3]);
    }
    let rep = position_spectrum_check(&GridSpec::position_half_line(1024, 10.0)?, &p, 1e-4)?;
    for row in &rep.rows {
        println!("{:<40} {:.3e} {:?}", row.label, row.value, row.outcome);
    }
    Ok(())
}
