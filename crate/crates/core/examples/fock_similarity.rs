//! e^{-omega K} H e^{omega K} = -2 omega K- on the leading block, in
//! double-double and in f64, over the truncation N.
use timeops::su11_fock::{similarity_19_residual, ModelParams, Precision, SIMILARITY_19_NS};

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    println!("{:>5} {:>24} {:>12}", "N", "double-double", "f64");
    for n in SIMILARITY_19_NS {
        let dd = similarity_19_residual(&p, n, 8, Precision::DoubleDouble)?;
        let f = similarity_19_residual(&p, n, 8, Precision::Double)?;
        println!("{n:>5} {dd:>24.16e} {f:>12.3e}");
    }
    Ok(())
}
