//! S = e^{-K-(k)} e^{K-(k0)} on the position grid: where it exists, the
//! intertwining residual against its spectral floor and the
//! non-Hermiticity of T_CS = S T_h S^-1.
use timeops::grid::{similarity_point, GridSpec, PacketSpec};
use timeops::su11_fock::ModelParams;

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    for m in [32, 48, 64, 96, 256] {
        let pt = similarity_point(&GridSpec::position_half_line(m, 10.0)?, &p, 2, PacketSpec::new(4.0, 0.5))?;
        match &pt.transformed {
            Some(t) => println!(
                "M={m:<4} intertwining {:.3e} (floor {:.4}), S^-1 S - I {:.1e}, non-Hermiticity {:.4}",
                t.intertwining[0], pt.lower_bounds[0], t.inverse_defect, t.non_hermiticity
            ),
            None => println!("M={m:<4} exp(-K-) overflows, growth rate {:?}", pt.growth_rate),
        }
    }
    Ok(())
}
