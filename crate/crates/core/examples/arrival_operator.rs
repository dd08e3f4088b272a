//! T_h = arctan(omega Q)/omega on the momentum line: its commutator with
//! H_h under refinement and the small-omega limit.
use timeops::grid::{arrival_refinement, build_th, omega_sweep, GridSpec, PacketSpec};

fn main() -> timeops::Result<()> {
    let grid = GridSpec::momentum_line(1024, 16.0)?;
    let ar = build_th(&grid, 1.0)?;
    println!(
        "T_h: route {:?}, eigenvector condition {:.2}, Hermiticity {:.1e}",
        ar.route,
        ar.condition,
        ar.th.hermiticity_defect()
    );
    for spec in [PacketSpec::new(4.0, 0.5), PacketSpec::new(4.0, 0.03), PacketSpec::new(2.0, 0.5)] {
        let (t, _) = arrival_refinement(&[512, 1024, 2048], 16.0, 1.0, spec)?;
        println!("packet {spec:?}: |<[H_h,T_h]> - i| = {:?}", t.rows.iter().map(|r| r.residual).collect::<Vec<_>>());
    }
    let sweep = omega_sweep(&grid, &[0.2, 0.1, 0.05], PacketSpec::new(4.0, 0.5))?;
    println!("omega -> 0: residuals {:?}, fitted exponent {:.3}", sweep.packet_residuals, sweep.exponent);
    Ok(())
}
