//! Momentum-line grid: [T0, H0] = i and the two factorisations of K.
use timeops::grid::{identity_22_refinement, t0_commutator, verify_identity_22, GridSpec, PacketSpec, Wavepacket};

fn main() -> timeops::Result<()> {
    let grid = GridSpec::momentum_line(1024, 16.0)?;
    let packets = [PacketSpec::new(4.0, 0.5), PacketSpec::new(0.5, 0.5)]
        .into_iter()
        .map(|s| Wavepacket::gaussian(&grid, s))
        .collect::<timeops::Result<Vec<_>>>()?;
    println!("<[T0,H0]> = {}", t0_commutator(&grid, PacketSpec::new(4.0, 0.5))?);
    let rep = verify_identity_22(&grid, 1.0, &packets)?;
    for row in &rep.rows {
        println!("{:<60} {:.3e} {:?}", row.label, row.value, row.outcome);
    }
    let (t0, q) = identity_22_refinement(&[512, 1024], 16.0, 1.0, PacketSpec::new(3.0, 0.08))?;
    for t in [t0, q] {
        println!("{}: {:?}", t.name, t.rows.iter().map(|r| (r.resolution, r.residual)).collect::<Vec<_>>());
    }
    Ok(())
}
