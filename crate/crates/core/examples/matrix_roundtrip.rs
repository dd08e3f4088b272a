//! Text dump of T and its bit-exact reload.
use timeops::bg_coherent::BranchConvention;
use timeops::report::{load_matrix, matrix_to_string, dump_matrix};
use timeops::su11_fock::ModelParams;
use timeops::time_operator::{assemble_t_closed_form, PrefactorMode, TimeOperatorConfig};

fn main() -> timeops::Result<()> {
    let p = ModelParams::new(1.0, 2.0)?;
    let t = assemble_t_closed_form(&TimeOperatorConfig::new(p, 4, BranchConvention::Principal, PrefactorMode::AsWritten)?)?;
    print!("{}", matrix_to_string(&t, &p));
    let path = std::env::temp_dir().join("timeops-t4.txt");
    dump_matrix(&t, &p, &path)?;
    let (header, back) = load_matrix(&path)?;
    let same = (0..4).all(|i| (0..4).all(|j| back.get(i, j) == t.get(i, j)));
    println!("{header:?}; bit-identical reload: {same}");
    Ok(())
}
