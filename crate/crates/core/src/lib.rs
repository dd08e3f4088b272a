pub mod bg_coherent;
pub mod config;
pub mod ddmat;
pub mod error;
pub mod grid;
pub mod operator;
pub mod report;
pub mod specfun;
pub mod su11_fock;
pub mod suites;
pub mod time_operator;

pub use error::{Error, Result};
pub use num_complex::Complex64 as c64;
