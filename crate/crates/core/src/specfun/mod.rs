//! Gamma, modified Bessel functions and Gauss-Legendre rules.

mod bessel;
mod gamma;
mod quadrature;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_ik_scaled, bessel_k, bessel_k_scaled, ln_bessel_i, ScaledIK,
};
pub use gamma::{gamma_fn, ln_gamma, GAMMA_MAX_ARG};
pub use quadrature::{
    gauss_legendre, gauss_legendre_radial, measure_r_max, AngularRule, QuadratureSpec, Rule,
    DECAY_EFOLDS,
};
