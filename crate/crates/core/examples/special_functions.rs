//! Gamma, scaled modified Bessel functions and the mapped radial rule.
use timeops::specfun::{bessel_i, bessel_k, bessel_k_scaled, gamma_fn, gauss_legendre, ln_gamma};

fn main() -> timeops::Result<()> {
    println!("Gamma(0.5)^2 = {:.16} (pi = {:.16})", gamma_fn(0.5)?.powi(2), std::f64::consts::PI);
    println!("ln Gamma(200.5) = {:.12}", ln_gamma(200.5)?);
    for (nu, x) in [(0.5, 1.0), (1.5, 2.0), (2.5, 10.0)] {
        println!(
            "nu={nu} x={x}: I={:.15e} K={:.15e} e^x K={:.15e}",
            bessel_i(nu, x)?,
            bessel_k(nu, x)?,
            bessel_k_scaled(nu, x)?
        );
    }
    // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
    let x = 3.0;
    let exact = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
    println!("K_1/2(3) error {:.2e}", (bessel_k(0.5, x)? - exact).abs());
    let rule = gauss_legendre(20, 0.0, 1.0)?;
    let integral: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(9)).sum();
    println!("int_0^1 x^9 by 20-point Gauss-Legendre: {integral:.16}");
    Ok(())
}
