//! Modified Bessel functions I_nu and K_nu of real order nu >= 0 and real
//! argument x >= 0, by Temme's series (x < 2) or Steed's continued fraction
//! (x >= 2) for K at the reduced order, CF1 for the ratio I'/I, and the
//! Wronskian to fix the normalisation of I.

use std::f64::consts::PI;

use super::gamma::temme_gammas;
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 200_000;
const RESCALE: f64 = 1e250;

/// e^{-x} I_nu(x) and e^{x} K_nu(x).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledIK {
    pub i: f64,
    pub k: f64,
}

fn check(nu: f64, x: f64, name: &'static str) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidParameter {
            field: name,
            reason: format!("order must be finite and >= 0, got {nu}"),
        });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter {
            field: name,
            reason: format!("argument must be finite and >= 0, got {x}"),
        });
    }
    Ok(())
}

/// Both scaled functions at once; x must be > 0.
pub fn bessel_ik_scaled(nu: f64, x: f64) -> Result<ScaledIK> {
    check(nu, x, "bessel_ik_scaled")?;
    if x == 0.0 {
        return Err(Error::Overflow {
            function: "bessel_k",
            argument: x,
        });
    }
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // CF1: I'_nu / I_nu by modified Lentz
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            function: "bessel CF1",
            iterations: MAXIT,
            argument: x,
        });
    }

    // downward recurrence to the reduced order, unnormalised
    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let mut ril1 = ril;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
        if ril.abs() > RESCALE {
            ril /= RESCALE;
            ripl /= RESCALE;
            ril1 /= RESCALE;
        }
    }
    let f = ripl / ril;

    // scaled K_mu and K_{mu+1}
    let (rkmu, rk1) = if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fct = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let dd = -x2.ln();
        let e = xmu * dd;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2) = temme_gammas(xmu);
        let gampl = super::gamma::recip_gamma_1p(xmu);
        let gammi = super::gamma::recip_gamma_1p(-xmu);
        let mut ff = fct * (gam1 * e.cosh() + gam2 * fact2 * dd);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut cc = 1.0;
        let dsq = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            cc *= dsq / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = cc * ff;
            sum += del;
            sum1 += cc * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                function: "bessel K series",
                iterations: MAXIT,
                argument: x,
            });
        }
        let scale = x.exp();
        (sum * scale, sum1 * xi2 * scale)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                function: "bessel CF2",
                iterations: MAXIT,
                argument: x,
            });
        }
        let h = a1 * h;
        let rkmu = (PI / (2.0 * x)).sqrt() / s;
        (rkmu, rkmu * (xmu + x + 0.5 - h) * xi)
    };

    let rkmup = xmu * xi * rkmu - rk1;
    let rimu = xi / (f * rkmu - rkmup);
    let i_scaled = rimu * ril1 / ril;

    let mut km = rkmu;
    let mut k1 = rk1;
    for i in 1..=nl {
        let t = (xmu + i as f64) * xi2 * k1 + km;
        km = k1;
        k1 = t;
    }
    if !km.is_finite() {
        return Err(Error::Overflow {
            function: "bessel_k",
            argument: x,
        });
    }
    Ok(ScaledIK { i: i_scaled, k: km })
}

/// e^{-x} I_nu(x).
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    check(nu, x, "bessel_i_scaled")?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    // the K half may overflow for tiny x and large order; I is still fine
    match bessel_ik_scaled(nu, x) {
        Ok(s) => Ok(s.i),
        Err(Error::Overflow { .. }) => Ok(i_series(nu, x) * (-x).exp()),
        Err(e) => Err(e),
    }
}

/// e^{x} K_nu(x).
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_ik_scaled(nu, x)?.k)
}

pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    let s = bessel_i_scaled(nu, x)?;
    let v = s * x.exp();
    if !v.is_finite() {
        return Err(Error::Overflow {
            function: "bessel_i",
            argument: x,
        });
    }
    Ok(v)
}

pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let s = bessel_k_scaled(nu, x)?;
    let v = s * (-x).exp();
    if !v.is_finite() {
        return Err(Error::Overflow {
            function: "bessel_k",
            argument: x,
        });
    }
    Ok(v)
}

/// ln I_nu(x), finite wherever I_nu(x) > 0 even if I_nu itself overflows.
pub fn ln_bessel_i(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(nu, x)?.ln() + x)
}

// Ascending series, used only where the K half of the pair overflows
// (x much smaller than the order), where it converges in a few terms.
fn i_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let lead = nu * h.ln() - super::gamma::ln_gamma_unchecked(nu + 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let q = h * h;
    for m in 1..500 {
        let fm = m as f64;
        term *= q / (fm * (fm + nu));
        sum += term;
        if term < EPS * sum {
            break;
        }
    }
    lead.exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // mpmath, 40 digits: (nu, x, I, K)
    const REF: [(f64, f64, f64, f64); 13] = [
        (0.0, 0.1, 1.002_501_562_934_095_6, 2.427_069_024_702_016_6),
        (0.0, 1.0, 1.266_065_877_752_008_4, 0.421_024_438_240_708_33),
        (0.5, 3.0, 4.614_822_903_407_601, 0.036_025_985_131_764_593),
        (1.5, 2.0, 1.099_473_188_633_109_7, 0.179_906_657_952_092_17),
        (2.5, 0.01, 5.319_268_399_960_872e-7, 375_987.974_779_797_8),
        (7.3, 5.5, 0.414_783_781_021_740_8, 0.131_731_924_197_085_84),
        (12.7, 40.0, 1_967_369_133_505_349.8, 6.055_972_360_722_788e-18),
        (50.0, 1.0, 2.934_635_308_511_838e-80, 3.406_896_854_161_702e77),
        (50.0, 80.0, 5.892_774_945_816_361e26, 8.994_010_100_318_946e-30),
        (0.3, 700.0, 1.529_494_949_492_178_6e302, 4.670_076_427_132_578e-306),
        (3.7, 1.9, 0.064_745_858_565_325_65, 1.848_670_375_529_746_4),
        (3.7, 2.1, 0.097_693_424_589_433_48, 1.197_582_099_965_931_9),
        (1.0, 1e-3, 5.000_000_625_000_026e-4, 999.996_238_156_085_5),
    ];

    #[test]
    fn matches_high_precision_values() {
        for (nu, x, i, k) in REF {
            let gi = bessel_i(nu, x).unwrap();
            let gk = bessel_k(nu, x).unwrap();
            assert!(rel(gi, i) < 1e-12, "I({nu},{x}) = {gi} vs {i}");
            assert!(rel(gk, k) < 1e-12, "K({nu},{x}) = {gk} vs {k}");
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.05, 0.7, 1.99, 2.0, 3.3, 12.0, 60.0] {
            let i_half = (2.0 / (PI * x)).sqrt() * x.sinh();
            let k_half = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let k_3half = k_half * (1.0 + 1.0 / x);
            let i_3half = (2.0 / (PI * x)).sqrt() * (x.cosh() - x.sinh() / x);
            assert!(rel(bessel_i(0.5, x).unwrap(), i_half) < 1e-13);
            assert!(rel(bessel_k(0.5, x).unwrap(), k_half) < 1e-13);
            assert!(rel(bessel_k(1.5, x).unwrap(), k_3half) < 1e-13);
            // cancellation in the closed form itself below x ~ 0.1
            if x > 0.5 {
                assert!(rel(bessel_i(1.5, x).unwrap(), i_3half) < 1e-12);
            }
        }
    }

    #[test]
    fn wronskian() {
        // I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x
        for &nu in &[0.0, 0.25, 1.5, 4.6, 20.0] {
            for &x in &[0.01, 0.5, 1.9, 2.1, 9.0, 80.0] {
                let a = bessel_ik_scaled(nu, x).unwrap();
                let b = bessel_ik_scaled(nu + 1.0, x).unwrap();
                let w = a.i * b.k + b.i * a.k;
                assert!(rel(w, 1.0 / x) < 1e-13, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn special_points() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(2.5, 0.0).unwrap(), 0.0);
        assert!(matches!(bessel_k(1.0, 0.0), Err(Error::Overflow { .. })));
        assert!(matches!(bessel_i(0.0, 800.0), Err(Error::Overflow { .. })));
        assert!(bessel_i_scaled(0.0, 800.0).unwrap().is_finite());
        assert!(bessel_k(-1.0, 1.0).is_err());
        // I of large order at tiny argument, where K overflows
        let v = bessel_i(50.0, 1e-3).unwrap();
        assert!(rel(v, i_series(50.0, 1e-3)) < 1e-12);
    }
}
