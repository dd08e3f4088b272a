use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument with a finite Gamma(x) in f64.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// Taylor coefficients of 1/Gamma(1+x) around x = 0.
pub(crate) const RECIP_GAMMA_1P: [f64; 29] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Gamma(x+1) form)
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

fn check_domain(x: f64, name: &'static str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter {
            field: name,
            reason: format!("argument must be positive and finite, got {x}"),
        });
    }
    Ok(())
}

/// Gamma(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    check_domain(x, "gamma_fn")?;
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow {
            function: "gamma_fn",
            argument: x,
        });
    }
    if x.fract() == 0.0 {
        let mut f = 1.0;
        let mut i = 2.0;
        while i < x {
            f *= i;
            i += 1.0;
        }
        return Ok(f);
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma_positive(1.0 - x)));
    }
    if x <= 11.0 {
        return Ok(gamma_positive(x));
    }
    // large powers amplify the rounding of t^(x-1/2); reduce to [10, 11)
    // and multiply back up instead
    let steps = (x - 10.0).floor();
    let mut y = x - steps;
    let mut g = gamma_positive(y);
    while y < x - 0.5 {
        g *= y;
        y += 1.0;
    }
    Ok(g)
}

fn gamma_positive(x: f64) -> f64 {
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    // split the power so that t^(y+1/2) does not overflow before e^-t
    let half = t.powf(0.5 * (y + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(y)
}

/// ln Gamma(x) for x > 0; accurate up to x ~ 1e6 and beyond.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_domain(x, "ln_gamma")?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x < 20.0 {
        return gamma_positive(x).ln();
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (y + 0.5) * t.ln() - t + lanczos_sum(y).ln()
}

/// 1/Gamma(1+x) for |x| <= 1/2 by its Taylor series.
pub(crate) fn recip_gamma_1p(x: f64) -> f64 {
    RECIP_GAMMA_1P.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
/// without cancellation, for |mu| <= 1/2.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64) {
    let m2 = mu * mu;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (j, c) in RECIP_GAMMA_1P.iter().enumerate().rev() {
        if j % 2 == 1 {
            odd = odd * m2 + c;
        } else {
            even = even * m2 + c;
        }
    }
    (-odd, even)
}
