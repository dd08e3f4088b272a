use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bessel::bessel_k_scaled;
use crate::error::{invalid, Result};

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// n-point Gauss-Legendre rule on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Rule> {
    if n == 0 {
        return Err(invalid("gauss_legendre", "need at least one node"));
    }
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(invalid("gauss_legendre", format!("bad interval [{a}, {b}]")));
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = mid;
    }
    Ok(Rule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss-Legendre in u on [0,1] mapped by r = r_max u^2, which clusters
/// nodes at the origin where radial integrands behave like non-integer
/// powers of r.
pub fn gauss_legendre_radial(n: usize, r_max: f64) -> Result<Rule> {
    let base = gauss_legendre(n, 0.0, 1.0)?;
    let nodes = base.nodes.iter().map(|u| r_max * u * u).collect();
    let weights = base
        .nodes
        .iter()
        .zip(&base.weights)
        .map(|(u, w)| 2.0 * r_max * u * w)
        .collect();
    Ok(Rule { nodes, weights })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularRule {
    /// Equispaced nodes, equal weights; exact for trigonometric polynomials.
    Trapezoid,
    /// Gauss-Legendre on the branch interval; needed when the integrand
    /// has a jump at the branch cut.
    GaussLegendre,
}

/// Cubature over the disc with the BG measure radial cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub radial: Rule,
    pub r_max: f64,
    pub angular: Rule,
    pub angular_rule: AngularRule,
    pub theta_start: f64,
}

/// Number of e-folds below the peak at which the radial integrand is cut.
pub const DECAY_EFOLDS: f64 = 41.446_531_673_892_82; // ln(1e18)

/// Cutoff radius where ln K_nu(2r) + power * ln r has fallen DECAY_EFOLDS
/// below its maximum.
pub fn measure_r_max(nu: f64, power: f64) -> Result<f64> {
    if !(power > 0.0) {
        return Err(invalid("measure_r_max", "power must be positive"));
    }
    let f = |r: f64| -> Result<f64> { Ok(bessel_k_scaled(nu, 2.0 * r)?.ln() - 2.0 * r + power * r.ln()) };
    let step = 0.05;
    let mut r = step;
    let mut peak = f(r)?;
    let mut prev = peak;
    loop {
        r += step;
        let v = f(r)?;
        peak = peak.max(v);
        if v < prev && v < peak - DECAY_EFOLDS {
            break;
        }
        prev = v;
    }
    // bisect the crossing on the last step
    let target = peak - DECAY_EFOLDS;
    let (mut lo, mut hi) = (r - step, r);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

impl QuadratureSpec {
    /// Rule for the BG measure with Bargmann index k that integrates
    /// products of basis amplitudes up to level n_max exactly enough.
    pub fn for_measure(
        k: f64,
        n_max: usize,
        radial_nodes: usize,
        angular_nodes: usize,
        angular_rule: AngularRule,
        theta_start: f64,
    ) -> Result<Self> {
        let nu = 2.0 * k - 1.0;
        let power = 2.0 * k + 2.0 * n_max as f64;
        let r_max = measure_r_max(nu, power)?;
        Self::with_cutoff(r_max, radial_nodes, angular_nodes, angular_rule, theta_start)
    }

    /// Rule with an explicit radial cutoff.
    pub fn with_cutoff(
        r_max: f64,
        radial_nodes: usize,
        angular_nodes: usize,
        angular_rule: AngularRule,
        theta_start: f64,
    ) -> Result<Self> {
        if angular_nodes == 0 {
            return Err(invalid("angular_nodes", "need at least one node"));
        }
        let radial = gauss_legendre_radial(radial_nodes, r_max)?;
        let angular = match angular_rule {
            AngularRule::Trapezoid => {
                let h = 2.0 * PI / angular_nodes as f64;
                Rule {
                    nodes: (0..angular_nodes).map(|j| theta_start + h * j as f64).collect(),
                    weights: vec![h; angular_nodes],
                }
            }
            AngularRule::GaussLegendre => {
                gauss_legendre(angular_nodes, theta_start, theta_start + 2.0 * PI)?
            }
        };
        Ok(Self {
            radial,
            r_max,
            angular,
            angular_rule,
            theta_start,
        })
    }

    /// Same cutoff with twice the radial and angular node counts.
    pub fn doubled(&self) -> Result<Self> {
        Self::with_cutoff(
            self.r_max,
            2 * self.radial.len(),
            2 * self.angular.len(),
            self.angular_rule,
            self.theta_start,
        )
    }
}
