//! Momentum- and position-grid realizations of the model.
//!
//! Both grids are staggered by half a step so that no node sits at the
//! origin, where 1/p, 1/x^2 and 1/H0 are singular.

pub mod momentum;
pub mod position;
pub mod similarity;
pub mod spectral;

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::operator::Basis;

pub use momentum::{
    arrival_refinement, build_momentum_ops, build_th, build_th_full_line, identity_22_refinement, matrix_arctan,
    odd_sector_eigenvalues, omega_sweep, verify_identity_22, ArctanResult, ArctanRoute, ArrivalOps, MomentumOps,
    OmegaSweep, t0_commutator, identity_22_residuals, ARCTAN_COND_LIMIT, TAYLOR_RADIUS,
};
pub use position::{
    build_position_ops, closure_residuals, hermitian_eigenvalues, interior_hermiticity, position_spectrum_check, PositionOps,
};
pub use similarity::{position_th, similarity_point, verify_similarity_21_26, SimilarityConfig, SimilarityPoint, Transformed};

/// Amplitude relative to the peak that a test packet may have at the edges.
pub const EDGE_DECAY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    /// p_j = -L + (j + 1/2) dp, dp = 2L/M
    MomentumLine,
    /// x_j = (j + 1/2) L/M
    PositionHalfLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub count: usize,
    pub extent: f64,
}

impl GridSpec {
    pub fn momentum_line(count: usize, half_width: f64) -> Result<Self> {
        if count < 4 || !count.is_multiple_of(2) {
            return Err(invalid("M", format!("momentum grid needs an even count >= 4, got {count}")));
        }
        Self::checked(GridKind::MomentumLine, count, half_width)
    }

    pub fn position_half_line(count: usize, length: f64) -> Result<Self> {
        if count < 4 {
            return Err(invalid("M", format!("position grid needs >= 4 points, got {count}")));
        }
        Self::checked(GridKind::PositionHalfLine, count, length)
    }

    fn checked(kind: GridKind, count: usize, extent: f64) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(invalid("L", format!("extent must be positive, got {extent}")));
        }
        Ok(Self { kind, count, extent })
    }

    pub fn spacing(&self) -> f64 {
        match self.kind {
            GridKind::MomentumLine => 2.0 * self.extent / self.count as f64,
            GridKind::PositionHalfLine => self.extent / self.count as f64,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        let start = match self.kind {
            GridKind::MomentumLine => -self.extent,
            GridKind::PositionHalfLine => 0.0,
        };
        (0..self.count).map(|j| start + (j as f64 + 0.5) * h).collect()
    }

    pub fn basis(&self) -> Basis {
        match self.kind {
            GridKind::MomentumLine => Basis::MomentumLine {
                points: self.count,
                half_width: self.extent,
            },
            GridKind::PositionHalfLine => Basis::PositionHalfLine {
                points: self.count,
                length: self.extent,
            },
        }
    }
}

/// Gaussian exp(-(s - center)^2 / (2 width^2) + i slope s) on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub center: f64,
    pub width: f64,
    pub slope: f64,
}

impl PacketSpec {
    pub fn new(center: f64, width: f64) -> Self {
        Self {
            center,
            width,
            slope: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wavepacket {
    pub grid: GridSpec,
    pub values: Vec<c64>,
    pub spec: PacketSpec,
}

impl Wavepacket {
    /// Normalized so that sum |psi_j|^2 h = 1. Fails if the packet has not
    /// decayed to EDGE_DECAY at either end of the grid.
    pub fn gaussian(grid: &GridSpec, spec: PacketSpec) -> Result<Self> {
        if !(spec.width > 0.0) {
            return Err(invalid("width", "packet width must be positive"));
        }
        let pts = grid.points();
        let mut values: Vec<c64> = pts
            .iter()
            .map(|&s| {
                let u = (s - spec.center) / spec.width;
                c64::from_polar((-0.5 * u * u).exp(), spec.slope * s)
            })
            .collect();
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(invalid("center", "packet vanishes on the grid"));
        }
        let edge = values[0].norm().max(values[values.len() - 1].norm()) / peak;
        if edge > EDGE_DECAY {
            return Err(Error::BoundaryDecay { edge, limit: EDGE_DECAY });
        }
        let norm = (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.spacing()).sqrt();
        for v in &mut values {
            *v /= norm;
        }
        Ok(Self {
            grid: *grid,
            values,
            spec,
        })
    }

    /// |psi| at the node closest to the origin relative to the peak;
    /// large values mean the packet sees the 1/p singularity.
    pub fn origin_weight(&self) -> f64 {
        let pts = self.grid.points();
        let (j, _) = pts
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bj, bv), (j, p)| if p.abs() < bv { (j, p.abs()) } else { (bj, bv) });
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        self.values[j].norm() / peak
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()).sqrt()
    }
}
