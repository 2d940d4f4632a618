//! Parameter space and the three coordinate models of E(κ+4H², H).
//!
//! Every model has the form
//!
//! ```text
//! ds² = b(x,y)(dx² + dy²) + (dz + a_x dx + a_y dy)²
//! ```
//!
//! with `ξ = ∂z` the unit vertical Killing field. Horizontal curves satisfy
//! `dz = -(a_x dx + a_y dy)`.
//!
//! * half-plane (`κ_e < 0`): `b = 1/(m y²)`, `a = (2H/(m y), 0)`, `m = -κ_e`
//! * Heisenberg (`κ_e = 0`, `τ ≠ 0`): `b = 1`, `a = τ (y, -x)`
//! * Euclidean (`κ_e = 0`, `τ = 0`): `b = 1`, `a = 0`
//!
//! In the Heisenberg chart a counterclockwise loop lifts upward by `2τ·area`.
//! In the half-plane chart the same happens for clockwise loops, so each model
//! carries a chart orientation sign used wherever "positive direction" matters.

use crate::base::BaseSurface;
use crate::error::{Error, Result};
use nalgebra::{Matrix2, Vector2, Vector3};

pub type ModelPoint = Vector3<f64>;

const ZERO_CURVATURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    pub kappa: f64,
    pub h_mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    HalfPlane { m: f64, h: f64 },
    Heisenberg { tau: f64 },
    Euclidean,
}

impl SpaceParams {
    pub fn new(kappa: f64, h_mean: f64) -> Result<Self> {
        if !kappa.is_finite() || !h_mean.is_finite() {
            return Err(Error::Invalid("non-finite parameters".into()));
        }
        if kappa > 0.0 {
            return Err(Error::Unsupported(format!("kappa = {kappa} > 0")));
        }
        if !(0.0..=0.5).contains(&h_mean) {
            return Err(Error::Unsupported(format!("H = {h_mean} outside [0, 1/2]")));
        }
        let s = SpaceParams { kappa, h_mean };
        if s.kappa_e() > ZERO_CURVATURE_TOL {
            return Err(Error::Unsupported(format!(
                "kappa + 4H^2 = {} > 0",
                s.kappa_e()
            )));
        }
        Ok(s)
    }

    pub fn kappa_e(&self) -> f64 {
        self.kappa + 4.0 * self.h_mean * self.h_mean
    }

    pub fn tau(&self) -> f64 {
        self.h_mean
    }

    pub fn model(&self) -> Model {
        let ke = self.kappa_e();
        if ke < -ZERO_CURVATURE_TOL {
            Model::HalfPlane {
                m: -ke,
                h: self.h_mean,
            }
        } else if self.h_mean != 0.0 {
            Model::Heisenberg { tau: self.h_mean }
        } else {
            Model::Euclidean
        }
    }

    pub fn base(&self) -> BaseSurface {
        self.model().base()
    }
}

/// Local data of the metric: conformal factor `b`, connection `a` and their
/// first derivatives with respect to `(x, y)`.
#[derive(Debug, Clone, Copy)]
pub struct FrameData {
    pub b: f64,
    pub db: Vector2<f64>,
    pub a: Vector2<f64>,
    /// `da[(i, j)] = ∂_j a_i`
    pub da: Matrix2<f64>,
}

impl Model {
    pub fn tau(&self) -> f64 {
        match *self {
            Model::HalfPlane { h, .. } => h,
            Model::Heisenberg { tau } => tau,
            Model::Euclidean => 0.0,
        }
    }

    /// +1 when counterclockwise coordinate loops lift upward, -1 otherwise.
    pub fn orientation(&self) -> f64 {
        match self {
            Model::HalfPlane { .. } => -1.0,
            _ => 1.0,
        }
    }

    pub fn base(&self) -> BaseSurface {
        match *self {
            Model::HalfPlane { m, .. } => BaseSurface::hyperbolic(m, -1.0),
            _ => BaseSurface::flat(1.0),
        }
    }

    /// Coefficient of `dθ` in the lift along a half-plane geodesic circle.
    pub(crate) fn circle_lift_rate(&self) -> f64 {
        match *self {
            Model::HalfPlane { m, h } => 2.0 * h / m,
            _ => 0.0,
        }
    }

    pub fn check_domain(&self, x: f64, y: f64) -> Result<()> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("non-finite point ({x}, {y})")));
        }
        if let Model::HalfPlane { .. } = self {
            if y <= 0.0 {
                return Err(Error::Domain(format!("y = {y} <= 0 in half-plane model")));
            }
        }
        Ok(())
    }

    pub fn frame(&self, x: f64, y: f64) -> FrameData {
        match *self {
            Model::HalfPlane { m, h } => {
                let c = 2.0 * h / m;
                FrameData {
                    b: 1.0 / (m * y * y),
                    db: Vector2::new(0.0, -2.0 / (m * y * y * y)),
                    a: Vector2::new(c / y, 0.0),
                    da: Matrix2::new(0.0, -c / (y * y), 0.0, 0.0),
                }
            }
            Model::Heisenberg { tau } => FrameData {
                b: 1.0,
                db: Vector2::zeros(),
                a: Vector2::new(tau * y, -tau * x),
                da: Matrix2::new(0.0, tau, -tau, 0.0),
            },
            Model::Euclidean => FrameData {
                b: 1.0,
                db: Vector2::zeros(),
                a: Vector2::zeros(),
                da: Matrix2::zeros(),
            },
        }
    }
}
