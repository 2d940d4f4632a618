//! The base surface Σ(κ) in the chart used by the models: the Euclidean plane
//! or the upper half-plane with metric `(dx² + dy²)/(m y²)` of curvature `-m`.
//!
//! Angles are coordinate angles of tangent vectors; both charts are conformal,
//! so they measure Riemannian angles too.

use crate::error::{Error, Result};
use nalgebra::Vector2;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type BasePoint = Vector2<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseKind {
    Flat,
    Hyperbolic { m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseSurface {
    pub kind: BaseKind,
    /// +1 if counterclockwise coordinate loops count as positively oriented.
    pub orientation: f64,
}

pub(crate) fn cx(v: BasePoint) -> Complex64 {
    Complex64::new(v.x, v.y)
}

pub(crate) fn vx(z: Complex64) -> BasePoint {
    BasePoint::new(z.re, z.im)
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

impl BaseSurface {
    pub fn flat(orientation: f64) -> Self {
        BaseSurface {
            kind: BaseKind::Flat,
            orientation,
        }
    }

    pub fn hyperbolic(m: f64, orientation: f64) -> Self {
        BaseSurface {
            kind: BaseKind::Hyperbolic { m },
            orientation,
        }
    }

    /// Base of curvature `kappa <= 0` in the standard (counterclockwise) orientation.
    pub fn from_curvature(kappa: f64) -> Result<Self> {
        if kappa > 0.0 || !kappa.is_finite() {
            return Err(Error::Unsupported(format!("base curvature {kappa}")));
        }
        if kappa == 0.0 {
            Ok(Self::flat(1.0))
        } else {
            Ok(Self::hyperbolic(-kappa, 1.0))
        }
    }

    pub fn curvature(&self) -> f64 {
        match self.kind {
            BaseKind::Flat => 0.0,
            BaseKind::Hyperbolic { m } => -m,
        }
    }

    /// A convenient interior reference point.
    pub fn origin(&self) -> BasePoint {
        match self.kind {
            BaseKind::Flat => BasePoint::new(0.0, 0.0),
            BaseKind::Hyperbolic { .. } => BasePoint::new(0.0, 1.0),
        }
    }

    /// Conformal factor `λ²` of the base metric.
    pub fn conformal_sq(&self, q: BasePoint) -> f64 {
        match self.kind {
            BaseKind::Flat => 1.0,
            BaseKind::Hyperbolic { m } => 1.0 / (m * q.y * q.y),
        }
    }

    pub fn check(&self, q: BasePoint) -> Result<()> {
        if !q.x.is_finite() || !q.y.is_finite() {
            return Err(Error::Domain(format!("non-finite base point {q:?}")));
        }
        if let BaseKind::Hyperbolic { .. } = self.kind {
            if q.y <= 0.0 {
                return Err(Error::Domain(format!("base point {q:?} has y <= 0")));
            }
        }
        Ok(())
    }

    pub fn distance(&self, p: BasePoint, q: BasePoint) -> f64 {
        match self.kind {
            BaseKind::Flat => (q - p).norm(),
            BaseKind::Hyperbolic { m } => {
                let half = (q - p).norm() / (2.0 * (p.y * q.y).sqrt());
                2.0 * half.asinh() / m.sqrt()
            }
        }
    }

    /// Coordinate angle of the initial tangent of the geodesic from `p` to `q`.
    pub fn direction(&self, p: BasePoint, q: BasePoint) -> f64 {
        match self.kind {
            BaseKind::Flat => (q.y - p.y).atan2(q.x - p.x),
            BaseKind::Hyperbolic { .. } => {
                let (pc, qc) = (cx(p), cx(q));
                let zeta = (qc - pc) / (qc - pc.conj());
                zeta.arg() + PI / 2.0
            }
        }
    }

    /// Point at distance `s` along the geodesic leaving `p` at angle `angle`,
    /// together with the coordinate angle of the tangent there.
    pub fn exp(&self, p: BasePoint, angle: f64, s: f64) -> (BasePoint, f64) {
        match self.kind {
            BaseKind::Flat => (p + s * BasePoint::new(angle.cos(), angle.sin()), angle),
            BaseKind::Hyperbolic { m } => {
                let pc = cx(p);
                let zeta = Complex64::from_polar((0.5 * m.sqrt() * s).tanh(), angle - PI / 2.0);
                let one = Complex64::new(1.0, 0.0);
                let z = (pc - zeta * pc.conj()) / (one - zeta);
                let end = angle - 2.0 * (one - zeta).arg();
                (vx(z), end)
            }
        }
    }

    /// Unit-speed coordinate velocity of a geodesic through `q` with tangent angle `angle`.
    pub fn unit_velocity(&self, q: BasePoint, angle: f64) -> BasePoint {
        let speed = 1.0 / self.conformal_sq(q).sqrt();
        speed * BasePoint::new(angle.cos(), angle.sin())
    }

    pub fn midpoint(&self, p: BasePoint, q: BasePoint) -> BasePoint {
        let d = self.distance(p, q);
        self.exp(p, self.direction(p, q), 0.5 * d).0
    }

    /// Coordinate angle of the tangent of the geodesic from `p` to `q` on arrival at `q`.
    pub fn arrival_direction(&self, p: BasePoint, q: BasePoint) -> f64 {
        wrap_angle(self.direction(q, p) + PI)
    }

    /// Interior angle at `v` between the geodesics towards `p` and `q`, in `[0, π]`.
    pub fn angle_at(&self, v: BasePoint, p: BasePoint, q: BasePoint) -> f64 {
        wrap_angle(self.direction(v, q) - self.direction(v, p)).abs()
    }

    /// Signed rotation from angle `from` to angle `to` in the positive sense of
    /// this surface, wrapped into `(-π, π]`.
    pub fn signed_turn(&self, from: f64, to: f64) -> f64 {
        wrap_angle(self.orientation * (to - from))
    }
}

/// Unit-speed geodesic segment of the base, parametrized by arc length.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicArc {
    pub base: BaseSurface,
    pub start: BasePoint,
    pub angle: f64,
    pub length: f64,
}

impl GeodesicArc {
    pub fn between(base: BaseSurface, p: BasePoint, q: BasePoint) -> Self {
        GeodesicArc {
            base,
            start: p,
            angle: base.direction(p, q),
            length: base.distance(p, q),
        }
    }

    pub fn point(&self, s: f64) -> BasePoint {
        self.base.exp(self.start, self.angle, s).0
    }

    pub fn end(&self) -> BasePoint {
        self.point(self.length)
    }
}

/// A parametrized curve in the base chart.
pub trait PlaneCurve {
    fn span(&self) -> (f64, f64);
    /// Position and coordinate velocity at parameter `t`.
    fn eval(&self, t: f64) -> (BasePoint, BasePoint);
    /// Interior parameters where the curve is only piecewise smooth.
    fn breaks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl PlaneCurve for GeodesicArc {
    fn span(&self) -> (f64, f64) {
        (0.0, self.length)
    }

    fn eval(&self, t: f64) -> (BasePoint, BasePoint) {
        let (q, ang) = self.base.exp(self.start, self.angle, t);
        (q, self.base.unit_velocity(q, ang))
    }
}

/// Closed or open chain of geodesic arcs through the given vertices,
/// parametrized by total arc length.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    arcs: Vec<GeodesicArc>,
    offsets: Vec<f64>,
}

impl GeodesicPath {
    pub fn through(base: BaseSurface, vertices: &[BasePoint], closed: bool) -> Self {
        let mut arcs = Vec::new();
        let n = vertices.len();
        let count = if closed { n } else { n.saturating_sub(1) };
        for i in 0..count {
            arcs.push(GeodesicArc::between(base, vertices[i], vertices[(i + 1) % n]));
        }
        let mut offsets = Vec::with_capacity(arcs.len() + 1);
        let mut acc = 0.0;
        offsets.push(0.0);
        for a in &arcs {
            acc += a.length;
            offsets.push(acc);
        }
        GeodesicPath { arcs, offsets }
    }

    pub fn arcs(&self) -> &[GeodesicArc] {
        &self.arcs
    }

    pub fn length(&self) -> f64 {
        *self.offsets.last().unwrap_or(&0.0)
    }

    /// Arc-length offsets of the vertices along the path.
    pub fn breakpoints(&self) -> &[f64] {
        &self.offsets
    }
}

impl PlaneCurve for GeodesicPath {
    fn span(&self) -> (f64, f64) {
        (0.0, self.length())
    }

    fn eval(&self, t: f64) -> (BasePoint, BasePoint) {
        let idx = match self.offsets[1..].iter().position(|&o| t <= o) {
            Some(i) => i,
            None => self.arcs.len() - 1,
        };
        self.arcs[idx].eval(t - self.offsets[idx])
    }

    fn breaks(&self) -> Vec<f64> {
        let n = self.offsets.len();
        if n <= 2 {
            Vec::new()
        } else {
            self.offsets[1..n - 1].to_vec()
        }
    }
}

/// Adapter turning a closure `t -> (position, velocity)` into a [`PlaneCurve`].
pub struct FnCurve<F> {
    pub t0: f64,
    pub t1: f64,
    pub f: F,
}

impl<F: Fn(f64) -> (BasePoint, BasePoint)> PlaneCurve for FnCurve<F> {
    fn span(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    fn eval(&self, t: f64) -> (BasePoint, BasePoint) {
        (self.f)(t)
    }
}
