//! Closed-form reference surfaces: umbrellas, horizontal slices, vertical
//! planes, vertical helicoids and the rotational Scherk-type graph.

use crate::base::BasePoint;
use crate::error::{Error, Result};
use crate::isometry::Isometry;
use crate::patch::Patch;
use crate::quadrature::integrate;
use crate::space::{Model, ModelPoint, SpaceParams};
use std::f64::consts::FRAC_PI_2;

/// Horizontal umbrella at `centre`, parametrized by geodesic normal
/// coordinates `(u, v) ∈ [-radius, radius]²` of the base.
#[derive(Debug, Clone, Copy)]
pub struct UmbrellaPatch {
    pub model: Model,
    pub centre: ModelPoint,
    pub radius: f64,
}

impl UmbrellaPatch {
    /// Height of the umbrella over the base point `q`.
    pub fn height_at(&self, q: BasePoint) -> f64 {
        let c = BasePoint::new(self.centre.x, self.centre.y);
        self.centre.z + self.model.geodesic_lift(c, q)
    }
}

impl Patch for UmbrellaPatch {
    fn point(&self, u: f64, v: f64) -> ModelPoint {
        let c = BasePoint::new(self.centre.x, self.centre.y);
        let r = u.hypot(v);
        let q = if r == 0.0 {
            c
        } else {
            self.model.base().exp(c, v.atan2(u), r).0
        };
        ModelPoint::new(q.x, q.y, self.height_at(q))
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        ([-self.radius, self.radius], [-self.radius, self.radius])
    }
}

pub fn umbrella_patch(space: &SpaceParams, centre: ModelPoint, radius: f64) -> Result<UmbrellaPatch> {
    let model = space.model();
    model.check_domain(centre.x, centre.y)?;
    if !(radius > 0.0) {
        return Err(Error::Invalid("umbrella radius must be positive".into()));
    }
    let patch = UmbrellaPatch {
        model,
        centre,
        radius,
    };
    check_corners(&model, &patch)?;
    Ok(patch)
}

fn check_corners(model: &Model, patch: &dyn Patch) -> Result<()> {
    let ([u0, u1], [v0, v1]) = patch.domain();
    for (u, v) in [(u0, v0), (u0, v1), (u1, v0), (u1, v1), (0.5 * (u0 + u1), v0)] {
        let p = patch.point(u, v);
        model
            .check_domain(p.x, p.y)
            .map_err(|e| Error::Domain(format!("patch extent too large: {e}")))?;
        if !p.z.is_finite() {
            return Err(Error::Domain("patch extent too large".into()));
        }
    }
    Ok(())
}

/// Horizontal slice: the horizontal geodesics perpendicular to a horizontal
/// axis through `start` with base direction `angle`. `u` runs along the axis,
/// `v` along the rulings.
#[derive(Debug, Clone, Copy)]
pub struct SlicePatch {
    pub model: Model,
    pub start: ModelPoint,
    pub angle: f64,
    pub length: [f64; 2],
    pub width: [f64; 2],
}

impl Patch for SlicePatch {
    fn point(&self, u: f64, v: f64) -> ModelPoint {
        let base = self.model.base();
        let p = BasePoint::new(self.start.x, self.start.y);
        let (a, dir) = base.exp(p, self.angle, u);
        let normal = dir + base.orientation * FRAC_PI_2;
        let (q, _) = base.exp(a, normal, v);
        let z = self.start.z + self.model.geodesic_lift(p, a) + self.model.geodesic_lift(a, q);
        ModelPoint::new(q.x, q.y, z)
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        (self.length, self.width)
    }
}

pub fn slice_patch(
    space: &SpaceParams,
    start: ModelPoint,
    angle: f64,
    length: [f64; 2],
    width: [f64; 2],
) -> Result<SlicePatch> {
    let model = space.model();
    model.check_domain(start.x, start.y)?;
    if !(length[1] > length[0]) || !(width[1] > width[0]) {
        return Err(Error::Invalid("slice extents must be nonempty".into()));
    }
    let patch = SlicePatch {
        model,
        start,
        angle,
        length,
        width,
    };
    check_corners(&model, &patch)?;
    Ok(patch)
}

/// Vertical plane over the base geodesic through `start` with direction
/// `angle`: `(u, v) -> (γ(u), v)`.
#[derive(Debug, Clone, Copy)]
pub struct VerticalPlanePatch {
    pub model: Model,
    pub start: BasePoint,
    pub angle: f64,
    pub length: [f64; 2],
    pub height: [f64; 2],
}

impl Patch for VerticalPlanePatch {
    fn point(&self, u: f64, v: f64) -> ModelPoint {
        let q = self.model.base().exp(self.start, self.angle, u).0;
        ModelPoint::new(q.x, q.y, v)
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        (self.length, self.height)
    }
}

pub fn vertical_plane(
    space: &SpaceParams,
    start: BasePoint,
    angle: f64,
    length: [f64; 2],
    height: [f64; 2],
) -> Result<VerticalPlanePatch> {
    let model = space.model();
    model.check_domain(start.x, start.y)?;
    if !(length[1] > length[0]) || !(height[1] > height[0]) {
        return Err(Error::Invalid("plane extents must be nonempty".into()));
    }
    let patch = VerticalPlanePatch {
        model,
        start,
        angle,
        length,
        height,
    };
    check_corners(&model, &patch)?;
    Ok(patch)
}

/// Vertical helicoid about the fibre through `axis`. The ruling at height
/// `axis.z + t` leaves the axis in base direction `angle0 + rate·t`, and the
/// parameters are `(r, t) ∈ [-radius, radius] × [-height, height]`.
#[derive(Debug, Clone, Copy)]
pub struct HelicoidPatch {
    pub model: Model,
    pub axis: ModelPoint,
    pub angle0: f64,
    /// Rotation rate of the rulings in the chart, relative to the
    /// translation-invariant horizontal frame.
    pub rate: f64,
    pub radius: f64,
    pub height: f64,
}

impl HelicoidPatch {
    /// Base direction of the ruling at axis parameter `t`.
    pub fn ruling_angle(&self, t: f64) -> f64 {
        self.angle0 + self.rate * t
    }
}

impl Patch for HelicoidPatch {
    fn point(&self, r: f64, t: f64) -> ModelPoint {
        let c = BasePoint::new(self.axis.x, self.axis.y);
        let q = self.model.base().exp(c, self.ruling_angle(t), r).0;
        ModelPoint::new(q.x, q.y, self.axis.z + t + self.model.geodesic_lift(c, q))
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        ([-self.radius, self.radius], [-self.height, self.height])
    }

    fn step_scale(&self) -> (f64, f64) {
        (1.0, 1.0 / self.rate.abs().max(1.0))
    }
}

/// A reference surface built by one of the helicoid constructors.
#[derive(Debug, Clone, Copy)]
pub enum HelicoidSurface {
    Helicoid(HelicoidPatch),
    Umbrella(UmbrellaPatch),
}

impl Patch for HelicoidSurface {
    fn point(&self, u: f64, v: f64) -> ModelPoint {
        match self {
            HelicoidSurface::Helicoid(p) => p.point(u, v),
            HelicoidSurface::Umbrella(p) => p.point(u, v),
        }
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            HelicoidSurface::Helicoid(p) => p.domain(),
            HelicoidSurface::Umbrella(p) => p.domain(),
        }
    }

    fn step_scale(&self) -> (f64, f64) {
        match self {
            HelicoidSurface::Helicoid(p) => p.step_scale(),
            HelicoidSurface::Umbrella(p) => p.step_scale(),
        }
    }
}

/// Helicoid `M(s)`: the rulings turn with speed `pitch` against a parallel
/// frame along the axis. Parallel transport along a fibre itself turns at
/// rate `τ` against the translation-invariant frame, so `M(τ)` is a vertical
/// plane. Infinite pitch gives the umbrella at `axis`.
pub fn helicoid_patch(
    space: &SpaceParams,
    axis: ModelPoint,
    angle0: f64,
    pitch: f64,
    radius: f64,
    height: f64,
) -> Result<HelicoidSurface> {
    if pitch.is_nan() {
        return Err(Error::Invalid("pitch is NaN".into()));
    }
    if pitch.is_infinite() {
        return umbrella_patch(space, axis, radius).map(HelicoidSurface::Umbrella);
    }
    let model = space.model();
    let rate = model.orientation() * (pitch - space.tau());
    helicoid_with_rate(model, axis, angle0, rate, radius, height)
}

/// Helicoid with the classical rise `rise` per radian of ruling rotation, so
/// the rulings turn at rate `1/rise`. `rise = 0` is the umbrella and an
/// infinite rise the vertical plane.
pub fn helicoid_by_rise(
    space: &SpaceParams,
    axis: ModelPoint,
    angle0: f64,
    rise: f64,
    radius: f64,
    height: f64,
) -> Result<HelicoidSurface> {
    if rise.is_nan() {
        return Err(Error::Invalid("rise is NaN".into()));
    }
    if rise == 0.0 {
        return umbrella_patch(space, axis, radius).map(HelicoidSurface::Umbrella);
    }
    let rate = if rise.is_infinite() { 0.0 } else { 1.0 / rise };
    helicoid_with_rate(space.model(), axis, angle0, rate, radius, height)
}

fn helicoid_with_rate(
    model: Model,
    axis: ModelPoint,
    angle0: f64,
    rate: f64,
    radius: f64,
    height: f64,
) -> Result<HelicoidSurface> {
    model.check_domain(axis.x, axis.y)?;
    if !(radius > 0.0) || !(height > 0.0) {
        return Err(Error::Invalid("helicoid extents must be positive".into()));
    }
    let patch = HelicoidPatch {
        model,
        axis,
        angle0,
        rate,
        radius,
        height,
    };
    check_corners(&model, &patch)?;
    for k in 0..=16 {
        let t = -height + 2.0 * height * k as f64 / 16.0;
        for r in [-radius, radius] {
            let p = patch.point(r, t);
            model.check_domain(p.x, p.y)?;
        }
    }
    Ok(HelicoidSurface::Helicoid(patch))
}

/// Value and first two derivatives of a graph `z = u(x, y)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GraphJet {
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

/// Left-hand side of the minimal graph equation
/// `2w(P_x + Q_y) - (P w_x + Q w_y)` with `P = u_x + a_x`, `Q = u_y + a_y`
/// and `w = 1 + (P² + Q²)/b`. In the half-plane model this is
/// `2w(u_xx + u_yy) - ((2H/(y m) + u_x) w_x + u_y w_y)`.
pub fn mce_residual(model: &Model, x: f64, y: f64, jet: &GraphJet) -> Result<f64> {
    Ok(mce_terms(model, x, y, jet)?.0)
}

/// Mean curvature of the graph with respect to the upward normal, from the
/// same divergence form: `div((P, Q)/√w) / (2b)`.
pub fn graph_mean_curvature(model: &Model, x: f64, y: f64, jet: &GraphJet) -> Result<f64> {
    let (r, w, b) = mce_terms(model, x, y, jet)?;
    Ok(r / (4.0 * b * w.powf(1.5)))
}

fn mce_terms(model: &Model, x: f64, y: f64, jet: &GraphJet) -> Result<(f64, f64, f64)> {
    model.check_domain(x, y)?;
    let f = model.frame(x, y);
    let p = jet.ux + f.a.x;
    let q = jet.uy + f.a.y;
    let px = jet.uxx + f.da[(0, 0)];
    let py = jet.uxy + f.da[(0, 1)];
    let qx = jet.uxy + f.da[(1, 0)];
    let qy = jet.uyy + f.da[(1, 1)];
    let s = p * p + q * q;
    let w = 1.0 + s / f.b;
    let wx = 2.0 * (p * px + q * qx) / f.b - s * f.db.x / (f.b * f.b);
    let wy = 2.0 * (p * py + q * qy) / f.b - s * f.db.y / (f.b * f.b);
    Ok((2.0 * w * (px + qy) - (p * wx + q * wy), w, f.b))
}

/// Rotational Scherk-type graph over the quadrant `x > 0` of the half-plane
/// chart, a function of the polar angle `s` only, moved into place by an
/// isometry.
#[derive(Debug, Clone, Copy)]
pub struct ScherkParams {
    pub space: SpaceParams,
    /// `+1` for the branch with `u ≥ 0`, `-1` for the other one.
    pub sign: f64,
    /// Orientation-preserving isometry applied to the standard graph, whose
    /// divergence geodesic is the imaginary axis traversed upward from `i`.
    pub placement: Isometry,
}

const SCHERK_TOL: f64 = 1e-14;

impl ScherkParams {
    /// Standard position, `u ≥ 0` branch.
    pub fn new(space: SpaceParams) -> Result<Self> {
        let model = space.model();
        match model {
            Model::HalfPlane { .. } => {}
            _ => {
                return Err(Error::Unsupported(
                    "the Scherk-type graph needs kappa + 4H^2 < 0".into(),
                ))
            }
        }
        let i = BasePoint::new(0.0, 1.0);
        Ok(ScherkParams {
            space,
            sign: 1.0,
            placement: Isometry::frame_motion(model, i, 0.0, FRAC_PI_2, i, 0.0, FRAC_PI_2),
        })
    }

    pub fn with_sign(mut self, sign: f64) -> Self {
        self.sign = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    /// Place the graph so that it diverges along the geodesic through `point`
    /// with base direction `angle`, with the standard point `i` at height
    /// `height`. The graph lies on the side that is clockwise of the
    /// direction in the chart.
    pub fn placed(mut self, point: BasePoint, angle: f64, height: f64) -> Self {
        let i = BasePoint::new(0.0, 1.0);
        self.placement = Isometry::frame_motion(self.space.model(), i, 0.0, FRAC_PI_2, point, height, angle);
        self
    }

    fn m(&self) -> f64 {
        -self.space.kappa_e()
    }

    fn root(&self, s: f64) -> f64 {
        let h = self.space.h_mean;
        (4.0 * h * h * s.cos().powi(2) + self.m()).sqrt()
    }

    /// `S(s) = √(4H² cos² s + m) / cos s`.
    fn integrand(&self, s: f64) -> f64 {
        self.root(s) / s.cos()
    }
}

fn check_angle(s: f64) -> Result<()> {
    if !(0.0..FRAC_PI_2).contains(&s) {
        return Err(Error::Domain(format!("polar angle {s} outside [0, π/2)")));
    }
    Ok(())
}

/// `∫₀ˢ S(t) dt`, with the `√m / cos t` part integrated in closed form and the
/// bounded remainder `4H² cos t / (√(4H² cos² t + m) + √m)` by quadrature.
pub fn scherk_integral(params: &ScherkParams, s: f64, tol: f64) -> Result<f64> {
    check_angle(s)?;
    let m = params.m();
    let h2 = params.space.h_mean * params.space.h_mean;
    let singular = m.sqrt() * (1.0 / s.cos() + s.tan()).ln();
    if h2 == 0.0 {
        return Ok(singular);
    }
    let smooth = integrate(
        |t: f64| {
            let c = t.cos();
            4.0 * h2 * c / ((4.0 * h2 * c * c + m).sqrt() + m.sqrt())
        },
        0.0,
        s,
        tol,
        0.0,
    )?;
    Ok(singular + smooth.value)
}

/// Height `u(s) = (2Hs ± ∫₀ˢ S)/m` of the standard graph, `m = -(κ + 4H²)`.
pub fn scherk_height(params: &ScherkParams, s: f64) -> Result<f64> {
    scherk_height_with_tol(params, s, SCHERK_TOL)
}

pub fn scherk_height_with_tol(params: &ScherkParams, s: f64, tol: f64) -> Result<f64> {
    let i = scherk_integral(params, s, tol)?;
    Ok((2.0 * params.space.h_mean * s + params.sign * i) / params.m())
}

/// `u'(s)` and `u''(s)` of the standard graph.
pub fn scherk_derivatives(params: &ScherkParams, s: f64) -> Result<(f64, f64)> {
    check_angle(s)?;
    let m = params.m();
    let h = params.space.h_mean;
    let d1 = (2.0 * h + params.sign * params.integrand(s)) / m;
    let d2 = params.sign * s.sin() / (s.cos().powi(2) * params.root(s));
    Ok((d1, d2))
}

/// The polar form of `w` for a rotational graph:
/// `1 - 4H²/κ_e - 4H sin²s u' - κ_e sin²s u'²`.
pub fn scherk_polar_w(params: &ScherkParams, s: f64) -> Result<f64> {
    let (d1, _) = scherk_derivatives(params, s)?;
    let ke = params.space.kappa_e();
    let h = params.space.h_mean;
    let sn2 = s.sin().powi(2);
    Ok(1.0 - 4.0 * h * h / ke - 4.0 * h * sn2 * d1 - ke * sn2 * d1 * d1)
}

/// First-integral residual `(2H + κ_e u')²/w - c` with `c = -κ_e`.
pub fn scherk_conservation_residual(params: &ScherkParams, s: f64) -> Result<f64> {
    let (d1, _) = scherk_derivatives(params, s)?;
    let ke = params.space.kappa_e();
    let w = scherk_polar_w(params, s)?;
    let lhs = (2.0 * params.space.h_mean + ke * d1).powi(2) / w;
    Ok(lhs + ke)
}

/// Jet of the standard graph `u(x, y) = U(atan2(y, x))` at a Cartesian point.
pub fn scherk_jet(params: &ScherkParams, x: f64, y: f64) -> Result<GraphJet> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(Error::Domain(format!("({x}, {y}) outside the open quadrant")));
    }
    let s = y.atan2(x);
    let u = scherk_height(params, s)?;
    let (d1, d2) = scherk_derivatives(params, s)?;
    let r2 = x * x + y * y;
    let sx = -y / r2;
    let sy = x / r2;
    let sxx = 2.0 * x * y / (r2 * r2);
    let sxy = (y * y - x * x) / (r2 * r2);
    let syy = -sxx;
    Ok(GraphJet {
        u,
        ux: d1 * sx,
        uy: d1 * sy,
        uxx: d2 * sx * sx + d1 * sxx,
        uxy: d2 * sx * sy + d1 * sxy,
        uyy: d2 * sy * sy + d1 * syy,
    })
}

/// Height of the placed graph over the base point `q`, or `None` where the
/// graph is not defined (beyond its divergence geodesic).
pub fn scherk_graph_height(params: &ScherkParams, q: BasePoint) -> Result<Option<f64>> {
    let model = params.space.model();
    model.check_domain(q.x, q.y)?;
    let inv = params.placement.base_map.inverse();
    let std = inv.apply(q);
    if !(std.x > 0.0) || !(std.y > 0.0) {
        return Ok(None);
    }
    let s = std.y.atan2(std.x);
    let u = scherk_height(params, s)?;
    let image = params.placement.apply(&ModelPoint::new(std.x, std.y, u));
    Ok(Some(image.z))
}

/// Standard-position coordinates of a base point under the placement.
pub fn scherk_standard_point(params: &ScherkParams, q: BasePoint) -> BasePoint {
    params.placement.base_map.inverse().apply(q)
}

/// Horizontal-axis helicoid `z = y' tan(x'/pitch)` of Euclidean space, written
/// in rotated and translated coordinates `(x', y')`; diverges along the lines
/// `x' = ±pitch·π/2`.
#[derive(Debug, Clone, Copy)]
pub struct AxisHelicoid {
    pub origin: BasePoint,
    pub angle: f64,
    pub pitch: f64,
    pub shift: f64,
}

impl AxisHelicoid {
    pub fn local(&self, q: BasePoint) -> BasePoint {
        let d = q - self.origin;
        let (s, c) = self.angle.sin_cos();
        BasePoint::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }

    /// Height over `q`, `None` outside the strip.
    pub fn height(&self, q: BasePoint) -> Option<f64> {
        let l = self.local(q);
        let t = l.x / self.pitch;
        if t.abs() >= FRAC_PI_2 {
            return None;
        }
        Some(self.shift + l.y * t.tan())
    }

    pub fn jet(&self, q: BasePoint) -> Option<GraphJet> {
        let l = self.local(q);
        let t = l.x / self.pitch;
        if t.abs() >= FRAC_PI_2 {
            return None;
        }
        let tn = t.tan();
        let sec2 = 1.0 + tn * tn;
        // derivatives in local coordinates
        let ua = l.y * sec2 / self.pitch;
        let ub = tn;
        let uaa = 2.0 * l.y * sec2 * tn / (self.pitch * self.pitch);
        let uab = sec2 / self.pitch;
        let ubb = 0.0;
        let (s, c) = self.angle.sin_cos();
        // a = c x + s y, b = -s x + c y
        Some(GraphJet {
            u: self.shift + l.y * tn,
            ux: c * ua - s * ub,
            uy: s * ua + c * ub,
            uxx: c * c * uaa - 2.0 * c * s * uab + s * s * ubb,
            uxy: c * s * uaa + (c * c - s * s) * uab - c * s * ubb,
            uyy: s * s * uaa + 2.0 * c * s * uab + c * c * ubb,
        })
    }
}
