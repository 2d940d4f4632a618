//! Sister correspondence along boundary curves: curvature and torsion
//! relations, the twist of the normal along vertical boundary geodesics, the
//! horizontal mirror curves in the base space form and their loop audit.

use crate::base::{wrap_angle, BasePoint};
use crate::chart::segment_intersection;
use crate::contours::BoundaryData;
use crate::curve::CurveSample;
use crate::error::{Error, Result};
use crate::patch::{patch_jet, unit_normal, Patch};
use crate::solver::DiscreteGraph;
use crate::space::{Model, ModelPoint};
use nalgebra::Vector3;
use std::f64::consts::PI;

/// Curvature and torsion of a curve on the sister surface.
pub fn sister_curvature(h: f64, k: f64, t: f64) -> (f64, f64) {
    (-t + h, k)
}

#[derive(Debug, Clone, Copy)]
pub struct SisterRelations {
    pub h: f64,
}

impl SisterRelations {
    pub fn new(h: f64) -> Self {
        SisterRelations { h }
    }

    pub fn map(&self, k: f64, t: f64) -> (f64, f64) {
        sister_curvature(self.h, k, t)
    }

    /// Inverse of [`SisterRelations::map`].
    pub fn unmap(&self, k_sister: f64, t_sister: f64) -> (f64, f64) {
        (t_sister, self.h - k_sister)
    }
}

/// Rotation of the normal along a vertical geodesic, measured in the positive
/// sense of the base against a basic horizontal field.
#[derive(Debug, Clone)]
pub struct TwistProfile {
    /// Arc length along the vertical.
    pub params: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_prime: Vec<f64>,
}

impl TwistProfile {
    /// Constant twist rate on `[0, length]`.
    pub fn uniform(rate: f64, length: f64, samples: usize) -> Self {
        let n = samples.max(2);
        let params: Vec<f64> = (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect();
        TwistProfile {
            alpha: params.iter().map(|t| rate * t).collect(),
            alpha_prime: vec![rate; n],
            params,
        }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn length(&self) -> f64 {
        match (self.params.first(), self.params.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        match (self.alpha.first(), self.alpha.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    pub fn min_rate(&self) -> f64 {
        self.alpha_prime.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_increasing(&self) -> bool {
        self.alpha_prime.iter().all(|&r| r > 0.0)
    }

    /// Strictly increasing parameters.
    pub fn is_ordered(&self) -> bool {
        self.params.windows(2).all(|w| w[1] > w[0])
    }

    /// Twist rate at arc length `t`, linearly interpolated.
    pub fn rate_at(&self, t: f64) -> f64 {
        let p = &self.params;
        let n = p.len();
        if t <= p[0] {
            return self.alpha_prime[0];
        }
        if t >= p[n - 1] {
            return self.alpha_prime[n - 1];
        }
        let i = p.partition_point(|&s| s <= t).clamp(1, n - 1);
        let w = (t - p[i - 1]) / (p[i] - p[i - 1]);
        (1.0 - w) * self.alpha_prime[i - 1] + w * self.alpha_prime[i]
    }
}

/// Twist from the geodesic torsion along a unit-speed vertical geodesic:
/// the rate is `torsion + h`.
pub fn twist_from_torsion(h: f64, params: &[f64], torsion: &[f64]) -> Result<TwistProfile> {
    if params.len() != torsion.len() || params.len() < 2 {
        return Err(Error::Invalid("torsion samples must match the grid and have length >= 2".into()));
    }
    let mut alpha = vec![0.0; params.len()];
    for i in 1..params.len() {
        let dt = params[i] - params[i - 1];
        alpha[i] = alpha[i - 1] + 0.5 * dt * (torsion[i] + torsion[i - 1]) + h * dt;
    }
    Ok(TwistProfile {
        params: params.to_vec(),
        alpha,
        alpha_prime: torsion.iter().map(|t| t + h).collect(),
    })
}

/// Heights of a solved graph on a small circle about a polygon vertex,
/// sampled across the interior angle.
#[derive(Debug, Clone)]
pub struct FanProfile {
    pub vertex: usize,
    pub centre: BasePoint,
    pub radius: f64,
    /// Coordinate angle of the side towards the next vertex.
    pub start_angle: f64,
    pub orientation: f64,
    pub opening: f64,
    /// Angles from the side towards the next vertex, positive sense.
    pub angles: Vec<f64>,
    pub heights: Vec<f64>,
}

impl FanProfile {
    /// Coordinate direction of the fan angle `a`.
    pub fn direction(&self, a: f64) -> f64 {
        self.start_angle + self.orientation * a
    }

    /// Heights strictly monotone in the angle.
    pub fn is_monotone(&self) -> bool {
        let up = self.heights.windows(2).all(|w| w[1] > w[0]);
        let down = self.heights.windows(2).all(|w| w[1] < w[0]);
        up || down
    }

    /// First angle at which the profile attains `h`.
    pub fn angle_at_height(&self, h: f64) -> Option<f64> {
        for i in 1..self.heights.len() {
            let (a, b) = (self.heights[i - 1], self.heights[i]);
            if (a - h) * (b - h) <= 0.0 && a != b {
                let w = (h - a) / (b - a);
                return Some(self.angles[i - 1] + w * (self.angles[i] - self.angles[i - 1]));
            }
            if a == h {
                return Some(self.angles[i - 1]);
            }
        }
        None
    }
}

/// Samples the graph on the circle of `radius` about polygon vertex `vertex`.
pub fn fan_profile(
    graph: &DiscreteGraph,
    data: &BoundaryData,
    vertex: usize,
    radius: f64,
    samples: usize,
) -> Result<FanProfile> {
    let poly = &data.polygon;
    let m = poly.len();
    if vertex >= m {
        return Err(Error::Invalid(format!("vertex {vertex} out of range")));
    }
    let side_min = poly.side_lengths[vertex].min(poly.side_lengths[(vertex + m - 1) % m]);
    if !(radius > 0.0 && radius < side_min) {
        return Err(Error::Invalid("fan radius must be positive and below the adjacent side lengths".into()));
    }
    let base = poly.base;
    let v = poly.vertices[vertex];
    let next = poly.vertices[(vertex + 1) % m];
    let start_angle = base.direction(v, next);
    let opening = poly.interior_angles[vertex];
    let orientation = base.orientation;
    let n = samples.max(3);
    let inset = 1e-9 * opening;
    let mut angles = Vec::with_capacity(n);
    let mut heights = Vec::with_capacity(n);
    for i in 0..n {
        let a = inset + (opening - 2.0 * inset) * i as f64 / (n - 1) as f64;
        let q = base.exp(v, start_angle + orientation * a, radius).0;
        let h = graph
            .height_at(q)
            .ok_or_else(|| Error::Domain(format!("fan sample {q:?} is outside the mesh")))?;
        angles.push(a);
        heights.push(h);
    }
    Ok(FanProfile { vertex, centre: v, radius, start_angle, orientation, opening, angles, heights })
}

/// Twist of the normal of a solved graph along the vertical segment over a
/// jump vertex.
///
/// The vertical is traversed from the trace of the side leaving the vertex
/// to the trace of the side arriving at it. The horizontal tangent of the
/// graph at height `z` on the vertical projects to the level direction of
/// the fan, so the normal turns against the basic frame as that direction
/// does. The level directions are read off the fan at `radius`.
pub fn twist_along_vertical(
    graph: &DiscreteGraph,
    data: &BoundaryData,
    vertex: usize,
    radius: f64,
    samples: usize,
) -> Result<TwistProfile> {
    let jump = data
        .jump_at(vertex)
        .ok_or_else(|| Error::Invalid(format!("vertex {vertex} carries no vertical segment")))?;
    let fan = fan_profile(graph, data, vertex, radius, samples)?;
    let (z_out, z_in) = (jump.outgoing, jump.incoming);
    let sign = if z_in >= z_out { 1.0 } else { -1.0 };
    let params: Vec<f64> = fan.heights.iter().map(|h| sign * (h - z_out)).collect();
    let alpha = fan.angles.clone();
    let n = params.len();
    let mut alpha_prime = vec![0.0; n];
    for i in 0..n {
        let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let dt = params[b] - params[a];
        let da = alpha[b] - alpha[a];
        alpha_prime[i] = if dt == 0.0 { f64::INFINITY * da.signum() } else { da / dt };
    }
    if params.iter().any(|t| !t.is_finite()) {
        return Err(Error::Degenerate("normal undefined next to the vertical".into()));
    }
    Ok(TwistProfile { params, alpha, alpha_prime })
}

/// Twist along the vertical line `u = u_axis` of a patch whose normal is
/// horizontal there, traversed with increasing height.
pub fn twist_along_patch_axis(
    model: &Model,
    patch: &dyn Patch,
    u_axis: f64,
    v_range: [f64; 2],
    samples: usize,
) -> Result<TwistProfile> {
    let n = samples.max(3);
    let o = model.orientation();
    let mut heights = Vec::with_capacity(n);
    let mut raw = Vec::with_capacity(n);
    for i in 0..n {
        let v = v_range[0] + (v_range[1] - v_range[0]) * i as f64 / (n - 1) as f64;
        let jet = patch_jet(patch, u_axis, v);
        let nu = unit_normal(model, &jet)?;
        if nu.x.hypot(nu.y) < 1e-9 {
            return Err(Error::Degenerate("normal has no horizontal part on the axis".into()));
        }
        heights.push(jet.f.z);
        raw.push(o * nu.y.atan2(nu.x));
    }
    let rising = heights[n - 1] >= heights[0];
    if !rising {
        heights.reverse();
        raw.reverse();
    }
    let z0 = heights[0];
    let params: Vec<f64> = heights.iter().map(|z| z - z0).collect();
    let mut alpha = vec![0.0; n];
    for i in 1..n {
        alpha[i] = alpha[i - 1] + wrap_angle(raw[i] - raw[i - 1]);
    }
    let mut alpha_prime = vec![0.0; n];
    for i in 0..n {
        let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
        alpha_prime[i] = (alpha[b] - alpha[a]) / (params[b] - params[a]);
    }
    Ok(TwistProfile { params, alpha, alpha_prime })
}

/// Unit-speed curve in the space form of curvature `kappa` with curvature
/// `2h - α′`, together with the running turning angle, area form and
/// curvature integral.
#[derive(Debug, Clone)]
pub struct MirrorCurve {
    pub kappa: f64,
    pub h: f64,
    pub curve: CurveSample,
    /// Coordinate angle of the tangent.
    pub angle: Vec<f64>,
    /// Running integral of the area form along the curve.
    pub area_form: Vec<f64>,
    /// Running integral of the curvature.
    pub total_curvature: Vec<f64>,
}

impl MirrorCurve {
    pub fn length(&self) -> f64 {
        self.curve.params.last().copied().unwrap_or(0.0)
    }

    pub fn max_curvature(&self) -> f64 {
        self.curve.curvature.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn base_point(&self, i: usize) -> BasePoint {
        let p = self.curve.points[i];
        BasePoint::new(p.x, p.y)
    }

    /// Distance in the space form between two samples.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (p, q) = (self.base_point(i), self.base_point(j));
        if self.kappa == 0.0 {
            (q - p).norm()
        } else {
            let m = -self.kappa;
            2.0 * ((q - p).norm() / (2.0 * (p.y * q.y).sqrt())).asinh() / m.sqrt()
        }
    }
}

const MAX_STEP: f64 = 1e-3;

#[derive(Clone, Copy)]
struct State {
    x: f64,
    y: f64,
    angle: f64,
    area: f64,
    turn: f64,
}

fn rhs(kappa: f64, s: &State, k: f64) -> [f64; 5] {
    if kappa == 0.0 {
        let (c, sn) = (s.angle.cos(), s.angle.sin());
        [c, sn, k, 0.5 * (s.x * sn - s.y * c), k]
    } else {
        let r = (-kappa).sqrt();
        let (c, sn) = (s.angle.cos(), s.angle.sin());
        let dx = r * s.y * c;
        [dx, r * s.y * sn, k - r * c, dx / (-kappa * s.y), k]
    }
}

fn advance(s: &State, d: &[f64; 5], h: f64) -> State {
    State {
        x: s.x + h * d[0],
        y: s.y + h * d[1],
        angle: s.angle + h * d[2],
        area: s.area + h * d[3],
        turn: s.turn + h * d[4],
    }
}

/// Integrates the Frenet system of the mirror curve in the space form of
/// curvature `kappa` (half-plane model for `kappa < 0`), starting at the
/// origin of the model with horizontal tangent.
pub fn mirror_curve(kappa: f64, h: f64, twist: &TwistProfile) -> Result<MirrorCurve> {
    if kappa > 0.0 {
        return Err(Error::Unsupported("mirror curves in the sphere".into()));
    }
    if twist.len() < 2 || !twist.is_ordered() {
        return Err(Error::Invalid("twist profile needs strictly increasing parameters".into()));
    }
    if twist.alpha_prime.iter().any(|r| !r.is_finite()) {
        return Err(Error::Invalid("twist rate must be finite".into()));
    }
    let t0 = twist.params[0];
    let curv = |t: f64| 2.0 * h - twist.rate_at(t);
    let mut state = State { x: 0.0, y: if kappa == 0.0 { 0.0 } else { 1.0 }, angle: 0.0, area: 0.0, turn: 0.0 };
    let mut out = MirrorCurve {
        kappa,
        h,
        curve: CurveSample::default(),
        angle: Vec::new(),
        area_form: Vec::new(),
        total_curvature: Vec::new(),
    };
    let push = |out: &mut MirrorCurve, s: &State, t: f64| {
        let d = rhs(kappa, s, curv(t));
        out.curve.params.push(t - t0);
        out.curve.points.push(ModelPoint::new(s.x, s.y, 0.0));
        out.curve.tangents.push(Vector3::new(d[0], d[1], 0.0));
        out.curve.curvature.push(curv(t));
        out.angle.push(s.angle);
        out.area_form.push(s.area);
        out.total_curvature.push(s.turn);
    };
    push(&mut out, &state, t0);
    for w in twist.params.windows(2) {
        let steps = ((w[1] - w[0]) / MAX_STEP).ceil().max(1.0) as usize;
        let dt = (w[1] - w[0]) / steps as f64;
        for i in 0..steps {
            let t = w[0] + dt * i as f64;
            let k1 = rhs(kappa, &state, curv(t));
            let k2 = rhs(kappa, &advance(&state, &k1, 0.5 * dt), curv(t + 0.5 * dt));
            let k3 = rhs(kappa, &advance(&state, &k2, 0.5 * dt), curv(t + 0.5 * dt));
            let k4 = rhs(kappa, &advance(&state, &k3, dt), curv(t + dt));
            let mut d = [0.0; 5];
            for c in 0..5 {
                d[c] = (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
            }
            state = advance(&state, &d, dt);
            if kappa < 0.0 && !(state.y > 0.0) {
                return Err(Error::Numerical("mirror curve left the half-plane".into()));
            }
            push(&mut out, &state, if i + 1 == steps { w[1] } else { t + dt });
        }
    }
    Ok(out)
}

/// Closed sub-arc cut off by a transversal self-intersection.
#[derive(Debug, Clone, Copy)]
pub struct LoopAudit {
    pub start_param: f64,
    pub end_param: f64,
    pub corner: BasePoint,
    pub length: f64,
    /// Signed area, positive for loops traversed in the positive sense.
    pub signed_area: f64,
    pub total_curvature: f64,
    /// Signed turn from the arriving to the departing tangent at the corner.
    pub exterior_angle: f64,
    pub gauss_bonnet_residual: f64,
    /// Twist over the corresponding vertical subinterval, `2h·length − ∫k`.
    pub twist: f64,
}

impl LoopAudit {
    pub fn exceeds_pi(&self) -> bool {
        self.twist > PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopVerdict {
    /// No self-intersection.
    EmbeddedConsistent,
    /// Some loop needs a twist above π, which no graph supplies.
    ContradictionFound,
    /// Loops exist but none needs a twist above π.
    LoopWithoutContradiction,
}

#[derive(Debug, Clone)]
pub struct LoopCheck {
    pub loops: Vec<LoopAudit>,
    pub verdict: LoopVerdict,
}

fn lerp(v: &[f64], i: usize, w: f64) -> f64 {
    v[i] + w * (v[i + 1] - v[i])
}

/// Segment sweep for self-intersections of the mirror polyline and the
/// Gauss–Bonnet audit of every loop found.
pub fn gauss_bonnet_loop_check(mirror: &MirrorCurve) -> LoopCheck {
    const TOL: f64 = 1e-9;
    let pts: Vec<BasePoint> = (0..mirror.curve.len()).map(|i| mirror.base_point(i)).collect();
    let n = pts.len();
    let mut loops = Vec::new();
    if n >= 4 {
        let boxes: Vec<[f64; 4]> = pts
            .windows(2)
            .map(|w| [w[0].x.min(w[1].x), w[0].x.max(w[1].x), w[0].y.min(w[1].y), w[0].y.max(w[1].y)])
            .collect();
        let mut order: Vec<usize> = (0..boxes.len()).collect();
        order.sort_by(|&a, &b| boxes[a][0].total_cmp(&boxes[b][0]));
        let mut hits: Vec<(usize, f64, usize, f64)> = Vec::new();
        for (oi, &i) in order.iter().enumerate() {
            for &j in &order[oi + 1..] {
                if boxes[j][0] > boxes[i][1] + TOL {
                    break;
                }
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                if b <= a + 1 || boxes[b][2] > boxes[a][3] + TOL || boxes[a][2] > boxes[b][3] + TOL {
                    continue;
                }
                if let Some((s, t)) = segment_intersection(pts[a], pts[a + 1], pts[b], pts[b + 1], TOL) {
                    let (s, t) = (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0));
                    // crossings at a shared sample are found once
                    if b == a + 2 && s >= 1.0 && t <= 0.0 {
                        continue;
                    }
                    hits.push((a, s, b, t));
                }
            }
        }
        hits.sort_by(|x, y| (x.0, x.2).cmp(&(y.0, y.2)));
        for (a, s, b, t) in hits {
            loops.push(audit_loop(mirror, &pts, a, s, b, t));
        }
    }
    let verdict = if loops.is_empty() {
        LoopVerdict::EmbeddedConsistent
    } else if loops.iter().any(|l| l.exceeds_pi()) {
        LoopVerdict::ContradictionFound
    } else {
        LoopVerdict::LoopWithoutContradiction
    };
    LoopCheck { loops, verdict }
}

fn audit_loop(mirror: &MirrorCurve, pts: &[BasePoint], a: usize, s: f64, b: usize, t: f64) -> LoopAudit {
    let c = &mirror.curve;
    let start = lerp(&c.params, a, s);
    let end = lerp(&c.params, b, t);
    let corner = pts[a] + s * (pts[a + 1] - pts[a]);
    let signed_area = lerp(&mirror.area_form, b, t) - lerp(&mirror.area_form, a, s);
    let total_curvature = lerp(&mirror.total_curvature, b, t) - lerp(&mirror.total_curvature, a, s);
    let departing = lerp(&mirror.angle, a, s);
    let arriving = lerp(&mirror.angle, b, t);
    let exterior_angle = wrap_angle(departing - arriving);
    let sigma = if signed_area >= 0.0 { 1.0 } else { -1.0 };
    let gauss_bonnet_residual =
        mirror.kappa * signed_area.abs() + sigma * (total_curvature + exterior_angle) - 2.0 * PI;
    let length = end - start;
    LoopAudit {
        start_param: start,
        end_param: end,
        corner,
        length,
        signed_area,
        total_curvature,
        exterior_angle,
        gauss_bonnet_residual,
        twist: 2.0 * mirror.h * length - total_curvature,
    }
}
