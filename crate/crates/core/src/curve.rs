//! Sampled curves, the geodesic integrator and horizontal lifts.

use crate::base::{cx, BasePoint, PlaneCurve};
use crate::error::{Error, Result};
use crate::space::{Model, ModelPoint, SpaceParams};
use nalgebra::Vector3;

/// Arc-length sampled curve with optional frame data.
///
/// Frame arrays (`normals`, `conormals`, `curvature`, `torsion`,
/// `twist_rate`) are either empty or have the same length as `points`.
#[derive(Debug, Clone, Default)]
pub struct CurveSample {
    pub params: Vec<f64>,
    pub points: Vec<ModelPoint>,
    pub tangents: Vec<Vector3<f64>>,
    pub normals: Vec<Vector3<f64>>,
    pub conormals: Vec<Vector3<f64>>,
    pub curvature: Vec<f64>,
    pub torsion: Vec<f64>,
    pub twist_rate: Vec<f64>,
}

impl CurveSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> ModelPoint {
        self.points[0]
    }

    pub fn last(&self) -> ModelPoint {
        *self.points.last().expect("empty curve")
    }

    /// Straight vertical segment over a base point, unit speed in `z`.
    pub fn vertical(x: f64, y: f64, z0: f64, z1: f64, samples: usize) -> Self {
        let n = samples.max(2);
        let dir = if z1 >= z0 { 1.0 } else { -1.0 };
        let mut out = CurveSample::default();
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            out.params.push(t * (z1 - z0).abs());
            out.points.push(ModelPoint::new(x, y, z0 + t * (z1 - z0)));
            out.tangents.push(Vector3::new(0.0, 0.0, dir));
        }
        out
    }

    /// Riemannian length of the sampled polyline, each chord measured with the
    /// metric at its midpoint.
    pub fn polyline_length(&self, model: &Model) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                model.norm(&mid, &(w[1] - w[0]))
            })
            .sum()
    }
}

fn rk4_step<const N: usize, F>(f: &F, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let add = |a: &[f64; N], b: &[f64; N], s: f64| {
        let mut r = *a;
        for i in 0..N {
            r[i] += s * b[i];
        }
        r
    };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, 0.5 * h));
    let k3 = f(&add(y, &k2, 0.5 * h));
    let k4 = f(&add(y, &k3, h));
    let mut r = *y;
    for i in 0..N {
        r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    r
}

const REFINE_TOL: f64 = 1e-9;
const MAX_DOUBLINGS: usize = 14;
const GAUSS3: f64 = 0.774_596_669_241_483_4;

/// Geodesic with initial point `p` and initial velocity `v`, integrated over
/// arc length `length` with the classical fourth-order scheme. The step count
/// starts at `steps` and doubles until the end point changes by less than 1e-9.
/// The returned sample has `steps + 1` points and unit tangents.
pub fn geodesic(
    space: &SpaceParams,
    p: ModelPoint,
    v: Vector3<f64>,
    length: f64,
    steps: usize,
) -> Result<CurveSample> {
    if steps < 2 {
        return Err(Error::Invalid("geodesic needs at least 2 steps".into()));
    }
    let model = space.model();
    model.check_domain(p.x, p.y)?;
    let speed = model.norm(&p, &v);
    if speed == 0.0 || !speed.is_finite() {
        return Err(Error::Invalid("zero initial velocity".into()));
    }
    let v0 = v / speed;
    let rhs = |y: &[f64; 6]| {
        let q = ModelPoint::new(y[0], y[1], y[2]);
        let w = Vector3::new(y[3], y[4], y[5]);
        let acc = -model.connection_apply(&q, &w, &w);
        [y[3], y[4], y[5], acc.x, acc.y, acc.z]
    };
    let run = |n: usize| -> Result<Vec<[f64; 6]>> {
        let h = length / n as f64;
        let mut y = [p.x, p.y, p.z, v0.x, v0.y, v0.z];
        let mut out = Vec::with_capacity(n + 1);
        out.push(y);
        for i in 0..n {
            y = rk4_step(&rhs, &y, h);
            if let Err(e) = model.check_domain(y[0], y[1]) {
                return Err(Error::Domain(format!(
                    "geodesic left the model at arc length {}: {e}",
                    (i + 1) as f64 * h
                )));
            }
            out.push(y);
        }
        Ok(out)
    };
    let mut n = steps;
    let mut prev = run(n)?;
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        let next = run(2 * n)?;
        let a = prev.last().unwrap();
        let b = next.last().unwrap();
        let diff = (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
        prev = next;
        n *= 2;
        if diff < REFINE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical("geodesic step refinement did not converge".into()));
    }
    let stride = n / steps;
    let mut out = CurveSample::default();
    for i in 0..=steps {
        let y = prev[i * stride];
        out.params.push(length * i as f64 / steps as f64);
        out.points.push(ModelPoint::new(y[0], y[1], y[2]));
        out.tangents.push(Vector3::new(y[3], y[4], y[5]));
    }
    Ok(out)
}

impl Model {
    /// Height change of the horizontal lift of the base geodesic from `p` to `q`,
    /// in closed form.
    pub fn geodesic_lift(&self, p: BasePoint, q: BasePoint) -> f64 {
        match *self {
            Model::Euclidean => 0.0,
            Model::Heisenberg { tau } => tau * (p.x * q.y - p.y * q.x),
            Model::HalfPlane { .. } => {
                let rate = self.circle_lift_rate();
                if rate == 0.0 {
                    return 0.0;
                }
                let dx = q.x - p.x;
                let scale = p.norm() + q.norm();
                if dx.abs() <= 1e-15 * scale {
                    return 0.0;
                }
                let c = (q.norm_squared() - p.norm_squared()) / (2.0 * dx);
                let centre = num_complex::Complex64::new(c, 0.0);
                rate * ((cx(q) - centre) / (cx(p) - centre)).arg()
            }
        }
    }
}

/// Horizontal lift of a base curve starting at height `start_height`.
///
/// `dz/dt = -a(γ)·γ'` is integrated with three-point Gauss quadrature on each
/// smooth piece, doubling the step count until the end height changes by less
/// than 1e-9. The result has `samples` points, uniform in the curve parameter.
pub fn horizontal_lift(
    space: &SpaceParams,
    curve: &dyn PlaneCurve,
    start_height: f64,
    samples: usize,
) -> Result<CurveSample> {
    let model = space.model();
    let samples = samples.max(2);
    let (t0, t1) = curve.span();
    if !(t1 > t0) {
        return Err(Error::Invalid("empty curve span".into()));
    }
    let check = |t: f64| -> Result<()> {
        let (q, _) = curve.eval(t);
        model
            .check_domain(q.x, q.y)
            .map_err(|e| Error::Domain(format!("base curve at t = {t}: {e}")))
    };
    let dz = |t: f64| -> f64 {
        let (q, v) = curve.eval(t);
        let f = model.frame(q.x, q.y);
        -(f.a.x * v.x + f.a.y * v.y)
    };
    // integration nodes: output grid merged with break points
    let mut grid: Vec<f64> = (0..samples)
        .map(|i| t0 + (t1 - t0) * i as f64 / (samples - 1) as f64)
        .collect();
    let out_len = grid.len();
    let mut knots = grid.clone();
    for b in curve.breaks() {
        if b > t0 && b < t1 {
            knots.push(b);
        }
    }
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + b.abs()));
    for &t in &knots {
        check(t)?;
    }
    let integrate = |sub: usize| -> Vec<f64> {
        let mut z = Vec::with_capacity(knots.len());
        let mut acc = start_height;
        z.push(acc);
        for w in knots.windows(2) {
            let h = (w[1] - w[0]) / sub as f64;
            for k in 0..sub {
                let a = w[0] + k as f64 * h;
                // open three-point Gauss rule: the velocity is one-sided at break points
                let c = a + 0.5 * h;
                let d = 0.5 * h * GAUSS3;
                acc += h / 18.0 * (5.0 * dz(c - d) + 8.0 * dz(c) + 5.0 * dz(c + d));
            }
            z.push(acc);
        }
        z
    };
    let mut sub = 1;
    let mut prev = integrate(sub);
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        let next = integrate(2 * sub);
        let diff = (prev.last().unwrap() - next.last().unwrap()).abs();
        prev = next;
        sub *= 2;
        if diff < REFINE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical("lift step refinement did not converge".into()));
    }
    let mut out = CurveSample::default();
    let mut ki = 0;
    for (i, t) in grid.drain(..).enumerate() {
        while (knots[ki] - t).abs() > 1e-14 * (1.0 + t.abs()) {
            ki += 1;
        }
        let (q, v) = curve.eval(t);
        let f = model.frame(q.x, q.y);
        let zdot = -(f.a.x * v.x + f.a.y * v.y);
        let tan = Vector3::new(v.x, v.y, zdot);
        let pt = ModelPoint::new(q.x, q.y, prev[ki]);
        let speed = model.norm(&pt, &tan);
        out.params.push(t);
        out.points.push(pt);
        out.tangents.push(if speed > 0.0 { tan / speed } else { tan });
        debug_assert!(i < out_len);
    }
    Ok(out)
}
