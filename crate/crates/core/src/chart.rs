//! Charts of the base in which geodesics are straight lines, and small planar
//! predicates used on them.

use crate::base::{cx, vx, BaseKind, BasePoint, BaseSurface};
use crate::error::{Error, Result};
use nalgebra::Matrix2;
use num_complex::Complex64;

/// Geodesic chart centred at `centre`: a translation for flat bases and the
/// Beltrami–Klein disc for hyperbolic ones.
#[derive(Debug, Clone, Copy)]
pub struct KleinChart {
    pub base: BaseSurface,
    pub centre: BasePoint,
}

impl KleinChart {
    pub fn new(base: BaseSurface, centre: BasePoint) -> Self {
        KleinChart { base, centre }
    }

    pub fn to_chart(&self, q: BasePoint) -> BasePoint {
        match self.base.kind {
            BaseKind::Flat => q - self.centre,
            BaseKind::Hyperbolic { .. } => {
                let c = cx(self.centre);
                let w = (cx(q) - c) / (cx(q) - c.conj());
                vx(2.0 * w / (1.0 + w.norm_sqr()))
            }
        }
    }

    pub fn from_chart(&self, k: BasePoint) -> Result<BasePoint> {
        match self.base.kind {
            BaseKind::Flat => Ok(k + self.centre),
            BaseKind::Hyperbolic { .. } => {
                let r2 = k.norm_squared();
                if r2 >= 1.0 {
                    return Err(Error::Domain(format!("chart point {k:?} outside the unit disc")));
                }
                let w = cx(k) / (1.0 + (1.0 - r2).sqrt());
                let c = cx(self.centre);
                Ok(vx((c - w * c.conj()) / (Complex64::new(1.0, 0.0) - w)))
            }
        }
    }

    /// Base point and the Jacobian `∂q/∂k` of the inverse chart.
    pub fn from_chart_jacobian(&self, k: BasePoint) -> Result<(BasePoint, Matrix2<f64>)> {
        match self.base.kind {
            BaseKind::Flat => Ok((k + self.centre, Matrix2::identity())),
            BaseKind::Hyperbolic { .. } => {
                let r2 = k.norm_squared();
                if r2 >= 1.0 {
                    return Err(Error::Domain(format!("chart point {k:?} outside the unit disc")));
                }
                let s = (1.0 - r2).sqrt();
                let d = 1.0 + s;
                let w = cx(k) / d;
                let jw = Matrix2::identity() / d + (k * k.transpose()) / (s * d * d);
                let c = cx(self.centre);
                let one = Complex64::new(1.0, 0.0);
                let q = (c - w * c.conj()) / (one - w);
                let dz = (c - c.conj()) / ((one - w) * (one - w));
                let mz = Matrix2::new(dz.re, -dz.im, dz.im, dz.re);
                Ok((vx(q), mz * jw))
            }
        }
    }
}

/// Twice the signed area of the triangle `(a, b, c)`.
pub fn orient2d(a: BasePoint, b: BasePoint, c: BasePoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Whether the closed segments `[a, b]` and `[c, d]` meet, up to `tol`.
pub fn segments_intersect(a: BasePoint, b: BasePoint, c: BasePoint, d: BasePoint, tol: f64) -> bool {
    segment_intersection(a, b, c, d, tol).is_some()
}

/// Parameters `(s, t)` with `a + s(b - a) = c + t(d - c)` for crossing
/// segments, with `tol` slack in the parameters. Collinear overlaps report
/// the first shared point.
pub fn segment_intersection(
    a: BasePoint,
    b: BasePoint,
    c: BasePoint,
    d: BasePoint,
    tol: f64,
) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let denom = r.x * s.y - r.y * s.x;
    let ac = c - a;
    let scale = r.norm() * s.norm();
    if denom.abs() <= 1e-14 * scale {
        // parallel; check collinear overlap
        if (ac.x * r.y - ac.y * r.x).abs() > tol * r.norm().max(1e-300) {
            return None;
        }
        let rr = r.norm_squared();
        if rr == 0.0 {
            return None;
        }
        let t0 = ac.dot(&r) / rr;
        let t1 = (d - a).dot(&r) / rr;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        if hi < -tol || lo > 1.0 + tol {
            return None;
        }
        let sp = lo.max(0.0);
        let tt = if (t1 - t0).abs() > 0.0 { (sp - t0) / (t1 - t0) } else { 0.0 };
        return Some((sp, tt));
    }
    let sp = (ac.x * s.y - ac.y * s.x) / denom;
    let tp = (ac.x * r.y - ac.y * r.x) / denom;
    let ts = tol / r.norm().max(1e-300);
    let tt = tol / s.norm().max(1e-300);
    if sp >= -ts && sp <= 1.0 + ts && tp >= -tt && tp <= 1.0 + tt {
        Some((sp, tp))
    } else {
        None
    }
}

/// Winding number of the closed polyline `poly` around `q`.
pub fn winding_number(poly: &[BasePoint], q: BasePoint) -> i32 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = poly[i] - q;
        let b = poly[(i + 1) % n] - q;
        total += (a.x * b.y - a.y * b.x).atan2(a.dot(&b));
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i32
}

/// Whether a closed polyline is simple (no two non-adjacent edges meet).
pub fn is_simple_polygon(poly: &[BasePoint]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n], 0.0) {
                return false;
            }
        }
    }
    true
}
