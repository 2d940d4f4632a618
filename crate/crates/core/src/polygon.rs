//! Geodesic polygons in the base surface.

use crate::base::{wrap_angle, BaseKind, BasePoint, BaseSurface};
use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct BasePolygon {
    pub base: BaseSurface,
    pub vertices: Vec<BasePoint>,
    /// `side_lengths[i]` is the length of the side from vertex `i` to `i + 1`.
    pub side_lengths: Vec<f64>,
    pub interior_angles: Vec<f64>,
    /// Positive when the vertex order is the positive orientation of `base`.
    pub oriented_area: f64,
}

impl BasePolygon {
    pub fn from_vertices(base: BaseSurface, vertices: Vec<BasePoint>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Degenerate("polygon needs at least 3 vertices".into()));
        }
        for v in &vertices {
            base.check(*v)?;
        }
        let side_lengths: Vec<f64> = (0..n)
            .map(|i| base.distance(vertices[i], vertices[(i + 1) % n]))
            .collect();
        if side_lengths.iter().any(|&l| !(l > 1e-14)) {
            return Err(Error::Degenerate("polygon has a zero-length side".into()));
        }
        let turns: Vec<f64> = (0..n)
            .map(|i| {
                let prev = vertices[(i + n - 1) % n];
                let next = vertices[(i + 1) % n];
                let incoming = base.arrival_direction(prev, vertices[i]);
                let outgoing = base.direction(vertices[i], next);
                base.signed_turn(incoming, outgoing)
            })
            .collect();
        let total: f64 = turns.iter().sum();
        let sigma = if total >= 0.0 { 1.0 } else { -1.0 };
        let interior_angles: Vec<f64> = turns.iter().map(|t| PI - sigma * t).collect();
        let area = match base.kind {
            BaseKind::Flat => {
                let mut s = 0.0;
                for i in 0..n {
                    let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                    s += p.x * q.y - p.y * q.x;
                }
                0.5 * s.abs()
            }
            BaseKind::Hyperbolic { m } => {
                let sum: f64 = interior_angles.iter().sum();
                ((n as f64 - 2.0) * PI - sum) / m
            }
        };
        Ok(BasePolygon {
            base,
            vertices,
            side_lengths,
            interior_angles,
            oriented_area: sigma * area,
        })
    }

    pub fn area(&self) -> f64 {
        self.oriented_area.abs()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_convex(&self) -> bool {
        self.interior_angles.iter().all(|&a| a < PI)
    }

    pub fn perimeter(&self) -> f64 {
        self.side_lengths.iter().sum()
    }

    /// Same polygon with the vertex order reversed.
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        BasePolygon::from_vertices(self.base, v).expect("reversal of a valid polygon")
    }

    /// Area from a Green-type boundary integral, evaluated with composite
    /// Gauss–Legendre quadrature along each geodesic side. Independent of the
    /// angle-defect formula used for `oriented_area`.
    pub fn integrated_area(&self, nodes_per_side: usize) -> f64 {
        let n = self.vertices.len();
        let mut total = 0.0;
        let (gx, gw) = gauss_legendre_5();
        for i in 0..n {
            let arc = crate::base::GeodesicArc::between(
                self.base,
                self.vertices[i],
                self.vertices[(i + 1) % n],
            );
            let h = arc.length / nodes_per_side as f64;
            for k in 0..nodes_per_side {
                for (x, w) in gx.iter().zip(gw.iter()) {
                    let s = (k as f64 + 0.5 + 0.5 * x) * h;
                    let (q, v) = crate::base::PlaneCurve::eval(&arc, s);
                    let integrand = match self.base.kind {
                        BaseKind::Flat => 0.5 * (q.x * v.y - q.y * v.x),
                        BaseKind::Hyperbolic { m } => v.x / (m * q.y),
                    };
                    total += 0.5 * h * w * integrand;
                }
            }
        }
        self.base.orientation * total
    }
}

fn gauss_legendre_5() -> ([f64; 5], [f64; 5]) {
    let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
    ([-b, -a, 0.0, a, b], [wb, wa, 128.0 / 225.0, wa, wb])
}

/// Polygon obtained from a chain of geodesic edges. The chain starts at the
/// origin of the base heading in direction `start_angle`; `lengths[i]` is the
/// length of edge `i` and `angles[i]` the interior angle between edges `i` and
/// `i + 1`. The chain is closed by a geodesic back to the start and traversed
/// in the positive orientation of `base`.
pub fn polygon_from_chain(
    base: BaseSurface,
    start_angle: f64,
    lengths: &[f64],
    angles: &[f64],
) -> Result<BasePolygon> {
    if lengths.is_empty() || angles.len() + 1 != lengths.len() {
        return Err(Error::Invalid(
            "need n edge lengths and n - 1 interior angles".into(),
        ));
    }
    if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::Degenerate("edge lengths must be positive".into()));
    }
    if angles.iter().any(|&a| !(a > 0.0 && a < PI)) {
        return Err(Error::Degenerate("angles must lie in (0, π)".into()));
    }
    let mut verts = vec![base.origin()];
    let mut p = base.origin();
    let mut heading = start_angle;
    for (i, &l) in lengths.iter().enumerate() {
        let (q, arrival) = base.exp(p, heading, l);
        base.check(q)?;
        verts.push(q);
        p = q;
        if i < angles.len() {
            let back = arrival + PI;
            heading = wrap_angle(back - base.orientation * angles[i]);
        }
    }
    if lengths.len() == 1 {
        return Err(Error::Degenerate("a single edge does not bound a polygon".into()));
    }
    BasePolygon::from_vertices(base, verts)
}

/// Triangle from two sides `a`, `b` enclosing `angle` (side-angle-side).
/// Vertex 0 is the hinge apex at the base origin.
pub fn base_polygon_from_hinge(kappa_base: f64, lengths: &[f64], angles: &[f64]) -> Result<BasePolygon> {
    let base = BaseSurface::from_curvature(kappa_base)?;
    hinge_polygon(base, lengths, angles)
}

pub(crate) fn hinge_polygon(base: BaseSurface, lengths: &[f64], angles: &[f64]) -> Result<BasePolygon> {
    if lengths.len() != 2 || angles.len() != 1 {
        return Err(Error::Invalid("a hinge has two lengths and one angle".into()));
    }
    let (a, b, ang) = (lengths[0], lengths[1], angles[0]);
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Degenerate("hinge lengths must be positive".into()));
    }
    if !(ang > 0.0 && ang < PI) {
        return Err(Error::Degenerate("hinge angle must lie in (0, π)".into()));
    }
    let o = base.origin();
    let pa = base.exp(o, 0.0, a).0;
    let pb = base.exp(o, base.orientation * ang, b).0;
    base.check(pa)?;
    base.check(pb)?;
    BasePolygon::from_vertices(base, vec![o, pa, pb])
}

/// Hyperbolic triangle with prescribed angles (angle-angle-angle), built as a
/// hinge whose sides come from the dual law of cosines. Flat bases are not
/// determined by angles alone; there the side opposite `angles[0]` is 1.
pub fn triangle_from_angles(base: BaseSurface, angles: [f64; 3]) -> Result<BasePolygon> {
    let [al, be, ga] = angles;
    if angles.iter().any(|&a| !(a > 0.0 && a < PI)) {
        return Err(Error::Degenerate("angles must lie in (0, π)".into()));
    }
    match base.kind {
        BaseKind::Hyperbolic { m } => {
            if al + be + ga >= PI {
                return Err(Error::Degenerate("angle sum must be below π".into()));
            }
            // sides adjacent to the apex with angle `al`
            let side = |x: f64, y: f64, z: f64| ((x.cos() + y.cos() * z.cos()) / (y.sin() * z.sin())).acosh();
            let c = side(ga, al, be) / m.sqrt();
            let b = side(be, al, ga) / m.sqrt();
            hinge_polygon(base, &[c, b], &[al])
        }
        BaseKind::Flat => {
            if ((al + be + ga) - PI).abs() > 1e-12 {
                return Err(Error::Degenerate("flat triangle angles must sum to π".into()));
            }
            let c = ga.sin() / al.sin();
            let b = be.sin() / al.sin();
            hinge_polygon(base, &[c, b], &[al])
        }
    }
}

impl BasePolygon {
    /// Vertices in a geodesic chart centred at the first vertex, where the
    /// sides are straight segments.
    pub fn chart_vertices(&self) -> (crate::chart::KleinChart, Vec<BasePoint>) {
        let chart = crate::chart::KleinChart::new(self.base, self.vertices[0]);
        let v = self.vertices.iter().map(|&q| chart.to_chart(q)).collect();
        (chart, v)
    }

    /// Whether `q` lies inside the polygon (boundary points are unspecified).
    pub fn contains(&self, q: BasePoint) -> bool {
        if self.base.check(q).is_err() {
            return false;
        }
        let (chart, v) = self.chart_vertices();
        crate::chart::winding_number(&v, chart.to_chart(q)) != 0
    }

    /// Whether the sides only meet at shared vertices.
    pub fn is_simple(&self) -> bool {
        crate::chart::is_simple_polygon(&self.chart_vertices().1)
    }
}
