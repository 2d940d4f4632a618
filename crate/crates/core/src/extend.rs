//! Graph-level audits of a solved section: the slope bound away from the
//! vertical segments and Schwarz reflection across boundary geodesics.

use crate::base::BasePoint;
use crate::chart::{orient2d, KleinChart};
use crate::contours::BoundaryData;
use crate::error::{Error, Result};
use crate::isometry::Isometry;
use crate::mesh::{Mesh, NodeKind};
use crate::polygon::BasePolygon;
use crate::solver::DiscreteGraph;
use crate::space::{Model, ModelPoint};
use nalgebra::{Matrix2, Vector2, Vector3};

/// Slope of one triangle of the section.
#[derive(Debug, Clone, Copy)]
pub struct TriangleSlope {
    pub triangle: usize,
    pub centroid: BasePoint,
    /// Tangent of the angle between the triangle and the horizontal
    /// distribution, in a metric-orthonormal frame; infinite when folded.
    pub slope: f64,
    pub folded: bool,
}

fn chart_gradient(mesh: &Mesh, t: usize, heights: &[f64]) -> (BasePoint, f64, Vector2<f64>) {
    let tri = mesh.triangles[t];
    let k = tri.map(|i| mesh.chart_points[i]);
    let twice = orient2d(k[0], k[1], k[2]);
    let u = tri.map(|i| heights[i]);
    let gx = (u[0] * (k[1].y - k[2].y) + u[1] * (k[2].y - k[0].y) + u[2] * (k[0].y - k[1].y)) / twice;
    let gy = (u[0] * (k[2].x - k[1].x) + u[1] * (k[0].x - k[2].x) + u[2] * (k[1].x - k[0].x)) / twice;
    ((k[0] + k[1] + k[2]) / 3.0, twice, Vector2::new(gx, gy))
}

/// Slope of every triangle, measured at its chart centroid.
pub fn triangle_slopes(graph: &DiscreteGraph) -> Vec<TriangleSlope> {
    let model = graph.model();
    let mesh = &graph.mesh;
    (0..mesh.triangles.len())
        .map(|t| {
            let (kc, twice, g) = chart_gradient(mesh, t, &graph.heights);
            let Ok((q, jac)) = mesh.chart.from_chart_jacobian(kc) else {
                return TriangleSlope { triangle: t, centroid: kc, slope: f64::INFINITY, folded: true };
            };
            if !(twice > 0.0) || !(jac.determinant() > 0.0) {
                return TriangleSlope { triangle: t, centroid: q, slope: f64::INFINITY, folded: true };
            }
            let inv_t: Matrix2<f64> = match jac.try_inverse() {
                Some(inv) => inv.transpose(),
                None => return TriangleSlope { triangle: t, centroid: q, slope: f64::INFINITY, folded: true },
            };
            let fr = model.frame(q.x, q.y);
            let p = inv_t * g + fr.a;
            let slope = p.norm() / fr.b.sqrt();
            TriangleSlope { triangle: t, centroid: q, slope: if slope.is_finite() { slope } else { f64::INFINITY }, folded: false }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct TangencyReport {
    pub holds: bool,
    pub cap: f64,
    pub max_slope: f64,
    /// Centroid of the steepest checked triangle.
    pub location: BasePoint,
    pub folded: usize,
    pub checked: usize,
}

/// Whether the section stays a graph with slope below `cap` outside the base
/// balls of radius `exclusion` about the jump vertices.
pub fn vertical_tangency_check(graph: &DiscreteGraph, cap: f64, exclusion: f64) -> TangencyReport {
    let mesh = &graph.mesh;
    let base = mesh.polygon.base;
    let jumps: Vec<BasePoint> = (0..mesh.polygon.len())
        .filter(|&v| mesh.corner_nodes(v).len() > 1)
        .map(|v| mesh.polygon.vertices[v])
        .collect();
    let mut report = TangencyReport {
        holds: true,
        cap,
        max_slope: 0.0,
        location: mesh.points.first().copied().unwrap_or(BasePoint::new(0.0, 0.0)),
        folded: 0,
        checked: 0,
    };
    for s in triangle_slopes(graph) {
        if s.folded {
            report.folded += 1;
            report.holds = false;
            continue;
        }
        if jumps.iter().any(|&v| base.distance(v, s.centroid) < exclusion) {
            continue;
        }
        report.checked += 1;
        if !(s.slope <= report.max_slope) {
            report.max_slope = s.slope;
            report.location = s.centroid;
        }
    }
    if !(report.max_slope <= cap) {
        report.holds = false;
    }
    report
}

/// Boundary geodesic of a solved piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSelector {
    /// Lifted horizontal side starting at this polygon vertex.
    Side(usize),
    /// Vertical segment over this jump vertex.
    Vertical(usize),
}

#[derive(Debug, Clone)]
pub struct ReflectedPiece {
    pub isometry: Isometry,
    pub graph: DiscreteGraph,
    /// Nodes on the selected edge; their images are themselves.
    pub edge_nodes: Vec<usize>,
    /// Largest displacement of an edge node.
    pub continuity: f64,
    /// Largest angle between the tangent planes of matched triangles along
    /// the edge; for a vertical edge the triangles at the vertex.
    pub normal_gap: f64,
}

/// The isometry fixing a boundary geodesic pointwise.
pub fn edge_half_turn(data: &BoundaryData, selector: EdgeSelector) -> Result<Isometry> {
    let poly = &data.polygon;
    let m = poly.len();
    let not_geodesic = || Error::Invalid(format!("{selector:?} is not a geodesic of the contour"));
    match selector {
        EdgeSelector::Side(i) => {
            if i >= m {
                return Err(not_geodesic());
            }
            let side = &data.sides[i];
            let p = poly.vertices[side.start];
            let q = poly.vertices[side.end];
            let angle = poly.base.direction(p, q);
            Ok(Isometry::half_turn_horizontal(data.model, &ModelPoint::new(p.x, p.y, side.start_height), angle))
        }
        EdgeSelector::Vertical(v) => {
            if v >= m || data.jump_at(v).is_none() {
                return Err(not_geodesic());
            }
            Ok(Isometry::half_turn_vertical(data.model, poly.vertices[v]))
        }
    }
}

fn edge_nodes(mesh: &Mesh, data: &BoundaryData, selector: EdgeSelector) -> Vec<usize> {
    let m = data.polygon.len();
    (0..mesh.len())
        .filter(|&i| match (selector, mesh.kinds[i]) {
            (EdgeSelector::Side(s), NodeKind::Side(k)) => k == s,
            (EdgeSelector::Side(s), NodeKind::Corner { vertex, side }) => match side {
                Some(k) => k == s,
                None => vertex == s || vertex == (s + 1) % m,
            },
            (EdgeSelector::Vertical(v), NodeKind::Corner { vertex, .. }) => vertex == v,
            _ => false,
        })
        .collect()
}

fn tangent_normal(model: &Model, a: &ModelPoint, b: &ModelPoint, c: &ModelPoint, at: &ModelPoint) -> Vector3<f64> {
    let n = (b - a).cross(&(c - a));
    let v = model.inverse_metric(at) * n;
    v / n.dot(&v).max(1e-300).sqrt()
}

/// Apply an isometry to a section. The chart is recentred at the image of
/// the old centre, so the image is again a section over its own chart.
pub fn transform_graph(graph: &DiscreteGraph, iso: &Isometry) -> Result<DiscreteGraph> {
    let mesh = &graph.mesh;
    let images: Vec<ModelPoint> = (0..mesh.len()).map(|i| iso.apply(&graph.point(i))).collect();
    let c = mesh.chart.centre;
    let centre = iso.apply(&ModelPoint::new(c.x, c.y, 0.0));
    let chart = KleinChart::new(mesh.chart.base, BasePoint::new(centre.x, centre.y));
    let points: Vec<BasePoint> = images.iter().map(|p| BasePoint::new(p.x, p.y)).collect();
    let chart_points: Vec<BasePoint> = points.iter().map(|&q| chart.to_chart(q)).collect();
    let flip = !iso.base_map.preserves_orientation();
    let triangles: Vec<[usize; 3]> = mesh
        .triangles
        .iter()
        .map(|t| if flip { [t[1], t[0], t[2]] } else { *t })
        .collect();
    if triangles
        .iter()
        .any(|t| !(orient2d(chart_points[t[0]], chart_points[t[1]], chart_points[t[2]]) > 0.0))
    {
        return Err(Error::Numerical("transformed mesh has inverted triangles".into()));
    }
    let vertices: Vec<BasePoint> = mesh.polygon.vertices.iter().map(|&q| iso.base_map.apply(q)).collect();
    let polygon = BasePolygon::from_vertices(mesh.polygon.base, vertices)?;
    Ok(DiscreteGraph {
        space: graph.space,
        mesh: Mesh {
            chart,
            chart_points,
            points,
            triangles,
            kinds: mesh.kinds.clone(),
            polygon,
            level: mesh.level,
        },
        heights: images.iter().map(|p| p.z).collect(),
    })
}

/// Schwarz reflection of a solved piece across a boundary geodesic.
pub fn reflect_extend(graph: &DiscreteGraph, data: &BoundaryData, selector: EdgeSelector) -> Result<ReflectedPiece> {
    let iso = edge_half_turn(data, selector)?;
    let image = transform_graph(graph, &iso)?;
    let nodes = edge_nodes(&graph.mesh, data, selector);
    let continuity = nodes
        .iter()
        .map(|&i| {
            let (p, q) = (graph.point(i), image.point(i));
            (q - p).norm()
        })
        .fold(0.0, f64::max);
    let model = graph.model();
    let mut normal_gap: f64 = 0.0;
    for (t, tri) in graph.mesh.triangles.iter().enumerate() {
        let on_edge = tri.iter().filter(|i| nodes.contains(i)).count();
        let needed = match selector {
            EdgeSelector::Side(_) => 2,
            EdgeSelector::Vertical(_) => 1,
        };
        if on_edge < needed {
            continue;
        }
        let e: Vec<usize> = tri.iter().copied().filter(|i| nodes.contains(i)).collect();
        let at = if e.len() >= 2 {
            let (a, b) = (graph.point(e[0]), graph.point(e[1]));
            (a + b) / 2.0
        } else {
            graph.point(e[0])
        };
        let [a, b, c] = tri.map(|i| graph.point(i));
        let [ra, rb, rc] = image.mesh.triangles[t].map(|i| image.point(i));
        let n0 = tangent_normal(&model, &a, &b, &c, &at);
        let n1 = tangent_normal(&model, &ra, &rb, &rc, &at);
        let cos = model.inner(&at, &n0, &n1).abs().min(1.0);
        normal_gap = normal_gap.max(cos.acos());
    }
    Ok(ReflectedPiece { isometry: iso, graph: image, edge_nodes: nodes, continuity, normal_gap })
}
