//! Triangulations of base polygons in a geodesic chart.
//!
//! Meshes live in a [`KleinChart`], so polygon sides and all mesh edges are
//! base geodesics, and uniform refinement is nested.

use crate::base::BasePoint;
use crate::chart::{orient2d, KleinChart};
use crate::contours::BoundaryData;
use crate::error::{Error, Result};
use crate::polygon::BasePolygon;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    /// Interior point of polygon side `i`.
    Side(usize),
    /// Polygon vertex; `side` is set on the copies of a jump vertex and names
    /// the side whose trace the copy carries.
    Corner { vertex: usize, side: Option<usize> },
}

impl NodeKind {
    pub fn is_boundary(&self) -> bool {
        !matches!(self, NodeKind::Interior)
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub chart: KleinChart,
    pub chart_points: Vec<BasePoint>,
    pub points: Vec<BasePoint>,
    /// Counterclockwise in the chart.
    pub triangles: Vec<[usize; 3]>,
    pub kinds: Vec<NodeKind>,
    /// Polygon the mesh covers, positively oriented in the base.
    pub polygon: BasePolygon,
    pub level: usize,
}

/// Unrefined triangulation in chart coordinates.
#[derive(Debug, Clone)]
pub struct MacroMesh {
    pub chart: KleinChart,
    pub points: Vec<BasePoint>,
    pub triangles: Vec<[usize; 3]>,
    pub polygon: BasePolygon,
}

impl MacroMesh {
    /// Macro mesh from base points; triangles are reoriented counterclockwise
    /// in the chart.
    pub fn new(chart: KleinChart, base_points: &[BasePoint], triangles: Vec<[usize; 3]>, polygon: BasePolygon) -> Result<Self> {
        let points: Vec<BasePoint> = base_points.iter().map(|&q| chart.to_chart(q)).collect();
        let mut tris = Vec::with_capacity(triangles.len());
        for t in triangles {
            let o = orient2d(points[t[0]], points[t[1]], points[t[2]]);
            if o.abs() < 1e-14 {
                return Err(Error::Degenerate("flat macro triangle".into()));
            }
            tris.push(if o > 0.0 { t } else { [t[0], t[2], t[1]] });
        }
        Ok(MacroMesh {
            chart,
            points,
            triangles: tris,
            polygon,
        })
    }

    /// Ear-clipping triangulation of a simple polygon.
    pub fn from_polygon(polygon: &BasePolygon) -> Result<Self> {
        if !polygon.is_simple() {
            return Err(Error::Invalid("polygon is self-intersecting".into()));
        }
        let chart = KleinChart::new(polygon.base, polygon.vertices[0]);
        let flat: Vec<f64> = polygon
            .vertices
            .iter()
            .flat_map(|&q| {
                let k = chart.to_chart(q);
                [k.x, k.y]
            })
            .collect();
        let idx = earcutr::earcut(&flat, &[], 2).map_err(|e| Error::Degenerate(format!("ear clipping failed: {e:?}")))?;
        if idx.len() != 3 * (polygon.len() - 2) {
            return Err(Error::Degenerate("ear clipping lost triangles".into()));
        }
        let tris = idx.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        MacroMesh::new(chart, &polygon.vertices, tris, polygon.clone())
    }
}

/// Uniform refinement of a macro mesh, `level` times 1 → 4 splitting.
pub fn refine(mac: &MacroMesh, level: usize) -> Result<Mesh> {
    let mut pts = mac.points.clone();
    let mut tris = mac.triangles.clone();
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(4 * tris.len());
        let mut midpoint = |a: usize, b: usize, pts: &mut Vec<BasePoint>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                pts.push(0.5 * (pts[key.0] + pts[key.1]));
                pts.len() - 1
            })
        };
        for t in &tris {
            let ab = midpoint(t[0], t[1], &mut pts);
            let bc = midpoint(t[1], t[2], &mut pts);
            let ca = midpoint(t[2], t[0], &mut pts);
            next.push([t[0], ab, ca]);
            next.push([ab, t[1], bc]);
            next.push([ca, bc, t[2]]);
            next.push([ab, bc, ca]);
        }
        tris = next;
    }
    let mut base_pts = Vec::with_capacity(pts.len());
    for &k in &pts {
        base_pts.push(mac.chart.from_chart(k)?);
    }
    let mut mesh = Mesh {
        chart: mac.chart,
        chart_points: pts,
        points: base_pts,
        triangles: tris,
        kinds: Vec::new(),
        polygon: mac.polygon.clone(),
        level,
    };
    mesh.classify()?;
    Ok(mesh)
}

/// Conforming triangulation of a simple polygon whose edges are at most `h`
/// long in the base metric.
pub fn triangulate(polygon: &BasePolygon, h: f64) -> Result<Mesh> {
    if !(h > 0.0) {
        return Err(Error::Invalid("mesh size must be positive".into()));
    }
    let mac = MacroMesh::from_polygon(polygon)?;
    for level in 0..12 {
        let mesh = refine(&mac, level)?;
        if mesh.max_edge_length() <= h {
            return Ok(mesh);
        }
    }
    Err(Error::Invalid(format!("mesh size {h} needs too many refinements")))
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_edge_length(&self) -> f64 {
        let base = self.polygon.base;
        self.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| base.distance(self.points[a], self.points[b]))
            .fold(0.0, f64::max)
    }

    /// Signed chart area of a triangle (positive for every triangle).
    pub fn chart_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * orient2d(self.chart_points[a], self.chart_points[b], self.chart_points[c])
    }

    fn polygon_chart(&self) -> Vec<BasePoint> {
        self.polygon.vertices.iter().map(|&q| self.chart.to_chart(q)).collect()
    }

    fn classify(&mut self) -> Result<()> {
        let n = self.chart_points.len();
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut on_boundary = vec![false; n];
        for (&(a, b), &c) in &edge_count {
            if c == 1 {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        let poly = self.polygon_chart();
        let m = poly.len();
        let mut kinds = vec![NodeKind::Interior; n];
        for i in 0..n {
            if !on_boundary[i] {
                continue;
            }
            let k = self.chart_points[i];
            if let Some(v) = poly.iter().position(|p| (p - k).norm() < 1e-12) {
                kinds[i] = NodeKind::Corner { vertex: v, side: None };
                continue;
            }
            let mut found = None;
            for s in 0..m {
                let (a, b) = (poly[s], poly[(s + 1) % m]);
                let len2 = (b - a).norm_squared();
                let t = (k - a).dot(&(b - a)) / len2;
                if t > 0.0 && t < 1.0 && orient2d(a, b, k).abs() < 1e-10 * len2 {
                    found = Some(s);
                    break;
                }
            }
            match found {
                Some(s) => kinds[i] = NodeKind::Side(s),
                None => {
                    return Err(Error::Degenerate(format!(
                        "boundary node {i} is not on the polygon boundary"
                    )))
                }
            }
        }
        self.kinds = kinds;
        Ok(())
    }

    /// Node at polygon vertex `v` (before duplication).
    pub fn corner_node(&self, v: usize) -> Option<usize> {
        self.kinds
            .iter()
            .position(|k| matches!(k, NodeKind::Corner { vertex, side: None } if *vertex == v))
    }

    /// Nodes at polygon vertex `v`, including jump copies.
    pub fn corner_nodes(&self, v: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| matches!(self.kinds[i], NodeKind::Corner { vertex, .. } if vertex == v))
            .collect()
    }

    /// Split polygon vertex `v` into two nodes, one carrying the trace of the
    /// incoming side and one that of the outgoing side. The triangles around
    /// the vertex are divided at the middle of the fan.
    pub fn duplicate_corner(&mut self, v: usize) -> Result<(usize, usize)> {
        let node = self
            .corner_node(v)
            .ok_or_else(|| Error::Invalid(format!("no undivided node at vertex {v}")))?;
        let m = self.polygon.len();
        let incoming_side = (v + m - 1) % m;
        let outgoing_side = v;
        let poly = self.polygon_chart();
        let c = poly[v];
        let to_next = poly[(v + 1) % m] - c;
        let to_prev = poly[(v + m - 1) % m] - c;
        // counterclockwise sweep in the chart from one side to the other
        let ccw_from_next = orient2d(c, poly[(v + 1) % m], poly[(v + m - 1) % m]) > 0.0;
        let (start, end) = if ccw_from_next { (to_next, to_prev) } else { (to_prev, to_next) };
        let total = angle_ccw(start, end);
        let copy = self.chart_points.len();
        self.chart_points.push(self.chart_points[node]);
        self.points.push(self.points[node]);
        self.kinds.push(NodeKind::Corner { vertex: v, side: Some(incoming_side) });
        self.kinds[node] = NodeKind::Corner { vertex: v, side: Some(outgoing_side) };
        for t in 0..self.triangles.len() {
            let tri = self.triangles[t];
            let Some(pos) = tri.iter().position(|&i| i == node) else { continue };
            let centroid = (self.chart_points[tri[0]] + self.chart_points[tri[1]] + self.chart_points[tri[2]]) / 3.0;
            let frac = angle_ccw(start, centroid - c) / total;
            // the half of the fan next to the incoming side gets the copy
            let near_start = frac < 0.5;
            let near_incoming = if ccw_from_next { !near_start } else { near_start };
            if near_incoming {
                self.triangles[t][pos] = copy;
            }
        }
        Ok((copy, node))
    }

    /// Triangles using node `i`.
    pub fn star(&self, i: usize) -> Vec<usize> {
        (0..self.triangles.len())
            .filter(|&t| self.triangles[t].contains(&i))
            .collect()
    }

    /// Node adjacency lists.
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for t in &self.triangles {
            for a in 0..3 {
                for b in 0..3 {
                    if a != b && !adj[t[a]].contains(&t[b]) {
                        adj[t[a]].push(t[b]);
                    }
                }
            }
        }
        adj
    }

    /// Triangle containing the base point `q` and barycentric coordinates.
    pub fn locate(&self, q: BasePoint) -> Option<(usize, [f64; 3])> {
        let k = self.chart.to_chart(q);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for (t, tri) in self.triangles.iter().enumerate() {
            let (a, b, c) = (self.chart_points[tri[0]], self.chart_points[tri[1]], self.chart_points[tri[2]]);
            let d = orient2d(a, b, c);
            let l0 = orient2d(k, b, c) / d;
            let l1 = orient2d(a, k, c) / d;
            let l2 = 1.0 - l0 - l1;
            let worst = l0.min(l1).min(l2);
            if worst >= 0.0 {
                return Some((t, [l0, l1, l2]));
            }
            if best.as_ref().map_or(true, |b| worst > b.2) {
                best = Some((t, [l0, l1, l2], worst));
            }
        }
        best.filter(|b| b.2 > -1e-12).map(|b| (b.0, b.1))
    }

    /// Whether node `i` lies in the chart triangle with the given base vertices.
    pub fn in_base_triangle(&self, i: usize, tri: [BasePoint; 3], tol: f64) -> bool {
        let k = self.chart_points[i];
        let [a, b, c] = tri.map(|q| self.chart.to_chart(q));
        let d = orient2d(a, b, c);
        let l = [orient2d(k, b, c) / d, orient2d(a, k, c) / d, orient2d(a, b, k) / d];
        l.iter().all(|&x| x >= -tol)
    }
}

fn angle_ccw(from: BasePoint, to: BasePoint) -> f64 {
    let a = (from.x * to.y - from.y * to.x).atan2(from.dot(&to));
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// Mesh with Dirichlet tags for `data`: refine `mac` and duplicate every jump
/// vertex. The macro mesh must cover `data.polygon`.
pub fn mesh_for_data(mac: &MacroMesh, level: usize, data: &BoundaryData) -> Result<Mesh> {
    let mut mesh = refine(mac, level)?;
    for j in &data.jumps {
        mesh.duplicate_corner(j.vertex)?;
    }
    Ok(mesh)
}
