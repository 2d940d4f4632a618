//! Truncation ladders on nested meshes and barrier comparisons.

use crate::base::BasePoint;
use crate::contours::{BoundaryData, KnoidSpec, Noid2kContour, Noid2kSpec};
use crate::diagnostics::match_nodes;
use crate::error::{Error, Result};
use crate::mesh::NodeKind;
use crate::plateau::{solve_knoid, solve_noid2k, KnoidSolve, Noid2kSolve};
use crate::reference::{scherk_graph_height, AxisHelicoid, ScherkParams};
use crate::solver::{DiscreteGraph, SolveReport, SolverOptions};
use crate::space::Model;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct LadderReport {
    pub truncations: Vec<f64>,
    /// Node indices of the compact set in each mesh of the ladder.
    pub nodes: Vec<Vec<usize>>,
    pub heights: Vec<Vec<f64>>,
    /// Smallest increment `u_{i+1} - u_i` over the compact set and all steps.
    pub min_increment: f64,
    pub monotone: bool,
    pub sup_differences: Vec<f64>,
    pub cauchy_decreasing: bool,
    /// Geometric extrapolation of the heights on the compact set.
    pub limit: Vec<f64>,
    pub reports: Vec<SolveReport>,
}

/// Ladder audit of solutions on nested meshes; `compact` indexes nodes of the
/// first mesh.
pub fn convergence_ladder(
    truncations: &[f64],
    graphs: &[&DiscreteGraph],
    reports: Vec<SolveReport>,
    compact: &[usize],
    slack: f64,
) -> Result<LadderReport> {
    if graphs.len() != truncations.len() || graphs.is_empty() {
        return Err(Error::Invalid("one solution per truncation is needed".into()));
    }
    if truncations.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("truncations must increase".into()));
    }
    let first = &graphs[0].mesh;
    let nodes: Vec<Vec<usize>> = graphs
        .iter()
        .map(|g| match_nodes(first, compact, &g.mesh))
        .collect::<Result<_>>()?;
    let heights: Vec<Vec<f64>> = graphs
        .iter()
        .zip(&nodes)
        .map(|(g, n)| n.iter().map(|&i| g.heights[i]).collect())
        .collect();
    let mut min_increment = f64::INFINITY;
    let mut sup_differences = Vec::new();
    for w in heights.windows(2) {
        let mut sup = 0.0f64;
        for (a, b) in w[0].iter().zip(&w[1]) {
            min_increment = min_increment.min(b - a);
            sup = sup.max((b - a).abs());
        }
        sup_differences.push(sup);
    }
    let cauchy_decreasing = sup_differences.windows(2).all(|w| w[1] < w[0] || w[1] <= 1e-14);
    let last = heights.last().unwrap();
    let limit = match sup_differences.len() {
        n if n >= 2 => {
            let ratio = sup_differences[n - 1] / sup_differences[n - 2];
            let prev = &heights[heights.len() - 2];
            if ratio < 1.0 {
                last.iter()
                    .zip(prev)
                    .map(|(u, p)| u + (u - p) * ratio / (1.0 - ratio))
                    .collect()
            } else {
                last.clone()
            }
        }
        _ => last.clone(),
    };
    Ok(LadderReport {
        truncations: truncations.to_vec(),
        nodes,
        heights,
        min_increment: if min_increment.is_finite() { min_increment } else { 0.0 },
        monotone: min_increment >= -slack || !min_increment.is_finite(),
        sup_differences,
        cauchy_decreasing,
        limit,
        reports,
    })
}

/// k-noid solves for each truncation on nested meshes, run concurrently.
pub fn knoid_ladder_solves(spec: &KnoidSpec, truncations: &[f64], level: usize, options: &SolverOptions) -> Result<Vec<KnoidSolve>> {
    truncations
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let s = KnoidSpec { r, ..*spec };
            solve_knoid(&s, &truncations[..=i], level, options)
        })
        .collect()
}

/// 2k-noid solves for each truncation on nested meshes, run concurrently.
pub fn noid2k_ladder_solves(spec: &Noid2kSpec, truncations: &[f64], level: usize, options: &SolverOptions) -> Result<Vec<Noid2kSolve>> {
    truncations
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let s = Noid2kSpec { n, ..*spec };
            solve_noid2k(&s, 0.0, 0.0, &truncations[..=i], level, options)
        })
        .collect()
}

/// Nodes of a k-noid mesh inside the hinge triangle with sides `a` and
/// `radius`, leaving out the copies of jump vertices.
pub fn knoid_compact(spec: &KnoidSpec, graph: &DiscreteGraph, radius: f64) -> Vec<usize> {
    let base = spec.space.base();
    let p0 = spec.apex();
    let (ta, tr) = spec.hinge_angles();
    let tri = [p0, base.exp(p0, ta, spec.a).0, base.exp(p0, tr, radius).0];
    (0..graph.mesh.len())
        .filter(|&i| !matches!(graph.mesh.kinds[i], NodeKind::Corner { side: Some(_), .. }))
        .filter(|&i| graph.mesh.in_base_triangle(i, tri, 1e-12))
        .collect()
}

pub fn knoid_ladder(spec: &KnoidSpec, truncations: &[f64], level: usize, options: &SolverOptions, radius: f64) -> Result<(Vec<KnoidSolve>, LadderReport)> {
    let solves = knoid_ladder_solves(spec, truncations, level, options)?;
    let first_spec = KnoidSpec { r: truncations[0], ..*spec };
    let compact = knoid_compact(&first_spec, &solves[0].graph, radius);
    let graphs: Vec<&DiscreteGraph> = solves.iter().map(|s| &s.graph).collect();
    let reports = solves.iter().map(|s| s.report.clone()).collect();
    let report = convergence_ladder(truncations, &graphs, reports, &compact, 1e-8)?;
    Ok((solves, report))
}

/// Interior nodes of a 2k-noid mesh within `radius` of `p̂₁` and at least
/// `clearance` away from `p̂`.
pub fn noid2k_compact(spec: &Noid2kSpec, graph: &DiscreteGraph, radius: f64, clearance: f64) -> Vec<usize> {
    let base = spec.space.base();
    let p1 = base.origin();
    let ph = base.exp(p1, spec.first_angle() + base.orientation * spec.alpha, spec.d).0;
    graph
        .interior_nodes()
        .into_iter()
        .filter(|&i| {
            let q = graph.mesh.points[i];
            base.distance(q, p1) <= radius && base.distance(q, ph) >= clearance
        })
        .collect()
}

pub fn noid2k_ladder(
    spec: &Noid2kSpec,
    truncations: &[f64],
    level: usize,
    options: &SolverOptions,
    radius: f64,
    clearance: f64,
) -> Result<(Vec<Noid2kSolve>, LadderReport)> {
    let solves = noid2k_ladder_solves(spec, truncations, level, options)?;
    let compact = noid2k_compact(spec, &solves[0].graph, radius, clearance);
    let graphs: Vec<&DiscreteGraph> = solves.iter().map(|s| &s.graph).collect();
    let reports = solves.iter().map(|s| s.report.clone()).collect();
    let report = convergence_ladder(truncations, &graphs, reports, &compact, 1e-8)?;
    Ok((solves, report))
}

/// Minimal graph diverging to `+∞` along a base geodesic.
#[derive(Debug, Clone, Copy)]
pub enum Barrier {
    Scherk(ScherkParams),
    Helicoid(AxisHelicoid),
}

impl Barrier {
    pub fn height(&self, q: BasePoint) -> Option<f64> {
        match self {
            Barrier::Scherk(p) => scherk_graph_height(p, q).ok().flatten().filter(|z| z.is_finite()),
            Barrier::Helicoid(h) => h.height(q),
        }
    }

    /// Barrier diverging along the geodesic through `p` and `q`, defined on
    /// the side containing `inside`. In the flat case the strip of the
    /// helicoid is wide enough to contain every point of `cover`.
    pub fn along(space: crate::SpaceParams, p: BasePoint, q: BasePoint, inside: BasePoint, cover: &[BasePoint]) -> Result<Self> {
        let model = space.model();
        let base = model.base();
        // the standard graphs live clockwise of their divergence direction
        let turn = crate::base::wrap_angle(base.direction(p, inside) - base.direction(p, q));
        let (p, q) = if turn < 0.0 { (p, q) } else { (q, p) };
        match model {
            Model::HalfPlane { .. } => {
                let angle = base.direction(p, q);
                Ok(Barrier::Scherk(ScherkParams::new(space)?.placed(p, angle, 0.0)))
            }
            Model::Euclidean => {
                let e = (q - p).normalize();
                let n = BasePoint::new(e.y, -e.x);
                let depth = cover.iter().map(|c| (c - p).dot(&n)).fold(0.0, f64::max);
                let front = cover.iter().map(|c| (c - p).dot(&e)).fold(0.0, f64::max);
                let pitch = 1.25 * 2.0 * depth.max(1e-3) / std::f64::consts::PI;
                let half = 0.5 * std::f64::consts::PI * pitch;
                // local x' = half - (distance to the line), y' = (origin - q)·e > 0
                let origin = p + n * half + e * (front + 1.0);
                Ok(Barrier::Helicoid(AxisHelicoid {
                    origin,
                    angle: (-n.y).atan2(-n.x),
                    pitch,
                    shift: 0.0,
                }))
            }
            Model::Heisenberg { .. } => Err(Error::Unsupported(
                "no divergent barrier graph is available when tau != 0 and kappa + 4H^2 = 0".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BarrierCheck {
    pub shift: f64,
    /// Smallest `barrier + shift - u` over the checked nodes.
    pub worst_margin: f64,
    pub checked: usize,
    pub holds: bool,
}

/// Compare `graph` at `nodes` against `barrier + shift`.
pub fn barrier_check(graph: &DiscreteGraph, nodes: &[usize], barrier: &Barrier, shift: f64, slack: f64) -> BarrierCheck {
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for &i in nodes {
        if let Some(b) = barrier.height(graph.mesh.points[i]) {
            checked += 1;
            worst = worst.min(b + shift - graph.heights[i]);
        }
    }
    BarrierCheck {
        shift,
        worst_margin: worst,
        checked,
        holds: worst >= -slack,
    }
}

/// Barrier for the k-noid ladder over `Δ_radius`: diverges along the side
/// `A → R` of the smallest triangle and is shifted down until it lies above
/// the lifted hinge, which is common to every truncation.
pub fn knoid_barrier(spec: &KnoidSpec, radius: f64) -> Result<(Barrier, f64)> {
    let space = spec.space;
    let model = space.model();
    let base = space.base();
    let p0 = spec.apex();
    let (ta, tr) = spec.hinge_angles();
    let a = base.exp(p0, ta, spec.a).0;
    let r = base.exp(p0, tr, radius).0;
    let barrier = Barrier::along(space, a, r, p0, &[p0, a, r])?;
    const SAMPLES: usize = 400;
    let mut shift = f64::NEG_INFINITY;
    for end in [a, r] {
        for j in 0..SAMPLES {
            let t = j as f64 / SAMPLES as f64;
            let q = base.exp(p0, base.direction(p0, end), t * base.distance(p0, end)).0;
            let data = model.geodesic_lift(p0, q);
            if let Some(b) = barrier.height(q) {
                shift = shift.max(data - b);
            }
        }
    }
    Ok((barrier, shift))
}

/// Barrier audit of each k-noid ladder solve on the nodes over `Δ_radius`.
pub fn knoid_barrier_checks(spec: &KnoidSpec, solves: &[KnoidSolve], radius: f64, slack: f64) -> Result<Vec<BarrierCheck>> {
    let (barrier, shift) = knoid_barrier(spec, radius)?;
    Ok(solves
        .iter()
        .map(|s| {
            let nodes = knoid_compact(&s.contour.spec, &s.graph, radius);
            barrier_check(&s.graph, &nodes, &barrier, shift, slack)
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct ContainmentCheck {
    /// Smallest `U4 - u` over the nodes.
    pub upper_margin: f64,
    /// Smallest `u - U5` over the nodes.
    pub lower_margin: f64,
    /// Smallest signed distance of a node to the vertical planes over the
    /// geodesics through `p̂₁B` and `p̂₁C`, positive inside.
    pub halfspace_margin: f64,
}

impl ContainmentCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.upper_margin >= -slack && self.lower_margin >= -slack && self.halfspace_margin >= -slack
    }
}

/// Audit of a 2k-noid solution against the umbrella slab at `p4`, `p5` and
/// the vertical halfspaces of the horizontal arcs at `p1`.
pub fn noid2k_containment(contour: &Noid2kContour, data: &BoundaryData, graph: &DiscreteGraph) -> ContainmentCheck {
    let (u4, u5) = contour.umbrellas();
    let base = data.polygon.base;
    let q = &contour.quad.vertices;
    let (p1, b, c) = (q[0], q[1], q[3]);
    let o = base.orientation;
    let dir_b = base.direction(p1, b);
    let dir_c = base.direction(p1, c);
    let mut up = f64::INFINITY;
    let mut low = f64::INFINITY;
    let mut half = f64::INFINITY;
    for (i, &pt) in graph.mesh.points.iter().enumerate() {
        let z = graph.heights[i];
        up = up.min(u4.height_at(pt) - z);
        low = low.min(z - u5.height_at(pt));
        if (pt - p1).norm() > 1e-14 {
            let d = base.direction(p1, pt);
            let dist = base.distance(p1, pt);
            // signed angles measured into the wedge from each side
            let from_b = o * crate::base::wrap_angle(d - dir_b);
            let from_c = -o * crate::base::wrap_angle(d - dir_c);
            let sin = from_b.sin().min(from_c.sin());
            let s = match base.kind {
                crate::base::BaseKind::Flat => sin * dist,
                crate::base::BaseKind::Hyperbolic { m } => {
                    let r = m.sqrt();
                    ((r * dist).sinh() * sin).asinh() / r
                }
            };
            half = half.min(s);
        }
    }
    ContainmentCheck {
        upper_margin: up,
        lower_margin: low,
        halfspace_margin: half,
    }
}
