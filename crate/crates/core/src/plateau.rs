//! Plateau solves for the k-noid and 2k-noid contours on nested meshes.
//!
//! The macro triangles of a truncation fan out from the vertex opposite the
//! growing sides, with intermediate vertices at every ladder stop, so that the
//! mesh of a smaller truncation is a sub-mesh of the mesh of a larger one.

use crate::base::BasePoint;
use crate::chart::KleinChart;
use crate::contours::{
    boundary_heights, knoid_contour, noid2k_contour_translated, BoundaryData, KnoidContour, KnoidSpec,
    Noid2kContour, Noid2kSpec,
};
use crate::error::{Error, Result};
use crate::mesh::{mesh_for_data, MacroMesh, Mesh};
use crate::solver::{solve_graph, DiscreteGraph, SolveReport, SolverOptions};

/// Ladder stops `2, 3, …` below `top`, followed by `top`.
pub fn default_stops(top: f64) -> Vec<f64> {
    let mut s: Vec<f64> = (2..).map(|i| i as f64).take_while(|&x| x < top - 1e-9).collect();
    s.push(top);
    s
}

fn check_stops(stops: &[f64], top: f64) -> Result<()> {
    if stops.is_empty() || (stops[stops.len() - 1] - top).abs() > 1e-12 {
        return Err(Error::Invalid("ladder stops must end at the truncation".into()));
    }
    if stops.windows(2).any(|w| !(w[1] > w[0])) || !(stops[0] > 0.0) {
        return Err(Error::Invalid("ladder stops must increase from a positive value".into()));
    }
    Ok(())
}

fn find_vertex(data: &BoundaryData, q: BasePoint) -> Result<usize> {
    data.polygon
        .vertices
        .iter()
        .position(|v| (v - q).norm() < 1e-12 * (1.0 + q.norm()))
        .ok_or_else(|| Error::Invalid("contour does not match the macro mesh".into()))
}

/// Fan of macro triangles over `Δ_r` from the vertex `A`.
pub fn knoid_macro(spec: &KnoidSpec, data: &BoundaryData, stops: &[f64]) -> Result<MacroMesh> {
    check_stops(stops, spec.r)?;
    let base = spec.space.base();
    let p0 = spec.apex();
    let (ta, tr) = spec.hinge_angles();
    let a = base.exp(p0, ta, spec.a).0;
    let mut pts = vec![p0, a];
    pts.extend(stops.iter().map(|&s| base.exp(p0, tr, s).0));
    let mut tris = vec![[0, 2, 1]];
    for i in 1..stops.len() {
        tris.push([i + 1, i + 2, 1]);
    }
    for v in [p0, a, pts[pts.len() - 1]] {
        find_vertex(data, v)?;
    }
    MacroMesh::new(KleinChart::new(base, p0), &pts, tris, data.polygon.clone())
}

/// Two fans of macro triangles over `Δ_n(d, α)` from the vertex `p̂`.
pub fn noid2k_macro(spec: &Noid2kSpec, data: &BoundaryData, stops: &[f64]) -> Result<MacroMesh> {
    check_stops(stops, spec.n)?;
    let base = spec.space.base();
    let o = base.orientation;
    let p1 = base.origin();
    let t1 = spec.first_angle();
    let ph = base.exp(p1, t1 + o * spec.alpha, spec.d).0;
    let mut pts = vec![p1, ph];
    let nb = stops.len();
    pts.extend(stops.iter().map(|&s| base.exp(p1, t1, s).0));
    pts.extend(stops.iter().map(|&s| base.exp(p1, t1 + o * spec.phi(), s).0));
    let b = |i: usize| 2 + i;
    let c = |i: usize| 2 + nb + i;
    let mut tris = vec![[0, b(0), 1], [0, 1, c(0)]];
    for i in 1..nb {
        tris.push([b(i - 1), b(i), 1]);
        tris.push([c(i - 1), 1, c(i)]);
    }
    for v in [p1, ph, pts[b(nb - 1)], pts[c(nb - 1)]] {
        find_vertex(data, v)?;
    }
    MacroMesh::new(KleinChart::new(base, ph), &pts, tris, data.polygon.clone())
}

#[derive(Debug, Clone)]
pub struct KnoidSolve {
    pub contour: KnoidContour,
    pub data: BoundaryData,
    pub graph: DiscreteGraph,
    pub report: SolveReport,
}

#[derive(Debug, Clone)]
pub struct Noid2kSolve {
    pub contour: Noid2kContour,
    pub data: BoundaryData,
    pub graph: DiscreteGraph,
    pub report: SolveReport,
}

pub fn knoid_mesh(spec: &KnoidSpec, stops: &[f64], level: usize) -> Result<(KnoidContour, BoundaryData, Mesh)> {
    let contour = knoid_contour(spec)?;
    let data = boundary_heights(&contour.contour)?;
    let mac = knoid_macro(spec, &data, stops)?;
    let mesh = mesh_for_data(&mac, level, &data)?;
    Ok((contour, data, mesh))
}

/// Minimal section spanning `Γ_r` on a mesh refined `level` times.
pub fn solve_knoid(spec: &KnoidSpec, stops: &[f64], level: usize, options: &SolverOptions) -> Result<KnoidSolve> {
    let (contour, data, mesh) = knoid_mesh(spec, stops, level)?;
    let (graph, report) = solve_graph(spec.space, mesh, &data, options)?;
    Ok(KnoidSolve {
        contour,
        data,
        graph,
        report,
    })
}

pub fn noid2k_mesh(spec: &Noid2kSpec, c4: f64, c5: f64, stops: &[f64], level: usize) -> Result<(Noid2kContour, BoundaryData, Mesh)> {
    let contour = noid2k_contour_translated(spec, c4, c5)?;
    let data = boundary_heights(&contour.contour)?;
    let mac = noid2k_macro(spec, &data, stops)?;
    let mesh = mesh_for_data(&mac, level, &data)?;
    Ok((contour, data, mesh))
}

/// Minimal section spanning `Γ_n` translated by `c4`, `c5`.
pub fn solve_noid2k(
    spec: &Noid2kSpec,
    c4: f64,
    c5: f64,
    stops: &[f64],
    level: usize,
    options: &SolverOptions,
) -> Result<Noid2kSolve> {
    let (contour, data, mesh) = noid2k_mesh(spec, c4, c5, stops, level)?;
    let (graph, report) = solve_graph(spec.space, mesh, &data, options)?;
    Ok(Noid2kSolve {
        contour,
        data,
        graph,
        report,
    })
}
