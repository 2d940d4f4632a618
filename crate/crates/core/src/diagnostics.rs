//! Pointwise and global checks on discrete sections: fitted mean curvature,
//! maximum principle, slopes and convergence orders.

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodeKind};
use crate::reference::{graph_mean_curvature, mce_residual, GraphJet};
use crate::solver::DiscreteGraph;
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;

/// Nodes within `rings` edges of `i`.
pub fn ring(adj: &[Vec<usize>], i: usize, rings: usize) -> Vec<usize> {
    let mut seen = vec![i];
    let mut front = vec![i];
    for _ in 0..rings {
        let mut next = Vec::new();
        for &a in &front {
            for &b in &adj[a] {
                if !seen.contains(&b) {
                    seen.push(b);
                    next.push(b);
                }
            }
        }
        front = next;
    }
    seen
}

/// Least-squares quadratic through the heights of the two-ring of an
/// interior node, in base coordinates. `None` when the two-ring touches a
/// polygon vertex or is too small.
pub fn fit_jet(graph: &DiscreteGraph, adj: &[Vec<usize>], i: usize) -> Option<GraphJet> {
    if graph.mesh.kinds[i].is_boundary() {
        return None;
    }
    let nodes = ring(adj, i, 2);
    if nodes.len() < 8 || nodes.iter().any(|&n| matches!(graph.mesh.kinds[n], NodeKind::Corner { .. })) {
        return None;
    }
    let c = graph.mesh.points[i];
    let scale = nodes
        .iter()
        .map(|&n| (graph.mesh.points[n] - c).norm())
        .fold(0.0, f64::max);
    let mut a = DMatrix::zeros(nodes.len(), 6);
    let mut rhs = DVector::zeros(nodes.len());
    for (r, &n) in nodes.iter().enumerate() {
        let d = (graph.mesh.points[n] - c) / scale;
        let row = [1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y];
        for (col, v) in row.iter().enumerate() {
            a[(r, col)] = *v;
        }
        rhs[r] = graph.heights[n];
    }
    let coef = a.svd(true, true).solve(&rhs, 1e-12).ok()?;
    let s2 = scale * scale;
    Some(GraphJet {
        u: coef[0],
        ux: coef[1] / scale,
        uy: coef[2] / scale,
        uxx: 2.0 * coef[3] / s2,
        uxy: coef[4] / s2,
        uyy: 2.0 * coef[5] / s2,
    })
}

/// Minimal-graph residual of the fitted quadratic at node `i`.
pub fn fitted_residual(graph: &DiscreteGraph, adj: &[Vec<usize>], i: usize) -> Option<f64> {
    let jet = fit_jet(graph, adj, i)?;
    let q = graph.mesh.points[i];
    mce_residual(&graph.model(), q.x, q.y, &jet).ok()
}

/// Mean curvature of the fitted quadratic at node `i`.
pub fn fitted_mean_curvature(graph: &DiscreteGraph, adj: &[Vec<usize>], i: usize) -> Option<f64> {
    let jet = fit_jet(graph, adj, i)?;
    let q = graph.mesh.points[i];
    graph_mean_curvature(&graph.model(), q.x, q.y, &jet).ok()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats {
    pub max: f64,
    pub rms: f64,
    pub count: usize,
}

/// Residual statistics over the given nodes; nodes without a fit are skipped.
pub fn residual_stats(graph: &DiscreteGraph, nodes: &[usize]) -> ResidualStats {
    let adj = graph.mesh.neighbours();
    let vals: Vec<f64> = nodes.iter().filter_map(|&i| fitted_residual(graph, &adj, i)).collect();
    let count = vals.len();
    let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rms = if count == 0 {
        0.0
    } else {
        (vals.iter().map(|v| v * v).sum::<f64>() / count as f64).sqrt()
    };
    ResidualStats { max, rms, count }
}

/// Exact chart-coordinate lookup of nodes, used to follow nodes of a coarse
/// mesh through nested refinements.
pub fn node_lookup(mesh: &Mesh) -> HashMap<(u64, u64), usize> {
    let mut map = HashMap::new();
    for (i, k) in mesh.chart_points.iter().enumerate() {
        if !matches!(mesh.kinds[i], NodeKind::Corner { side: Some(_), .. }) {
            map.entry((k.x.to_bits(), k.y.to_bits())).or_insert(i);
        }
    }
    map
}

/// Indices in `fine` of the given nodes of `coarse`.
pub fn match_nodes(coarse: &Mesh, nodes: &[usize], fine: &Mesh) -> Result<Vec<usize>> {
    let lookup = node_lookup(fine);
    nodes
        .iter()
        .map(|&i| {
            let k = coarse.chart_points[i];
            lookup
                .get(&(k.x.to_bits(), k.y.to_bits()))
                .copied()
                .ok_or_else(|| Error::Invalid("meshes are not nested".into()))
        })
        .collect()
}

/// Observed orders `log2(e_i / e_{i+1})` for errors on meshes halved in size.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Largest and smallest interior height against the range of the boundary
/// heights.
pub fn maximum_principle(graph: &DiscreteGraph, slack: f64) -> (bool, (f64, f64), (f64, f64)) {
    let mut inner = (f64::INFINITY, f64::NEG_INFINITY);
    let mut outer = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &z) in graph.heights.iter().enumerate() {
        let r = if graph.mesh.kinds[i].is_boundary() { &mut outer } else { &mut inner };
        r.0 = r.0.min(z);
        r.1 = r.1.max(z);
    }
    let ok = inner.0 >= outer.0 - slack && inner.1 <= outer.1 + slack;
    (ok, inner, outer)
}
