//! Discrete Plateau problem for minimal sections over a base polygon.
//!
//! Heights are piecewise linear in the chart of the mesh. The area of the
//! graph is integrated with the pulled-back metric and minimised by damped
//! Newton steps with a Jacobi-preconditioned conjugate gradient solver.

use crate::base::BasePoint;
use crate::contours::BoundaryData;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodeKind};
use crate::space::{Model, SpaceParams};
use nalgebra::{DVector, Matrix2};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rayon::prelude::*;

/// Six-point rule exact for quartics on a triangle.
const QUAD_A: [f64; 2] = [0.445_948_490_915_965, 0.091_576_213_509_771];
const QUAD_W: [f64; 2] = [0.223_381_589_678_011, 0.109_951_743_655_322];

fn quad_points() -> [([f64; 3], f64); 6] {
    let mut out = [([0.0; 3], 0.0); 6];
    let mut n = 0;
    for (a, w) in QUAD_A.iter().zip(QUAD_W) {
        let c = 1.0 - 2.0 * a;
        for l in [[*a, *a, c], [*a, c, *a], [c, *a, *a]] {
            out[n] = (l, w);
            n += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct QuadPoint {
    /// Rows of the map from nodal heights to the scaled slope vector.
    m: [[f64; 3]; 2],
    v0: [f64; 2],
    b: f64,
    bdet2: f64,
    weight: f64,
}

impl QuadPoint {
    fn slope(&self, p: [f64; 3]) -> [f64; 2] {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.m[0][2] * p[2] + self.v0[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.m[1][2] * p[2] + self.v0[1],
        ]
    }

    fn density(&self, v: [f64; 2]) -> f64 {
        (self.bdet2 + self.b * (v[0] * v[0] + v[1] * v[1])).sqrt()
    }
}

/// Area of piecewise linear graphs over a fixed mesh.
#[derive(Debug, Clone)]
pub struct AreaFunctional {
    triangles: Vec<[usize; 3]>,
    quad: Vec<[QuadPoint; 6]>,
    nodes: usize,
}

impl AreaFunctional {
    pub fn new(model: Model, mesh: &Mesh) -> Result<Self> {
        let rule = quad_points();
        let quad: Result<Vec<[QuadPoint; 6]>> = mesh
            .triangles
            .par_iter()
            .map(|tri| {
                let k = tri.map(|i| mesh.chart_points[i]);
                let twice = crate::chart::orient2d(k[0], k[1], k[2]);
                if twice <= 0.0 {
                    return Err(Error::Degenerate("negatively oriented mesh triangle".into()));
                }
                let grad = [
                    [(k[1].y - k[2].y) / twice, (k[2].x - k[1].x) / twice],
                    [(k[2].y - k[0].y) / twice, (k[0].x - k[2].x) / twice],
                    [(k[0].y - k[1].y) / twice, (k[1].x - k[0].x) / twice],
                ];
                let mut out = [QuadPoint {
                    m: [[0.0; 3]; 2],
                    v0: [0.0; 2],
                    b: 0.0,
                    bdet2: 0.0,
                    weight: 0.0,
                }; 6];
                for (slot, (l, w)) in out.iter_mut().zip(rule.iter()) {
                    let kp = l[0] * k[0] + l[1] * k[1] + l[2] * k[2];
                    let (q, jac): (BasePoint, Matrix2<f64>) = mesh.chart.from_chart_jacobian(kp)?;
                    let fr = model.frame(q.x, q.y);
                    let det = jac.determinant();
                    let cof = Matrix2::new(jac[(1, 1)], -jac[(1, 0)], -jac[(0, 1)], jac[(0, 0)]);
                    let mut m = [[0.0; 3]; 2];
                    for (r, row) in m.iter_mut().enumerate() {
                        for (n, g) in grad.iter().enumerate() {
                            row[n] = cof[(r, 0)] * g[0] + cof[(r, 1)] * g[1];
                        }
                    }
                    *slot = QuadPoint {
                        m,
                        v0: [det * fr.a.x, det * fr.a.y],
                        b: fr.b,
                        bdet2: fr.b * fr.b * det * det,
                        weight: w * 0.5 * twice,
                    };
                }
                Ok(out)
            })
            .collect();
        Ok(AreaFunctional {
            triangles: mesh.triangles.clone(),
            quad: quad?,
            nodes: mesh.len(),
        })
    }

    fn local(&self, t: usize, heights: &[f64]) -> [f64; 3] {
        self.triangles[t].map(|i| heights[i])
    }

    pub fn triangle_area(&self, t: usize, heights: &[f64]) -> f64 {
        let p = self.local(t, heights);
        self.quad[t].iter().map(|q| q.weight * q.density(q.slope(p))).sum()
    }

    pub fn value(&self, heights: &[f64]) -> f64 {
        let parts: Vec<f64> = (0..self.triangles.len())
            .into_par_iter()
            .map(|t| self.triangle_area(t, heights))
            .collect();
        parts.iter().sum()
    }

    fn local_gradient(&self, t: usize, heights: &[f64]) -> [f64; 3] {
        let p = self.local(t, heights);
        let mut g = [0.0; 3];
        for q in &self.quad[t] {
            let v = q.slope(p);
            let d = q.density(v);
            let c = q.weight * q.b / d;
            for (n, gn) in g.iter_mut().enumerate() {
                *gn += c * (q.m[0][n] * v[0] + q.m[1][n] * v[1]);
            }
        }
        g
    }

    fn local_hessian(&self, t: usize, heights: &[f64]) -> [[f64; 3]; 3] {
        let p = self.local(t, heights);
        let mut h = [[0.0; 3]; 3];
        for q in &self.quad[t] {
            let v = q.slope(p);
            let d = q.density(v);
            let mv: [f64; 3] = std::array::from_fn(|n| q.m[0][n] * v[0] + q.m[1][n] * v[1]);
            for a in 0..3 {
                for c in 0..3 {
                    let mm = q.m[0][a] * q.m[0][c] + q.m[1][a] * q.m[1][c];
                    h[a][c] += q.weight * (q.b * mm / d - q.b * q.b * mv[a] * mv[c] / (d * d * d));
                }
            }
        }
        h
    }

    /// Gradient with respect to all nodal heights.
    pub fn gradient(&self, heights: &[f64]) -> Vec<f64> {
        let locals: Vec<[f64; 3]> = (0..self.triangles.len())
            .into_par_iter()
            .map(|t| self.local_gradient(t, heights))
            .collect();
        let mut g = vec![0.0; self.nodes];
        for (tri, l) in self.triangles.iter().zip(locals) {
            for n in 0..3 {
                g[tri[n]] += l[n];
            }
        }
        g
    }

    /// Hessian restricted to the free nodes; `index[i]` is the free index of node `i`.
    pub fn hessian(&self, heights: &[f64], index: &[Option<usize>], free: usize) -> CsrMatrix<f64> {
        let locals: Vec<[[f64; 3]; 3]> = (0..self.triangles.len())
            .into_par_iter()
            .map(|t| self.local_hessian(t, heights))
            .collect();
        assemble(&self.triangles, &locals, index, free)
    }
}

fn assemble(triangles: &[[usize; 3]], locals: &[[[f64; 3]; 3]], index: &[Option<usize>], free: usize) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(free, free);
    for (tri, l) in triangles.iter().zip(locals) {
        for a in 0..3 {
            let Some(r) = index[tri[a]] else { continue };
            for c in 0..3 {
                if let Some(col) = index[tri[c]] {
                    coo.push(r, col, l[a][c]);
                }
            }
        }
    }
    CsrMatrix::from(&coo)
}

fn matvec(a: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let offsets = a.row_offsets();
    let cols = a.col_indices();
    let vals = a.values();
    let out: Vec<f64> = (0..a.nrows())
        .into_par_iter()
        .map(|r| (offsets[r]..offsets[r + 1]).map(|k| vals[k] * x[cols[k]]).sum())
        .collect();
    DVector::from_vec(out)
}

fn diagonal(a: &CsrMatrix<f64>) -> DVector<f64> {
    let mut d = DVector::zeros(a.nrows());
    for (r, row) in a.row_iter().enumerate() {
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            if c == r {
                d[r] = v;
            }
        }
    }
    d
}

/// Jacobi-preconditioned conjugate gradients. Returns the solution and the
/// iteration count, or `None` if the matrix is not positive along a search
/// direction or the iteration does not converge.
pub fn pcg(a: &CsrMatrix<f64>, rhs: &DVector<f64>, rel_tol: f64, max_iter: usize) -> Option<(DVector<f64>, usize)> {
    let diag = diagonal(a);
    if diag.iter().any(|&d| !(d > 0.0)) {
        return None;
    }
    let inv = diag.map(|d| 1.0 / d);
    let mut x = DVector::zeros(rhs.len());
    let mut r = rhs.clone();
    let target = rel_tol * rhs.norm();
    if rhs.norm() == 0.0 {
        return Some((x, 0));
    }
    let mut z = r.component_mul(&inv);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for it in 1..=max_iter {
        let ap = matvec(a, &p);
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return None;
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        if r.norm() <= target {
            return Some((x, it));
        }
        z = r.component_mul(&inv);
        let rz_new = r.dot(&z);
        p = &z + (rz_new / rz) * &p;
        rz = rz_new;
    }
    None
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop once the largest free gradient entry is below this times
    /// `1 + max |boundary height|`.
    pub gradient_tol: f64,
    pub max_newton: usize,
    pub pcg_tol: f64,
    pub max_pcg: usize,
    pub armijo: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gradient_tol: 1e-11,
            max_newton: 60,
            pcg_tol: 1e-10,
            max_pcg: 20_000,
            armijo: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub area: f64,
    pub gradient_norm: f64,
    pub newton_iterations: usize,
    pub pcg_iterations: usize,
    pub fallback_steps: usize,
    pub converged: bool,
    pub interior_range: (f64, f64),
    pub data_range: (f64, f64),
}

impl SolveReport {
    pub fn max_principle_holds(&self, slack: f64) -> bool {
        self.interior_range.0 >= self.data_range.0 - slack && self.interior_range.1 <= self.data_range.1 + slack
    }
}

/// Piecewise linear section over a mesh.
#[derive(Debug, Clone)]
pub struct DiscreteGraph {
    pub space: SpaceParams,
    pub mesh: Mesh,
    pub heights: Vec<f64>,
}

impl DiscreteGraph {
    pub fn model(&self) -> Model {
        self.space.model()
    }

    pub fn area(&self) -> Result<f64> {
        Ok(AreaFunctional::new(self.model(), &self.mesh)?.value(&self.heights))
    }

    /// Height at a base point inside the mesh.
    pub fn height_at(&self, q: BasePoint) -> Option<f64> {
        let (t, l) = self.mesh.locate(q)?;
        let tri = self.mesh.triangles[t];
        Some((0..3).map(|n| l[n] * self.heights[tri[n]]).sum())
    }

    pub fn point(&self, i: usize) -> crate::ModelPoint {
        let q = self.mesh.points[i];
        crate::ModelPoint::new(q.x, q.y, self.heights[i])
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.mesh.len())
            .filter(|&i| !self.mesh.kinds[i].is_boundary())
            .collect()
    }
}

/// Dirichlet value of a boundary node.
pub fn boundary_value(data: &BoundaryData, mesh: &Mesh, i: usize) -> Option<f64> {
    match mesh.kinds[i] {
        NodeKind::Interior => None,
        NodeKind::Side(s) => Some(data.side_height(s, mesh.points[i])),
        NodeKind::Corner { vertex, side } => match side {
            Some(s) if s != vertex => Some(data.side_end_height(s)),
            _ => Some(data.sides[vertex].start_height),
        },
    }
}

fn free_index(mesh: &Mesh) -> (Vec<Option<usize>>, usize) {
    let mut n = 0;
    let idx = mesh
        .kinds
        .iter()
        .map(|k| {
            if k.is_boundary() {
                None
            } else {
                n += 1;
                Some(n - 1)
            }
        })
        .collect();
    (idx, n)
}

/// Harmonic extension of the boundary values in the chart.
fn harmonic_start(mesh: &Mesh, heights: &mut [f64], index: &[Option<usize>], free: usize, options: &SolverOptions) -> Result<usize> {
    if free == 0 {
        return Ok(0);
    }
    let locals: Vec<[[f64; 3]; 3]> = mesh
        .triangles
        .iter()
        .map(|tri| {
            let k = tri.map(|i| mesh.chart_points[i]);
            let twice = crate::chart::orient2d(k[0], k[1], k[2]);
            let g = [
                [(k[1].y - k[2].y), (k[2].x - k[1].x)],
                [(k[2].y - k[0].y), (k[0].x - k[2].x)],
                [(k[0].y - k[1].y), (k[1].x - k[0].x)],
            ];
            std::array::from_fn(|a| std::array::from_fn(|c| (g[a][0] * g[c][0] + g[a][1] * g[c][1]) / (2.0 * twice)))
        })
        .collect();
    let a = assemble(&mesh.triangles, &locals, index, free);
    let mut rhs = DVector::zeros(free);
    for (tri, l) in mesh.triangles.iter().zip(&locals) {
        for r in 0..3 {
            let Some(row) = index[tri[r]] else { continue };
            for c in 0..3 {
                if index[tri[c]].is_none() {
                    rhs[row] -= l[r][c] * heights[tri[c]];
                }
            }
        }
    }
    let (x, its) = pcg(&a, &rhs, 1e-12, options.max_pcg)
        .ok_or_else(|| Error::Numerical("harmonic start did not converge".into()))?;
    for (i, slot) in index.iter().enumerate() {
        if let Some(r) = slot {
            heights[i] = x[*r];
        }
    }
    Ok(its)
}

/// Minimise the discrete area over `mesh` with Dirichlet data `data`.
pub fn solve_graph(space: SpaceParams, mesh: Mesh, data: &BoundaryData, options: &SolverOptions) -> Result<(DiscreteGraph, SolveReport)> {
    let model = space.model();
    let functional = AreaFunctional::new(model, &mesh)?;
    let (index, free) = free_index(&mesh);
    let mut heights = vec![0.0; mesh.len()];
    for (i, h) in heights.iter_mut().enumerate() {
        if let Some(v) = boundary_value(data, &mesh, i) {
            *h = v;
        }
    }
    let mut pcg_total = harmonic_start(&mesh, &mut heights, &index, free, options)?;
    let free_nodes: Vec<usize> = (0..mesh.len()).filter(|&i| index[i].is_some()).collect();
    let free_grad = |h: &[f64]| -> DVector<f64> {
        let g = functional.gradient(h);
        DVector::from_iterator(free, free_nodes.iter().map(|&i| g[i]))
    };
    let (lo, hi) = data.range();
    let tol = options.gradient_tol * (1.0 + lo.abs().max(hi.abs()));
    let mut value = functional.value(&heights);
    let mut grad = free_grad(&heights);
    let mut newton = 0;
    let mut fallback = 0;
    let mut converged = free == 0 || grad.amax() <= tol;
    while !converged && newton < options.max_newton {
        newton += 1;
        let hess = functional.hessian(&heights, &index, free);
        let step = match pcg(&hess, &(-&grad), options.pcg_tol, options.max_pcg) {
            Some((d, its)) if d.dot(&grad) < 0.0 => {
                pcg_total += its;
                d
            }
            _ => {
                fallback += 1;
                let diag = diagonal(&hess);
                DVector::from_iterator(free, (0..free).map(|r| -grad[r] / diag[r].max(1e-300)))
            }
        };
        let slope = step.dot(&grad);
        let mut t = 1.0;
        let mut trial = heights.clone();
        let mut accepted = false;
        for _ in 0..60 {
            for (r, &i) in free_nodes.iter().enumerate() {
                trial[i] = heights[i] + t * step[r];
            }
            let v = functional.value(&trial);
            if v.is_finite() && v <= value + options.armijo * t * slope {
                accepted = true;
                value = v;
                break;
            }
            // decrease below rounding of the area: judge the step by the gradient
            if t == 1.0 && v.is_finite() && -slope <= 1e-13 * value.abs() && free_grad(&trial).amax() < grad.amax() {
                accepted = true;
                value = v;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        heights = trial;
        grad = free_grad(&heights);
        converged = grad.amax() <= tol;
    }
    let gradient_norm = if free == 0 { 0.0 } else { grad.amax() };
    let interior_range = free_nodes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(heights[i]), hi.max(heights[i])));
    let report = SolveReport {
        area: value,
        gradient_norm,
        newton_iterations: newton,
        pcg_iterations: pcg_total,
        fallback_steps: fallback,
        converged,
        interior_range,
        data_range: data.range(),
    };
    if !value.is_finite() {
        return Err(Error::Numerical("area is not finite".into()));
    }
    Ok((DiscreteGraph { space, mesh, heights }, report))
}
