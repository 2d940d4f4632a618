//! Metric tensor, its inverse and the Levi-Civita connection of each model.

use crate::error::Result;
use crate::space::{Model, ModelPoint, SpaceParams};
use nalgebra::{Matrix3, Vector3};

pub type MetricTensor = Matrix3<f64>;

/// `christoffel[l][i][j] = Γ^l_{ij}`
pub type Christoffels = [[[f64; 3]; 3]; 3];

impl Model {
    pub fn metric(&self, p: &ModelPoint) -> MetricTensor {
        let f = self.frame(p.x, p.y);
        let (ax, ay, b) = (f.a.x, f.a.y, f.b);
        Matrix3::new(
            b + ax * ax,
            ax * ay,
            ax,
            ax * ay,
            b + ay * ay,
            ay,
            ax,
            ay,
            1.0,
        )
    }

    /// Closed-form inverse built from the orthonormal frame
    /// `(∂x - a_x ∂z)/√b, (∂y - a_y ∂z)/√b, ∂z`.
    pub fn inverse_metric(&self, p: &ModelPoint) -> MetricTensor {
        let f = self.frame(p.x, p.y);
        let (ax, ay, b) = (f.a.x, f.a.y, f.b);
        Matrix3::new(
            1.0 / b,
            0.0,
            -ax / b,
            0.0,
            1.0 / b,
            -ay / b,
            -ax / b,
            -ay / b,
            1.0 + (ax * ax + ay * ay) / b,
        )
    }

    /// `∂_k g_ij` for `k ∈ {x, y, z}`; the metric does not depend on `z`.
    pub fn metric_derivatives(&self, p: &ModelPoint) -> [MetricTensor; 3] {
        let f = self.frame(p.x, p.y);
        let mut out = [Matrix3::zeros(); 3];
        for (k, d) in out.iter_mut().take(2).enumerate() {
            let db = f.db[k];
            let dax = f.da[(0, k)];
            let day = f.da[(1, k)];
            let (ax, ay) = (f.a.x, f.a.y);
            *d = Matrix3::new(
                db + 2.0 * ax * dax,
                dax * ay + ax * day,
                dax,
                dax * ay + ax * day,
                db + 2.0 * ay * day,
                day,
                dax,
                day,
                0.0,
            );
        }
        out
    }

    pub fn christoffels(&self, p: &ModelPoint) -> Christoffels {
        let gi = self.inverse_metric(p);
        let dg = self.metric_derivatives(p);
        let mut out = [[[0.0; 3]; 3]; 3];
        // lowered symbols Γ_{m i j} = ½(∂_i g_mj + ∂_j g_mi - ∂_m g_ij)
        let mut low = [[[0.0; 3]; 3]; 3];
        for (mm, lm) in low.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    lm[i][j] = 0.5 * (dg[i][(mm, j)] + dg[j][(mm, i)] - dg[mm][(i, j)]);
                }
            }
        }
        for (l, ol) in out.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    ol[i][j] = (0..3).map(|mm| gi[(l, mm)] * low[mm][i][j]).sum();
                }
            }
        }
        out
    }

    /// `Γ(u, v)^l = Γ^l_{ij} u^i v^j`
    pub fn connection_apply(&self, p: &ModelPoint, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        let g = self.christoffels(p);
        let mut r = Vector3::zeros();
        for l in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += g[l][i][j] * u[i] * v[j];
                }
            }
            r[l] = s;
        }
        r
    }

    pub fn norm(&self, p: &ModelPoint, v: &Vector3<f64>) -> f64 {
        self.inner(p, v, v).sqrt()
    }

    pub fn inner(&self, p: &ModelPoint, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        (u.transpose() * self.metric(p) * v)[(0, 0)]
    }
}

/// Metric coefficients at `p`.
pub fn metric_at(space: &SpaceParams, p: &ModelPoint) -> Result<MetricTensor> {
    let model = space.model();
    model.check_domain(p.x, p.y)?;
    Ok(model.metric(p))
}

/// Connection coefficients `Γ^l_{ij}` at `p`.
pub fn christoffels(space: &SpaceParams, p: &ModelPoint) -> Result<Christoffels> {
    let model = space.model();
    model.check_domain(p.x, p.y)?;
    Ok(model.christoffels(p))
}
