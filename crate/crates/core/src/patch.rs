//! Parametrized surface patches and their mean curvature.

use crate::error::{Error, Result};
use crate::space::{Model, ModelPoint, SpaceParams};
use nalgebra::Vector3;

pub trait Patch: Sync {
    fn point(&self, u: f64, v: f64) -> ModelPoint;
    /// Parameter ranges `([u0, u1], [v0, v1])`.
    fn domain(&self) -> ([f64; 2], [f64; 2]);
    /// Relative finite-difference step scale in `u` and `v`.
    fn step_scale(&self) -> (f64, f64) {
        (1.0, 1.0)
    }
}

/// Position with first and second parameter derivatives.
#[derive(Debug, Clone, Copy)]
pub struct PatchJet {
    pub f: ModelPoint,
    pub fu: Vector3<f64>,
    pub fv: Vector3<f64>,
    pub fuu: Vector3<f64>,
    pub fuv: Vector3<f64>,
    pub fvv: Vector3<f64>,
}

const BASE_STEP: f64 = 1e-3;

/// Fourth-order central differences of the patch at `(u, v)`.
pub fn patch_jet(patch: &dyn Patch, u: f64, v: f64) -> PatchJet {
    let (su, sv) = patch.step_scale();
    let hu = BASE_STEP * su;
    let hv = BASE_STEP * sv;
    let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
    let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
    let off = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let f = patch.point(u, v);
    let mut fu = Vector3::zeros();
    let mut fv = Vector3::zeros();
    let mut fuu = Vector3::zeros();
    let mut fvv = Vector3::zeros();
    let mut fuv = Vector3::zeros();
    for k in 0..5 {
        if k == 2 {
            fuu += d2[k] * f;
            fvv += d2[k] * f;
            continue;
        }
        let pu = patch.point(u + off[k] * hu, v);
        let pv = patch.point(u, v + off[k] * hv);
        fu += d1[k] * pu;
        fv += d1[k] * pv;
        fuu += d2[k] * pu;
        fvv += d2[k] * pv;
    }
    for i in [0usize, 1, 3, 4] {
        for j in [0usize, 1, 3, 4] {
            fuv += d1[i] * d1[j] * patch.point(u + off[i] * hu, v + off[j] * hv);
        }
    }
    PatchJet {
        f,
        fu: fu / hu,
        fv: fv / hv,
        fuu: fuu / (hu * hu),
        fuv: fuv / (hu * hv),
        fvv: fvv / (hv * hv),
    }
}

/// Unit normal `g⁻¹(f_u × f_v)` normalized in the metric; `f_u × f_v` is the
/// covector annihilating both tangent vectors.
pub fn unit_normal(model: &Model, jet: &PatchJet) -> Result<Vector3<f64>> {
    let n = jet.fu.cross(&jet.fv);
    let gi = model.inverse_metric(&jet.f);
    let up = gi * n;
    let len2 = n.dot(&up);
    if !(len2 > 1e-300) {
        return Err(Error::Degenerate("patch is not immersed here".into()));
    }
    Ok(up / len2.sqrt())
}

/// Mean curvature `(k1 + k2)/2` with respect to the normal `g⁻¹(f_u × f_v)`.
pub fn mean_curvature_of_jet(model: &Model, jet: &PatchJet) -> Result<f64> {
    let n = unit_normal(model, jet)?;
    let g = model.metric(&jet.f);
    let e = (jet.fu.transpose() * g * jet.fu)[(0, 0)];
    let f = (jet.fu.transpose() * g * jet.fv)[(0, 0)];
    let gg = (jet.fv.transpose() * g * jet.fv)[(0, 0)];
    let det = e * gg - f * f;
    if !(det > 1e-300) {
        return Err(Error::Degenerate("first fundamental form is singular".into()));
    }
    let second = |d2: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>| {
        let cov = d2 + model.connection_apply(&jet.f, a, b);
        (cov.transpose() * g * n)[(0, 0)]
    };
    let l = second(&jet.fuu, &jet.fu, &jet.fu);
    let m = second(&jet.fuv, &jet.fu, &jet.fv);
    let nn = second(&jet.fvv, &jet.fv, &jet.fv);
    Ok((gg * l - 2.0 * f * m + e * nn) / (2.0 * det))
}

/// Mean curvature of `patch` at `(u, v)`; the sign refers to the normal
/// `g⁻¹(f_u × f_v)`, so flipping the parametrization orientation flips it.
pub fn mean_curvature(space: &SpaceParams, patch: &dyn Patch, u: f64, v: f64) -> Result<f64> {
    let model = space.model();
    let p = patch.point(u, v);
    model.check_domain(p.x, p.y)?;
    mean_curvature_of_jet(&model, &patch_jet(patch, u, v))
}

/// Patch given by a closure.
pub struct FnPatch<F> {
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub f: F,
}

impl<F: Fn(f64, f64) -> ModelPoint + Sync> Patch for FnPatch<F> {
    fn point(&self, u: f64, v: f64) -> ModelPoint {
        (self.f)(u, v)
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        (self.u, self.v)
    }
}

/// `count × count` grid of parameter values strictly inside the patch domain,
/// keeping a margin of `margin` (fraction of each range) from the edges.
pub fn interior_samples(patch: &dyn Patch, count: usize, margin: f64) -> Vec<(f64, f64)> {
    let ([u0, u1], [v0, v1]) = patch.domain();
    let mut out = Vec::with_capacity(count * count);
    for i in 0..count {
        for j in 0..count {
            let s = margin + (1.0 - 2.0 * margin) * (i as f64 + 0.5) / count as f64;
            let t = margin + (1.0 - 2.0 * margin) * (j as f64 + 0.5) / count as f64;
            out.push((u0 + s * (u1 - u0), v0 + t * (v1 - v0)));
        }
    }
    out
}
