//! Isometries of the base and of the total space.
//!
//! A base isometry `T` lifts to the total space as
//!
//! ```text
//! F(q, z) = (T q, z0 + ε (z - ψ(q)) + ψ_T(T q))
//! ```
//!
//! where `ψ(q)` is the lift height gained along the geodesic from a fixed base
//! point `o` to `q`, `ψ_T` the same from `T o`, and `ε = -1` exactly when `T`
//! reverses orientation (the fibre direction flips with it).

use crate::base::{cx, vx, BaseKind, BasePoint, BaseSurface};
use crate::space::{Model, ModelPoint};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Base isometry sending the unit tangent `(from, from_angle)` to `(to, to_angle)`,
/// optionally composed with the reflection in the geodesic through `from` with
/// direction `from_angle`.
#[derive(Debug, Clone, Copy)]
pub struct FrameMap {
    pub base: BaseSurface,
    pub from: BasePoint,
    pub from_angle: f64,
    pub to: BasePoint,
    pub to_angle: f64,
    pub reflect: bool,
}

impl FrameMap {
    pub fn apply(&self, q: BasePoint) -> BasePoint {
        self.apply_with_direction(q, 0.0).0
    }

    /// Image of the point `q` and of a tangent direction at `q`.
    pub fn apply_with_direction(&self, q: BasePoint, angle: f64) -> (BasePoint, f64) {
        let z = cx(q);
        let rot = self.to_angle - self.from_angle;
        match self.base.kind {
            BaseKind::Flat => {
                let mut zeta = z - cx(self.from);
                let mut ang = angle;
                if self.reflect {
                    let e = Complex64::from_polar(1.0, 2.0 * self.from_angle);
                    zeta = e * zeta.conj();
                    ang = 2.0 * self.from_angle - ang;
                }
                zeta *= Complex64::from_polar(1.0, rot);
                (vx(cx(self.to) + zeta), ang + rot)
            }
            BaseKind::Hyperbolic { .. } => {
                let p = cx(self.from);
                let one = Complex64::new(1.0, 0.0);
                let mut zeta = (z - p) / (z - p.conj());
                let mut ang = angle + ((p - p.conj()) / ((z - p.conj()) * (z - p.conj()))).arg();
                if self.reflect {
                    let beta = self.from_angle - PI / 2.0;
                    zeta = Complex64::from_polar(1.0, 2.0 * beta) * zeta.conj();
                    ang = 2.0 * beta - ang;
                }
                zeta *= Complex64::from_polar(1.0, rot);
                ang += rot;
                let t = cx(self.to);
                let w = (t - zeta * t.conj()) / (one - zeta);
                ang += ((t - t.conj()) / ((one - zeta) * (one - zeta))).arg();
                (vx(w), ang)
            }
        }
    }

    /// Inverse map. An isometry is fixed by the image of one unit tangent
    /// and its orientation behaviour, so swapping the frames suffices.
    pub fn inverse(&self) -> FrameMap {
        FrameMap {
            base: self.base,
            from: self.to,
            from_angle: self.to_angle,
            to: self.from,
            to_angle: self.from_angle,
            reflect: self.reflect,
        }
    }

    pub fn preserves_orientation(&self) -> bool {
        !self.reflect
    }
}

/// Isometry of the total space covering a [`FrameMap`].
#[derive(Debug, Clone, Copy)]
pub struct Isometry {
    pub model: Model,
    pub base_map: FrameMap,
    pub z0: f64,
}

impl Isometry {
    fn eps(&self) -> f64 {
        if self.base_map.reflect {
            -1.0
        } else {
            1.0
        }
    }

    pub fn apply(&self, p: &ModelPoint) -> ModelPoint {
        let q = BasePoint::new(p.x, p.y);
        let o = self.base_map.from;
        let to = self.base_map.apply(q);
        let psi = self.model.geodesic_lift(o, q);
        let psi_t = self.model.geodesic_lift(self.base_map.to, to);
        ModelPoint::new(to.x, to.y, self.z0 + self.eps() * (p.z - psi) + psi_t)
    }

    /// Orientation-preserving isometry moving the horizontal unit vector at
    /// `(p, zp)` with base angle `angle_p` to the one at `(q, zq)` with `angle_q`.
    pub fn frame_motion(
        model: Model,
        p: BasePoint,
        zp: f64,
        angle_p: f64,
        q: BasePoint,
        zq: f64,
        angle_q: f64,
    ) -> Self {
        Isometry {
            model,
            base_map: FrameMap {
                base: model.base(),
                from: p,
                from_angle: angle_p,
                to: q,
                to_angle: angle_q,
                reflect: false,
            },
            z0: zq - zp,
        }
    }

    /// Rotation by π about the horizontal geodesic through `p` with base direction `angle`.
    pub fn half_turn_horizontal(model: Model, p: &ModelPoint, angle: f64) -> Self {
        let b = BasePoint::new(p.x, p.y);
        Isometry {
            model,
            base_map: FrameMap {
                base: model.base(),
                from: b,
                from_angle: angle,
                to: b,
                to_angle: angle,
                reflect: true,
            },
            z0: 2.0 * p.z,
        }
    }

    /// Rotation by π about the fibre over `q`.
    pub fn half_turn_vertical(model: Model, q: BasePoint) -> Self {
        Isometry {
            model,
            base_map: FrameMap {
                base: model.base(),
                from: q,
                from_angle: 0.0,
                to: q,
                to_angle: PI,
                reflect: false,
            },
            z0: 0.0,
        }
    }

    /// Vertical translation by `t`.
    pub fn vertical_translation(model: Model, t: f64) -> Self {
        let o = model.base().origin();
        Isometry {
            model,
            base_map: FrameMap {
                base: model.base(),
                from: o,
                from_angle: 0.0,
                to: o,
                to_angle: 0.0,
                reflect: false,
            },
            z0: t,
        }
    }
}
