//! Boundary contours of the k-noid and 2k-noid Plateau problems, their
//! Dirichlet data and the angle checks of the mean convex barrier domain.

use crate::base::{BasePoint, BaseSurface, GeodesicArc};
use crate::curve::{horizontal_lift, CurveSample};
use crate::error::{Error, Result};
use crate::polygon::BasePolygon;
use crate::reference::UmbrellaPatch;
use crate::space::{Model, ModelPoint, SpaceParams};
use std::f64::consts::{FRAC_PI_2, PI};

pub const ARC_SAMPLES: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone)]
pub struct ContourArc {
    pub kind: ArcKind,
    pub start: ModelPoint,
    pub end: ModelPoint,
    pub samples: CurveSample,
}

/// Polygon of horizontal and vertical geodesic arcs. `labels[i]` names the
/// start vertex of `arcs[i]`.
#[derive(Debug, Clone)]
pub struct Contour {
    pub space: SpaceParams,
    pub arcs: Vec<ContourArc>,
    pub labels: Vec<String>,
    pub closed: bool,
}

/// Horizontal lift of the base geodesic from `p` to `q`, starting at height `z0`.
pub fn horizontal_arc(space: &SpaceParams, p: BasePoint, q: BasePoint, z0: f64, samples: usize) -> Result<ContourArc> {
    let arc = GeodesicArc::between(space.base(), p, q);
    let lift = horizontal_lift(space, &arc, z0, samples)?;
    let mut end = lift.last();
    // the lift reproduces the base curve; snap the end point to `q` exactly
    end.x = q.x;
    end.y = q.y;
    Ok(ContourArc {
        kind: ArcKind::Horizontal,
        start: ModelPoint::new(p.x, p.y, z0),
        end,
        samples: lift,
    })
}

pub fn vertical_arc(q: BasePoint, z0: f64, z1: f64, samples: usize) -> ContourArc {
    ContourArc {
        kind: ArcKind::Vertical,
        start: ModelPoint::new(q.x, q.y, z0),
        end: ModelPoint::new(q.x, q.y, z1),
        samples: CurveSample::vertical(q.x, q.y, z0, z1, samples),
    }
}

/// Result of the per-arc audit.
#[derive(Debug, Clone, Copy)]
pub struct ArcAudit {
    /// Largest base displacement along a vertical arc.
    pub vertical_drift: f64,
    /// Largest `|g(ξ, c')|` along a horizontal arc (unit tangents).
    pub horizontality: f64,
}

impl Contour {
    pub fn vertices(&self) -> Vec<(String, ModelPoint)> {
        self.labels
            .iter()
            .cloned()
            .zip(self.arcs.iter().map(|a| a.start))
            .collect()
    }

    pub fn vertex(&self, label: &str) -> Option<ModelPoint> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.arcs[i].start)
    }

    /// Distance between consecutive arc end and start points, maximised over
    /// all joints (including the closing joint of a closed contour).
    pub fn closure_error(&self) -> f64 {
        let n = self.arcs.len();
        let joints = if self.closed { n } else { n - 1 };
        (0..joints)
            .map(|i| (self.arcs[i].end - self.arcs[(i + 1) % n].start).norm())
            .fold(0.0, f64::max)
    }

    pub fn audit_arcs(&self) -> ArcAudit {
        let model = self.space.model();
        let mut drift = 0.0f64;
        let mut horiz = 0.0f64;
        for arc in &self.arcs {
            match arc.kind {
                ArcKind::Vertical => {
                    for p in &arc.samples.points {
                        drift = drift.max((p.xy() - arc.start.xy()).norm());
                    }
                }
                ArcKind::Horizontal => {
                    for (p, t) in arc.samples.points.iter().zip(&arc.samples.tangents) {
                        let g = model.metric(p);
                        horiz = horiz.max((g * t)[2].abs());
                    }
                }
            }
        }
        ArcAudit {
            vertical_drift: drift,
            horizontality: horiz,
        }
    }

    /// Interior angle at every vertex between the incoming and outgoing arcs,
    /// measured in the ambient metric.
    pub fn vertex_angles(&self) -> Vec<(String, f64)> {
        let model = self.space.model();
        let n = self.arcs.len();
        let mut out = Vec::new();
        for i in 0..n {
            if !self.closed && i == 0 {
                continue;
            }
            let prev = &self.arcs[(i + n - 1) % n];
            let next = &self.arcs[i];
            let tin = -*prev.samples.tangents.last().unwrap();
            let tout = next.samples.tangents[0];
            let p = next.start;
            let c = model.inner(&p, &tin, &tout) / (model.norm(&p, &tin) * model.norm(&p, &tout));
            out.push((self.labels[i].clone(), c.clamp(-1.0, 1.0).acos()));
        }
        out
    }

    /// Line-based text form: a `space` line, one `vertex` line per arc start
    /// and one `arc` line per arc.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("space {:.17e} {:.17e}\n", self.space.kappa, self.space.h_mean));
        s.push_str(&format!("closed {}\n", self.closed as u8));
        for (l, a) in self.labels.iter().zip(&self.arcs) {
            s.push_str(&format!("vertex {} {:.17e} {:.17e} {:.17e}\n", l, a.start.x, a.start.y, a.start.z));
        }
        if !self.closed {
            let e = self.arcs.last().unwrap().end;
            s.push_str(&format!("vertex end {:.17e} {:.17e} {:.17e}\n", e.x, e.y, e.z));
        }
        let n = self.arcs.len();
        for (i, a) in self.arcs.iter().enumerate() {
            let kind = match a.kind {
                ArcKind::Horizontal => "horizontal",
                ArcKind::Vertical => "vertical",
            };
            let j = if self.closed { (i + 1) % n } else { i + 1 };
            s.push_str(&format!("arc {} {} {}\n", kind, i, j));
        }
        s
    }

    /// Parse [`Contour::to_text`] output. Arc samples are recomputed.
    pub fn from_text(text: &str) -> Result<Contour> {
        let bad = |m: &str| Error::Invalid(format!("contour text: {m}"));
        let mut space = None;
        let mut closed = true;
        let mut verts: Vec<(String, ModelPoint)> = Vec::new();
        let mut arcs: Vec<(ArcKind, usize, usize)> = Vec::new();
        for line in text.lines() {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(line));
            match tok.as_slice() {
                [] => {}
                ["space", k, h] => space = Some(SpaceParams::new(num(k)?, num(h)?)?),
                ["closed", c] => closed = *c == "1",
                ["vertex", l, x, y, z] => verts.push((l.to_string(), ModelPoint::new(num(x)?, num(y)?, num(z)?))),
                ["arc", kind, i, j] => {
                    let kind = match *kind {
                        "horizontal" => ArcKind::Horizontal,
                        "vertical" => ArcKind::Vertical,
                        _ => return Err(bad(line)),
                    };
                    arcs.push((kind, idx(i)?, idx(j)?));
                }
                _ => return Err(bad(line)),
            }
        }
        let space = space.ok_or_else(|| bad("missing space line"))?;
        let mut out = Contour {
            space,
            arcs: Vec::new(),
            labels: Vec::new(),
            closed,
        };
        for (kind, i, j) in arcs {
            let (li, p) = verts.get(i).cloned().ok_or_else(|| bad("vertex index"))?;
            let (_, q) = verts.get(j).cloned().ok_or_else(|| bad("vertex index"))?;
            let arc = match kind {
                ArcKind::Horizontal => {
                    let mut a = horizontal_arc(&space, p.xy(), q.xy(), p.z, ARC_SAMPLES)?;
                    a.end = q;
                    a
                }
                ArcKind::Vertical => vertical_arc(p.xy(), p.z, q.z, ARC_SAMPLES),
            };
            out.arcs.push(arc);
            out.labels.push(li);
        }
        if out.arcs.is_empty() {
            return Err(bad("no arcs"));
        }
        Ok(out)
    }
}

/// Parameters of the k-noid contour: hinge lengths `a` and `r` enclosing
/// `π/k`, vertical edge of length `r²`.
#[derive(Debug, Clone, Copy)]
pub struct KnoidSpec {
    pub space: SpaceParams,
    pub k: usize,
    pub a: f64,
    pub r: f64,
}

impl KnoidSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Invalid(format!("k = {} < 2", self.k)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Degenerate(format!("hinge length a = {}", self.a)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::Degenerate(format!("truncation r = {}", self.r)));
        }
        Ok(())
    }

    pub fn vertical_length(&self) -> f64 {
        self.r * self.r
    }

    pub fn apex(&self) -> BasePoint {
        self.space.base().origin()
    }

    /// Base directions of the hinge sides of length `a` and `r` at the apex.
    /// The loop apex → A → R is negatively oriented.
    pub fn hinge_angles(&self) -> (f64, f64) {
        let o = self.space.model().orientation();
        let half = PI / (2.0 * self.k as f64);
        (FRAC_PI_2 + o * half, FRAC_PI_2 - o * half)
    }
}

/// Triangle `Δ_r` as `[apex, R, A]` (positively oriented).
pub fn knoid_triangle(spec: &KnoidSpec) -> Result<BasePolygon> {
    spec.validate()?;
    let base = spec.space.base();
    let p0 = spec.apex();
    let (ta, tr) = spec.hinge_angles();
    let a = base.exp(p0, ta, spec.a).0;
    let r = base.exp(p0, tr, spec.r).0;
    base.check(a)?;
    base.check(r)?;
    BasePolygon::from_vertices(base, vec![p0, r, a])
}

#[derive(Debug, Clone)]
pub struct KnoidContour {
    pub spec: KnoidSpec,
    pub triangle: BasePolygon,
    pub contour: Contour,
    /// Closing vertical distance measured on the numerically lifted contour.
    pub gap: f64,
    /// `s - 2τ·area(Δ_r)`.
    pub gap_formula: f64,
}

/// Contour `Γ_r`: horizontal lifts of the hinge, the vertical edge of length
/// `s = r²` at `A`, the lift of the closing side and the final vertical at `R`.
/// Heights are normalized so the apex sits at `z = 0`.
pub fn knoid_contour(spec: &KnoidSpec) -> Result<KnoidContour> {
    knoid_contour_with_samples(spec, ARC_SAMPLES)
}

pub fn knoid_contour_with_samples(spec: &KnoidSpec, samples: usize) -> Result<KnoidContour> {
    let tri = knoid_triangle(spec)?;
    let space = spec.space;
    let (p0, r, a) = (tri.vertices[0], tri.vertices[1], tri.vertices[2]);
    let s = spec.vertical_length();
    let probe = horizontal_arc(&space, r, p0, 0.0, samples)?;
    let zr = -probe.end.z;
    let arc1 = horizontal_arc(&space, r, p0, zr, samples)?;
    let arc2 = horizontal_arc(&space, p0, a, arc1.end.z, samples)?;
    let za = arc2.end.z;
    let arc3 = vertical_arc(a, za, za + s, samples);
    let arc4 = horizontal_arc(&space, a, r, za + s, samples)?;
    let zr2 = arc4.end.z;
    let arc5 = vertical_arc(r, zr2, zr, samples);
    let contour = Contour {
        space,
        arcs: vec![arc1, arc2, arc3, arc4, arc5],
        labels: ["R", "P0", "A", "A+", "R+"].iter().map(|s| s.to_string()).collect(),
        closed: true,
    };
    let gap = zr2 - zr;
    let gap_formula = s - 2.0 * space.tau() * tri.area();
    Ok(KnoidContour {
        spec: *spec,
        triangle: tri,
        contour,
        gap,
        gap_formula,
    })
}

/// Parameters of the 2k-noid contour `Γ_n` over `Δ_n(d, α)`.
#[derive(Debug, Clone, Copy)]
pub struct Noid2kSpec {
    pub space: SpaceParams,
    pub k: usize,
    pub d: f64,
    pub alpha: f64,
    pub n: f64,
}

impl Noid2kSpec {
    pub fn phi(&self) -> f64 {
        PI / self.k as f64
    }

    /// `δ = φ/2 - α`.
    pub fn delta(&self) -> f64 {
        0.5 * self.phi() - self.alpha
    }

    pub fn is_symmetric(&self) -> bool {
        self.delta().abs() < 1e-12
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Invalid(format!("k = {} < 2", self.k)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::Degenerate(format!("diagonal d = {}", self.d)));
        }
        if !(self.alpha > 0.0) || self.alpha > 0.5 * self.phi() + 1e-12 {
            return Err(Error::Invalid(format!(
                "alpha = {} outside (0, π/(2k)]",
                self.alpha
            )));
        }
        if !(self.n > 0.0 && self.n.is_finite()) {
            return Err(Error::Degenerate(format!("truncation n = {}", self.n)));
        }
        Ok(())
    }

    /// Base direction of the edge `p̂₁ → B`; the quadrilateral is placed
    /// symmetric about the vertical through `p̂₁`.
    pub fn first_angle(&self) -> f64 {
        let o = self.space.model().orientation();
        FRAC_PI_2 - o * 0.5 * self.phi()
    }
}

/// `Δ_n(d, α)` as `[p̂₁, B, p̂, C]`, positively oriented, where `B` and `C`
/// end the two edges of length `n` and `p̂` ends the diagonal.
pub fn noid2k_quad(spec: &Noid2kSpec) -> Result<BasePolygon> {
    spec.validate()?;
    let base = spec.space.base();
    let o = base.orientation;
    let p1 = base.origin();
    let t1 = spec.first_angle();
    let b = base.exp(p1, t1, spec.n).0;
    let ph = base.exp(p1, t1 + o * spec.alpha, spec.d).0;
    let c = base.exp(p1, t1 + o * spec.phi(), spec.n).0;
    for q in [b, ph, c] {
        base.check(q)?;
    }
    let quad = BasePolygon::from_vertices(base, vec![p1, b, ph, c])?;
    if !quad.is_simple() || quad.oriented_area <= 0.0 {
        return Err(Error::Degenerate("quadrilateral is not simple".into()));
    }
    Ok(quad)
}

#[derive(Debug, Clone)]
pub struct Noid2kContour {
    pub spec: Noid2kSpec,
    pub quad: BasePolygon,
    pub contour: Contour,
    pub c4: f64,
    pub c5: f64,
    /// Measured `z(p4) - z(p5)`.
    pub gap: f64,
    /// `2H·area(Δ_n) + 2n + c4 + c5`.
    pub gap_formula: f64,
}

/// Contour `Γ_n` with labels `p1 … p7`, with the extra vertical translations
/// `c4` of `p4` (upward) and `c5` of `p5` (downward).
pub fn noid2k_contour(spec: &Noid2kSpec) -> Result<Noid2kContour> {
    noid2k_contour_translated(spec, 0.0, 0.0)
}

pub fn noid2k_contour_translated(spec: &Noid2kSpec, c4: f64, c5: f64) -> Result<Noid2kContour> {
    noid2k_contour_with_samples(spec, c4, c5, ARC_SAMPLES)
}

pub fn noid2k_contour_with_samples(spec: &Noid2kSpec, c4: f64, c5: f64, samples: usize) -> Result<Noid2kContour> {
    if !(c4 >= 0.0) || !(c5 >= 0.0) {
        return Err(Error::Invalid("translations c4, c5 must be nonnegative".into()));
    }
    let quad = noid2k_quad(spec)?;
    let space = spec.space;
    let (p1b, b, ph, c) = (quad.vertices[0], quad.vertices[1], quad.vertices[2], quad.vertices[3]);
    let n = spec.n;
    // height of p̂ on the lift p̂ → C → p̂₁ that ends at height 0
    let probe1 = horizontal_arc(&space, ph, c, 0.0, samples)?;
    let probe2 = horizontal_arc(&space, c, p1b, probe1.end.z, samples)?;
    let z5_orig = -probe2.end.z;

    let a1 = horizontal_arc(&space, p1b, b, 0.0, samples)?;
    let z2 = a1.end.z;
    let z3 = z2 + n + c4;
    let a2 = vertical_arc(b, z2, z3, samples);
    let a3 = horizontal_arc(&space, b, ph, z3, samples)?;
    let z4 = a3.end.z;
    let z5 = z5_orig - n - c5;
    let a4 = vertical_arc(ph, z4, z5, samples);
    let a5 = horizontal_arc(&space, ph, c, z5, samples)?;
    let z6 = a5.end.z;
    let z7 = z6 + n + c5;
    let a6 = vertical_arc(c, z6, z7, samples);
    let a7 = horizontal_arc(&space, c, p1b, z7, samples)?;
    let contour = Contour {
        space,
        arcs: vec![a1, a2, a3, a4, a5, a6, a7],
        labels: (1..=7).map(|i| format!("p{i}")).collect(),
        closed: true,
    };
    Ok(Noid2kContour {
        spec: *spec,
        gap: z4 - z5,
        gap_formula: 2.0 * space.h_mean * quad.area() + 2.0 * n + c4 + c5,
        quad,
        contour,
        c4,
        c5,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SlabCheck {
    /// Smallest `U4 - z` over the checked contour points.
    pub upper_margin: f64,
    /// Smallest `z - U5` over the checked contour points.
    pub lower_margin: f64,
}

impl SlabCheck {
    pub fn upper_ok(&self) -> bool {
        self.upper_margin > 0.0
    }

    pub fn lower_ok(&self) -> bool {
        self.lower_margin > 0.0
    }
}

impl Noid2kContour {
    /// Umbrellas `U4` at `p4` and `U5` at `p5`.
    pub fn umbrellas(&self) -> (UmbrellaPatch, UmbrellaPatch) {
        let model = self.spec.space.model();
        let p4 = self.contour.vertex("p4").unwrap();
        let p5 = self.contour.vertex("p5").unwrap();
        (
            UmbrellaPatch { model, centre: p4, radius: 1.0 },
            UmbrellaPatch { model, centre: p5, radius: 1.0 },
        )
    }

    /// Containment of the sampled contour in the slab between the umbrellas,
    /// skipping the edges `p3p4` and `p5p6` (which lie in the umbrellas) and
    /// the end points they share with the neighbouring vertical arcs.
    pub fn slab_check(&self) -> SlabCheck {
        let (u4, u5) = self.umbrellas();
        let skip_pts: Vec<ModelPoint> = ["p3", "p4", "p5", "p6"]
            .iter()
            .map(|l| self.contour.vertex(l).unwrap())
            .collect();
        let mut up = f64::INFINITY;
        let mut low = f64::INFINITY;
        for (i, arc) in self.contour.arcs.iter().enumerate() {
            let label = &self.contour.labels[i];
            if label == "p3" || label == "p5" {
                continue;
            }
            for p in &arc.samples.points {
                if skip_pts.iter().any(|s| (s - p).norm() < 1e-9) {
                    continue;
                }
                let q = p.xy();
                up = up.min(u4.height_at(q) - p.z);
                low = low.min(p.z - u5.height_at(q));
            }
        }
        SlabCheck {
            upper_margin: up,
            lower_margin: low,
        }
    }
}

/// Re-translation of `p4` and `p5`: keep `c = 0` if the slab check passes,
/// otherwise start at `c = 1` and double until it does.
pub fn noid2k_retranslate(spec: &Noid2kSpec) -> Result<Noid2kContour> {
    let mut c4 = 0.0;
    let mut c5 = 0.0;
    for _ in 0..40 {
        let cont = noid2k_contour_translated(spec, c4, c5)?;
        let check = cont.slab_check();
        if check.upper_ok() && check.lower_ok() {
            return Ok(cont);
        }
        if !check.upper_ok() {
            c4 = if c4 == 0.0 { 1.0 } else { 2.0 * c4 };
        }
        if !check.lower_ok() {
            c5 = if c5 == 0.0 { 1.0 } else { 2.0 * c5 };
        }
    }
    Err(Error::Numerical("umbrella slab re-translation did not terminate".into()))
}

/// One side of the projected polygon with the height of its lifted arc at
/// the start vertex.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySide {
    pub start: usize,
    pub end: usize,
    pub start_height: f64,
}

/// Two-sided trace at the projection of a vertical arc.
#[derive(Debug, Clone, Copy)]
pub struct Jump {
    pub vertex: usize,
    /// Height of the side ending at the vertex.
    pub incoming: f64,
    /// Height of the side starting at the vertex.
    pub outgoing: f64,
}

impl Jump {
    pub fn magnitude(&self) -> f64 {
        self.outgoing - self.incoming
    }
}

/// Dirichlet data on the boundary of the projected polygon, which is stored
/// positively oriented.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub model: Model,
    pub polygon: BasePolygon,
    pub labels: Vec<String>,
    pub sides: Vec<BoundarySide>,
    pub jumps: Vec<Jump>,
}

impl BoundaryData {
    /// Height of the lifted side `side` over the base point `q` on it.
    pub fn side_height(&self, side: usize, q: BasePoint) -> f64 {
        let s = &self.sides[side];
        s.start_height + self.model.geodesic_lift(self.polygon.vertices[s.start], q)
    }

    pub fn side_end_height(&self, side: usize) -> f64 {
        self.side_height(side, self.polygon.vertices[self.sides[side].end])
    }

    pub fn jump_at(&self, vertex: usize) -> Option<&Jump> {
        self.jumps.iter().find(|j| j.vertex == vertex)
    }

    /// Numerically lifted profile of a side.
    pub fn side_profile(&self, space: &SpaceParams, side: usize, samples: usize) -> Result<CurveSample> {
        let s = &self.sides[side];
        let arc = GeodesicArc::between(self.polygon.base, self.polygon.vertices[s.start], self.polygon.vertices[s.end]);
        horizontal_lift(space, &arc, s.start_height, samples)
    }

    /// Smallest and largest boundary height. Lifted geodesic heights are
    /// monotone, so the side end points suffice.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.sides.len() {
            for z in [self.sides[i].start_height, self.side_end_height(i)] {
                lo = lo.min(z);
                hi = hi.max(z);
            }
        }
        (lo, hi)
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Dirichlet data of a closed contour whose horizontal arcs project onto the
/// sides of a simple polygon and whose vertical arcs project to its vertices.
pub fn boundary_heights(contour: &Contour) -> Result<BoundaryData> {
    if !contour.closed {
        return Err(Error::Invalid("boundary data needs a closed contour".into()));
    }
    let model = contour.space.model();
    let base: BaseSurface = model.base();
    let mut verts: Vec<BasePoint> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut sides: Vec<(BasePoint, BasePoint, f64)> = Vec::new();
    let n = contour.arcs.len();
    let first_h = contour
        .arcs
        .iter()
        .position(|a| a.kind == ArcKind::Horizontal)
        .ok_or_else(|| Error::Invalid("contour without horizontal arcs".into()))?;
    for k in 0..n {
        let i = (first_h + k) % n;
        let arc = &contour.arcs[i];
        if arc.kind == ArcKind::Horizontal {
            verts.push(arc.start.xy());
            labels.push(contour.labels[i].clone());
            sides.push((arc.start.xy(), arc.end.xy(), arc.start.z));
        }
    }
    let polygon = BasePolygon::from_vertices(base, verts.clone())?;
    if !polygon.is_simple() {
        return Err(Error::Invalid("projected contour is not a simple polygon".into()));
    }
    let m = verts.len();
    let mut data_sides: Vec<BoundarySide> = (0..m)
        .map(|i| BoundarySide {
            start: i,
            end: (i + 1) % m,
            start_height: sides[i].2,
        })
        .collect();
    let mut poly = polygon;
    if poly.oriented_area < 0.0 {
        // new side i runs backwards along old side m-2-i
        let rev: Vec<BoundarySide> = (0..m)
            .map(|i| {
                let old = data_sides[(2 * m - 2 - i) % m];
                BoundarySide {
                    start: i,
                    end: (i + 1) % m,
                    start_height: old.start_height + model.geodesic_lift(verts[old.start], verts[old.end]),
                }
            })
            .collect();
        poly = poly.reversed();
        labels.reverse();
        data_sides = rev;
    }
    let mut data = BoundaryData {
        model,
        polygon: poly,
        labels,
        sides: data_sides,
        jumps: Vec::new(),
    };
    for v in 0..m {
        let incoming = (0..m).find(|&i| data.sides[i].end == v).unwrap();
        let outgoing = (0..m).find(|&i| data.sides[i].start == v).unwrap();
        let zin = data.side_end_height(incoming);
        let zout = data.sides[outgoing].start_height;
        if (zout - zin).abs() > 1e-9 * (1.0 + zin.abs()) {
            data.jumps.push(Jump {
                vertex: v,
                incoming: zin,
                outgoing: zout,
            });
        }
    }
    Ok(data)
}

/// Result of the tangent-cone angle evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ConeAngle {
    pub psi: f64,
    pub psi_sup: f64,
    pub mid_height: f64,
    pub below_pi: bool,
}

/// Opening angle `ψ = β₊(h) + β₋(h) + δ` at the mid height `h = (h₊ - h₋)/2`,
/// together with the bound `2(π - φ - ε) + δ`.
pub fn tangent_cone_angle(
    h_plus: f64,
    h_minus: f64,
    delta: f64,
    phi: f64,
    epsilon: f64,
    beta_plus: &dyn Fn(f64) -> Option<f64>,
    beta_minus: &dyn Fn(f64) -> Option<f64>,
) -> Result<ConeAngle> {
    let mid = 0.5 * (h_plus - h_minus);
    let bp = beta_plus(mid).ok_or_else(|| Error::Domain(format!("β₊ undefined at height {mid}")))?;
    let bm = beta_minus(mid).ok_or_else(|| Error::Domain(format!("β₋ undefined at height {mid}")))?;
    let cap = PI - 0.5 * phi - epsilon;
    for b in [bp, bm] {
        if !(b >= 0.0 && b < cap) {
            return Err(Error::Invalid(format!("profile angle {b} outside [0, {cap})")));
        }
    }
    let psi = bp + bm + delta;
    Ok(ConeAngle {
        psi,
        psi_sup: 2.0 * (PI - phi - epsilon) + delta,
        mid_height: mid,
        below_pi: psi < PI,
    })
}
