use approx::assert_abs_diff_eq;
use nalgebra::{Vector2, Vector3};
use noidkit::base::{BaseSurface, FnCurve, GeodesicPath};
use noidkit::curve::{geodesic, horizontal_lift};
use noidkit::metric::{christoffels, metric_at};
use noidkit::polygon::{base_polygon_from_hinge, triangle_from_angles};
use noidkit::{ModelPoint, SpaceParams};
use proptest::prelude::*;
use std::f64::consts::PI;

fn sp(k: f64, h: f64) -> SpaceParams {
    SpaceParams::new(k, h).unwrap()
}

#[test]
fn metric_examples() {
    let g = metric_at(&sp(-1.0, 0.0), &ModelPoint::new(0.0, 1.0, 0.0)).unwrap();
    assert_abs_diff_eq!(g, nalgebra::Matrix3::identity(), epsilon = 1e-15);
    let g = metric_at(&sp(-1.0, 0.0), &ModelPoint::new(0.0, 2.0, 0.0)).unwrap();
    assert_abs_diff_eq!(g, nalgebra::Matrix3::from_diagonal(&Vector3::new(0.25, 0.25, 1.0)), epsilon = 1e-15);
    let heis = sp(-1.0, 0.5);
    assert!(matches!(heis.model(), noidkit::Model::Heisenberg { .. }));
    let g = metric_at(&heis, &ModelPoint::zeros()).unwrap();
    assert_abs_diff_eq!(g, nalgebra::Matrix3::identity(), epsilon = 1e-15);
}

#[test]
fn metric_errors() {
    assert!(metric_at(&sp(-1.0, 0.0), &ModelPoint::new(0.0, 0.0, 0.0)).is_err());
    assert!(metric_at(&sp(-1.0, 0.0), &ModelPoint::new(0.0, -1.0, 0.0)).is_err());
    assert!(SpaceParams::new(-0.5, 0.5).is_err());
    assert!(SpaceParams::new(0.1, 0.0).is_err());
    assert!(SpaceParams::new(-1.0, 0.6).is_err());
}

#[test]
fn christoffel_examples() {
    let c = christoffels(&sp(0.0, 0.0), &ModelPoint::new(0.3, 0.2, 1.0)).unwrap();
    assert!(c.iter().flatten().flatten().all(|&v| v == 0.0));
    let y = 1.7;
    let c = christoffels(&sp(-1.0, 0.0), &ModelPoint::new(0.4, y, 0.0)).unwrap();
    // Γ^x_{xy} = -1/y, Γ^y_{xx} = 1/y, Γ^y_{yy} = -1/y
    assert_abs_diff_eq!(c[0][0][1], -1.0 / y, epsilon = 1e-14);
    assert_abs_diff_eq!(c[1][0][0], 1.0 / y, epsilon = 1e-14);
    assert_abs_diff_eq!(c[1][1][1], -1.0 / y, epsilon = 1e-14);
    assert_abs_diff_eq!(c[0][0][0], 0.0, epsilon = 1e-14);
}

/// Christoffel symbols from central differences of the metric.
fn fd_christoffels(space: &SpaceParams, p: ModelPoint) -> [[[f64; 3]; 3]; 3] {
    let h = 1e-5;
    let mut dg = [nalgebra::Matrix3::zeros(); 3];
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = h;
        let gp = metric_at(space, &(p + e)).unwrap();
        let gm = metric_at(space, &(p - e)).unwrap();
        dg[k] = (gp - gm) / (2.0 * h);
    }
    let gi = metric_at(space, &p).unwrap().try_inverse().unwrap();
    let mut out = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += gi[(l, k)] * (dg[i][(k, j)] + dg[j][(k, i)] - dg[k][(i, j)]);
                }
                out[l][i][j] = 0.5 * s;
            }
        }
    }
    out
}

fn space_strategy() -> impl Strategy<Value = SpaceParams> {
    prop_oneof![
        (-2.0f64..-0.05, 0.0f64..0.5).prop_filter_map("kappa_e < 0", |(k, h)| {
            if k + 4.0 * h * h < -0.02 {
                Some(SpaceParams::new(k, h).unwrap())
            } else {
                None
            }
        }),
        (0.05f64..0.5).prop_map(|h| SpaceParams::new(-4.0 * h * h, h).unwrap()),
        Just(SpaceParams::new(0.0, 0.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn christoffels_match_finite_differences(space in space_strategy(), x in -2.0f64..2.0, y in 0.3f64..3.0, z in -2.0f64..2.0) {
        let p = ModelPoint::new(x, y, z);
        let c = christoffels(&space, &p).unwrap();
        let f = fd_christoffels(&space, p);
        for l in 0..3 { for i in 0..3 { for j in 0..3 {
            prop_assert!((c[l][i][j] - f[l][i][j]).abs() < 1e-6, "{l}{i}{j}: {} vs {}", c[l][i][j], f[l][i][j]);
        }}}
    }

    #[test]
    fn metric_unit_fiber_and_positive(space in space_strategy(), x in -5.0f64..5.0, y in 0.01f64..10.0, z in -5.0f64..5.0) {
        let g = metric_at(&space, &ModelPoint::new(x, y, z)).unwrap();
        prop_assert!((g[(2, 2)] - 1.0).abs() < 1e-15);
        prop_assert!((g - g.transpose()).norm() == 0.0);
        prop_assert!(g.cholesky().is_some());
    }

    #[test]
    fn open_lift_length_equals_base_length(space in space_strategy(), x0 in -1.0f64..1.0, y0 in 0.5f64..2.0, amp in 0.05f64..0.4, freq in 0.5f64..3.0) {
        let model = space.model();
        let base = model.base();
        let curve = FnCurve {
            t0: 0.0,
            t1: 1.0,
            f: |t: f64| {
                let q = Vector2::new(x0 + t, y0 + amp * (freq * t).sin());
                (q, Vector2::new(1.0, amp * freq * (freq * t).cos()))
            },
        };
        let lift = horizontal_lift(&space, &curve, 0.0, 4001).unwrap();
        let base_len: f64 = lift.points.windows(2).map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            let d = w[1] - w[0];
            base.conformal_sq(Vector2::new(m.x, m.y)).sqrt() * d.xy().norm()
        }).sum();
        let lift_len = lift.polyline_length(&model);
        prop_assert!((lift_len - base_len).abs() < 1e-8, "{lift_len} vs {base_len}");
        // horizontality of the sampled tangents
        for (p, t) in lift.points.iter().zip(&lift.tangents) {
            let g = model.metric(p);
            prop_assert!((g * t)[2].abs() < 1e-12);
        }
    }

    #[test]
    fn geodesic_reversibility(space in space_strategy(), ang in 0.0f64..6.0, tilt in -1.0f64..1.0) {
        let p = ModelPoint::new(0.1, 1.0, 0.2);
        let v = Vector3::new(ang.cos(), ang.sin(), tilt);
        let len = match space.model() { noidkit::Model::HalfPlane { .. } => 2.0, _ => 5.0 };
        let fwd = geodesic(&space, p, v, len, 64).unwrap();
        let end = fwd.last();
        let back = geodesic(&space, end, -*fwd.tangents.last().unwrap(), len, 64).unwrap();
        prop_assert!((back.last() - p).norm() < 1e-7);
    }
}

#[test]
fn geodesic_examples() {
    let g = geodesic(&sp(0.0, 0.0), ModelPoint::new(0.0, 1.0, 0.0), Vector3::new(1.0, 0.0, 0.0), 2.0, 10).unwrap();
    assert_abs_diff_eq!(g.last(), ModelPoint::new(2.0, 1.0, 0.0), epsilon = 1e-12);
    let g = geodesic(&sp(-1.0, 0.0), ModelPoint::new(0.0, 1.0, 0.0), Vector3::new(0.0, 1.0, 0.0), 1.0, 10).unwrap();
    assert_abs_diff_eq!(g.last().y, std::f64::consts::E, epsilon = 1e-9);
    assert_abs_diff_eq!(g.last().x, 0.0, epsilon = 1e-12);
    assert!(geodesic(&sp(0.0, 0.0), ModelPoint::zeros(), Vector3::zeros(), 1.0, 10).is_err());
    // leaving the half-plane: straight down from y = 1 never reaches y = 0 at
    // finite length, but a curved model point close to the boundary does not either;
    // a huge length in a narrow model still stays inside, so check the error path
    // through an invalid start instead
    assert!(geodesic(&sp(-1.0, 0.0), ModelPoint::new(0.0, -1.0, 0.0), Vector3::x(), 1.0, 10).is_err());
}

#[test]
fn geodesic_speed_drift_over_length_ten() {
    for space in [sp(-1.0, 0.3), sp(-1.0, 0.5), sp(-0.5, 0.2)] {
        let model = space.model();
        let p = ModelPoint::new(0.2, 1.0, 0.0);
        let g = geodesic(&space, p, Vector3::new(0.3, 0.2, 0.6), 10.0, 400).unwrap();
        for (q, t) in g.points.iter().zip(&g.tangents) {
            assert!((model.norm(q, t) - 1.0).abs() < 1e-8);
        }
    }
}

fn circle_loop(radius: f64, cx: f64, cy: f64, ccw: bool) -> impl noidkit::base::PlaneCurve {
    let s = if ccw { 1.0 } else { -1.0 };
    FnCurve {
        t0: 0.0,
        t1: 2.0 * PI,
        f: move |t: f64| {
            let (sn, cs) = (s * t).sin_cos();
            (
                Vector2::new(cx + radius * cs, cy + radius * sn),
                Vector2::new(-s * radius * sn, s * radius * cs),
            )
        },
    }
}

#[test]
fn holonomy_examples() {
    let heis = sp(-1.0, 0.5);
    let lift = horizontal_lift(&heis, &circle_loop(1.0, 0.0, 0.0, true), 0.0, 200).unwrap();
    assert_abs_diff_eq!(lift.last().z - lift.first().z, PI, epsilon = 1e-8);
    let sq: Vec<_> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        .iter()
        .map(|&(x, y)| Vector2::new(x, y))
        .collect();
    let path = GeodesicPath::through(heis.base(), &sq, true);
    let lift = horizontal_lift(&heis, &path, 0.0, 50).unwrap();
    assert_abs_diff_eq!(lift.last().z, 1.0, epsilon = 1e-8);
    // zero holonomy in the product case
    let lift = horizontal_lift(&sp(-1.0, 0.0), &circle_loop(0.5, 0.0, 1.0, true), 0.0, 50).unwrap();
    assert_abs_diff_eq!(lift.last().z, 0.0, epsilon = 1e-12);
}

#[test]
fn holonomy_in_half_plane_uses_chart_orientation() {
    let space = sp(-1.0, 0.3);
    let model = space.model();
    let m = -space.kappa_e();
    // hyperbolic disc of coordinate radius 0.5 about (0, 1)
    let (r, c): (f64, f64) = (0.5, 1.0);
    let area = 2.0 * PI / m * (c / (c * c - r * r).sqrt() - 1.0);
    for ccw in [true, false] {
        let lift = horizontal_lift(&space, &circle_loop(r, 0.0, c, ccw), 0.0, 100).unwrap();
        let sense = if ccw { 1.0 } else { -1.0 };
        let oriented = sense * model.orientation() * area;
        assert_abs_diff_eq!(lift.last().z, 2.0 * space.tau() * oriented, epsilon = 1e-8);
    }
}

#[test]
fn hinge_examples() {
    let t = base_polygon_from_hinge(0.0, &[3.0, 4.0], &[PI / 2.0]).unwrap();
    assert_abs_diff_eq!(t.side_lengths[1], 5.0, epsilon = 1e-12);
    assert_abs_diff_eq!(t.oriented_area, 6.0, epsilon = 1e-12);
    let base = BaseSurface::from_curvature(-1.0).unwrap();
    let t = triangle_from_angles(base, [PI / 2.0, PI / 4.0, PI / 6.0]).unwrap();
    assert_abs_diff_eq!(t.area(), PI / 12.0, epsilon = 1e-12);
    let mut angles = t.interior_angles.clone();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_abs_diff_eq!(angles[0], PI / 6.0, epsilon = 1e-10);
    assert_abs_diff_eq!(angles[2], PI / 2.0, epsilon = 1e-10);
    let t = base_polygon_from_hinge(-1.0, &[1.0, 10.0], &[PI / 3.0]).unwrap();
    assert!((t.area() - t.integrated_area(64)).abs() < 1e-6);
    assert!(base_polygon_from_hinge(-1.0, &[0.0, 1.0], &[1.0]).is_err());
    assert!(base_polygon_from_hinge(-1.0, &[1.0, 1.0], &[0.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hyperbolic_defect_equals_integrated_area(a in 0.1f64..4.0, b in 0.1f64..4.0, ang in 0.1f64..3.0, m in 0.2f64..2.0) {
        let t = base_polygon_from_hinge(-m, &[a, b], &[ang]).unwrap();
        prop_assert!((t.oriented_area - t.integrated_area(32)).abs() < 1e-6);
        let sum: f64 = t.interior_angles.iter().sum();
        prop_assert!((t.area() - (PI - sum) / m).abs() < 1e-12);
        // sides close: distances agree with the sides
        for i in 0..3 {
            let d = t.base.distance(t.vertices[i], t.vertices[(i + 1) % 3]);
            prop_assert!((d - t.side_lengths[i]).abs() < 1e-12);
        }
        prop_assert!((t.side_lengths[0] - a).abs() < 1e-9);
        prop_assert!((t.side_lengths[2] - b).abs() < 1e-9);
    }
}
