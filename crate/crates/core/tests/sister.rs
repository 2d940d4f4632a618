use noidkit::contours::KnoidSpec;
use noidkit::plateau::{default_stops, solve_knoid};
use noidkit::reference::{helicoid_by_rise, helicoid_patch, vertical_plane};
use noidkit::sister::*;
use noidkit::solver::SolverOptions;
use noidkit::{ModelPoint, SpaceParams};
use proptest::prelude::*;
use std::f64::consts::PI;

fn sp(k: f64, h: f64) -> SpaceParams {
    SpaceParams::new(k, h).unwrap()
}

fn axis_point(space: &SpaceParams) -> ModelPoint {
    let o = space.base().origin();
    ModelPoint::new(o.x + 0.1, o.y, 0.3)
}

#[test]
fn sister_curvature_examples() {
    assert_eq!(sister_curvature(0.5, 0.0, 0.0), (0.5, 0.0));
    assert_eq!(sister_curvature(0.0, 0.7, -0.2), (0.2, 0.7));
    let rel = SisterRelations::new(0.3);
    assert_eq!(rel.map(1.5, 0.25), (0.3 - 0.25, 1.5));
}

proptest! {
    #[test]
    fn sister_relations_are_exact(h in -1.0f64..1.0, k in -5.0f64..5.0, t in -5.0f64..5.0) {
        let rel = SisterRelations::new(h);
        let (ks, ts) = rel.map(k, t);
        prop_assert_eq!(ks, -t + h);
        prop_assert_eq!(ts, k);
        let (k2, t2) = rel.unmap(ks, ts);
        prop_assert_eq!(k2, k);
        prop_assert!((t2 - t).abs() <= 1e-15 * (1.0 + t.abs() + h.abs()));
    }

    #[test]
    fn mirror_length_matches_vertical_length(rate in -2.0f64..2.0, len in 0.1f64..4.0, h in 0.0f64..0.5) {
        let tw = TwistProfile::uniform(rate, len, 17);
        let mc = mirror_curve(-1.0, h, &tw).unwrap();
        prop_assert!((mc.length() - tw.length()).abs() < 1e-12);
        let chords: f64 = (1..mc.curve.len()).map(|i| mc.distance(i - 1, i)).sum();
        prop_assert!(chords <= tw.length() * (1.0 + 1e-9));
        prop_assert!(chords >= tw.length() * (1.0 - 1e-6));
    }
}

#[test]
fn twist_from_torsion_round_trip() {
    let h = 0.4;
    let params: Vec<f64> = (0..2001).map(|i| 3.0 * i as f64 / 2000.0).collect();
    let torsion: Vec<f64> = params.iter().map(|s| (2.0 * s).sin()).collect();
    let tw = twist_from_torsion(h, &params, &torsion).unwrap();
    for i in 1..params.len() - 1 {
        let d = (tw.alpha[i + 1] - tw.alpha[i - 1]) / (params[i + 1] - params[i - 1]);
        assert!((d - (torsion[i] + h)).abs() < 1e-5);
        assert_eq!(tw.alpha_prime[i], torsion[i] + h);
    }
    let exact = (1.0 - (6.0f64).cos()) / 2.0 + 3.0 * h;
    assert!((tw.total() - exact).abs() < 1e-5);
    assert!(twist_from_torsion(h, &params[..1], &torsion[..1]).is_err());
}

#[test]
fn vertical_plane_has_no_twist() {
    for space in [sp(-1.0, 0.0), sp(-1.0, 0.3), sp(-1.0, 0.5), sp(0.0, 0.0)] {
        let model = space.model();
        let o = space.base().origin();
        let plane = vertical_plane(&space, o, 0.4, [-0.5, 0.5], [-1.0, 1.0]).unwrap();
        let tw = twist_along_patch_axis(&model, &plane, 0.0, [-0.8, 0.8], 41).unwrap();
        assert!(tw.alpha_prime.iter().all(|r| r.abs() < 1e-8), "{:?}", tw.min_rate());
        let m_tau = helicoid_patch(&space, axis_point(&space), 0.4, space.tau(), 0.5, 1.0).unwrap();
        let tw = twist_along_patch_axis(&model, &m_tau, 0.0, [-0.8, 0.8], 41).unwrap();
        assert!(tw.alpha_prime.iter().all(|r| r.abs() < 1e-8));
    }
}

#[test]
fn helicoid_twist_rate() {
    let space = sp(0.0, 0.0);
    for rise in [0.5, 1.0, -2.0, 3.7] {
        let heli = helicoid_by_rise(&space, axis_point(&space), 0.2, rise, 0.5, 2.0).unwrap();
        let tw = twist_along_patch_axis(&space.model(), &heli, 0.0, [-1.5, 1.5], 61).unwrap();
        assert!(tw.alpha_prime.iter().all(|r| (r - 1.0 / rise).abs() < 1e-7), "{rise}");
        assert!((tw.total() - 3.0 / rise).abs() < 1e-7);
    }
    for space in [sp(-1.0, 0.5), sp(-1.0, 0.3), sp(-1.0, 0.0)] {
        for pitch in [-1.0, 0.0, 0.8, 2.5] {
            let heli = helicoid_patch(&space, axis_point(&space), 0.0, pitch, 0.5, 1.0).unwrap();
            let tw = twist_along_patch_axis(&space.model(), &heli, 0.0, [-0.8, 0.8], 41).unwrap();
            let want = pitch - space.tau();
            assert!(tw.alpha_prime.iter().all(|r| (r - want).abs() < 1e-6), "{pitch} {:?}", tw.min_rate());
        }
    }
}

#[test]
fn geodesic_mirror_curve() {
    for (kappa, h) in [(-1.0, 0.5), (0.0, 0.3), (-2.0, 0.0)] {
        let tw = TwistProfile::uniform(2.0 * h, 3.0, 2);
        let mc = mirror_curve(kappa, h, &tw).unwrap();
        assert!(mc.curve.curvature.iter().all(|k| k.abs() < 1e-15));
        let n = mc.curve.len() - 1;
        assert!((mc.distance(0, n) - 3.0).abs() < 1e-10);
        let check = gauss_bonnet_loop_check(&mc);
        assert_eq!(check.verdict, LoopVerdict::EmbeddedConsistent);
        assert!(check.loops.is_empty());
    }
}

#[test]
fn horocycle_chord_lengths() {
    let tw = TwistProfile::uniform(1.0, 6.0, 2);
    let mc = mirror_curve(-1.0, 0.0, &tw).unwrap();
    assert!(mc.curve.curvature.iter().all(|k| *k == -1.0));
    for i in (100..mc.curve.len()).step_by(500) {
        let s = mc.curve.params[i];
        assert!((mc.distance(0, i) - 2.0 * (0.5 * s).asinh()).abs() < 1e-9);
    }
    assert_eq!(gauss_bonnet_loop_check(&mc).verdict, LoopVerdict::EmbeddedConsistent);
}

#[test]
fn hypercycle_is_unbounded_and_embedded() {
    for c in [0.3, -0.6, 0.9] {
        let tw = TwistProfile::uniform(-c, 12.0, 2);
        let mc = mirror_curve(-1.0, 0.0, &tw).unwrap();
        let dists: Vec<f64> = (0..mc.curve.len()).step_by(200).map(|i| mc.distance(0, i)).collect();
        assert!(dists.windows(2).all(|w| w[1] > w[0]));
        // a hypercycle at distance d from its axis has curvature tanh d
        let d = c.abs().atanh();
        let s = mc.length();
        let chord = 2.0 * ((0.5 * s / d.cosh()).sinh() * d.cosh()).asinh();
        assert!((dists.last().unwrap() - chord).abs() < 0.3);
        assert_eq!(gauss_bonnet_loop_check(&mc).verdict, LoopVerdict::EmbeddedConsistent);
    }
}

#[test]
fn circle_loop_satisfies_gauss_bonnet() {
    for (kappa, rho) in [(-1.0, 0.8), (-1.0, 0.3), (-0.5, 1.2), (0.0, 0.7)] {
        let m: f64 = -kappa;
        let (k, len, area) = if kappa == 0.0 {
            (1.0 / rho, 2.0 * PI * rho, PI * rho * rho)
        } else {
            let sr = m.sqrt();
            (
                sr / (sr * rho).tanh(),
                2.0 * PI * (sr * rho).sinh() / sr,
                2.0 * PI * ((sr * rho).cosh() - 1.0) / m,
            )
        };
        for sign in [1.0, -1.0] {
            let tw = TwistProfile::uniform(-sign * k, 1.05 * len, 2);
            let mc = mirror_curve(kappa, 0.0, &tw).unwrap();
            let check = gauss_bonnet_loop_check(&mc);
            assert!(!check.loops.is_empty(), "{kappa} {rho} {sign}");
            let lp = check.loops[0];
            assert!(lp.gauss_bonnet_residual.abs() < 1e-6, "{kappa} {rho} {lp:?}");
            assert!((lp.length - len).abs() < 1e-6);
            assert!((lp.signed_area - sign * area).abs() < 1e-6, "{lp:?} {area}");
            if sign > 0.0 {
                assert!(!lp.exceeds_pi());
                assert_eq!(check.verdict, LoopVerdict::LoopWithoutContradiction);
            } else {
                assert!((lp.twist - (2.0 * PI - kappa * area)).abs() < 1e-6);
                assert_eq!(check.verdict, LoopVerdict::ContradictionFound);
            }
        }
    }
}

#[test]
fn loop_needing_large_twist_is_a_contradiction() {
    let tw = TwistProfile::uniform(1.0, 1.05 * 2.0 * PI, 2);
    let mc = mirror_curve(0.0, 1.0, &tw).unwrap();
    let check = gauss_bonnet_loop_check(&mc);
    assert_eq!(check.verdict, LoopVerdict::ContradictionFound);
    assert!((check.loops[0].twist - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn mirror_curve_errors() {
    let tw = TwistProfile::uniform(0.0, 1.0, 5);
    assert!(mirror_curve(1.0, 0.0, &tw).is_err());
    let bad = TwistProfile { params: vec![0.0, 1.0, 0.5], alpha: vec![0.0; 3], alpha_prime: vec![0.0; 3] };
    assert!(mirror_curve(-1.0, 0.0, &bad).is_err());
}

#[test]
fn solved_knoid_twists_monotonically() {
    let space = sp(-1.0, 0.5);
    let spec = KnoidSpec { space, k: 3, a: 1.0, r: 2.0 };
    let sol = solve_knoid(&spec, &default_stops(2.0), 5, &SolverOptions::default()).unwrap();
    let h = space.h_mean;
    for jump in &sol.data.jumps {
        let fan = fan_profile(&sol.graph, &sol.data, jump.vertex, 0.1, 300).unwrap();
        assert!(fan.is_monotone());
        let tw = twist_along_vertical(&sol.graph, &sol.data, jump.vertex, 0.1, 300).unwrap();
        assert!(tw.is_increasing(), "{}", tw.min_rate());
        assert!((tw.total() - sol.data.polygon.interior_angles[jump.vertex]).abs() < 1e-6);
        let mc = mirror_curve(space.kappa, h, &tw).unwrap();
        assert!(mc.max_curvature() < 2.0 * h);
        assert!((mc.length() - tw.length()).abs() < 1e-12);
        assert_eq!(gauss_bonnet_loop_check(&mc).verdict, LoopVerdict::EmbeddedConsistent);
    }
    assert!(twist_along_vertical(&sol.graph, &sol.data, sol.data.vertex_index("P0").unwrap(), 0.1, 50).is_err());
}
