use proptest::prelude::*;

use welding_core::control::ControlFunction;
use welding_core::geometry::envelope::arc_min_diameter;
use welding_core::geometry::hull::{convex_hull, diameter, diameter_brute};
use welding_core::geometry::{
    duality_check, internal_distance, lc_check, make_domain, three_point_envelope, DomainFamily, DualityOptions,
    FitFamily, JordanCurve, LcKind, LcOptions, Point, Side,
};

fn cusp() -> JordanCurve {
    make_domain(DomainFamily::InteriorCusp { s: 0.5 }, 1024).unwrap()
}

proptest! {
    #[test]
    fn hull_diameter_matches_brute_force(pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..80)) {
        let pts: Vec<Point> = pts.into_iter().map(|(x, y)| [x, y]).collect();
        let (fast, slow) = (diameter(&pts), diameter_brute(&pts));
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0), "{} vs {}", fast, slow);
        let hull = convex_hull(&pts);
        prop_assert!(hull.len() <= pts.len());
    }
}

#[test]
fn arc_diameter_is_symmetric_and_bounded() {
    for curve in [cusp(), make_domain(DomainFamily::Square, 256).unwrap()] {
        let n = curve.len();
        let diam = curve.diameter();
        for i in (0..n).step_by(37) {
            for j in (0..n).step_by(53) {
                if i == j {
                    continue;
                }
                let m = arc_min_diameter(&curve, i, j);
                assert_eq!(m, arc_min_diameter(&curve, j, i));
                assert!(m <= diam + 1e-12);
            }
        }
    }
}

#[test]
fn envelope_pairs_respect_diameter() {
    let env = three_point_envelope(&cusp(), 4000, 7).unwrap();
    assert_eq!(env.pairs.len(), 4000);
    assert!(env.pairs.iter().all(|p| p.i != p.j && p.m <= env.curve_diameter + 1e-12 && p.d > 0.0));
    assert!(env.max_ratio > 3.0, "{}", env.max_ratio);
    assert_ne!(env.family, FitFamily::Linear);
    let disk = three_point_envelope(&make_domain(DomainFamily::Disk, 512).unwrap(), 4000, 7).unwrap();
    assert_eq!(disk.family, FitFamily::Linear);
    assert!(disk.max_ratio <= 1.0 + 1e-9);
}

#[test]
fn doubling_phi_never_lowers_pass_fraction() {
    let curve = cusp();
    let opts = LcOptions { kind: LcKind::Lc1, grid_res: 256, probe_count: 80, seed: 5 };
    for side in [Side::Interior, Side::Exterior] {
        let mut prev = 0.0;
        for c in [1.0, 2.0, 4.0] {
            let rep = lc_check(&curve, side, &ControlFunction::linear(c).unwrap(), &opts).unwrap();
            assert!(rep.pass_fraction >= prev, "{side:?} c = {c}: {} < {prev}", rep.pass_fraction);
            prev = rep.pass_fraction;
        }
    }
}

#[test]
fn internal_distance_dominates_euclidean() {
    let disk = make_domain(DomainFamily::Disk, 512).unwrap();
    let (a, b) = ([-0.5, 0.1], [0.4, -0.3]);
    let d = internal_distance(&disk, Side::Interior, a, b, 256).unwrap();
    let e = (a[0] - b[0]).hypot(a[1] - b[1]);
    assert!(d >= e - 2.0 * 2.0 / 256.0 && d <= 1.05 * e, "{d} vs {e}");

    let c = cusp();
    let (a, b) = ([0.9, 0.27], [0.9, -0.27]);
    let d = internal_distance(&c, Side::Interior, a, b, 512).unwrap();
    let e = (a[0] - b[0]).hypot(a[1] - b[1]);
    assert!(d >= 1.5 * e, "{d} vs {e}");
    assert!(internal_distance(&c, Side::Interior, a, [0.5, 0.0], 256).is_err());
}

#[test]
fn mismatched_linear_control_fails_on_the_cusp() {
    let opts = DualityOptions { grid_res: 256, probe_count: 60, pair_samples: 3000, seed: 42 };
    let rep = duality_check(&cusp(), &ControlFunction::linear(1.0).unwrap(), &opts).unwrap();
    assert!(!(rep.tp_to_lc && rep.lc_to_tp), "{rep:?}");
}
