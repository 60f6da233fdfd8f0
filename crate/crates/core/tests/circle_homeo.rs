use std::f64::consts::TAU;

use proptest::prelude::*;
use welding_core::circle_homeo::{delta, rho, scalewise_profile, CircleHomeo};

fn zoo() -> Vec<CircleHomeo> {
    vec![
        CircleHomeo::identity(),
        CircleHomeo::rotation(0.37).unwrap(),
        CircleHomeo::power(1.5).unwrap(),
        CircleHomeo::power(3.0).unwrap(),
        CircleHomeo::log_power(0.5).unwrap(),
        CircleHomeo::tabulate(512, |x| x + 0.05 * (TAU * x).sin()).unwrap(),
    ]
}

proptest! {
    #[test]
    fn delta_is_at_least_one_and_periodic(k in 0usize..6, theta in -20.0f64..20.0, t in 1e-4f64..1.5) {
        let f = &zoo()[k];
        let d = delta(f, theta, t).unwrap();
        prop_assert!(d >= 1.0);
        let shifted = delta(f, theta + TAU, t).unwrap();
        prop_assert!((shifted - d).abs() <= 1e-9 * d, "{} vs {}", shifted, d);
    }

    #[test]
    fn lift_commutes_with_translation(k in 0usize..6, x in -5.0f64..5.0, m in -3i32..3) {
        let f = &zoo()[k];
        let a = f.lift(x + m as f64);
        let b = f.lift(x) + m as f64;
        prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn lift_is_increasing(k in 0usize..6, x in -2.0f64..2.0, dx in 1e-6f64..0.5) {
        let f = &zoo()[k];
        prop_assert!(f.lift(x + dx) > f.lift(x));
    }

    #[test]
    fn rho_is_rotation_invariant(k in 0usize..6, c in -0.5f64..0.5, t in 1e-3f64..1.0) {
        let f = &zoo()[k];
        let g = f.post_rotated(c);
        let (a, _) = rho(f, t, 256).unwrap();
        let (b, _) = rho(&g, t, 256).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a, "{} vs {}", a, b);
    }
}

#[test]
fn rho_of_isometries_is_one() {
    for f in [CircleHomeo::identity(), CircleHomeo::rotation(0.123).unwrap()] {
        for t in [1e-6, 1e-3, 0.1, 1.5] {
            assert!((rho(&f, t, 1024).unwrap().0 - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn refining_theta_grid_never_lowers_rho() {
    for f in zoo() {
        for t in [1e-3, 0.05, 0.7] {
            let coarse = rho(&f, t, 128).unwrap().0;
            let fine = rho(&f, t, 256).unwrap().0;
            assert!(fine >= coarse - 1e-12 * coarse, "{fine} < {coarse}");
        }
    }
}

#[test]
fn power_rho_grows_like_the_exponent() {
    // chords at the fixed point 0 give δ ≥ (2^{a-1} t^a ... ) ratio ~ t^{1-a}
    let f = CircleHomeo::power(2.0).unwrap();
    let grid: Vec<f64> = (4..12).map(|k| 2f64.powi(-k)).collect();
    let p = scalewise_profile(&f, &grid, 512).unwrap();
    let slope = (p.rho_values[7].ln() - p.rho_values[0].ln()) / (grid[0].ln() - grid[7].ln());
    assert!((slope - 1.0).abs() < 0.05, "{slope}");
}
