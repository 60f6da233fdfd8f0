//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::{E, PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use welding_core::ba_extension::ba_extend;
use welding_core::circle_homeo::CircleHomeo;
use welding_core::cli::{self, ClassifyConfig};
use welding_core::control::{decade_grid_ln, thm51_condition_ln, ControlFamily, ControlFunction, LimsupVerdict};
use welding_core::distortion::{
    dyadic_radii, fit_radial_exponent, integrability_report, p_sup_from_three_point, radial_profile, Verdict,
};
use welding_core::geometry::hull::diameter_brute;
use welding_core::geometry::{duality_check, make_domain, three_point_envelope, DomainFamily, DualityOptions, FitFamily};
use welding_core::modulus::{ring_modulus, RingProblem};
use welding_core::welding::{extend_welding, identity_radius, verify_scalewise_bound};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_identity_pipeline() -> Outcome {
    let t = Instant::now();
    let field = extend_welding(&CircleHomeo::identity()).map_err(|e| e.to_string())?;
    let samples = field.field_grid(256, 2.0).map_err(|e| e.to_string())?;
    let dz = samples.iter().map(|s| (s.g_re - s.re).hypot(s.g_im - s.im)).fold(0.0, f64::max);
    let dk = samples.iter().map(|s| (s.k - 1.0).abs()).fold(0.0, f64::max);
    let nan = samples.iter().filter(|s| s.k.is_nan()).count();
    let el = t.elapsed();
    ensure(
        dz <= 1e-9 && dk <= 1e-9 && nan == 0 && el < Duration::from_secs(10),
        format!("max|G-z| = {dz:.2e}, max|K-1| = {dk:.2e}, {el:.2?}"),
    )
}

fn c2_translation_and_trace() -> Outcome {
    let lifts = [
        ("identity", CircleHomeo::identity()),
        ("rotation(0.2)", CircleHomeo::rotation(0.2).unwrap()),
        ("power(1.5)", CircleHomeo::power(1.5).unwrap()),
        ("power(3)", CircleHomeo::power(3.0).unwrap()),
        ("log_power(0.5)", CircleHomeo::log_power(0.5).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_t, mut worst_b) = (0.0f64, 0.0f64);
    for (_, h) in &lifts {
        let strip = ba_extend(h, 64).map_err(|e| e.to_string())?;
        let field = extend_welding(h).map_err(|e| e.to_string())?;
        for k in 0..1000 {
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(1e-3..2.5));
            let a = strip.eval(z).map_err(|e| e.to_string())?;
            let b = strip.eval(z + 1.0).map_err(|e| e.to_string())?;
            worst_t = worst_t.max((b - a - 1.0).norm());
            let theta = TAU * k as f64 / 1000.0;
            let g = field.eval(Complex64::from_polar(1.0, theta)).map_err(|e| e.to_string())?;
            let (re, im) = h.apply(theta);
            worst_b = worst_b.max((g - Complex64::new(re, im)).norm());
        }
    }
    ensure(worst_t <= 1e-8 && worst_b <= 1e-8, format!("max|H(z+1)-H(z)-1| = {worst_t:.2e}, max|G~-G| on circle = {worst_b:.2e}"))
}

fn c3_identity_regions() -> Outcome {
    let field = extend_welding(&CircleHomeo::power(2.0).unwrap()).map_err(|e| e.to_string())?;
    let d = identity_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0;
    for _ in 0..1000 {
        let theta = rng.gen_range(0.0..TAU);
        let small = Complex64::from_polar(rng.gen_range(0.0..d / 2.0), theta);
        let large = Complex64::from_polar(2.0 / d * rng.gen_range(1.0f64..1e3), theta);
        for z in [small, large] {
            if field.eval(z).map_err(|e| e.to_string())? != z {
                bad += 1;
            }
        }
    }
    ensure(bad == 0 && (d - (-4.0 * PI).exp()).abs() == 0.0, format!("{bad} of 2000 samples moved; delta = {d:e}"))
}

fn c4_shear() -> Outcome {
    let c = 0.3;
    let strip = ba_extend(&CircleHomeo::rotation(c).unwrap(), 64).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let h = 1e-4;
    for k in 1..20 {
        let z = Complex64::new(0.37 * k as f64, 1.0 + 0.05 * k as f64);
        let exact = strip.differential_exact(z).map_err(|e| e.to_string())?;
        // fourth-order central differences of H as an independent oracle
        let f = |w: Complex64| strip.eval(w).unwrap();
        let d = |dir: Complex64| (8.0 * (f(z + dir * h) - f(z - dir * h)) - (f(z + dir * 2.0 * h) - f(z - dir * 2.0 * h))) / (12.0 * h);
        let (dx, dy) = (d(Complex64::new(1.0, 0.0)), d(Complex64::new(0.0, 1.0)));
        let closed = [[1.0, -c], [0.0, 1.0]];
        let fd = [[dx.re, dy.re], [dx.im, dy.im]];
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((exact[i][j] - closed[i][j]).abs()).max((fd[i][j] - closed[i][j]).abs());
            }
        }
    }
    ensure(worst <= 1e-10, format!("max entry error vs [[1,-c],[0,1]] = {worst:.2e}"))
}

fn c5_scalewise_bound() -> Outcome {
    let radii = dyadic_radii(3, 10);
    let mut parts = Vec::new();
    let mut ok = true;
    for a in [1.5, 2.0, 3.0] {
        let t = Instant::now();
        let field = extend_welding(&CircleHomeo::power(a).unwrap()).map_err(|e| e.to_string())?;
        let rep = verify_scalewise_bound(&field, &radii, 1024).map_err(|e| e.to_string())?;
        let el = t.elapsed();
        ok &= rep.variation < 2.0 && el < Duration::from_secs(120);
        parts.push(format!("a={a}: variation {:.3} ({el:.1?})", rep.variation));
    }
    ensure(ok, parts.join(", "))
}

fn c6_threshold() -> Outcome {
    let field = extend_welding(&CircleHomeo::power(2.0).unwrap()).map_err(|e| e.to_string())?;
    let annuli: Vec<f64> = (3..=11).map(|k| 2f64.powi(-k)).collect();
    let alpha = fit_radial_exponent(&radial_profile(&field, &annuli.iter().map(|e| 1.0 + e).collect::<Vec<_>>(), 1024).unwrap())
        .map_err(|e| e.to_string())?
        .alpha;
    let rep = integrability_report(&field, &[0.9 / alpha, 1.1 / alpha], &[], &annuli, 256).map_err(|e| e.to_string())?;
    let (lo, hi) = (&rep.p_trends[0], &rep.p_trends[1]);
    ensure(
        annuli.len() - 1 == 8 && lo.verdict == Verdict::Converging && hi.verdict == Verdict::Diverging,
        format!(
            "alpha {alpha:.3}: p={:.3} slope {:+.3} {:?}, p={:.3} slope {:+.3} {:?}",
            lo.exponent, lo.envelope_slope, lo.verdict, hi.exponent, hi.envelope_slope, hi.verdict
        ),
    )
}

fn c7_exponent() -> Outcome {
    let radii: Vec<f64> = (3..=11).map(|k| 1.0 + 2f64.powi(-k)).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for a in [1.5, 2.0, 3.0] {
        let field = extend_welding(&CircleHomeo::power(a).unwrap()).map_err(|e| e.to_string())?;
        let fit = fit_radial_exponent(&radial_profile(&field, &radii, 1024).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let rel = (fit.alpha / (a - 1.0) - 1.0).abs();
        ok &= rel < 0.1;
        parts.push(format!("a={a}: alpha {:.4} ({:.1}%)", fit.alpha, 100.0 * rel));
    }
    ensure(ok, parts.join(", "))
}

fn c8_thm51() -> Outcome {
    let grid = decade_grid_ln(1, 300);
    let verdict = |beta: f64| {
        let psi = ControlFunction::log_power(1.0, beta).unwrap();
        thm51_condition_ln(&psi, &grid, 0.1).unwrap()
    };
    let (half, over) = (verdict(0.5), verdict(1.1));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut path_ok = true;
    for k in 0..1000 {
        let s: f64 = rng.gen_range(0.01..0.99);
        let a = s * s / (2.0 * (1.0 - s * s));
        let b = 1.0 / (2.0 * (1.0 / (s * s) - 1.0));
        worst = worst.max((a - b).abs() / a);
        if k % 100 == 0 {
            let v = cli::classify_value(&ClassifyConfig {
                psi: ControlFamily::Power { s, c: 1.0, t_max: None },
                decades: 60,
                t0: 0.1,
            })
            .map_err(|e| e.to_string())?;
            path_ok &= v["p_range"][1].as_f64() == Some(p_sup_from_three_point(s));
        }
    }
    ensure(
        half.verdict == LimsupVerdict::Bounded && over.verdict == LimsupVerdict::Unbounded && worst <= 1e-12 && path_ok,
        format!(
            "beta=0.5 {:?} (log exponent {:+.3}), beta=1.1 {:?} (log exponent {:+.3}), p-range identity rel err {worst:.1e}",
            half.verdict, half.log_exponent, over.verdict, over.log_exponent
        ),
    )
}

fn c9_annulus() -> Outcome {
    let t = Instant::now();
    let m = ring_modulus(&RingProblem::circles(1.0, E, [0.0, 0.0], 2048, 512).unwrap()).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    let want = 1.0 / TAU;
    let (es, er) = (m.modulus_separating / want - 1.0, m.reciprocal_connecting / want - 1.0);
    ensure(
        es.abs() < 0.01 && er.abs() < 0.01 && m.residual <= 1e-10 * 10.0 && el < Duration::from_secs(60),
        format!("separating {:.5} ({:+.2}%), 1/connecting {:.5} ({:+.3}%), {el:.1?}", m.modulus_separating, 100.0 * es, m.reciprocal_connecting, 100.0 * er),
    )
}

fn c10_duality() -> Outcome {
    let square = |s: f64| welding_core::geometry::JordanCurve::new(vec![[-s, -s], [s, -s], [s, s], [-s, s]]).unwrap();
    let configs = [
        RingProblem::circles(1.0, 2.0, [0.0, 0.0], 2048, 256).unwrap(),
        RingProblem::circles(0.3, 2.0, [0.2, -0.1], 2048, 256).unwrap(),
        RingProblem::new(square(0.5), square(1.5), 256).unwrap(),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for p in &configs {
        let m = ring_modulus(p).map_err(|e| e.to_string())?;
        ok &= (m.duality_product - 1.0).abs() < 0.02;
        parts.push(format!("{:.4}", m.duality_product));
    }
    ensure(ok, format!("products {}", parts.join(", ")))
}

fn c11_circle_envelope() -> Outcome {
    let disk = make_domain(DomainFamily::Disk, 1024).unwrap();
    let env = three_point_envelope(&disk, 10_000, 42).map_err(|e| e.to_string())?;
    ensure(
        env.pairs.len() >= 10_000 && (env.max_ratio - 1.0).abs() <= 0.02 && env.family == FitFamily::Linear,
        format!("{} pairs, max m/d = {:.4}, family {:?}", env.pairs.len(), env.max_ratio, env.family),
    )
}

fn c12_cusp_envelope() -> Outcome {
    let n = 1024;
    let cusp = make_domain(DomainFamily::InteriorCusp { s: 0.5 }, n).unwrap();
    let env = three_point_envelope(&cusp, 10_000, 42).map_err(|e| e.to_string())?;
    let fitted = env
        .fits
        .iter()
        .find(|f| f.family == FitFamily::Power)
        .and_then(|f| f.exponent)
        .ok_or("no power fit")?;
    // brute-force oracle: pairs straddling the notch, arc diameters by all-pairs search
    let v = cusp.vertices();
    let flank = n / 4;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pairs: Vec<(usize, usize)> = (0..10_000)
        .map(|_| {
            let i = rng.gen_range(1..flank - 1);
            let j = ((n - i) as i64 + rng.gen_range(-2i64..=2)).min(n as i64 - 1);
            (i, j as usize)
        })
        .collect();
    let mut memo = std::collections::HashMap::new();
    let mut bins: std::collections::BTreeMap<i64, (f64, f64)> = std::collections::BTreeMap::new();
    let diam = diameter_brute(v);
    for &(i, j) in &pairs {
        let m = *memo.entry((i, j)).or_insert_with(|| {
            let inner: Vec<[f64; 2]> = (i..=j).map(|k| v[k % n]).collect();
            let outer: Vec<[f64; 2]> = (j..=i + n).map(|k| v[k % n]).collect();
            diameter_brute(&inner).min(diameter_brute(&outer))
        });
        let d = (v[i][0] - v[j][0]).hypot(v[i][1] - v[j][1]);
        if d > diam / 4.0 {
            continue;
        }
        // upper envelope: largest m per factor-of-two bin of d
        let slot = bins.entry(d.log2().floor() as i64).or_insert((d, m));
        if m > slot.1 {
            *slot = (d, m);
        }
    }
    let pts: Vec<(f64, f64)> = bins.values().map(|&(d, m)| (d.ln(), m.ln())).collect();
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let oracle = sxy / sxx;
    let rel = (fitted / oracle - 1.0).abs();
    ensure(
        rel < 0.1,
        format!("fitted exponent {fitted:.4}, oracle {oracle:.4} over {} bins, {} distinct pairs ({:.1}%)", pts.len(), memo.len(), 100.0 * rel),
    )
}

fn c13_duality() -> Outcome {
    let psi = ControlFunction::linear(1.0).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, fam) in [("disk", DomainFamily::Disk), ("square", DomainFamily::Square)] {
        let curve = make_domain(fam, 1024).unwrap();
        let r = duality_check(&curve, &psi, &DualityOptions::default()).map_err(|e| e.to_string())?;
        let slack = r.lc_to_tp_slack.unwrap_or(f64::INFINITY);
        let lambda = r.tp_to_lc_lambda.unwrap_or(f64::INFINITY);
        ok &= r.tp_to_lc && r.lc_to_tp && slack <= 8.0 && lambda <= 8.0;
        parts.push(format!("{name}: lambda {lambda}, slack {slack:.3}"));
    }
    ensure(ok, parts.join(", "))
}

fn c14_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cusp = cli::BoundaryConfig { domain: DomainFamily::InteriorCusp { s: 0.5 }, ..Default::default() };
    let ext = cli::ExtendConfig { grid: 32, ..Default::default() };
    let mut same = true;
    let mut files = 0;
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        cli::cmd_boundary(&cusp, 42, &dir).map_err(|e| e.to_string())?;
        cli::cmd_extend(&ext, &dir).map_err(|e| e.to_string())?;
        cli::cmd_classify(&ClassifyConfig::default(), &dir).map_err(|e| e.to_string())?;
    }
    for entry in std::fs::read_dir(tmp.path().join("a")).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let a = std::fs::read(tmp.path().join("a").join(&name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(tmp.path().join("b").join(&name)).map_err(|e| e.to_string())?;
        same &= a == b;
        files += 1;
    }
    ensure(same && files >= 6, format!("{files} files compared byte for byte"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("identity pipeline", c1_identity_pipeline),
        ("translation commutation and boundary trace", c2_translation_and_trace),
        ("identity regions", c3_identity_regions),
        ("shear differential", c4_shear),
        ("scalewise bound", c5_scalewise_bound),
        ("integrability threshold", c6_threshold),
        ("exponent consistency", c7_exponent),
        ("generalized quasidisk condition", c8_thm51),
        ("annulus modulus", c9_annulus),
        ("modulus duality", c10_duality),
        ("circle envelope", c11_circle_envelope),
        ("cusp envelope", c12_cusp_envelope),
        ("LC / three-point duality", c13_duality),
        ("determinism", c14_determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let el = t.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{el:.1?}]", k + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail} [{el:.1?}]", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    println!("acceptance: 14/14 passed");
}
