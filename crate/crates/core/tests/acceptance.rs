mod common;

use std::time::Instant;

use common::{decimal, kappa_pairs, naive_quat_pairs, naive_scan, quat_count_from_pairs, rel, tau, RatPoint};
use num_complex::Complex64;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use theta_moment::bergman::{
    elementary_theta_coeffs, eval_level_one, hecke_ratio, kernel_sum, petersson_norm, Convention, KernelSumParams,
    QExpansion,
};
use theta_moment::halfplane::{Frame, Point};
use theta_moment::lattice::{count_profile, fitted_exponent, second_moment, OrderSpec, Weighting};
use theta_moment::quaternion::{quat_profile, CartanParams, DivisionOrderModel};
use theta_moment::weil::{norm_character_sum, orbit_closure, predicted_orbit, Cyclo, FiniteModel, FiniteWeilFunction};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params() -> KernelSumParams {
    KernelSumParams::new(12, 1e-12).unwrap()
}

fn pt(s: &str) -> Point {
    s.parse().unwrap()
}

fn hecke_ratios() -> Outcome {
    let t = tau(6);
    let mut worst: f64 = 0.0;
    for (z, w) in kappa_pairs() {
        for n in 2..=6u64 {
            let k = hecke_ratio(n, &pt(z), &pt(w), &params()).map_err(|e| e.to_string())?;
            let err = rel(k, (t[n as usize - 1] as f64 / (n as f64).powi(5)).into());
            worst = worst.max(err);
            ensure(err < 1e-6, || format!("kappa({n}) at ({z}, {w}) = {k}"))?;
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn elementary_theta() -> Outcome {
    let f = QExpansion::delta(80);
    let t = tau(50);
    let mut worst: f64 = 0.0;
    for z in ["i", "0.2+0.9i", "-0.41+1.3i"] {
        let d = eval_level_one(&f, &pt(z)).map_err(|e| e.to_string())?;
        let c = elementary_theta_coeffs(&f, &pt(z), 50).map_err(|e| e.to_string())?;
        for n in 0..50 {
            let err = rel(c[n], d * t[n] as f64);
            worst = worst.max(err);
            ensure(err < 1e-9, || format!("coefficient {} at {z}", n + 1))?;
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn reduced_points(count: usize) -> Vec<Point> {
    let mut runner = TestRunner::deterministic();
    let s = (-0.5..0.5f64, 0.0..1.5f64);
    (0..count)
        .map(|_| {
            let (x, t) = s.new_tree(&mut runner).unwrap().current();
            Point::new(x, (1.0 - x * x).sqrt() + t).unwrap()
        })
        .collect()
}

fn bergman_constant() -> Outcome {
    let f = QExpansion::delta(80);
    let points = reduced_points(5);
    let mut passing = Vec::new();
    let mut report = Vec::new();
    for conv in [Convention::Hyperbolic, Convention::Probability] {
        let norm = petersson_norm(&f, conv).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for z in &points {
            let s1 = kernel_sum(1, z, z, &params(), OrderSpec::Full).map_err(|e| e.to_string())?.re;
            let d = eval_level_one(&f, z).map_err(|e| e.to_string())?;
            let dev = s1 * norm / (8.0 * std::f64::consts::PI / 11.0 * z.y.powi(12) * d.norm_sqr()) - 1.0;
            worst = worst.max(dev.abs());
        }
        report.push(format!("{conv:?} {worst:.3e}"));
        if worst < 1e-3 {
            passing.push(conv);
        }
    }
    ensure(passing.len() == 1, || format!("conventions passing: {passing:?} ({})", report.join(", ")))?;
    Ok(format!("convention {:?}; max deviation {}", passing[0], report.join(", ")))
}

fn weil_orbits() -> Outcome {
    let mut sizes = Vec::new();
    let models = [(2, 1), (2, 2), (3, 1), (5, 1)]
        .map(|(p, n)| FiniteModel::eichler(p, n))
        .into_iter()
        .chain([2, 3, 5].map(FiniteModel::ramified));
    for m in models {
        let m = m.map_err(|e| e.to_string())?;
        let orbit = orbit_closure(&FiniteWeilFunction::indicator_order(&m)).map_err(|e| e.to_string())?;
        let predicted = predicted_orbit(&m).map_err(|e| e.to_string())?;
        ensure(orbit.iter().cloned().collect::<std::collections::BTreeSet<_>>() == predicted, || format!("{m}"))?;
        sizes.push(orbit.len());
    }
    ensure(sizes == [3, 6, 4, 6, 3, 4, 6], || format!("sizes {sizes:?}"))?;
    Ok(format!("sizes {sizes:?}"))
}

fn character_sums() -> Outcome {
    for p in [2u32, 3, 5, 7] {
        for u in 1..p as i64 {
            let s = norm_character_sum(p, u).map_err(|e| e.to_string())?;
            ensure(s == Cyclo::from_int(p, 1, -(p as i64)), || format!("p={p} u={u}: {s:?}"))?;
        }
    }
    Ok("all units, p in {2, 3, 5, 7}".into())
}

fn counting_oracles() -> Outcome {
    let mut configs = 0;
    for z in [RatPoint::new(0, 1, 1), RatPoint::new(0, 2, 1), RatPoint::new(3, 8, 10)] {
        let scan = naive_scan(z, 1, 200, 1.0);
        let frame = Frame::from_point(&pt(&z.literal()));
        for delta in [0.0, 0.01, 0.1, 1.0] {
            let (num, den) = decimal(delta);
            let got = count_profile(OrderSpec::Full, &frame, 200, delta).map_err(|e| e.to_string())?;
            ensure(got.counts == scan.profile(200, num, den), || format!("z={} delta={delta}", z.literal()))?;
            configs += 1;
        }
    }
    let model = DivisionOrderModel::standard();
    let r = (3.0f64 * 100.0 * 7.0).sqrt().ceil() as i64;
    let pairs = naive_quat_pairs(-19, 6, 100, r);
    for delta in [0.0, 0.5, 6.0] {
        let got = quat_profile(&model, &CartanParams::identity(), 100, delta).map_err(|e| e.to_string())?;
        for n in 1..=100i64 {
            ensure(got[n as usize - 1] == quat_count_from_pairs(&pairs, n, decimal(delta)), || {
                format!("quaternion n={n} delta={delta}")
            })?;
        }
        configs += 1;
    }
    Ok(format!("{configs} profiles (N <= 200 lattice, N <= 100 quaternion) equal"))
}

fn hecke_relations() -> Outcome {
    let (z, w) = (pt("0.1+1.2i"), pt("-0.3+0.9i"));
    let s: Vec<Complex64> = (1..=6)
        .map(|n| kernel_sum(n, &z, &w, &params(), OrderSpec::Full))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let k = |n: usize| s[n - 1] / s[0];
    let a = (k(2) * k(3) - k(6)).norm();
    let b = (k(2) * k(2) - k(4) - 2.0).norm();
    ensure(a < 1e-8 && b < 1e-8, || format!("residuals {a:.2e} {b:.2e}"))?;
    Ok(format!("residuals {a:.2e}, {b:.2e}"))
}

fn second_moment_trend() -> Outcome {
    let frame = Frame::from_point(&Point::i());
    let mut pts = Vec::new();
    let mut raw = Vec::new();
    for big_n in [100u64, 200, 400] {
        let p = count_profile(OrderSpec::Full, &frame, big_n, 1.0 / big_n as f64).map_err(|e| e.to_string())?;
        let s = second_moment(&p, Weighting::Uniform);
        let nonzero = p.counts.iter().filter(|&&c| c > 0).count();
        raw.push(format!("N={big_n}: sum {s} over {nonzero} nonzero counts, max {}", p.counts.iter().max().unwrap()));
        pts.push((big_n as f64, s));
    }
    let e = fitted_exponent(&pts);
    for line in &raw {
        println!("    {line}");
    }
    ensure(e <= 1.3, || format!("exponent {e:.4}"))?;
    Ok(format!("exponent {e:.4}"))
}

fn halfplane_suites() -> Outcome {
    common::pde_suite(1000)?;
    common::decay_suite(1000)?;
    common::mu_suite(1000)?;
    Ok("1000 samples each".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cases: [&[&str]; 3] = [
        &["profile", "--z", "0.3+0.8i", "--N", "80", "--delta-grid", "0:1:4"],
        &["theta", "--z", "0.1+1.2i", "--N", "4", "--source", "kernel"],
        &["weil-orbit", "--p", "3", "--level", "1"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let mut outputs = Vec::new();
        for (rep, threads) in ["2", "8", "8"].iter().enumerate() {
            let path = dir.path().join(format!("{i}-{rep}.out"));
            let mut argv = vec!["theta-moment"];
            argv.extend_from_slice(args);
            argv.extend(["--threads", threads, "--out", path.to_str().unwrap()]);
            let code = theta_moment::cli::run(argv);
            ensure(code == 0, || format!("{args:?} exited {code}"))?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{args:?} differs"))?;
    }
    Ok("byte-identical at 2 and 8 threads".into())
}

fn main() {
    std::env::remove_var(theta_moment::cli::CACHE_ENV);
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("hecke ratios", hecke_ratios),
        ("elementary theta", elementary_theta),
        ("bergman constant", bergman_constant),
        ("weil orbits", weil_orbits),
        ("character sums", character_sums),
        ("counting oracles", counting_oracles),
        ("hecke relations", hecke_relations),
        ("second moment trend", second_moment_trend),
        ("halfplane properties", halfplane_suites),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}) [{secs:.1}s]", i + 1)
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
