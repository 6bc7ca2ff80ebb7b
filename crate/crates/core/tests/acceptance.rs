//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::time::Instant;

use hdr_core::hdr::DISCRETE_COVER_SLACK;
use hdr_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> OptimizerConfig {
    OptimizerConfig::default()
}

fn bundle_and_shape(name: &str, p: &Params) -> (ProbabilityBundle, Shape) {
    let fam = Family::parse(name, p).expect("valid family");
    (fam.bundle(), fam.shape().expect("shape"))
}

// ---------------------------------------------------------------------------

fn golden_chisq() -> Check {
    let b = make_family("chisq", &params([("df", 30.0)])).map_err(|e| e.to_string())?;
    let r = hdr_unimodal(0.98, &b, &cfg()).map_err(|e| e.to_string())?;
    let part = r.region.parts()[0];
    let (l, u) = (part.lower(), part.upper());
    ensure((l - 13.9324865197342).abs() <= 1e-6, || format!("L = {l}"))?;
    ensure((u - 49.3372669844555).abs() <= 1e-6, || format!("U = {u}"))?;
    let (fl, fu) = (b.density(l).unwrap(), b.density(u).unwrap());
    ensure(
        (fl - 0.003428795).abs() <= 1e-8 && (fu - 0.003428795).abs() <= 1e-8,
        || format!("f(L) = {fl}, f(U) = {fu}"),
    )?;

    let reps = 200;
    let start = Instant::now();
    for _ in 0..reps {
        hdr_unimodal(0.98, &b, &cfg()).map_err(|e| e.to_string())?;
    }
    let per_call = start.elapsed().as_secs_f64() / reps as f64;
    ensure(per_call < 0.010, || {
        format!("{:.3} ms per call", per_call * 1e3)
    })?;
    Ok(format!(
        "[{l:.13}, {u:.13}], f = {fl:.10}, {:.3} ms/call, {} iterations",
        per_call * 1e3,
        r.iterations
    ))
}

fn table_disparities() -> Check {
    let mut notes = Vec::new();
    for cover in [0.95, 0.90] {
        // family, params, prob tol, density tol, intervals expected
        type Row = (&'static str, Params, f64, f64, Option<usize>);
        let cases: Vec<Row> = vec![
            (
                "chisq",
                params([("df", 4.0), ("ncp", 2.0)]),
                1e-12,
                1e-8,
                None,
            ),
            (
                "gamma",
                params([("shape", 3.0), ("scale", 4.0)]),
                1e-12,
                1e-10,
                None,
            ),
            (
                "beta",
                params([("shape1", 0.4), ("shape2", 0.6)]),
                1e-10,
                1e-10,
                Some(2),
            ),
            (
                "beta",
                params([("shape1", 0.03), ("shape2", 0.05)]),
                1e-12,
                1e-6,
                Some(2),
            ),
        ];
        for (name, p, prob_tol, dens_tol, ints) in cases {
            let (b, _) = bundle_and_shape(name, &p);
            let r = hdr_for_family(name, &p, cover, &cfg()).map_err(|e| e.to_string())?;
            let d = disparities(&b, &r.region, cover);
            let dens = d.density.unwrap_or(f64::NAN);
            let label = format!("{name}{p:?} @ {cover}");
            ensure(d.prob <= prob_tol, || {
                format!("{label}: prob disparity {:e}", d.prob)
            })?;
            ensure(dens <= dens_tol, || {
                format!("{label}: density disparity {dens:e}")
            })?;
            ensure(!d.outside_support, || {
                format!("{label}: region leaves the support")
            })?;
            if let Some(k) = ints {
                ensure(d.interval_count == k, || {
                    format!("{label}: {} intervals", d.interval_count)
                })?;
            }
            notes.push(format!("{:.1e}/{:.1e}", d.prob, dens));
        }
    }
    Ok(format!("prob/density disparities {}", notes.join(" ")))
}

fn symmetry_exactness() -> Check {
    let b = make_family("normal", &params([])).map_err(|e| e.to_string())?;
    let r = hdr_unimodal(0.95, &b, &cfg()).map_err(|e| e.to_string())?;
    let part = r.region.parts()[0];
    let (ql, qu) = (b.quantile(0.025), b.quantile(0.975));
    ensure(
        (part.lower() - ql).abs() <= 1e-12 && (part.upper() - qu).abs() <= 1e-12,
        || format!("{} vs [{ql}, {qu}]", r.region),
    )?;
    ensure(
        r.iterations == 0 && r.code == Some(OptCode::GradientConverged),
        || format!("{} iterations, code {:?}", r.iterations, r.code),
    )?;
    Ok(format!("{} with 0 iterations, code 1", r.region))
}

fn compare_with_grid(
    label: &str,
    bundle: &ProbabilityBundle,
    region: &IntervalSet,
    cover: f64,
) -> std::result::Result<f64, String> {
    let grid = GridSpec::for_bundle(bundle, 10_000).map_err(|e| e.to_string())?;
    let oracle = hdr_updown_grid(cover, bundle, &grid).map_err(|e| e.to_string())?;
    let (a, b) = (region.boundary_points(), oracle.boundary_points());
    ensure(region.len() == oracle.len() && a.len() == b.len(), || {
        format!("{label}: {region} vs oracle {oracle}")
    })?;
    let h = grid.cell_width();
    let worst = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs() / h)
        .fold(0.0, f64::max);
    ensure(worst <= 2.0, || {
        format!("{label}: boundary off by {worst:.2} cells ({region} vs {oracle})")
    })?;
    Ok(worst)
}

fn oracle_equivalence() -> Check {
    let cases: Vec<(&str, Params)> = vec![
        ("normal", params([])),
        ("gamma", params([("shape", 3.0), ("scale", 4.0)])),
        ("chisq", params([("df", 30.0)])),
        ("beta", params([("shape1", 3.0), ("shape2", 2.0)])),
        ("beta", params([("shape1", 0.4), ("shape2", 0.6)])),
        ("lognormal", params([])),
    ];
    let mut worst: f64 = 0.0;
    for (name, p) in &cases {
        let (b, _) = bundle_and_shape(name, p);
        for cover in [0.5, 0.9, 0.99] {
            let r = hdr_for_family(name, p, cover, &cfg()).map_err(|e| e.to_string())?;
            let label = format!("{name}{p:?} @ {cover}");
            worst = worst.max(compare_with_grid(&label, &b, &r.region, cover)?);
        }
    }
    Ok(format!("18 cases, worst boundary gap {worst:.2} cells"))
}

fn property_suites() -> Check {
    let mut rng = StdRng::seed_from_u64(20240611);
    let cases: Vec<(&str, Params)> = vec![
        ("normal", params([("mean", 1.0), ("sd", 2.0)])),
        ("gamma", params([("shape", 3.0), ("scale", 4.0)])),
        ("gamma", params([("shape", 1.5), ("scale", 0.5)])),
        ("chisq", params([("df", 30.0)])),
        ("chisq", params([("df", 4.0), ("ncp", 2.0)])),
        ("lognormal", params([("meanlog", 0.0), ("sdlog", 0.5)])),
        ("weibull", params([("shape", 2.0), ("scale", 1.0)])),
        ("student_t", params([("df", 4.0)])),
        ("f", params([("df1", 6.0), ("df2", 12.0)])),
        ("beta", params([("shape1", 3.0), ("shape2", 2.0)])),
        ("beta", params([("shape1", 0.4), ("shape2", 0.6)])),
        ("beta", params([("shape1", 0.5), ("shape2", 0.7)])),
        ("cauchy", params([])),
    ];
    let mut checked = 0usize;
    for (name, p) in &cases {
        let (b, shape) = bundle_and_shape(name, p);
        let bimodal = matches!(shape, Shape::Bimodal { .. });
        let covers: Vec<f64> = (1..=10).map(|i| 0.05 + 0.09 * i as f64).collect();
        let results: Vec<HdrResult> = covers
            .iter()
            .map(|&c| hdr_for_family(name, p, c, &cfg()))
            .collect::<Result<_>>()
            .map_err(|e| e.to_string())?;
        for (cover, r) in covers.iter().zip(&results) {
            let label = format!("{name}{p:?} @ {cover:.2}");
            // coverage exactness
            ensure((r.actual_cover - cover).abs() <= 1e-9, || {
                format!("{label}: coverage {}", r.actual_cover)
            })?;
            // equal boundary density
            let bp = metrics::interior_boundary(&b, &r.region);
            let f: Vec<f64> = bp.iter().map(|&x| b.density(x).unwrap()).collect();
            let (fmax, fmin) = (
                f.iter().cloned().fold(f64::MIN, f64::max),
                f.iter().cloned().fold(f64::MAX, f64::min),
            );
            ensure(fmax - fmin <= 1e-8 * fmax + 1e-12, || {
                format!("{label}: boundary densities {f:?}")
            })?;
            // minimality probes
            let theta = r.theta.expect("one-variable solver");
            let width = r.region.measure();
            for _ in 0..50 {
                let t = if bimodal {
                    rng.random_range(0.0..*cover)
                } else {
                    rng.random_range(0.0..(1.0 - cover))
                };
                if (t - theta).abs() < 1e-12 {
                    continue;
                }
                let probe = if bimodal {
                    let (lo, hi) = b.support();
                    (b.quantile(t) - lo) + (hi - b.quantile(t + 1.0 - cover))
                } else {
                    b.quantile(t + cover) - b.quantile(t)
                };
                ensure(probe >= width * (1.0 - 1e-12), || {
                    format!("{label}: probe t = {t} width {probe} < {width}")
                })?;
            }
            checked += 1;
        }
        // nesting, tested pointwise on a grid
        let grid: Vec<f64> = (1..400).map(|i| b.quantile(i as f64 / 400.0)).collect();
        for w in results.windows(2) {
            for &x in &grid {
                if w[0].region.contains(x) {
                    ensure(w[1].region.contains(x), || {
                        format!("{name}{p:?}: {} not inside {}", w[0].region, w[1].region)
                    })?;
                }
            }
        }
    }

    // affine equivariance for location-scale families
    for (name, std_params, shifted, a, c) in [
        (
            "normal",
            params([]),
            params([("mean", 3.0), ("sd", 2.5)]),
            2.5,
            3.0,
        ),
        (
            "cauchy",
            params([]),
            params([("location", -1.0), ("scale", 0.3)]),
            0.3,
            -1.0,
        ),
        (
            "uniform",
            params([]),
            params([("min", 2.0), ("max", 6.0)]),
            4.0,
            2.0,
        ),
    ] {
        for cover in [0.3, 0.8, 0.95] {
            let base =
                hdr_for_family(name, &std_params, cover, &cfg()).map_err(|e| e.to_string())?;
            let moved = hdr_for_family(name, &shifted, cover, &cfg()).map_err(|e| e.to_string())?;
            let (p, q) = (base.region.parts()[0], moved.region.parts()[0]);
            ensure(
                (a * p.lower() + c - q.lower()).abs() <= 1e-8
                    && (a * p.upper() + c - q.upper()).abs() <= 1e-8,
                || format!("{name} @ {cover}: {} maps to {}", base.region, moved.region),
            )?;
        }
    }
    Ok(format!("{checked} regions checked for coverage, density, minimality; nesting and equivariance hold"))
}

fn discrete_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..200 {
        let n = rng.random_range(1..=15usize);
        let weights: Vec<u32> = (0..n).map(|_| rng.random_range(0..12u32)).collect();
        let weights: Vec<f64> = if weights.iter().all(|&w| w == 0) {
            vec![1.0; n]
        } else {
            weights.iter().map(|&w| w as f64).collect()
        };
        let points: Vec<f64> = (0..n).map(|i| i as f64 * 0.5 - 2.0).collect();
        let pmf = DiscretePmf::from_weights(points, &weights).map_err(|e| e.to_string())?;
        for cover in [0.5, 0.8, 0.95] {
            let greedy = hdr_discrete(cover, &pmf).map_err(|e| e.to_string())?;
            let brute = discrete_brute_force(cover, &pmf).map_err(|e| e.to_string())?;
            let int_mass = |idx: &[usize]| idx.iter().map(|&i| weights[i]).sum::<f64>();
            ensure(greedy.indices.len() == brute.indices.len(), || {
                format!(
                    "trial {trial} cover {cover}: {:?} vs {:?}",
                    greedy.indices, brute.indices
                )
            })?;
            ensure(
                int_mass(&greedy.indices) == int_mass(&brute.indices),
                || {
                    format!(
                        "trial {trial} cover {cover}: mass {} vs {}",
                        greedy.actual_cover, brute.mass
                    )
                },
            )?;
            ensure(greedy.actual_cover >= cover - DISCRETE_COVER_SLACK, || {
                format!("trial {trial}: under-covered")
            })?;
        }
    }
    let binom: Vec<f64> = (0..=10u32)
        .map(|k| (1..=k).fold(1.0, |c, i| c * (10 - i + 1) as f64 / i as f64))
        .collect();
    let pmf = DiscretePmf::from_weights((0..=10).map(f64::from).collect(), &binom)
        .map_err(|e| e.to_string())?;
    let r = hdr_discrete(0.95, &pmf).map_err(|e| e.to_string())?;
    ensure(
        r.points == (2..=8).map(f64::from).collect::<Vec<_>>(),
        || format!("{:?}", r.points),
    )?;
    ensure((r.actual_cover - 1002.0 / 1024.0).abs() <= 1e-15, || {
        format!("{}", r.actual_cover)
    })?;
    Ok("200 random pmfs x 3 covers match brute force; binomial(10, 0.5) gives {2..8}".into())
}

fn multimodal_mixture() -> Check {
    let b = normal_mixture(&[(0.5, -3.0, 1.0), (0.5, 3.0, 1.0)]).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (cover, parts) in [(0.9, 2), (0.999, 1)] {
        let r = hdr_multimodal(cover, &b, &[0.0], &cfg()).map_err(|e| e.to_string())?;
        ensure(r.region.len() == parts, || {
            format!("cover {cover}: {}", r.region)
        })?;
        let worst = compare_with_grid(&format!("mixture @ {cover}"), &b, &r.region, cover)?;
        notes.push(format!("{cover}: {} ({worst:.2} cells)", r.region));
    }
    Ok(notes.join("; "))
}

fn confidence_intervals() -> Check {
    let mut notes = Vec::new();
    for n in [5usize, 10, 30] {
        let a = variance_ci(n, 1.0, 0.95, VariancePivot::ChisqPivot, &cfg())
            .map_err(|e| e.to_string())?;
        let b = variance_ci(n, 1.0, 0.95, VariancePivot::InvGammaPivot, &cfg())
            .map_err(|e| e.to_string())?;
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        ensure(
            rel(a.interval.lower(), b.interval.lower()) <= 1e-8
                && rel(a.interval.upper(), b.interval.upper()) <= 1e-8,
            || format!("n = {n}: {} vs {}", a.interval, b.interval),
        )?;
        let et = equal_tailed_variance_ci(n, 1.0, 0.95).map_err(|e| e.to_string())?;
        ensure(a.interval.width() <= et.width(), || {
            format!("n = {n}: wider than equal-tailed")
        })?;

        let spec = variance_pivot(n, 1.0, VariancePivot::ChisqPivot).map_err(|e| e.to_string())?;
        let check =
            second_order_check(&spec, a.pivot_lower, a.pivot_upper).map_err(|e| e.to_string())?;
        ensure(check.holds(), || {
            format!("n = {n}: second-order condition fails {check:?}")
        })?;

        // brute-force sweep over the lower tail probability
        let chisq = &spec.pivot;
        let width = a.interval.width();
        let steps = 10_000;
        for i in 0..=steps {
            let t = 0.05 * i as f64 / steps as f64;
            let (l, u) = (chisq.quantile(t), chisq.quantile(t + 0.95));
            let w = 1.0 / l - 1.0 / u;
            ensure(w >= width * (1.0 - 1e-6), || {
                format!("n = {n}: theta {t} gives {w} < {width}")
            })?;
        }
        notes.push(format!("n={n} {}", a.interval));
    }
    Ok(notes.join("; "))
}

fn throughput() -> Check {
    let reps = 10_000;
    let start = Instant::now();
    let mut total_width = 0.0;
    for i in 0..reps {
        let df = 3.0 + (i % 200) as f64 * 0.25;
        let r = hdr_for_family("chisq", &params([("df", df)]), 0.95, &cfg())
            .map_err(|e| e.to_string())?;
        total_width += r.region.measure();
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(total_width.is_finite(), || "non-finite widths".into())?;
    Ok(format!(
        "{reps} HDRs in {secs:.2} s, {:.0} HDRs/s (non-binding)",
        reps as f64 / secs
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 golden chi-squared HDR", golden_chisq),
        ("2 benchmark disparities", table_disparities),
        ("3 symmetry exactness", symmetry_exactness),
        ("4 grid oracle equivalence", oracle_equivalence),
        ("5 property suites", property_suites),
        ("6 discrete brute-force equality", discrete_oracle),
        ("7 multimodal mixture", multimodal_mixture),
        ("8 confidence intervals", confidence_intervals),
        ("9 throughput report", throughput),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
