//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N [PASS|FAIL] ...` line before asserting.

use std::f64::consts::PI;
use std::path::Path;

use aniso_gn::exponent::Rational;
use aniso_gn::families::FunctionFamily;
use aniso_gn::gn_algebra::{
    classify_besov_case, h1_embedding_params, solve_theta, BesovGnParams, CaseStatus, CaseTag,
    GnParams,
};
use aniso_gn::littlewood_paley::{
    approx_identity_sweep, resolvable_range, DyadicDecomposition, DyadicPartition,
};
use aniso_gn::maximal::{pointwise_interpolation_multi, RadiusSet};
use aniso_gn::mixed_norm::{mixed_lebesgue_norm, SpaceTimeExponents};
use aniso_gn::ns::diagnostics::{energy_budget, flux_convergence, max_abs_residual};
use aniso_gn::ns::{NsSolver, taylor_green};
use aniso_gn::report::SweepVerdict;
use aniso_gn::verifier::{
    bernstein_sweep, bernstein_twosided_sweep, besov_gn_sweep, dilation_sweep,
    family_boundedness, isotropic_lambdas, predicted_isotropic_slope,
};
use aniso_gn::{Exponent, ExponentVec, GridSpec, RealField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rq(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ev(s: &str) -> ExponentVec {
    s.parse().unwrap()
}

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n} [{}] {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn balanced_instance(theta: Rational) -> GnParams {
    GnParams::new(rq(0, 1), rq(1, 1), theta, ev("4,6"), ev("2,4"), ev("2,3")).unwrap()
}

#[test]
fn criterion_01_theta_solver_exact() {
    let (params, adm) = solve_theta(rq(0, 1), rq(1, 1), &ev("4,6"), &ev("2,4"), &ev("2,3")).unwrap();
    let pass = params.theta == rq(7, 11) && adm.is_admissible();
    report(1, pass, format!("theta = {} ({})", params.theta, adm.label()));
}

#[test]
fn criterion_02_scaling_law_necessity() {
    let g = GridSpec::isotropic(2, 128, 16.0).unwrap();
    let u = FunctionFamily::AnisotropicGaussian { width: 1.0, seed: 0 }
        .member(&g, 0)
        .unwrap();
    let lambdas = isotropic_lambdas(2, -5, 5);

    let broken = balanced_instance(rq(5, 11));
    // δ = A − σ − θQ − (1−θ)(R − s) with A = 5/12, Q = 3/4, R = 5/6.
    let delta: f64 = 5.0 / 12.0 - 5.0 / 11.0 * 0.75 - 6.0 / 11.0 * (5.0 / 6.0 - 1.0);
    assert!((delta - 1.0 / 6.0).abs() < 1e-15);
    assert!((predicted_isotropic_slope(&broken) - delta).abs() < 1e-12);
    let bad = dilation_sweep(&u, &broken, &lambdas, Some(delta)).unwrap();
    let (m, r2) = (bad.fitted_slope.unwrap(), bad.r_squared.unwrap());

    let ok = dilation_sweep(&u, &balanced_instance(rq(7, 11)), &lambdas, Some(0.0)).unwrap();
    let m0 = ok.fitted_slope.unwrap();

    let pass = (m - 1.0 / 6.0).abs() <= 0.05
        && r2 >= 0.99
        && bad.verdict == SweepVerdict::Blowup
        && m0.abs() <= 0.02
        && ok.verdict == SweepVerdict::Bounded;
    report(
        2,
        pass,
        format!("broken slope {m:.6} (R² {r2:.6}, {:?}); admissible slope {m0:.2e}", bad.verdict),
    );
}

#[test]
fn criterion_03_gaussian_norm_oracle() {
    let g = GridSpec::isotropic(2, 256, 16.0).unwrap();
    let u = RealField::from_fn_centered(&g, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()).unwrap();
    let mut worst = 0.0f64;
    for (p1, p2) in [(2.0, 2.0), (3.0, 5.0), (2.0, 4.0)] {
        let exact = (2.0 * PI / p1).powf(1.0 / (2.0 * p1)) * (2.0 * PI / p2).powf(1.0 / (2.0 * p2));
        let p = ExponentVec::new(vec![Exponent::int(p1 as i64), Exponent::int(p2 as i64)]).unwrap();
        let got = mixed_lebesgue_norm(&u, &p).unwrap();
        worst = worst.max((got / exact - 1.0).abs());
    }
    report(3, worst <= 1e-6, format!("max relative error {worst:.2e}"));
}

#[test]
fn criterion_04_bernstein_slopes() {
    let ball = FunctionFamily::BallCluster { radius: 2.0, seed: 11 };
    let lambdas: Vec<f64> = (1..=6).map(|k| 2f64.powi(k)).collect();
    let g512 = GridSpec::torus(2, 512).unwrap();
    let one = bernstein_sweep(1, &ev("1,1"), &ev("2,2"), &lambdas, &ball, &g512, 10).unwrap();
    let m = one.fitted_slope.unwrap();

    let annulus = FunctionFamily::AnnulusCluster { radius: 2.0, seed: 12 };
    let lam5: Vec<f64> = (1..=5).map(|k| 2f64.powi(k)).collect();
    let coarse =
        bernstein_twosided_sweep(1, &ev("1,1"), &lam5, &annulus, &GridSpec::torus(2, 256).unwrap(), 10)
            .unwrap();
    let fine = bernstein_twosided_sweep(1, &ev("1,1"), &lam5, &annulus, &g512, 10).unwrap();
    let mu = coarse.upper.fitted_slope.unwrap();
    let ml = coarse.lower.fitted_slope.unwrap();
    let du = (fine.c_upper / coarse.c_upper - 1.0).abs();
    let dl = (fine.c_lower / coarse.c_lower - 1.0).abs();

    let pass = (m - 2.0).abs() <= 0.05
        && (mu - 1.0).abs() <= 0.05
        && (ml - 1.0).abs() <= 0.05
        && du <= 0.10
        && dl <= 0.10
        && coarse.c_upper.is_finite()
        && coarse.c_lower > 0.0;
    report(
        4,
        pass,
        format!(
            "ball slope {m:.4}; annulus slopes {mu:.4}/{ml:.4}; C {:.4}/{:.4} change {du:.3}/{dl:.3}",
            coarse.c_upper, coarse.c_lower
        ),
    );
}

#[test]
fn criterion_05_partition_and_reconstruction() {
    let g = GridSpec::torus(2, 128).unwrap();
    let part = DyadicPartition;
    let range = resolvable_range(&g);
    let mut residual = 0.0f64;
    for xi in g.frequency_magnitudes() {
        if xi == 0.0 {
            continue;
        }
        let sum: f64 = range.iter().map(|j| part.phi(xi / 2f64.powi(j))).sum();
        residual = residual.max((sum - 1.0).abs());
    }

    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let f = RealField::new(g.clone(), v).unwrap();
        let back = DyadicDecomposition::new(&f, &part).reconstruct();
        let err = back.sub(&f).unwrap();
        let rel = (err.mul(&err).unwrap().integral() / f.mul(&f).unwrap().integral()).sqrt();
        worst = worst.max(rel);
    }
    report(
        5,
        residual <= 1e-10 && worst <= 1e-8,
        format!("partition residual {residual:.2e}; reconstruction error {worst:.2e}"),
    );
}

fn pointwise_constants(grid: &GridSpec, thetas: &[f64]) -> Vec<f64> {
    let family = FunctionFamily::RandomBandlimited { shell: 2, seed: 6 };
    let radii = RadiusSet::dyadic(grid);
    let mut best = vec![0.0f64; thetas.len()];
    for u in family.generate(grid, 20).unwrap() {
        for (b, r) in best
            .iter_mut()
            .zip(pointwise_interpolation_multi(&u, 1.0, thetas, &radii).unwrap())
        {
            *b = b.max(r.p99_ratio);
        }
    }
    best
}

#[test]
fn criterion_06_pointwise_maximal_estimate() {
    let thetas = [0.25, 0.5, 0.75];
    let g = GridSpec::torus(2, 128).unwrap();
    let base = pointwise_constants(&g, &thetas);
    let fine = pointwise_constants(&g.refined(2).unwrap(), &thetas);
    let changes: Vec<f64> = base.iter().zip(&fine).map(|(a, b)| (b / a - 1.0).abs()).collect();
    let pass = base.iter().all(|c| c.is_finite() && *c > 0.0) && changes.iter().all(|d| *d < 0.10);
    report(6, pass, format!("C {base:.4?} -> {fine:.4?}, changes {changes:.4?}"));
}

#[test]
fn criterion_07_gn_boundedness() {
    let mut instances: Vec<(String, GnParams, GridSpec)> = ["2,2,2", "2,4,4", "6,6,6", "4,6,12"]
        .iter()
        .map(|q| {
            (
                format!("q=({q})"),
                h1_embedding_params(&ev(q)).unwrap(),
                GridSpec::torus(3, 16).unwrap(),
            )
        })
        .collect();
    instances.push(("eq-7/11".into(), balanced_instance(rq(7, 11)), GridSpec::torus(2, 64).unwrap()));
    let mut pass = true;
    let mut details = Vec::new();
    for (i, (name, params, grid)) in instances.iter().enumerate() {
        let family = FunctionFamily::RandomBandlimited { shell: 1, seed: 70 + i as u64 };
        let r = family_boundedness(params, &family, grid, 50).unwrap();
        let change = r.refinement_change.unwrap();
        pass &= r.verdict == SweepVerdict::Bounded && change <= 0.10;
        details.push(format!("{name}: max {:.4} change {change:.3}", r.max_ratio));
    }
    report(7, pass, details.join("; "));
}

#[test]
fn criterion_08_besov_gn() {
    let cases = [
        (CaseTag::I12, rq(0, 1), rq(1, 1), rq(19, 22), "8/3,16/3", "2,4", "4,8", Some(rq(1, 2))),
        (CaseTag::I31, rq(1, 4), rq(1, 1), rq(1, 2), "8/3,8/3", "2,2", "4,4/3", None),
        (CaseTag::Case2, rq(0, 1), rq(1, 2), rq(1, 2), "16/7,16/5", "4,4", "1,2", Some(rq(3, 4))),
    ];
    let grid = GridSpec::torus(2, 64).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for (i, (tag, sigma, s, theta, p, q, r, alpha)) in cases.iter().enumerate() {
        let base = GnParams::new(*sigma, *s, *theta, ev(p), ev(q), ev(r)).unwrap();
        let params = BesovGnParams::new(base, *alpha);
        let verdict = classify_besov_case(&params);
        let family = FunctionFamily::MultiShell { shells: vec![0, 1, 2], seed: 80 + i as u64 };
        let sweep = besov_gn_sweep(&params, &family, &grid, 50).unwrap();
        pass &= verdict.tag == *tag && verdict.is_valid() && sweep.verdict == SweepVerdict::Bounded;
        details.push(format!("{}: {:?} max {:.4}", tag.name(), sweep.verdict, sweep.max_ratio));
    }

    let i22 = BesovGnParams::new(
        GnParams::new(rq(1, 2), rq(1, 1), rq(1, 4), ev("2,2"), ev("2,2"), ev("2,2")).unwrap(),
        None,
    );
    let v22 = classify_besov_case(&i22);
    let contradiction = v22.tag == CaseTag::I22 && matches!(v22.status, CaseStatus::Contradiction { .. });
    let case3 = BesovGnParams::new(
        GnParams::new(rq(0, 1), rq(1, 1), rq(1, 2), ev("4,4"), ev("4,4"), ev("1,2")).unwrap(),
        None,
    );
    let v3 = classify_besov_case(&case3);
    let excluded = v3.tag == CaseTag::Case3 && v3.status == CaseStatus::Excluded;
    pass &= contradiction && excluded;
    details.push(format!("I22 contradiction {contradiction}; Case3 excluded {excluded}"));
    report(8, pass, details.join("; "));
}

#[test]
fn criterion_09_navier_stokes_diagnostics() {
    let g = GridSpec::torus(2, 64).unwrap();
    let nu = 0.1;
    let solver = NsSolver::new(&g, nu).unwrap();
    let traj = solver
        .run(&taylor_green(&g, nu, 0.0).unwrap(), 0.002, 1.0, 1)
        .unwrap();

    // Closed form (−cos x sin y, sin x cos y)e^{−2νt}, evaluated independently.
    let (t, v) = traj.snapshots.last().unwrap();
    let decay = (-2.0 * nu * t).exp();
    let ex = [
        RealField::from_fn(&g, |x| -x[0].cos() * x[1].sin() * decay).unwrap(),
        RealField::from_fn(&g, |x| x[0].sin() * x[1].cos() * decay).unwrap(),
    ];
    let err: f64 = v
        .iter()
        .zip(&ex)
        .map(|(a, b)| {
            let d = a.sub(b).unwrap();
            d.mul(&d).unwrap().integral()
        })
        .sum::<f64>()
        .sqrt();

    let residual = max_abs_residual(&energy_budget(&traj).unwrap());
    let n_values: Vec<i32> = resolvable_range(&g).lowpass_range().filter(|n| *n >= 0).collect();
    let series = flux_convergence(&traj, &n_values).unwrap();
    let last = series.flux.last().unwrap().abs();

    let pass = (*t - 1.0).abs() < 1e-12
        && err < 1e-8
        && residual < 1e-6
        && series.is_non_increasing()
        && last < 1e-8;
    report(
        9,
        pass,
        format!(
            "L2 error {err:.2e}; max residual {residual:.2e}; flux {:?} (floor {:.1e})",
            series.flux, series.roundoff_floor
        ),
    );
}

fn poisson_trajectory(grid: &GridSpec, rho: f64) -> Vec<(f64, RealField)> {
    let kernel = |x: f64| (1.0 - rho * rho) / (1.0 - 2.0 * rho * x.cos() + rho * rho);
    (0..=20)
        .map(|k| {
            let t = k as f64 / 20.0;
            let f = RealField::from_fn(grid, |x| (-t).exp() * kernel(x[0]) * kernel(x[1])).unwrap();
            (t, f)
        })
        .collect()
}

#[test]
fn criterion_10_approximate_identity() {
    let g = GridSpec::torus(2, 64).unwrap();
    let traj = poisson_trajectory(&g, 0.45);
    let range = resolvable_range(&g);
    let mut pass = true;
    let mut details = Vec::new();
    for (p, q) in [(4, "4,4"), (2, "2,4")] {
        let pq = SpaceTimeExponents::new(Exponent::int(p), ev(q), 1.0).unwrap();
        let sweep = approx_identity_sweep(&traj, &pq, range.j_min..=range.j_max, &DyadicPartition).unwrap();
        let lhs: Vec<f64> = sweep.points.iter().map(|pt| pt.lhs).collect();
        let decreasing = lhs.windows(2).all(|w| w[1] < w[0]);
        let top = *lhs.last().unwrap();
        pass &= decreasing && top < 1e-6;
        details.push(format!("({p},({q})): top j={} error {top:.2e}, decreasing {decreasing}", range.j_max));
    }
    report(10, pass, details.join("; "));
}

fn run_cli(args: &[&str], out: &Path) -> i32 {
    let mut full = vec!["aniso-gn".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.push("--out".into());
    full.push(out.to_string_lossy().into_owned());
    aniso_gn::cli::run(full)
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path
                .extension()
                .is_some_and(|x| x == "csv" || x == "json" || x == "html")
            {
                let name = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((name, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_11_cli_determinism() {
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("check", vec!["check", "--sigma", "0", "--s", "1", "--p", "4,6", "--q", "2,4", "--r", "2,3", "--solve-theta"]),
        ("solve", vec!["solve-theta", "--s", "1", "--p", "4,6", "--q", "2,4", "--r", "2,3"]),
        ("classify", vec!["classify-besov", "--sigma", "0", "--s", "1", "--theta", "19/22", "--p", "8/3,16/3", "--q", "2,4", "--r", "4,8", "--alpha", "1/2"]),
        ("gn", vec!["verify-gn", "--s", "1", "--p", "4,6", "--q", "2,4", "--r", "2,3", "--size", "64"]),
        ("gn-family", vec!["verify-gn", "--s", "1", "--p", "4,6", "--q", "2,4", "--r", "2,3", "--mode", "family", "--family", "random-bandlimited", "--shell", "1", "--size", "32", "--count", "10", "--seed", "3"]),
        ("bernstein", vec!["verify-bernstein", "--p", "1,1", "--q", "2,2", "--size", "64", "--lambda-max", "3", "--seed", "4"]),
        ("besov", vec!["verify-besov", "--sigma", "0", "--s", "1", "--theta", "19/22", "--p", "8/3,16/3", "--q", "2,4", "--r", "4,8", "--size", "32", "--seed", "5"]),
        ("maximal", vec!["maximal-check", "--size", "32", "--count", "10", "--shell", "1", "--p", "2,2", "--seed", "6"]),
        ("ns", vec!["ns-run", "--scenario", "decaying-random", "--size", "32", "--t-end", "0.05", "--dt", "0.005", "--save-trajectory", "--residual-tol", "1", "--seed", "7"]),
    ];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    for root in [a.path(), b.path()] {
        for (name, args) in &commands {
            let code = run_cli(args, &root.join(name));
            if code == 1 {
                failures.push(format!("{name} errored"));
            }
        }
        // Both reruns read the trajectory stored by the first.
        let traj = a.path().join("ns").join("trajectory");
        let code = run_cli(
            &["ns-flux", "--trajectory", traj.to_str().unwrap(), "--q", "4,4", "--time-p", "4"],
            &root.join("flux"),
        );
        if code == 1 {
            failures.push("ns-flux errored".into());
        }
        let code = aniso_gn::cli::run(["aniso-gn", "report", "--input", root.to_str().unwrap()]);
        if code != 0 {
            failures.push("report failed".into());
        }
    }
    let (fa, fb) = (artifacts(a.path()), artifacts(b.path()));
    let names: Vec<&String> = fa.iter().map(|(n, _)| n).collect();
    let differing: Vec<&String> = fa
        .iter()
        .zip(&fb)
        .filter(|(x, y)| x != y)
        .map(|((n, _), _)| n)
        .collect();
    let identical = fa == fb && fa.len() >= 10;
    let pass = failures.is_empty() && identical;
    report(
        11,
        pass,
        format!(
            "{} files compared, identical {identical}, differing {differing:?}, failures {failures:?}; {names:?}",
            fa.len()
        ),
    );
}
