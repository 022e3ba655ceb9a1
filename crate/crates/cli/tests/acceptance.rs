//! One line per acceptance criterion; exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, RngAlgorithm, TestRng, TestRunner};
use proxylab::montecarlo::{bias_curve, EstimatorKind, McPlan, McResult};
use proxylab::vecm::synthetic::VecmDgp;
use proxylab::vecm::{default_max_lags, TimeSeriesPair};
use proxylab::{
    adf_test, ecm_adjustment_step, ect, equilibrium_level, fit_vecm, irf, johansen_trace, ols_general, ols_single,
    ols_two_regressor, run_plan, simulate, AdfSpec, Column, DgpConfig, SweepParam, VecmModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Two-pass sample covariance, independent of the library's moment code.
fn cov(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (a.len() as f64 - 1.0)
}

/// z-score of a Monte Carlo mean recomputed from the raw replications.
fn z_from_draws(draws: &[f64], target: f64) -> f64 {
    let m = mean(draws);
    let sd = cov(draws, draws).sqrt();
    (m - target) / (sd / (draws.len() as f64).sqrt())
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn decomposition_identity() -> Outcome {
    let start = Instant::now();
    let cfg = DgpConfig {
        alpha2: 2.0,
        rho_xc: 0.6,
        ..DgpConfig::perfect()
    };
    let mut worst = 0.0f64;
    for seed in 0..1000 {
        let s = simulate(&cfg, 200, seed).unwrap();
        let lat = s.latent.as_ref().unwrap();
        let b1 = ols_single(&s.y, &s.x).unwrap().slopes[0];
        let vx = cov(&s.x, &s.x);
        let resid = b1 - cfg.alpha1 - cfg.alpha2 * cov(&s.x, &lat.c) / vx - cov(&s.x, &lat.u) / vx;
        worst = worst.max(resid.abs());
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-10 && t < Duration::from_secs(5),
        format!("max |identity residual| {worst:.2e} over 1000 samples (tol 1e-10); {} (limit 5 s)", secs(t)),
    )
}

fn mc_check(result: &McResult, checks: &[(&str, f64)]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, target) in checks {
        let s = result.get(label).unwrap();
        let z = z_from_draws(&s.all_estimates, *target);
        ok &= z.abs() < 4.0 && (z - s.z).abs() < 1e-9 && s.n_fail == 0;
        parts.push(format!("{label}: mean {:.5} target {target} z {z:+.2}", s.mean));
    }
    (ok, parts.join("; "))
}

fn perfect_proxy_unbiased() -> Outcome {
    let start = Instant::now();
    let cfg = DgpConfig {
        lambda: 2.0,
        alpha2: 3.0,
        ..DgpConfig::perfect()
    };
    let plan = McPlan::new(cfg, 200, 10_000, 20_240_601).with_estimators(&[EstimatorKind::PerfectProxy]);
    let r = run_plan(&plan).unwrap();
    let t = start.elapsed();
    let (ok, detail) = mc_check(&r, &[("perfect_proxy.gamma1", 1.0), ("perfect_proxy.gamma2", 1.5)]);
    outcome(
        ok && t < Duration::from_secs(30),
        format!("R=10000 n=200: {detail} (|z| < 4); {} (limit 30 s)", secs(t)),
    )
}

fn imperfect_targets() -> Outcome {
    let cfg = DgpConfig {
        alpha1: 1.0,
        alpha2: 2.0,
        delta_x: 0.3,
        delta_p: 0.5,
        ..DgpConfig::imperfect()
    };
    let plan = McPlan::new(cfg, 200, 10_000, 20_240_602).with_estimators(&[EstimatorKind::ImperfectProxy]);
    let r = run_plan(&plan).unwrap();
    let (ok, detail) = mc_check(&r, &[("imperfect_proxy.mu_x", 1.6), ("imperfect_proxy.mu_p", 1.0)]);
    outcome(ok, format!("R=10000 n=200: {detail} (|z| < 4)"))
}

fn attenuation_linearity() -> Outcome {
    let cfg = DgpConfig {
        alpha2: 2.0,
        ..DgpConfig::imperfect()
    };
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let plan = McPlan::new(cfg, 200, 2000, 20_240_603).with_estimators(&[EstimatorKind::ImperfectProxy]);
    let curve = bias_curve(&plan, SweepParam::DeltaP, &grid).unwrap();
    let means: Vec<f64> = curve.means("imperfect_proxy.mu_p").iter().map(|p| p.1).collect();
    let slope = cov(&grid, &means) / cov(&grid, &grid);
    let intercept = mean(&means) - slope * mean(&grid);
    outcome(
        (slope - 2.0).abs() <= 0.05 * 2.0 && intercept.abs() <= 0.02,
        format!("slope {slope:.4} (2 ± 5%), intercept {intercept:+.4} (|.| ≤ 0.02), R=2000 per grid point"),
    )
}

fn worked_model() -> VecmModel {
    VecmModel::from_parts(
        ["GPR".into(), "Veh".into()],
        [1.0, -0.091, -2.319],
        [-0.378, 0.161],
        vec![[[0.0; 2]; 2]],
        [[1.0, 0.0], [0.0, 1.0]],
    )
    .unwrap()
}

fn worked_example() -> Outcome {
    let m = worked_model();
    let e = ect(&m, 4.0, 10.0);
    let eq = equilibrium_level(&m, 10.0);
    outcome(
        (e - 0.771).abs() <= 1e-12 && (eq - 3.229).abs() <= 1e-12,
        format!("ECT(GPR=4, Veh=10) = {e:.15}, equilibrium(Veh=10) = {eq:.15} (tol 1e-12)"),
    )
}

fn sign_logic() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        PtConfig {
            cases: 100,
            failure_persistence: None,
            ..PtConfig::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let negative = std::cell::Cell::new(0usize);
    let strategy = (
        -0.8f64..-0.05,
        -0.3f64..0.3,
        -0.5f64..0.5,
        -5.0f64..5.0,
        any::<u64>(),
        -20.0f64..20.0,
        1e-3f64..5.0,
    );
    let res = runner.run(&strategy, |(a0, a1, b1, b2, seed, y2, gap)| {
        let dgp = VecmDgp {
            alpha: [a0, a1],
            beta: [1.0, b1, b2],
            ..VecmDgp::default()
        };
        let ts = dgp.simulate(300, seed).unwrap();
        let m = fit_vecm(&ts, 1, 1).unwrap();
        if m.alpha[0] < 0.0 {
            negative.set(negative.get() + 1);
            let y1 = equilibrium_level(&m, y2) + gap;
            prop_assume!(ect(&m, y1, y2) > 0.0);
            let step = ecm_adjustment_step(&m, [y1, y2], &[[0.0, 0.0]]);
            prop_assert!(step[0] < 0.0, "alpha {:?} gave step {:?}", m.alpha, step);
        }
        Ok(())
    });
    match res {
        Ok(()) => outcome(
            negative.get() > 0,
            format!("{} of 100 fitted models had alpha[0] < 0; all predicted ΔGPR < 0 when ECT > 0", negative.get()),
        ),
        Err(e) => outcome(false, format!("counterexample: {e}")),
    }
}

fn independent_walks(n: usize, seed: u64) -> TimeSeriesPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = [0.0, 0.0];
    let obs = (0..n)
        .map(|_| {
            for v in &mut y {
                let e: f64 = StandardNormal.sample(&mut rng);
                *v += e;
            }
            y
        })
        .collect();
    TimeSeriesPair::new(["a".into(), "b".into()], obs).unwrap()
}

fn rank_recovery() -> Outcome {
    let start = Instant::now();
    let dgp = VecmDgp::default();
    let (mut rank1, mut close, mut rank0) = (0, 0, 0);
    for seed in 0..500 {
        let ts = dgp.simulate(500, 1_000_000 + seed).unwrap();
        let j = johansen_trace(&ts, 1).unwrap();
        rank1 += usize::from(j.rank_selected == 1);
        let m = fit_vecm(&ts, 1, 1).unwrap();
        close += usize::from((m.beta[1] - -0.1).abs() <= 0.1 * 0.1);
        rank0 += usize::from(johansen_trace(&independent_walks(500, 2_000_000 + seed), 1).unwrap().rank_selected == 0);
    }
    let t = start.elapsed();
    outcome(
        rank1 >= 450 && close >= 450 && rank0 >= 450 && t < Duration::from_secs(120),
        format!(
            "cointegrated: rank 1 in {rank1}/500, beta ratio within 10% in {close}/500; independent walks: rank 0 in {rank0}/500 (≥ 90%); {} (limit 120 s)",
            secs(t)
        ),
    )
}

fn adf_size_power() -> Outcome {
    let (mut size, mut power) = (0, 0);
    for seed in 0..1000 {
        let mut rng = ChaCha8Rng::seed_from_u64(3_000_000 + seed);
        let e: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
        let w: Vec<f64> = e
            .iter()
            .scan(0.0, |a, x| {
                *a += x;
                Some(*a)
            })
            .collect();
        let k = default_max_lags(500);
        size += usize::from(adf_test(&w, AdfSpec::Constant, k).unwrap().reject_unit_root.pct5);
        power += usize::from(adf_test(&e, AdfSpec::Constant, k).unwrap().reject_unit_root.pct5);
    }
    outcome(
        size <= 100 && power >= 990,
        format!("5% level, n=500: random walks rejected {size}/1000 (≤ 10%), white noise rejected {power}/1000 (≥ 99%)"),
    )
}

fn ect_stationarity() -> Outcome {
    let dgp = VecmDgp::default();
    let mut ok = 0;
    for seed in 0..200 {
        let ts = dgp.simulate(500, 4_000_000 + seed).unwrap();
        let m = fit_vecm(&ts, 1, 1).unwrap();
        let e = m.ect_series(&ts);
        ok += usize::from(adf_test(&e, AdfSpec::Constant, default_max_lags(e.len())).unwrap().reject_unit_root.pct5);
    }
    outcome(ok >= 180, format!("fitted ECT rejects a unit root at 5% in {ok}/200 (≥ 90%)"))
}

fn irf_shape() -> Outcome {
    let dgp = VecmDgp::default();
    let mut ok = 0;
    for seed in 0..200 {
        let ts = dgp.simulate(500, 5_000_000 + seed).unwrap();
        let m = fit_vecm(&ts, 1, 1).unwrap();
        let r = irf(&m, 10, [0, 1]).unwrap();
        let own = &r.responses[0][0];
        let cross = (1..=3).all(|h| r.responses[0][1][h] > 0.0 && r.responses[1][0][h] > 0.0);
        ok += usize::from(own[5] < own[0] && cross);
    }
    outcome(
        ok >= 160,
        format!("own GPR response falls by h=5 and both cross responses positive at h=1..3 in {ok}/200 (≥ 80%)"),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6_000_000);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(10..300);
        let sx = 10f64.powf(rng.random_range(-3.0..3.0));
        let sp = 10f64.powf(rng.random_range(-3.0..3.0));
        let rho: f64 = rng.random_range(-0.95..0.95);
        let mut x = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let e: f64 = StandardNormal.sample(&mut rng);
            let xi = sx * z1 + rng.random_range(-5.0..5.0);
            let pi = sp * (rho * z1 + (1.0 - rho * rho).sqrt() * z2);
            x.push(xi);
            p.push(pi);
            y.push(0.5 + 1.3 * xi / sx - 0.7 * pi / sp + e);
        }
        let (y, x, p) = (Column::new(y).unwrap(), Column::new(x).unwrap(), Column::new(p).unwrap());
        let one = ols_single(&y, &x).unwrap();
        let one_g = ols_general(&y, &[&x]).unwrap();
        let two = ols_two_regressor(&y, &x, &p).unwrap();
        let two_g = ols_general(&y, &[&x, &p]).unwrap();
        worst = worst.max(rel(one.slopes[0], one_g.slopes[0]));
        worst = worst.max(rel(two.slopes[0], two_g.slopes[0]));
        worst = worst.max(rel(two.slopes[1], two_g.slopes[1]));
    }
    outcome(
        worst <= 1e-10,
        format!("max relative slope gap vs general solver {worst:.2e} over 1000 designs (tol 1e-10)"),
    )
}

fn proxylab(dir: &Path, threads: Option<&str>, args: &[&str]) -> Result<(), String> {
    let mut c = Command::new(env!("CARGO_BIN_EXE_proxylab"));
    c.current_dir(dir).args(args);
    match threads {
        Some(t) => c.env("PROXYLAB_THREADS", t),
        None => c.env_remove("PROXYLAB_THREADS"),
    };
    let o = c.output().map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr).trim()))
    }
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = std::fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let count_b = std::fs::read_dir(b).map_err(|e| e.to_string())?.count();
    if names.len() != count_b {
        return Err(format!("{} has {} files, {} has {count_b}", a.display(), names.len(), b.display()));
    }
    for n in &names {
        let x = std::fs::read(a.join(n)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(n)).map_err(|e| format!("{}: {e}", n.to_string_lossy()))?;
        if x != y {
            return Err(format!("{} differs", n.to_string_lossy()));
        }
    }
    Ok(names.len())
}

fn determinism() -> Outcome {
    let run = || -> Result<String, String> {
        let d = tempfile::tempdir().map_err(|e| e.to_string())?;
        let dir = d.path();
        std::fs::write(dir.join("perfect.cfg"), "mode = perfect\nlambda = 2\nalpha2 = 3\n").unwrap();
        std::fs::write(dir.join("imperfect.cfg"), "mode = imperfect\nalpha2 = 2\ndeltaX = 0.3\n").unwrap();
        let ts = VecmDgp::default().simulate(400, 77).unwrap();
        ts.write_csv(std::fs::File::create(dir.join("pair.csv")).unwrap()).unwrap();
        let runs: [&[&str]; 5] = [
            &["mc", "--config", "perfect.cfg", "--reps", "2000", "--seed", "7"],
            &["sweep", "--config", "imperfect.cfg", "--sweep", "deltaP:0,0.5,1", "--reps", "500", "--plot", "--format", "csv"],
            &["simulate", "--config", "imperfect.cfg", "--n", "100", "--seed", "3", "--format", "csv"],
            &["vecm", "--input", "pair.csv", "--format", "text"],
            &["irf", "--input", "pair.csv", "--plot", "--horizon", "15"],
        ];
        let mut files = 0;
        for (i, args) in runs.iter().enumerate() {
            let base = format!("run{i}");
            let mut a = args.to_vec();
            a.extend(["--out", &base]);
            proxylab(dir, Some("1"), &a)?;
            let manifest = format!("{base}/manifest.json");
            for threads in [None, Some("2"), Some("4")] {
                let again = format!("{base}_replay_{}", threads.unwrap_or("default"));
                proxylab(dir, threads, &["replay", "--manifest", &manifest, "--out", &again])?;
                files += same_tree(&dir.join(&base), &dir.join(&again))?;
            }
        }
        Ok(format!("{files} replayed files byte-identical across 5 commands with PROXYLAB_THREADS unset, 1, 2, 4"))
    };
    match run() {
        Ok(detail) => outcome(true, detail),
        Err(e) => outcome(false, e),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("decomposition identity", decomposition_identity),
        ("perfect-proxy unbiasedness", perfect_proxy_unbiased),
        ("imperfect-proxy targets", imperfect_targets),
        ("attenuation linearity", attenuation_linearity),
        ("worked-example arithmetic", worked_example),
        ("sign logic", sign_logic),
        ("Johansen rank recovery", rank_recovery),
        ("ADF size/power", adf_size_power),
        ("ECT stationarity", ect_stationarity),
        ("IRF shape", irf_shape),
        ("closed form vs normal equations", closed_forms),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
