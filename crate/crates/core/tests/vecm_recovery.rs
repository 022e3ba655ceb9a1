use proxylab::vecm::synthetic::VecmDgp;
use proxylab::vecm::{adf_test, default_max_lags, fit_vecm, irf, johansen_trace, AdfSpec, TimeSeriesPair};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

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

#[test]
fn adjustment_speeds_recovered_within_two_se() {
    let dgp = VecmDgp::default();
    let trials = 200;
    let mut covered = [0usize; 2];
    for seed in 0..trials {
        let ts = dgp.simulate(2000, 10_000 + seed).unwrap();
        let m = fit_vecm(&ts, 1, 1).unwrap();
        let se = m.alpha_se().unwrap();
        for i in 0..2 {
            if (m.alpha[i] - dgp.alpha[i]).abs() <= 2.0 * se[i] {
                covered[i] += 1;
            }
        }
    }
    for (i, c) in covered.iter().enumerate() {
        assert!(*c as f64 >= 0.9 * trials as f64, "alpha[{i}] covered in {c}/{trials}");
    }
}

#[test]
fn near_deterministic_spread_pins_down_beta() {
    // The spread shock e1 - 0.1 e2 has sd 1e-4 while y2 keeps its trend.
    let dgp = VecmDgp {
        shock_cov: [[0.09 + 1e-8, 0.9], [0.9, 9.0]],
        ..VecmDgp::default()
    };
    for seed in 0..5 {
        let ts = dgp.simulate(500, seed).unwrap();
        let m = fit_vecm(&ts, 1, 1).unwrap();
        assert!((m.beta[1] + 0.1).abs() < 1e-3, "beta = {:?}", m.beta);
    }
}

#[test]
fn non_cointegrated_data_still_fits() {
    let ts = independent_walks(400, 3);
    let j = johansen_trace(&ts, 1).unwrap();
    assert_eq!(j.rank_selected, 0);
    let m = fit_vecm(&ts, 1, 1).unwrap();
    let t = m.alpha_t().unwrap();
    assert!(t.iter().all(|v| v.is_finite()));
    assert_eq!(m.rank_selected(), Some(0));
}

#[test]
fn unsupported_rank_is_an_error() {
    let ts = VecmDgp::default().simulate(200, 1).unwrap();
    for rank in [0, 2] {
        assert!(matches!(fit_vecm(&ts, rank, 1), Err(proxylab::Error::Unsupported(_))));
    }
}

#[test]
fn fitted_model_invariants() {
    let ts = VecmDgp::default().simulate(500, 42).unwrap();
    for k in 0..=4 {
        let m = fit_vecm(&ts, 1, k).unwrap();
        assert_eq!(m.beta[0], 1.0);
        assert_eq!(m.gamma.len(), k);
        let c = m.resid_cov;
        assert_eq!(c[0][1], c[1][0]);
        assert!(c[0][0] > 0.0 && c[0][0] * c[1][1] - c[0][1] * c[0][1] > 0.0);
        let r = irf(&m, 10, [0, 1]).unwrap();
        assert!(r.responses[0][0][0] > 0.0 && r.responses[1][1][0] > 0.0);
    }
}

#[test]
fn ect_of_fitted_model_is_stationary_on_one_draw() {
    let ts = VecmDgp::default().simulate(500, 9).unwrap();
    let m = fit_vecm(&ts, 1, 1).unwrap();
    let e = m.ect_series(&ts);
    let r = adf_test(&e, AdfSpec::Constant, default_max_lags(e.len())).unwrap();
    assert!(r.reject_unit_root.pct5);
}
