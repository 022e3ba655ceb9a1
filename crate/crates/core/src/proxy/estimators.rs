use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{DgpConfig, ProxyMode};
use super::sample::Sample;
use crate::error::{Error, Result};
use crate::stats::{cov_slices, ols_single, ols_two_regressor, OlsFit};

/// One estimate next to the value theory says it should be centred on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub estimator: String,
    pub estimate: f64,
    pub se: f64,
    /// The structural quantity the estimator is meant to recover.
    pub structural_value: f64,
    /// Conditional expectation of the estimator.
    pub theoretical_target: f64,
    /// `theoretical_target - structural_value`, evaluated on this sample.
    pub bias_term_formula: f64,
    /// Shock-driven part `estimate - theoretical_target`, computed from the
    /// latent columns. `None` for observational data.
    pub sampling_term: Option<f64>,
    pub components: BTreeMap<String, f64>,
}

fn ledger_components(fit: &OlsFit) -> BTreeMap<String, f64> {
    let m = &fit.moments;
    [
        ("var_x", m.var_x),
        ("var_p", m.var_p),
        ("cov_xp", m.cov_xp),
        ("cov_xy", m.cov_xy),
        ("cov_py", m.cov_py),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
    .collect()
}

/// Regression of `y` on `x` alone, decomposed as
/// `b1 = alpha1 + alpha2 Cov(x,c)/V(x) + Cov(x,u)/V(x)`.
pub fn estimate_omitted(s: &Sample, config: &DgpConfig) -> Result<BiasReport> {
    let latent = s.latent.as_ref().ok_or(Error::MissingLatent("omitted-variable decomposition"))?;
    let fit = ols_single(&s.y, &s.x)?;
    let var_x = fit.moments.var_x.expect("single fit records V(x)");
    let cov_xc = cov_slices(&s.x, &latent.c);
    let cov_xu = cov_slices(&s.x, &latent.u);
    let bias = config.alpha2 * cov_xc / var_x;

    let mut components = ledger_components(&fit);
    components.insert("cov_xc".into(), cov_xc);
    components.insert("cov_xu".into(), cov_xu);
    Ok(BiasReport {
        estimator: "beta1".into(),
        estimate: fit.slopes[0],
        se: fit.se_slopes[0],
        structural_value: config.alpha1,
        theoretical_target: config.alpha1 + bias,
        bias_term_formula: bias,
        sampling_term: Some(cov_xu / var_x),
        components,
    })
}

/// Shock terms of the two-regressor closed forms for a composite error `e`:
/// `(Cov(x,e)V(p) - Cov(p,e)Cov(x,p)) / D` and
/// `(Cov(p,e)V(x) - Cov(x,e)Cov(x,p)) / D`.
fn two_regressor_noise(fit: &OlsFit, s: &Sample, e: &[f64]) -> (f64, f64, f64, f64) {
    let m = &fit.moments;
    let (vx, vp, cxp) = (m.var_x.unwrap(), m.var_p.unwrap(), m.cov_xp.unwrap());
    let det = vx * vp - cxp * cxp;
    let cxe = cov_slices(&s.x, e);
    let cpe = cov_slices(&s.p, e);
    ((cxe * vp - cpe * cxp) / det, (cpe * vx - cxe * cxp) / det, cxe, cpe)
}

fn require_mode(config: &DgpConfig, mode: ProxyMode, estimator: &'static str) -> Result<()> {
    if config.mode != mode {
        return Err(Error::ModeMismatch {
            estimator,
            expected: match mode {
                ProxyMode::PerfectProxy => "perfect-proxy",
                ProxyMode::ImperfectProxy => "imperfect-proxy",
            },
        });
    }
    Ok(())
}

/// Regression of `y` on `x` and the perfect proxy `p = lambda c`.
///
/// With `p` proportional to `c`, the `alpha2 / lambda` terms cancel from the
/// `x` coefficient and the `alpha1` terms cancel from the `p` coefficient, so
/// `E[g1] = alpha1` and `E[g2] = alpha2 / lambda`. The second report also
/// carries `alpha2_rescaled = lambda g2` among its components.
pub fn estimate_perfect_proxy(s: &Sample, config: &DgpConfig) -> Result<(BiasReport, BiasReport)> {
    require_mode(config, ProxyMode::PerfectProxy, "perfect-proxy estimator")?;
    let fit = ols_two_regressor(&s.y, &s.x, &s.p)?;
    let noise = s
        .latent
        .as_ref()
        .map(|l| two_regressor_noise(&fit, s, &l.u));

    let mut base = ledger_components(&fit);
    if let Some((_, _, cxu, cpu)) = noise {
        base.insert("cov_xu".into(), cxu);
        base.insert("cov_pu".into(), cpu);
    }
    let gamma2_target = config.alpha2 / config.lambda;
    let g1 = BiasReport {
        estimator: "gamma1".into(),
        estimate: fit.slopes[0],
        se: fit.se_slopes[0],
        structural_value: config.alpha1,
        theoretical_target: config.alpha1,
        bias_term_formula: 0.0,
        sampling_term: noise.map(|n| n.0),
        components: base.clone(),
    };
    let mut c2 = base;
    c2.insert("lambda".into(), config.lambda);
    c2.insert("alpha2_rescaled".into(), rescale_gamma2(fit.slopes[1], config.lambda)?);
    let g2 = BiasReport {
        estimator: "gamma2".into(),
        estimate: fit.slopes[1],
        se: fit.se_slopes[1],
        structural_value: gamma2_target,
        theoretical_target: gamma2_target,
        bias_term_formula: 0.0,
        sampling_term: noise.map(|n| n.1),
        components: c2,
    };
    Ok((g1, g2))
}

/// `lambda * g2`, the proxy-based estimate of `alpha2` when the proxy scale
/// is known. Its sign always matches the sign of `g2`.
pub fn rescale_gamma2(gamma2_hat: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    Ok(lambda * gamma2_hat)
}

/// Regression of `y` on `x` and an imperfect proxy.
///
/// Substituting `C = d0 + dX X + dP P + V` gives
/// `Y = mu0 + mu_X X + mu_P P + E` with `mu_X = alpha1 + alpha2 dX`,
/// `mu_P = alpha2 dP` and `E = alpha2 V + U`. The `x` coefficient keeps a
/// residual bias `alpha2 dX`; the proxy coefficient is `alpha2` attenuated by
/// `dP`.
pub fn estimate_imperfect_proxy(s: &Sample, config: &DgpConfig) -> Result<(BiasReport, BiasReport)> {
    require_mode(config, ProxyMode::ImperfectProxy, "imperfect-proxy estimator")?;
    let fit = ols_two_regressor(&s.y, &s.x, &s.p)?;
    let composite: Option<Vec<f64>> = s.latent.as_ref().and_then(|l| {
        l.v.as_ref()
            .map(|v| v.iter().zip(l.u.iter()).map(|(v, u)| config.alpha2 * v + u).collect())
    });
    let noise = composite.as_ref().map(|e| two_regressor_noise(&fit, s, e));

    let mut base = ledger_components(&fit);
    if let Some((_, _, cxe, cpe)) = noise {
        base.insert("cov_xe".into(), cxe);
        base.insert("cov_pe".into(), cpe);
    }
    let mut cx = base.clone();
    cx.insert("residual_bias".into(), config.alpha2 * config.delta_x);
    let mu_x = BiasReport {
        estimator: "mu_x".into(),
        estimate: fit.slopes[0],
        se: fit.se_slopes[0],
        structural_value: config.alpha1,
        theoretical_target: config.mu_x(),
        bias_term_formula: config.alpha2 * config.delta_x,
        sampling_term: noise.map(|n| n.0),
        components: cx,
    };
    let mut cp = base;
    cp.insert("attenuation".into(), config.delta_p);
    let mu_p = BiasReport {
        estimator: "mu_p".into(),
        estimate: fit.slopes[1],
        se: fit.se_slopes[1],
        structural_value: config.alpha2,
        theoretical_target: config.mu_p(),
        bias_term_formula: config.mu_p() - config.alpha2,
        sampling_term: noise.map(|n| n.1),
        components: cp,
    };
    Ok((mu_x, mu_p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxy::simulate;
    use proptest::prelude::*;

    #[test]
    fn omitted_without_omitted_effect() {
        let cfg = DgpConfig { alpha2: 0.0, rho_xc: 0.8, ..DgpConfig::perfect() };
        let r = estimate_omitted(&simulate(&cfg, 2000, 1).unwrap(), &cfg).unwrap();
        assert_eq!(r.bias_term_formula, 0.0);
        assert!((r.estimate - cfg.alpha1).abs() < 4.0 * r.se);
    }

    #[test]
    fn omitted_orthogonal() {
        let cfg = DgpConfig { alpha2: 3.0, rho_xc: 0.0, ..DgpConfig::perfect() };
        let r = estimate_omitted(&simulate(&cfg, 20_000, 2).unwrap(), &cfg).unwrap();
        assert!(r.bias_term_formula.abs() < 0.1);
    }

    #[test]
    fn omitted_zero_shock_decomposition() {
        let cfg = DgpConfig { alpha2: 1.0, rho_xc: 0.8, sigma_u: 0.0, ..DgpConfig::perfect() };
        for seed in 0..20 {
            let s = simulate(&cfg, 100, seed).unwrap();
            let r = estimate_omitted(&s, &cfg).unwrap();
            let c = &s.latent.as_ref().unwrap().c;
            let ratio = cov_slices(&s.x, c) / cov_slices(&s.x, &s.x);
            assert!((r.estimate - cfg.alpha1 - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn omitted_needs_latent() {
        let s = simulate(&DgpConfig::perfect(), 50, 0).unwrap();
        let obs = Sample::observed(s.y, s.x, s.p).unwrap();
        assert!(matches!(
            estimate_omitted(&obs, &DgpConfig::perfect()),
            Err(Error::MissingLatent(_))
        ));
    }

    #[test]
    fn perfect_proxy_noise_free() {
        let cfg = DgpConfig { lambda: 1.0, sigma_u: 0.0, alpha1: 0.7, alpha2: -2.0, ..DgpConfig::perfect() };
        let (g1, g2) = estimate_perfect_proxy(&simulate(&cfg, 300, 4).unwrap(), &cfg).unwrap();
        assert!((g1.estimate - 0.7).abs() < 1e-10);
        assert!((g2.estimate + 2.0).abs() < 1e-10);

        let cfg = DgpConfig { lambda: 4.0, alpha2: 2.0, sigma_u: 0.0, ..DgpConfig::perfect() };
        let (_, g2) = estimate_perfect_proxy(&simulate(&cfg, 300, 4).unwrap(), &cfg).unwrap();
        assert!((g2.estimate - 0.5).abs() < 1e-10);
        assert_eq!(g2.theoretical_target, 0.5);
        assert!((g2.components["alpha2_rescaled"] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn perfect_proxy_wrong_mode() {
        let cfg = DgpConfig::imperfect();
        let s = simulate(&cfg, 50, 0).unwrap();
        assert!(matches!(estimate_perfect_proxy(&s, &cfg), Err(Error::ModeMismatch { .. })));
        assert!(matches!(
            estimate_imperfect_proxy(&s, &DgpConfig::perfect()),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(rescale_gamma2(0.5, 4.0).unwrap(), 2.0);
        assert_eq!(rescale_gamma2(0.0, 3.3).unwrap(), 0.0);
        assert!(rescale_gamma2(1.0, 0.0).is_err());
        assert!(rescale_gamma2(1.0, -2.0).is_err());
    }

    #[test]
    fn imperfect_targets() {
        let cfg = DgpConfig { delta_x: 0.0, ..DgpConfig::imperfect() };
        let (mx, _) = estimate_imperfect_proxy(&simulate(&cfg, 100, 0).unwrap(), &cfg).unwrap();
        assert_eq!(mx.theoretical_target, cfg.alpha1);
        assert_eq!(mx.bias_term_formula, 0.0);

        let cfg = DgpConfig { delta_p: 0.0, alpha2: 5.0, ..DgpConfig::imperfect() };
        let (_, mp) = estimate_imperfect_proxy(&simulate(&cfg, 100, 0).unwrap(), &cfg).unwrap();
        assert_eq!(mp.theoretical_target, 0.0);
        assert_eq!(mp.components["attenuation"], 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn decomposition_identities_hold_per_sample(seed in any::<u64>(), a2 in -3.0..3.0f64, rho in -0.9..0.9f64, dx in -1.0..1.0f64) {
            let cfg = DgpConfig { alpha2: a2, rho_xc: rho, ..DgpConfig::perfect() };
            let s = simulate(&cfg, 80, seed).unwrap();
            let r = estimate_omitted(&s, &cfg).unwrap();
            let lhs = r.estimate - cfg.alpha1 - r.bias_term_formula - r.sampling_term.unwrap();
            prop_assert!(lhs.abs() < 1e-10);

            let (g1, g2) = estimate_perfect_proxy(&s, &cfg).unwrap();
            prop_assert!((g1.estimate - g1.theoretical_target - g1.sampling_term.unwrap()).abs() < 1e-10);
            prop_assert!((g2.estimate - g2.theoretical_target - g2.sampling_term.unwrap()).abs() < 1e-10);

            let cfg = DgpConfig { alpha2: a2, rho_xp: rho, delta_x: dx, delta0: 0.3, ..DgpConfig::imperfect() };
            let s = simulate(&cfg, 80, seed).unwrap();
            let (mx, mp) = estimate_imperfect_proxy(&s, &cfg).unwrap();
            prop_assert!((mx.estimate - mx.theoretical_target - mx.sampling_term.unwrap()).abs() < 1e-10);
            prop_assert!((mp.estimate - mp.theoretical_target - mp.sampling_term.unwrap()).abs() < 1e-10);
        }

        #[test]
        fn noise_free_perfect_proxy_is_exact(seed in any::<u64>(), a1 in -3.0..3.0f64, a2 in -3.0..3.0f64, lambda in 0.05..20.0f64) {
            let cfg = DgpConfig { alpha1: a1, alpha2: a2, lambda, sigma_u: 0.0, ..DgpConfig::perfect() };
            let s = simulate(&cfg, 60, seed).unwrap();
            let (g1, g2) = estimate_perfect_proxy(&s, &cfg).unwrap();
            prop_assert!((g1.estimate - a1).abs() < 1e-8);
            prop_assert!((g2.estimate - a2 / lambda).abs() < 1e-8);
        }

        #[test]
        fn rescale_preserves_sign(g in -1e6..1e6f64, lambda in 1e-9..1e9f64) {
            let r = rescale_gamma2(g, lambda).unwrap();
            prop_assert_eq!(r.signum(), g.signum());
            prop_assert_eq!(r == 0.0, g == 0.0);
        }
    }
}
