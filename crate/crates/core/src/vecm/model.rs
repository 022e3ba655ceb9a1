use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::johansen::{blocks, johansen_trace, JohansenResult};
use super::series::TimeSeriesPair;
use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// Quantities that exist only for a model estimated from data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmEstimation {
    pub alpha_se: [f64; 2],
    /// `gamma_se[j][i][m]` matches `gamma[j][i][m]`.
    pub gamma_se: Vec<[[f64; 2]; 2]>,
    pub n_obs: usize,
    pub johansen: JohansenResult,
}

/// `dy_t = alpha * beta'[y_{t-1}, 1] + sum_j Gamma_j dy_{t-j} + e_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmModel {
    pub labels: [String; 2],
    /// Coefficients on `[y1, y2, 1]`; `beta[0] == 1`.
    pub beta: [f64; 3],
    pub alpha: [f64; 2],
    /// One matrix per lagged difference; row = equation.
    pub gamma: Vec<[[f64; 2]; 2]>,
    pub resid_cov: [[f64; 2]; 2],
    pub estimation: Option<VecmEstimation>,
}

/// Rescales a cointegration vector so its first entry is exactly 1.
pub fn normalize_beta(v: [f64; 3]) -> Result<[f64; 3]> {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !v.iter().all(|x| x.is_finite()) || !(v[0].abs() > 1e-12 * scale) {
        return Err(Error::Singular(
            "cointegration vector has no weight on the first variable and cannot be normalised".into(),
        ));
    }
    Ok([1.0, v[1] / v[0], v[2] / v[0]])
}

fn check_cov(c: &[[f64; 2]; 2]) -> Result<()> {
    let sym = (c[0][1] - c[1][0]).abs() <= 1e-12 * (c[0][0].abs() + c[1][1].abs());
    let pd = c[0][0] > 0.0 && c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0.0;
    if sym && pd && c.iter().flatten().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "residual covariance must be symmetric positive definite".into(),
        ))
    }
}

impl VecmModel {
    /// Builds a model from known parameters; `beta` is normalised.
    pub fn from_parts(
        labels: [String; 2],
        beta: [f64; 3],
        alpha: [f64; 2],
        gamma: Vec<[[f64; 2]; 2]>,
        resid_cov: [[f64; 2]; 2],
    ) -> Result<Self> {
        check_cov(&resid_cov)?;
        Ok(Self {
            labels,
            beta: normalize_beta(beta)?,
            alpha,
            gamma,
            resid_cov,
            estimation: None,
        })
    }

    pub fn lags_diff(&self) -> usize {
        self.gamma.len()
    }

    pub fn alpha_se(&self) -> Option<[f64; 2]> {
        self.estimation.as_ref().map(|e| e.alpha_se)
    }

    pub fn alpha_t(&self) -> Option<[f64; 2]> {
        self.alpha_se()
            .map(|se| [self.alpha[0] / se[0], self.alpha[1] / se[1]])
    }

    pub fn trace_stats(&self) -> Option<[f64; 2]> {
        self.estimation.as_ref().map(|e| e.johansen.trace_stats)
    }

    pub fn rank_selected(&self) -> Option<usize> {
        self.estimation.as_ref().map(|e| e.johansen.rank_selected)
    }

    /// The error-correction term evaluated at every observation of `ts`.
    pub fn ect_series(&self, ts: &TimeSeriesPair) -> Vec<f64> {
        ts.obs().iter().map(|y| ect(self, y[0], y[1])).collect()
    }
}

/// `beta'[y1, y2, 1]`, grouped so that `ect(m, equilibrium_level(m, y2), y2)`
/// is exactly zero.
pub fn ect(model: &VecmModel, y1_lag: f64, y2_lag: f64) -> f64 {
    let b = &model.beta;
    b[0] * y1_lag + (b[1] * y2_lag + b[2])
}

/// The `y1` level at which the error-correction term vanishes.
pub fn equilibrium_level(model: &VecmModel, y2_lag: f64) -> f64 {
    let b = &model.beta;
    -(b[1] * y2_lag + b[2]) / b[0]
}

/// One-step predicted `dy_t` from `y_{t-1}` and the lagged differences
/// `dy_lags[j] = dy_{t-1-j}`; missing lags count as zero.
pub fn ecm_adjustment_step(model: &VecmModel, y_lag: [f64; 2], dy_lags: &[[f64; 2]]) -> [f64; 2] {
    let e = ect(model, y_lag[0], y_lag[1]);
    let mut out = [model.alpha[0] * e, model.alpha[1] * e];
    for (g, dy) in model.gamma.iter().zip(dy_lags) {
        for i in 0..2 {
            out[i] += g[i][0] * dy[0] + g[i][1] * dy[1];
        }
    }
    out
}

/// Display convention for t-ratios: `***`, `**`, `*` or `n.s.`.
pub fn significance_stars(t: f64) -> &'static str {
    let a = t.abs();
    if a > 3.29 {
        "***"
    } else if a > 2.58 {
        "**"
    } else if a > 1.96 {
        "*"
    } else {
        "n.s."
    }
}

/// Rank-one VECM with restricted constant. `beta` comes from the leading
/// Johansen eigenvector; `alpha` and `Gamma` from OLS of `dy_t` on
/// `[ECT_{t-1}, dy_{t-1}, ..., dy_{t-k}]`.
pub fn fit_vecm(ts: &TimeSeriesPair, rank: usize, lags_diff: usize) -> Result<VecmModel> {
    if rank != 1 {
        return Err(Error::Unsupported(format!(
            "cointegration rank {rank} requested; only rank 1 is supported"
        )));
    }
    let johansen = johansen_trace(ts, lags_diff)?;
    let beta = normalize_beta(johansen.eigenvectors[0])?;
    let b = blocks(ts, lags_diff);
    let t_eff = b.z0.nrows();
    let k = 1 + 2 * lags_diff;
    let mut x = DMatrix::zeros(t_eff, k);
    for r in 0..t_eff {
        x[(r, 0)] = beta[0] * b.z1[(r, 0)] + (beta[1] * b.z1[(r, 1)] + beta[2]);
        for c in 0..2 * lags_diff {
            x[(r, 1 + c)] = b.z2[(r, c)];
        }
    }
    let ls = least_squares(&x, &b.z0).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::Singular("short-run regression design is collinear".into()),
        other => other,
    })?;
    if t_eff <= k {
        return Err(Error::TooFewObservations {
            required: k + 1,
            got: t_eff,
        });
    }
    let df = (t_eff - k) as f64;
    let mut se = DMatrix::zeros(k, 2);
    for i in 0..2 {
        let sigma2 = ls.resid.column(i).norm_squared() / df;
        for c in 0..k {
            se[(c, i)] = (sigma2 * ls.xtx_inv[(c, c)]).sqrt();
        }
    }
    let unpack = |m: &DMatrix<f64>| -> Vec<[[f64; 2]; 2]> {
        (0..lags_diff)
            .map(|j| {
                let mut g = [[0.0; 2]; 2];
                for (i, row) in g.iter_mut().enumerate() {
                    for (mcol, v) in row.iter_mut().enumerate() {
                        *v = m[(1 + 2 * j + mcol, i)];
                    }
                }
                g
            })
            .collect()
    };
    let e = &ls.resid;
    let cov = e.transpose() * e / t_eff as f64;
    let resid_cov = [[cov[(0, 0)], cov[(0, 1)]], [cov[(1, 0)], cov[(1, 1)]]];
    check_cov(&resid_cov).map_err(|_| Error::Singular("residual covariance is not positive definite".into()))?;
    Ok(VecmModel {
        labels: ts.labels().clone(),
        beta,
        alpha: [ls.coef[(0, 0)], ls.coef[(0, 1)]],
        gamma: unpack(&ls.coef),
        resid_cov,
        estimation: Some(VecmEstimation {
            alpha_se: [se[(0, 0)], se[(0, 1)]],
            gamma_se: unpack(&se),
            n_obs: t_eff,
            johansen,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(beta: [f64; 3], alpha: [f64; 2], gamma: Vec<[[f64; 2]; 2]>) -> VecmModel {
        VecmModel::from_parts(
            ["GPR".into(), "Veh".into()],
            beta,
            alpha,
            gamma,
            [[1.0, 0.0], [0.0, 1.0]],
        )
        .unwrap()
    }

    fn worked() -> VecmModel {
        model([1.0, -0.091, -2.319], [-0.378, 0.161], vec![[[0.0; 2]; 2]])
    }

    #[test]
    fn worked_ect_and_equilibrium() {
        let m = worked();
        assert!((ect(&m, 4.0, 10.0) - 0.771).abs() < 1e-12);
        assert!(ect(&m, 3.229, 10.0).abs() < 1e-12);
        assert!((equilibrium_level(&m, 10.0) - 3.229).abs() < 1e-12);
        assert!((equilibrium_level(&m, 0.0) - 2.319).abs() < 1e-15);
        let id = model([1.0, 0.0, 0.0], [0.0, 0.0], vec![]);
        assert_eq!(ect(&id, 5.0, 123.4), 5.0);
    }

    #[test]
    fn worked_adjustment_step() {
        let m = worked();
        let step = ecm_adjustment_step(&m, [4.0, 10.0], &[[0.0, 0.0]]);
        let oracle = -0.378 * (4.0 - (0.091 * 10.0 + 2.319));
        assert!((step[0] - oracle).abs() < 1e-12);
        assert!((step[0] + 0.291).abs() < 5e-4);
        let eq = ecm_adjustment_step(&m, [equilibrium_level(&m, 10.0), 10.0], &[[0.0, 0.0]]);
        assert_eq!(eq, [0.0, 0.0]);
        let direct = model([1.0, 0.0, -1.0], [-0.5, 0.0], vec![]);
        assert_eq!(ecm_adjustment_step(&direct, [2.0, 7.0], &[]), [-0.5, 0.0]);
    }

    #[test]
    fn short_run_terms_enter_the_step() {
        let m = model([1.0, 0.0, 0.0], [0.0, 0.0], vec![[[0.5, 0.1], [0.2, 0.3]]]);
        let s = ecm_adjustment_step(&m, [9.0, 9.0], &[[1.0, 2.0]]);
        assert!((s[0] - 0.7).abs() < 1e-15 && (s[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn stars() {
        assert_eq!(significance_stars(-3.5), "***");
        assert_eq!(significance_stars(2.6), "**");
        assert_eq!(significance_stars(-2.0), "*");
        assert_eq!(significance_stars(1.0), "n.s.");
    }

    #[test]
    fn constructor_checks() {
        assert!(normalize_beta([0.0, 1.0, 2.0]).is_err());
        assert!(VecmModel::from_parts(
            ["a".into(), "b".into()],
            [1.0, 0.0, 0.0],
            [0.0, 0.0],
            vec![],
            [[1.0, 2.0], [2.0, 1.0]]
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn normalisation_is_scale_invariant(
            v1 in -5.0f64..5.0, v2 in -5.0f64..5.0, v0 in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
            c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
            y1 in -50.0f64..50.0, y2 in -50.0f64..50.0,
        ) {
            let a = normalize_beta([v0, v1, v2]).unwrap();
            let b = normalize_beta([c * v0, c * v1, c * v2]).unwrap();
            prop_assert_eq!(a[0], 1.0);
            prop_assert_eq!(b[0], 1.0);
            for i in 1..3 {
                prop_assert!((a[i] - b[i]).abs() <= 1e-10 * (1.0 + a[i].abs()));
            }
            let ma = model(a, [0.0, 0.0], vec![]);
            let mb = model(b, [0.0, 0.0], vec![]);
            prop_assert!((ect(&ma, y1, y2) - ect(&mb, y1, y2)).abs() <= 1e-10 * (1.0 + y1.abs() + y2.abs()));
            prop_assert!((equilibrium_level(&ma, y2) - equilibrium_level(&mb, y2)).abs() <= 1e-10 * (1.0 + y2.abs() * 5.0));
            prop_assert_eq!(ect(&ma, equilibrium_level(&ma, y2), y2), 0.0);
        }

        #[test]
        fn negative_alpha_pulls_back(
            a0 in -2.0f64..-1e-3, a1 in -2.0f64..2.0, b1 in -3.0f64..3.0, b2 in -3.0f64..3.0,
            y2 in -10.0f64..10.0, gap in 1e-3f64..10.0,
        ) {
            let m = model([1.0, b1, b2], [a0, a1], vec![[[0.3, -0.2], [0.1, 0.4]]]);
            let y1 = equilibrium_level(&m, y2) + gap;
            prop_assume!(ect(&m, y1, y2) > 0.0);
            prop_assert!(ecm_adjustment_step(&m, [y1, y2], &[[0.0, 0.0]])[0] < 0.0);
        }
    }
}
