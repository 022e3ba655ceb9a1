use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::tables::{adf_critical_values, Levels};
use crate::error::{Error, Result};
use crate::linalg::{independent_columns, least_squares, RANK_TOL};

/// Minimum observations left in the test regression after losing
/// `max_lags + 2` to lagging and differencing.
pub const ADF_MIN_EFFECTIVE: usize = 20;

/// Relative SSR below which the test regression counts as an exact fit.
const EXACT_FIT_TOL: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdfSpec {
    Constant,
    ConstantTrend,
}

impl AdfSpec {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::ConstantTrend => "constant_trend",
        }
    }
}

impl fmt::Display for AdfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdfSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" | "c" => Ok(Self::Constant),
            "constant_trend" | "ct" | "trend" => Ok(Self::ConstantTrend),
            other => Err(Error::InvalidArgument(format!(
                "unknown ADF specification `{other}` (expected constant or constant_trend)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub lags_used: usize,
    pub max_lags: usize,
    pub spec: AdfSpec,
    /// Observations in the final test regression.
    pub n_obs: usize,
    pub critical_values: Levels<f64>,
    pub reject_unit_root: Levels<bool>,
}

/// Schwert's rule `floor(12 (n/100)^(1/4))`, capped so the test stays defined.
pub fn default_max_lags(n: usize) -> usize {
    let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    schwert.min(n.saturating_sub(ADF_MIN_EFFECTIVE + 2))
}

struct Fit {
    statistic: f64,
    ssr: f64,
    nobs: usize,
    nparams: usize,
}

/// Regression of `dz_t` on `[z_{t-1}, 1, (t), dz_{t-1}, ..., dz_{t-k}]` for
/// `t = start..n`. Columns that are exact linear combinations of earlier
/// ones are dropped, so deterministic inputs (a ramp, say) stay well-posed.
fn regression(z: &[f64], k: usize, start: usize, spec: AdfSpec) -> Result<Fit> {
    let n = z.len();
    let rows = n - start;
    let ncols = 2 + usize::from(spec == AdfSpec::ConstantTrend) + k;
    let mut x = DMatrix::zeros(rows, ncols);
    let mut y = DMatrix::zeros(rows, 1);
    for (r, t) in (start..n).enumerate() {
        y[(r, 0)] = z[t] - z[t - 1];
        x[(r, 0)] = z[t - 1];
        x[(r, 1)] = 1.0;
        let mut c = 2;
        if spec == AdfSpec::ConstantTrend {
            x[(r, 2)] = t as f64;
            c = 3;
        }
        for j in 1..=k {
            x[(r, c + j - 1)] = z[t - j] - z[t - j - 1];
        }
    }
    let order: Vec<usize> = (0..ncols).collect();
    let kept = independent_columns(&x, &order, RANK_TOL);
    if kept.first() != Some(&0) {
        return Err(Error::Degenerate("lagged level is identically zero".into()));
    }
    let xk = x.select_columns(&kept);
    let ls = least_squares(&xk, &y)?;
    let nparams = kept.len();
    if rows <= nparams {
        return Err(Error::TooFewObservations {
            required: nparams + 1,
            got: rows,
        });
    }
    let ssr = ls.resid.norm_squared();
    let coef = ls.coef[(0, 0)];
    let dz_norm = y.norm();
    let statistic = if ssr <= EXACT_FIT_TOL * dz_norm * dz_norm {
        // Noise-free series: the t-ratio is 0/0. A zero level coefficient
        // (e.g. a ramp, i.e. a random walk with drift and no shocks) is
        // reported as 0; anything else has no meaningful statistic.
        if coef.abs() * x.column(0).norm() <= 1e-8 * dz_norm {
            0.0
        } else {
            return Err(Error::Degenerate(
                "series is an exact deterministic recursion; the unit-root t-ratio is undefined".into(),
            ));
        }
    } else {
        let sigma2 = ssr / (rows - nparams) as f64;
        coef / (sigma2 * ls.xtx_inv[(0, 0)]).sqrt()
    };
    Ok(Fit {
        statistic,
        ssr,
        nobs: rows,
        nparams,
    })
}

fn aic(fit: &Fit) -> f64 {
    let t = fit.nobs as f64;
    (fit.ssr / t).max(f64::MIN_POSITIVE).ln() + 2.0 * fit.nparams as f64 / t
}

/// Augmented Dickey-Fuller test. The lag order minimises AIC over
/// `0..=max_lags` on the common sample, then the chosen model is refit on
/// all available observations.
pub fn adf_test(series: &[f64], spec: AdfSpec, max_lags: usize) -> Result<AdfResult> {
    let n = series.len();
    if n < max_lags + 2 + ADF_MIN_EFFECTIVE {
        return Err(Error::TooFewObservations {
            required: max_lags + 2 + ADF_MIN_EFFECTIVE,
            got: n,
        });
    }
    if let Some(index) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let first = series[0];
    if series.iter().all(|v| *v == first) {
        return Err(Error::ZeroVariance);
    }

    let common_start = max_lags + 1;
    let mut best = (0, f64::INFINITY);
    for k in 0..=max_lags {
        let score = aic(&regression(series, k, common_start, spec)?);
        if score < best.1 {
            best = (k, score);
        }
    }
    let lags_used = best.0;
    let fit = regression(series, lags_used, lags_used + 1, spec)?;
    let critical_values = adf_critical_values(spec, fit.nobs);
    let statistic = fit.statistic;
    Ok(AdfResult {
        statistic,
        lags_used,
        max_lags,
        spec,
        n_obs: fit.nobs,
        critical_values,
        reject_unit_root: critical_values.map(|cv| statistic < cv),
    })
}
