use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{cov_slices, mean, Column};
use crate::error::{Error, Result};
use crate::linalg;

/// Relative collinearity threshold for the two-regressor determinant.
pub const COLLINEARITY_TOL: f64 = 1e-12;

/// The sample moments that enter the closed-form estimators.
///
/// `x` is the first regressor and `p` the second; entries that do not apply
/// to a fit are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentLedger {
    pub var_x: Option<f64>,
    pub var_p: Option<f64>,
    pub cov_xp: Option<f64>,
    pub cov_xy: Option<f64>,
    pub cov_py: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub intercept: f64,
    pub slopes: Vec<f64>,
    pub residuals: Column,
    pub se_intercept: f64,
    /// Homoscedastic standard errors, `sqrt(diag(s^2 (X'X)^-1))`.
    pub se_slopes: Vec<f64>,
    /// Residual variance `SSR / (n - k - 1)`.
    pub sigma2: f64,
    pub r_squared: f64,
    pub n_obs: usize,
    pub moments: MomentLedger,
}

impl OlsFit {
    /// t-ratio of slope `i`; an exact zero over a zero standard error is 0.
    pub fn t_stat(&self, i: usize) -> f64 {
        t_ratio(self.slopes[i], self.se_slopes[i])
    }

    pub fn ssr(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }
}

pub(crate) fn t_ratio(coef: f64, se: f64) -> f64 {
    if se > 0.0 {
        coef / se
    } else if coef == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(coef)
    }
}

fn check_lengths(y: &Column, cols: &[&Column], min_n: usize) -> Result<usize> {
    let n = y.len();
    for c in cols {
        if c.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: c.len(),
            });
        }
    }
    if n < min_n {
        return Err(Error::TooFewObservations {
            required: min_n,
            got: n,
        });
    }
    Ok(n)
}

/// A variance this small relative to the data's magnitude is rounding noise.
fn is_zero_variance(var: f64, values: &[f64]) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    var <= (16.0 * f64::EPSILON * scale).powi(2)
}

/// Residuals, residual variance and R^2 for a fit with `k` slopes.
fn finish(y: &Column, fitted: impl Fn(usize) -> f64, k: usize) -> (Column, f64, f64) {
    let n = y.len();
    let resid: Vec<f64> = (0..n).map(|i| y[i] - fitted(i)).collect();
    let ssr: f64 = resid.iter().map(|e| e * e).sum();
    let ybar = mean(y);
    let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let r2 = if is_zero_variance(sst / (n - 1) as f64, y) {
        1.0
    } else {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    };
    let sigma2 = ssr / (n - k - 1) as f64;
    (Column::from_finite(resid), sigma2, r2)
}

/// Simple regression of `y` on `x`: slope `Cov(x,y) / V(x)`.
pub fn ols_single(y: &Column, x: &Column) -> Result<OlsFit> {
    let n = check_lengths(y, &[x], 3)?;
    let var_x = cov_slices(x, x);
    if is_zero_variance(var_x, x) {
        return Err(Error::ZeroVariance);
    }
    let cov_xy = cov_slices(x, y);
    let slope = cov_xy / var_x;
    let (xbar, ybar) = (mean(x), mean(y));
    let intercept = ybar - slope * xbar;

    let (residuals, sigma2, r_squared) =
        finish(y, |i| intercept + slope * x[i], 1);
    let sxx = (n - 1) as f64 * var_x;
    Ok(OlsFit {
        intercept,
        slopes: vec![slope],
        residuals,
        se_intercept: (sigma2 * (1.0 / n as f64 + xbar * xbar / sxx)).sqrt(),
        se_slopes: vec![(sigma2 / sxx).sqrt()],
        sigma2,
        r_squared,
        n_obs: n,
        moments: MomentLedger {
            var_x: Some(var_x),
            cov_xy: Some(cov_xy),
            ..Default::default()
        },
    })
}

/// Regression of `y` on an intercept, `x` and `p` through the symmetric
/// closed forms
///
/// ```text
/// g1 = (Cov(x,y) V(p) - Cov(p,y) Cov(x,p)) / (V(x) V(p) - Cov(x,p)^2)
/// g2 = (Cov(p,y) V(x) - Cov(x,y) Cov(x,p)) / (V(x) V(p) - Cov(x,p)^2)
/// ```
pub fn ols_two_regressor(y: &Column, x: &Column, p: &Column) -> Result<OlsFit> {
    let n = check_lengths(y, &[x, p], 4)?;
    let var_x = cov_slices(x, x);
    let var_p = cov_slices(p, p);
    if is_zero_variance(var_x, x) || is_zero_variance(var_p, p) {
        return Err(Error::ZeroVariance);
    }
    let cov_xp = cov_slices(x, p);
    let cov_xy = cov_slices(x, y);
    let cov_py = cov_slices(p, y);
    let det = var_x * var_p - cov_xp * cov_xp;
    if det <= COLLINEARITY_TOL * var_x * var_p {
        return Err(Error::Collinear { determinant: det });
    }
    let g1 = (cov_xy * var_p - cov_py * cov_xp) / det;
    let g2 = (cov_py * var_x - cov_xy * cov_xp) / det;
    let (xbar, pbar) = (mean(x), mean(p));
    let intercept = mean(y) - g1 * xbar - g2 * pbar;

    let (residuals, sigma2, r_squared) =
        finish(y, |i| intercept + g1 * x[i] + g2 * p[i], 2);
    let scale = (n - 1) as f64 * det;
    let quad = (var_p * xbar * xbar - 2.0 * cov_xp * xbar * pbar + var_x * pbar * pbar) / scale;
    Ok(OlsFit {
        intercept,
        slopes: vec![g1, g2],
        residuals,
        se_intercept: (sigma2 * (1.0 / n as f64 + quad)).sqrt(),
        se_slopes: vec![(sigma2 * var_p / scale).sqrt(), (sigma2 * var_x / scale).sqrt()],
        sigma2,
        r_squared,
        n_obs: n,
        moments: MomentLedger {
            var_x: Some(var_x),
            var_p: Some(var_p),
            cov_xp: Some(cov_xp),
            cov_xy: Some(cov_xy),
            cov_py: Some(cov_py),
        },
    })
}

/// Regression of `y` on an intercept and any number of regressors, solved
/// with a column-pivoted QR of the centred design.
pub fn ols_general(y: &Column, regressors: &[&Column]) -> Result<OlsFit> {
    let k = regressors.len();
    let n = check_lengths(y, regressors, k + 2)?;
    let means: Vec<f64> = regressors.iter().map(|c| mean(c)).collect();
    let ybar = mean(y);
    let xc = DMatrix::from_fn(n, k, |i, j| regressors[j][i] - means[j]);
    let yc = DMatrix::from_fn(n, 1, |i, _| y[i] - ybar);
    let ls = linalg::least_squares(&xc, &yc)?;

    let slopes: Vec<f64> = (0..k).map(|j| ls.coef[(j, 0)]).collect();
    let intercept = ybar - slopes.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();
    let (residuals, sigma2, r_squared) = finish(
        y,
        |i| intercept + (0..k).map(|j| slopes[j] * regressors[j][i]).sum::<f64>(),
        k,
    );
    let se_slopes = (0..k).map(|j| (sigma2 * ls.xtx_inv[(j, j)]).sqrt()).collect();
    let mut quad = 0.0;
    for a in 0..k {
        for b in 0..k {
            quad += means[a] * ls.xtx_inv[(a, b)] * means[b];
        }
    }

    let mut moments = MomentLedger::default();
    if let Some(x) = regressors.first() {
        moments.var_x = Some(cov_slices(x, x));
        moments.cov_xy = Some(cov_slices(x, y));
    }
    if let (Some(x), Some(p)) = (regressors.first(), regressors.get(1)) {
        moments.var_p = Some(cov_slices(p, p));
        moments.cov_xp = Some(cov_slices(x, p));
        moments.cov_py = Some(cov_slices(p, y));
    }

    Ok(OlsFit {
        intercept,
        slopes,
        residuals,
        se_intercept: (sigma2 * (1.0 / n as f64 + quad)).sqrt(),
        se_slopes,
        sigma2,
        r_squared,
        n_obs: n,
        moments,
    })
}
