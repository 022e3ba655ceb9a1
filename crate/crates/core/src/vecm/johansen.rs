use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::series::TimeSeriesPair;
use super::tables::{johansen_trace_critical_values, Levels};
use crate::error::{Error, Result};
use crate::linalg::least_squares;

pub const JOHANSEN_MIN_EFFECTIVE: usize = 30;

/// Smallest/largest eigenvalue ratio of a correlation-scaled moment matrix
/// below which it is treated as singular.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    /// Ordered `l1 >= l2`.
    pub eigenvalues: [f64; 2],
    /// Trace statistics for `r = 0` and `r <= 1`.
    pub trace_stats: [f64; 2],
    /// Critical values matching `trace_stats`.
    pub critical_values: [Levels<f64>; 2],
    pub rank_selected: usize,
    /// Eigenvectors on `[y1_{t-1}, y2_{t-1}, 1]`, scaled so `v' S11 v = 1`.
    pub eigenvectors: [[f64; 3]; 2],
    pub lags_diff: usize,
    /// Effective sample `T = n - 1 - lags_diff`.
    pub n_obs: usize,
}

/// Regressor blocks for `t = k+1..n`: `dy_t`, `[y_{t-1}, 1]`, and the
/// lagged differences `dy_{t-1}..dy_{t-k}`.
pub(crate) struct Blocks {
    pub z0: DMatrix<f64>,
    pub z1: DMatrix<f64>,
    pub z2: DMatrix<f64>,
}

pub(crate) fn blocks(ts: &TimeSeriesPair, k: usize) -> Blocks {
    let y = ts.obs();
    let n = y.len();
    let t_eff = n - 1 - k;
    let mut z0 = DMatrix::zeros(t_eff, 2);
    let mut z1 = DMatrix::zeros(t_eff, 3);
    let mut z2 = DMatrix::zeros(t_eff, 2 * k);
    for (r, t) in (k + 1..n).enumerate() {
        for i in 0..2 {
            z0[(r, i)] = y[t][i] - y[t - 1][i];
            z1[(r, i)] = y[t - 1][i];
            for j in 1..=k {
                z2[(r, 2 * (j - 1) + i)] = y[t - j][i] - y[t - j - 1][i];
            }
        }
        z1[(r, 2)] = 1.0;
    }
    Blocks { z0, z1, z2 }
}

fn check_nonsingular(s: &DMatrix<f64>, what: &str) -> Result<()> {
    let d: Vec<f64> = (0..s.nrows()).map(|i| s[(i, i)]).collect();
    if d.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Singular(format!("{what} has a zero-variance component")));
    }
    let corr = DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| s[(i, j)] / (d[i] * d[j]).sqrt());
    let ev = SymmetricEigen::new(corr).eigenvalues;
    let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(v.abs())));
    if !(lo > SINGULAR_TOL * hi) {
        return Err(Error::Singular(format!("{what} is numerically singular")));
    }
    Ok(())
}

/// Johansen trace test for a bivariate system with the constant restricted
/// to the cointegration space.
pub fn johansen_trace(ts: &TimeSeriesPair, lags_diff: usize) -> Result<JohansenResult> {
    let n = ts.n();
    if n < lags_diff + 2 + JOHANSEN_MIN_EFFECTIVE {
        return Err(Error::TooFewObservations {
            required: lags_diff + 2 + JOHANSEN_MIN_EFFECTIVE,
            got: n,
        });
    }
    let b = blocks(ts, lags_diff);
    let t_eff = b.z0.nrows();
    let (r0, r1) = if lags_diff == 0 {
        (b.z0, b.z1)
    } else {
        let map = |e: Error| match e {
            Error::RankDeficient { .. } => Error::Singular("lagged differences are collinear".into()),
            other => other,
        };
        (
            least_squares(&b.z2, &b.z0).map_err(map)?.resid,
            least_squares(&b.z2, &b.z1).map_err(map)?.resid,
        )
    };
    let tf = t_eff as f64;
    let s00 = r0.transpose() * &r0 / tf;
    let s11 = r1.transpose() * &r1 / tf;
    let s01 = r0.transpose() * &r1 / tf;
    check_nonsingular(&s00, "residual moment matrix of the differences")?;
    check_nonsingular(&s11, "residual moment matrix of the lagged levels")?;

    let s00_inv = s00
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("difference moment matrix is not positive definite".into()))?
        .inverse();
    let l = s11
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("level moment matrix is not positive definite".into()))?
        .l();
    let l_inv = l
        .try_inverse()
        .ok_or_else(|| Error::Singular("level moment factor".into()))?;
    let a = s01.transpose() * s00_inv * &s01;
    let m = &l_inv * a * l_inv.transpose();
    let m = Matrix3::from_fn(|i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = SymmetricEigen::new(m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut eigenvalues = [0.0; 2];
    let mut eigenvectors = [[0.0; 3]; 2];
    for (slot, &i) in idx.iter().take(2).enumerate() {
        eigenvalues[slot] = eig.eigenvalues[i].clamp(0.0, 1.0 - 1e-15);
        let w = eig.eigenvectors.column(i).into_owned();
        let v = l_inv.transpose() * nalgebra::DVector::from_column_slice(w.as_slice());
        eigenvectors[slot] = [v[0], v[1], v[2]];
    }
    let trace_stats = [
        -tf * ((1.0 - eigenvalues[0]).ln() + (1.0 - eigenvalues[1]).ln()),
        -tf * (1.0 - eigenvalues[1]).ln(),
    ];
    let critical_values = [johansen_trace_critical_values(2), johansen_trace_critical_values(1)];
    let rank_selected = if trace_stats[0] <= critical_values[0].pct5 {
        0
    } else if trace_stats[1] <= critical_values[1].pct5 {
        1
    } else {
        2
    };
    Ok(JohansenResult {
        eigenvalues,
        trace_stats,
        critical_values,
        rank_selected,
        eigenvectors,
        lags_diff,
        n_obs: t_eff,
    })
}
