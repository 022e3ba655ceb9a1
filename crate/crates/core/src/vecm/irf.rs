use serde::{Deserialize, Serialize};

use super::model::VecmModel;
use crate::error::{Error, Result};

type M2 = [[f64; 2]; 2];

const I2: M2 = [[1.0, 0.0], [0.0, 1.0]];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn add(a: &M2, b: &M2) -> M2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn sub(a: &M2, b: &M2) -> M2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

/// Orthogonalised impulse responses of the levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfResult {
    pub labels: [String; 2],
    pub horizon: usize,
    /// `ordering[0]` is the variable placed first in the recursive factor.
    pub ordering: [usize; 2],
    /// `impact[i][j]`: response of variable `i` to shock `j` at horizon 0.
    pub impact: M2,
    /// `responses[impulse][response][h]` for `h = 0..=horizon`.
    pub responses: [[Vec<f64>; 2]; 2],
}

/// Level-VAR coefficients `A_1..A_{k+1}` of the VECM: `A_1 = I + alpha beta' + Gamma_1`,
/// `A_j = Gamma_j - Gamma_{j-1}`, `A_{k+1} = -Gamma_k`. The restricted constant
/// only shifts the mean and drops out of the responses.
pub fn level_var_coefficients(model: &VecmModel) -> Vec<M2> {
    let ab = [
        [model.alpha[0] * model.beta[0], model.alpha[0] * model.beta[1]],
        [model.alpha[1] * model.beta[0], model.alpha[1] * model.beta[1]],
    ];
    let k = model.gamma.len();
    let zero = [[0.0; 2]; 2];
    let g = |j: usize| if j >= 1 && j <= k { model.gamma[j - 1] } else { zero };
    let mut a = vec![add(&add(&I2, &ab), &g(1))];
    for j in 2..=k + 1 {
        a.push(sub(&g(j), &g(j - 1)));
    }
    a
}

fn impact_matrix(cov: &M2, ordering: [usize; 2]) -> Result<M2> {
    let [p, q] = ordering;
    let s00 = cov[p][p];
    let s10 = cov[q][p];
    let s11 = cov[q][q];
    let l00 = s00.sqrt();
    let l10 = s10 / l00;
    let d = s11 - l10 * l10;
    if !(s00 > 0.0) || !(d > 0.0) {
        return Err(Error::Singular("residual covariance is not positive definite".into()));
    }
    let mut b = [[0.0; 2]; 2];
    b[p][p] = l00;
    b[q][p] = l10;
    b[q][q] = d.sqrt();
    Ok(b)
}

/// Recursive-ordering impulse responses up to `horizon`.
pub fn irf(model: &VecmModel, horizon: usize, ordering: [usize; 2]) -> Result<IrfResult> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("IRF horizon must be at least 1".into()));
    }
    if !(ordering == [0, 1] || ordering == [1, 0]) {
        return Err(Error::InvalidArgument(format!(
            "ordering {ordering:?} is not a permutation of (0, 1)"
        )));
    }
    let impact = impact_matrix(&model.resid_cov, ordering)?;
    let a = level_var_coefficients(model);
    let mut phi: Vec<M2> = vec![I2];
    for h in 1..=horizon {
        let mut acc = [[0.0; 2]; 2];
        for (j, aj) in a.iter().enumerate().take(h) {
            acc = add(&acc, &mul(aj, &phi[h - 1 - j]));
        }
        phi.push(acc);
    }
    let mut responses: [[Vec<f64>; 2]; 2] = Default::default();
    for p in &phi {
        let theta = mul(p, &impact);
        for (imp, row) in responses.iter_mut().enumerate() {
            for (resp, series) in row.iter_mut().enumerate() {
                series.push(theta[resp][imp]);
            }
        }
    }
    Ok(IrfResult {
        labels: model.labels.clone(),
        horizon,
        ordering,
        impact,
        responses,
    })
}
