//! Simulation from a known bivariate VECM, for recovery checks and demos.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::series::TimeSeriesPair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmDgp {
    pub labels: [String; 2],
    pub beta: [f64; 3],
    pub alpha: [f64; 2],
    pub gamma: Vec<[[f64; 2]; 2]>,
    pub shock_cov: [[f64; 2]; 2],
    /// Level of `y2` at the start of the burn-in; `y1` starts on the attractor.
    pub y2_start: f64,
    pub burn_in: usize,
}

impl Default for VecmDgp {
    /// A cointegrated pair with coefficients of the size seen in practice:
    /// `y1` corrects, `y2` drifts, shocks positively correlated.
    fn default() -> Self {
        Self {
            labels: ["GPR".into(), "Veh".into()],
            beta: [1.0, -0.1, -2.3],
            alpha: [-0.4, 0.15],
            gamma: vec![[[0.1, 0.05], [0.05, 0.1]]],
            shock_cov: [[0.25, 0.75], [0.75, 9.0]],
            y2_start: 10.0,
            burn_in: 100,
        }
    }
}

impl VecmDgp {
    fn shock_factor(&self) -> Result<[[f64; 2]; 2]> {
        let c = &self.shock_cov;
        let l00 = c[0][0].sqrt();
        let l10 = c[1][0] / l00;
        let d = c[1][1] - l10 * l10;
        if !(c[0][0] > 0.0) || !(d > 0.0) || (c[0][1] - c[1][0]).abs() > 1e-12 {
            return Err(Error::InvalidConfig("shock covariance must be symmetric positive definite".into()));
        }
        Ok([[l00, 0.0], [l10, d.sqrt()]])
    }

    pub fn simulate(&self, n: usize, seed: u64) -> Result<TimeSeriesPair> {
        if self.beta[0] == 0.0 {
            return Err(Error::InvalidConfig("beta[0] must be non-zero".into()));
        }
        let l = self.shock_factor()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.gamma.len();
        let y1_start = -(self.beta[1] * self.y2_start + self.beta[2]) / self.beta[0];
        let mut y = [y1_start, self.y2_start];
        let mut dys: Vec<[f64; 2]> = vec![[0.0; 2]; k];
        let mut obs = Vec::with_capacity(n);
        for t in 0..self.burn_in + n {
            let z: [f64; 2] = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
            let e = [l[0][0] * z[0], l[1][0] * z[0] + l[1][1] * z[1]];
            let ect = self.beta[0] * y[0] + self.beta[1] * y[1] + self.beta[2];
            let mut dy = [self.alpha[0] * ect + e[0], self.alpha[1] * ect + e[1]];
            for (g, lag) in self.gamma.iter().zip(&dys) {
                for i in 0..2 {
                    dy[i] += g[i][0] * lag[0] + g[i][1] * lag[1];
                }
            }
            if k > 0 {
                dys.rotate_right(1);
                dys[0] = dy;
            }
            y = [y[0] + dy[0], y[1] + dy[1]];
            if t >= self.burn_in {
                obs.push(y);
            }
        }
        TimeSeriesPair::new(self.labels.clone(), obs)
    }
}
