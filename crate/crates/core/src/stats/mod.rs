//! Sample moments and ordinary least squares.
//!
//! All moments use the `n - 1` denominator. Every estimator built on top of
//! them is a ratio of moments, so the choice of denominator cancels.

mod ols;

pub use ols::{ols_general, ols_single, ols_two_regressor, MomentLedger, OlsFit};
pub(crate) use ols::t_ratio;

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A column of finite observations with at least one entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Column(Vec<f64>);

impl Column {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooFewObservations { required: 1, got: 0 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    /// Builds a column from values the caller already knows to be finite.
    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        mean(&self.0)
    }

    /// Sample variance with the `n - 1` denominator.
    pub fn variance(&self) -> Result<f64> {
        sample_cov(self, self)
    }
}

impl Deref for Column {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Column {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Column::new(values)
    }
}

impl From<Column> for Vec<f64> {
    fn from(c: Column) -> Self {
        c.0
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn cov_slices(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    s / (a.len() - 1) as f64
}

/// Sample covariance `sum((a - mean a)(b - mean b)) / (n - 1)`.
pub fn sample_cov(a: &Column, b: &Column) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewObservations {
            required: 2,
            got: a.len(),
        });
    }
    Ok(cov_slices(a, b))
}
