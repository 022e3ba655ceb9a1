//! Unit-root and cointegration tests, the bivariate VECM with a restricted
//! constant, and its impulse responses.

mod adf;
mod irf;
mod johansen;
mod model;
mod series;
pub mod synthetic;
pub mod tables;

pub use adf::{adf_test, default_max_lags, AdfResult, AdfSpec};
pub use irf::{irf, level_var_coefficients, IrfResult};
pub use johansen::{johansen_trace, JohansenResult};
pub use model::{
    ecm_adjustment_step, ect, equilibrium_level, fit_vecm, normalize_beta, significance_stars, VecmEstimation,
    VecmModel,
};
pub use series::{TimeSeriesPair, MIN_OBS};
