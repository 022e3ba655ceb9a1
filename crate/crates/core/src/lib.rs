//! Proxy-variable econometrics toolkit.
//!
//! The crate is organised around five pieces:
//!
//! * [`stats`]: sample moments and least-squares fits, including the
//!   one- and two-regressor closed forms built from moment ratios.
//! * [`proxy`]: the latent-factor data-generating process, the
//!   omitted-variable bias decomposition and perfect/imperfect proxy
//!   estimators together with the proxy-quality criteria report.
//! * [`montecarlo`]: a deterministic, order-independent replication engine
//!   that turns expectation statements into z-scores.
//! * [`vecm`]: ADF unit-root tests, the Johansen trace test with a
//!   restricted constant, bivariate VECM estimation, error-correction terms
//!   and orthogonalised impulse responses.
//! * [`report`]: JSON/CSV/text emission and dependency-free SVG charts.

pub mod error;
pub(crate) mod linalg;
pub mod montecarlo;
pub mod proxy;
pub mod report;
pub mod stats;
pub mod vecm;

pub use error::{Error, Result};
pub use montecarlo::{bias_curve, run_plan, run_plan_with_threads, BiasCurve, EstimatorKind, McPlan, McResult, SweepParam};
pub use proxy::{
    estimate_imperfect_proxy, estimate_omitted, estimate_perfect_proxy, proxy_criteria_report,
    rescale_gamma2, simulate, BiasReport, CriteriaReport, DgpConfig, ProxyMode, Sample, ShockDist,
};
pub use stats::{ols_general, ols_single, ols_two_regressor, sample_cov, Column, MomentLedger, OlsFit};
pub use vecm::{
    adf_test, ecm_adjustment_step, ect, equilibrium_level, fit_vecm, irf, johansen_trace, AdfResult,
    AdfSpec, IrfResult, JohansenResult, TimeSeriesPair, VecmModel,
};
pub use report::{Format, Report};
