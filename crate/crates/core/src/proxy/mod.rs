//! The cross-sectional latent-factor model and its proxy estimators.

mod config;
pub mod criteria;
mod estimators;
mod sample;

pub use config::{DgpConfig, ProxyMode, ShockDist};
pub use criteria::{
    proxy_criteria_report, proxy_criteria_report_with, CriteriaReport, Criterion, CriterionName,
    CriterionStatus,
};
pub use estimators::{
    estimate_imperfect_proxy, estimate_omitted, estimate_perfect_proxy, rescale_gamma2, BiasReport,
};
pub use sample::{simulate, Latent, Sample};
