//! Replication engine for the expectation claims of the proxy estimators.
//!
//! Every replication draws a fresh sample with a seed derived from
//! `(base_seed, index)` (see [`seed`]) and runs the requested estimators.
//! Replications run in parallel but are aggregated in index order, so the
//! result is bit-identical for any thread count.

pub mod seed;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::proxy::{
    estimate_imperfect_proxy, estimate_omitted, estimate_perfect_proxy, simulate, DgpConfig, ProxyMode,
};

pub use seed::replication_seed;

pub const MIN_REPLICATIONS: usize = 100;
/// Share of failed replications above which a run is aborted.
pub const MAX_FAILURE_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Omitted,
    PerfectProxy,
    ImperfectProxy,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Omitted => "omitted",
            EstimatorKind::PerfectProxy => "perfect_proxy",
            EstimatorKind::ImperfectProxy => "imperfect_proxy",
        }
    }

    /// Estimators that apply to a configuration's mode.
    pub fn defaults_for(mode: ProxyMode) -> Vec<EstimatorKind> {
        match mode {
            ProxyMode::PerfectProxy => vec![EstimatorKind::Omitted, EstimatorKind::PerfectProxy],
            ProxyMode::ImperfectProxy => vec![EstimatorKind::Omitted, EstimatorKind::ImperfectProxy],
        }
    }

    /// `(label, target)` for every quantity this estimator produces.
    pub fn quantities(self, config: &DgpConfig) -> Vec<(String, f64)> {
        let q = |name: &str, target: f64| (format!("{}.{name}", self.as_str()), target);
        match self {
            EstimatorKind::Omitted => vec![q("beta1", config.omitted_target())],
            EstimatorKind::PerfectProxy => vec![
                q("gamma1", config.alpha1),
                q("gamma2", config.alpha2 / config.lambda),
                q("alpha2_rescaled", config.alpha2),
            ],
            EstimatorKind::ImperfectProxy => {
                vec![q("mu_x", config.mu_x()), q("mu_p", config.mu_p())]
            }
        }
    }

    fn evaluate(self, s: &crate::proxy::Sample, config: &DgpConfig) -> Result<Vec<f64>> {
        Ok(match self {
            EstimatorKind::Omitted => vec![estimate_omitted(s, config)?.estimate],
            EstimatorKind::PerfectProxy => {
                let (g1, g2) = estimate_perfect_proxy(s, config)?;
                vec![g1.estimate, g2.estimate, g2.components["alpha2_rescaled"]]
            }
            EstimatorKind::ImperfectProxy => {
                let (mx, mp) = estimate_imperfect_proxy(s, config)?;
                vec![mx.estimate, mp.estimate]
            }
        })
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omitted" => Ok(EstimatorKind::Omitted),
            "perfect_proxy" | "perfect" => Ok(EstimatorKind::PerfectProxy),
            "imperfect_proxy" | "imperfect" => Ok(EstimatorKind::ImperfectProxy),
            other => Err(Error::InvalidArgument(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPlan {
    pub config: DgpConfig,
    pub n_per_rep: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub estimators: Vec<EstimatorKind>,
}

impl McPlan {
    pub fn new(config: DgpConfig, n_per_rep: usize, replications: usize, base_seed: u64) -> Self {
        Self {
            estimators: EstimatorKind::defaults_for(config.mode),
            config,
            n_per_rep,
            replications,
            base_seed,
        }
    }

    pub fn with_estimators(mut self, estimators: &[EstimatorKind]) -> Self {
        self.estimators = estimators.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::InvalidConfig(format!(
                "at least {MIN_REPLICATIONS} replications are required, got {}",
                self.replications
            )));
        }
        if self.n_per_rep < 10 {
            return Err(Error::InvalidConfig(format!(
                "samples need at least 10 observations, got {}",
                self.n_per_rep
            )));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("no estimators requested".into()));
        }
        for e in &self.estimators {
            let ok = match e {
                EstimatorKind::Omitted => true,
                EstimatorKind::PerfectProxy => self.config.mode == ProxyMode::PerfectProxy,
                EstimatorKind::ImperfectProxy => self.config.mode == ProxyMode::ImperfectProxy,
            };
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "estimator {e} does not apply to {} mode",
                    self.config.mode.as_str()
                )));
            }
        }
        Ok(())
    }

    fn kinds(&self) -> Vec<EstimatorKind> {
        let mut k = self.estimators.clone();
        k.sort();
        k.dedup();
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub mean: f64,
    pub sd: f64,
    /// `sd / sqrt(n_ok)`.
    pub mc_se: f64,
    pub target: f64,
    /// `(mean - target) / mc_se`.
    pub z: f64,
    pub n_fail: usize,
    pub n_ok: usize,
    #[serde(skip)]
    pub all_estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationFailure {
    pub replication: usize,
    pub seed: u64,
    pub estimator: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub replications: usize,
    pub n_per_rep: usize,
    pub base_seed: u64,
    pub estimators: BTreeMap<String, EstimatorSummary>,
    pub failures: Vec<ReplicationFailure>,
}

impl McResult {
    pub fn get(&self, label: &str) -> Option<&EstimatorSummary> {
        self.estimators.get(label)
    }
}

fn z_score(mean: f64, target: f64, mc_se: f64) -> f64 {
    if mc_se > 0.0 {
        (mean - target) / mc_se
    } else if (mean - target).abs() <= 1e-9 * target.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(mean - target)
    }
}

fn summarize(values: Vec<f64>, target: f64, n_fail: usize) -> EstimatorSummary {
    let n = values.len();
    let mean = if n > 0 { values.iter().sum::<f64>() / n as f64 } else { f64::NAN };
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    let mc_se = sd / (n as f64).sqrt();
    EstimatorSummary {
        mean,
        sd,
        mc_se,
        target,
        z: z_score(mean, target, mc_se),
        n_fail,
        n_ok: n,
        all_estimates: values,
    }
}

type Outcome = Vec<std::result::Result<Vec<f64>, String>>;

fn replicate(plan: &McPlan, kinds: &[EstimatorKind], r: usize) -> Outcome {
    let seed = replication_seed(plan.base_seed, r as u64);
    match simulate(&plan.config, plan.n_per_rep, seed) {
        Ok(s) => kinds
            .iter()
            .map(|k| k.evaluate(&s, &plan.config).map_err(|e| e.to_string()))
            .collect(),
        Err(e) => kinds.iter().map(|_| Err(e.to_string())).collect(),
    }
}

/// Runs the plan on the global rayon pool.
pub fn run_plan(plan: &McPlan) -> Result<McResult> {
    run_plan_with_threads(plan, None)
}

/// Runs the plan on a dedicated pool of `threads` workers (`None` uses the
/// global pool). The result does not depend on the thread count.
pub fn run_plan_with_threads(plan: &McPlan, threads: Option<usize>) -> Result<McResult> {
    plan.validate()?;
    let kinds = plan.kinds();
    let run = || -> Vec<Outcome> {
        (0..plan.replications)
            .into_par_iter()
            .map(|r| replicate(plan, &kinds, r))
            .collect()
    };
    let outcomes = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut estimators = BTreeMap::new();
    let mut failures = Vec::new();
    for (ki, kind) in kinds.iter().enumerate() {
        let quantities = kind.quantities(&plan.config);
        let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(plan.replications); quantities.len()];
        let mut n_fail = 0;
        let mut first_error = None;
        for (r, outcome) in outcomes.iter().enumerate() {
            match &outcome[ki] {
                Ok(v) => {
                    for (slot, x) in values.iter_mut().zip(v) {
                        slot.push(*x);
                    }
                }
                Err(msg) => {
                    n_fail += 1;
                    first_error.get_or_insert_with(|| msg.clone());
                    failures.push(ReplicationFailure {
                        replication: r,
                        seed: replication_seed(plan.base_seed, r as u64),
                        estimator: kind.as_str().to_string(),
                        message: msg.clone(),
                    });
                }
            }
        }
        if n_fail as f64 > MAX_FAILURE_SHARE * plan.replications as f64 {
            return Err(Error::TooManyFailures {
                estimator: kind.as_str().to_string(),
                failed: n_fail,
                total: plan.replications,
                first: first_error.unwrap_or_default(),
            });
        }
        for ((label, target), vals) in quantities.into_iter().zip(values) {
            estimators.insert(label, summarize(vals, target, n_fail));
        }
    }

    Ok(McResult {
        replications: plan.replications,
        n_per_rep: plan.n_per_rep,
        base_seed: plan.base_seed,
        estimators,
        failures,
    })
}

/// Parameter that a bias curve sweeps over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "alpha2")]
    Alpha2,
    #[serde(rename = "rho_xc")]
    RhoXc,
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "deltaX")]
    DeltaX,
    #[serde(rename = "deltaP")]
    DeltaP,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Alpha2 => "alpha2",
            SweepParam::RhoXc => "rho_xc",
            SweepParam::Lambda => "lambda",
            SweepParam::DeltaX => "deltaX",
            SweepParam::DeltaP => "deltaP",
        }
    }

    pub fn apply(self, config: &mut DgpConfig, value: f64) {
        match self {
            SweepParam::Alpha2 => config.alpha2 = value,
            SweepParam::RhoXc => config.rho_xc = value,
            SweepParam::Lambda => config.lambda = value,
            SweepParam::DeltaX => config.delta_x = value,
            SweepParam::DeltaP => config.delta_p = value,
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha2" => Ok(SweepParam::Alpha2),
            "rho_xc" => Ok(SweepParam::RhoXc),
            "lambda" => Ok(SweepParam::Lambda),
            "deltaX" | "delta_x" => Ok(SweepParam::DeltaX),
            "deltaP" | "delta_p" => Ok(SweepParam::DeltaP),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub value: f64,
    pub result: McResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasCurve {
    pub param: SweepParam,
    pub points: Vec<CurvePoint>,
}

impl BiasCurve {
    /// Estimator labels in the order they appear in every point.
    pub fn labels(&self) -> Vec<String> {
        self.points
            .first()
            .map(|p| p.result.estimators.keys().cloned().collect())
            .unwrap_or_default()
    }

    /// `(value, mean)` pairs for one estimator label.
    pub fn means(&self, label: &str) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.result.get(label).map(|s| (p.value, s.mean)))
            .collect()
    }
}

/// One Monte Carlo run per grid value of `param`, all with the plan's base
/// seed (common random numbers across the grid).
pub fn bias_curve(plan: &McPlan, param: SweepParam, grid: &[f64]) -> Result<BiasCurve> {
    bias_curve_with_threads(plan, param, grid, None)
}

pub fn bias_curve_with_threads(
    plan: &McPlan,
    param: SweepParam,
    grid: &[f64],
    threads: Option<usize>,
) -> Result<BiasCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut p = plan.clone();
        param.apply(&mut p.config, value);
        points.push(CurvePoint {
            value,
            result: run_plan_with_threads(&p, threads)?,
        });
    }
    Ok(BiasCurve { param, points })
}
