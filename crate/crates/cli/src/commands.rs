use proxylab::montecarlo::bias_curve_with_threads;
use proxylab::report::{AdfEntry, AdfReport, EstimateReport, JohansenReport};
use proxylab::vecm::tables::{ADF_TABLE, JOHANSEN_TABLE};
use proxylab::vecm::{default_max_lags, TimeSeriesPair};
use proxylab::{
    adf_test, estimate_imperfect_proxy, estimate_omitted, estimate_perfect_proxy, fit_vecm, irf, johansen_trace,
    proxy_criteria_report, run_plan_with_threads, simulate, AdfSpec, DgpConfig, EstimatorKind, McPlan, ProxyMode,
    Report, Sample,
};

use crate::args::{Command, EstimateMode};
use crate::run_config::RunConfig;
use crate::CliError;

pub struct Output {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn data(e: proxylab::Error) -> CliError {
    CliError::Data(e.to_string())
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn report<R: Report>(run: &RunConfig, stem: &str, r: &R) -> Result<Output, CliError> {
    Ok(Output {
        name: format!("{stem}.{}", run.format.extension()),
        bytes: r.render(run.format).map_err(data)?.into_bytes(),
    })
}

fn dgp(run: &RunConfig) -> &DgpConfig {
    run.dgp.as_ref().expect("validated: command has a DGP config")
}

fn sample(run: &RunConfig, input: Option<&[u8]>) -> Result<Sample, CliError> {
    match input {
        Some(bytes) => Sample::read_csv(bytes).map_err(|e| {
            CliError::Data(format!("{}: {e}", run.input.as_deref().unwrap_or("input")))
        }),
        None => simulate(dgp(run), run.n.expect("validated: simulated run has n"), run.seed).map_err(data),
    }
}

fn series(run: &RunConfig, input: Option<&[u8]>) -> Result<TimeSeriesPair, CliError> {
    let bytes = input.expect("validated: series command has input");
    TimeSeriesPair::read_csv(bytes)
        .map_err(|e| CliError::Data(format!("{}: {e}", run.input.as_deref().unwrap_or("input"))))
}

fn plan(run: &RunConfig) -> McPlan {
    let cfg = dgp(run).clone();
    McPlan::new(
        cfg,
        run.n.expect("validated: simulated run has n"),
        run.reps.expect("validated: Monte Carlo run has reps"),
        run.seed,
    )
}

fn ordering(run: &RunConfig, ts: &TimeSeriesPair) -> Result<[usize; 2], CliError> {
    let Some(spec) = &run.ordering else {
        return Ok([0, 1]);
    };
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let idx: Option<Vec<usize>> = parts.iter().map(|p| ts.column_index(p)).collect();
    match idx.as_deref() {
        Some([a, b]) if a != b => Ok([*a, *b]),
        _ => Err(CliError::Usage(format!(
            "--ordering `{spec}` must name both series ({}, {}) once each",
            ts.labels()[0],
            ts.labels()[1]
        ))),
    }
}

/// Produces every output file of a run, in memory.
pub fn execute(run: &RunConfig, input: Option<&[u8]>, threads: Option<usize>) -> Result<Vec<Output>, CliError> {
    let mut out = Vec::new();
    match run.command {
        Command::Simulate => {
            let s = sample(run, None)?;
            out.push(report(run, "sample", &s)?);
        }
        Command::Estimate => {
            let s = sample(run, input)?;
            let cfg = dgp(run);
            let mode = run.mode.unwrap_or(match cfg.mode {
                ProxyMode::PerfectProxy => EstimateMode::Perfect,
                ProxyMode::ImperfectProxy => EstimateMode::Imperfect,
            });
            let estimates = match mode {
                EstimateMode::Omitted => vec![estimate_omitted(&s, cfg).map_err(data)?],
                EstimateMode::Perfect => {
                    let (a, b) = estimate_perfect_proxy(&s, cfg).map_err(data)?;
                    vec![a, b]
                }
                EstimateMode::Imperfect => {
                    let (a, b) = estimate_imperfect_proxy(&s, cfg).map_err(data)?;
                    vec![a, b]
                }
            };
            let r = EstimateReport {
                mode: serde_json::to_value(mode)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                n_obs: s.n(),
                estimates,
            };
            out.push(report(run, "estimate", &r)?);
        }
        Command::Criteria => {
            let s = sample(run, input)?;
            let r = proxy_criteria_report(&s, dgp(run)).map_err(data)?;
            out.push(report(run, "criteria", &r)?);
        }
        Command::Mc => {
            let r = run_plan_with_threads(&plan(run), threads).map_err(data)?;
            out.push(report(run, "mc", &r)?);
        }
        Command::Sweep => {
            let spec = run.sweep.as_ref().expect("validated: sweep has a grid");
            let p = plan(run);
            let p = p.clone().with_estimators(&EstimatorKind::defaults_for(p.config.mode));
            let curve = bias_curve_with_threads(&p, spec.param, &spec.values, threads).map_err(data)?;
            out.push(report(run, "sweep", &curve)?);
            if run.plot {
                for (label, chart) in curve.charts() {
                    out.push(Output {
                        name: format!("sweep_{}.svg", file_stem(&label)),
                        bytes: chart.render().into_bytes(),
                    });
                }
            }
        }
        Command::Adf => {
            let ts = series(run, input)?;
            let spec = if run.trend { AdfSpec::ConstantTrend } else { AdfSpec::Constant };
            let mut tests = Vec::new();
            for i in 0..2 {
                let level = ts.column(i);
                let diff: Vec<f64> = level.windows(2).map(|w| w[1] - w[0]).collect();
                for (transform, z) in [("level", level), ("difference", diff)] {
                    let max_lags = run.max_lags.unwrap_or_else(|| default_max_lags(z.len()));
                    let result = adf_test(&z, spec, max_lags)
                        .map_err(|e| CliError::Data(format!("{} ({transform}): {e}", ts.labels()[i])))?;
                    tests.push(AdfEntry {
                        series: ts.labels()[i].clone(),
                        transform: transform.into(),
                        result,
                    });
                }
            }
            let r = AdfReport {
                table: ADF_TABLE.into(),
                tests,
            };
            out.push(report(run, "adf", &r)?);
        }
        Command::Johansen => {
            let ts = series(run, input)?;
            let r = JohansenReport {
                labels: ts.labels().clone(),
                table: JOHANSEN_TABLE.into(),
                result: johansen_trace(&ts, run.lags).map_err(data)?,
            };
            out.push(report(run, "johansen", &r)?);
        }
        Command::Vecm => {
            let ts = series(run, input)?;
            let m = fit_vecm(&ts, 1, run.lags).map_err(data)?;
            out.push(report(run, "vecm", &m)?);
        }
        Command::Irf => {
            let ts = series(run, input)?;
            let ord = ordering(run, &ts)?;
            let m = fit_vecm(&ts, 1, run.lags).map_err(data)?;
            let r = irf(&m, run.horizon, ord).map_err(data)?;
            out.push(report(run, "irf", &r)?);
            if run.plot {
                for ((imp, resp), chart) in r.charts() {
                    out.push(Output {
                        name: format!("irf_{}_{}.svg", file_stem(&r.labels[imp]), file_stem(&r.labels[resp])),
                        bytes: chart.render().into_bytes(),
                    });
                }
            }
        }
        Command::Replay => unreachable!("replay is resolved before execution"),
    }
    Ok(out)
}
