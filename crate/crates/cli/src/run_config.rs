use std::path::Path;

use proxylab::{DgpConfig, Format, SweepParam};
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command, EstimateMode};
use crate::CliError;

pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_N: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let (name, list) = s
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("--sweep `{s}` is not of the form param:v1,v2,...")))?;
        let param: SweepParam = name.trim().parse().map_err(|e: proxylab::Error| CliError::Usage(e.to_string()))?;
        let values = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Usage(format!("--sweep value `{v}` is not a finite number")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { param, values })
    }
}

/// Everything that determines a run's outputs. Stored in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub dgp: Option<DgpConfig>,
    pub input: Option<String>,
    pub seed: u64,
    pub format: Format,
    pub plot: bool,
    pub reps: Option<usize>,
    pub n: Option<usize>,
    pub mode: Option<EstimateMode>,
    pub sweep: Option<SweepSpec>,
    pub lags: usize,
    pub max_lags: Option<usize>,
    pub trend: bool,
    pub horizon: usize,
    pub ordering: Option<String>,
}

fn needs_dgp(c: Command) -> bool {
    matches!(c, Command::Simulate | Command::Estimate | Command::Criteria | Command::Mc | Command::Sweep)
}

fn needs_series(c: Command) -> bool {
    matches!(c, Command::Adf | Command::Johansen | Command::Vecm | Command::Irf)
}

/// Reads a file named on the command line; absence is a usage error.
pub fn read_named(path: &Path, flag: &str) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {flag} {}: {e}", path.display())))
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let c = cli.command;
        let usage = |m: String| Err(CliError::Usage(m));
        if needs_series(c) && cli.input.is_none() {
            return usage(format!("{} needs --input <series.csv>", c.as_str()));
        }
        if needs_dgp(c) && cli.config.is_none() {
            return usage(format!("{} needs --config <dgp.cfg>", c.as_str()));
        }
        if c == Command::Sweep && cli.sweep.is_none() {
            return usage("sweep needs --sweep param:v1,v2,...".into());
        }
        if cli.sweep.is_some() && c != Command::Sweep {
            return usage("--sweep is only valid with the sweep command".into());
        }
        if cli.mode.is_some() && c != Command::Estimate {
            return usage("--mode is only valid with the estimate command".into());
        }
        if cli.plot && !matches!(c, Command::Sweep | Command::Irf) {
            return usage("--plot is only supported by sweep and irf".into());
        }
        if cli.input.is_some() && matches!(c, Command::Simulate | Command::Mc | Command::Sweep) {
            return usage(format!("{} simulates its data and takes no --input", c.as_str()));
        }
        if c == Command::Irf && cli.horizon == 0 {
            return usage("--horizon must be at least 1".into());
        }
        let dgp = match &cli.config {
            Some(p) if needs_dgp(c) => {
                let bytes = read_named(p, "--config")?;
                let text = String::from_utf8(bytes)
                    .map_err(|_| CliError::Data(format!("{}: not valid UTF-8", p.display())))?;
                Some(DgpConfig::from_text(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?)
            }
            _ => None,
        };
        let simulates = matches!(c, Command::Simulate | Command::Mc | Command::Sweep)
            || (matches!(c, Command::Estimate | Command::Criteria) && cli.input.is_none());
        let monte_carlo = matches!(c, Command::Mc | Command::Sweep);
        Ok(Self {
            command: c,
            dgp,
            input: cli.input.as_ref().map(|p| p.to_string_lossy().into_owned()),
            seed: cli.seed,
            format: cli.format,
            plot: cli.plot,
            reps: if monte_carlo { Some(cli.reps.unwrap_or(DEFAULT_REPS)) } else { None },
            n: if simulates { Some(cli.n.unwrap_or(DEFAULT_N)) } else { None },
            mode: cli.mode,
            sweep: cli.sweep.as_deref().map(SweepSpec::parse).transpose()?,
            lags: cli.lags,
            max_lags: cli.max_lags,
            trend: cli.trend,
            horizon: cli.horizon,
            ordering: cli.ordering.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spec_parsing() {
        let s = SweepSpec::parse("deltaP:0,0.25,0.5").unwrap();
        assert_eq!(s.param, SweepParam::DeltaP);
        assert_eq!(s.values, vec![0.0, 0.25, 0.5]);
        assert!(SweepSpec::parse("deltaP").is_err());
        assert!(SweepSpec::parse("kappa:1").is_err());
        assert!(SweepSpec::parse("lambda:1,x").is_err());
    }
}
