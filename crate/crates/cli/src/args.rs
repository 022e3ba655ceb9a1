use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use proxylab::Format;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Draw a sample from the latent-factor model.
    Simulate,
    /// Omitted-variable or proxy regressions with their bias decomposition.
    Estimate,
    /// Monte Carlo means, dispersion and z-scores against theory.
    Mc,
    /// Monte Carlo over a grid of one structural parameter.
    Sweep,
    /// Augmented Dickey-Fuller tests on both series, levels and differences.
    Adf,
    /// Johansen trace test with a restricted constant.
    Johansen,
    /// Rank-one VECM estimation.
    Vecm,
    /// Orthogonalised impulse responses of the fitted VECM.
    Irf,
    /// Proxy-quality criteria report.
    Criteria,
    /// Re-run a previous run from its manifest.
    Replay,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Estimate => "estimate",
            Self::Mc => "mc",
            Self::Sweep => "sweep",
            Self::Adf => "adf",
            Self::Johansen => "johansen",
            Self::Vecm => "vecm",
            Self::Irf => "irf",
            Self::Criteria => "criteria",
            Self::Replay => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    Omitted,
    Perfect,
    Imperfect,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: proxylab::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "proxylab", version, about = "Proxy-variable bias simulations and bivariate VECM analysis")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// DGP configuration file (`key = value` lines).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Input CSV: a sample (`y,x,p[,c,u[,v]]`) or a dated series pair.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "proxylab-out")]
    pub out: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Monte Carlo replications [default: 1000].
    #[arg(long)]
    pub reps: Option<usize>,

    /// Output format: json, csv or text.
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub format: Format,

    /// Also write SVG charts (sweep, irf).
    #[arg(long)]
    pub plot: bool,

    /// Sweep grid as `param:v1,v2,...` (alpha2, rho_xc, lambda, deltaX, deltaP).
    #[arg(long, value_name = "SPEC")]
    pub sweep: Option<String>,

    /// Estimator for `estimate` [default: the config's proxy mode].
    #[arg(long, value_enum)]
    pub mode: Option<EstimateMode>,

    /// Sample size for simulated data [default: 200].
    #[arg(long)]
    pub n: Option<usize>,

    /// Lagged differences in the Johansen/VECM regressions.
    #[arg(long, default_value_t = 1)]
    pub lags: usize,

    /// Largest ADF augmentation considered [default: 12 (n/100)^(1/4)].
    #[arg(long)]
    pub max_lags: Option<usize>,

    /// ADF with constant and linear trend instead of constant only.
    #[arg(long)]
    pub trend: bool,

    /// IRF horizon.
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,

    /// IRF recursive ordering, e.g. `GPR,Veh` [default: file column order].
    #[arg(long, value_name = "A,B")]
    pub ordering: Option<String>,

    /// Manifest to replay.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}
