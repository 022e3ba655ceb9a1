use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxyMode {
    /// `P = lambda C`, with `(X, C)` drawn jointly.
    PerfectProxy,
    /// `(X, P)` drawn jointly and `C = delta0 + deltaX X + deltaP P + V`.
    ImperfectProxy,
}

impl ProxyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProxyMode::PerfectProxy => "perfect",
            ProxyMode::ImperfectProxy => "imperfect",
        }
    }
}

impl FromStr for ProxyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" | "perfect_proxy" | "PerfectProxy" => Ok(ProxyMode::PerfectProxy),
            "imperfect" | "imperfect_proxy" | "ImperfectProxy" => Ok(ProxyMode::ImperfectProxy),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Distribution of the standardised draws behind every shock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockDist {
    Gaussian,
    /// Uniform on `[-sqrt 3, sqrt 3]`, i.e. mean zero and unit variance.
    Uniform,
}

impl ShockDist {
    pub fn as_str(self) -> &'static str {
        match self {
            ShockDist::Gaussian => "gaussian",
            ShockDist::Uniform => "uniform",
        }
    }
}

impl FromStr for ShockDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "normal" => Ok(ShockDist::Gaussian),
            "uniform" => Ok(ShockDist::Uniform),
            other => Err(Error::InvalidConfig(format!("unknown shock distribution `{other}`"))),
        }
    }
}

/// Structural parameters of `Y = alpha0 + alpha1 X + alpha2 C + U` and of
/// the proxy equation.
///
/// In perfect-proxy mode `rho_xc`, `sigma_x` and `sigma_c` describe the joint
/// law of `(X, C)`. In imperfect-proxy mode `rho_xp`, `sigma_x` and `sigma_p`
/// describe `(X, P)` and `C` follows from the projection coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub lambda: f64,
    pub delta0: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    pub sigma_u: f64,
    pub sigma_v: f64,
    pub rho_xc: f64,
    pub sigma_x: f64,
    pub sigma_c: f64,
    pub rho_xp: f64,
    pub sigma_p: f64,
    pub mode: ProxyMode,
    pub shocks: ShockDist,
}

impl Default for DgpConfig {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            lambda: 1.0,
            delta0: 0.0,
            delta_x: 0.0,
            delta_p: 1.0,
            sigma_u: 1.0,
            sigma_v: 1.0,
            rho_xc: 0.5,
            sigma_x: 1.0,
            sigma_c: 1.0,
            rho_xp: 0.5,
            sigma_p: 1.0,
            mode: ProxyMode::PerfectProxy,
            shocks: ShockDist::Gaussian,
        }
    }
}

const KEYS: [&str; 14] = [
    "alpha0", "alpha1", "alpha2", "lambda", "delta0", "delta_x", "delta_p", "sigma_u", "sigma_v",
    "rho_xc", "sigma_x", "sigma_c", "rho_xp", "sigma_p",
];

impl DgpConfig {
    pub fn perfect() -> Self {
        Self::default()
    }

    pub fn imperfect() -> Self {
        Self {
            mode: ProxyMode::ImperfectProxy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for key in KEYS {
            let v = self.get(key).expect("known key");
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{key} must be finite, got {v}")));
            }
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!("lambda must be > 0, got {}", self.lambda)));
        }
        for (key, v) in [("sigma_x", self.sigma_x), ("sigma_c", self.sigma_c), ("sigma_p", self.sigma_p)] {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!("{key} must be > 0, got {v}")));
            }
        }
        for (key, v) in [("sigma_u", self.sigma_u), ("sigma_v", self.sigma_v)] {
            if v < 0.0 {
                return Err(Error::InvalidConfig(format!("{key} must be >= 0, got {v}")));
            }
        }
        for (key, v) in [("rho_xc", self.rho_xc), ("rho_xp", self.rho_xp)] {
            if !(v.abs() < 1.0) {
                return Err(Error::InvalidConfig(format!("{key} must lie in (-1, 1), got {v}")));
            }
        }
        Ok(())
    }

    /// Numeric parameter by name. Accepts `deltaX`/`deltaP` as aliases.
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "alpha0" => self.alpha0,
            "alpha1" => self.alpha1,
            "alpha2" => self.alpha2,
            "lambda" => self.lambda,
            "delta0" => self.delta0,
            "delta_x" | "deltaX" => self.delta_x,
            "delta_p" | "deltaP" => self.delta_p,
            "sigma_u" => self.sigma_u,
            "sigma_v" => self.sigma_v,
            "rho_xc" => self.rho_xc,
            "sigma_x" => self.sigma_x,
            "sigma_c" => self.sigma_c,
            "rho_xp" => self.rho_xp,
            "sigma_p" => self.sigma_p,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "alpha0" => &mut self.alpha0,
            "alpha1" => &mut self.alpha1,
            "alpha2" => &mut self.alpha2,
            "lambda" => &mut self.lambda,
            "delta0" => &mut self.delta0,
            "delta_x" | "deltaX" => &mut self.delta_x,
            "delta_p" | "deltaP" => &mut self.delta_p,
            "sigma_u" => &mut self.sigma_u,
            "sigma_v" => &mut self.sigma_v,
            "rho_xc" => &mut self.rho_xc,
            "sigma_x" => &mut self.sigma_x,
            "sigma_c" => &mut self.sigma_c,
            "rho_xp" => &mut self.rho_xp,
            "sigma_p" => &mut self.sigma_p,
            other => return Err(Error::InvalidConfig(format!("unknown parameter `{other}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Population slope of `C` on `X`, `Cov(X, C) / V(X)`.
    pub fn population_c_on_x(&self) -> f64 {
        match self.mode {
            ProxyMode::PerfectProxy => self.rho_xc * self.sigma_c / self.sigma_x,
            ProxyMode::ImperfectProxy => {
                self.delta_x + self.delta_p * self.rho_xp * self.sigma_p / self.sigma_x
            }
        }
    }

    /// Expected slope of the regression that omits `C`.
    pub fn omitted_target(&self) -> f64 {
        self.alpha1 + self.alpha2 * self.population_c_on_x()
    }

    /// `mu_X = alpha1 + alpha2 deltaX`.
    pub fn mu_x(&self) -> f64 {
        self.alpha1 + self.alpha2 * self.delta_x
    }

    /// `mu_P = alpha2 deltaP`.
    pub fn mu_p(&self) -> f64 {
        self.alpha2 * self.delta_p
    }

    /// Parses the `key = value` text format. Blank lines and `#` comments
    /// are ignored; omitted keys keep their defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = DgpConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let canonical = match key {
                "deltaX" => "delta_x",
                "deltaP" => "delta_p",
                k => k,
            };
            if !seen.insert(canonical.to_string()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            let parse_err = |e: Error| Error::Parse {
                line: line_no,
                message: e.to_string(),
            };
            match canonical {
                "mode" => cfg.mode = value.parse().map_err(parse_err)?,
                "shocks" => cfg.shocks = value.parse().map_err(parse_err)?,
                _ => {
                    let v: f64 = value.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("`{value}` is not a number"),
                    })?;
                    cfg.set(canonical, v).map_err(parse_err)?;
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DgpConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode = {}", self.mode.as_str())?;
        writeln!(f, "shocks = {}", self.shocks.as_str())?;
        for key in KEYS {
            writeln!(f, "{key} = {}", self.get(key).expect("known key"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_partial_file() {
        let cfg = DgpConfig::from_text(
            "# proxy experiment\nmode = imperfect\nalpha2 = 2\ndeltaX = 0.3 # residual bias\n\ndelta_p=0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, ProxyMode::ImperfectProxy);
        assert_eq!(cfg.alpha2, 2.0);
        assert_eq!(cfg.delta_x, 0.3);
        assert_eq!(cfg.delta_p, 0.5);
        assert_eq!(cfg.sigma_u, DgpConfig::default().sigma_u);
        assert!((cfg.mu_x() - 1.6).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_lines() {
        for (text, line) in [
            ("alpha1 = 1\nlambda 2\n", 2),
            ("alpha1 = x\n", 1),
            ("bogus = 1\n", 1),
            ("alpha1 = 1\nalpha1 = 2\n", 2),
            ("mode = sometimes\n", 1),
        ] {
            match DgpConfig::from_text(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn validation() {
        let bad = [
            DgpConfig { lambda: 0.0, ..DgpConfig::default() },
            DgpConfig { lambda: -1.0, ..DgpConfig::default() },
            DgpConfig { sigma_x: 0.0, ..DgpConfig::default() },
            DgpConfig { sigma_u: -0.1, ..DgpConfig::default() },
            DgpConfig { rho_xc: 1.0, ..DgpConfig::default() },
            DgpConfig { alpha1: f64::NAN, ..DgpConfig::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
        assert!(DgpConfig::default().validate().is_ok());
        assert!(DgpConfig { alpha2: 0.0, sigma_u: 0.0, ..DgpConfig::default() }.validate().is_ok());
    }

    proptest! {
        #[test]
        fn text_round_trip(a in -1e6..1e6f64, l in 1e-6..1e3f64, r in -0.99..0.99f64, s in 0.0..10.0f64) {
            let cfg = DgpConfig { alpha1: a, lambda: l, rho_xc: r, sigma_v: s, mode: ProxyMode::ImperfectProxy, ..DgpConfig::default() };
            prop_assert_eq!(DgpConfig::from_text(&cfg.to_text()).unwrap(), cfg);
        }
    }
}
