//! Rendering of results as JSON, CSV or plain-text tables, plus SVG charts.

pub mod svg;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{BiasCurve, McResult};
use crate::proxy::{BiasReport, CriteriaReport, Sample};
use crate::vecm::{significance_stars, AdfResult, IrfResult, JohansenResult, VecmModel};
use svg::{Chart, Series, Stroke};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
            Self::Text => "text",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
            Self::Text => "txt",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" | "txt" => Ok(Self::Text),
            other => Err(Error::InvalidArgument(format!(
                "unknown format `{other}` (expected json, csv or text)"
            ))),
        }
    }
}

/// A result that can be written in every output format.
pub trait Report: Serialize {
    fn csv(&self) -> Result<String>;
    fn text(&self) -> String;

    fn json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Text => Ok(self.text()),
        }
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Fixed-width table for text reports.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{c:<w$}");
            } else {
                let _ = write!(s, "  {c:>w$}");
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect()));
    for r in rows {
        out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
    }
    out
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

// ---------------------------------------------------------------- samples

impl Serialize for Sample {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let names = self.column_names();
        let cols = self.columns();
        let mut m = s.serialize_map(Some(names.len() + 2))?;
        m.serialize_entry("n", &self.n())?;
        m.serialize_entry("seed", &self.seed)?;
        for (name, col) in names.iter().zip(cols) {
            m.serialize_entry(name, col)?;
        }
        m.end()
    }
}

impl Report for Sample {
    fn csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    fn text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .column_names()
            .iter()
            .zip(self.columns())
            .map(|(name, c)| {
                let n = c.len() as f64;
                let mean = c.iter().sum::<f64>() / n;
                let sd = (c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
                let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                vec![name.to_string(), f4(mean), f4(sd), f4(lo), f4(hi)]
            })
            .collect();
        let seed = self.seed.map(|s| format!(", seed {s}")).unwrap_or_default();
        format!(
            "Sample: n = {}{seed}\n\n{}",
            self.n(),
            table(&["column", "mean", "sd", "min", "max"], &rows)
        )
    }
}

// ------------------------------------------------------------- estimates

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mode: String,
    pub n_obs: usize,
    pub estimates: Vec<BiasReport>,
}

impl Report for EstimateReport {
    fn csv(&self) -> Result<String> {
        csv_string(
            &[
                "estimator",
                "estimate",
                "se",
                "structural_value",
                "theoretical_target",
                "bias_term_formula",
                "sampling_term",
            ],
            self.estimates.iter().map(|r| {
                vec![
                    r.estimator.clone(),
                    num(r.estimate),
                    num(r.se),
                    num(r.structural_value),
                    num(r.theoretical_target),
                    num(r.bias_term_formula),
                    opt(r.sampling_term),
                ]
            }),
        )
    }

    fn text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .estimates
            .iter()
            .map(|r| {
                vec![
                    r.estimator.clone(),
                    f4(r.estimate),
                    f4(r.se),
                    f4(r.structural_value),
                    f4(r.theoretical_target),
                    f4(r.bias_term_formula),
                    r.sampling_term.map(f4).unwrap_or_else(|| "-".into()),
                ]
            })
            .collect();
        let mut out = format!("Estimates ({}), n = {}\n\n", self.mode, self.n_obs);
        out.push_str(&table(
            &["estimator", "estimate", "se", "structural", "target", "bias term", "sampling"],
            &rows,
        ));
        for r in &self.estimates {
            let _ = write!(out, "\n{} components:\n", r.estimator);
            for (k, v) in &r.components {
                let _ = writeln!(out, "  {k} = {}", f4(*v));
            }
        }
        out
    }
}

// -------------------------------------------------------------- criteria

impl Report for CriteriaReport {
    fn csv(&self) -> Result<String> {
        let mut rows = Vec::new();
        for c in &self.criteria {
            let name = serde_json::to_value(c.name)?.as_str().unwrap_or_default().to_string();
            let status = serde_json::to_value(c.status)?.as_str().unwrap_or_default().to_string();
            if c.values.is_empty() {
                rows.push(vec![name.clone(), status.clone(), String::new(), String::new()]);
            }
            for (k, v) in &c.values {
                rows.push(vec![name.clone(), status.clone(), k.clone(), num(*v)]);
            }
        }
        csv_string(&["criterion", "status", "quantity", "value"], rows)
    }

    fn text(&self) -> String {
        let mut out = format!(
            "Proxy criteria, n = {} (critical value {})\n",
            self.n_obs, self.critical_value
        );
        for c in &self.criteria {
            let name = serde_json::to_value(c.name).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let _ = write!(out, "\n{name}: {status}\n  {}\n", c.note);
            for (k, v) in &c.values {
                let _ = writeln!(out, "  {k} = {}", f4(*v));
            }
        }
        out
    }
}

// ----------------------------------------------------------- Monte Carlo

impl Report for McResult {
    fn csv(&self) -> Result<String> {
        csv_string(
            &["quantity", "mean", "sd", "mc_se", "target", "z", "n_fail", "n_ok"],
            self.estimators.iter().map(|(k, s)| {
                vec![
                    k.clone(),
                    num(s.mean),
                    num(s.sd),
                    num(s.mc_se),
                    num(s.target),
                    num(s.z),
                    s.n_fail.to_string(),
                    s.n_ok.to_string(),
                ]
            }),
        )
    }

    fn text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .estimators
            .iter()
            .map(|(k, s)| {
                vec![
                    k.clone(),
                    f4(s.mean),
                    f4(s.sd),
                    format!("{:.6}", s.mc_se),
                    f4(s.target),
                    format!("{:.2}", s.z),
                    s.n_fail.to_string(),
                ]
            })
            .collect();
        let mut out = format!(
            "Monte Carlo: {} replications of n = {}, base seed {}\n\n",
            self.replications, self.n_per_rep, self.base_seed
        );
        out.push_str(&table(&["quantity", "mean", "sd", "mc_se", "target", "z", "n_fail"], &rows));
        if !self.failures.is_empty() {
            let _ = write!(out, "\n{} failed replication(s):\n", self.failures.len());
            for f in &self.failures {
                let _ = writeln!(out, "  #{} (seed {}) {}: {}", f.replication, f.seed, f.estimator, f.message);
            }
        }
        out
    }
}

const SUMMARY_FIELDS: [&str; 6] = ["mean", "sd", "mc_se", "target", "z", "n_fail"];

impl Report for BiasCurve {
    fn csv(&self) -> Result<String> {
        let labels = self.labels();
        let mut header = vec![self.param.as_str().to_string()];
        for l in &labels {
            for f in SUMMARY_FIELDS {
                header.push(format!("{l}_{f}"));
            }
        }
        let rows = self.points.iter().map(|p| {
            let mut row = vec![num(p.value)];
            for l in &labels {
                match p.result.get(l) {
                    Some(s) => row.extend([
                        num(s.mean),
                        num(s.sd),
                        num(s.mc_se),
                        num(s.target),
                        num(s.z),
                        s.n_fail.to_string(),
                    ]),
                    None => row.extend(std::iter::repeat_n(String::new(), SUMMARY_FIELDS.len())),
                }
            }
            row
        });
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        csv_string(&header_refs, rows)
    }

    fn text(&self) -> String {
        let mut out = format!("Bias curve over {}\n", self.param.as_str());
        for l in self.labels() {
            let rows: Vec<Vec<String>> = self
                .points
                .iter()
                .filter_map(|p| {
                    p.result.get(&l).map(|s| {
                        vec![f4(p.value), f4(s.mean), format!("{:.6}", s.mc_se), f4(s.target), format!("{:.2}", s.z)]
                    })
                })
                .collect();
            let _ = write!(out, "\n{l}\n");
            out.push_str(&table(&[self.param.as_str(), "mean", "mc_se", "target", "z"], &rows));
        }
        out
    }
}

impl BiasCurve {
    /// One chart per quantity: mean with a `mean +/- 2 mc_se` band, and the
    /// theoretical target dashed.
    pub fn charts(&self) -> Vec<(String, Chart)> {
        self.labels()
            .into_iter()
            .map(|l| {
                let mut pts = Vec::new();
                let mut band = Vec::new();
                let mut target = Vec::new();
                for p in &self.points {
                    if let Some(s) = p.result.get(&l) {
                        pts.push((p.value, s.mean));
                        band.push((s.mean - 2.0 * s.mc_se, s.mean + 2.0 * s.mc_se));
                        target.push((p.value, s.target));
                    }
                }
                let chart = Chart {
                    title: format!("{l} across {}", self.param.as_str()),
                    x_label: self.param.as_str().to_string(),
                    y_label: format!("mean of {l}"),
                    series: vec![
                        Series {
                            name: "MC mean ± 2 se".into(),
                            points: pts,
                            band: Some(band),
                            stroke: Stroke::Solid,
                        },
                        Series {
                            name: "target".into(),
                            points: target,
                            band: None,
                            stroke: Stroke::Dashed,
                        },
                    ],
                };
                (l, chart)
            })
            .collect()
    }
}

// ------------------------------------------------------------------ ADF

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfEntry {
    pub series: String,
    /// `level` or `difference`.
    pub transform: String,
    pub result: AdfResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfReport {
    pub table: String,
    pub tests: Vec<AdfEntry>,
}

impl Report for AdfReport {
    fn csv(&self) -> Result<String> {
        csv_string(
            &[
                "series", "transform", "spec", "statistic", "lags_used", "n_obs", "cv_1", "cv_5", "cv_10", "reject_1",
                "reject_5", "reject_10",
            ],
            self.tests.iter().map(|e| {
                let r = &e.result;
                vec![
                    e.series.clone(),
                    e.transform.clone(),
                    r.spec.as_str().to_string(),
                    num(r.statistic),
                    r.lags_used.to_string(),
                    r.n_obs.to_string(),
                    num(r.critical_values.pct1),
                    num(r.critical_values.pct5),
                    num(r.critical_values.pct10),
                    r.reject_unit_root.pct1.to_string(),
                    r.reject_unit_root.pct5.to_string(),
                    r.reject_unit_root.pct10.to_string(),
                ]
            }),
        )
    }

    fn text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .tests
            .iter()
            .map(|e| {
                let r = &e.result;
                vec![
                    e.series.clone(),
                    e.transform.clone(),
                    r.spec.as_str().to_string(),
                    format!("{:.3}", r.statistic),
                    r.lags_used.to_string(),
                    format!("{:.3}", r.critical_values.pct5),
                    if r.reject_unit_root.pct5 { "reject" } else { "do not reject" }.to_string(),
                ]
            })
            .collect();
        format!(
            "Augmented Dickey-Fuller tests (H0: unit root; critical values {})\n\n{}",
            self.table,
            table(&["series", "transform", "spec", "statistic", "lags", "5% cv", "at 5%"], &rows)
        )
    }
}

// ------------------------------------------------------------- Johansen

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenReport {
    pub labels: [String; 2],
    pub table: String,
    pub result: JohansenResult,
}

impl Report for JohansenReport {
    fn csv(&self) -> Result<String> {
        let r = &self.result;
        csv_string(
            &["hypothesis", "eigenvalue", "trace", "cv_10", "cv_5", "cv_1", "reject_5", "rank_selected"],
            (0..2).map(|i| {
                vec![
                    if i == 0 { "r=0" } else { "r<=1" }.to_string(),
                    num(r.eigenvalues[i]),
                    num(r.trace_stats[i]),
                    num(r.critical_values[i].pct10),
                    num(r.critical_values[i].pct5),
                    num(r.critical_values[i].pct1),
                    (r.trace_stats[i] > r.critical_values[i].pct5).to_string(),
                    r.rank_selected.to_string(),
                ]
            }),
        )
    }

    fn text(&self) -> String {
        let r = &self.result;
        let rows: Vec<Vec<String>> = (0..2)
            .map(|i| {
                vec![
                    if i == 0 { "r = 0" } else { "r <= 1" }.to_string(),
                    f4(r.eigenvalues[i]),
                    format!("{:.3}", r.trace_stats[i]),
                    format!("{:.2}", r.critical_values[i].pct10),
                    format!("{:.2}", r.critical_values[i].pct5),
                    format!("{:.2}", r.critical_values[i].pct1),
                ]
            })
            .collect();
        format!(
            "Johansen trace test, restricted constant, {} lagged difference(s), T = {} ({}, {})\n\n{}\nSelected rank at 5%: {}\n",
            r.lags_diff,
            r.n_obs,
            self.labels[0],
            self.labels[1],
            table(&["H0", "eigenvalue", "trace", "10% cv", "5% cv", "1% cv"], &rows),
            r.rank_selected
        )
    }
}

// ----------------------------------------------------------------- VECM

fn signed(v: f64, digits: usize) -> (char, String) {
    (if v < 0.0 { '-' } else { '+' }, format!("{:.digits$}", v.abs()))
}

impl VecmModel {
    /// `ECT_{t-1} = y1_{t-1} - b*y2_{t-1} - c` with the fitted numbers.
    pub fn ect_equation(&self) -> String {
        let (s1, b) = signed(self.beta[1], 4);
        let (s2, c) = signed(self.beta[2], 4);
        format!(
            "ECT_{{t-1}} = {l1}_{{t-1}} {s1} {b}·{l2}_{{t-1}} {s2} {c}",
            l1 = self.labels[0],
            l2 = self.labels[1]
        )
    }
}

impl Report for VecmModel {
    fn csv(&self) -> Result<String> {
        let mut rows = Vec::new();
        let labels = &self.labels;
        for (name, v) in [
            (format!("beta_{}", labels[0]), self.beta[0]),
            (format!("beta_{}", labels[1]), self.beta[1]),
            ("beta_const".to_string(), self.beta[2]),
        ] {
            rows.push(vec![name, String::new(), num(v), String::new(), String::new(), String::new()]);
        }
        let se = self.alpha_se();
        for i in 0..2 {
            let (s, t) = match se {
                Some(se) => (num(se[i]), self.alpha[i] / se[i]),
                None => (String::new(), f64::NAN),
            };
            rows.push(vec![
                "alpha".into(),
                labels[i].clone(),
                num(self.alpha[i]),
                s,
                if t.is_nan() { String::new() } else { num(t) },
                if t.is_nan() { String::new() } else { significance_stars(t).to_string() },
            ]);
        }
        for (j, g) in self.gamma.iter().enumerate() {
            for i in 0..2 {
                for m in 0..2 {
                    let se = self.estimation.as_ref().map(|e| e.gamma_se[j][i][m]);
                    let t = se.map(|s| g[i][m] / s);
                    rows.push(vec![
                        format!("gamma{}_{}", j + 1, labels[m]),
                        labels[i].clone(),
                        num(g[i][m]),
                        opt(se),
                        opt(t),
                        t.map(|t| significance_stars(t).to_string()).unwrap_or_default(),
                    ]);
                }
            }
        }
        for i in 0..2 {
            for m in 0..2 {
                rows.push(vec![
                    format!("resid_cov_{}", labels[m]),
                    labels[i].clone(),
                    num(self.resid_cov[i][m]),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
            }
        }
        csv_string(&["parameter", "equation", "value", "se", "t", "stars"], rows)
    }

    fn text(&self) -> String {
        let l = &self.labels;
        let k = self.gamma.len();
        let mut out = String::new();
        let _ = write!(
            out,
            "VECM, cointegration rank 1, {k} lagged difference(s), constant restricted to the cointegration space"
        );
        if let Some(e) = &self.estimation {
            let _ = write!(out, ", T = {}", e.n_obs);
        }
        out.push_str("\n\n");
        let _ = writeln!(out, "{}", self.ect_equation());
        out.push('\n');
        for i in 0..2 {
            let stars = self.alpha_t().map(|t| significance_stars(t[i])).unwrap_or("");
            let mut eq = format!("Δ{}_t = {:.4}{} · [ECT_{{t-1}}]", l[i], self.alpha[i], stars);
            for (j, g) in self.gamma.iter().enumerate() {
                for m in 0..2 {
                    let (s, v) = signed(g[i][m], 4);
                    let lag = if j == 0 { "t-1".to_string() } else { format!("t-{}", j + 1) };
                    let _ = write!(eq, " {s} {v}·Δ{}_{{{lag}}}", l[m]);
                }
            }
            let _ = write!(eq, " + ε{}_t", i + 1);
            let _ = writeln!(out, "{eq}");
            if let Some(se) = self.alpha_se() {
                let _ = writeln!(out, "    alpha se = {:.4}, t = {:.2}", se[i], self.alpha[i] / se[i]);
            }
        }
        let _ = write!(
            out,
            "\nResidual covariance:\n  [{:>10.4} {:>10.4}]\n  [{:>10.4} {:>10.4}]\n",
            self.resid_cov[0][0], self.resid_cov[0][1], self.resid_cov[1][0], self.resid_cov[1][1]
        );
        if let Some(e) = &self.estimation {
            let j = &e.johansen;
            let _ = write!(
                out,
                "\nTrace test: r = 0: {:.3} (5% cv {:.2}); r <= 1: {:.3} (5% cv {:.2}); selected rank {}\n",
                j.trace_stats[0], j.critical_values[0].pct5, j.trace_stats[1], j.critical_values[1].pct5, j.rank_selected
            );
        }
        out.push_str("\nStars: *** |t| > 3.29, ** > 2.58, * > 1.96, n.s. otherwise.\n");
        out
    }
}

// ------------------------------------------------------------------ IRF

impl Report for IrfResult {
    fn csv(&self) -> Result<String> {
        let l = &self.labels;
        let mut header = vec!["horizon".to_string()];
        for imp in 0..2 {
            for resp in 0..2 {
                header.push(format!("{}_to_{}", l[imp], l[resp]));
            }
        }
        let rows = (0..=self.horizon).map(|h| {
            let mut row = vec![h.to_string()];
            for imp in 0..2 {
                for resp in 0..2 {
                    row.push(num(self.responses[imp][resp][h]));
                }
            }
            row
        });
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        csv_string(&header_refs, rows)
    }

    fn text(&self) -> String {
        let l = &self.labels;
        let mut header = vec!["h".to_string()];
        for imp in 0..2 {
            for resp in 0..2 {
                header.push(format!("{} -> {}", l[imp], l[resp]));
            }
        }
        let rows: Vec<Vec<String>> = (0..=self.horizon)
            .map(|h| {
                let mut row = vec![h.to_string()];
                for imp in 0..2 {
                    for resp in 0..2 {
                        row.push(f4(self.responses[imp][resp][h]));
                    }
                }
                row
            })
            .collect();
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        format!(
            "Orthogonalised impulse responses (ordering: {}, {})\n\n{}",
            l[self.ordering[0]],
            l[self.ordering[1]],
            table(&header_refs, &rows)
        )
    }
}

impl IrfResult {
    /// Charts in panel order: (impulse 1, response 1), (1, 2), (2, 1), (2, 2).
    pub fn charts(&self) -> Vec<((usize, usize), Chart)> {
        let l = &self.labels;
        let mut out = Vec::new();
        for imp in 0..2 {
            for resp in 0..2 {
                let pts = self.responses[imp][resp].iter().enumerate().map(|(h, v)| (h as f64, *v)).collect();
                out.push((
                    (imp, resp),
                    Chart {
                        title: format!("Response of {} to a {} shock", l[resp], l[imp]),
                        x_label: "horizon".into(),
                        y_label: l[resp].clone(),
                        series: vec![Series::line(format!("{} → {}", l[imp], l[resp]), pts)],
                    },
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{run_plan, McPlan};
    use crate::proxy::{simulate, DgpConfig};
    use crate::vecm::{irf, VecmModel};

    fn worked_model() -> VecmModel {
        VecmModel::from_parts(
            ["GPR".into(), "Veh".into()],
            [1.0, -0.091, -2.319],
            [-0.378, 0.161],
            vec![[[0.1, 0.05], [0.02, 0.2]]],
            [[1.0, 0.3], [0.3, 2.0]],
        )
        .unwrap()
    }

    #[test]
    fn ect_equation_display() {
        let m = worked_model();
        assert_eq!(m.ect_equation(), "ECT_{t-1} = GPR_{t-1} - 0.0910·Veh_{t-1} - 2.3190");
        let text = m.text();
        assert!(text.contains("ΔGPR_t = -0.3780 · [ECT_{t-1}]"));
    }

    #[test]
    fn mc_json_has_summary_keys() {
        let plan = McPlan::new(DgpConfig::perfect(), 50, 100, 3);
        let r = run_plan(&plan).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.json().unwrap()).unwrap();
        let g = &v["estimators"]["perfect_proxy.gamma1"];
        for k in ["mean", "sd", "mc_se", "target", "z", "n_fail"] {
            assert!(g.get(k).is_some(), "missing {k}");
        }
        assert!(g.get("all_estimates").is_none());
    }

    #[test]
    fn csv_outputs_parse_back() {
        let m = worked_model();
        let r = irf(&m, 5, [0, 1]).unwrap();
        let csv = r.csv().unwrap();
        let mut rd = csv::Reader::from_reader(csv.as_bytes());
        assert_eq!(rd.headers().unwrap().len(), 5);
        assert_eq!(rd.records().count(), 6);
        let vecm_csv = m.csv().unwrap();
        let mut rd = csv::Reader::from_reader(vecm_csv.as_bytes());
        assert_eq!(rd.records().count(), 3 + 2 + 4 + 4);
        assert_eq!(r.charts().len(), 4);
    }

    #[test]
    fn sample_json_lists_columns() {
        let s = simulate(&DgpConfig::perfect(), 12, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.json().unwrap()).unwrap();
        assert_eq!(v["n"], 12);
        assert_eq!(v["y"].as_array().unwrap().len(), 12);
        assert!(s.text().contains("column"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("txt".parse::<Format>().unwrap(), Format::Text);
        assert!("xml".parse::<Format>().is_err());
    }
}
