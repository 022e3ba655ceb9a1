use std::io::{Read, Write};

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_OBS: usize = 30;

/// An equally spaced bivariate series `y_t = [y1_t, y2_t]'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesPair {
    labels: [String; 2],
    dates: Option<Vec<NaiveDate>>,
    obs: Vec<[f64; 2]>,
}

impl TimeSeriesPair {
    pub fn new(labels: [String; 2], obs: Vec<[f64; 2]>) -> Result<Self> {
        if obs.len() < MIN_OBS {
            return Err(Error::TooFewObservations {
                required: MIN_OBS,
                got: obs.len(),
            });
        }
        if let Some(index) = obs.iter().position(|r| !(r[0].is_finite() && r[1].is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            labels,
            dates: None,
            obs,
        })
    }

    pub fn with_dates(labels: [String; 2], dates: Vec<NaiveDate>, obs: Vec<[f64; 2]>) -> Result<Self> {
        if dates.len() != obs.len() {
            return Err(Error::LengthMismatch {
                left: dates.len(),
                right: obs.len(),
            });
        }
        let mut s = Self::new(labels, obs)?;
        s.dates = Some(dates);
        Ok(s)
    }

    pub fn from_columns(labels: [&str; 2], y1: &[f64], y2: &[f64]) -> Result<Self> {
        if y1.len() != y2.len() {
            return Err(Error::LengthMismatch {
                left: y1.len(),
                right: y2.len(),
            });
        }
        let obs = y1.iter().zip(y2).map(|(a, b)| [*a, *b]).collect();
        Self::new([labels[0].to_string(), labels[1].to_string()], obs)
    }

    pub fn n(&self) -> usize {
        self.obs.len()
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.labels
    }

    pub fn obs(&self) -> &[[f64; 2]] {
        &self.obs
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.obs.iter().map(|r| r[i]).collect()
    }

    /// Index of a column by label, or by `0`/`1`.
    pub fn column_index(&self, key: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l == key)
            .or_else(|| key.parse::<usize>().ok().filter(|i| *i < 2))
    }

    /// Reads `date,<label1>,<label2>` CSV. Dates are ISO-8601 (`YYYY-MM-DD`)
    /// and must be strictly increasing with a constant step: a fixed number
    /// of days, or a fixed number of months for monthly data (same day of
    /// month, or month ends). Missing or non-numeric cells and gaps are
    /// errors carrying the file line number.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header.len() != 3 {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected a date column and two numeric columns, got {} columns",
                    header.len()
                ),
            });
        }
        let mut dates = Vec::new();
        let mut obs = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            if rec.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 fields, got {}", rec.len()),
                });
            }
            let date = NaiveDate::parse_from_str(rec[0].trim(), "%Y-%m-%d").map_err(|_| Error::Parse {
                line,
                message: format!("`{}` is not an ISO-8601 date", &rec[0]),
            })?;
            let mut vals = [0.0; 2];
            for j in 0..2 {
                let cell = rec[j + 1].trim();
                if cell.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: format!("missing value in column `{}`", header[j + 1]),
                    });
                }
                vals[j] = match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => v,
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: format!("column `{}`: `{cell}` is not a finite number", header[j + 1]),
                        })
                    }
                };
            }
            if let Some(prev) = dates.last() {
                if date <= *prev {
                    return Err(Error::Parse {
                        line,
                        message: format!("date {date} does not increase on {prev}"),
                    });
                }
            }
            dates.push(date);
            obs.push(vals);
        }
        check_spacing(&dates)?;
        Self::with_dates([header[1].clone(), header[2].clone()], dates, obs)
    }

    /// Writes `date,<label1>,<label2>`. Series without dates get consecutive
    /// days starting 2000-01-01.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", &self.labels[0], &self.labels[1]])?;
        let origin = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        for (i, row) in self.obs.iter().enumerate() {
            let d = match &self.dates {
                Some(d) => d[i],
                None => origin + Duration::days(i as i64),
            };
            w.write_record([d.format("%Y-%m-%d").to_string(), row[0].to_string(), row[1].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Step {
    Days(i64),
    Months(i32),
}

fn month_index(d: NaiveDate) -> i32 {
    d.year() * 12 + d.month0() as i32
}

fn is_month_end(d: NaiveDate) -> bool {
    d.succ_opt().map(|n| n.month() != d.month()).unwrap_or(true)
}

fn step_between(a: NaiveDate, b: NaiveDate) -> Step {
    let months = month_index(b) - month_index(a);
    if months > 0 && (a.day() == b.day() || (is_month_end(a) && is_month_end(b))) {
        Step::Months(months)
    } else {
        Step::Days((b - a).num_days())
    }
}

fn check_spacing(dates: &[NaiveDate]) -> Result<()> {
    if dates.len() < 2 {
        return Ok(());
    }
    let step = step_between(dates[0], dates[1]);
    for (i, w) in dates.windows(2).enumerate().skip(1) {
        if step_between(w[0], w[1]) != step {
            return Err(Error::Parse {
                line: i + 3,
                message: format!("gap or irregular spacing between {} and {}", w[0], w[1]),
            });
        }
    }
    Ok(())
}
