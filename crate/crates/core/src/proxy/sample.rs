use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{DgpConfig, ProxyMode, ShockDist};
use crate::error::{Error, Result};
use crate::stats::Column;

/// Unobserved columns, available only for simulated data.
#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    pub c: Column,
    pub u: Column,
    /// Projection residual, present in imperfect-proxy mode.
    pub v: Option<Column>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub y: Column,
    pub x: Column,
    pub p: Column,
    pub latent: Option<Latent>,
    pub seed: Option<u64>,
}

impl Sample {
    /// Observational sample: only `(y, x, p)` are known.
    pub fn observed(y: Column, x: Column, p: Column) -> Result<Self> {
        if x.len() != y.len() || p.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: if x.len() != y.len() { x.len() } else { p.len() },
            });
        }
        Ok(Self {
            y,
            x,
            p,
            latent: None,
            seed: None,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn is_simulated(&self) -> bool {
        self.latent.is_some()
    }

    /// First or second half of the sample (`half` 0 or 1), used by the
    /// stability criterion.
    pub fn half(&self, half: usize) -> Sample {
        let mid = self.n() / 2;
        let range = if half == 0 { 0..mid } else { mid..self.n() };
        let cut = |c: &Column| Column::from_finite(c[range.clone()].to_vec());
        Sample {
            y: cut(&self.y),
            x: cut(&self.x),
            p: cut(&self.p),
            latent: self.latent.as_ref().map(|l| Latent {
                c: cut(&l.c),
                u: cut(&l.u),
                v: l.v.as_ref().map(cut),
            }),
            seed: self.seed,
        }
    }

    pub fn column_names(&self) -> Vec<&'static str> {
        let mut names = vec!["y", "x", "p"];
        if let Some(l) = &self.latent {
            names.extend(["c", "u"]);
            if l.v.is_some() {
                names.push("v");
            }
        }
        names
    }

    pub(crate) fn columns(&self) -> Vec<&Column> {
        let mut cols = vec![&self.y, &self.x, &self.p];
        if let Some(l) = &self.latent {
            cols.push(&l.c);
            cols.push(&l.u);
            if let Some(v) = &l.v {
                cols.push(v);
            }
        }
        cols
    }

    /// Writes the sample as CSV with header `y,x,p[,c,u[,v]]`. Values use the
    /// shortest decimal form that parses back to the same double.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.column_names())?;
        let cols = self.columns();
        for i in 0..self.n() {
            w.write_record(cols.iter().map(|c| c[i].to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a sample CSV. Latent columns are picked up when both `c` and
    /// `u` are present.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let find = |name: &str| header.iter().position(|h| h == name);
        let (iy, ix, ip) = match (find("y"), find("x"), find("p")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: "header must name columns y, x and p".into(),
                })
            }
        };
        let (ic, iu, iv) = (find("c"), find("u"), find("v"));
        let mut data: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            if rec.len() != header.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, got {}", header.len(), rec.len()),
                });
            }
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("column `{}`: `{field}` is not a number", header[j]),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("column `{}` is not finite", header[j]),
                    });
                }
                data[j].push(v);
            }
        }
        let take = |j: usize| Column::new(data[j].clone());
        let mut sample = Sample::observed(take(iy)?, take(ix)?, take(ip)?)?;
        if let (Some(ic), Some(iu)) = (ic, iu) {
            sample.latent = Some(Latent {
                c: take(ic)?,
                u: take(iu)?,
                v: iv.map(take).transpose()?,
            });
        }
        Ok(sample)
    }
}

fn standard_draw(rng: &mut ChaCha8Rng, dist: ShockDist) -> f64 {
    match dist {
        ShockDist::Gaussian => rng.sample(StandardNormal),
        ShockDist::Uniform => {
            let s = 3f64.sqrt();
            rng.random_range(-s..s)
        }
    }
}

/// Draws `n` observations from the configured data-generating process.
///
/// Per observation, three standardised draws `(z1, z2, z3)` are taken in
/// that order, plus a fourth `z4` in imperfect-proxy mode:
///
/// * perfect: `x = sx z1`, `c = sc (rho z1 + sqrt(1 - rho^2) z2)`,
///   `p = lambda c`, `u = su z3`;
/// * imperfect: `x = sx z1`, `p = sp (rho z1 + sqrt(1 - rho^2) z2)`,
///   `u = su z3`, `v = sv z4`, `c = d0 + dX x + dP p + v`.
///
/// In both cases `y = a0 + a1 x + a2 c + u`.
pub fn simulate(config: &DgpConfig, n: usize, seed: u64) -> Result<Sample> {
    config.validate()?;
    if n < 10 {
        return Err(Error::TooFewObservations { required: 10, got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = config.shocks;
    let mut cols: [Vec<f64>; 6] = std::array::from_fn(|_| Vec::with_capacity(n));
    let imperfect = config.mode == ProxyMode::ImperfectProxy;
    for _ in 0..n {
        let z1 = standard_draw(&mut rng, dist);
        let z2 = standard_draw(&mut rng, dist);
        let z3 = standard_draw(&mut rng, dist);
        let x = config.sigma_x * z1;
        let u = config.sigma_u * z3;
        let (c, p, v) = if imperfect {
            let z4 = standard_draw(&mut rng, dist);
            let r = config.rho_xp;
            let p = config.sigma_p * (r * z1 + (1.0 - r * r).sqrt() * z2);
            let v = config.sigma_v * z4;
            (config.delta0 + config.delta_x * x + config.delta_p * p + v, p, v)
        } else {
            let r = config.rho_xc;
            let c = config.sigma_c * (r * z1 + (1.0 - r * r).sqrt() * z2);
            (c, config.lambda * c, 0.0)
        };
        let y = config.alpha0 + config.alpha1 * x + config.alpha2 * c + u;
        for (col, val) in cols.iter_mut().zip([y, x, p, c, u, v]) {
            col.push(val);
        }
    }
    let [y, x, p, c, u, v] = cols.map(|c| Column::new(c));
    Ok(Sample {
        y: y?,
        x: x?,
        p: p?,
        latent: Some(Latent {
            c: c?,
            u: u?,
            v: if imperfect { Some(v?) } else { None },
        }),
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::sample_cov;

    #[test]
    fn zero_noise_reconstructs_y() {
        let cfg = DgpConfig { sigma_u: 0.0, alpha0: 0.5, alpha1: -1.0, alpha2: 2.0, ..DgpConfig::perfect() };
        let s = simulate(&cfg, 100, 3).unwrap();
        let l = s.latent.as_ref().unwrap();
        for i in 0..s.n() {
            assert_eq!(s.y[i], 0.5 - s.x[i] + 2.0 * l.c[i]);
            assert_eq!(l.u[i], 0.0);
        }
    }

    #[test]
    fn perfect_proxy_is_proportional() {
        let cfg = DgpConfig { lambda: 2.0, ..DgpConfig::perfect() };
        let s = simulate(&cfg, 200, 1).unwrap();
        let l = s.latent.as_ref().unwrap();
        assert!(s.p.iter().zip(l.c.iter()).all(|(p, c)| *p == 2.0 * c));
        assert!(l.v.is_none());
    }

    #[test]
    fn structural_equation_holds_entrywise() {
        for cfg in [DgpConfig::perfect(), DgpConfig { delta_x: 0.4, ..DgpConfig::imperfect() }] {
            let s = simulate(&cfg, 500, 9).unwrap();
            let l = s.latent.as_ref().unwrap();
            for i in 0..s.n() {
                let y = cfg.alpha0 + cfg.alpha1 * s.x[i] + cfg.alpha2 * l.c[i] + l.u[i];
                assert!((s.y[i] - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn generator_correlation() {
        let cfg = DgpConfig { rho_xc: 0.5, ..DgpConfig::perfect() };
        for shocks in [ShockDist::Gaussian, ShockDist::Uniform] {
            let s = simulate(&DgpConfig { shocks, ..cfg }, 1000, 42).unwrap();
            let c = &s.latent.as_ref().unwrap().c;
            let r = sample_cov(&s.x, c).unwrap()
                / (sample_cov(&s.x, &s.x).unwrap() * sample_cov(c, c).unwrap()).sqrt();
            assert!((r - 0.5).abs() < 0.1, "{shocks:?}: {r}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = DgpConfig::imperfect();
        assert_eq!(simulate(&cfg, 50, 8).unwrap(), simulate(&cfg, 50, 8).unwrap());
        assert_ne!(simulate(&cfg, 50, 8).unwrap(), simulate(&cfg, 50, 9).unwrap());
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(matches!(simulate(&DgpConfig::perfect(), 9, 0), Err(Error::TooFewObservations { .. })));
        let bad = DgpConfig { lambda: 0.0, ..DgpConfig::perfect() };
        assert!(matches!(simulate(&bad, 100, 0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        for cfg in [DgpConfig::perfect(), DgpConfig::imperfect()] {
            let s = simulate(&cfg, 64, 77).unwrap();
            let mut buf = Vec::new();
            s.write_csv(&mut buf).unwrap();
            let back = Sample::read_csv(buf.as_slice()).unwrap();
            assert_eq!(back.y, s.y);
            assert_eq!(back.latent, s.latent);
        }
    }

    #[test]
    fn csv_reports_bad_rows() {
        let text = "y,x,p\n1,2,3\n1,oops,3\n";
        match Sample::read_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(Sample::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        let obs = Sample::read_csv("y,x,p\n1,2,3\n4,5,6\n".as_bytes()).unwrap();
        assert!(!obs.is_simulated());
    }
}
