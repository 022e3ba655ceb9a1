//! Embedded critical values.
//!
//! ADF: MacKinnon, J.G. (2010), "Critical Values for Cointegration Tests",
//! Queen's Economics Department Working Paper 1227, Table 2, N = 1. The
//! response surface `b0 + b1/T + b2/T^2 + b3/T^3` is evaluated at the
//! number of observations used in the test regression.
//!
//! Johansen trace test, constant restricted to the cointegration space:
//! Osterwald-Lenum, M. (1992), "A Note with Quantiles of the Asymptotic
//! Distribution of the Maximum Likelihood Cointegration Rank Test
//! Statistics", Oxford Bulletin of Economics and Statistics 54(3),
//! Table 1*, rows `p - r = 1, 2`.

use serde::{Deserialize, Serialize};

use super::adf::AdfSpec;

pub const ADF_TABLE: &str = "mackinnon-2010-table2-n1";
pub const JOHANSEN_TABLE: &str = "osterwald-lenum-1992-table1star";

/// A value at the 1%, 5% and 10% levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Levels<T> {
    pub pct1: T,
    pub pct5: T,
    pub pct10: T,
}

impl<T: Copy> Levels<T> {
    pub fn map<U>(self, f: impl Fn(T) -> U) -> Levels<U> {
        Levels {
            pct1: f(self.pct1),
            pct5: f(self.pct5),
            pct10: f(self.pct10),
        }
    }
}

const ADF_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

const ADF_CONSTANT_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

fn surface(b: &[f64; 4], t: f64) -> f64 {
    b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t)
}

pub fn adf_critical_values(spec: AdfSpec, nobs: usize) -> Levels<f64> {
    let table = match spec {
        AdfSpec::Constant => &ADF_CONSTANT,
        AdfSpec::ConstantTrend => &ADF_CONSTANT_TREND,
    };
    let t = nobs as f64;
    Levels {
        pct1: surface(&table[0], t),
        pct5: surface(&table[1], t),
        pct10: surface(&table[2], t),
    }
}

/// Trace-test quantiles (restricted constant) for `p - r` = 1 or 2.
pub fn johansen_trace_critical_values(p_minus_r: usize) -> Levels<f64> {
    match p_minus_r {
        1 => Levels {
            pct1: 12.97,
            pct5: 9.24,
            pct10: 7.52,
        },
        2 => Levels {
            pct1: 24.60,
            pct5: 19.96,
            pct10: 17.85,
        },
        _ => panic!("trace critical values are tabulated for bivariate systems only"),
    }
}
