//! Natural cubic splines with analytic derivatives, used for sampled fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw samples as they appear in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Natural cubic spline through `(times[i], values[i])`.
///
/// Outside the sample range the first/last cubic piece is extended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Samples", into = "Samples")]
pub struct CubicSpline {
    times: Vec<f64>,
    values: Vec<f64>,
    // second derivatives at the knots
    curvature: Vec<f64>,
}

impl TryFrom<Samples> for CubicSpline {
    type Error = Error;

    fn try_from(s: Samples) -> Result<Self> {
        CubicSpline::new(s.times, s.values)
    }
}

impl From<CubicSpline> for Samples {
    fn from(s: CubicSpline) -> Self {
        Samples {
            times: s.times,
            values: s.values,
        }
    }
}

impl CubicSpline {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = times.len();
        if n < 3 {
            return Err(Error::InvalidPulse(format!(
                "sampled series needs at least 3 points, got {n}"
            )));
        }
        if values.len() != n {
            return Err(Error::InvalidPulse(format!(
                "sampled series has {n} times but {} values",
                values.len()
            )));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPulse(
                "sampled series contains non-finite values".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPulse(
                "sample times must be strictly increasing".into(),
            ));
        }

        // Thomas algorithm for the interior second derivatives, M_0 = M_{n-1} = 0.
        let mut curvature = vec![0.0; n];
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for i in 1..n - 1 {
            let h0 = times[i] - times[i - 1];
            let h1 = times[i + 1] - times[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] =
                6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
        }
        for k in 1..m {
            let lower = times[k + 1] - times[k];
            let w = lower / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        for k in (0..m).rev() {
            let next = if k + 1 < m { curvature[k + 2] } else { 0.0 };
            curvature[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
        }

        Ok(Self {
            times,
            values,
            curvature,
        })
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value and first three derivatives at `t`.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let n = self.times.len();
        let i = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        let h = t1 - t0;
        let a = t1 - t;
        let b = t - t0;

        let value = m0 * a.powi(3) / (6.0 * h)
            + m1 * b.powi(3) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b;
        let d1 = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - (y0 / h - m0 * h / 6.0)
            + (y1 / h - m1 * h / 6.0);
        let d2 = m0 * a / h + m1 * b / h;
        let d3 = (m1 - m0) / h;
        [value, d1, d2, d3]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_knots() {
        let times: Vec<f64> = (0..8).map(|i| i as f64 * 0.5).collect();
        let values: Vec<f64> = times.iter().map(|t| (t * 0.7).sin()).collect();
        let s = CubicSpline::new(times.clone(), values.clone()).unwrap();
        for (t, v) in times.iter().zip(&values) {
            assert!((s.eval(*t)[0] - v).abs() < 1e-14);
        }
    }

    #[test]
    fn reproduces_linear_data_exactly() {
        let times = vec![0.0, 1.0, 2.5, 4.0];
        let values: Vec<f64> = times.iter().map(|t| 3.0 * t - 1.0).collect();
        let s = CubicSpline::new(times, values).unwrap();
        let [v, d1, d2, d3] = s.eval(1.7);
        assert!((v - 4.1).abs() < 1e-13);
        assert!((d1 - 3.0).abs() < 1e-13);
        assert!(d2.abs() < 1e-13 && d3.abs() < 1e-13);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|t| (-(t - 2.0) * (t - 2.0)).exp())
            .collect();
        let s = CubicSpline::new(times, values).unwrap();
        let h = 1e-6;
        for t in [0.33, 1.27, 2.0, 3.41] {
            let fd = (s.eval(t + h)[0] - s.eval(t - h)[0]) / (2.0 * h);
            assert!((fd - s.eval(t)[1]).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CubicSpline::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0]).is_err());
    }
}
