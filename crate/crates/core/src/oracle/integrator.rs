//! Explicit Runge–Kutta integrators for small real ODE systems.
//!
//! [`dopri5`] is the Dormand–Prince 5(4) pair with step-size control and the
//! fourth-order continuous extension, so output can be placed on an arbitrary
//! grid without forcing the step sequence. [`rk4`] is the classical fixed-step
//! scheme and exists as an independent cross-check.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order solution minus embedded fourth-order solution
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on |h|; `None` means the span of the output grid.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: None,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Solution sampled on the requested grid, plus the state at the end of every
/// accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct Integration<const N: usize> {
    pub values: Vec<[f64; N]>,
    pub step_times: Vec<f64>,
    pub step_values: Vec<[f64; N]>,
    pub stats: StepStats,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn rms_norm<const N: usize>(v: &[f64; N], scale: &[f64; N]) -> f64 {
    (v.iter()
        .zip(scale)
        .map(|(x, s)| (x / s) * (x / s))
        .sum::<f64>()
        / N as f64)
        .sqrt()
}

/// Starting step from the local derivative scale.
fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    o: &AdaptiveOptions,
    h_max: f64,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let scale: [f64; N] = std::array::from_fn(|i| o.abs_tol + o.rel_tol * y[i].abs());
    let d0 = rms_norm(y, &scale);
    let d1 = rms_norm(f0, &scale);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(h_max);
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let f1 = f(t + h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = rms_norm(&diff, &scale) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(h_max)
}

/// Integrates y′ = f(t, y) from `grid[0]` with y(`grid[0]`) = `y0` and
/// returns y on every grid point.
pub fn dopri5<const N: usize, F>(
    mut f: F,
    y0: [f64; N],
    grid: &[f64],
    o: AdaptiveOptions,
) -> Result<Integration<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    check_grid(grid)?;
    if !(o.rel_tol > 0.0 && o.abs_tol > 0.0 && o.rel_tol <= 1e-3 && o.abs_tol <= 1e-3) {
        return Err(Error::Config(format!(
            "integrator tolerances must lie in (0, 1e-3], got rel_tol = {}, abs_tol = {}",
            o.rel_tol, o.abs_tol
        )));
    }
    let t_end = grid[grid.len() - 1];
    let span = t_end - grid[0];
    let h_max = o.max_step.unwrap_or(span).min(span).max(f64::MIN_POSITIVE);

    let mut out = Integration {
        values: Vec::with_capacity(grid.len()),
        step_times: vec![grid[0]],
        step_values: vec![y0],
        stats: StepStats::default(),
    };
    out.values.push(y0);
    if grid.len() == 1 {
        return Ok(out);
    }

    let mut t = grid[0];
    let mut y = y0;
    let mut k1 = f(t, &y);
    out.stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k1, &o, h_max);
    out.stats.evaluations += 1;
    let mut next = 1;
    let mut last_rejected = false;

    while next < grid.len() {
        if out.stats.accepted + out.stats.rejected >= o.max_steps {
            return Err(Error::TooManySteps {
                t,
                steps: o.max_steps,
            });
        }
        let finishing = t + 1.01 * h >= t_end;
        if finishing {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(span.abs()) {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y1 = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t1 = if finishing { t_end } else { t + h };
        let k7 = f(t1, &y1);
        out.stats.evaluations += 6;

        let err_vec: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let scale: [f64; N] =
            std::array::from_fn(|i| o.abs_tol + o.rel_tol * y[i].abs().max(y1[i].abs()));
        let err = rms_norm(&err_vec, &scale);
        if !err.is_finite() {
            out.stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        let fac = if err == 0.0 {
            FAC_MAX
        } else {
            (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
        };
        if err <= 1.0 {
            // dense output on (t, t1]
            let cont = continuous_extension(&y, &y1, &k1, &k3, &k4, &k5, &k6, &k7, h);
            while next < grid.len() && grid[next] <= t1 {
                let value = if grid[next] == t1 {
                    y1
                } else {
                    interpolate(&cont, (grid[next] - t) / h)
                };
                out.values.push(value);
                next += 1;
            }
            out.stats.accepted += 1;
            t = t1;
            y = y1;
            k1 = k7;
            out.step_times.push(t);
            out.step_values.push(y);
            let fac = if last_rejected { fac.min(1.0) } else { fac };
            h = (h * fac).min(h_max);
            last_rejected = false;
        } else {
            out.stats.rejected += 1;
            h *= fac.min(1.0);
            last_rejected = true;
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn continuous_extension<const N: usize>(
    y0: &[f64; N],
    y1: &[f64; N],
    k1: &[f64; N],
    k3: &[f64; N],
    k4: &[f64; N],
    k5: &[f64; N],
    k6: &[f64; N],
    k7: &[f64; N],
    h: f64,
) -> [[f64; N]; 5] {
    let mut c = [[0.0; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y0[i];
        let bspl = h * k1[i] - ydiff;
        c[0][i] = y0[i];
        c[1][i] = ydiff;
        c[2][i] = bspl;
        c[3][i] = ydiff - h * k7[i] - bspl;
        c[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    c
}

fn interpolate<const N: usize>(c: &[[f64; N]; 5], theta: f64) -> [f64; N] {
    let theta1 = 1.0 - theta;
    std::array::from_fn(|i| {
        c[0][i] + theta * (c[1][i] + theta1 * (c[2][i] + theta * (c[3][i] + theta1 * c[4][i])))
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    crate::dressed::validate_grid(grid)
}

/// Classical RK4 with `substeps` equal steps per grid interval.
pub fn rk4<const N: usize, F>(
    mut f: F,
    y0: [f64; N],
    grid: &[f64],
    substeps: usize,
) -> Result<Integration<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    check_grid(grid)?;
    if substeps == 0 {
        return Err(Error::Config(
            "rk4 needs at least one substep per interval".into(),
        ));
    }
    let mut out = Integration {
        values: vec![y0],
        step_times: vec![grid[0]],
        step_values: vec![y0],
        stats: StepStats::default(),
    };
    let mut y = y0;
    for w in grid.windows(2) {
        let h = (w[1] - w[0]) / substeps as f64;
        for s in 0..substeps {
            let t = w[0] + s as f64 * h;
            let k1 = f(t, &y);
            let k2 = f(t + 0.5 * h, &axpy(&y, h, &[(0.5, &k1)]));
            let k3 = f(t + 0.5 * h, &axpy(&y, h, &[(0.5, &k2)]));
            let k4 = f(t + h, &axpy(&y, h, &[(1.0, &k3)]));
            y = axpy(
                &y,
                h,
                &[
                    (1.0 / 6.0, &k1),
                    (1.0 / 3.0, &k2),
                    (1.0 / 3.0, &k3),
                    (1.0 / 6.0, &k4),
                ],
            );
            out.stats.accepted += 1;
            out.stats.evaluations += 4;
            out.step_times
                .push(if s + 1 == substeps { w[1] } else { t + h });
            out.step_values.push(y);
        }
        out.values.push(y);
    }
    Ok(out)
}
