//! Numerical ground truth: direct integration of the RWA equations of motion
//!
//! ```text
//! ∂ₜa₁ = (i/2) Ω e^{−iΔΦ} a₂
//! ∂ₜa₂ = −(γ/2) a₂ + (i/2) Ω e^{iΔΦ} a₁
//! ```
//!
//! and diagnostics that measure how far the closed-form solution is from it.

pub mod integrator;
mod residual;

pub use residual::{neglected_term_ratio, normal_form_amplitude, residual_normal_form};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::{AmplitudeSolution, SystemParams};
use crate::error::{Error, Result};
use crate::field::PulseSpec;
use integrator::{dopri5, rk4, AdaptiveOptions, Integration, StepStats};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum Method {
    /// Adaptive Dormand–Prince 5(4) with dense output.
    Dopri5,
    /// Classical RK4 with a fixed number of steps per grid interval.
    Rk4 { substeps: usize },
}

impl Default for Method {
    fn default() -> Self {
        Method::Dopri5
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub method: Method,
    /// Largest adaptive step; `None` uses the widest grid interval.
    pub max_step: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            method: Method::Dopri5,
            max_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrajectory {
    pub grid: Vec<f64>,
    pub amplitudes: Vec<[C64; 2]>,
    /// |a₁|² + |a₂|² on the grid.
    pub norm: Vec<f64>,
    /// Times and norms at the end of every accepted step.
    pub step_times: Vec<f64>,
    pub step_norms: Vec<f64>,
    pub stats: StepStats,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub method: Method,
}

fn pack(a: [C64; 2]) -> [f64; 4] {
    [a[0].re, a[0].im, a[1].re, a[1].im]
}

fn unpack(y: &[f64; 4]) -> [C64; 2] {
    [C64::new(y[0], y[1]), C64::new(y[2], y[3])]
}

fn norm_of(y: &[f64; 4]) -> f64 {
    y.iter().map(|v| v * v).sum()
}

/// Right-hand side with exact field evaluations at `t`.
pub fn rwa_rhs(pulse: &PulseSpec, sys: &SystemParams, t: f64, a: [C64; 2]) -> [C64; 2] {
    let omega = pulse.envelope_derivatives(t)[0];
    let mismatch = pulse.detuning * t - pulse.phase_derivatives(t)[0];
    let half = C64::new(0.0, 0.5 * omega);
    let rotor = C64::from_polar(1.0, mismatch);
    [
        half * rotor.conj() * a[1],
        -0.5 * sys.damping() * a[1] + half * rotor * a[0],
    ]
}

/// Integrates the RWA equations from `grid[0]` with amplitudes `init`.
pub fn integrate_rwa(
    pulse: &PulseSpec,
    sys: &SystemParams,
    init: [C64; 2],
    grid: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<OracleTrajectory> {
    integrate_rwa_with(
        pulse,
        sys,
        init,
        grid,
        OracleOptions {
            rel_tol,
            abs_tol,
            ..OracleOptions::default()
        },
    )
}

pub fn integrate_rwa_with(
    pulse: &PulseSpec,
    sys: &SystemParams,
    init: [C64; 2],
    grid: &[f64],
    options: OracleOptions,
) -> Result<OracleTrajectory> {
    pulse.validate()?;
    sys.validate()?;
    let rhs = |t: f64, y: &[f64; 4]| pack(rwa_rhs(pulse, sys, t, unpack(y)));
    let y0 = pack(init);
    let run: Integration<4> = match options.method {
        Method::Dopri5 => {
            let widest = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            let max_step = options.max_step.or((widest > 0.0).then_some(widest));
            dopri5(
                rhs,
                y0,
                grid,
                AdaptiveOptions {
                    rel_tol: options.rel_tol,
                    abs_tol: options.abs_tol,
                    max_step,
                    ..AdaptiveOptions::default()
                },
            )?
        }
        Method::Rk4 { substeps } => rk4(rhs, y0, grid, substeps)?,
    };
    Ok(OracleTrajectory {
        grid: grid.to_vec(),
        amplitudes: run.values.iter().map(unpack).collect(),
        norm: run.values.iter().map(norm_of).collect(),
        step_times: run.step_times,
        step_norms: run.step_values.iter().map(norm_of).collect(),
        stats: run.stats,
        rel_tol: options.rel_tol,
        abs_tol: options.abs_tol,
        method: options.method,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// max over t of |aⱼ(analytic) − aⱼ(oracle)| for j = 1, 2.
    pub max_error: [f64; 2],
    pub rms_error: [f64; 2],
    /// max over t and j of ||aⱼ(analytic)|² − |aⱼ(oracle)|²|.
    pub max_population_error: f64,
    /// |arg(a₁(analytic)/a₁(oracle))| at the last grid point; `None` when
    /// either amplitude vanishes there.
    pub final_phase_error: Option<f64>,
    pub margin: Option<f64>,
}

/// Element-wise error statistics of two trajectories on the same grid.
pub fn compare(
    analytic: &AmplitudeSolution,
    oracle: &OracleTrajectory,
    margin: Option<f64>,
) -> Result<ComparisonReport> {
    compare_series(
        &analytic.grid,
        &analytic.amplitudes,
        &oracle.grid,
        &oracle.amplitudes,
        margin,
    )
}

pub fn compare_series(
    grid_a: &[f64],
    a: &[[C64; 2]],
    grid_b: &[f64],
    b: &[[C64; 2]],
    margin: Option<f64>,
) -> Result<ComparisonReport> {
    if grid_a.len() != grid_b.len() || a.len() != grid_a.len() || b.len() != grid_b.len() {
        return Err(Error::GridMismatch(format!(
            "{} analytic points vs {} oracle points",
            grid_a.len(),
            grid_b.len()
        )));
    }
    if let Some(i) = grid_a
        .iter()
        .zip(grid_b)
        .position(|(x, y)| (x - y).abs() > 1e-12 * x.abs().max(y.abs()).max(1.0))
    {
        return Err(Error::GridMismatch(format!(
            "grids differ at index {i}: {} vs {}",
            grid_a[i], grid_b[i]
        )));
    }
    let n = a.len().max(1) as f64;
    let mut max_error = [0.0_f64; 2];
    let mut sum_sq = [0.0_f64; 2];
    let mut max_population_error = 0.0_f64;
    for (x, y) in a.iter().zip(b) {
        for j in 0..2 {
            let e = (x[j] - y[j]).norm();
            max_error[j] = max_error[j].max(e);
            sum_sq[j] += e * e;
            max_population_error =
                max_population_error.max((x[j].norm_sqr() - y[j].norm_sqr()).abs());
        }
    }
    let final_phase_error = match (a.last(), b.last()) {
        (Some(x), Some(y)) if x[0].norm() > 0.0 && y[0].norm() > 0.0 => {
            Some((x[0] / y[0]).arg().abs())
        }
        _ => None,
    };
    Ok(ComparisonReport {
        max_error,
        rms_error: sum_sq.map(|s| (s / n).sqrt()),
        max_population_error,
        final_phase_error,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dressed::{analytic_trajectory, AnalyticOptions};
    use crate::field::Phase;
    use nalgebra::Matrix2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn zero_field_leaves_ground_state_alone() {
        let pulse = PulseSpec::constant(0.0, 1.0).unwrap();
        let r = integrate_rwa(
            &pulse,
            &SystemParams::undamped(2.0),
            [c(1.0, 0.0), c(0.0, 0.0)],
            &grid(0.0, 10.0, 11),
            1e-10,
            1e-12,
        )
        .unwrap();
        for a in &r.amplitudes {
            assert_eq!(a[0], c(1.0, 0.0));
            assert_eq!(a[1], c(0.0, 0.0));
        }
    }

    #[test]
    fn zero_field_decay() {
        let pulse = PulseSpec::constant(0.0, 1.0).unwrap();
        let sys = SystemParams::new(0.0, 2.0, 0.5, 0.0).unwrap();
        let g = grid(0.0, 10.0, 21);
        let r = integrate_rwa(&pulse, &sys, [c(0.0, 0.0), c(1.0, 0.0)], &g, 1e-10, 1e-12).unwrap();
        for (t, a) in g.iter().zip(&r.amplitudes) {
            assert!((a[1].norm_sqr() - (-0.5 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn resonant_pi_pulse() {
        let omega = 1.3;
        let t_pi = std::f64::consts::PI / omega;
        let pulse = PulseSpec::constant(omega, 0.0).unwrap();
        let r = integrate_rwa(
            &pulse,
            &SystemParams::undamped(5.0),
            [c(1.0, 0.0), c(0.0, 0.0)],
            &[0.0, t_pi],
            1e-10,
            1e-12,
        )
        .unwrap();
        assert!((r.amplitudes[1][1].norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rk4_and_dopri5_agree() {
        let pulse = PulseSpec::gaussian(0.5, 0.0, 5.0, 0.3)
            .unwrap()
            .with_phase(Phase::LinearChirp {
                rate: 0.05,
                center: 0.0,
            })
            .unwrap();
        let sys = SystemParams::new(0.0, 5.0, 0.05, 0.02).unwrap();
        let g = grid(-15.0, 15.0, 301);
        let init = [c(1.0, 0.0), c(0.0, 0.0)];
        let a = integrate_rwa(&pulse, &sys, init, &g, 1e-10, 1e-12).unwrap();
        let b = integrate_rwa_with(
            &pulse,
            &sys,
            init,
            &g,
            OracleOptions {
                method: Method::Rk4 { substeps: 20 },
                ..Default::default()
            },
        )
        .unwrap();
        let report = compare_series(&g, &a.amplitudes, &g, &b.amplitudes, None).unwrap();
        assert!(
            report.max_error[0].max(report.max_error[1]) < 1e-8,
            "{report:?}"
        );
    }

    /// exp(Mt) of the static problem in the frame b₂ = a₂e^{−iΔωt}.
    fn static_propagator(omega: f64, detuning: f64, gamma: C64, t: f64) -> Matrix2<C64> {
        let m = Matrix2::new(
            c(0.0, 0.0),
            c(0.0, 0.5 * omega),
            c(0.0, 0.5 * omega),
            c(0.0, -detuning) - 0.5 * gamma,
        );
        (m * c(t, 0.0)).exp()
    }

    #[test]
    fn static_problem_matches_matrix_exponential() {
        for (omega, detuning, decay) in [(1.0, 0.0, 0.0), (1.0, 3.0, 0.0), (0.7, -1.2, 0.1)] {
            let pulse = PulseSpec::constant(omega, detuning).unwrap();
            let sys = SystemParams::new(0.0, 5.0, decay, 0.0).unwrap();
            let g = grid(0.0, 20.0, 41);
            let r =
                integrate_rwa(&pulse, &sys, [c(1.0, 0.0), c(0.0, 0.0)], &g, 1e-10, 1e-12).unwrap();
            for (t, a) in g.iter().zip(&r.amplitudes) {
                let u = static_propagator(omega, detuning, sys.damping(), *t);
                let p1 = u[(0, 0)].norm_sqr();
                let p2 = u[(1, 0)].norm_sqr();
                assert!((a[0].norm_sqr() - p1).abs() < 1e-8, "t = {t}");
                assert!((a[1].norm_sqr() - p2).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn analytic_solution_is_exact_for_static_fields() {
        for (detuning, decay) in [(0.0, 0.0), (3.0, 0.0), (0.0, 0.1), (3.0, 0.1)] {
            let pulse = PulseSpec::constant(1.0, detuning).unwrap();
            let sys = SystemParams::new(0.0, 10.0, decay, 0.0).unwrap();
            let g = grid(0.0, 20.0, 201);
            let init = [c(1.0, 0.0), c(0.0, 0.0)];
            let ana =
                analytic_trajectory(&pulse, &sys, &g, init, AnalyticOptions::default()).unwrap();
            let ora = integrate_rwa(&pulse, &sys, init, &g, 1e-10, 1e-12).unwrap();
            let r = compare(&ana, &ora, None).unwrap();
            assert!(r.max_population_error < 1e-8, "{detuning} {decay}: {r:?}");
        }
    }

    #[test]
    fn norm_laws() {
        let pulse = PulseSpec::gaussian(0.4, 0.0, 10.0, 0.5)
            .unwrap()
            .with_phase(Phase::LinearChirp {
                rate: 0.01,
                center: 0.0,
            })
            .unwrap();
        let g = grid(-40.0, 40.0, 401);
        let init = [c(1.0, 0.0), c(0.0, 0.0)];
        let tol = 1e-10;
        let r = integrate_rwa(&pulse, &SystemParams::undamped(5.0), init, &g, tol, 1e-12).unwrap();
        for n in &r.norm {
            assert!((n - 1.0).abs() <= 10.0 * tol, "{}", n - 1.0);
        }
        let damped = integrate_rwa(
            &pulse,
            &SystemParams::new(0.0, 5.0, 0.05, 0.01).unwrap(),
            init,
            &g,
            tol,
            1e-12,
        )
        .unwrap();
        // far in the pulse tail the decay per step is below one ulp of the norm
        assert!(damped
            .step_norms
            .windows(2)
            .all(|w| w[1] <= w[0] + 4.0 * f64::EPSILON * w[0]));
        assert!(damped.norm.last().unwrap() < &0.999);
    }

    #[test]
    fn compare_checks_grids() {
        let a = vec![[c(1.0, 0.0), c(0.0, 0.0)]; 3];
        let same = compare_series(&[0.0, 1.0, 2.0], &a, &[0.0, 1.0, 2.0], &a, Some(0.1)).unwrap();
        assert_eq!(same.max_error, [0.0, 0.0]);
        assert_eq!(same.max_population_error, 0.0);
        assert_eq!(same.final_phase_error, Some(0.0));
        assert!(matches!(
            compare_series(&[0.0, 1.0, 2.0], &a, &[0.0, 1.0, 2.5], &a, None),
            Err(Error::GridMismatch(_))
        ));
        assert!(compare_series(&[0.0, 1.0, 2.0], &a, &[0.0, 1.0], &a[..2], None).is_err());
    }
}
