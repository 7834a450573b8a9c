//! Checks of the second-order normal form f″ + Ω̃′²f/4 = 0 behind the
//! closed-form amplitudes.

use num_complex::Complex64;

use crate::dressed::{
    analytic_trajectory, AmplitudeSolution, AnalyticOptions, BranchTracker, SystemParams,
};
use crate::error::Result;
use crate::field::PulseSpec;

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Upper bound on h·|Ω̃′| for the difference stencils.
const STENCIL_PHASE_STEP: f64 = 0.05;

/// f = a₁·exp((i/2)∫Δω̃′) along a solution, split into the two WKB branches.
fn normal_form_terms(solution: &AmplitudeSolution) -> Vec<[C64; 2]> {
    solution
        .snapshots
        .iter()
        .zip(&solution.phase_integrals)
        .map(|(snap, integrals)| {
            let prefactor = std::f64::consts::SQRT_2 / snap.sqrt_rabi;
            // ∫Δω̃′ = ∫Λ₁ + ∫Λ₂
            let half = 0.5 * (integrals[0] + integrals[1]);
            let c = &solution.constants;
            [
                prefactor * c[0] * (-I * (integrals[0] - half)).exp(),
                prefactor * c[1] * (-I * (integrals[1] - half)).exp(),
            ]
        })
        .collect()
}

/// f(t) = a₁(t)·exp((i/2)∫Δω̃′dt′) along a solution.
pub fn normal_form_amplitude(solution: &AmplitudeSolution) -> Vec<C64> {
    solution
        .amplitudes
        .iter()
        .zip(&solution.phase_integrals)
        .map(|(a, integrals)| a[0] * (0.5 * I * (integrals[0] + integrals[1])).exp())
        .collect()
}

#[derive(Clone, Copy)]
enum Stencil {
    Forward,
    Central,
    Backward,
}

impl Stencil {
    fn offsets(self) -> &'static [f64] {
        match self {
            Stencil::Forward => &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            Stencil::Central => &[-2.0, -1.0, 0.0, 1.0, 2.0],
            Stencil::Backward => &[-5.0, -4.0, -3.0, -2.0, -1.0, 0.0],
        }
    }

    fn second_derivative(self, f: &[C64], h: f64) -> C64 {
        let h2 = h * h;
        match self {
            Stencil::Central => {
                (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h2)
            }
            Stencil::Forward => {
                (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4]
                    - 10.0 * f[5])
                    / (12.0 * h2)
            }
            Stencil::Backward => {
                (45.0 * f[5] - 154.0 * f[4] + 214.0 * f[3] - 156.0 * f[2] + 61.0 * f[1]
                    - 10.0 * f[0])
                    / (12.0 * h2)
            }
        }
    }
}

/// Relative residual |f″ + Ω̃′²f/4| / (|Ω̃′²/4|·(|f₁| + |f₂|)) at every grid
/// point of `solution`, where f₁, f₂ are the two WKB branches of f.
///
/// The solution is re-evaluated from the same starting point on small uniform
/// stencils around each grid point (step at most a tenth of the local spacing
/// and 0.05/|Ω̃′|); f″ uses the 5-point central formula inside and 6-point
/// one-sided formulas at the two ends, all fourth order.
pub fn residual_normal_form(
    pulse: &PulseSpec,
    sys: &SystemParams,
    solution: &AmplitudeSolution,
) -> Result<Vec<f64>> {
    let grid = &solution.grid;
    let n = grid.len();
    let mut fine = Vec::new();
    let mut layout = Vec::with_capacity(n);
    for i in 0..n {
        let left = if i > 0 {
            grid[i] - grid[i - 1]
        } else {
            f64::INFINITY
        };
        let right = if i + 1 < n {
            grid[i + 1] - grid[i]
        } else {
            f64::INFINITY
        };
        let spacing = left.min(right);
        let mut h = STENCIL_PHASE_STEP / solution.snapshots[i].rabi.norm();
        if spacing.is_finite() {
            h = h.min(0.1 * spacing);
        }
        let stencil = if i == 0 {
            Stencil::Forward
        } else if i + 1 == n {
            Stencil::Backward
        } else {
            Stencil::Central
        };
        layout.push((stencil, fine.len(), h));
        fine.extend(stencil.offsets().iter().map(|k| {
            if *k == 0.0 {
                grid[i]
            } else {
                grid[i] + k * h
            }
        }));
    }

    let dense = analytic_trajectory(
        pulse,
        sys,
        &fine,
        solution.initial,
        AnalyticOptions::default(),
    )?;
    let terms = normal_form_terms(&dense);
    let f: Vec<C64> = terms.iter().map(|t| t[0] + t[1]).collect();

    Ok(layout
        .iter()
        .map(|&(stencil, start, h)| {
            let len = stencil.offsets().len();
            let centre = start
                + stencil
                    .offsets()
                    .iter()
                    .position(|k| *k == 0.0)
                    .expect("stencil has a centre");
            let second = stencil.second_derivative(&f[start..start + len], h);
            let u = dense.snapshots[centre].rabi;
            let quarter = 0.25 * u * u;
            let scale = quarter.norm() * (terms[centre][0].norm() + terms[centre][1].norm());
            let residual = (second + quarter * f[centre]).norm();
            if residual == 0.0 {
                0.0
            } else {
                residual / (scale + f64::MIN_POSITIVE)
            }
        })
        .collect())
}

/// |∂ₜ²T/T| / |Ω̃′²/4| with T = (Ω̃′/2)^{−1/2}, the term dropped to reach the
/// closed-form solution.
///
/// ∂ₜ²T/T = (3/4)(∂ₜΩ̃′/Ω̃′)² − ∂ₜ²Ω̃′/(2Ω̃′), both derivatives analytic.
pub fn neglected_term_ratio(
    pulse: &PulseSpec,
    sys: &SystemParams,
    grid: &[f64],
) -> Result<Vec<f64>> {
    crate::dressed::validate_grid(grid)?;
    let mut tracker = BranchTracker::new();
    grid.iter()
        .enumerate()
        .map(|(i, &t)| {
            let s = tracker.snapshot(pulse, sys, t).map_err(|e| e.at_index(i))?;
            let u = s.rabi;
            let v = s.rabi_rate / u;
            let term = 0.75 * v * v - s.rabi_acceleration / (2.0 * u);
            Ok(term.norm() / (0.25 * u * u).norm())
        })
        .collect()
}
