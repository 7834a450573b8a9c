//! Non-adiabatic dressed states of a damped two-level system.
//!
//! With the substitution a₁ = f·exp(−(i/2)∫Δω̃′) the RWA equations reduce to
//! ∂ₜ²f + Ω̃′²f/4 = 0, where
//!
//! * Δω̃′ = Δω − ∂ₜφ − γ″/2 − i(γ′/2 − Ω⁻¹∂ₜΩ) is the instantaneous complex
//!   detuning, and
//! * Ω̃′ = [Ω² + Δω̃′² − 2i∂ₜΔω̃′]^{1/2} the instantaneous off-resonance Rabi
//!   frequency.
//!
//! The WKB-type solution of that equation gives the amplitudes
//!
//! ```text
//! a₁(t) = Σⱼ Cⱼ √(2/Ω̃′) exp(−i∫Λⱼ)
//! a₂(t) = −(2/Ω) √(2/Ω̃′) [Σⱼ Cⱼ Λ̃′ⱼ exp(−i∫Λⱼ)] exp(iΔΦ)
//! ```
//!
//! with Λ₁,₂ = (Δω̃′ ± Ω̃′)/2, Λ̃′ⱼ = Λⱼ − i∂ₜΩ̃′/(2Ω̃′) and ΔΦ = Δω·t − φ(t).
//! Integrals run from the first grid point, where C₁, C₂ are fitted to the
//! initial amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branch::{continued_sqrt, RootChoice};
use crate::error::{Error, Result};
use crate::field::{sample, FieldSample, PulseSpec};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// |Ω̃′| below this fraction of the local frequency scale is treated as an
/// exact two-root degeneracy.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Bare two-level system with complex damping γ = γ′ − iγ″ on the upper level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// ω₁, ground-state eigenfrequency; 0 unless given.
    #[serde(default)]
    pub omega1: f64,
    /// ω₂, excited-state eigenfrequency.
    pub omega2: f64,
    /// γ′ ≥ 0, decay rate (level broadening).
    #[serde(default)]
    pub gamma_decay: f64,
    /// γ″, damping-induced level shift.
    #[serde(default)]
    pub gamma_shift: f64,
}

impl SystemParams {
    pub fn new(omega1: f64, omega2: f64, gamma_decay: f64, gamma_shift: f64) -> Result<Self> {
        let sys = Self {
            omega1,
            omega2,
            gamma_decay,
            gamma_shift,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Undamped system with ω₁ = 0 and the given ω₂.
    pub fn undamped(omega2: f64) -> Self {
        Self {
            omega1: 0.0,
            omega2,
            gamma_decay: 0.0,
            gamma_shift: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.omega1, self.omega2, self.gamma_decay, self.gamma_shift];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("parameters must be finite".into()));
        }
        if self.omega2 <= self.omega1 {
            return Err(Error::InvalidSystem(format!(
                "require ω₂ > ω₁, got ω₁ = {}, ω₂ = {}",
                self.omega1, self.omega2
            )));
        }
        if self.gamma_decay < 0.0 {
            return Err(Error::InvalidSystem(format!(
                "decay rate γ′ must be ≥ 0, got {}",
                self.gamma_decay
            )));
        }
        Ok(())
    }

    /// γ = γ′ − iγ″.
    pub fn damping(&self) -> C64 {
        C64::new(self.gamma_decay, -self.gamma_shift)
    }

    /// Carrier frequency ω = ω₂ − ω₁ − Δω.
    pub fn carrier(&self, detuning: f64) -> f64 {
        self.omega2 - self.omega1 - detuning
    }
}

/// Δω̃′ = Δω − ∂ₜφ − γ″/2 − i(γ′/2 − Ω⁻¹∂ₜΩ).
pub fn instantaneous_detuning(field: &FieldSample, sys: &SystemParams) -> C64 {
    C64::new(
        field.detuning - field.phase[1] - 0.5 * sys.gamma_shift,
        -(0.5 * sys.gamma_decay - field.log_derivative[0]),
    )
}

/// ∂ₜΔω̃′, ∂ₜ²Δω̃′ and ∂ₜ³Δω̃′ (the damping is time independent).
pub fn detuning_derivatives(field: &FieldSample) -> [C64; 3] {
    let (p, l) = (&field.phase, &field.log_derivative);
    [
        C64::new(-p[2], l[1]),
        C64::new(-p[3], l[2]),
        C64::new(-p[4], l[3]),
    ]
}

/// Ω̃′ = [Ω² + Δω̃′² − 2i∂ₜΔω̃′]^{1/2}, on the branch continuing `prev`
/// (principal root when there is none).
pub fn instantaneous_rabi(
    detuning: C64,
    detuning_rate: C64,
    rabi: f64,
    prev: Option<C64>,
) -> RootChoice {
    let square = rabi * rabi + detuning * detuning - 2.0 * I * detuning_rate;
    continued_sqrt(square, prev)
}

/// ∂ₜΩ̃′ by the chain rule: (Ω∂ₜΩ + Δω̃′∂ₜΔω̃′ − i∂ₜ²Δω̃′)/Ω̃′.
pub fn rabi_rate(
    field: &FieldSample,
    detuning: C64,
    detuning_derivs: &[C64; 3],
    offres: C64,
) -> C64 {
    let w = &field.envelope;
    (w[0] * w[1] + detuning * detuning_derivs[0] - I * detuning_derivs[1]) / offres
}

/// ∂ₜ²Ω̃′ from differentiating Ω̃′² twice.
pub fn rabi_acceleration(
    field: &FieldSample,
    detuning: C64,
    detuning_derivs: &[C64; 3],
    offres: C64,
    offres_rate: C64,
) -> C64 {
    let w = &field.envelope;
    let [d1, d2, d3] = *detuning_derivs;
    (w[1] * w[1] + w[0] * w[2] + d1 * d1 + detuning * d2 - I * d3 - offres_rate * offres_rate)
        / offres
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambdas {
    /// Λ₁ = (Δω̃′ + Ω̃′)/2 and Λ₂ = (Δω̃′ − Ω̃′)/2.
    pub bare: [C64; 2],
    /// Λ̃′ⱼ = Λⱼ − i∂ₜΩ̃′/(2Ω̃′).
    pub corrected: [C64; 2],
}

pub fn lambdas(detuning: C64, offres: C64, offres_rate: C64) -> Result<Lambdas> {
    check_degeneracy(offres, detuning.norm(), f64::NAN)?;
    let bare = [0.5 * (detuning + offres), 0.5 * (detuning - offres)];
    let correction = I * offres_rate / (2.0 * offres);
    Ok(Lambdas {
        bare,
        corrected: [bare[0] - correction, bare[1] - correction],
    })
}

fn check_degeneracy(offres: C64, scale: f64, t: f64) -> Result<()> {
    let modulus = offres.norm();
    if !(modulus > DEGENERACY_TOLERANCE * scale.max(f64::MIN_POSITIVE)) || !modulus.is_finite() {
        return Err(Error::DegenerateRabi { t, modulus });
    }
    Ok(())
}

/// The complex amplitudes COS(θ/2) and SIN(θ/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAmplitudes {
    pub cos_half: C64,
    pub sin_half: C64,
    pub ambiguous: bool,
}

impl MixingAmplitudes {
    /// COS² + SIN² − 1, zero up to rounding.
    pub fn identity_defect(&self) -> C64 {
        self.cos_half * self.cos_half + self.sin_half * self.sin_half - 1.0
    }
}

/// COS(θ/2) = (Λ̃′₁/Ω̃′)^{1/2}, SIN(θ/2) = (−Λ̃′₂/Ω̃′)^{1/2}.
///
/// Without `prev` both roots take the principal branch, which puts COS near 1
/// in the weak-field limit.
pub fn mixing_amplitudes(
    corrected: [C64; 2],
    offres: C64,
    prev: Option<(C64, C64)>,
) -> Result<MixingAmplitudes> {
    check_degeneracy(offres, (corrected[0] + corrected[1]).norm(), f64::NAN)?;
    let cos = continued_sqrt(corrected[0] / offres, prev.map(|p| p.0));
    let sin = continued_sqrt(-corrected[1] / offres, prev.map(|p| p.1));
    Ok(MixingAmplitudes {
        cos_half: cos.value,
        sin_half: sin.value,
        ambiguous: cos.ambiguous || sin.ambiguous,
    })
}

/// Real adiabatic mixing (cos θ/2, sin θ/2) with tan θ = Ω/Δω.
pub fn adiabatic_mixing(rabi: f64, detuning: f64) -> (f64, f64) {
    let theta = rabi.atan2(detuning);
    ((0.5 * theta).cos(), (0.5 * theta).sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrequencies {
    /// ω_G = ω₁ + Λ₂.
    pub ground: C64,
    /// ω_E = ω₂ − Λ₂.
    pub excited: C64,
    /// ω̃′_E = ω_E − ∂ₜφ − γ″/2 − i(γ′/2 − Ω⁻¹∂ₜΩ).
    pub excited_instantaneous: C64,
}

pub fn dressed_frequencies(
    sys: &SystemParams,
    field: &FieldSample,
    lambda2: C64,
) -> DressedFrequencies {
    let ground = sys.omega1 + lambda2;
    let excited = sys.omega2 - lambda2;
    let shift = C64::new(
        -field.phase[1] - 0.5 * sys.gamma_shift,
        -(0.5 * sys.gamma_decay - field.log_derivative[0]),
    );
    DressedFrequencies {
        ground,
        excited,
        excited_instantaneous: excited + shift,
    }
}

/// Every derived quantity at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantSnapshot {
    pub t: f64,
    /// Ω(t).
    pub rabi_field: f64,
    /// Δω.
    pub bare_detuning: f64,
    /// φ(t).
    pub phase: f64,
    /// ΔΦ = Δω·t − φ(t).
    pub phase_mismatch: f64,
    /// Δω̃′.
    pub detuning: C64,
    /// Ω̃′, branch-tracked.
    pub rabi: C64,
    /// ∂ₜΩ̃′.
    pub rabi_rate: C64,
    /// ∂ₜ²Ω̃′.
    pub rabi_acceleration: C64,
    /// √Ω̃′, branch-tracked; the amplitude prefactor is √2/`sqrt_rabi`.
    pub sqrt_rabi: C64,
    pub lambdas: Lambdas,
    pub mixing: MixingAmplitudes,
    pub frequencies: DressedFrequencies,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BranchIssue {
    /// Both roots were equidistant from the previous value.
    Ambiguous { quantity: &'static str },
    /// Ω̃′ moved further than its derivative allows over one step.
    Jump { jump: f64, bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchWarning {
    pub t: f64,
    pub issue: BranchIssue,
}

/// Carries the previous roots so that consecutive snapshots stay on one branch.
#[derive(Debug, Clone, Default)]
pub struct BranchTracker {
    prev: Option<InstantSnapshot>,
    pub warnings: Vec<BranchWarning>,
}

impl BranchTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last(&self) -> Option<&InstantSnapshot> {
        self.prev.as_ref()
    }

    pub fn snapshot(
        &mut self,
        pulse: &PulseSpec,
        sys: &SystemParams,
        t: f64,
    ) -> Result<InstantSnapshot> {
        let field = sample(pulse, t)?;
        self.snapshot_of(&field, sys)
    }

    pub fn snapshot_of(
        &mut self,
        field: &FieldSample,
        sys: &SystemParams,
    ) -> Result<InstantSnapshot> {
        let t = field.t;
        let detuning = instantaneous_detuning(field, sys);
        let dd = detuning_derivatives(field);
        let omega = field.rabi();

        let rabi = instantaneous_rabi(detuning, dd[0], omega, self.prev.map(|p| p.rabi));
        if rabi.ambiguous {
            self.warn(
                t,
                BranchIssue::Ambiguous {
                    quantity: "Ω̃′"
                },
            );
        }
        let offres = rabi.value;
        let scale = omega.max(detuning.norm()).max(dd[0].norm().sqrt());
        check_degeneracy(offres, scale, t)?;

        let sqrt = continued_sqrt(offres, self.prev.map(|p| p.sqrt_rabi));
        if sqrt.ambiguous {
            self.warn(
                t,
                BranchIssue::Ambiguous {
                    quantity: "√Ω̃′"
                },
            );
        }
        let rate = rabi_rate(field, detuning, &dd, offres);
        let accel = rabi_acceleration(field, detuning, &dd, offres, rate);
        let lambdas = lambdas(detuning, offres, rate).map_err(|_| Error::DegenerateRabi {
            t,
            modulus: offres.norm(),
        })?;
        let mixing = mixing_amplitudes(
            lambdas.corrected,
            offres,
            self.prev.map(|p| (p.mixing.cos_half, p.mixing.sin_half)),
        )
        .map_err(|_| Error::DegenerateRabi {
            t,
            modulus: offres.norm(),
        })?;
        if mixing.ambiguous {
            self.warn(
                t,
                BranchIssue::Ambiguous {
                    quantity: "COS/SIN(θ/2)",
                },
            );
        }

        if let Some(prev) = self.prev {
            let dt = (t - prev.t).abs();
            let jump = (offres - prev.rabi).norm();
            let slope = prev.rabi_rate.norm().max(rate.norm());
            let curvature = prev.rabi_acceleration.norm().max(accel.norm());
            let bound = 2.0 * (slope * dt + 0.5 * curvature * dt * dt)
                + 1e-12 * offres.norm().max(prev.rabi.norm());
            if jump > bound {
                self.warn(t, BranchIssue::Jump { jump, bound });
            }
        }

        let snap = InstantSnapshot {
            t,
            rabi_field: omega,
            bare_detuning: field.detuning,
            phase: field.phase[0],
            phase_mismatch: field.phase_mismatch(),
            detuning,
            rabi: offres,
            rabi_rate: rate,
            rabi_acceleration: accel,
            sqrt_rabi: sqrt.value,
            lambdas,
            mixing,
            frequencies: dressed_frequencies(sys, field, lambdas.bare[1]),
        };
        self.prev = Some(snap);
        Ok(snap)
    }

    fn warn(&mut self, t: f64, issue: BranchIssue) {
        self.warnings.push(BranchWarning { t, issue });
    }
}

/// Instantaneous snapshot with principal branches (no history).
pub fn snapshot(pulse: &PulseSpec, sys: &SystemParams, t: f64) -> Result<InstantSnapshot> {
    BranchTracker::new().snapshot(pulse, sys, t)
}

fn constants_from_snapshot(snap: &InstantSnapshot, init: [C64; 2]) -> Result<[C64; 2]> {
    let prefactor = std::f64::consts::SQRT_2 / snap.sqrt_rabi;
    let a = init[0] / prefactor;
    let b =
        -init[1] * snap.rabi_field * C64::from_polar(1.0, -snap.phase_mismatch) / (2.0 * prefactor);
    let [l1, l2] = snap.lambdas.corrected;
    let det = l1 - l2;
    if !(det.norm() > 0.0) {
        return Err(Error::DegenerateRabi {
            t: snap.t,
            modulus: snap.rabi.norm(),
        });
    }
    Ok([(b - a * l2) / det, (a * l1 - b) / det])
}

/// C₁, C₂ from the 2×2 linear system obtained by evaluating the closed-form
/// amplitudes at `t_start` against `init = (a₁, a₂)`.
pub fn solve_constants(
    pulse: &PulseSpec,
    sys: &SystemParams,
    t_start: f64,
    init: [C64; 2],
) -> Result<[C64; 2]> {
    let snap = snapshot(pulse, sys, t_start)?;
    constants_from_snapshot(&snap, init)
}

fn amplitudes_at(snap: &InstantSnapshot, constants: &[C64; 2], integrals: &[C64; 2]) -> [C64; 2] {
    let prefactor = std::f64::consts::SQRT_2 / snap.sqrt_rabi;
    let e = [(-I * integrals[0]).exp(), (-I * integrals[1]).exp()];
    let [l1, l2] = snap.lambdas.corrected;
    let a1 = prefactor * (constants[0] * e[0] + constants[1] * e[1]);
    let a2 = -(2.0 / snap.rabi_field)
        * prefactor
        * (constants[0] * l1 * e[0] + constants[1] * l2 * e[1])
        * C64::from_polar(1.0, snap.phase_mismatch);
    [a1, a2]
}

/// ∫Δω̃′ dt′ from `start` to `snap`, in closed form: the chirp and log-envelope
/// terms integrate to φ and ln Ω.
fn detuning_integral(start: &InstantSnapshot, snap: &InstantSnapshot, sys: &SystemParams) -> C64 {
    let dt = snap.t - start.t;
    let constant = C64::new(
        snap.bare_detuning - 0.5 * sys.gamma_shift,
        -0.5 * sys.gamma_decay,
    );
    constant * dt - (snap.phase - start.phase) + I * (snap.rabi_field / start.rabi_field).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticOptions {
    /// Simpson sub-panels per grid interval.
    pub refine: usize,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        Self { refine: 1 }
    }
}

/// Closed-form amplitude solution on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSolution {
    pub constants: [C64; 2],
    pub initial: [C64; 2],
    pub grid: Vec<f64>,
    /// ∫Λ₁dt′ and ∫Λ₂dt′ from the first grid point.
    pub phase_integrals: Vec<[C64; 2]>,
    /// (a₁, a₂) at each grid point.
    pub amplitudes: Vec<[C64; 2]>,
    pub snapshots: Vec<InstantSnapshot>,
    pub warnings: Vec<BranchWarning>,
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite times".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "grid must be strictly increasing (index {})",
            i + 1
        )));
    }
    Ok(())
}

/// Evaluates the closed-form solution along `grid`.
///
/// Ω̃′, √Ω̃′ and the mixing amplitudes are continued point to point (including
/// the Simpson midpoints), ∫Ω̃′dt′ is accumulated by composite Simpson and
/// combined with the exact integral of Δω̃′ to give ∫Λⱼdt′.
pub fn analytic_trajectory(
    pulse: &PulseSpec,
    sys: &SystemParams,
    grid: &[f64],
    init: [C64; 2],
    options: AnalyticOptions,
) -> Result<AmplitudeSolution> {
    validate_grid(grid)?;
    let refine = options.refine.max(1);
    let mut tracker = BranchTracker::new();
    let first = tracker
        .snapshot(pulse, sys, grid[0])
        .map_err(|e| e.at_index(0))?;
    let constants = constants_from_snapshot(&first, init).map_err(|e| e.at_index(0))?;

    let n = grid.len();
    let mut snapshots = Vec::with_capacity(n);
    let mut integrals = Vec::with_capacity(n);
    let mut amplitudes = Vec::with_capacity(n);

    let mut rabi_integral = C64::new(0.0, 0.0);
    let mut current = first;
    for i in 0..n {
        if i > 0 {
            let (a, b) = (grid[i - 1], grid[i]);
            let h = (b - a) / refine as f64;
            for k in 0..refine {
                let left = current;
                let lo = a + k as f64 * h;
                let hi = if k + 1 == refine {
                    b
                } else {
                    a + (k + 1) as f64 * h
                };
                let mid = tracker
                    .snapshot(pulse, sys, 0.5 * (lo + hi))
                    .map_err(|e| e.at_index(i))?;
                current = tracker
                    .snapshot(pulse, sys, hi)
                    .map_err(|e| e.at_index(i))?;
                rabi_integral += (hi - lo) / 6.0 * (left.rabi + 4.0 * mid.rabi + current.rabi);
            }
        }
        let d = detuning_integral(&first, &current, sys);
        let phase = [0.5 * (d + rabi_integral), 0.5 * (d - rabi_integral)];
        amplitudes.push(amplitudes_at(&current, &constants, &phase));
        integrals.push(phase);
        snapshots.push(current);
    }

    Ok(AmplitudeSolution {
        constants,
        initial: init,
        grid: grid.to_vec(),
        phase_integrals: integrals,
        amplitudes,
        snapshots,
        warnings: tracker.warnings,
    })
}

/// One of the four dressed-state components at one instant. The component is
/// proportional to exp(−i·`phase`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub phase: C64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentPoint {
    pub t: f64,
    /// φ(t).
    pub optical_phase: f64,
    /// ω·(t − t_start).
    pub carrier_phase: f64,
    /// |G⟩ᵣ ∝ |1⟩.
    pub ground_real: Component,
    /// |G⟩ᵥ ∝ |2⟩.
    pub ground_virtual: Component,
    /// |E⟩ᵣ ∝ |2⟩.
    pub excited_real: Component,
    /// |E⟩ᵥ ∝ |1⟩.
    pub excited_virtual: Component,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedStateComponents {
    pub carrier: f64,
    pub points: Vec<ComponentPoint>,
}

/// Real and virtual components of |G⟩ and |E⟩ along a solution.
pub fn dressed_components(
    solution: &AmplitudeSolution,
    sys: &SystemParams,
    carrier: f64,
) -> DressedStateComponents {
    let Some(first) = solution.snapshots.first() else {
        return DressedStateComponents {
            carrier,
            points: Vec::new(),
        };
    };
    let points = solution
        .snapshots
        .iter()
        .zip(&solution.phase_integrals)
        .map(|(snap, integrals)| {
            let dt = snap.t - first.t;
            let lambda2 = integrals[1];
            let ground = sys.omega1 * dt + lambda2;
            let excited = sys.omega2 * dt - lambda2 - (snap.phase - first.phase)
                + C64::new(-0.5 * sys.gamma_shift, -0.5 * sys.gamma_decay) * dt
                + I * (snap.rabi_field / first.rabi_field).ln();
            let carrier_phase = carrier * dt;
            let cos_w = snap.mixing.cos_half.norm_sqr();
            let sin_w = snap.mixing.sin_half.norm_sqr();
            ComponentPoint {
                t: snap.t,
                optical_phase: snap.phase,
                carrier_phase,
                ground_real: Component {
                    phase: ground,
                    weight: cos_w,
                },
                ground_virtual: Component {
                    phase: ground + carrier_phase + snap.phase,
                    weight: sin_w,
                },
                excited_real: Component {
                    phase: excited + snap.phase,
                    weight: cos_w,
                },
                excited_virtual: Component {
                    phase: excited - carrier_phase,
                    weight: sin_w,
                },
            }
        })
        .collect();
    DressedStateComponents { carrier, points }
}

/// Populations (p_G, p_E) of the orthonormal dressed basis built from the real
/// adiabatic mixing cos(θ/2), sin(θ/2) with tan θ = Ω/Δω, keeping the optical
/// phase ΔΦ.
///
/// In amplitude space |G⟩ = (cos, sin·e^{iΔΦ}) and |E⟩ = (−sin, cos·e^{iΔΦ}).
pub fn project_onto_dressed_basis(a1: C64, a2: C64, snapshot: &InstantSnapshot) -> (f64, f64) {
    let (c, s) = adiabatic_mixing(snapshot.rabi_field, snapshot.bare_detuning);
    let back = C64::from_polar(1.0, -snapshot.phase_mismatch) * a2;
    let g = c * a1 + s * back;
    let e = -s * a1 + c * back;
    (g.norm_sqr(), e.norm_sqr())
}
