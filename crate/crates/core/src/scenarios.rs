//! Named experiment configurations, the pipeline that runs one, and the sweep
//! engine that runs a family of them.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adiabaticity::{self, AdiabaticityReport};
use crate::dressed::{
    analytic_trajectory, dressed_components, project_onto_dressed_basis, AmplitudeSolution,
    AnalyticOptions, DressedStateComponents, SystemParams,
};
use crate::error::{Error, Result};
use crate::field::{Envelope, Phase, PulseSpec};
use crate::oracle::{
    compare, integrate_rwa_with, neglected_term_ratio, residual_normal_form, ComparisonReport,
    Method, OracleOptions, OracleTrajectory,
};
use crate::units::{wavenumber_to_rad_per_ns, SPEED_OF_LIGHT_CM_PER_NS};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    /// Analytic and oracle amplitudes, dressed populations and diagnostics.
    Trajectory,
    /// Real and virtual dressed-state components.
    Components,
    Adiabaticity,
    /// Analytic-vs-oracle error statistics.
    Comparison,
}

/// Simulation window. Missing ends default to the pulse support; pulsed
/// envelopes are always clipped to where Ω ≥ `anchor_ratio`·Ω_peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    /// a₁ as [re, im].
    pub a1: [f64; 2],
    /// a₂ as [re, im].
    pub a2: [f64; 2],
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            a1: [1.0, 0.0],
            a2: [0.0, 0.0],
        }
    }
}

impl InitialState {
    pub fn amplitudes(&self) -> [C64; 2] {
        [
            C64::new(self.a1[0], self.a1[1]),
            C64::new(self.a2[0], self.a2[1]),
        ]
    }
}

fn default_rel_tol() -> f64 {
    1e-10
}
fn default_abs_tol() -> f64 {
    1e-12
}
fn default_anchor_ratio() -> f64 {
    1e-6
}
fn default_refine() -> usize {
    1
}
fn default_n_max() -> usize {
    adiabaticity::DEFAULT_MAX_ORDER
}
fn default_k_max() -> usize {
    adiabaticity::DEFAULT_MAX_POWER
}
fn default_virtual_ratio_threshold() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    /// Grid clipping threshold as a fraction of the peak envelope.
    #[serde(default = "default_anchor_ratio")]
    pub anchor_ratio: f64,
    /// Simpson sub-panels per grid interval for ∫Ω̃′.
    #[serde(default = "default_refine")]
    pub quadrature_refine: usize,
    #[serde(default)]
    pub integrator: Method,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Bound on max p(|E⟩ᵣ)/max p(|G⟩ᵥ) counted as "much weaker".
    #[serde(default = "default_virtual_ratio_threshold")]
    pub virtual_ratio_threshold: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            anchor_ratio: default_anchor_ratio(),
            quadrature_refine: default_refine(),
            integrator: Method::default(),
            n_max: default_n_max(),
            k_max: default_k_max(),
            virtual_ratio_threshold: default_virtual_ratio_threshold(),
        }
    }
}

fn default_name() -> String {
    "scenario".into()
}

/// ω₁ = 0, ω₂ = 100, undamped. The level frequencies only enter through the
/// carrier used in the dressed-component phases.
fn default_system() -> SystemParams {
    SystemParams::undamped(100.0)
}

fn default_outputs() -> BTreeSet<Output> {
    [
        Output::Trajectory,
        Output::Components,
        Output::Adiabaticity,
        Output::Comparison,
    ]
    .into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default = "default_outputs")]
    pub outputs: BTreeSet<Output>,
    pub pulse: PulseSpec,
    #[serde(default = "default_system")]
    pub system: SystemParams,
    pub grid: GridSpec,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub numerics: Numerics,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.outputs.is_empty() {
            return Err(Error::InvalidScenario("no outputs requested".into()));
        }
        if self.grid.points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 grid points, got {}",
                self.grid.points
            )));
        }
        self.pulse.validate()?;
        self.system.validate()?;
        let n = &self.numerics;
        for (name, tol) in [("rel_tol", n.rel_tol), ("abs_tol", n.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(Error::Config(format!(
                    "{name} must lie in (0, 1e-3], got {tol}"
                )));
            }
        }
        if !(n.anchor_ratio > 0.0 && n.anchor_ratio < 1.0) {
            return Err(Error::Config(format!(
                "anchor_ratio must lie in (0, 1), got {}",
                n.anchor_ratio
            )));
        }
        if n.quadrature_refine == 0 {
            return Err(Error::Config("quadrature_refine must be ≥ 1".into()));
        }
        if n.n_max > 3 {
            return Err(Error::Config(format!("n_max must be ≤ 3, got {}", n.n_max)));
        }
        if let Method::Rk4 { substeps: 0 } = n.integrator {
            return Err(Error::Config("rk4 substeps must be ≥ 1".into()));
        }
        if !(n.virtual_ratio_threshold > 0.0) {
            return Err(Error::Config("virtual_ratio_threshold must be > 0".into()));
        }
        let init = self.initial.a1.iter().chain(&self.initial.a2);
        if init.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidScenario(
                "initial amplitudes must be finite".into(),
            ));
        }
        self.window().map(|_| ())
    }

    /// The clipped [start, end] window.
    pub fn window(&self) -> Result<(f64, f64)> {
        let (lo, hi) = self.pulse.support(self.numerics.anchor_ratio);
        let start = self.grid.start.map_or(lo, |s| s.max(lo));
        let end = self.grid.end.map_or(hi, |e| e.min(hi));
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidGrid(
                "grid start and end are required for envelopes that do not decay".into(),
            ));
        }
        if start >= end {
            return Err(Error::InvalidGrid(format!("empty window [{start}, {end}]")));
        }
        Ok((start, end))
    }

    /// Uniform grid over the clipped window.
    pub fn grid(&self) -> Result<Vec<f64>> {
        let (a, b) = self.window()?;
        let n = self.grid.points;
        Ok((0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect())
    }

    /// The same scenario with the grid ends made explicit.
    pub fn resolved(&self) -> Result<Scenario> {
        let (a, b) = self.window()?;
        let mut s = self.clone();
        s.grid.start = Some(a);
        s.grid.end = Some(b);
        Ok(s)
    }

    /// Carrier frequency ω = ω₂ − ω₁ − Δω.
    pub fn carrier(&self) -> f64 {
        self.system.carrier(self.pulse.detuning)
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}

/// Dressed-basis populations along the reference trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedPopulations {
    /// Taken from the oracle when it ran, otherwise from the analytic solution.
    pub source: &'static str,
    pub ground: Vec<f64>,
    pub excited: Vec<f64>,
    /// |SIN(θ/2)|²·p_G, the population carried by |G⟩ᵥ.
    pub virtual_ground: Vec<f64>,
    pub max_excited: f64,
    pub max_virtual: f64,
    /// max p_E / max p(|G⟩ᵥ).
    pub ratio: f64,
}

/// Everything one scenario run produces, on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RunBundle {
    /// The scenario with its grid window resolved.
    pub scenario: Scenario,
    pub grid: Vec<f64>,
    pub analytic: Option<AmplitudeSolution>,
    pub oracle: Option<OracleTrajectory>,
    pub adiabaticity: Option<AdiabaticityReport>,
    pub components: Option<DressedStateComponents>,
    pub comparison: Option<ComparisonReport>,
    pub residual: Option<Vec<f64>>,
    pub neglected: Option<Vec<f64>>,
    pub populations: Option<DressedPopulations>,
}

fn dressed_populations(
    analytic: &AmplitudeSolution,
    reference: Option<&OracleTrajectory>,
) -> DressedPopulations {
    let (source, amps) = match reference {
        Some(o) => ("oracle", &o.amplitudes),
        None => ("analytic", &analytic.amplitudes),
    };
    let mut ground = Vec::with_capacity(amps.len());
    let mut excited = Vec::with_capacity(amps.len());
    let mut virtual_ground = Vec::with_capacity(amps.len());
    for (a, snap) in amps.iter().zip(&analytic.snapshots) {
        let (pg, pe) = project_onto_dressed_basis(a[0], a[1], snap);
        ground.push(pg);
        excited.push(pe);
        virtual_ground.push(snap.mixing.sin_half.norm_sqr() * pg);
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let (max_excited, max_virtual) = (max(&excited), max(&virtual_ground));
    DressedPopulations {
        source,
        ratio: max_excited / max_virtual,
        ground,
        excited,
        virtual_ground,
        max_excited,
        max_virtual,
    }
}

/// Runs the requested parts of the pipeline.
pub fn run_scenario(s: &Scenario) -> Result<RunBundle> {
    run_inner(s).map_err(|e| e.in_scenario(&s.name))
}

fn run_inner(s: &Scenario) -> Result<RunBundle> {
    s.validate()?;
    let scenario = s.resolved()?;
    let grid = s.grid()?;
    let init = s.initial.amplitudes();
    let n = &s.numerics;

    let trajectory = s.wants(Output::Trajectory);
    let need_analytic = trajectory || s.wants(Output::Components) || s.wants(Output::Comparison);
    let need_oracle = trajectory || s.wants(Output::Comparison);
    let need_adiabaticity =
        trajectory || s.wants(Output::Adiabaticity) || s.wants(Output::Comparison);

    let analytic = need_analytic
        .then(|| {
            analytic_trajectory(
                &s.pulse,
                &s.system,
                &grid,
                init,
                AnalyticOptions {
                    refine: n.quadrature_refine,
                },
            )
        })
        .transpose()?;
    let oracle = need_oracle
        .then(|| {
            integrate_rwa_with(
                &s.pulse,
                &s.system,
                init,
                &grid,
                OracleOptions {
                    rel_tol: n.rel_tol,
                    abs_tol: n.abs_tol,
                    method: n.integrator,
                    max_step: None,
                },
            )
        })
        .transpose()?;
    let adiabaticity = need_adiabaticity
        .then(|| adiabaticity::evaluate(&s.pulse, &s.system, &grid, n.n_max, n.k_max))
        .transpose()?;

    let comparison = match (&analytic, &oracle) {
        (Some(a), Some(o)) if s.wants(Output::Comparison) || trajectory => {
            Some(compare(a, o, adiabaticity.as_ref().map(|r| r.margin))?)
        }
        _ => None,
    };
    let (residual, neglected) = match (&analytic, trajectory) {
        (Some(a), true) => (
            Some(residual_normal_form(&s.pulse, &s.system, a)?),
            Some(neglected_term_ratio(&s.pulse, &s.system, &grid)?),
        ),
        _ => (None, None),
    };
    let components = match (&analytic, s.wants(Output::Components)) {
        (Some(a), true) => Some(dressed_components(a, &s.system, s.carrier())),
        _ => None,
    };
    let populations = analytic
        .as_ref()
        .map(|a| dressed_populations(a, oracle.as_ref()));

    Ok(RunBundle {
        scenario,
        grid,
        analytic,
        oracle,
        adiabaticity,
        components,
        comparison,
        residual,
        neglected,
        populations,
    })
}

/// How a spectral bandwidth (cm⁻¹) maps onto the Gaussian width τ of
/// Ω ∝ exp(−t²/τ²).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthConvention {
    /// FWHM of the transform-limited spectral intensity: τ = √(2 ln 2)/(π c δν̃).
    #[default]
    IntensityFwhm,
    /// FWHM of the spectral amplitude: τ = 2√(ln 2)/(π c δν̃).
    AmplitudeFwhm,
    /// τ = 1/δω.
    InverseBandwidth,
}

impl BandwidthConvention {
    /// Width τ in ns for a bandwidth in cm⁻¹.
    pub fn width_ns(self, bandwidth_cm: f64) -> f64 {
        let c = SPEED_OF_LIGHT_CM_PER_NS;
        let pi = std::f64::consts::PI;
        let ln2 = std::f64::consts::LN_2;
        match self {
            BandwidthConvention::IntensityFwhm => (2.0 * ln2).sqrt() / (pi * c * bandwidth_cm),
            BandwidthConvention::AmplitudeFwhm => 2.0 * ln2.sqrt() / (pi * c * bandwidth_cm),
            BandwidthConvention::InverseBandwidth => 1.0 / wavenumber_to_rad_per_ns(bandwidth_cm),
        }
    }
}

/// Parameters of the far-detuned two-step excitation experiment. Times are in
/// ns, frequencies in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarDetunedOptions {
    pub detuning_cm: f64,
    pub bandwidth_cm: f64,
    /// Recorded only; no Doppler averaging is done.
    pub doppler_width_cm: f64,
    pub convention: BandwidthConvention,
    /// Ω_peak as a fraction of Δω.
    pub peak_fraction: f64,
    pub points: usize,
    pub threshold: f64,
}

impl Default for FarDetunedOptions {
    fn default() -> Self {
        Self {
            detuning_cm: 0.8,
            bandwidth_cm: 0.005,
            doppler_width_cm: 0.04,
            convention: BandwidthConvention::IntensityFwhm,
            peak_fraction: 0.1,
            points: 4001,
            threshold: 1e-2,
        }
    }
}

impl FarDetunedOptions {
    pub fn scenario(&self) -> Scenario {
        let detuning = wavenumber_to_rad_per_ns(self.detuning_cm);
        let width = self.convention.width_ns(self.bandwidth_cm);
        Scenario {
            name: "far-detuned".into(),
            description: Some(format!(
                "Gaussian pulse with {} cm⁻¹ bandwidth detuned {} cm⁻¹ from resonance (Doppler width {} cm⁻¹ not averaged)",
                self.bandwidth_cm, self.detuning_cm, self.doppler_width_cm
            )),
            outputs: default_outputs(),
            pulse: PulseSpec {
                envelope: Envelope::Gaussian {
                    peak: self.peak_fraction * detuning,
                    center: 0.0,
                    width,
                },
                phase: Phase::None,
                detuning,
                floor_ratio: crate::field::DEFAULT_FLOOR_RATIO,
            },
            // only ω₂ − ω₁ − Δω enters, as the carrier of the component phases
            system: SystemParams::undamped(1000.0 * detuning),
            grid: GridSpec {
                start: None,
                end: None,
                points: self.points,
            },
            initial: InitialState::default(),
            numerics: Numerics {
                virtual_ratio_threshold: self.threshold,
                ..Numerics::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarDetunedResult {
    pub options: FarDetunedOptions,
    pub width_ns: f64,
    pub bundle: RunBundle,
    pub margin: f64,
    pub max_excited: f64,
    pub max_virtual: f64,
    pub ratio: f64,
    pub much_weaker: bool,
}

pub fn run_far_detuned() -> Result<FarDetunedResult> {
    run_far_detuned_with(FarDetunedOptions::default())
}

pub fn run_far_detuned_with(options: FarDetunedOptions) -> Result<FarDetunedResult> {
    let scenario = options.scenario();
    let bundle = run_scenario(&scenario)?;
    let pops = bundle
        .populations
        .as_ref()
        .expect("trajectory output requested");
    let margin = bundle
        .adiabaticity
        .as_ref()
        .expect("adiabaticity requested")
        .margin;
    Ok(FarDetunedResult {
        options,
        width_ns: options.convention.width_ns(options.bandwidth_cm),
        margin,
        max_excited: pops.max_excited,
        max_virtual: pops.max_virtual,
        ratio: pops.ratio,
        much_weaker: pops.ratio < options.threshold,
        bundle,
    })
}

fn static_scenario(
    name: &str,
    description: &str,
    peak: f64,
    detuning: f64,
    decay: f64,
    shift: f64,
) -> Scenario {
    Scenario {
        name: name.into(),
        description: Some(description.into()),
        outputs: default_outputs(),
        pulse: PulseSpec::constant(peak, detuning).expect("valid built-in"),
        system: SystemParams {
            omega1: 0.0,
            omega2: 100.0,
            gamma_decay: decay,
            gamma_shift: shift,
        },
        grid: GridSpec {
            start: Some(0.0),
            end: Some(20.0 / peak),
            points: 401,
        },
        initial: InitialState::default(),
        numerics: Numerics::default(),
    }
}

fn pulsed_scenario(
    name: &str,
    description: &str,
    envelope: Envelope,
    phase: Phase,
    decay: f64,
    points: usize,
) -> Scenario {
    Scenario {
        name: name.into(),
        description: Some(description.into()),
        outputs: default_outputs(),
        pulse: PulseSpec::new(envelope, phase, 1.0).expect("valid built-in"),
        system: SystemParams {
            omega1: 0.0,
            omega2: 100.0,
            gamma_decay: decay,
            gamma_shift: 0.0,
        },
        grid: GridSpec {
            start: None,
            end: None,
            points,
        },
        initial: InitialState::default(),
        numerics: Numerics::default(),
    }
}

/// Names of the built-in scenarios, in listing order.
pub const BUILTIN_NAMES: [&str; 7] = [
    "static-rabi",
    "static-detuned",
    "damped-rabi",
    "gaussian-adiabatic",
    "chirped-gaussian",
    "sech-pulse",
    "far-detuned",
];

pub fn builtin(name: &str) -> Option<Scenario> {
    Some(match name {
        "static-rabi" => static_scenario(
            "static-rabi",
            "constant resonant field, undamped",
            1.0,
            0.0,
            0.0,
            0.0,
        ),
        "static-detuned" => static_scenario(
            "static-detuned",
            "constant field detuned by 3Ω, undamped",
            1.0,
            3.0,
            0.0,
            0.0,
        ),
        "damped-rabi" => static_scenario(
            "damped-rabi",
            "constant field with level broadening and shift",
            1.0,
            1.0,
            0.1,
            0.05,
        ),
        "gaussian-adiabatic" => pulsed_scenario(
            "gaussian-adiabatic",
            "slow Gaussian pulse deep in the adiabatic regime",
            Envelope::Gaussian {
                peak: 0.2,
                center: 0.0,
                width: 800.0,
            },
            Phase::None,
            0.0,
            4001,
        ),
        "chirped-gaussian" => {
            let mut s = pulsed_scenario(
                "chirped-gaussian",
                "linearly chirped Gaussian pulse",
                Envelope::Gaussian {
                    peak: 0.3,
                    center: 0.0,
                    width: 400.0,
                },
                Phase::LinearChirp {
                    rate: 1e-4,
                    center: 0.0,
                },
                0.0,
                4001,
            );
            // the chirp keeps the far tails non-adiabatic while the field is tiny
            s.numerics.anchor_ratio = 1e-4;
            s
        }
        "sech-pulse" => pulsed_scenario(
            "sech-pulse",
            "hyperbolic-secant pulse with weak decay",
            Envelope::Sech {
                peak: 0.3,
                center: 0.0,
                width: 100.0,
            },
            Phase::None,
            0.01,
            4001,
        ),
        "far-detuned" => FarDetunedOptions::default().scenario(),
        _ => return None,
    })
}

pub fn builtins() -> Vec<Scenario> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("listed"))
        .collect()
}

/// Scalar summaries a sweep can record per point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    MaxPopulationError,
    Margin,
    StrictMargin,
    FinalCosAbs,
    FinalSinAbs,
    FinalSinSquared,
    MaxResidual,
    MaxNeglectedTerm,
    MaxExcitedPopulation,
    VirtualRatio,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::MaxPopulationError => "max_population_error",
            Metric::Margin => "margin",
            Metric::StrictMargin => "strict_margin",
            Metric::FinalCosAbs => "final_cos_abs",
            Metric::FinalSinAbs => "final_sin_abs",
            Metric::FinalSinSquared => "final_sin_squared",
            Metric::MaxResidual => "max_residual",
            Metric::MaxNeglectedTerm => "max_neglected_term",
            Metric::MaxExcitedPopulation => "max_excited_population",
            Metric::VirtualRatio => "virtual_ratio",
        }
    }

    fn requires(self) -> &'static [Output] {
        match self {
            Metric::MaxPopulationError => &[Output::Comparison],
            Metric::Margin | Metric::StrictMargin => &[Output::Adiabaticity],
            Metric::FinalCosAbs | Metric::FinalSinAbs | Metric::FinalSinSquared => {
                &[Output::Components]
            }
            Metric::MaxResidual | Metric::MaxNeglectedTerm => &[Output::Trajectory],
            Metric::MaxExcitedPopulation | Metric::VirtualRatio => &[Output::Comparison],
        }
    }

    pub fn extract(self, b: &RunBundle) -> Option<f64> {
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let last_mixing = || {
            b.analytic
                .as_ref()
                .and_then(|a| a.snapshots.last())
                .map(|s| s.mixing)
        };
        match self {
            Metric::MaxPopulationError => b.comparison.as_ref().map(|c| c.max_population_error),
            Metric::Margin => b.adiabaticity.as_ref().map(|r| r.margin),
            Metric::StrictMargin => b.adiabaticity.as_ref().map(|r| r.strict_margin),
            Metric::FinalCosAbs => last_mixing().map(|m| m.cos_half.norm()),
            Metric::FinalSinAbs => last_mixing().map(|m| m.sin_half.norm()),
            Metric::FinalSinSquared => last_mixing().map(|m| m.sin_half.norm_sqr()),
            Metric::MaxResidual => b.residual.as_deref().map(max),
            Metric::MaxNeglectedTerm => b.neglected.as_deref().map(max),
            Metric::MaxExcitedPopulation => b.populations.as_ref().map(|p| p.max_excited),
            Metric::VirtualRatio => b.populations.as_ref().map(|p| p.ratio),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Scenario,
    /// Dotted path of a numeric scenario field, e.g. `pulse.envelope.width`.
    pub axis: String,
    pub values: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// Worker threads; `None` uses every core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep has no values".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("sweep value {v} is not finite")));
        }
        if self.metrics.is_empty() {
            return Err(Error::Config("sweep has no metrics".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be ≥ 1".into()));
        }
        // the axis must address an existing numeric field
        self.point(self.values[0]).map(|_| ())
    }

    /// Base scenario with the axis set to `value` and the outputs the metrics
    /// need switched on.
    pub fn point(&self, value: f64) -> Result<Scenario> {
        let mut s: Scenario =
            crate::config::with_override(&self.base, &self.axis, toml::Value::Float(value))?;
        for m in &self.metrics {
            s.outputs.extend(m.requires());
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub metrics: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: String,
    pub metrics: Vec<Metric>,
    pub points: Vec<SweepPoint>,
}

/// One scenario run per axis value, in parallel; results keep the input order
/// and a failing point is recorded rather than aborting the sweep.
pub fn run_sweep(sw: &SweepSpec) -> Result<SweepTable> {
    sw.validate()?;
    let eval = |&value: &f64| -> SweepPoint {
        match sw.point(value).and_then(|s| run_scenario(&s)) {
            Ok(b) => SweepPoint {
                value,
                metrics: sw.metrics.iter().map(|m| m.extract(&b)).collect(),
                error: None,
            },
            Err(e) => SweepPoint {
                value,
                metrics: vec![None; sw.metrics.len()],
                error: Some(e.to_string()),
            },
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = sw.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let points = pool.install(|| sw.values.par_iter().map(eval).collect());
    Ok(SweepTable {
        axis: sw.axis.clone(),
        metrics: sw.metrics.clone(),
        points,
    })
}
