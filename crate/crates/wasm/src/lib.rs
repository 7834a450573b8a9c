//! Browser bindings for the demo page in `www/`.
//!
//! Three operations: simulate one Gaussian pulse (analytic vs numerical
//! amplitudes plus the adiabaticity profile), the static mixing amplitudes
//! over a range of field strengths, and a scan of the adiabaticity margin and
//! analytic error over pulse widths.

use dressed_core::dressed::snapshot;
use dressed_core::scenarios::{run_scenario, GridSpec, InitialState, Numerics, Output, Scenario};
use dressed_core::{Envelope, Phase, PulseSpec, SystemParams};
use wasm_bindgen::prelude::*;

/// Gaussian pulse with optional linear chirp and decay, in units of Δω.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub peak: f64,
    pub width: f64,
    pub detuning: f64,
    pub chirp: f64,
    pub decay: f64,
    pub points: usize,
}

#[wasm_bindgen]
impl PulseParams {
    #[wasm_bindgen(constructor)]
    pub fn new(
        peak: f64,
        width: f64,
        detuning: f64,
        chirp: f64,
        decay: f64,
        points: usize,
    ) -> PulseParams {
        PulseParams {
            peak,
            width,
            detuning,
            chirp,
            decay,
            points,
        }
    }
}

fn scenario(p: &PulseParams, outputs: &[Output]) -> Result<Scenario, String> {
    let phase = if p.chirp == 0.0 {
        Phase::None
    } else {
        Phase::LinearChirp {
            rate: p.chirp,
            center: 0.0,
        }
    };
    let pulse = PulseSpec::new(
        Envelope::Gaussian {
            peak: p.peak,
            center: 0.0,
            width: p.width,
        },
        phase,
        p.detuning,
    )
    .map_err(|e| e.to_string())?;
    Ok(Scenario {
        name: "demo".into(),
        description: None,
        outputs: outputs.iter().copied().collect(),
        pulse,
        system: SystemParams::new(0.0, 100.0, p.decay, 0.0).map_err(|e| e.to_string())?,
        grid: GridSpec {
            start: None,
            end: None,
            points: p.points,
        },
        initial: InitialState::default(),
        numerics: Numerics {
            anchor_ratio: 1e-4,
            ..Numerics::default()
        },
    })
}

/// Time series of one run, as flat arrays for plotting.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub envelope: Vec<f64>,
    pub excited_analytic: Vec<f64>,
    pub excited_numerical: Vec<f64>,
    pub dressed_excited: Vec<f64>,
    pub virtual_ground: Vec<f64>,
    pub adiabaticity: Vec<f64>,
    pub margin: f64,
    pub max_population_error: f64,
}

pub fn simulate_pulse(p: &PulseParams) -> Result<Trajectory, String> {
    let s = scenario(p, &[Output::Comparison, Output::Adiabaticity])?;
    let b = run_scenario(&s).map_err(|e| e.to_string())?;
    let (Some(a), Some(o), Some(r), Some(c), Some(pops)) = (
        &b.analytic,
        &b.oracle,
        &b.adiabaticity,
        &b.comparison,
        &b.populations,
    ) else {
        return Err("incomplete run".into());
    };
    Ok(Trajectory {
        envelope: a.snapshots.iter().map(|s| s.rabi_field).collect(),
        excited_analytic: a.amplitudes.iter().map(|x| x[1].norm_sqr()).collect(),
        excited_numerical: o.amplitudes.iter().map(|x| x[1].norm_sqr()).collect(),
        dressed_excited: pops.excited.clone(),
        virtual_ground: pops.virtual_ground.clone(),
        adiabaticity: r.governing.clone(),
        margin: r.margin,
        max_population_error: c.max_population_error,
        t: b.grid,
    })
}

/// |cos(θ/2)|² and |sin(θ/2)|² of a static field over log-spaced Ω/|Δω|.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, PartialEq)]
pub struct MixingCurve {
    pub ratio: Vec<f64>,
    pub cos_squared: Vec<f64>,
    pub sin_squared: Vec<f64>,
}

pub fn mixing_curve(
    detuning: f64,
    decay: f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<MixingCurve, String> {
    if !(lo > 0.0 && hi > lo && points >= 2 && detuning != 0.0) {
        return Err("need 0 < lo < hi, at least 2 points and a nonzero detuning".into());
    }
    let sys = SystemParams::new(0.0, 100.0, decay, 0.0).map_err(|e| e.to_string())?;
    let mut curve = MixingCurve {
        ratio: Vec::new(),
        cos_squared: Vec::new(),
        sin_squared: Vec::new(),
    };
    for i in 0..points {
        let ratio = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
        let pulse =
            PulseSpec::constant(ratio * detuning.abs(), detuning).map_err(|e| e.to_string())?;
        let m = snapshot(&pulse, &sys, 0.0)
            .map_err(|e| e.to_string())?
            .mixing;
        curve.ratio.push(ratio);
        curve.cos_squared.push(m.cos_half.norm_sqr());
        curve.sin_squared.push(m.sin_half.norm_sqr());
    }
    Ok(curve)
}

/// Margin and analytic-vs-numerical population error for each pulse width.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, PartialEq)]
pub struct WidthScan {
    pub width: Vec<f64>,
    pub margin: Vec<f64>,
    pub error: Vec<f64>,
}

pub fn scan_widths(base: &PulseParams, widths: &[f64]) -> Result<WidthScan, String> {
    let mut scan = WidthScan {
        width: Vec::new(),
        margin: Vec::new(),
        error: Vec::new(),
    };
    for &width in widths {
        let p = PulseParams { width, ..*base };
        let b = run_scenario(&scenario(&p, &[Output::Comparison])?).map_err(|e| e.to_string())?;
        scan.width.push(width);
        scan.margin
            .push(b.adiabaticity.map_or(f64::NAN, |r| r.margin));
        scan.error
            .push(b.comparison.map_or(f64::NAN, |c| c.max_population_error));
    }
    Ok(scan)
}

#[wasm_bindgen]
pub fn simulate(p: &PulseParams) -> Result<Trajectory, JsValue> {
    simulate_pulse(p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mixing(
    detuning: f64,
    decay: f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<MixingCurve, JsValue> {
    mixing_curve(detuning, decay, lo, hi, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn width_scan(base: &PulseParams, widths: Vec<f64>) -> Result<WidthScan, JsValue> {
    scan_widths(base, &widths).map_err(|e| JsValue::from_str(&e))
}
