//! Driving field: envelope Ω(t), phase φ(t) and their time derivatives.
//!
//! Every pulse family provides closed-form derivatives of the Rabi envelope up
//! to 4th order, of the phase up to 4th order, and of the log-derivative
//! L(t) = Ω⁻¹∂ₜΩ up to 3rd order. That is exactly what the generalized
//! adiabaticity ratios with n ≤ 3 and the chain rule for ∂ₜΩ̃′ consume.
//!
//! For the analytic families the envelope derivatives are assembled from the
//! L-derivatives through ∂ₜΩ = LΩ, ∂ₜ²Ω = (L′ + L²)Ω, ...; for sampled
//! envelopes the direction is reversed and L is derived from the spline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Default ratio ε_Ω/Ω_peak below which log-derivatives are refused.
pub const DEFAULT_FLOOR_RATIO: f64 = 1e-12;

/// Half-width of the default simulation window, in units of τ.
pub const DEFAULT_WINDOW_WIDTHS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Envelope {
    /// Ω(t) = peak.
    Constant { peak: f64 },
    /// Ω(t) = peak·exp(−(t−center)²/width²).
    Gaussian { peak: f64, center: f64, width: f64 },
    /// Ω(t) = peak·sech((t−center)/width).
    Sech { peak: f64, center: f64, width: f64 },
    /// Ω(t) = peak·(1 + tanh((t−center)/width))/2, a constant field switched on smoothly.
    SmoothOn { peak: f64, center: f64, width: f64 },
    /// Cubic-spline fit of sampled Ω values. Lower trust: third derivative is
    /// piecewise constant and the fourth vanishes between knots.
    Sampled { samples: CubicSpline },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Phase {
    #[default]
    None,
    /// φ(t) = (rate/2)(t−center)², so ∂ₜφ = rate·(t−center).
    LinearChirp { rate: f64, center: f64 },
    /// φ(t) = Σₖ coefficients[k]·(t−center)ᵏ.
    Polynomial { center: f64, coefficients: Vec<f64> },
    /// Cubic-spline fit of sampled phase values (lower trust).
    Sampled { samples: CubicSpline },
}

/// How much the derivative contract can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trust {
    Analytic,
    SplineFit,
}

fn default_floor_ratio() -> f64 {
    DEFAULT_FLOOR_RATIO
}

/// Drive field definition: envelope family, phase family and the zero-field
/// detuning Δω = ω₂ − ω₁ − ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub envelope: Envelope,
    #[serde(default)]
    pub phase: Phase,
    pub detuning: f64,
    /// Envelope floor as a fraction of the peak Rabi frequency.
    #[serde(default = "default_floor_ratio")]
    pub floor_ratio: f64,
}

/// All field quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub t: f64,
    /// Zero-field detuning Δω, carried along for convenience.
    pub detuning: f64,
    /// Ω, ∂ₜΩ, …, ∂ₜ⁴Ω.
    pub envelope: [f64; 5],
    /// φ, ∂ₜφ, …, ∂ₜ⁴φ.
    pub phase: [f64; 5],
    /// L = Ω⁻¹∂ₜΩ, ∂ₜL, ∂ₜ²L, ∂ₜ³L.
    pub log_derivative: [f64; 4],
    pub trust: Trust,
}

impl FieldSample {
    pub fn rabi(&self) -> f64 {
        self.envelope[0]
    }

    /// ΔΦ = Δω·t − φ(t).
    pub fn phase_mismatch(&self) -> f64 {
        self.detuning * self.t - self.phase[0]
    }
}

impl PulseSpec {
    pub fn new(envelope: Envelope, phase: Phase, detuning: f64) -> Result<Self> {
        let pulse = Self {
            envelope,
            phase,
            detuning,
            floor_ratio: DEFAULT_FLOOR_RATIO,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn constant(peak: f64, detuning: f64) -> Result<Self> {
        Self::new(Envelope::Constant { peak }, Phase::None, detuning)
    }

    pub fn gaussian(peak: f64, center: f64, width: f64, detuning: f64) -> Result<Self> {
        Self::new(
            Envelope::Gaussian {
                peak,
                center,
                width,
            },
            Phase::None,
            detuning,
        )
    }

    pub fn with_phase(mut self, phase: Phase) -> Result<Self> {
        self.phase = phase;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.detuning.is_finite() {
            return Err(Error::InvalidPulse("detuning must be finite".into()));
        }
        if !(self.floor_ratio.is_finite() && self.floor_ratio > 0.0 && self.floor_ratio < 1.0) {
            return Err(Error::InvalidPulse(format!(
                "floor_ratio must lie in (0, 1), got {}",
                self.floor_ratio
            )));
        }
        match &self.envelope {
            Envelope::Constant { peak } => check_peak(*peak)?,
            Envelope::Gaussian {
                peak,
                center,
                width,
            }
            | Envelope::Sech {
                peak,
                center,
                width,
            }
            | Envelope::SmoothOn {
                peak,
                center,
                width,
            } => {
                check_peak(*peak)?;
                if !center.is_finite() {
                    return Err(Error::InvalidPulse("center must be finite".into()));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::InvalidPulse(format!(
                        "width τ must be > 0 for pulsed envelopes, got {width}"
                    )));
                }
            }
            Envelope::Sampled { samples } => {
                if samples.values().iter().any(|v| *v < 0.0) {
                    return Err(Error::InvalidPulse(
                        "sampled envelope values must be non-negative".into(),
                    ));
                }
            }
        }
        match &self.phase {
            Phase::None | Phase::Sampled { .. } => {}
            Phase::LinearChirp { rate, center } => {
                if !(rate.is_finite() && center.is_finite()) {
                    return Err(Error::InvalidPulse(
                        "chirp parameters must be finite".into(),
                    ));
                }
            }
            Phase::Polynomial {
                center,
                coefficients,
            } => {
                if !center.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidPulse(
                        "polynomial phase parameters must be finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        match &self.envelope {
            Envelope::Constant { peak }
            | Envelope::Gaussian { peak, .. }
            | Envelope::Sech { peak, .. }
            | Envelope::SmoothOn { peak, .. } => *peak,
            Envelope::Sampled { samples } => samples.values().iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Characteristic width τ, if the family has one.
    pub fn width(&self) -> Option<f64> {
        match &self.envelope {
            Envelope::Gaussian { width, .. }
            | Envelope::Sech { width, .. }
            | Envelope::SmoothOn { width, .. } => Some(*width),
            _ => None,
        }
    }

    pub fn trust(&self) -> Trust {
        let sampled = matches!(self.envelope, Envelope::Sampled { .. })
            || matches!(self.phase, Phase::Sampled { .. });
        if sampled {
            Trust::SplineFit
        } else {
            Trust::Analytic
        }
    }

    /// Absolute envelope floor ε_Ω.
    pub fn floor(&self) -> f64 {
        self.floor_ratio * self.peak()
    }

    /// Ω and its first four derivatives. Always available (no floor check).
    pub fn envelope_derivatives(&self, t: f64) -> [f64; 5] {
        match &self.envelope {
            Envelope::Constant { peak } => [*peak, 0.0, 0.0, 0.0, 0.0],
            Envelope::Gaussian {
                peak,
                center,
                width,
            } => {
                let u = (t - center) / width;
                let omega = peak * (-u * u).exp();
                envelope_from_log(omega, gaussian_log(u, *width))
            }
            Envelope::Sech {
                peak,
                center,
                width,
            } => {
                let u = (t - center) / width;
                let omega = peak / u.cosh();
                envelope_from_log(omega, sech_log(u, *width))
            }
            Envelope::SmoothOn {
                peak,
                center,
                width,
            } => {
                let u = (t - center) / width;
                let omega = peak / (1.0 + (-2.0 * u).exp());
                envelope_from_log(omega, smooth_on_log(u, *width))
            }
            Envelope::Sampled { samples } => {
                let [v, d1, d2, d3] = samples.eval(t);
                [v, d1, d2, d3, 0.0]
            }
        }
    }

    /// φ and its first four derivatives.
    pub fn phase_derivatives(&self, t: f64) -> [f64; 5] {
        match &self.phase {
            Phase::None => [0.0; 5],
            Phase::LinearChirp { rate, center } => {
                let s = t - center;
                [0.5 * rate * s * s, rate * s, *rate, 0.0, 0.0]
            }
            Phase::Polynomial {
                center,
                coefficients,
            } => polynomial_derivatives(coefficients, t - center),
            Phase::Sampled { samples } => {
                let [v, d1, d2, d3] = samples.eval(t);
                [v, d1, d2, d3, 0.0]
            }
        }
    }

    /// L = Ω⁻¹∂ₜΩ and its first three derivatives.
    ///
    /// Fails with [`Error::EnvelopeUnderflow`] when Ω(t) is below the floor.
    pub fn log_derivatives(&self, t: f64) -> Result<[f64; 4]> {
        let omega = self.envelope_derivatives(t);
        let floor = self.floor();
        if !(omega[0] > 0.0 && omega[0] >= floor) {
            return Err(Error::EnvelopeUnderflow {
                t,
                value: omega[0],
                floor,
            });
        }
        Ok(match &self.envelope {
            Envelope::Constant { .. } => [0.0; 4],
            Envelope::Gaussian { center, width, .. } => gaussian_log((t - center) / width, *width),
            Envelope::Sech { center, width, .. } => sech_log((t - center) / width, *width),
            Envelope::SmoothOn { center, width, .. } => smooth_on_log((t - center) / width, *width),
            Envelope::Sampled { .. } => log_from_envelope(&omega),
        })
    }

    /// Interval on which Ω(t) ≥ ratio·Ω_peak; `±∞` marks a side on which the
    /// envelope does not decay.
    pub fn support(&self, ratio: f64) -> (f64, f64) {
        match &self.envelope {
            Envelope::Constant { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Envelope::Gaussian { center, width, .. } => {
                let half = width * (1.0 / ratio).ln().sqrt();
                (center - half, center + half)
            }
            Envelope::Sech { center, width, .. } => {
                let half = width * (1.0 / ratio).acosh();
                (center - half, center + half)
            }
            Envelope::SmoothOn { center, width, .. } => {
                // (1 + tanh u)/2 = ratio
                let u = 0.5 * (ratio / (1.0 - ratio)).ln();
                (center + width * u, f64::INFINITY)
            }
            Envelope::Sampled { samples } => {
                let threshold = ratio * self.peak();
                let n = 4096;
                let (a, b) = (samples.start(), samples.end());
                let ts = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64);
                let inside: Vec<f64> = ts.filter(|&t| samples.eval(t)[0] >= threshold).collect();
                match (inside.first(), inside.last()) {
                    (Some(&lo), Some(&hi)) => (lo, hi),
                    _ => (a, a),
                }
            }
        }
    }

    /// Default simulation window: |t − t₀| ≤ 5τ for pulsed families.
    pub fn default_window(&self) -> Option<(f64, f64)> {
        match &self.envelope {
            Envelope::Gaussian { center, width, .. }
            | Envelope::Sech { center, width, .. }
            | Envelope::SmoothOn { center, width, .. } => Some((
                center - DEFAULT_WINDOW_WIDTHS * width,
                center + DEFAULT_WINDOW_WIDTHS * width,
            )),
            Envelope::Sampled { samples } => Some((samples.start(), samples.end())),
            Envelope::Constant { .. } => None,
        }
    }
}

fn check_peak(peak: f64) -> Result<()> {
    if peak.is_finite() && peak >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPulse(format!(
            "peak Rabi frequency must be ≥ 0, got {peak}"
        )))
    }
}

/// Samples every field quantity at `t`.
pub fn sample(pulse: &PulseSpec, t: f64) -> Result<FieldSample> {
    Ok(FieldSample {
        t,
        detuning: pulse.detuning,
        envelope: pulse.envelope_derivatives(t),
        phase: pulse.phase_derivatives(t),
        log_derivative: pulse.log_derivatives(t)?,
        trust: pulse.trust(),
    })
}

fn gaussian_log(u: f64, width: f64) -> [f64; 4] {
    [-2.0 * u / width, -2.0 / (width * width), 0.0, 0.0]
}

fn sech_log(u: f64, width: f64) -> [f64; 4] {
    let th = u.tanh();
    let s2 = 1.0 / (u.cosh() * u.cosh());
    [
        -th / width,
        -s2 / width.powi(2),
        2.0 * s2 * th / width.powi(3),
        2.0 * s2 * (s2 - 2.0 * th * th) / width.powi(4),
    ]
}

fn smooth_on_log(u: f64, width: f64) -> [f64; 4] {
    // L = (1 − tanh u)/τ; higher derivatives coincide with the sech family.
    let mut out = sech_log(u, width);
    out[0] = 2.0 / (width * (1.0 + (2.0 * u).exp()));
    out
}

/// ∂ₜⁿΩ from Ω and the L-derivatives.
fn envelope_from_log(omega: f64, l: [f64; 4]) -> [f64; 5] {
    let [l0, l1, l2, l3] = l;
    [
        omega,
        l0 * omega,
        (l1 + l0 * l0) * omega,
        (l2 + 3.0 * l0 * l1 + l0.powi(3)) * omega,
        (l3 + 4.0 * l0 * l2 + 3.0 * l1 * l1 + 6.0 * l0 * l0 * l1 + l0.powi(4)) * omega,
    ]
}

/// Inverse of [`envelope_from_log`]; requires Ω ≠ 0.
fn log_from_envelope(w: &[f64; 5]) -> [f64; 4] {
    let l0 = w[1] / w[0];
    let l1 = w[2] / w[0] - l0 * l0;
    let l2 = w[3] / w[0] - 3.0 * l0 * l1 - l0.powi(3);
    let l3 = w[4] / w[0] - 4.0 * l0 * l2 - 3.0 * l1 * l1 - 6.0 * l0 * l0 * l1 - l0.powi(4);
    [l0, l1, l2, l3]
}

fn polynomial_derivatives(coefficients: &[f64], s: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (order, slot) in out.iter_mut().enumerate() {
        // Horner on the `order`-th derivative.
        let mut acc = 0.0;
        for k in (order..coefficients.len()).rev() {
            let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
            acc = acc * s + coefficients[k] * falling;
        }
        *slot = acc;
    }
    out
}

/// Which field quantity a derivative check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldQuantity {
    Envelope,
    Phase,
    LogDerivative,
}

/// Compares every analytic derivative of order `order` against a 5-point
/// central difference of the order-below derivative, at the interior points
/// of `grid` with the local grid spacing as step.
///
/// The deviation of each quantity is measured relative to the peak magnitude
/// of its analytic derivative over the grid (absolute when that peak is zero).
/// Returns the worst value over Ω, φ and L. Points where L is below the
/// envelope floor are skipped.
pub fn verify_derivatives(pulse: &PulseSpec, grid: &[f64], order: usize) -> f64 {
    assert!((1..=4).contains(&order), "derivative order must be 1..=4");
    if grid.len() < 3 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for quantity in [
        FieldQuantity::Envelope,
        FieldQuantity::Phase,
        FieldQuantity::LogDerivative,
    ] {
        if quantity == FieldQuantity::LogDerivative && order > 3 {
            continue;
        }
        let eval = |t: f64, n: usize| -> Option<f64> {
            match quantity {
                FieldQuantity::Envelope => Some(pulse.envelope_derivatives(t)[n]),
                FieldQuantity::Phase => Some(pulse.phase_derivatives(t)[n]),
                FieldQuantity::LogDerivative => pulse.log_derivatives(t).ok().map(|l| l[n]),
            }
        };
        let mut scale: f64 = 0.0;
        let mut max_dev: f64 = 0.0;
        for i in 1..grid.len() - 1 {
            let t = grid[i];
            let h = grid[i + 1] - grid[i];
            let stencil = [t - 2.0 * h, t - h, t + h, t + 2.0 * h].map(|x| eval(x, order - 1));
            let (Some(exact), [Some(m2), Some(m1), Some(p1), Some(p2)]) = (eval(t, order), stencil)
            else {
                continue;
            };
            let fd = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
            scale = scale.max(exact.abs());
            max_dev = max_dev.max((exact - fd).abs());
        }
        let dev = if scale > 0.0 {
            max_dev / scale
        } else {
            max_dev
        };
        worst = worst.max(dev);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn constant_family_has_zero_derivatives() {
        let p = PulseSpec::constant(1.0, 0.3).unwrap();
        let s = sample(&p, 17.0).unwrap();
        assert_eq!(s.envelope, [1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.phase, [0.0; 5]);
        assert_eq!(s.log_derivative, [0.0; 4]);
    }

    #[test]
    fn gaussian_at_center() {
        let tau = 3.0;
        let p = PulseSpec::gaussian(2.0, 1.0, tau, 0.0).unwrap();
        let s = sample(&p, 1.0).unwrap();
        assert_eq!(s.envelope[0], 2.0);
        assert_eq!(s.envelope[1], 0.0);
        assert_eq!(s.log_derivative[0], 0.0);
        assert!((s.log_derivative[1] + 2.0 / (tau * tau)).abs() < 1e-15);
    }

    #[test]
    fn gaussian_second_derivative_by_hand() {
        // Ω'' = Ω·(4u² − 2)/τ² with u = (t − t0)/τ
        let (peak, t0, tau) = (1.5, -2.0, 4.0);
        let p = PulseSpec::gaussian(peak, t0, tau, 0.0).unwrap();
        let t = 1.3;
        let u = (t - t0) / tau;
        let omega = peak * (-u * u).exp();
        let expected = omega * (4.0 * u * u - 2.0) / (tau * tau);
        assert!((p.envelope_derivatives(t)[2] - expected).abs() < 1e-15);
    }

    #[test]
    fn linear_chirp_derivatives() {
        let beta = 0.7;
        let p = PulseSpec::constant(1.0, 0.0)
            .unwrap()
            .with_phase(Phase::LinearChirp {
                rate: beta,
                center: 2.0,
            })
            .unwrap();
        let d = p.phase_derivatives(3.0);
        assert_eq!(d[1], beta);
        assert_eq!(d[2], beta);
        assert_eq!(d[3], 0.0);
    }

    #[test]
    fn polynomial_phase_matches_direct_expansion() {
        let p = PulseSpec::constant(1.0, 0.0)
            .unwrap()
            .with_phase(Phase::Polynomial {
                center: 1.0,
                coefficients: vec![0.5, -1.0, 2.0, 0.25, -0.125],
            })
            .unwrap();
        let s: f64 = 0.8;
        let d = p.phase_derivatives(1.0 + s);
        let expect = [
            0.5 - s + 2.0 * s * s + 0.25 * s.powi(3) - 0.125 * s.powi(4),
            -1.0 + 4.0 * s + 0.75 * s * s - 0.5 * s.powi(3),
            4.0 + 1.5 * s - 1.5 * s * s,
            1.5 - 3.0 * s,
            -3.0,
        ];
        for (a, b) in d.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn verify_derivatives_constant_is_zero() {
        let p = PulseSpec::constant(1.0, 0.0).unwrap();
        for order in 1..=4 {
            assert_eq!(verify_derivatives(&p, &grid(0.0, 10.0, 11), order), 0.0);
        }
    }

    #[test]
    fn verify_derivatives_all_analytic_families() {
        let tau = 10.0;
        let chirp = Phase::LinearChirp {
            rate: 0.01,
            center: 0.0,
        };
        let envelopes = [
            Envelope::Gaussian {
                peak: 1.0,
                center: 0.0,
                width: tau,
            },
            Envelope::Sech {
                peak: 1.0,
                center: 0.0,
                width: tau,
            },
            Envelope::SmoothOn {
                peak: 1.0,
                center: 0.0,
                width: tau,
            },
        ];
        let g = grid(-5.0 * tau, 5.0 * tau, 10_001); // step 1e-3·τ
        for env in envelopes {
            let p = PulseSpec::new(env.clone(), chirp.clone(), 0.5).unwrap();
            for order in 1..=4 {
                let dev = verify_derivatives(&p, &g, order);
                assert!(dev < 1e-6, "{env:?} order {order}: {dev:e}");
            }
        }
    }

    #[test]
    fn envelopes_are_symmetric() {
        for env in [
            Envelope::Gaussian {
                peak: 1.3,
                center: 2.0,
                width: 0.7,
            },
            Envelope::Sech {
                peak: 1.3,
                center: 2.0,
                width: 0.7,
            },
        ] {
            let p = PulseSpec::new(env, Phase::None, 0.0).unwrap();
            for s in [0.1, 0.5, 1.7, 3.3] {
                assert_eq!(
                    p.envelope_derivatives(2.0 + s)[0],
                    p.envelope_derivatives(2.0 - s)[0]
                );
            }
        }
    }

    #[test]
    fn log_derivative_is_ratio() {
        let p = PulseSpec::new(
            Envelope::Sech {
                peak: 2.0,
                center: 0.0,
                width: 1.5,
            },
            Phase::None,
            0.0,
        )
        .unwrap();
        for t in [-4.0, -0.3, 0.0, 2.2] {
            let w = p.envelope_derivatives(t);
            let l = p.log_derivatives(t).unwrap();
            assert!((l[0] - w[1] / w[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn smooth_on_tail_is_stable() {
        let p = PulseSpec::new(
            Envelope::SmoothOn {
                peak: 1.0,
                center: 0.0,
                width: 1.0,
            },
            Phase::None,
            0.0,
        )
        .unwrap();
        let l = p.log_derivatives(-10.0).unwrap();
        assert!((l[0] - 2.0).abs() < 1e-8);
        let l = p.log_derivatives(40.0).unwrap();
        assert!(l[0] >= 0.0 && l[0] < 1e-30);
    }

    #[test]
    fn underflow_is_reported() {
        let p = PulseSpec::gaussian(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            p.log_derivatives(10.0),
            Err(Error::EnvelopeUnderflow { .. })
        ));
        assert!(p.log_derivatives(5.0).is_ok());
        let zero = PulseSpec::gaussian(0.0, 0.0, 1.0, 0.0).unwrap();
        assert!(zero.log_derivatives(0.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(PulseSpec::gaussian(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(PulseSpec::gaussian(1.0, 0.0, -2.0, 0.0).is_err());
        assert!(PulseSpec::gaussian(-1.0, 0.0, 1.0, 0.0).is_err());
        assert!(PulseSpec::constant(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn support_matches_threshold() {
        let ratio = 1e-6;
        for env in [
            Envelope::Gaussian {
                peak: 2.0,
                center: 1.0,
                width: 3.0,
            },
            Envelope::Sech {
                peak: 2.0,
                center: 1.0,
                width: 3.0,
            },
            Envelope::SmoothOn {
                peak: 2.0,
                center: 1.0,
                width: 3.0,
            },
        ] {
            let p = PulseSpec::new(env, Phase::None, 0.0).unwrap();
            let (lo, _) = p.support(ratio);
            let w = p.envelope_derivatives(lo)[0];
            assert!((w / (ratio * 2.0) - 1.0).abs() < 1e-9, "{w}");
        }
    }

    #[test]
    fn sampled_envelope_reproduces_smooth_data() {
        let times = grid(-6.0, 6.0, 241);
        let values: Vec<f64> = times.iter().map(|t| (-t * t / 4.0).exp()).collect();
        let env = Envelope::Sampled {
            samples: CubicSpline::new(times, values).unwrap(),
        };
        let p = PulseSpec::new(env, Phase::None, 1.0).unwrap();
        assert_eq!(p.trust(), Trust::SplineFit);
        let l = p.log_derivatives(1.0).unwrap();
        assert!((l[0] + 0.5).abs() < 1e-3, "{l:?}");
        assert!((l[1] + 0.5).abs() < 1e-2, "{l:?}");
    }
}
