//! Generalized adiabatic condition.
//!
//! For g(t) = ∂ₜφ − iΩ⁻¹∂ₜΩ the condition asks, for n = 0, 1, … and
//! k = 0, …, n+1,
//!
//! ```text
//! |∂ₜⁿ g| ≪ |Δω − iγ/2|^{n+1−k} · |Ω|^k
//! ```
//!
//! Each (n, k) pair is reported as the ratio of the two sides. The k-th bound
//! lets detuning be traded for field strength, so for each derivative order
//! the governing ratio is the smallest over k; the reported `margin` is the
//! worst of those over n and t. `strict_margin` keeps the maximum over every
//! pair as well.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::dressed::SystemParams;
use crate::error::{Error, Result};
use crate::field::{sample, FieldSample, PulseSpec, Trust};
use crate::output::format_float;

pub const DEFAULT_MAX_ORDER: usize = 3;
pub const DEFAULT_MAX_POWER: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticityReport {
    pub grid: Vec<f64>,
    /// Ratio series for each (n, k).
    pub ratios: BTreeMap<(usize, usize), Vec<f64>>,
    /// Per point: max over n of (min over k of the ratio).
    pub governing: Vec<f64>,
    /// max over t of `governing`.
    pub margin: f64,
    /// max over every stored ratio.
    pub strict_margin: f64,
    /// |Ω⁻¹∂ₜΩ| / |Δω − iγ|.
    pub standard: Vec<f64>,
    /// |∂ₜΩ/Ω²|.
    pub born_fock: Vec<f64>,
    /// Grid indices where the envelope is below the floor; all ratios there
    /// are +∞.
    pub underflow: Vec<usize>,
}

impl AdiabaticityReport {
    pub fn ratio(&self, n: usize, k: usize) -> Option<&[f64]> {
        self.ratios.get(&(n, k)).map(Vec::as_slice)
    }

    /// Peak of one ratio series over the grid.
    pub fn peak(&self, n: usize, k: usize) -> Option<f64> {
        self.ratio(n, k)
            .map(|r| r.iter().copied().fold(0.0, f64::max))
    }

    /// CSV with columns t, ratio(n,k)…, governing, standard, born_fock.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(self.ratios.keys().map(|(n, k)| format!("ratio_n{n}_k{k}")));
        header.extend(["governing", "standard", "born_fock"].map(String::from));
        let io = |e: csv::Error| Error::Io {
            path: "adiabaticity.csv".into(),
            message: e.to_string(),
        };
        w.write_record(&header).map_err(io)?;
        for (i, t) in self.grid.iter().enumerate() {
            let mut row = vec![format_float(*t)];
            row.extend(self.ratios.values().map(|r| format_float(r[i])));
            row.push(format_float(self.governing[i]));
            row.push(format_float(self.standard[i]));
            row.push(format_float(self.born_fock[i]));
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "adiabaticity.csv".into(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }
}

/// |Δω − iγ/2| with γ = γ′ − iγ″.
fn detuning_scale(detuning: f64, sys: &SystemParams) -> f64 {
    (detuning - 0.5 * sys.gamma_shift).hypot(0.5 * sys.gamma_decay)
}

/// a/b with 0/0 = 0 (both sides vanish: the condition holds trivially).
fn ratio(numerator: f64, denominator: f64) -> f64 {
    if numerator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

/// |∂ₜⁿg| for n = 0..=3 from the analytic field derivatives.
fn analytic_lhs(field: &FieldSample) -> [f64; 4] {
    let (p, l) = (&field.phase, &field.log_derivative);
    std::array::from_fn(|n| p[n + 1].hypot(l[n]))
}

/// |∂ₜⁿg| for a spline-fitted field: g itself from the spline, its
/// derivatives by 5-point stencils of matching order.
fn sampled_lhs(pulse: &PulseSpec, t: f64, h: f64) -> Result<[f64; 4]> {
    let g = |s: f64| -> Result<(f64, f64)> {
        let f = sample(pulse, s)?;
        Ok((f.phase[1], -f.log_derivative[0]))
    };
    let v: Vec<(f64, f64)> = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|k| g(t + k * h))
        .collect::<Result<_>>()?;
    let stencil = |c: [f64; 5], scale: f64| {
        let re: f64 = c.iter().zip(&v).map(|(c, v)| c * v.0).sum::<f64>() / scale;
        let im: f64 = c.iter().zip(&v).map(|(c, v)| c * v.1).sum::<f64>() / scale;
        re.hypot(im)
    };
    Ok([
        v[2].0.hypot(v[2].1),
        stencil([1.0, -8.0, 0.0, 8.0, -1.0], 12.0 * h),
        stencil([-1.0, 16.0, -30.0, 16.0, -1.0], 12.0 * h * h),
        stencil([-1.0, 2.0, 0.0, -2.0, 1.0], 2.0 * h * h * h),
    ])
}

fn local_spacing(grid: &[f64], i: usize) -> f64 {
    let left = if i > 0 {
        grid[i] - grid[i - 1]
    } else {
        f64::INFINITY
    };
    let right = if i + 1 < grid.len() {
        grid[i + 1] - grid[i]
    } else {
        f64::INFINITY
    };
    let h = left.min(right);
    if h.is_finite() {
        h
    } else {
        1e-3
    }
}

/// Evaluates every (n, k) ratio with 0 ≤ n ≤ `n_max` ≤ 3 and
/// 0 ≤ k ≤ min(n+1, `k_max`).
pub fn evaluate(
    pulse: &PulseSpec,
    sys: &SystemParams,
    grid: &[f64],
    n_max: usize,
    k_max: usize,
) -> Result<AdiabaticityReport> {
    crate::dressed::validate_grid(grid)?;
    if n_max > 3 {
        return Err(Error::Config(format!(
            "derivative order n_max = {n_max} exceeds the supported maximum 3"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..=n_max)
        .flat_map(|n| (0..=(n + 1).min(k_max)).map(move |k| (n, k)))
        .collect();
    let mut ratios: BTreeMap<(usize, usize), Vec<f64>> = pairs
        .iter()
        .map(|&p| (p, Vec::with_capacity(grid.len())))
        .collect();
    let mut governing = Vec::with_capacity(grid.len());
    let mut standard = Vec::with_capacity(grid.len());
    let mut born_fock = Vec::with_capacity(grid.len());
    let mut underflow = Vec::new();

    for (i, &t) in grid.iter().enumerate() {
        let field = match sample(pulse, t) {
            Ok(f) => f,
            Err(Error::EnvelopeUnderflow { .. }) => {
                underflow.push(i);
                for r in ratios.values_mut() {
                    r.push(f64::INFINITY);
                }
                governing.push(f64::INFINITY);
                standard.push(f64::INFINITY);
                born_fock.push(f64::INFINITY);
                continue;
            }
            Err(e) => return Err(e.at_index(i)),
        };
        let lhs = match field.trust {
            Trust::Analytic => analytic_lhs(&field),
            Trust::SplineFit => {
                sampled_lhs(pulse, t, local_spacing(grid, i)).map_err(|e| e.at_index(i))?
            }
        };
        let scale = detuning_scale(field.detuning, sys);
        let omega = field.rabi();

        let mut worst = 0.0_f64;
        for n in 0..=n_max {
            let mut best = f64::INFINITY;
            for k in 0..=(n + 1).min(k_max) {
                let bound = scale.powi((n + 1 - k) as i32) * omega.powi(k as i32);
                let r = ratio(lhs[n], bound);
                ratios.get_mut(&(n, k)).expect("pair registered").push(r);
                best = best.min(r);
            }
            worst = worst.max(best);
        }
        governing.push(worst);

        let log = field.log_derivative[0].abs();
        let full_scale = (field.detuning - sys.gamma_shift).hypot(sys.gamma_decay);
        standard.push(ratio(log, full_scale));
        born_fock.push(ratio(field.envelope[1].abs(), omega * omega));
    }

    let max_of = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let margin = max_of(&governing);
    let strict_margin = ratios.values().map(|r| max_of(r)).fold(0.0, f64::max);
    Ok(AdiabaticityReport {
        grid: grid.to_vec(),
        ratios,
        governing,
        margin,
        strict_margin,
        standard,
        born_fock,
        underflow,
    })
}

/// |Ω⁻¹∂ₜΩ| / |Δω − iγ| per grid point (+∞ below the envelope floor).
pub fn standard_condition(pulse: &PulseSpec, sys: &SystemParams, grid: &[f64]) -> Result<Vec<f64>> {
    Ok(evaluate(pulse, sys, grid, 0, 0)?.standard)
}

/// |∂ₜΩ⁻¹| = |∂ₜΩ/Ω²| per grid point (+∞ below the envelope floor).
pub fn born_fock_condition(pulse: &PulseSpec, grid: &[f64]) -> Result<Vec<f64>> {
    // the system only enters the detuning scale, which this ratio ignores
    let sys = SystemParams::undamped(1.0);
    Ok(evaluate(pulse, &sys, grid, 0, 0)?.born_fock)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Envelope, Phase};
    use crate::spline::CubicSpline;
    use proptest::prelude::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn constant_field_is_perfectly_adiabatic() {
        let pulse = PulseSpec::constant(0.4, 1.0).unwrap();
        let r = evaluate(
            &pulse,
            &SystemParams::undamped(5.0),
            &grid(0.0, 10.0, 11),
            3,
            2,
        )
        .unwrap();
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.strict_margin, 0.0);
        assert!(r.standard.iter().chain(&r.born_fock).all(|&v| v == 0.0));
        assert_eq!(r.ratios.len(), 2 + 3 + 3 + 3);
    }

    #[test]
    fn full_k_range_is_available() {
        let pulse = PulseSpec::constant(0.4, 1.0).unwrap();
        let r = evaluate(&pulse, &SystemParams::undamped(5.0), &[0.0, 1.0], 3, 4).unwrap();
        assert!(r.ratio(3, 4).is_some());
        assert_eq!(r.ratios.len(), 2 + 3 + 4 + 5);
    }

    #[test]
    fn deep_adiabatic_gaussian() {
        let tau = 100.0;
        let pulse = PulseSpec::gaussian(0.1, 0.0, tau, 1.0).unwrap();
        let (a, b) = pulse.support(1e-6);
        let r = evaluate(
            &pulse,
            &SystemParams::undamped(10.0),
            &grid(a, b, 2001),
            3,
            2,
        )
        .unwrap();
        assert!(r.margin < 0.1, "{}", r.margin);
        // worst (0,0) point sits at the clipped edge: 2|t|/τ² with |t| = τ√ln 10⁶
        let expected = 2.0 * tau * (1e6f64).ln().sqrt() / (tau * tau);
        assert!((r.peak(0, 0).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn halving_width_doubles_the_leading_ratio() {
        let sys = SystemParams::undamped(10.0);
        let peak_for = |tau: f64| {
            let pulse = PulseSpec::gaussian(0.1, 0.0, tau, 1.0).unwrap();
            let g: Vec<f64> = grid(-2.0, 2.0, 401).iter().map(|x| x * tau).collect();
            evaluate(&pulse, &sys, &g, 0, 0)
                .unwrap()
                .peak(0, 0)
                .unwrap()
        };
        let ratio = peak_for(50.0) / peak_for(100.0);
        assert!((ratio - 2.0).abs() < 1e-12, "{ratio}");
    }

    #[test]
    fn special_cases_reduce_from_the_general_family() {
        let pulse = PulseSpec::new(
            Envelope::Sech {
                peak: 0.3,
                center: 1.0,
                width: 7.0,
            },
            Phase::None,
            0.8,
        )
        .unwrap();
        let sys = SystemParams::undamped(10.0);
        let g = grid(-20.0, 20.0, 81);
        let r = evaluate(&pulse, &sys, &g, 3, 2).unwrap();
        for i in 0..g.len() {
            assert!((r.ratios[&(0, 0)][i] - r.standard[i]).abs() <= 1e-15 * r.standard[i].max(1.0));
            assert!(
                (r.ratios[&(0, 1)][i] - r.born_fock[i]).abs() <= 1e-15 * r.born_fock[i].max(1.0)
            );
        }
    }

    #[test]
    fn standard_condition_uses_the_full_damping() {
        let pulse = PulseSpec::gaussian(0.3, 0.0, 5.0, 0.0).unwrap();
        let sys = SystemParams::new(0.0, 10.0, 0.4, 0.0).unwrap();
        let s = standard_condition(&pulse, &sys, &[2.0]).unwrap()[0];
        // |L| = 2·2/25, |Δω − iγ| = 0.4
        assert!((s - 0.16 / 0.4).abs() < 1e-15);
        let general = evaluate(&pulse, &sys, &[2.0], 0, 0).unwrap().ratios[&(0, 0)][0];
        assert!((general - 0.16 / 0.2).abs() < 1e-15);
        assert_eq!(standard_condition(&pulse, &sys, &[0.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn born_fock_gaussian_closed_form() {
        let (peak, tau) = (0.5, 4.0);
        let pulse = PulseSpec::gaussian(peak, 0.0, tau, 1.0).unwrap();
        let ts = [-3.0, -0.5, 0.0, 1.2, 5.0];
        let bf = born_fock_condition(&pulse, &ts).unwrap();
        for (t, v) in ts.iter().zip(&bf) {
            let expected = (2.0 * t / (tau * tau)).abs() * (t * t / (tau * tau)).exp() / peak;
            assert!((v - expected).abs() <= 1e-14 * expected.max(1.0));
            // finite-difference check of ∂ₜ(1/Ω)
            let h = 1e-5;
            let inv = |s: f64| 1.0 / (peak * (-(s * s) / (tau * tau)).exp());
            let fd = ((inv(t + h) - inv(t - h)) / (2.0 * h)).abs();
            assert!((fd - v).abs() < 1e-7 * v.max(1.0));
        }
    }

    #[test]
    fn underflow_points_are_flagged_infinite() {
        let pulse = PulseSpec::gaussian(1.0, 0.0, 1.0, 1.0).unwrap();
        let r = evaluate(&pulse, &SystemParams::undamped(4.0), &[0.0, 8.0], 3, 2).unwrap();
        assert_eq!(r.underflow, vec![1]);
        assert!(r.margin.is_infinite());
        assert!(r.governing[0].is_finite());
    }

    #[test]
    fn sampled_field_matches_analytic_family() {
        let tau = 20.0;
        let analytic = PulseSpec::new(
            Envelope::Gaussian {
                peak: 0.2,
                center: 0.0,
                width: tau,
            },
            Phase::LinearChirp {
                rate: 0.001,
                center: 0.0,
            },
            1.0,
        )
        .unwrap();
        let times = grid(-60.0, 60.0, 1201);
        let env: Vec<f64> = times
            .iter()
            .map(|t| 0.2 * (-(t * t) / (tau * tau)).exp())
            .collect();
        let phase: Vec<f64> = times.iter().map(|t| 0.5 * 0.001 * t * t).collect();
        let sampled = PulseSpec::new(
            Envelope::Sampled {
                samples: CubicSpline::new(times.clone(), env).unwrap(),
            },
            Phase::Sampled {
                samples: CubicSpline::new(times, phase).unwrap(),
            },
            1.0,
        )
        .unwrap();
        let sys = SystemParams::undamped(10.0);
        let g = grid(-30.0, 30.0, 121);
        let a = evaluate(&analytic, &sys, &g, 3, 2).unwrap();
        let s = evaluate(&sampled, &sys, &g, 3, 2).unwrap();
        for n in 0..=1 {
            let (pa, ps) = (a.peak(n, 0).unwrap(), s.peak(n, 0).unwrap());
            assert!((pa - ps).abs() < 1e-2 * pa, "n = {n}: {pa} vs {ps}");
        }
    }

    #[test]
    fn csv_has_one_column_per_ratio() {
        let pulse = PulseSpec::gaussian(0.3, 0.0, 5.0, 1.0).unwrap();
        let r = evaluate(
            &pulse,
            &SystemParams::undamped(4.0),
            &grid(-1.0, 1.0, 3),
            1,
            2,
        )
        .unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "t,ratio_n0_k0,ratio_n0_k1,ratio_n1_k0,ratio_n1_k1,ratio_n1_k2,governing,standard,born_fock"
        );
        assert_eq!(text.lines().count(), 4);
    }

    proptest! {
        #[test]
        fn ratios_are_nonnegative_and_margins_consistent(
            peak in 0.01f64..5.0,
            tau in 1.0f64..50.0,
            detuning in -5.0f64..5.0,
            rate in -0.1f64..0.1,
            decay in 0.0f64..1.0,
        ) {
            let pulse = PulseSpec::gaussian(peak, 0.0, tau, detuning)
                .unwrap()
                .with_phase(Phase::LinearChirp { rate, center: 0.0 })
                .unwrap();
            let sys = SystemParams::new(0.0, 20.0, decay, 0.0).unwrap();
            let g: Vec<f64> = grid(-2.0, 2.0, 21).iter().map(|x| x * tau).collect();
            let r = evaluate(&pulse, &sys, &g, 3, 2).unwrap();
            let all_max = r.ratios.values().flatten().copied().fold(0.0, f64::max);
            prop_assert!(r.ratios.values().flatten().all(|&v| v >= 0.0));
            prop_assert_eq!(r.strict_margin, all_max);
            prop_assert!(r.margin <= r.strict_margin);
        }

        #[test]
        fn born_fock_scales_inversely_with_peak(c in 0.1f64..10.0, t in -3.0f64..3.0) {
            let a = born_fock_condition(&PulseSpec::gaussian(1.0, 0.0, 2.0, 1.0).unwrap(), &[t]).unwrap()[0];
            let b = born_fock_condition(&PulseSpec::gaussian(c, 0.0, 2.0, 1.0).unwrap(), &[t]).unwrap()[0];
            prop_assert!((b * c - a).abs() <= 1e-12 * a.max(1e-300));
        }
    }
}
