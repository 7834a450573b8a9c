//! Square-root branch continuation for complex quantities sampled along a
//! time grid.

use num_complex::Complex64;

/// Relative tolerance under which the two roots count as equidistant from the
/// previous value.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootChoice {
    pub value: Complex64,
    /// Both roots were (nearly) equidistant from the previous value; the
    /// first candidate was taken.
    pub ambiguous: bool,
}

/// Square root with Re ≥ 0; on the imaginary axis the root with Im ≥ 0.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// Picks the square root of `z` continuing from `prev`.
///
/// Without a previous value the principal root is returned. Otherwise the
/// root nearer to `prev` wins.
pub fn continued_sqrt(z: Complex64, prev: Option<Complex64>) -> RootChoice {
    let root = principal_sqrt(z);
    let Some(prev) = prev else {
        return RootChoice {
            value: root,
            ambiguous: false,
        };
    };
    // |r − p|² − |r + p|² = −4 Re(r·p̄)
    let alignment = (root * prev.conj()).re;
    let scale = root.norm() * prev.norm();
    let ambiguous = scale > 0.0 && alignment.abs() <= AMBIGUITY_TOLERANCE * scale;
    let value = if alignment >= 0.0 { root } else { -root };
    RootChoice { value, ambiguous }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn principal_branch_conventions() {
        assert_eq!(
            principal_sqrt(Complex64::new(4.0, 0.0)),
            Complex64::new(2.0, 0.0)
        );
        assert_eq!(
            principal_sqrt(Complex64::new(-4.0, 0.0)),
            Complex64::new(0.0, 2.0)
        );
        assert_eq!(
            principal_sqrt(Complex64::new(-4.0, -0.0)),
            Complex64::new(0.0, 2.0)
        );
    }

    #[test]
    fn continuation_follows_a_winding_path() {
        // z = e^{iθ} for θ from 0 to 4π: a continuous root is e^{iθ/2},
        // which ends at −1 after one full turn of z and back at +1 after two.
        let mut prev = None;
        let n = 400;
        for k in 0..=n {
            let theta = 4.0 * std::f64::consts::PI * k as f64 / n as f64;
            let z = Complex64::from_polar(1.0, theta);
            let r = continued_sqrt(z, prev);
            assert!(!r.ambiguous);
            let expected = Complex64::from_polar(1.0, theta / 2.0);
            assert!((r.value - expected).norm() < 1e-12, "θ = {theta}");
            prev = Some(r.value);
        }
    }

    #[test]
    fn perpendicular_previous_value_is_ambiguous() {
        let r = continued_sqrt(Complex64::new(1.0, 0.0), Some(Complex64::new(0.0, 1.0)));
        assert!(r.ambiguous);
    }

    proptest! {
        #[test]
        fn root_squares_back(re in -1e3f64..1e3, im in -1e3f64..1e3, pre in -1e3f64..1e3, pim in -1e3f64..1e3) {
            let z = Complex64::new(re, im);
            let r = continued_sqrt(z, Some(Complex64::new(pre, pim))).value;
            prop_assert!((r * r - z).norm() <= 1e-12 * z.norm().max(1.0));
        }
    }
}
