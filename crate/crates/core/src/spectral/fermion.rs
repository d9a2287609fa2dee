//! Free-fermion propagation amplitude on a line.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const MAX_SITE: i64 = 10_000;
const MAX_NODES: usize = 1 << 22;

/// `A(x, t) = ∫₀^{2π} dk/2π · exp(2it cos k) · exp(ikx)`.
///
/// The integrand is smooth and periodic, so the trapezoid rule converges
/// geometrically once the node count exceeds `|x| + 2t`; the count is
/// doubled until two rules agree.
pub fn fermion_amplitude(x: i64, t: f64) -> Result<Complex64> {
    if x.abs() > MAX_SITE {
        return Err(invalid(format!("site {x} outside ±{MAX_SITE}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("time must be finite and non-negative, got {t}")));
    }
    let rule = |nodes: usize| -> Complex64 {
        let h = 2.0 * PI / nodes as f64;
        let sum: Complex64 = (0..nodes)
            .map(|j| {
                let k = j as f64 * h;
                Complex64::from_polar(1.0, 2.0 * t * k.cos() + k * x as f64)
            })
            .sum();
        sum / nodes as f64
    };
    let mut nodes = ((x.unsigned_abs() as f64 + 2.0 * t + 32.0) as usize).next_power_of_two();
    let mut prev = rule(nodes);
    while nodes < MAX_NODES {
        nodes *= 2;
        let next = rule(nodes);
        if (next - prev).norm() <= 1e-14 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Accuracy(format!("quadrature for A({x}, {t}) did not settle within {MAX_NODES} nodes")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_at_time_zero() {
        assert!((fermion_amplitude(0, 0.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for x in [1, 2, -3, 17] {
            assert!(fermion_amplitude(x, 0.0).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn bessel_magnitude_and_phase() {
        // J_3(2)
        let a = fermion_amplitude(3, 1.0).unwrap();
        assert!((a.norm() - 0.128_943_249_474_402_05).abs() < 1e-12);
        // i^3 J_3(2) is purely imaginary with negative sign.
        assert!(a.re.abs() < 1e-14 && a.im < 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fermion_amplitude(MAX_SITE + 1, 1.0).is_err());
        assert!(fermion_amplitude(0, -1.0).is_err());
        assert!(fermion_amplitude(0, f64::NAN).is_err());
    }
}
