//! F(1/2, 1/2; 1; z) = (2/π)K(√z) through the arithmetic-geometric mean.

use crate::error::{Error, Result};

/// 1 / AGM(1, √(1−z)) for 0 ≤ z < 1.
pub fn elliptic_agm(z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "AGM oracle needs 0 <= z < 1, got {z}"
        )));
    }
    let (mut a, mut b) = (1.0f64, (1.0 - z).sqrt());
    // Quadratic convergence; the cap guards against a last-bit cycle.
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    Ok(1.0 / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        assert_eq!(elliptic_agm(0.0).unwrap(), 1.0);
        // K(1/√2) = Γ(1/4)² / (4√π).
        let gamma_quarter = 3.625_609_908_221_908_f64;
        let k = gamma_quarter * gamma_quarter / (4.0 * PI.sqrt());
        assert!((elliptic_agm(0.5).unwrap() - 2.0 * k / PI).abs() < 1e-15);
        assert!(elliptic_agm(1.0).is_err());
        assert!(elliptic_agm(-0.1).is_err());
    }
}
