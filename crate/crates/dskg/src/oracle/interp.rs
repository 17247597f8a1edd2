//! Local barycentric interpolation on uniform grids.

use crate::error::{Error, Result};

/// Interpolation degree used for grid comparisons.
pub const DEGREE: usize = 6;

/// Values on x₀ + j·dx, j = 0..len.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid<'a> {
    pub x0: f64,
    pub dx: f64,
    pub values: &'a [f64],
}

fn binomial_weights(d: usize) -> Vec<f64> {
    let mut w = vec![1.0; d + 1];
    for j in 1..=d {
        w[j] = -w[j - 1] * (d + 1 - j) as f64 / j as f64;
    }
    w
}

impl UniformGrid<'_> {
    /// Degree-`DEGREE` barycentric interpolant through the nearest nodes.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        let n = self.values.len();
        if n <= DEGREE {
            return Err(Error::Validation(format!(
                "grid of {n} nodes too short to interpolate"
            )));
        }
        let s = (x - self.x0) / self.dx;
        if !(s >= -1e-9 && s <= (n - 1) as f64 + 1e-9) {
            return Err(Error::Domain(format!("x = {x} outside the grid")));
        }
        let start = ((s - DEGREE as f64 / 2.0).round().max(0.0) as usize).min(n - 1 - DEGREE);
        let w = binomial_weights(DEGREE);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            let d = s - (start + j) as f64;
            if d == 0.0 {
                return Ok(self.values[start + j]);
            }
            let c = wj / d;
            num += c * self.values[start + j];
            den += c;
        }
        Ok(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials() {
        let vals: Vec<f64> = (0..20).map(|j| (0.1 * j as f64).powi(5) - 3.0).collect();
        let g = UniformGrid {
            x0: 0.0,
            dx: 0.1,
            values: &vals,
        };
        for x in [0.0, 0.05, 0.77, 1.9, 1.88] {
            assert!((g.interpolate(x).unwrap() - (x.powi(5) - 3.0)).abs() < 1e-12);
        }
        assert!(g.interpolate(2.5).is_err());
    }

    #[test]
    fn smooth_function_accuracy() {
        let dx = 0.02;
        let vals: Vec<f64> = (0..200).map(|j| (j as f64 * dx).sin()).collect();
        let g = UniformGrid {
            x0: 0.0,
            dx,
            values: &vals,
        };
        let e = (g.interpolate(1.2345).unwrap() - 1.2345f64.sin()).abs();
        assert!(e < 1e-13);
    }
}
