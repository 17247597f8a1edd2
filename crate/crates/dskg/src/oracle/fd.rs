//! Second-order leapfrog for u_tt − e^(−2t)u_xx + M²u = f on a periodic box.

use super::interp::UniformGrid;
use crate::cauchy::CauchyData1D;
use crate::error::{Error, Result};
use crate::kernels::{phi, CurvedMass};
use serde::{Deserialize, Serialize};

/// Largest admissible dt/dx (the wave speed is at most 1 for t ≥ 0).
pub const MAX_CFL: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// The periodic box is [−L, L).
    pub half_length: f64,
    pub dx: f64,
    pub dt: f64,
}

impl FdConfig {
    /// Configuration with dt = cfl·dx.
    pub fn with_cfl(half_length: f64, dx: f64, cfl: f64) -> Self {
        FdConfig {
            half_length,
            dx,
            dt: cfl * dx,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dx > 0.0 && self.dt > 0.0 && self.half_length > 0.0) {
            return Err(Error::Validation(format!("bad grid {self:?}")));
        }
        if self.dt > MAX_CFL * self.dx * (1.0 + 1e-12) {
            return Err(Error::CflViolation {
                dt: self.dt,
                dx: self.dx,
                factor: MAX_CFL,
            });
        }
        Ok(())
    }
}

/// Samples u(x_i, t_j) with x_i = x₀ + i·dx.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub x0: f64,
    pub dx: f64,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl GridSolution {
    pub fn xs(&self) -> Vec<f64> {
        let n = self.values.first().map_or(0, Vec::len);
        (0..n).map(|i| self.x0 + i as f64 * self.dx).collect()
    }

    /// u(x, times[j]) by local barycentric interpolation.
    pub fn interpolate(&self, x: f64, j: usize) -> Result<f64> {
        let row = self
            .values
            .get(j)
            .ok_or_else(|| Error::Validation(format!("time index {j} out of range")))?;
        UniformGrid {
            x0: self.x0,
            dx: self.dx,
            values: row,
        }
        .interpolate(x)
    }
}

/// Leapfrog solution recorded at `times`, each of which must be a multiple
/// of cfg.dt.
pub fn fd_solve_1d(
    data: &CauchyData1D,
    mass: &CurvedMass,
    cfg: &FdConfig,
    times: &[f64],
) -> Result<GridSolution> {
    cfg.validate()?;
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if !(data.support() + phi(t_max) < cfg.half_length) {
        return Err(Error::Validation(
            "box too small for the dependence domain".into(),
        ));
    }
    let mut targets = Vec::with_capacity(times.len());
    for &t in times {
        let s = t / cfg.dt;
        if !(t >= 0.0) || (s - s.round()).abs() > 1e-6 {
            return Err(Error::Validation(format!(
                "output time {t} is not a multiple of dt = {}",
                cfg.dt
            )));
        }
        targets.push(s.round() as usize);
    }
    let n = (2.0 * cfg.half_length / cfg.dx).round() as usize;
    let dx = 2.0 * cfg.half_length / n as f64;
    let dt = cfg.dt;
    let xs: Vec<f64> = (0..n).map(|i| -cfg.half_length + i as f64 * dx).collect();
    let m2 = mass.m() * mass.m();
    let field = |f: &Option<crate::cauchy::Field1D>| -> Vec<f64> {
        xs.iter()
            .map(|&x| f.as_ref().map_or(0.0, |f| f.eval(x)))
            .collect()
    };
    let source = |t: f64| -> Vec<f64> {
        xs.iter()
            .map(|&x| data.f.as_ref().map_or(0.0, |f| f.eval(x, t)))
            .collect()
    };
    // Acceleration e^(−2t)u_xx − M²u + f.
    let accel = |u: &[f64], t: f64, f: &[f64], out: &mut [f64]| {
        let c2 = (-2.0 * t).exp() / (dx * dx);
        for i in 0..n {
            let (l, r) = (u[(i + n - 1) % n], u[(i + 1) % n]);
            out[i] = c2 * (l - 2.0 * u[i] + r) - m2 * u[i] + f[i];
        }
    };

    let u0 = field(&data.phi0);
    let v0 = field(&data.phi1);
    let mut a = vec![0.0; n];
    accel(&u0, 0.0, &source(0.0), &mut a);
    let mut prev = u0.clone();
    let mut cur: Vec<f64> = (0..n)
        .map(|i| u0[i] + dt * v0[i] + 0.5 * dt * dt * a[i])
        .collect();
    let last = targets.iter().copied().max().unwrap_or(0);
    let mut values = vec![Vec::new(); times.len()];
    let mut record = |step: usize, u: &[f64]| {
        for (j, &s) in targets.iter().enumerate() {
            if s == step {
                values[j] = u.to_vec();
            }
        }
    };
    record(0, &prev);
    if last >= 1 {
        record(1, &cur);
    }
    let mut next = vec![0.0; n];
    for step in 1..last {
        let t = step as f64 * dt;
        accel(&cur, t, &source(t), &mut a);
        for i in 0..n {
            next[i] = 2.0 * cur[i] - prev[i] + dt * dt * a[i];
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        record(step + 1, &cur);
    }
    Ok(GridSolution {
        x0: -cfg.half_length,
        dx,
        times: times.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::Field1D;
    use crate::oracle::{spectral_solve_1d, SpectralConfig};

    fn bump(x: f64) -> f64 {
        if x.abs() < 1.0 {
            (1.0 / (x * x - 1.0)).exp()
        } else {
            0.0
        }
    }

    fn data() -> CauchyData1D {
        CauchyData1D {
            phi0: Some(Field1D::new(1.0, bump).unwrap()),
            phi1: Some(Field1D::new(1.0, |x| x * bump(x)).unwrap()),
            f: None,
        }
    }

    #[test]
    fn cfl_is_enforced() {
        let cfg = FdConfig {
            half_length: 3.0,
            dx: 0.01,
            dt: 0.0095,
        };
        assert!(matches!(cfg.validate(), Err(Error::CflViolation { .. })));
    }

    #[test]
    fn zero_data_gives_zero() {
        let cfg = FdConfig::with_cfl(3.0, 0.01, 0.5);
        let sol = fd_solve_1d(
            &CauchyData1D::default(),
            &CurvedMass::new(1.0).unwrap(),
            &cfg,
            &[0.5],
        )
        .unwrap();
        assert!(sol.values[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn second_order_against_spectral() {
        let m = CurvedMass::new(1.0).unwrap();
        let t = 1.0;
        let spec = spectral_solve_1d(
            &data(),
            &m,
            &SpectralConfig {
                half_length: 3.0,
                modes: 1024,
                ..SpectralConfig::default()
            },
            &[t],
        )
        .unwrap();
        let exact = spec.eval(0.3, 0).unwrap();
        let mut errs = vec![];
        for dx in [0.01, 0.005, 0.0025] {
            let cfg = FdConfig::with_cfl(3.0, dx, 0.5);
            let sol = fd_solve_1d(&data(), &m, &cfg, &[t]).unwrap();
            errs.push((sol.interpolate(0.3, 0).unwrap() - exact).abs());
        }
        let ratio = errs[1] / errs[2];
        assert!((3.5..4.5).contains(&ratio), "{errs:?}");
        assert!(errs[2] < 1e-4);
    }

    #[test]
    fn stays_inside_dependence_domain() {
        let m = CurvedMass::new(0.5).unwrap();
        let cfg = FdConfig::with_cfl(3.0, 0.005, 0.5);
        let t = 2.0;
        let sol = fd_solve_1d(&data(), &m, &cfg, &[t]).unwrap();
        let edge = 1.0 + phi(t) + 0.05;
        let outside: f64 = sol
            .xs()
            .iter()
            .zip(&sol.values[0])
            .filter(|(x, _)| x.abs() > edge)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        assert!(outside < 1e-6, "{outside}");
    }
}
