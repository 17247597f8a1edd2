//! Reference solvers independent of the kernel formulas: a Fourier-mode ODE
//! integrator on a periodic box, a leapfrog finite-difference scheme, and the
//! radial reduction of the three-dimensional problem to one dimension, and an
//! AGM evaluation of the complete elliptic integral.

mod elliptic;
mod fd;
pub mod interp;
pub mod ode;

pub use elliptic::elliptic_agm;
pub use fd::{fd_solve_1d, FdConfig};
pub use interp::UniformGrid;
pub use ode::OdeTolerance;

use crate::cauchy::{CauchyData1D, Field1D, Source1D};
use crate::error::{Error, Result};
use crate::kernels::{phi, CurvedMass};
use crate::spherical::{CauchyDataND, FieldND};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Wave speed profile of the reference problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Speed {
    /// e^(−t), the expanding background.
    DeSitter,
    /// 1, flat space.
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// The periodic box is [−L, L).
    pub half_length: f64,
    /// Number of grid points, a power of two.
    pub modes: usize,
    pub rtol: f64,
    pub atol: f64,
    pub speed: Speed,
    /// Chebyshev nodes in time used to separate a non-separable source.
    pub source_nodes: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            half_length: 4.0,
            modes: 2048,
            rtol: 1e-10,
            atol: 1e-12,
            speed: Speed::DeSitter,
            source_nodes: 64,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self, support: f64, t_max: f64) -> Result<()> {
        if !self.modes.is_power_of_two() || self.modes < 16 {
            return Err(Error::Validation(format!(
                "mode count {} must be a power of two >= 16",
                self.modes
            )));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Validation(
                "integrator tolerances must be positive".into(),
            ));
        }
        let reach = match self.speed {
            Speed::DeSitter => phi(t_max),
            Speed::Flat => t_max,
        };
        if !(support + reach < self.half_length) {
            return Err(Error::Validation(format!(
                "box half-length {} too small for support {support} plus reach {reach}",
                self.half_length
            )));
        }
        Ok(())
    }

    fn dx(&self) -> f64 {
        2.0 * self.half_length / self.modes as f64
    }

    fn wavenumber(&self, k: usize) -> f64 {
        PI * k as f64 / self.half_length
    }
}

/// Fourier coefficients c_k, k = 0..N/2, of u(·,t) and u_t(·,t) at each
/// output time; u(x) = c₀ + 2 Re Σ_{k≥1} c_k e^(iξ_k x) with ξ_k = πk/L.
#[derive(Clone, Debug)]
pub struct SpectralSolution {
    pub config: SpectralConfig,
    pub times: Vec<f64>,
    coeffs: Vec<Vec<Complex64>>,
    rate_coeffs: Vec<Vec<Complex64>>,
    m: f64,
}

/// Coefficients c_k = (1/N) Σ_j u(x_j) e^(−iξ_k x_j), x_j = −L + j·dx.
fn transform(f: impl Fn(f64) -> f64, cfg: &SpectralConfig) -> Vec<Complex64> {
    let n = cfg.modes;
    let dx = cfg.dx();
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new(f(-cfg.half_length + j as f64 * dx), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    (0..n / 2)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            buf[k] * (sign / n as f64)
        })
        .collect()
}

/// Chebyshev points of the second kind on [a, b] with barycentric weights.
fn chebyshev(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let nodes = (0..n)
        .map(|j| {
            let c = (PI * j as f64 / (n - 1) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * c
        })
        .collect();
    let weights = (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * s
            } else {
                s
            }
        })
        .collect();
    (nodes, weights)
}

/// Lagrange basis values at t for the barycentric nodes.
fn lagrange_basis(t: f64, nodes: &[f64], weights: &[f64], out: &mut [f64]) {
    if let Some(j) = nodes.iter().position(|&x| x == t) {
        out.iter_mut().for_each(|o| *o = 0.0);
        out[j] = 1.0;
        return;
    }
    let mut den = 0.0;
    for ((o, &x), &w) in out.iter_mut().zip(nodes).zip(weights) {
        *o = w / (t - x);
        den += *o;
    }
    out.iter_mut().for_each(|o| *o /= den);
}

/// Source written as Σ_i g_i(x) h_i(t): spatial coefficients per term and a
/// routine filling the temporal factors.
struct SeparatedSource {
    spatial: Vec<Vec<Complex64>>,
    temporal: Box<dyn Fn(f64, &mut [f64]) + Send + Sync>,
}

fn separate(src: &Source1D, cfg: &SpectralConfig, t_max: f64) -> Option<SeparatedSource> {
    let [w0, w1] = src.window();
    let (a, b) = (w0.max(0.0), w1.min(t_max));
    if !(b > a) {
        return None;
    }
    if let Some((g, _)) = src.factors() {
        let spatial = vec![transform(g, cfg)];
        let s = src.clone();
        let temporal = Box::new(move |t: f64, out: &mut [f64]| {
            out[0] = s.factors().map_or(0.0, |(_, h)| h(t));
        });
        return Some(SeparatedSource { spatial, temporal });
    }
    let n = cfg.source_nodes.max(2);
    let (nodes, weights) = chebyshev(a, b, n);
    let spatial = nodes
        .iter()
        .map(|&tk| transform(|x| src.eval(x, tk), cfg))
        .collect();
    let temporal = Box::new(move |t: f64, out: &mut [f64]| {
        if t < a || t > b {
            out.iter_mut().for_each(|o| *o = 0.0);
        } else {
            lagrange_basis(t, &nodes, &weights, out);
        }
    });
    Some(SeparatedSource { spatial, temporal })
}

/// Solves û'' + (c(t)²ξ² + M²)û = f̂ for every Fourier mode of the periodic
/// box, with unit-data fundamental solutions and Duhamel terms integrated by
/// Dormand–Prince 5(4), and records the coefficients at `times`.
pub fn spectral_solve_1d(
    data: &CauchyData1D,
    mass: &CurvedMass,
    cfg: &SpectralConfig,
    times: &[f64],
) -> Result<SpectralSolution> {
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.first().is_none_or(|&t| t < 0.0) {
        return Err(Error::Validation(
            "output times must be increasing and >= 0".into(),
        ));
    }
    let t_max = *times.last().unwrap();
    cfg.validate(data.support(), t_max)?;
    let zeros = || vec![Complex64::new(0.0, 0.0); cfg.modes / 2];
    let c0 = data
        .phi0
        .as_ref()
        .map_or_else(zeros, |f| transform(|x| f.eval(x), cfg));
    let c1 = data
        .phi1
        .as_ref()
        .map_or_else(zeros, |f| transform(|x| f.eval(x), cfg));
    let source = data.f.as_ref().and_then(|s| separate(s, cfg, t_max));
    let n_src = source.as_ref().map_or(0, |s| s.spatial.len());
    tracing::debug!(
        modes = cfg.modes,
        half_length = cfg.half_length,
        t_max,
        source_terms = n_src,
        "spectral solve"
    );

    let amp = |k: usize| -> f64 {
        let mut a = c0[k].norm() + c1[k].norm();
        if let Some(s) = &source {
            a += s.spatial.iter().map(|g| g[k].norm()).sum::<f64>();
        }
        a
    };
    let peak = (0..cfg.modes / 2).map(amp).fold(0.0, f64::max);
    let m2 = mass.m() * mass.m();
    let tol = OdeTolerance {
        rtol: cfg.rtol,
        atol: cfg.atol,
        min_step: 1e-14,
    };
    let speed = cfg.speed;

    // Per mode: rows of (u, u_t) coefficient pairs at each output time.
    let per_mode: Vec<Vec<(Complex64, Complex64)>> = (0..cfg.modes / 2)
        .into_par_iter()
        .map(|k| -> Result<Vec<(Complex64, Complex64)>> {
            let zero = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            if amp(k) <= 1e-17 * peak {
                return Ok(vec![zero; times.len()]);
            }
            let xi2 = cfg.wavenumber(k).powi(2);
            let dim = 4 + 2 * n_src;
            let mut y0 = vec![0.0; dim];
            y0[0] = 1.0;
            y0[3] = 1.0;
            let mut h = vec![0.0; n_src];
            let rhs = |t: f64, y: &[f64], d: &mut [f64]| {
                let c2 = match speed {
                    Speed::DeSitter => (-2.0 * t).exp(),
                    Speed::Flat => 1.0,
                };
                let w2 = c2 * xi2 + m2;
                if let Some(s) = &source {
                    (s.temporal)(t, &mut h);
                }
                for p in 0..dim / 2 {
                    d[2 * p] = y[2 * p + 1];
                    d[2 * p + 1] = -w2 * y[2 * p] + if p >= 2 { h[p - 2] } else { 0.0 };
                }
            };
            let mut rows = vec![zero; times.len()];
            let mut emit = |j: usize, y: &[f64]| {
                let mut u = c0[k] * y[0] + c1[k] * y[2];
                let mut ut = c0[k] * y[1] + c1[k] * y[3];
                if let Some(s) = &source {
                    for (i, g) in s.spatial.iter().enumerate() {
                        u += g[k] * y[4 + 2 * i];
                        ut += g[k] * y[5 + 2 * i];
                    }
                }
                rows[j] = (u, ut);
            };
            let offset = usize::from(times[0] == 0.0);
            if offset == 1 {
                emit(0, &y0);
            }
            let rest = &times[offset..];
            if speed == Speed::Flat && n_src == 0 {
                // Constant coefficients: the unit-data solutions are explicit.
                let w = (xi2 + m2).sqrt();
                for (j, &t) in rest.iter().enumerate() {
                    let (s, c) = (w * t).sin_cos();
                    let sinc = if w * t == 0.0 { t } else { s / w };
                    emit(j + offset, &[c, -w * s, sinc, c]);
                }
                return Ok(rows);
            }
            ode::integrate(rhs, 0.0, &y0, rest, &tol, |j, y| emit(j + offset, y))?;
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let mut coeffs = vec![Vec::with_capacity(cfg.modes / 2); times.len()];
    let mut rate_coeffs = coeffs.clone();
    for rows in &per_mode {
        for (j, &(u, ut)) in rows.iter().enumerate() {
            coeffs[j].push(u);
            rate_coeffs[j].push(ut);
        }
    }
    Ok(SpectralSolution {
        config: *cfg,
        times: times.to_vec(),
        coeffs,
        rate_coeffs,
        m: mass.m(),
    })
}

fn synthesize(c: &[Complex64], cfg: &SpectralConfig, x: f64) -> f64 {
    let base = Complex64::from_polar(1.0, PI * x / cfg.half_length);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut sum = 0.0;
    for (k, ck) in c.iter().enumerate() {
        let term = (ck * phase).re;
        sum += if k == 0 { term } else { 2.0 * term };
        phase *= base;
        if k % 64 == 63 {
            phase /= phase.norm();
        }
    }
    sum
}

impl SpectralSolution {
    fn index(&self, j: usize) -> Result<usize> {
        if j < self.times.len() {
            Ok(j)
        } else {
            Err(Error::Validation(format!("time index {j} out of range")))
        }
    }

    /// u(x, times[j]) by summing the trigonometric series.
    pub fn eval(&self, x: f64, j: usize) -> Result<f64> {
        Ok(synthesize(&self.coeffs[self.index(j)?], &self.config, x))
    }

    /// u_t(x, times[j]).
    pub fn eval_rate(&self, x: f64, j: usize) -> Result<f64> {
        Ok(synthesize(
            &self.rate_coeffs[self.index(j)?],
            &self.config,
            x,
        ))
    }

    /// u(x_i, times[j]) on the box grid x_i = −L + i·dx by inverse FFT.
    pub fn grid_values(&self, j: usize) -> Result<Vec<f64>> {
        let c = &self.coeffs[self.index(j)?];
        let n = self.config.modes;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, ck) in c.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            buf[k] = ck * sign;
            if k > 0 {
                buf[n - k] = ck.conj() * sign;
            }
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        Ok(buf.iter().map(|v| v.re).collect())
    }

    /// x coordinates of `grid_values`.
    pub fn grid(&self) -> Vec<f64> {
        let dx = self.config.dx();
        (0..self.config.modes)
            .map(|i| -self.config.half_length + i as f64 * dx)
            .collect()
    }

    /// ∫(u_t² + c(t)²u_x² + M²u²) dx over the box, via Parseval.
    pub fn energy(&self, j: usize) -> Result<f64> {
        let j = self.index(j)?;
        let t = self.times[j];
        let c2 = match self.config.speed {
            Speed::DeSitter => (-2.0 * t).exp(),
            Speed::Flat => 1.0,
        };
        let m2 = self.m * self.m;
        let mut e = 0.0;
        for (k, (u, ut)) in self.coeffs[j].iter().zip(&self.rate_coeffs[j]).enumerate() {
            let xi2 = self.config.wavenumber(k).powi(2);
            let mult = if k == 0 { 1.0 } else { 2.0 };
            e += mult * (ut.norm_sqr() + (c2 * xi2 + m2) * u.norm_sqr());
        }
        Ok(2.0 * self.config.half_length * e)
    }

    /// For odd coefficient sets w(x) = 2 Σ b_k sin(ξ_k x), the value w(r)/r,
    /// including its limit at r = 0.
    fn odd_quotient(&self, r: f64, j: usize) -> Result<f64> {
        let c = &self.coeffs[self.index(j)?];
        let mut sum = 0.0;
        for (k, ck) in c.iter().enumerate().skip(1) {
            let xi = self.config.wavenumber(k);
            let s = xi * r;
            let sinc = if s.abs() < 1e-8 {
                1.0 - s * s / 6.0
            } else {
                s.sin() / s
            };
            // 2 Re(c_k e^{iξr}) with c_k = −i b_k.
            sum += -2.0 * ck.im * xi * sinc;
        }
        Ok(sum)
    }
}

/// Radially symmetric data in three dimensions: profiles in r ≥ 0.
#[derive(Clone, Debug, Default)]
pub struct RadialData {
    pub phi0: Option<Field1D>,
    pub phi1: Option<Field1D>,
    pub f: Option<Source1D>,
}

impl RadialData {
    /// Profiles of radial three-dimensional data, read off along the first axis.
    pub fn from_nd(data: &CauchyDataND) -> Result<Self> {
        let radial = data.phi0.as_ref().is_none_or(|f| f.is_radial())
            && data.phi1.as_ref().is_none_or(|f| f.is_radial())
            && data.f.as_ref().is_none_or(|f| f.is_radial());
        if data.n != 3 || !radial {
            return Err(Error::Validation(
                "radial reduction needs radial data in n = 3".into(),
            ));
        }
        let lift = |f: &Option<FieldND>| -> Result<Option<Field1D>> {
            f.as_ref()
                .map(|f| {
                    let f = f.clone();
                    Field1D::new(f.support(), move |r| f.eval(&[r.abs(), 0.0, 0.0]))
                })
                .transpose()
        };
        let f = match &data.f {
            Some(s) => Some(match s.factors() {
                Some((g, h)) => {
                    Source1D::separable(s.radius(), s.window(), move |r| g(r.abs()), move |b| h(b))?
                }
                None => {
                    let s = s.clone();
                    Source1D::new(s.radius(), s.window(), move |r, b| {
                        s.eval(&[r.abs(), 0.0, 0.0], b)
                    })?
                }
            }),
            None => None,
        };
        Ok(RadialData {
            phi0: lift(&data.phi0)?,
            phi1: lift(&data.phi1)?,
            f,
        })
    }
}

/// n = 3 radial solution u(r, t) obtained from w = r·u.
#[derive(Clone, Debug)]
pub struct RadialSolution {
    inner: SpectralSolution,
}

impl RadialSolution {
    pub fn times(&self) -> &[f64] {
        &self.inner.times
    }

    pub fn eval(&self, r: f64, j: usize) -> Result<f64> {
        self.inner.odd_quotient(r.abs(), j)
    }
}

fn odd_extension(f: &Field1D) -> Result<Field1D> {
    let f = f.clone();
    Field1D::new(f.support(), move |x| x * f.eval(x.abs()))
}

/// Solves the radial problem in three dimensions: w = r·u obeys the
/// one-dimensional equation with odd data r·φ(r) and source r·f(r,t).
pub fn radial_reduce_3d(
    data: &RadialData,
    mass: &CurvedMass,
    cfg: &SpectralConfig,
    times: &[f64],
) -> Result<RadialSolution> {
    let f = match &data.f {
        Some(src) => {
            let s = src.clone();
            Some(if src.factors().is_some() {
                let s2 = s.clone();
                Source1D::separable(
                    s.radius(),
                    s.window(),
                    move |x| x * s.factors().map_or(0.0, |(g, _)| g(x.abs())),
                    move |t| s2.factors().map_or(0.0, |(_, h)| h(t)),
                )?
            } else {
                Source1D::new(s.radius(), s.window(), move |x, t| x * s.eval(x.abs(), t))?
            })
        }
        None => None,
    };
    let odd = CauchyData1D {
        phi0: data.phi0.as_ref().map(odd_extension).transpose()?,
        phi1: data.phi1.as_ref().map(odd_extension).transpose()?,
        f,
    };
    Ok(RadialSolution {
        inner: spectral_solve_1d(&odd, mass, cfg, times)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: f64) -> f64 {
        if x.abs() < 1.0 {
            (1.0 / (x * x - 1.0)).exp()
        } else {
            0.0
        }
    }

    fn mass(m: f64) -> CurvedMass {
        CurvedMass::new(m).unwrap()
    }

    fn small() -> SpectralConfig {
        SpectralConfig {
            half_length: 3.0,
            modes: 512,
            ..SpectralConfig::default()
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let sol =
            spectral_solve_1d(&CauchyData1D::default(), &mass(1.0), &small(), &[0.5, 1.0]).unwrap();
        assert_eq!(sol.eval(0.3, 1).unwrap(), 0.0);
        assert!(sol.grid_values(0).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn transform_round_trip() {
        let data = CauchyData1D {
            phi0: Some(Field1D::new(1.0, bump).unwrap()),
            ..Default::default()
        };
        let cfg = SpectralConfig {
            modes: 2048,
            ..small()
        };
        let sol = spectral_solve_1d(&data, &mass(0.5), &cfg, &[0.0]).unwrap();
        for x in [-0.7, 0.0, 0.33] {
            assert!((sol.eval(x, 0).unwrap() - bump(x)).abs() < 1e-12);
        }
        let grid = sol.grid();
        let vals = sol.grid_values(0).unwrap();
        for (x, v) in grid.iter().zip(vals) {
            assert!((v - bump(*x)).abs() < 1e-12);
        }
    }

    #[test]
    fn short_time_single_mode() {
        // φ₀ = cos(ξ₀x) under a wide envelope; frozen-coefficient limit.
        let cfg = SpectralConfig {
            half_length: 100.0,
            modes: 256,
            ..SpectralConfig::default()
        };
        let xi = cfg.wavenumber(64);
        let data = CauchyData1D {
            phi0: Some(
                Field1D::new(50.0, move |x| (xi * x).cos() * bump(x / 50.0) / bump(0.0)).unwrap(),
            ),
            ..Default::default()
        };
        let t = 1e-3;
        let sol = spectral_solve_1d(&data, &mass(1.0), &cfg, &[t]).unwrap();
        let approx = ((xi * xi + 1.0).sqrt() * t).cos();
        let v = sol.eval(0.0, 0).unwrap();
        assert!((v - approx).abs() < 1e-5, "{v} vs {approx}");
    }

    #[test]
    fn energy_is_non_increasing() {
        let data = CauchyData1D {
            phi0: Some(Field1D::new(1.0, bump).unwrap()),
            phi1: Some(Field1D::new(1.0, |x| -x * bump(x)).unwrap()),
            f: None,
        };
        let times: Vec<f64> = (0..=10).map(|k| 0.3 * k as f64).collect();
        let sol = spectral_solve_1d(&data, &mass(0.8), &small(), &times).unwrap();
        let e: Vec<f64> = (0..times.len()).map(|j| sol.energy(j).unwrap()).collect();
        for w in e.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-6), "{e:?}");
        }
        assert!(e[10] < e[0]);
    }

    #[test]
    fn radial_constant_datum_solves_ode() {
        // Constant datum on a ball larger than the domain of dependence.
        let cfg = SpectralConfig {
            half_length: 8.0,
            modes: 2048,
            ..SpectralConfig::default()
        };
        let m = 1.3;
        let smooth = RadialData {
            phi0: Some(Field1D::new(6.0, smooth_step).unwrap()),
            ..Default::default()
        };
        let sol = radial_reduce_3d(&smooth, &mass(m), &cfg, &[1.0]).unwrap();
        for r in [0.0, 0.5, 1.0] {
            let v = sol.eval(r, 0).unwrap();
            assert!((v - (m * 1.0f64).cos()).abs() < 1e-8, "r={r}: {v}");
        }
    }

    /// 1 on [0,3], smooth decay to 0 at 6.
    fn smooth_step(r: f64) -> f64 {
        if r <= 3.0 {
            1.0
        } else if r >= 6.0 {
            0.0
        } else {
            let s = (r - 3.0) / 3.0;
            let a = (-1.0 / s).exp();
            let b = (-1.0 / (1.0 - s)).exp();
            b / (a + b)
        }
    }

    #[test]
    fn radial_matches_flat_kirchhoff() {
        // Flat space, M = 0, φ₁ radial: u(0,t) = t φ₁(t).
        let cfg = SpectralConfig {
            half_length: 2.0,
            modes: 4096,
            speed: Speed::Flat,
            ..SpectralConfig::default()
        };
        let shell = |r: f64| bump((r - 0.5) / 0.1);
        let data = RadialData {
            phi1: Some(Field1D::new(0.6, shell).unwrap()),
            ..Default::default()
        };
        let times = [0.45, 0.5, 1.0];
        let sol = radial_reduce_3d(&data, &mass(0.0), &cfg, &times).unwrap();
        for (j, &t) in times.iter().enumerate() {
            let v = sol.eval(0.0, j).unwrap();
            assert!(
                (v - t * shell(t)).abs() < 1e-9,
                "t={t}: {v} vs {}",
                t * shell(t)
            );
        }
    }

    #[test]
    fn rejects_small_box() {
        let data = CauchyData1D {
            phi0: Some(Field1D::new(2.5, bump).unwrap()),
            ..Default::default()
        };
        assert!(matches!(
            spectral_solve_1d(&data, &mass(1.0), &small(), &[1.0]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn source_duhamel_matches_separable_and_general_paths() {
        let g = |x: f64| bump(x / 0.5);
        let h = |t: f64| bump((t - 0.5) / 0.5);
        let sep = CauchyData1D {
            f: Some(Source1D::separable(0.5, [0.0, 1.0], g, h).unwrap()),
            ..Default::default()
        };
        let gen = CauchyData1D {
            f: Some(Source1D::new(0.5, [0.0, 1.0], move |x, t| g(x) * h(t)).unwrap()),
            ..Default::default()
        };
        let cfg = SpectralConfig {
            modes: 256,
            source_nodes: 64,
            ..small()
        };
        let a = spectral_solve_1d(&sep, &mass(0.5), &cfg, &[2.0]).unwrap();
        let b = spectral_solve_1d(&gen, &mass(0.5), &cfg, &[2.0]).unwrap();
        let (ua, ub) = (a.eval(0.1, 0).unwrap(), b.eval(0.1, 0).unwrap());
        assert!(ua.abs() > 1e-3);
        assert!((ua - ub).abs() < 1e-4 * ua.abs(), "{ua} vs {ub}");
    }
}
