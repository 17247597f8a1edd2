//! Lq norms of computed solutions, the decay envelopes they are measured
//! against, and numerical bound checks for the kernel integrals behind them.
//! The envelopes carry an unknown constant; everything here reports the
//! fitted constant Ĉ rather than asserting a value for it.

use crate::cauchy::{solve_1d, CauchyData1D, Field1D, Source1D};
use crate::error::{Error, Result};
use crate::hypergeom::gauss_2f1_real;
use crate::kernels::{evaluate_k0, phi, CurvedMass};
use crate::quad::{adaptive_gl, QuadratureSpec};
use crate::spherical::{solve_homogeneous_nd, solve_source_nd, CauchyDataND, FieldND, SourceND};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub rho: f64,
    pub times: Vec<f64>,
    /// Samples per dimension of the norm grid.
    pub grid_points: usize,
    /// Composite Gauss–Legendre panels for the kernel integrals.
    pub panels: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            p: 2.0,
            q: 2.0,
            s: 0.0,
            rho: 1.0,
            times: (1..=10).map(|k| 0.5 * k as f64).collect(),
            grid_points: 4096,
            panels: 16,
        }
    }
}

impl EstimateConfig {
    /// Checks 1 < p ≤ 2, 1/p + 1/q = 1, ρ ∈ [1, 2) with 1/q = 1/p − 1 + 1/ρ,
    /// s ≥ 0 and the grid sizes. For n ≥ 2 also the admissibility window
    /// (n+1)/2·(1/p − 1/q) ≤ 2s ≤ n(1/p − 1/q) < 2s + 1 and s = 0.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if !(self.p > 1.0 && self.p <= 2.0) {
            return bad(format!("p = {} must lie in (1, 2]", self.p));
        }
        if !((1.0 / self.p + 1.0 / self.q - 1.0).abs() < 1e-12) {
            return bad(format!(
                "p = {} and q = {} are not conjugate",
                self.p, self.q
            ));
        }
        if !(self.rho >= 1.0 && self.rho < 2.0) {
            return bad(format!("rho = {} must lie in [1, 2)", self.rho));
        }
        let gap = 1.0 / self.p - 1.0 / self.q;
        if !((gap - (1.0 - 1.0 / self.rho)).abs() < 1e-12) {
            return bad(format!(
                "rho = {} is inconsistent with 1/q = 1/p - 1/rho' (expected {})",
                self.rho,
                1.0 / (1.0 - gap)
            ));
        }
        if !(self.s >= 0.0) {
            return bad(format!("s = {} must be >= 0", self.s));
        }
        if self.grid_points < 16 || self.panels == 0 {
            return bad("norm grid needs >= 16 points and >= 1 panel".into());
        }
        if self.times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return bad("sample times must be positive".into());
        }
        if n >= 2 {
            if self.s != 0.0 {
                return bad("only s = 0 is measured in n >= 2".into());
            }
            let nf = n as f64;
            let ok = 0.5 * (nf + 1.0) * gap <= 2.0 * self.s + 1e-12
                && 2.0 * self.s <= nf * gap + 1e-12
                && nf * gap < 2.0 * self.s + 1.0;
            if !ok {
                return bad(format!(
                    "(p, q, s) = ({}, {}, {}) outside the admissible window",
                    self.p, self.q, self.s
                ));
            }
        }
        Ok(())
    }

    /// 2s − n(1/p − 1/q).
    pub fn weight_exponent(&self, n: usize) -> f64 {
        2.0 * self.s - n as f64 * (1.0 / self.p - 1.0 / self.q)
    }
}

/// One sample of a decay sweep: the measured norm, the envelope with unit
/// constant, and their ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    pub t: f64,
    pub lhs_norm: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// Ĉ and the bounded-ratio diagnostics of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySummary {
    pub c_hat: f64,
    /// max ratio / min ratio.
    pub spread: f64,
    /// max ratio / first ratio.
    pub growth: f64,
    /// Last three ratios strictly increasing, each by more than 1%.
    pub diverging_tail: bool,
}

impl DecaySummary {
    pub fn from_records(records: &[DecayRecord]) -> Self {
        let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let first = ratios.first().copied().unwrap_or(0.0);
        let diverging_tail = ratios.len() >= 3
            && ratios[ratios.len() - 3..]
                .windows(2)
                .all(|w| w[1] > 1.01 * w[0]);
        DecaySummary {
            c_hat: max,
            spread: if min > 0.0 { max / min } else { f64::INFINITY },
            growth: if first > 0.0 {
                max / first
            } else {
                f64::INFINITY
            },
            diverging_tail,
        }
    }

    /// Ratios vary by at most `factor` and do not run away at the end.
    pub fn bounded(&self, factor: f64) -> bool {
        self.spread <= factor && !self.diverging_tail
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_infinite() {
        return Err(Error::UnsupportedNorm(q));
    }
    if !(q >= 1.0) {
        return Err(Error::Validation(format!(
            "norm exponent q = {q} must be >= 1"
        )));
    }
    Ok(())
}

/// (∫|u|^q dx)^(1/q) from samples on a uniform grid of spacing dx covering the
/// support (trapezoid rule; the end samples are taken to vanish).
pub fn lq_norm(samples: &[f64], dx: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !(dx > 0.0) {
        return Err(Error::Validation(format!(
            "grid spacing {dx} must be positive"
        )));
    }
    let peak = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    // Scaling by the peak keeps |u|^q in range for large q.
    let n = samples.len();
    let sum: f64 = samples
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            w * (v.abs() / peak).powf(q)
        })
        .sum();
    Ok(peak * (sum * dx).powf(1.0 / q))
}

/// Norm over Rⁿ of a radial function sampled at r_i = i·dr, i = 0, 1, …:
/// (|S^(n−1)| ∫ |u(r)|^q r^(n−1) dr)^(1/q).
pub fn lq_norm_radial(samples: &[f64], dr: f64, n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    if n == 0 {
        return Err(Error::Validation("dimension must be >= 1".into()));
    }
    if n == 1 {
        // Even extension to the whole line.
        return Ok(lq_norm(samples, dr, q)? * 2f64.powf(1.0 / q));
    }
    let area = crate::spherical::SphericalConstants::new(n)?.omega_nm1;
    let weighted: Vec<f64> = samples
        .iter()
        .enumerate()
        .map(|(i, v)| v * (i as f64 * dr).powf((n as f64 - 1.0) / q))
        .collect();
    Ok(lq_norm(&weighted, dr, q)? * area.powf(1.0 / q))
}

/// Norm of a grid function, refusing grids on which halving the resolution
/// moves the result by more than 0.1%.
fn resolved_norm(values: &[f64], dx: f64, q: f64, radial_dim: Option<usize>) -> Result<f64> {
    let norm = |v: &[f64], h: f64| match radial_dim {
        Some(n) => lq_norm_radial(v, h, n, q),
        None => lq_norm(v, h, q),
    };
    let fine = norm(values, dx)?;
    let coarse_samples: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = norm(&coarse_samples, 2.0 * dx)?;
    if (fine - coarse).abs() > 1e-3 * fine.max(f64::MIN_POSITIVE) {
        return Err(Error::Validation(format!(
            "norm grid under-resolved: {coarse} at 2dx against {fine} at dx"
        )));
    }
    Ok(fine)
}

fn uniform(lo: f64, hi: f64, n: usize) -> (Vec<f64>, f64) {
    let dx = (hi - lo) / (n - 1) as f64;
    ((0..n).map(|i| lo + i as f64 * dx).collect(), dx)
}

const DATA_GRID: usize = 8193;

fn field_norm_1d(f: &Option<Field1D>, q: f64) -> Result<f64> {
    let Some(f) = f else { return Ok(0.0) };
    let r = f.support().max(1e-12);
    let (xs, dx) = uniform(-r, r, DATA_GRID);
    let v: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    lq_norm(&v, dx, q)
}

fn source_norm_1d(f: &Source1D, b: f64, q: f64) -> Result<f64> {
    let r = f.radius().max(1e-12);
    let (xs, dx) = uniform(-r, r, DATA_GRID);
    let v: Vec<f64> = xs.iter().map(|&x| f.eval(x, b)).collect();
    lq_norm(&v, dx, q)
}

fn radial_samples(f: impl Fn(&[f64]) -> f64, n: usize, r: f64) -> (Vec<f64>, f64) {
    let (rs, dr) = uniform(0.0, r, DATA_GRID);
    let mut p = vec![0.0; n];
    let v = rs
        .iter()
        .map(|&rho| {
            p[0] = rho;
            f(&p)
        })
        .collect();
    (v, dr)
}

fn field_norm_nd(f: &Option<FieldND>, n: usize, q: f64) -> Result<f64> {
    let Some(f) = f else { return Ok(0.0) };
    let (v, dr) = radial_samples(|x| f.eval(x), n, f.support().max(1e-12));
    lq_norm_radial(&v, dr, n, q)
}

fn source_norm_nd(f: &SourceND, n: usize, b: f64, q: f64) -> Result<f64> {
    let (v, dr) = radial_samples(|x| f.eval(x, b), n, f.radius().max(1e-12));
    lq_norm_radial(&v, dr, n, q)
}

/// Homogeneous envelope in one dimension with unit constant. For p = q:
/// (1+t)(e^(t/2)‖φ₀‖ + (1−e^(−t))‖φ₁‖). Otherwise
/// e^(t/2)‖φ₀‖_q + (1+t)(e^t−1)^(1/ρ) e^(t(1/2−1/ρ))‖φ₀‖_p + (1+t)(1−e^(−t))^(1/ρ)‖φ₁‖_p.
pub fn homogeneous_envelope_1d(t: f64, rho: f64, phi0: [f64; 2], phi1: [f64; 2]) -> f64 {
    let [phi0_p, phi0_q] = phi0;
    let [phi1_p, _] = phi1;
    if rho == 1.0 {
        (1.0 + t) * ((0.5 * t).exp() * phi0_q + (-(-t).exp_m1()) * phi1_p)
    } else {
        let r = 1.0 / rho;
        (0.5 * t).exp() * phi0_q
            + (1.0 + t) * t.exp_m1().powf(r) * (t * (0.5 - r)).exp() * phi0_p
            + (1.0 + t) * (-(-t).exp_m1()).powf(r) * phi1_p
    }
}

/// Source envelope in one dimension with unit constant:
/// e^(t(1−1/ρ)) ∫₀ᵗ (1+t−b)(e^(t−b)−1)^(1/ρ)(e^(t−b)+1)^(−1)‖f(·,b)‖_p db.
pub fn source_envelope_1d(
    t: f64,
    rho: f64,
    f_norm: impl Fn(f64) -> Result<f64>,
    window: [f64; 2],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let r = 1.0 / rho;
    let (b0, b1) = (window[0].max(0.0), window[1].min(t));
    if !(b1 > b0) {
        return Ok(0.0);
    }
    let g = |b: f64| -> Result<f64> {
        let d = t - b;
        Ok((1.0 + d) * d.exp_m1().powf(r) / (d.exp() + 1.0) * f_norm(b)?)
    };
    Ok((t * (1.0 - r)).exp() * adaptive_gl(g, &[b0, b1], spec)?.value)
}

/// Homogeneous envelope in n ≥ 2 with unit constant and weight exponent
/// a = 2s − n(1/p − 1/q): (1+t)(1−e^(−t))^a (e^(t/2)‖φ₀‖_p + (1−e^(−t))‖φ₁‖_p).
pub fn homogeneous_envelope_nd(t: f64, a: f64, phi0_p: f64, phi1_p: f64) -> f64 {
    let g = -(-t).exp_m1();
    (1.0 + t) * g.powf(a) * ((0.5 * t).exp() * phi0_p + g * phi1_p)
}

/// Source envelope in n ≥ 2 with unit constant:
/// ∫₀ᵗ ‖f(·,b)‖_p e^(−b)(e^(−b)−e^(−t))^(1+a)(1+t−b) db.
pub fn source_envelope_nd(
    t: f64,
    a: f64,
    f_norm: impl Fn(f64) -> Result<f64>,
    window: [f64; 2],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (b0, b1) = (window[0].max(0.0), window[1].min(t));
    if !(b1 > b0) {
        return Ok(0.0);
    }
    let g = |b: f64| -> Result<f64> {
        let gap = crate::kernels::horizon_gap(b, t);
        Ok(f_norm(b)? * (-b).exp() * gap.powf(1.0 + a) * (1.0 + t - b))
    };
    Ok(adaptive_gl(g, &[b0, b1], spec)?.value)
}

fn record(t: f64, lhs_norm: f64, envelope: f64) -> DecayRecord {
    let ratio = if envelope > 0.0 {
        lhs_norm / envelope
    } else {
        0.0
    };
    DecayRecord {
        t,
        lhs_norm,
        envelope,
        ratio,
    }
}

/// Measures ‖u(·,t)‖_q for the one-dimensional problem at cfg.times and
/// pairs it with the homogeneous envelope (no source) or the source envelope
/// (source only). Mixed problems add the two envelopes.
pub fn check_decay_1d(
    data: &CauchyData1D,
    mass: &CurvedMass,
    cfg: &EstimateConfig,
) -> Result<Vec<DecayRecord>> {
    cfg.validate(1)?;
    let spec = QuadratureSpec::default();
    let sol = solve_1d(data.clone(), *mass, spec)?;
    let phi0 = [
        field_norm_1d(&data.phi0, cfg.p)?,
        field_norm_1d(&data.phi0, cfg.q)?,
    ];
    let phi1 = [
        field_norm_1d(&data.phi1, cfg.p)?,
        field_norm_1d(&data.phi1, cfg.q)?,
    ];
    let support = data.support();
    cfg.times
        .par_iter()
        .map(|&t| {
            let half = support + phi(t);
            let (xs, dx) = uniform(-half, half, cfg.grid_points);
            let u = sol.eval_slice(&xs, t, cfg.panels)?;
            let lhs = resolved_norm(&u, dx, cfg.q, None)?;
            let mut env = 0.0;
            if data.phi0.is_some() || data.phi1.is_some() {
                env += homogeneous_envelope_1d(t, cfg.rho, phi0, phi1);
            }
            if let Some(f) = &data.f {
                env += source_envelope_1d(
                    t,
                    cfg.rho,
                    |b| source_norm_1d(f, b, cfg.p),
                    f.window(),
                    &spec,
                )?;
            }
            let r = record(t, lhs, env);
            tracing::debug!(
                t,
                norm = r.lhs_norm,
                envelope = r.envelope,
                ratio = r.ratio,
                "decay sample"
            );
            Ok(r)
        })
        .collect()
}

/// As `check_decay_1d` for n ∈ {2, 3}. The data must be radial; norms are
/// taken on a radial grid.
pub fn check_decay_nd(
    data: &CauchyDataND,
    mass: &CurvedMass,
    cfg: &EstimateConfig,
) -> Result<Vec<DecayRecord>> {
    let n = data.n;
    if !(n == 2 || n == 3) {
        return Err(Error::Validation(format!(
            "dimension n = {n} is not supported"
        )));
    }
    cfg.validate(n)?;
    let radial = data.phi0.as_ref().is_none_or(|f| f.is_radial())
        && data.phi1.as_ref().is_none_or(|f| f.is_radial())
        && data.f.as_ref().is_none_or(|f| f.is_radial());
    if !radial {
        return Err(Error::Validation(
            "decay measurement in n >= 2 needs radial data".into(),
        ));
    }
    let spec = QuadratureSpec::default();
    let homogeneous = solve_homogeneous_nd(data.clone(), *mass, spec)?;
    let source = solve_source_nd(data.clone(), *mass, spec)?;
    let a = cfg.weight_exponent(n);
    let phi0_p = field_norm_nd(&data.phi0, n, cfg.p)?;
    let phi1_p = field_norm_nd(&data.phi1, n, cfg.p)?;
    let support = data.support();
    let has_data = data.phi0.is_some() || data.phi1.is_some();
    cfg.times
        .iter()
        .map(|&t| {
            let (rs, dr) = uniform(0.0, support + phi(t), cfg.grid_points);
            let mut u = vec![0.0; rs.len()];
            if has_data {
                u = homogeneous.eval_radial_slice(&rs, t, cfg.panels)?;
            }
            if data.f.is_some() {
                let s = source.eval_radial_slice(&rs, t, cfg.panels)?;
                u.iter_mut().zip(s).for_each(|(u, s)| *u += s);
            }
            let lhs = resolved_norm(&u, dr, cfg.q, Some(n))?;
            let mut env = 0.0;
            if has_data {
                env += homogeneous_envelope_nd(t, a, phi0_p, phi1_p);
            }
            if let Some(f) = &data.f {
                env += source_envelope_nd(
                    t,
                    a,
                    |b| source_norm_nd(f, n, b, cfg.p),
                    f.window(),
                    &spec,
                )?;
            }
            let r = record(t, lhs, env);
            tracing::debug!(
                t,
                norm = r.lhs_norm,
                envelope = r.envelope,
                ratio = r.ratio,
                "decay sample"
            );
            Ok(r)
        })
        .collect()
}

/// The kernel integrals whose growth in z = e^t the decay envelopes rest on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LemmaKind {
    /// ∫₀^(z−1) ((z+1)²−r²)^(−ρ/2) F(½,½;1;ζ)^ρ dr against (1+ln z)^ρ (z−1)(z+1)^(−ρ).
    K1Power { rho: f64 },
    /// ∫₀^(z−1) r^a ((z+1)²−r²)^(−1/2) F(½,½;1;ζ) dr against z^(−1)(z−1)^(1+a)(1+ln z).
    K1Weighted { a: f64 },
    /// (∫₀^(1−e^(−t)) |K₀(r,t)|^ρ dr)^(1/ρ), t = ln z, against
    /// (1+t)(e^t−1)^(1/ρ) e^(t(1/2−1/ρ)).
    K0Power { rho: f64, m: f64 },
    /// ∫₀^(z−1) y^a |K₀(y/z, ln z)|/z dy against z^(−1/2)(z−1)^(1+a)(1+ln z).
    K0Weighted { a: f64, m: f64 },
}

impl LemmaKind {
    pub fn name(&self) -> String {
        match self {
            LemmaKind::K1Power { rho } => format!("k1-power(rho={rho})"),
            LemmaKind::K1Weighted { a } => format!("k1-weighted(a={a})"),
            LemmaKind::K0Power { rho, m } => format!("k0-power(rho={rho},M={m})"),
            LemmaKind::K0Weighted { a, m } => format!("k0-weighted(a={a},M={m})"),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            LemmaKind::K1Power { rho } | LemmaKind::K0Power { rho, .. } => {
                (1.0..2.0).contains(&rho)
            }
            LemmaKind::K1Weighted { a } | LemmaKind::K0Weighted { a, .. } => a > -1.0 && a <= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "{} outside its parameter range",
                self.name()
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaPoint {
    pub z: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub kind: LemmaKind,
    pub points: Vec<LemmaPoint>,
    /// Largest ratio over the lower half of the z grid.
    pub c_hat: f64,
    /// max over z of ratio/Ĉ − 1; positive when the upper half rises above Ĉ.
    pub max_exceedance: f64,
}

impl LemmaReport {
    pub fn passed(&self, allowed: f64) -> bool {
        self.max_exceedance <= allowed
    }
}

fn f_half(zeta: f64) -> Result<f64> {
    gauss_2f1_real(0.5, 0.5, 1.0, zeta, 1e-13)
}

/// ((z−1)²−r²)/((z+1)²−r²) in factored form.
fn k1_arg(z: f64, r: f64) -> f64 {
    ((z - 1.0 - r) * (z - 1.0 + r) / ((z + 1.0 - r) * (z + 1.0 + r))).max(0.0)
}

/// ∫₀^top r^a g(r) dr via r = w^(1/(1+a)), which removes the r^a endpoint.
fn weighted_integral(
    mut g: impl FnMut(f64) -> Result<f64>,
    a: f64,
    top: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let e = 1.0 + a;
    let h = |w: f64| -> Result<f64> { g(w.powf(1.0 / e)) };
    Ok(adaptive_gl(h, &[0.0, top.powf(e)], spec)?.value / e)
}

fn lemma_sides(kind: &LemmaKind, z: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let lz = z.ln();
    let top = z - 1.0;
    Ok(match *kind {
        LemmaKind::K1Power { rho } => {
            let g = |r: f64| -> Result<f64> {
                let den = (z + 1.0 - r) * (z + 1.0 + r);
                Ok(den.powf(-0.5 * rho) * f_half(k1_arg(z, r))?.powf(rho))
            };
            let lhs = adaptive_gl(g, &[0.0, top], spec)?.value;
            (lhs, (1.0 + lz).powf(rho) * top * (z + 1.0).powf(-rho))
        }
        LemmaKind::K1Weighted { a } => {
            let g = |r: f64| -> Result<f64> {
                let den = (z + 1.0 - r) * (z + 1.0 + r);
                Ok(f_half(k1_arg(z, r))? / den.sqrt())
            };
            let lhs = weighted_integral(g, a, top, spec)?;
            (lhs, top.powf(1.0 + a) * (1.0 + lz) / z)
        }
        LemmaKind::K0Power { rho, m } => {
            let mass = CurvedMass::new(m)?;
            let t = lz;
            let edge = phi(t);
            let g = |r: f64| -> Result<f64> {
                let r = r.min(edge * (1.0 - 1e-15));
                Ok(evaluate_k0(r, t, &mass)?.value.abs().powf(rho))
            };
            let lhs = adaptive_gl(g, &[0.0, edge], spec)?.value.powf(1.0 / rho);
            let rr = 1.0 / rho;
            (
                lhs,
                (1.0 + t) * t.exp_m1().powf(rr) * (t * (0.5 - rr)).exp(),
            )
        }
        LemmaKind::K0Weighted { a, m } => {
            let mass = CurvedMass::new(m)?;
            let t = lz;
            let edge = phi(t);
            let g = |y: f64| -> Result<f64> {
                let r = (y / z).min(edge * (1.0 - 1e-15));
                Ok(evaluate_k0(r, t, &mass)?.value.abs() / z)
            };
            let lhs = weighted_integral(g, a, top, spec)?;
            (lhs, top.powf(1.0 + a) * (1.0 + lz) / z.sqrt())
        }
    })
}

/// Evaluates one bound at every z (> 1, ascending), fits Ĉ on the lower
/// half of the grid and measures how far the upper half exceeds it.
pub fn lemma_bound_check(
    kind: LemmaKind,
    zs: &[f64],
    spec: &QuadratureSpec,
) -> Result<LemmaReport> {
    kind.validate()?;
    if zs.is_empty() || zs.iter().any(|z| !(*z > 1.0)) || zs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("z grid must be ascending and > 1".into()));
    }
    let points: Vec<LemmaPoint> = zs
        .par_iter()
        .map(|&z| {
            let (lhs, rhs) = lemma_sides(&kind, z, spec)?;
            Ok(LemmaPoint {
                z,
                lhs,
                rhs,
                ratio: lhs / rhs,
            })
        })
        .collect::<Result<_>>()?;
    let fit = points.len().div_ceil(2);
    let c_hat = points[..fit]
        .iter()
        .map(|p| p.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_exceedance = points
        .iter()
        .map(|p| p.ratio / c_hat - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LemmaReport {
        kind,
        points,
        c_hat,
        max_exceedance,
    })
}

/// The four kernel-integral bounds at exponent ρ, weight a and mass m.
pub fn lemma_bound_checks(
    rho: f64,
    a: f64,
    m: f64,
    zs: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<LemmaReport>> {
    [
        LemmaKind::K1Power { rho },
        LemmaKind::K1Weighted { a },
        LemmaKind::K0Power { rho, m },
        LemmaKind::K0Weighted { a, m },
    ]
    .into_iter()
    .map(|k| lemma_bound_check(k, zs, spec))
    .collect()
}

/// Log-spaced z grid on [lo, hi].
pub fn z_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bump(x: f64) -> f64 {
        if x.abs() < 1.0 {
            (1.0 / (x * x - 1.0)).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn norm_of_zero_and_unsupported_infinity() {
        assert_eq!(lq_norm(&[0.0; 10], 0.1, 2.0).unwrap(), 0.0);
        assert!(matches!(
            lq_norm(&[1.0], 0.1, f64::INFINITY),
            Err(Error::UnsupportedNorm(_))
        ));
        assert!(lq_norm(&[1.0], 0.1, 0.5).is_err());
    }

    #[test]
    fn plateau_norm_matches_width() {
        // Smooth plateau of height 1 and width ≈ 2w.
        let w = 1.5;
        let g = |x: f64| 0.5 * (1.0 - ((x.abs() - w) / 0.01).tanh());
        let (xs, dx) = uniform(-3.0, 3.0, 60001);
        let v: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
        for q in [1.0, 2.0, 3.5] {
            let n = lq_norm(&v, dx, q).unwrap();
            assert!((n - (2.0 * w).powf(1.0 / q)).abs() < 1e-2, "q={q}: {n}");
        }
    }

    #[test]
    fn truncated_gaussian_l2() {
        // ∫ e^(−x²) over R = √π; truncation at |x| = 8 is below 1e−27.
        let (xs, dx) = uniform(-8.0, 8.0, 4001);
        let v: Vec<f64> = xs.iter().map(|&x| (-0.5 * x * x).exp()).collect();
        let n = lq_norm(&v, dx, 2.0).unwrap();
        assert!((n - std::f64::consts::PI.sqrt().sqrt()).abs() < 1e-8);
    }

    #[test]
    fn radial_norm_of_gaussian() {
        // ∫_{R³} e^(−|x|²) dx = π^(3/2).
        let (rs, dr) = uniform(0.0, 8.0, 4001);
        let v: Vec<f64> = rs.iter().map(|&r| (-0.5 * r * r).exp()).collect();
        let n = lq_norm_radial(&v, dr, 3, 2.0).unwrap();
        assert!((n * n - std::f64::consts::PI.powf(1.5)).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn norm_is_homogeneous(alpha in -50.0f64..50.0, q in 1.0f64..6.0) {
            let (xs, dx) = uniform(-1.0, 1.0, 257);
            let v: Vec<f64> = xs.iter().map(|&x| bump(x) * (1.0 + x)).collect();
            let scaled: Vec<f64> = v.iter().map(|u| alpha * u).collect();
            let a = lq_norm(&scaled, dx, q).unwrap();
            let b = alpha.abs() * lq_norm(&v, dx, q).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }
    }

    #[test]
    fn envelopes_by_hand() {
        let t = std::f64::consts::LN_2;
        // 1 − e^(−t) = 1/2, e^(t/2) = √2.
        let e = homogeneous_envelope_1d(t, 1.0, [0.0, 3.0], [5.0, 5.0]);
        assert!((e - (1.0 + t) * (2f64.sqrt() * 3.0 + 0.5 * 5.0)).abs() < 1e-14);
        let e = homogeneous_envelope_nd(t, 0.0, 3.0, 5.0);
        assert!((e - (1.0 + t) * (2f64.sqrt() * 3.0 + 0.5 * 5.0)).abs() < 1e-14);
        assert_eq!(
            homogeneous_envelope_1d(0.0, 1.0, [0.0, 0.0], [1.0, 1.0]),
            0.0
        );
        assert!((homogeneous_envelope_nd(0.0, 0.0, 2.0, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let cfg = EstimateConfig::default();
        assert!(cfg.validate(1).is_ok() && cfg.validate(3).is_ok());
        let bad = EstimateConfig {
            q: 3.0,
            ..cfg.clone()
        };
        assert!(bad.validate(1).is_err());
        let bad = EstimateConfig {
            rho: 1.5,
            ..cfg.clone()
        };
        assert!(bad.validate(1).is_err());
        let ok = EstimateConfig {
            p: 1.5,
            q: 3.0,
            rho: 1.5,
            ..cfg.clone()
        };
        assert!(ok.validate(1).is_ok());
        assert!(ok.validate(3).is_err());
    }

    #[test]
    fn decay_of_zero_data_is_zero() {
        let cfg = EstimateConfig {
            times: vec![0.5, 1.0],
            grid_points: 64,
            ..EstimateConfig::default()
        };
        let rec = check_decay_nd(
            &CauchyDataND::new(3).unwrap(),
            &CurvedMass::new(1.0).unwrap(),
            &cfg,
        )
        .unwrap();
        assert!(rec.iter().all(|r| r.lhs_norm == 0.0 && r.ratio == 0.0));
    }

    #[test]
    fn decay_ratio_is_amplitude_invariant() {
        let cfg = EstimateConfig {
            times: vec![1.0, 2.0],
            grid_points: 1024,
            panels: 8,
            ..EstimateConfig::default()
        };
        let m = CurvedMass::new(0.5).unwrap();
        let run = |amp: f64| {
            let f = Source1D::separable(
                0.5,
                [0.0, 1.0],
                move |y| amp * bump(y / 0.5),
                |b| bump((b - 0.5) / 0.5),
            )
            .unwrap();
            let data = CauchyData1D {
                f: Some(f),
                ..Default::default()
            };
            check_decay_1d(&data, &m, &cfg).unwrap()
        };
        let (a, b) = (run(1.0), run(2.0));
        for (x, y) in a.iter().zip(&b) {
            assert!((y.lhs_norm - 2.0 * x.lhs_norm).abs() < 1e-10 * y.lhs_norm);
            assert!((y.ratio - x.ratio).abs() < 1e-10 * x.ratio);
        }
    }

    #[test]
    fn under_resolved_grid_is_refused() {
        let cfg = EstimateConfig {
            times: vec![1.0],
            grid_points: 17,
            ..EstimateConfig::default()
        };
        let data = CauchyData1D {
            phi1: Some(Field1D::new(0.2, |x| bump(x / 0.2)).unwrap()),
            ..Default::default()
        };
        assert!(check_decay_1d(&data, &CurvedMass::new(1.0).unwrap(), &cfg).is_err());
    }

    #[test]
    fn summary_flags_runaway_tail() {
        let mk =
            |r: &[f64]| -> Vec<DecayRecord> { r.iter().map(|&x| record(1.0, x, 1.0)).collect() };
        let s = DecaySummary::from_records(&mk(&[1.0, 0.8, 0.9, 1.0, 1.2]));
        assert!(s.diverging_tail && (s.c_hat - 1.2).abs() < 1e-15);
        let s = DecaySummary::from_records(&mk(&[1.0, 0.5, 0.4, 0.45, 0.44]));
        assert!(!s.diverging_tail && (s.spread - 2.5).abs() < 1e-12 && s.bounded(5.0));
    }

    #[test]
    fn k1_power_at_two_is_finite() {
        let r = lemma_bound_check(
            LemmaKind::K1Power { rho: 1.0 },
            &[2.0],
            &QuadratureSpec::default(),
        )
        .unwrap();
        let p = r.points[0];
        assert!(p.lhs.is_finite() && p.lhs > 0.0);
        assert_eq!(r.c_hat, p.ratio);
        assert_eq!(r.max_exceedance, 0.0);
    }

    #[test]
    fn constant_is_fitted_on_the_lower_half() {
        let zs = z_grid(1.5, 40.0, 5);
        let r = lemma_bound_check(
            LemmaKind::K1Power { rho: 1.0 },
            &zs,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let fit = r.points[..3].iter().map(|p| p.ratio).fold(0.0, f64::max);
        assert_eq!(r.c_hat, fit);
        let later = r.points[3..].iter().map(|p| p.ratio).fold(0.0, f64::max);
        assert!((r.max_exceedance - (later / fit - 1.0).max(0.0)).abs() < 1e-15);
    }

    #[test]
    fn k1_power_near_one_vanishes_with_bounded_ratio() {
        let r = lemma_bound_check(
            LemmaKind::K1Power { rho: 1.0 },
            &[1.0001, 1.001, 1.01],
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!(r.points[0].lhs < 1e-4 && r.points[0].rhs < 1e-4);
        // Near z = 1 the integrand is ≈ 1/2, so lhs/rhs → 1/2 · 2 = 1.
        for p in &r.points {
            assert!((0.5..2.0).contains(&p.ratio), "{p:?}");
        }
    }

    #[test]
    fn k1_weighted_against_substitution_free_quadrature() {
        // a = 0 needs no substitution; the weighted path must agree.
        let spec = QuadratureSpec::default();
        let (lhs, _) = lemma_sides(&LemmaKind::K1Weighted { a: 0.0 }, 5.0, &spec).unwrap();
        let direct = adaptive_gl(
            |r: f64| {
                let den = (6.0 - r) * (6.0 + r);
                Ok(f_half(k1_arg(5.0, r))? / den.sqrt())
            },
            &[0.0, 4.0],
            &spec,
        )
        .unwrap()
        .value;
        assert!((lhs - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn bad_lemma_parameters() {
        let spec = QuadratureSpec::default();
        assert!(lemma_bound_check(LemmaKind::K1Power { rho: 2.0 }, &[2.0], &spec).is_err());
        assert!(lemma_bound_check(LemmaKind::K1Weighted { a: -1.0 }, &[2.0], &spec).is_err());
        assert!(lemma_bound_check(LemmaKind::K1Weighted { a: 0.0 }, &[2.0, 1.5], &spec).is_err());
    }
}
