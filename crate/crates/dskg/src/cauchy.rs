//! The one-dimensional Cauchy problem u_tt − e^(−2t)u_xx + M²u = f,
//! u(x,0) = φ₀, u_t(x,0) = φ₁, solved by quadrature of its integral
//! representation through the kernels E, K₀ and K₁.

use crate::error::{Error, Result};
use crate::kernels::{e_value, evaluate_k0, evaluate_k1, horizon_gap, phi, CurvedMass};
use crate::quad::{adaptive_gl, composite_nodes, gl32, tanh_sinh, QuadratureSpec};
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Fraction of [0, 1 − e^(−t)] next to the cone edge integrated by tanh-sinh.
const EDGE_FRACTION: f64 = 0.01;

/// Real function of x vanishing for |x| > support.
#[derive(Clone)]
pub struct Field1D {
    f: RealFn,
    support: f64,
}

impl Field1D {
    pub fn new(support: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(support >= 0.0 && support.is_finite()) {
            return Err(Error::Validation(format!(
                "support radius {support} must be finite"
            )));
        }
        Ok(Field1D {
            f: Arc::new(f),
            support,
        })
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() > self.support {
            0.0
        } else {
            (self.f)(x)
        }
    }

    /// Largest |f| seen at `samples` points just outside the declared support.
    pub fn leak_outside_support(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let x = self.support * (1.0 + 1e-6) + 0.25 * k as f64 / samples.max(1) as f64;
                (self.f)(x).abs().max((self.f)(-x).abs())
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Field1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field1D")
            .field("support", &self.support)
            .finish()
    }
}

/// Source f(x,t) vanishing for |x| > radius and for t outside `window`.
#[derive(Clone)]
pub struct Source1D {
    f: SourceFn,
    radius: f64,
    window: [f64; 2],
    factors: Option<(RealFn, RealFn)>,
}

impl Source1D {
    pub fn new(
        radius: f64,
        window: [f64; 2],
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) || !(window[1] >= window[0]) {
            return Err(Error::Validation(format!(
                "bad source support: radius {radius}, window {window:?}"
            )));
        }
        Ok(Source1D {
            f: Arc::new(f),
            radius,
            window,
            factors: None,
        })
    }

    /// f(x,t) = g(x) h(t). The factorization is used by the spectral oracle.
    pub fn separable(
        radius: f64,
        window: [f64; 2],
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let (g, h): (RealFn, RealFn) = (Arc::new(g), Arc::new(h));
        let (gc, hc) = (g.clone(), h.clone());
        let mut s = Source1D::new(radius, window, move |x, t| gc(x) * hc(t))?;
        s.factors = Some((g, h));
        Ok(s)
    }

    /// Spatial and temporal factors when the source was built separable;
    /// both are masked to the declared supports.
    pub fn factors(&self) -> Option<(impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_)> {
        let (g, h) = self.factors.as_ref()?;
        let [w0, w1] = self.window;
        Some((
            move |x: f64| if x.abs() > self.radius { 0.0 } else { g(x) },
            move |t: f64| if t < w0 || t > w1 { 0.0 } else { h(t) },
        ))
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn window(&self) -> [f64; 2] {
        self.window
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        if x.abs() > self.radius || t < self.window[0] || t > self.window[1] {
            0.0
        } else {
            (self.f)(x, t)
        }
    }
}

impl fmt::Debug for Source1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Source1D")
            .field("radius", &self.radius)
            .field("window", &self.window)
            .finish()
    }
}

/// Initial data and source. Missing entries are zero; all are assumed C².
#[derive(Clone, Debug, Default)]
pub struct CauchyData1D {
    pub phi0: Option<Field1D>,
    pub phi1: Option<Field1D>,
    pub f: Option<Source1D>,
}

impl CauchyData1D {
    /// Radius of the union of all spatial supports.
    pub fn support(&self) -> f64 {
        let r0 = self.phi0.as_ref().map_or(0.0, |d| d.support());
        let r1 = self.phi1.as_ref().map_or(0.0, |d| d.support());
        let rf = self.f.as_ref().map_or(0.0, |d| d.radius());
        r0.max(r1).max(rf)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Homogeneous,
    Source,
    Both,
}

/// u(x,t) defined by the representation formulas; evaluation is pointwise.
#[derive(Clone, Debug)]
pub struct Solution1D {
    data: CauchyData1D,
    mass: CurvedMass,
    spec: QuadratureSpec,
    part: Part,
}

/// Solution of the homogeneous equation with data (φ₀, φ₁); f is ignored.
pub fn solve_homogeneous_1d(
    data: CauchyData1D,
    mass: CurvedMass,
    spec: QuadratureSpec,
) -> Result<Solution1D> {
    spec.validate()?;
    Ok(Solution1D {
        data,
        mass,
        spec,
        part: Part::Homogeneous,
    })
}

/// Solution with zero data and source f; φ₀, φ₁ are ignored.
pub fn solve_source_1d(
    data: CauchyData1D,
    mass: CurvedMass,
    spec: QuadratureSpec,
) -> Result<Solution1D> {
    spec.validate()?;
    Ok(Solution1D {
        data,
        mass,
        spec,
        part: Part::Source,
    })
}

/// Superposition of the homogeneous and source solutions.
pub fn solve_1d(data: CauchyData1D, mass: CurvedMass, spec: QuadratureSpec) -> Result<Solution1D> {
    spec.validate()?;
    Ok(Solution1D {
        data,
        mass,
        spec,
        part: Part::Both,
    })
}

/// Base at t = 0 of the backward cone through (x, t):
/// [x − (1 − e^(−t)), x + (1 − e^(−t))].
pub fn dependence_domain(x: f64, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time t = {t} must be >= 0")));
    }
    let r = phi(t);
    Ok((x - r, x + r))
}

/// ∫_lo^hi of a kernel integrand on [0, r]; with `edge` set (the K₀
/// integrals) the part within 1% of the cone edge r is done by tanh-sinh.
pub(crate) fn kernel_integral<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    r: f64,
    edge: bool,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let split = r * (1.0 - EDGE_FRACTION);
    if edge && hi > split {
        let mid = split.max(lo);
        let head = if mid > lo {
            adaptive_gl(&mut f, &[lo, mid], spec)?.value
        } else {
            0.0
        };
        Ok(head + tanh_sinh(&mut f, mid, hi, spec)?.value)
    } else {
        Ok(adaptive_gl(f, &[lo, hi], spec)?.value)
    }
}

/// Sub-interval of [0, r] on which z ↦ g(x ± z) can be nonzero when g
/// vanishes outside [−s, s]; both orientations are folded together.
fn clip(x: f64, s: f64, r: f64, sign: f64) -> Option<(f64, f64)> {
    // x + sign·z ∈ [−s, s]  ⇔  z ∈ [sign·(−s − x), sign·(s − x)] (sorted)
    let (p, q) = (sign * (-s - x), sign * (s - x));
    let (lo, hi) = (p.min(q).max(0.0), p.max(q).min(r));
    (hi > lo).then_some((lo, hi))
}

impl Solution1D {
    pub fn mass(&self) -> &CurvedMass {
        &self.mass
    }

    pub fn data(&self) -> &CauchyData1D {
        &self.data
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !x.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!(
                "evaluation point ({x}, {t}) needs t >= 0"
            )));
        }
        let mut u = 0.0;
        if self.part != Part::Source {
            u += self.homogeneous(x, t)?;
        }
        if self.part != Part::Homogeneous {
            u += self.source(x, t)?;
        }
        Ok(u)
    }

    /// Evaluates at many points, in parallel.
    pub fn eval_many(&self, points: &[(f64, f64)]) -> Result<Vec<f64>> {
        points.par_iter().map(|&(x, t)| self.eval(x, t)).collect()
    }

    fn homogeneous(&self, x: f64, t: f64) -> Result<f64> {
        let r = phi(t);
        let mut u = 0.0;
        if let Some(p0) = &self.data.phi0 {
            u += 0.5 * (t / 2.0).exp() * (p0.eval(x + r) + p0.eval(x - r));
        }
        if t == 0.0 {
            return Ok(u);
        }
        for (field, k0) in [(&self.data.phi0, true), (&self.data.phi1, false)] {
            let Some(field) = field else { continue };
            for sign in [1.0, -1.0] {
                let Some((lo, hi)) = clip(x, field.support(), r, sign) else {
                    continue;
                };
                let integrand = |z: f64| -> Result<f64> {
                    let k = if k0 {
                        evaluate_k0(z, t, &self.mass)?.value
                    } else {
                        evaluate_k1(z, t, &self.mass)?.value
                    };
                    Ok(field.eval(x + sign * z) * k)
                };
                u += kernel_integral(integrand, lo, hi, r, k0, &self.spec)?;
            }
        }
        Ok(u)
    }

    fn source(&self, x: f64, t: f64) -> Result<f64> {
        let Some(src) = &self.data.f else {
            return Ok(0.0);
        };
        let [w0, w1] = src.window();
        let (b0, b1) = (w0.max(0.0), w1.min(t));
        if !(b1 > b0) {
            return Ok(0.0);
        }
        let inner_spec = self.spec.scaled(0.1);
        let outer = |b: f64| -> Result<f64> {
            let a = horizon_gap(b, t);
            // y = x − w with |w| ≤ A(b) and |y| ≤ radius.
            let (lo, hi) = ((x - src.radius()).max(-a), (x + src.radius()).min(a));
            if !(hi > lo) {
                return Ok(0.0);
            }
            let inner = |w: f64| -> Result<f64> {
                let fv = src.eval(x - w, b);
                if fv == 0.0 {
                    return Ok(0.0);
                }
                Ok(fv * e_value(w, t, 0.0, b, &self.mass)?)
            };
            Ok(adaptive_gl(inner, &[lo, hi], &inner_spec)?.value)
        };
        Ok(adaptive_gl(outer, &[b0, b1], &self.spec)?.value)
    }

    /// u(·, t) at many x with fixed composite Gauss–Legendre rules whose
    /// kernel values are shared across x. `panels` panels of 32 nodes cover
    /// each kernel interval; meant for norm computations on grids.
    pub fn eval_slice(&self, xs: &[f64], t: f64, panels: usize) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time t = {t} must be >= 0")));
        }
        let panels = panels.max(1);
        let mut out = vec![0.0; xs.len()];
        if self.part != Part::Source {
            let r = phi(t);
            if let Some(p0) = &self.data.phi0 {
                for (o, &x) in out.iter_mut().zip(xs) {
                    *o += 0.5 * (t / 2.0).exp() * (p0.eval(x + r) + p0.eval(x - r));
                }
            }
            if t > 0.0 {
                let (z, w) = composite_nodes(0.0, r, panels, gl32());
                for (field, k0) in [(&self.data.phi0, true), (&self.data.phi1, false)] {
                    let Some(field) = field else { continue };
                    let kw: Vec<f64> = z
                        .par_iter()
                        .zip(&w)
                        .map(|(&z, &w)| {
                            let k = if k0 {
                                evaluate_k0(z, t, &self.mass)?.value
                            } else {
                                evaluate_k1(z, t, &self.mass)?.value
                            };
                            Ok(k * w)
                        })
                        .collect::<Result<_>>()?;
                    out.par_iter_mut().zip(xs).for_each(|(o, &x)| {
                        *o += z
                            .iter()
                            .zip(&kw)
                            .map(|(&z, &kw)| (field.eval(x - z) + field.eval(x + z)) * kw)
                            .sum::<f64>();
                    });
                }
            }
        }
        if self.part != Part::Homogeneous {
            if let Some(src) = &self.data.f {
                let [w0, w1] = src.window();
                let (b0, b1) = (w0.max(0.0), w1.min(t));
                if b1 > b0 {
                    let (bs, bw) = composite_nodes(b0, b1, panels, gl32());
                    // Kernel table over (b, w): w-nodes scale with A(b).
                    let (s, sw) = composite_nodes(-1.0, 1.0, panels, gl32());
                    let table: Vec<(f64, f64, Vec<f64>)> = bs
                        .par_iter()
                        .zip(&bw)
                        .map(|(&b, &wb)| {
                            let a = horizon_gap(b, t);
                            let ks = s
                                .iter()
                                .zip(&sw)
                                .map(|(&s, &ws)| {
                                    Ok(e_value(a * s, t, 0.0, b, &self.mass)? * ws * a * wb)
                                })
                                .collect::<Result<Vec<f64>>>()?;
                            Ok((b, a, ks))
                        })
                        .collect::<Result<_>>()?;
                    out.par_iter_mut().zip(xs).for_each(|(o, &x)| {
                        for (b, a, ks) in &table {
                            *o += s
                                .iter()
                                .zip(ks)
                                .map(|(&s, &k)| src.eval(x - a * s, *b) * k)
                                .sum::<f64>();
                        }
                    });
                }
            }
        }
        Ok(out)
    }
}
