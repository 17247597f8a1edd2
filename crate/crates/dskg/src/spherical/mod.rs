//! The Cauchy problem in n = 2 and n = 3 space dimensions: spherical means,
//! the weighted disc integral of the method of descent, the wave-equation
//! solution v_φ(x, r) built from them, and the representation formulas that
//! integrate v_φ against the one-dimensional kernels.

mod rules;

pub use rules::{adaptive_sphere_mean, weighted_disc_integral, SphereRule};

use crate::cauchy::{kernel_integral, RealFn};
use crate::error::{Error, Result};
use crate::kernels::{e_value, evaluate_k0, evaluate_k1, horizon_gap, phi, CurvedMass};
use crate::quad::{adaptive_gl, composite_nodes, gl32, QuadratureSpec};
use rayon::prelude::*;
use rules::unsupported;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type VecFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type VecSourceFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
pub type SourceGradFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;
pub type ProfileFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// ω_{n−1} (area of S^(n−1)) and c₀ = 1·3·…·(n−2) for odd n,
/// 1·3·…·(n−1) for even n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalConstants {
    pub omega_nm1: f64,
    pub c0n: f64,
}

impl SphericalConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("dimension n = {n} must be >= 2")));
        }
        let half = n as f64 / 2.0;
        let omega_nm1 = 2.0 * PI.powf(half)
            / crate::hypergeom::gamma(num_complex::Complex64::new(half, 0.0)).re;
        let top = if n % 2 == 1 { n - 2 } else { n - 1 };
        let c0n = (1..=top).step_by(2).map(|k| k as f64).product();
        Ok(SphericalConstants { omega_nm1, c0n })
    }
}

/// φ(x) = g(|x|), with g' for the gradient.
#[derive(Clone)]
pub struct RadialProfile {
    pub g: RealFn,
    pub dg: RealFn,
}

/// Real function on Rⁿ vanishing for |x| > support (which may be infinite),
/// with an optional analytic gradient and radial profile.
#[derive(Clone)]
pub struct FieldND {
    f: VecFn,
    grad: Option<GradFn>,
    support: f64,
    radial: Option<RadialProfile>,
}

impl fmt::Debug for FieldND {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldND")
            .field("support", &self.support)
            .field("gradient", &self.grad.is_some())
            .field("radial", &self.radial.is_some())
            .finish()
    }
}

fn check_support(support: f64) -> Result<()> {
    if support >= 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "support radius {support} must be >= 0"
        )))
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl FieldND {
    pub fn new(support: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_support(support)?;
        Ok(FieldND {
            f: Arc::new(f),
            grad: None,
            support,
            radial: None,
        })
    }

    pub fn with_gradient(
        mut self,
        grad: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    /// φ(x) = g(|x|) with derivative g'.
    pub fn radial(
        support: f64,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_support(support)?;
        let (g, dg): (RealFn, RealFn) = (Arc::new(g), Arc::new(dg));
        let (g1, dg1) = (g.clone(), dg.clone());
        Ok(FieldND {
            f: Arc::new(move |x| g1(norm(x))),
            grad: Some(Arc::new(move |x, out| {
                let r = norm(x);
                let s = if r > 0.0 { dg1(r) / r } else { 0.0 };
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = s * xi;
                }
            })),
            support,
            radial: Some(RadialProfile { g, dg }),
        })
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn is_radial(&self) -> bool {
        self.radial.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if norm(x) > self.support {
            0.0
        } else {
            (self.f)(x)
        }
    }

    /// Writes ∇φ(x) into `out`; false if no gradient was supplied.
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) -> bool {
        let Some(g) = &self.grad else { return false };
        if norm(x) > self.support {
            out.iter_mut().for_each(|o| *o = 0.0);
        } else {
            g(x, out);
        }
        true
    }

    fn view(&self) -> View<'_> {
        View {
            f: &*self.f,
            grad: self.grad.as_deref(),
            radial: self.radial.as_ref().map(|p| Profile {
                g: &*p.g,
                dg: &*p.dg,
                support: self.support,
            }),
            support: self.support,
        }
    }
}

/// Source f(x, t) vanishing for |x| > radius and t outside `window`.
#[derive(Clone)]
pub struct SourceND {
    f: VecSourceFn,
    grad: Option<SourceGradFn>,
    radius: f64,
    window: [f64; 2],
    radial: Option<(ProfileFn, ProfileFn)>,
    factors: Option<(RealFn, RealFn)>,
}

impl fmt::Debug for SourceND {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceND")
            .field("radius", &self.radius)
            .field("window", &self.window)
            .field("radial", &self.radial.is_some())
            .finish()
    }
}

impl SourceND {
    pub fn new(
        radius: f64,
        window: [f64; 2],
        f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_support(radius)?;
        if !(window[1] >= window[0]) {
            return Err(Error::Validation(format!("bad source window {window:?}")));
        }
        Ok(SourceND {
            f: Arc::new(f),
            grad: None,
            radius,
            window,
            radial: None,
            factors: None,
        })
    }

    pub fn with_gradient(
        mut self,
        grad: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    /// f(x, t) = g(|x|, t) with ∂_ρ g.
    pub fn radial(
        radius: f64,
        window: [f64; 2],
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let (g, dg): (ProfileFn, ProfileFn) = (Arc::new(g), Arc::new(dg));
        let (g1, dg1) = (g.clone(), dg.clone());
        let mut s = SourceND::new(radius, window, move |x, t| g1(norm(x), t))?;
        s.grad = Some(Arc::new(move |x, t, out| {
            let r = norm(x);
            let c = if r > 0.0 { dg1(r, t) / r } else { 0.0 };
            for (o, xi) in out.iter_mut().zip(x) {
                *o = c * xi;
            }
        }));
        s.radial = Some((g, dg));
        Ok(s)
    }

    /// f(x, t) = g(|x|) h(t); the factors are kept for the radial oracle.
    pub fn radial_separable(
        radius: f64,
        window: [f64; 2],
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let (g, h): (RealFn, RealFn) = (Arc::new(g), Arc::new(h));
        let (g1, h1, h2) = (g.clone(), h.clone(), h.clone());
        let mut s = SourceND::radial(
            radius,
            window,
            move |r, t| g1(r) * h1(t),
            move |r, t| dg(r) * h2(t),
        )?;
        s.factors = Some((g, h));
        Ok(s)
    }

    /// Radial profile g and time factor h of a `radial_separable` source.
    pub fn factors(&self) -> Option<(RealFn, RealFn)> {
        self.factors.clone()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn window(&self) -> [f64; 2] {
        self.window
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        if norm(x) > self.radius || t < self.window[0] || t > self.window[1] {
            0.0
        } else {
            (self.f)(x, t)
        }
    }

    pub fn is_radial(&self) -> bool {
        self.radial.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct CauchyDataND {
    pub n: usize,
    pub phi0: Option<FieldND>,
    pub phi1: Option<FieldND>,
    pub f: Option<SourceND>,
}

impl CauchyDataND {
    pub fn new(n: usize) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(unsupported(n));
        }
        Ok(CauchyDataND {
            n,
            phi0: None,
            phi1: None,
            f: None,
        })
    }

    pub fn support(&self) -> f64 {
        let r0 = self.phi0.as_ref().map_or(0.0, |d| d.support());
        let r1 = self.phi1.as_ref().map_or(0.0, |d| d.support());
        let rf = self.f.as_ref().map_or(0.0, |d| d.radius());
        r0.max(r1).max(rf)
    }
}

struct Profile<'a> {
    g: &'a (dyn Fn(f64) -> f64 + Send + Sync),
    dg: &'a (dyn Fn(f64) -> f64 + Send + Sync),
    support: f64,
}

/// A function on Rⁿ as seen by the mean-value machinery.
struct View<'a> {
    f: &'a (dyn Fn(&[f64]) -> f64 + Send + Sync),
    grad: Option<&'a (dyn Fn(&[f64], &mut [f64]) + Send + Sync)>,
    radial: Option<Profile<'a>>,
    support: f64,
}

impl View<'_> {
    fn eval(&self, y: &[f64]) -> f64 {
        if norm(y) > self.support {
            0.0
        } else {
            (self.f)(y)
        }
    }
}

/// Average of φ over the sphere of radius r about x; the dimension is the
/// rule's.
pub fn sphere_mean<F>(phi: F, x: &[f64], r: f64, rule: &SphereRule) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius r = {r} must be >= 0")));
    }
    if x.len() != rule.dim {
        return Err(Error::Validation(format!(
            "point of dimension {} for a rule on S^{}",
            x.len(),
            rule.dim - 1
        )));
    }
    let mut y = [0.0; 3];
    let mut s = 0.0;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        for i in 0..rule.dim {
            y[i] = x[i] + r * p[i];
        }
        s += w * phi(&y[..rule.dim]);
    }
    Ok(s)
}

/// ∫_{B₁²} φ(x + r y)/√(1 − |y|²) dy for x ∈ R².
pub fn ball_mean_weighted<F>(phi: F, x: &[f64], r: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius r = {r} must be >= 0")));
    }
    if x.len() != 2 {
        return Err(Error::Validation(
            "the weighted ball integral is for n = 2".into(),
        ));
    }
    weighted_disc_integral(|y| Ok(phi(&[x[0] + r * y[0], x[1] + r * y[1]])), spec)
}

/// Richardson-extrapolated central derivative of an odd function F at r.
fn odd_derivative(mut f: impl FnMut(f64) -> Result<f64>, r: f64) -> Result<f64> {
    let h = 1e-4 * (1.0 + r);
    let mut d = |h: f64| -> Result<f64> { Ok((f(r + h)? - f(r - h)?) / (2.0 * h)) };
    let (d1, d2, d4) = (d(h)?, d(h / 2.0)?, d(h / 4.0)?);
    let (r1, r2) = ((4.0 * d2 - d1) / 3.0, (4.0 * d4 - d2) / 3.0);
    let est = (16.0 * r2 - r1) / 15.0;
    if (r2 - r1).abs() > 1e-6 * (1.0 + est.abs()) {
        return Err(Error::DerivativeFailure(format!(
            "radial derivative at r = {r} did not settle: {r1} vs {r2}"
        )));
    }
    Ok(est)
}

/// ∂_r(r·mean over the sphere) for a radial function about the origin,
/// evaluated at |x| = ρ: [(ρ+r)g(ρ+r) + (ρ−r)g(|ρ−r|)]/(2ρ).
fn radial_sphere_wave(p: &Profile<'_>, rho: f64, r: f64) -> f64 {
    let g = |s: f64| if s > p.support { 0.0 } else { (p.g)(s) };
    let dg = |s: f64| if s > p.support { 0.0 } else { (p.dg)(s) };
    if rho < 1e-5 * (1.0 + r) {
        g(r) + r * dg(r)
    } else {
        ((rho + r) * g(rho + r) + (rho - r) * g((rho - r).abs())) / (2.0 * rho)
    }
}

/// v(x, r): the solution at time r of the flat wave equation with data
/// (φ, 0), normalized so that v(x, 0) = φ(x).
fn wave_mean(view: &View<'_>, x: &[f64], r: f64, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    let rho = norm(x);
    if view.support.is_finite() {
        let far = rho - r > view.support || (n == 3 && r - rho > view.support);
        if far {
            return Ok(0.0);
        }
    }
    // Differenced quadratures need far less noise than the target accuracy.
    let fd_spec = spec.scaled(1e-3);
    match n {
        3 => {
            if let Some(p) = &view.radial {
                return Ok(radial_sphere_wave(p, rho, r));
            }
            let axis = [x[0], x[1], x[2]];
            if let Some(grad) = view.grad {
                let mut gv = [0.0; 3];
                adaptive_sphere_mean(
                    |p| {
                        let y: [f64; 3] = std::array::from_fn(|i| x[i] + r * p[i]);
                        if norm(&y) > view.support {
                            return Ok(0.0);
                        }
                        grad(&y, &mut gv);
                        Ok((view.f)(&y) + r * (gv[0] * p[0] + gv[1] * p[1] + gv[2] * p[2]))
                    },
                    axis,
                    spec,
                )
            } else {
                let mean = |s: f64| -> Result<f64> {
                    let a = s.abs();
                    let m = adaptive_sphere_mean(
                        |p| Ok(view.eval(&std::array::from_fn::<f64, 3, _>(|i| x[i] + a * p[i]))),
                        axis,
                        &fd_spec,
                    )?;
                    Ok(s * m)
                };
                odd_derivative(mean, r)
            }
        }
        2 => {
            if let Some(grad) = view.grad {
                let mut gv = [0.0; 2];
                let j = weighted_disc_integral(
                    |p| {
                        let y = [x[0] + r * p[0], x[1] + r * p[1]];
                        if norm(&y) > view.support {
                            return Ok(0.0);
                        }
                        grad(&y, &mut gv);
                        Ok((view.f)(&y) + r * (gv[0] * p[0] + gv[1] * p[1]))
                    },
                    spec,
                )?;
                Ok(j / (2.0 * PI))
            } else {
                let disc = |s: f64| -> Result<f64> {
                    let a = s.abs();
                    let j = weighted_disc_integral(
                        |p| Ok(view.eval(&[x[0] + a * p[0], x[1] + a * p[1]])),
                        &fd_spec,
                    )?;
                    Ok(s * j / (2.0 * PI))
                };
                odd_derivative(disc, r)
            }
        }
        _ => Err(unsupported(n)),
    }
}

/// v_φ(x, r) for n = 2, 3: the flat wave-equation solution with data (φ, 0)
/// at time r, from spherical means (n = 3) or the weighted disc integral
/// (n = 2). Uses the analytic gradient under the integral when available,
/// otherwise Richardson-extrapolated differences.
pub fn v_phi(field: &FieldND, x: &[f64], r: f64, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius r = {r} must be >= 0")));
    }
    if x.len() != n {
        return Err(Error::Validation(format!(
            "point has {} coordinates, n = {n}",
            x.len()
        )));
    }
    wave_mean(&field.view(), x, r, n, spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Homogeneous,
    Source,
}

#[derive(Clone, Debug)]
pub struct SolutionND {
    data: CauchyDataND,
    mass: CurvedMass,
    spec: QuadratureSpec,
    part: Part,
}

fn check_data(data: &CauchyDataND, spec: &QuadratureSpec) -> Result<()> {
    spec.validate()?;
    if !(data.n == 2 || data.n == 3) {
        return Err(unsupported(data.n));
    }
    Ok(())
}

/// u(x,t) = e^(t/2) v_φ₀(x, φ(t)) + 2∫₀^φ(t) v_φ₀(x,z) K₀(z,t) dz
///        + 2∫₀^φ(t) v_φ₁(x,z) K₁(z,t) dz,  φ(t) = 1 − e^(−t).
pub fn solve_homogeneous_nd(
    data: CauchyDataND,
    mass: CurvedMass,
    spec: QuadratureSpec,
) -> Result<SolutionND> {
    check_data(&data, &spec)?;
    Ok(SolutionND {
        data,
        mass,
        spec,
        part: Part::Homogeneous,
    })
}

/// u(x,t) = 2∫₀^t db ∫₀^(e^(−b)−e^(−t)) dr v(x,r;b) E(r,t;0,b), where v(·,·;b)
/// is built from f(·,b).
pub fn solve_source_nd(
    data: CauchyDataND,
    mass: CurvedMass,
    spec: QuadratureSpec,
) -> Result<SolutionND> {
    check_data(&data, &spec)?;
    Ok(SolutionND {
        data,
        mass,
        spec,
        part: Part::Source,
    })
}

/// Radii z ∈ [0, r] at which the sphere (n = 3) or ball (n = 2) of radius z
/// about x meets the support ball of radius s.
fn radius_range(rho: f64, s: f64, r: f64, n: usize) -> Option<(f64, f64)> {
    let lo = (rho - s).max(0.0);
    let hi = if n == 3 { (rho + s).min(r) } else { r };
    (hi > lo).then_some((lo, hi))
}

impl SolutionND {
    pub fn dim(&self) -> usize {
        self.data.n
    }

    pub fn mass(&self) -> &CurvedMass {
        &self.mass
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        if x.len() != self.data.n {
            return Err(Error::Validation(format!(
                "point has {} coordinates, n = {}",
                x.len(),
                self.data.n
            )));
        }
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time t = {t} must be >= 0")));
        }
        match self.part {
            Part::Homogeneous => self.homogeneous(x, t),
            Part::Source => self.source(x, t),
        }
    }

    pub fn eval_many(&self, points: &[(Vec<f64>, f64)]) -> Result<Vec<f64>> {
        points.par_iter().map(|(x, t)| self.eval(x, *t)).collect()
    }

    fn homogeneous(&self, x: &[f64], t: f64) -> Result<f64> {
        let n = self.data.n;
        let r = phi(t);
        let mut u = 0.0;
        if let Some(p0) = &self.data.phi0 {
            u += (t / 2.0).exp() * wave_mean(&p0.view(), x, r, n, &self.spec)?;
        }
        if t == 0.0 {
            return Ok(u);
        }
        let rho = norm(x);
        for (field, k0) in [(&self.data.phi0, true), (&self.data.phi1, false)] {
            let Some(field) = field else { continue };
            let Some((lo, hi)) = radius_range(rho, field.support(), r, n) else {
                continue;
            };
            let view = field.view();
            let inner_spec = self.spec.scaled(0.1);
            let integrand = |z: f64| -> Result<f64> {
                let k = if k0 {
                    evaluate_k0(z, t, &self.mass)?.value
                } else {
                    evaluate_k1(z, t, &self.mass)?.value
                };
                Ok(2.0 * wave_mean(&view, x, z, n, &inner_spec)? * k)
            };
            u += kernel_integral(integrand, lo, hi, r, k0, &self.spec)?;
        }
        Ok(u)
    }

    /// v(x, r; b) for the source slice at time b.
    fn source_wave(&self, src: &SourceND, x: &[f64], r: f64, b: f64) -> Result<f64> {
        let f = move |y: &[f64]| (src.f)(y, b);
        let grad_fn = src.grad.as_ref().map(|g| {
            let g = g.clone();
            move |y: &[f64], out: &mut [f64]| g(y, b, out)
        });
        let (g, dg) = match &src.radial {
            Some((g, dg)) => {
                let (g, dg) = (g.clone(), dg.clone());
                (Some(move |s: f64| g(s, b)), Some(move |s: f64| dg(s, b)))
            }
            None => (None, None),
        };
        let profile = match (&g, &dg) {
            (Some(g), Some(dg)) => Some(Profile {
                g,
                dg,
                support: src.radius(),
            }),
            _ => None,
        };
        let grad_ref = grad_fn
            .as_ref()
            .map(|g| g as &(dyn Fn(&[f64], &mut [f64]) + Send + Sync));
        let view = View {
            f: &f,
            grad: grad_ref,
            radial: profile,
            support: src.radius(),
        };
        wave_mean(&view, x, r, self.data.n, &self.spec.scaled(0.01))
    }

    fn source(&self, x: &[f64], t: f64) -> Result<f64> {
        let Some(src) = &self.data.f else {
            return Ok(0.0);
        };
        let [w0, w1] = src.window();
        let (b0, b1) = (w0.max(0.0), w1.min(t));
        if !(b1 > b0) {
            return Ok(0.0);
        }
        let n = self.data.n;
        let rho = norm(x);
        let inner_spec = self.spec.scaled(0.1);
        let outer = |b: f64| -> Result<f64> {
            let a = horizon_gap(b, t);
            let Some((lo, hi)) = radius_range(rho, src.radius(), a, n) else {
                return Ok(0.0);
            };
            let inner = |r: f64| -> Result<f64> {
                Ok(2.0 * self.source_wave(src, x, r, b)? * e_value(r, t, 0.0, b, &self.mass)?)
            };
            Ok(adaptive_gl(inner, &[lo, hi], &inner_spec)?.value)
        };
        Ok(adaptive_gl(outer, &[b0, b1], &self.spec)?.value)
    }

    /// u at the points ρ·e₁ for radial data, with fixed composite rules whose
    /// kernel values are shared across ρ (`panels` panels of 32 nodes).
    pub fn eval_radial_slice(&self, rhos: &[f64], t: f64, panels: usize) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time t = {t} must be >= 0")));
        }
        let n = self.data.n;
        let point = |rho: f64| -> Vec<f64> {
            let mut p = vec![0.0; n];
            p[0] = rho;
            p
        };
        let panels = panels.max(1);
        let mut out = vec![0.0; rhos.len()];
        match self.part {
            Part::Homogeneous => {
                let r = phi(t);
                if let Some(p0) = &self.data.phi0 {
                    let view = p0.view();
                    for (o, &rho) in out.iter_mut().zip(rhos) {
                        *o += (t / 2.0).exp() * wave_mean(&view, &point(rho), r, n, &self.spec)?;
                    }
                }
                if t == 0.0 {
                    return Ok(out);
                }
                let (zs, ws) = composite_nodes(0.0, r, panels, gl32());
                for (field, k0) in [(&self.data.phi0, true), (&self.data.phi1, false)] {
                    let Some(field) = field else { continue };
                    let kw: Vec<f64> = zs
                        .par_iter()
                        .zip(&ws)
                        .map(|(&z, &w)| {
                            let k = if k0 {
                                evaluate_k0(z, t, &self.mass)?.value
                            } else {
                                evaluate_k1(z, t, &self.mass)?.value
                            };
                            Ok(2.0 * k * w)
                        })
                        .collect::<Result<_>>()?;
                    let view = field.view();
                    let add: Vec<f64> = rhos
                        .par_iter()
                        .map(|&rho| {
                            let p = point(rho);
                            zs.iter()
                                .zip(&kw)
                                .map(|(&z, &k)| Ok(wave_mean(&view, &p, z, n, &self.spec)? * k))
                                .sum::<Result<f64>>()
                        })
                        .collect::<Result<_>>()?;
                    out.iter_mut().zip(add).for_each(|(o, a)| *o += a);
                }
            }
            Part::Source => {
                let Some(src) = &self.data.f else {
                    return Ok(out);
                };
                let [w0, w1] = src.window();
                let (b0, b1) = (w0.max(0.0), w1.min(t));
                if !(b1 > b0) {
                    return Ok(out);
                }
                let (bs, bw) = composite_nodes(b0, b1, panels, gl32());
                let (ss, sw) = composite_nodes(0.0, 1.0, panels, gl32());
                let mut table = Vec::with_capacity(bs.len() * ss.len());
                for (&b, &wb) in bs.iter().zip(&bw) {
                    let a = horizon_gap(b, t);
                    for (&s, &w) in ss.iter().zip(&sw) {
                        let e = e_value(a * s, t, 0.0, b, &self.mass)?;
                        table.push((b, a * s, 2.0 * e * w * a * wb));
                    }
                }
                let add: Vec<f64> = rhos
                    .par_iter()
                    .map(|&rho| {
                        let p = point(rho);
                        table
                            .iter()
                            .map(|&(b, r, k)| Ok(self.source_wave(src, &p, r, b)? * k))
                            .sum::<Result<f64>>()
                    })
                    .collect::<Result<_>>()?;
                out.iter_mut().zip(add).for_each(|(o, a)| *o += a);
            }
        }
        Ok(out)
    }
}
