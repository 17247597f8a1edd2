//! The fundamental solution E(x,t;x₀,t₀), the Cauchy kernels K₀ and K₁, and
//! the Riemann function R(l,m;a,b) of the operator ∂t² − e^(−2t)∂x² + M².

mod identities;

pub use identities::{
    pde_residual, riemann_conditions, sample_cone_points, verify_kernel_identities, IdentityReport,
    IdentityResidual, RiemannReport, SampleSpec,
};

use crate::error::{Error, Result};
use crate::hypergeom::{gauss_2f1, gauss_2f1_reduced, HypergeomParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative tolerance requested from the hypergeometric series by the kernels.
pub const KERNEL_TOL: f64 = 1e-14;
/// Largest accepted hypergeometric argument.
pub const MAX_ARG: f64 = 1.0 - 1e-14;
/// Imaginary parts larger than this (relative to 1 + |Re|) are errors.
pub const REALNESS_LIMIT: f64 = 1e-6;
/// Slightly negative arguments from rounding on the cone boundary are clamped.
const BOUNDARY_SLACK: f64 = 1e-13;

/// The curved mass M ≥ 0, together with γ = 1/2 + iM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvedMass {
    m: f64,
}

impl CurvedMass {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::Domain(format!(
                "curved mass M = {m} must be finite and >= 0"
            )));
        }
        Ok(CurvedMass { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::new(0.5, self.m)
    }
}

/// A spacetime pair (x, t; x₀, t₀) in one space dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub x: f64,
    pub t: f64,
    pub x0: f64,
    pub t0: f64,
}

/// e^(−t₀) − e^(−t) without cancellation for nearby times.
pub fn horizon_gap(t0: f64, t: f64) -> f64 {
    if t >= t0 {
        -(-t0).exp() * (-(t - t0)).exp_m1()
    } else {
        (-t).exp() * (-(t0 - t)).exp_m1()
    }
}

/// φ(t) = 1 − e^(−t), the radius of the dependence domain at time t.
pub fn phi(t: f64) -> f64 {
    -(-t).exp_m1()
}

impl KernelPoint {
    pub fn new(x: f64, t: f64, x0: f64, t0: f64) -> Self {
        KernelPoint { x, t, x0, t0 }
    }

    /// |x − x₀| ≤ e^(−t₀) − e^(−t).
    pub fn in_forward_cone(&self) -> bool {
        (self.x - self.x0).abs() <= horizon_gap(self.t0, self.t)
    }

    /// |x − x₀| ≤ −(e^(−t₀) − e^(−t)).
    pub fn in_backward_cone(&self) -> bool {
        (self.x - self.x0).abs() <= -horizon_gap(self.t0, self.t)
    }

    /// ((e^(−t₀)−e^(−t))² − (x−x₀)²) / ((e^(−t₀)+e^(−t))² − (x−x₀)²), with
    /// the denominator.
    pub fn hypergeom_arg(&self) -> (f64, f64) {
        let a = horizon_gap(self.t0, self.t).abs();
        let b = (-self.t0).exp() + (-self.t).exp();
        let d = (self.x - self.x0).abs();
        let num = (a - d) * (a + d);
        let den = (b - d) * (b + d);
        (num / den, den)
    }
}

/// Characteristic coordinates l = x + e^(−t), m = x − e^(−t) of a point and
/// a = x₀ + e^(−t₀), b = x₀ − e^(−t₀) of the source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharCoords {
    pub l: f64,
    pub m: f64,
    pub a: f64,
    pub b: f64,
}

impl CharCoords {
    pub fn from_point(p: &KernelPoint) -> Self {
        let (q, q0) = ((-p.t).exp(), (-p.t0).exp());
        CharCoords {
            l: p.x + q,
            m: p.x - q,
            a: p.x0 + q0,
            b: p.x0 - q0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub imag_residual: f64,
    pub hypergeom_arg: f64,
}

fn realize(v: Complex64, arg: f64) -> Result<KernelValue> {
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonConvergent {
            terms: 0,
            last_term: f64::NAN,
        });
    }
    if v.im.abs() > REALNESS_LIMIT * (1.0 + v.re.abs()) {
        return Err(Error::NotReal {
            real: v.re,
            imag: v.im,
        });
    }
    Ok(KernelValue {
        value: v.re,
        imag_residual: v.im,
        hypergeom_arg: arg,
    })
}

fn checked_arg(zeta: f64, den: f64) -> Result<f64> {
    if !(den > 0.0) || !(zeta >= -BOUNDARY_SLACK) || zeta > MAX_ARG {
        return Err(Error::OutsideCone { arg: zeta });
    }
    Ok(zeta.max(0.0))
}

/// E(x,t;x₀,t₀) = (4e^(−t₀−t))^(iM) ((e^(−t)+e^(−t₀))² − (x−x₀)²)^(−1/2−iM)
///               × F(1/2+iM, 1/2+iM; 1; ζ)
/// inside D₊(x₀,t₀) ∪ D₋(x₀,t₀), including the cone boundary.
pub fn evaluate_e(p: &KernelPoint, mass: &CurvedMass) -> Result<KernelValue> {
    let (zeta, den) = p.hypergeom_arg();
    let zeta = checked_arg(zeta, den)?;
    let f = gauss_2f1(HypergeomParams::kernel(mass.m, zeta), KERNEL_TOL)?;
    let phase = mass.m * (4f64.ln() - p.t0 - p.t - den.ln());
    let v = Complex64::from_polar(den.powf(-0.5), phase) * f.value;
    realize(v, zeta)
}

/// Value of E only; convenience for quadrature integrands.
pub fn e_value(x: f64, t: f64, x0: f64, t0: f64, mass: &CurvedMass) -> Result<f64> {
    Ok(evaluate_e(&KernelPoint::new(x, t, x0, t0), mass)?.value)
}

fn check_kernel_domain(z: f64, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "kernel time t = {t} must be positive"
        )));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!(
            "kernel argument z = {z} must be >= 0"
        )));
    }
    if z >= phi(t) {
        return Err(Error::OutsideCone { arg: 0.0 });
    }
    Ok(())
}

/// K₁(z,t) = E(z,t;0,0) for 0 ≤ z < 1 − e^(−t).
pub fn evaluate_k1(z: f64, t: f64, mass: &CurvedMass) -> Result<KernelValue> {
    check_kernel_domain(z, t)?;
    evaluate_e(&KernelPoint::new(z, t, 0.0, 0.0), mass)
}

/// K₀(z,t) = −∂_b E(z,t;0,b) at b = 0, for 0 ≤ z < 1 − e^(−t).
///
/// With q = e^(−t), δ = (1−q)² − z², D = (1+q)² − z² and ζ = δ/D,
///
///   K₀ = (4q)^(iM) D^(−iM) / (δ √D) · [P F(γ,γ;1;ζ) + Q F(γ−1,γ;1;ζ)],
///   P = q − 1 − iM(q² − 1 − z²),  Q = (1 − q² + z²)(1/2 − iM).
///
/// Since P + Q = −δ/2 exactly, the bracket equals
/// −δ/2 + ζ (P G₁ + Q G₂) with Gᵢ = (Fᵢ − 1)/ζ, so the division by δ is done
/// analytically and the vanishing of the bracket at the cone edge costs no
/// precision.
pub fn evaluate_k0(z: f64, t: f64, mass: &CurvedMass) -> Result<KernelValue> {
    check_kernel_domain(z, t)?;
    let m = mass.m;
    let q = (-t).exp();
    let ph = phi(t);
    let delta = (ph - z) * (ph + z);
    let d = (1.0 + q - z) * (1.0 + q + z);
    let zeta = checked_arg(delta / d, d)?;
    let g = mass.gamma();
    let g1 = gauss_2f1_reduced(HypergeomParams::new(g, g, 1.0.into(), zeta), KERNEL_TOL)?;
    let g2 = gauss_2f1_reduced(
        HypergeomParams::new(g - 1.0, g, 1.0.into(), zeta),
        KERNEL_TOL,
    )?;
    let s = ph * (1.0 + q) + z * z;
    let p = Complex64::new(-ph, m * s);
    let qq = Complex64::new(0.5, -m) * s;
    let bracket_over_delta = -0.5 + (p * g1.value + qq * g2.value) / d;
    let phase = m * (4f64.ln() - t - d.ln());
    let v = Complex64::from_polar(d.powf(-0.5), phase) * bracket_over_delta;
    realize(v, zeta)
}

/// Riemann function
/// R(l,m;a,b) = (a−b)^(iM) (l−m)^(1+iM) (l−b)^(−1/2−iM) (a−m)^(−1/2−iM)
///              × F(γ, γ; 1; (l−a)(m−b)/((l−b)(m−a))).
pub fn riemann_r(c: &CharCoords, mass: &CurvedMass) -> Result<Complex64> {
    let CharCoords { l, m, a, b } = *c;
    let (ab, lm, lb, am) = (a - b, l - m, l - b, a - m);
    if !(ab > 0.0 && lm > 0.0 && lb > 0.0 && am > 0.0) {
        return Err(Error::Domain(format!(
            "characteristic coordinates out of range: l={l}, m={m}, a={a}, b={b}"
        )));
    }
    let arg = (l - a) * (m - b) / (lb * (m - a));
    let arg = if arg.abs() < BOUNDARY_SLACK { 0.0 } else { arg };
    if !(0.0..1.0).contains(&arg) {
        return Err(Error::Domain(format!(
            "Riemann function argument {arg} not in [0, 1)"
        )));
    }
    let f = gauss_2f1(HypergeomParams::kernel(mass.m, arg), KERNEL_TOL)?;
    let i_m = Complex64::new(0.0, mass.m);
    let log = i_m * ab.ln() + (1.0 + i_m) * lm.ln() + (-0.5 - i_m) * (lb.ln() + am.ln());
    Ok(log.exp() * f.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mass(m: f64) -> CurvedMass {
        CurvedMass::new(m).unwrap()
    }

    /// Complete elliptic integral oracle: F(1/2,1/2;1;z) = 1/AGM(1, √(1−z)).
    fn agm_f(z: f64) -> f64 {
        let (mut x, mut y) = (1.0f64, (1.0 - z).sqrt());
        for _ in 0..60 {
            let nx = 0.5 * (x + y);
            y = (x * y).sqrt();
            x = nx;
        }
        1.0 / x
    }

    #[test]
    fn rejects_negative_mass() {
        assert!(CurvedMass::new(-0.1).is_err());
        assert!(CurvedMass::new(f64::NAN).is_err());
        assert_eq!(mass(2.0).gamma(), Complex64::new(0.5, 2.0));
    }

    #[test]
    fn value_at_source_point() {
        for t in [0.0, 1.0, 2.0] {
            for m in [0.0, 0.7, 3.0] {
                let v = e_value(0.0, t, 0.0, t, &mass(m)).unwrap();
                assert!((v - t.exp() / 2.0).abs() < 1e-13 * t.exp(), "t={t} M={m}");
            }
        }
    }

    #[test]
    fn value_at_horizon_edge() {
        let t: f64 = 1.0;
        let v = e_value(phi(t), t, 0.0, 0.0, &mass(0.7)).unwrap();
        assert!((v - 0.5 * (t / 2.0).exp()).abs() < 1e-13);
    }

    #[test]
    fn boundary_value() {
        let (b, t): (f64, f64) = (0.5, 1.5);
        let x = (-b).exp() - (-t).exp();
        let v = e_value(x, t, 0.0, b, &mass(2.0)).unwrap();
        let expected = (4.0 * (-b - t).exp()).powf(-0.5);
        assert!((v - expected).abs() < 1e-13 * expected);
    }

    #[test]
    fn k1_at_origin_by_composition() {
        let (t, m): (f64, f64) = (1.3, 0.8);
        let q = (-t).exp();
        let z = ((1.0 - q) / (1.0 + q)).powi(2);
        let f = gauss_2f1(HypergeomParams::kernel(m, z), 1e-15)
            .unwrap()
            .value;
        let pre = (Complex64::new(0.0, m) * (4.0 * q).ln()).exp()
            * (Complex64::new(-1.0, -2.0 * m) * (1.0 + q).ln()).exp();
        let expected = (pre * f).re;
        let v = evaluate_k1(0.0, t, &mass(m)).unwrap().value;
        assert!((v - expected).abs() < 1e-13 * expected.abs());
    }

    #[test]
    fn k1_massless_matches_elliptic_oracle() {
        let (z, t): (f64, f64) = (0.3, 1.0);
        let q = (-t).exp();
        let d = (1.0 + q).powi(2) - z * z;
        let zeta = ((1.0 - q).powi(2) - z * z) / d;
        let expected = agm_f(zeta) / d.sqrt();
        let v = evaluate_k1(z, t, &mass(0.0)).unwrap().value;
        assert!((v - expected).abs() < 1e-13 * expected);
    }

    #[test]
    fn k1_approaches_edge_value() {
        let t: f64 = 2.0;
        let z = phi(t) * (1.0 - 1e-9);
        let v = evaluate_k1(z, t, &mass(1.0)).unwrap().value;
        assert!((v - 0.5 * (t / 2.0).exp()).abs() < 1e-7);
    }

    #[test]
    fn kernel_domain_errors() {
        let m = mass(1.0);
        assert!(matches!(
            evaluate_k1(0.7, 1.0, &m),
            Err(Error::OutsideCone { .. })
        ));
        assert!(matches!(
            evaluate_k0(0.7, 1.0, &m),
            Err(Error::OutsideCone { .. })
        ));
        assert!(matches!(evaluate_k0(-0.1, 1.0, &m), Err(Error::Domain(_))));
        assert!(matches!(evaluate_k1(0.0, 0.0, &m), Err(Error::Domain(_))));
        let outside = KernelPoint::new(0.9, 1.0, 0.0, 0.0);
        assert!(matches!(
            evaluate_e(&outside, &m),
            Err(Error::OutsideCone { .. })
        ));
    }

    /// −∂_b E(z,t;0,b) at b = 0 by central differences with one Richardson step.
    fn k0_difference(z: f64, t: f64, m: &CurvedMass) -> f64 {
        let h = 1e-5;
        let e = |b: f64| e_value(z, t, 0.0, b, m).unwrap();
        let d1 = (e(h) - e(-h)) / (2.0 * h);
        let d2 = (e(h / 2.0) - e(-h / 2.0)) / h;
        -(4.0 * d2 - d1) / 3.0
    }

    #[test]
    fn k0_matches_b_derivative() {
        for (z, t, m) in [
            (0.2, 1.0, 0.0),
            (0.5, 2.0, 1.5),
            (0.1, 0.5, 5.0),
            (0.05, 0.1, 0.3),
        ] {
            let v = evaluate_k0(z, t, &mass(m)).unwrap().value;
            let fd = k0_difference(z, t, &mass(m));
            assert!(
                (v - fd).abs() < 1e-6 * v.abs().max(1.0),
                "({z},{t},{m}): {v} vs {fd}"
            );
        }
    }

    #[test]
    fn k0_edge_limit() {
        // Limit at the cone edge equals minus the characteristic b-derivative,
        // e^(t/2)/4 + (1+4M²)(e^t − 1)e^(t/2)/16.
        let (t, m): (f64, f64) = (1.7, 0.9);
        let limit =
            -(0.25 * (t / 2.0).exp() + (1.0 + 4.0 * m * m) * t.exp_m1() * (t / 2.0).exp() / 16.0);
        for rel in [1e-4, 1e-8, 1e-12] {
            let z = phi(t) * (1.0 - rel);
            let v = evaluate_k0(z, t, &mass(m)).unwrap().value;
            assert!((v - limit).abs() < rel.sqrt() * limit.abs(), "rel={rel}");
        }
        let z = phi(t) * (1.0 - 1e-12);
        let v = evaluate_k0(z, t, &mass(m)).unwrap().value;
        assert!((v - limit).abs() < 1e-9 * limit.abs());
    }

    #[test]
    fn riemann_normalization() {
        let p = KernelPoint::new(0.3, 1.2, 0.3, 1.2);
        let c = CharCoords::from_point(&p);
        let r = riemann_r(&c, &mass(1.4)).unwrap();
        assert!((r - 1.0).norm() < 1e-13);
    }

    #[test]
    fn riemann_is_scaled_kernel() {
        let p = KernelPoint::new(0.1, 1.0, 0.0, 0.2);
        let c = CharCoords::from_point(&p);
        let r = riemann_r(&c, &mass(0.6)).unwrap();
        let e = evaluate_e(&p, &mass(0.6)).unwrap().value;
        assert!((r.re - (c.l - c.m) * e).abs() < 1e-13);
        assert!(r.im.abs() < 1e-12);
    }
}
