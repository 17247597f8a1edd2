//! Fixed quadrature rules on spheres and the weighted unit disc.

use crate::error::{Error, Result};
use crate::quad::{adaptive_gl, GaussLegendre, QuadratureSpec};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes y on S^(n−1) with weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Product rule on S²: Gauss–Legendre in cos θ times the trapezoid in
    /// the azimuth. Exact for spherical harmonics of degree < min(2·n_theta, n_phi).
    pub fn product(n_theta: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::new(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (&c, &w) in gl.nodes.iter().zip(&gl.weights) {
            let s = (1.0 - c * c).sqrt();
            for k in 0..n_phi {
                let a = 2.0 * PI * k as f64 / n_phi as f64;
                points.push([s * a.cos(), s * a.sin(), c]);
                weights.push(0.5 * w / n_phi as f64);
            }
        }
        SphereRule {
            dim: 3,
            points,
            weights,
        }
    }

    /// Trapezoid rule on the unit circle.
    pub fn circle(m: usize) -> Self {
        let points = (0..m)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / m as f64;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        SphereRule {
            dim: 2,
            points,
            weights: vec![1.0 / m as f64; m],
        }
    }

    /// 32 × 64 product rule for n = 3, 128-point circle for n = 2.
    pub fn standard(n: usize) -> Result<&'static SphereRule> {
        static S2: OnceLock<SphereRule> = OnceLock::new();
        static S1: OnceLock<SphereRule> = OnceLock::new();
        match n {
            2 => Ok(S1.get_or_init(|| SphereRule::circle(CIRCLE_NODES))),
            3 => Ok(S2.get_or_init(|| SphereRule::product(32, 64))),
            _ => Err(unsupported(n)),
        }
    }
}

pub(crate) const CIRCLE_NODES: usize = 128;

pub(crate) fn unsupported(n: usize) -> Error {
    Error::Validation(format!(
        "dimension n = {n} is not supported; the shipped formulas cover n = 2 and n = 3"
    ))
}

/// ∫_{B₁²} g(y)/√(1−|y|²) dy with ρ = sin ψ, so the weight becomes
/// sin ψ dψ dα. Both integrals are adaptive; the inner one runs at a tenth of
/// the tolerance.
pub fn weighted_disc_integral<F>(mut g: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut([f64; 2]) -> Result<f64>,
{
    let inner = spec.scaled(0.1);
    let ring = |psi: f64, g: &mut F| -> Result<f64> {
        let s = psi.sin();
        let around = adaptive_gl(
            |a: f64| g([s * a.cos(), s * a.sin()]),
            &[0.0, PI, 2.0 * PI],
            &inner,
        )?;
        Ok(s * around.value)
    };
    Ok(adaptive_gl(|psi| ring(psi, &mut g), &[0.0, 0.5 * PI], spec)?.value)
}

/// Mean of g over S² by adaptive integration in cos θ and the azimuth, with
/// the pole along `axis` (any direction if `axis` vanishes).
pub fn adaptive_sphere_mean<F>(mut g: F, axis: [f64; 3], spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut([f64; 3]) -> Result<f64>,
{
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let a = if n > 0.0 {
        axis.map(|v| v / n)
    } else {
        [0.0, 0.0, 1.0]
    };
    let t = if a[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d = t[0] * a[0] + t[1] * a[1] + t[2] * a[2];
    let mut e1 = [t[0] - d * a[0], t[1] - d * a[1], t[2] - d * a[2]];
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1 = e1.map(|v| v / n1);
    let e2 = [
        a[1] * e1[2] - a[2] * e1[1],
        a[2] * e1[0] - a[0] * e1[2],
        a[0] * e1[1] - a[1] * e1[0],
    ];
    let inner = spec.scaled(0.1);
    let ring = |u: f64, g: &mut F| -> Result<f64> {
        let s = ((1.0 - u) * (1.0 + u)).max(0.0).sqrt();
        let around = adaptive_gl(
            |al: f64| {
                let (sa, ca) = al.sin_cos();
                g(std::array::from_fn(|i| {
                    s * (ca * e1[i] + sa * e2[i]) + u * a[i]
                }))
            },
            &[0.0, PI, 2.0 * PI],
            &inner,
        )?;
        Ok(around.value)
    };
    Ok(adaptive_gl(|u| ring(u, &mut g), &[-1.0, 0.0, 1.0], spec)?.value / (4.0 * PI))
}
