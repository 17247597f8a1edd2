//! Numerical checks of the closed-form identities satisfied by E, the
//! characteristic conditions of the Riemann function, and the PDE residual.

use super::{
    evaluate_e, evaluate_k0, horizon_gap, phi, riemann_r, CharCoords, CurvedMass, KernelPoint,
};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    /// Largest observation time sampled.
    pub t_max: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            count: 200,
            seed: 42,
            t_max: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub description: String,
    pub samples: usize,
    /// max |lhs − rhs| / max(1, |rhs|)
    pub max_residual: f64,
    /// (x, t, b) where the maximum was attained.
    pub worst_point: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub m: f64,
    pub identities: Vec<IdentityResidual>,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.identities
            .iter()
            .map(|r| r.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.identities.iter().all(|r| r.max_residual <= tol)
    }
}

fn scaled(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

/// Central difference with one Richardson step, O(h⁴).
fn central<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    let d1 = (f(x + h)? - f(x - h)?) / (2.0 * h);
    let d2 = (f(x + h / 2.0)? - f(x - h / 2.0)?) / h;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Second-order one-sided difference with two Richardson steps, O(h⁴).
/// A negative h differences to the left.
fn one_sided<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    let f0 = f(x)?;
    let mut d =
        |h: f64| -> Result<f64> { Ok((-3.0 * f0 + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h)) };
    let (d1, d2, d4) = (d(h)?, d(h / 2.0)?, d(h / 4.0)?);
    let (r1, r2) = ((4.0 * d2 - d1) / 3.0, (4.0 * d4 - d2) / 3.0);
    Ok((8.0 * r2 - r1) / 7.0)
}

struct Tracker {
    name: &'static str,
    description: &'static str,
    samples: usize,
    max_residual: f64,
    worst_point: [f64; 3],
}

impl Tracker {
    fn new(name: &'static str, description: &'static str) -> Self {
        Tracker {
            name,
            description,
            samples: 0,
            max_residual: 0.0,
            worst_point: [f64::NAN; 3],
        }
    }

    fn record(&mut self, r: f64, point: [f64; 3]) {
        self.samples += 1;
        if !(r <= self.max_residual) {
            self.max_residual = r;
            self.worst_point = point;
        }
    }

    fn finish(self) -> IdentityResidual {
        IdentityResidual {
            name: self.name.into(),
            description: self.description.into(),
            samples: self.samples,
            max_residual: self.max_residual,
            worst_point: self.worst_point,
        }
    }
}

/// Checks the symmetry, translation, boundary-value and boundary-derivative
/// identities of E, and K₀ = −∂_b E|_{b=0}, on random points with t ≤ t_max.
pub fn verify_kernel_identities(mass: &CurvedMass, spec: &SampleSpec) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = mass.m();
    let t_max = spec.t_max.max(0.3);
    let e = |x: f64, t: f64, x0: f64, t0: f64| -> Result<f64> {
        Ok(evaluate_e(&KernelPoint::new(x, t, x0, t0), mass)?.value)
    };

    let mut symmetry = Tracker::new("symmetry", "E(x,t;y,b) = E(y,b;x,t)");
    let mut translation = Tracker::new(
        "translation-evenness",
        "E(x,t;y,b) = E(x-y,t;0,b) = E(y-x,t;0,b)",
    );
    let mut char_value = Tracker::new(
        "characteristic-value",
        "E(x,t;0,b) = (e^-t (x+e^-t))^(-1/2)/2 on x = e^-b - e^-t",
    );
    let mut boundary = Tracker::new(
        "boundary-derivative",
        "d/db[e^-b E(e^-b - e^-t,t;0,b)] = -e^(t/2) e^(-b/2)/4",
    );
    let mut weighted = Tracker::new(
        "weighted-boundary-derivative",
        "d/db[b e^-b E(+-(e^-b - e^-t),t;0,b)] = e^(t/2) e^(-b/2)(2-b)/4",
    );
    let mut left_edge = Tracker::new(
        "left-edge-gradient",
        "dE/dx at x-y = -(e^-b - e^-t) equals -(1+4M^2) e^(t/2) e^(b/2)(e^t - e^b)/16",
    );
    let mut right_edge = Tracker::new(
        "right-edge-gradient",
        "dE/dx at x-y = e^-b - e^-t equals (1+4M^2) e^(t/2) e^(b/2)(e^t - e^b)/16",
    );
    let mut char_b = Tracker::new(
        "characteristic-b-derivative",
        "dE(x,t;0,b)/db at e^-b = x + e^-t equals e^t(4 + e^t x(1+4M^2))/(16 sqrt(1+e^t x))",
    );
    let mut k0 = Tracker::new("k0-b-derivative", "K0(z,t) = -dE(z,t;0,b)/db at b = 0");

    for _ in 0..spec.count {
        let t = rng.gen_range(0.2..t_max);
        let b = rng.gen_range(0.0..t - 0.1);
        let gap = horizon_gap(b, t);
        let y = rng.gen_range(-1.0..1.0);
        let x = y + rng.gen_range(-0.95..0.95) * gap;

        let lhs = e(x, t, y, b)?;
        symmetry.record(scaled(lhs, e(y, b, x, t)?), [x, t, b]);
        let shifted = e(x - y, t, 0.0, b)?;
        let mirrored = e(y - x, t, 0.0, b)?;
        translation.record(
            scaled(lhs, shifted).max(scaled(shifted, mirrored)),
            [x, t, b],
        );

        // Point on the right characteristic through the source (0, b*).
        let xc = rng.gen_range(0.02..0.98) * phi(t);
        let bc = -(xc + (-t).exp()).ln();
        let rhs = 0.5 / ((-t).exp() * (xc + (-t).exp())).sqrt();
        char_value.record(scaled(e(xc, t, 0.0, bc)?, rhs), [xc, t, bc]);

        let hb = 1e-3 * phi(t - b);
        let g = |b: f64| -> Result<f64> { Ok((-b).exp() * e(horizon_gap(b, t), t, 0.0, b)?) };
        let rhs = -0.25 * (t / 2.0).exp() * (-b / 2.0).exp();
        boundary.record(scaled(central(g, b, hb)?, rhs), [gap, t, b]);

        let rhs = 0.25 * (t / 2.0).exp() * (-b / 2.0).exp() * (2.0 - b);
        let mut worst = 0.0f64;
        for sign in [1.0, -1.0] {
            let g = |b: f64| -> Result<f64> {
                Ok(b * (-b).exp() * e(sign * horizon_gap(b, t), t, 0.0, b)?)
            };
            worst = worst.max(scaled(central(g, b, hb)?, rhs));
        }
        weighted.record(worst, [gap, t, b]);

        let hw = 2e-3 * gap;
        let edge =
            (1.0 + 4.0 * m * m) * (t / 2.0).exp() * (b / 2.0).exp() * (t.exp() - b.exp()) / 16.0;
        let f = |w: f64| e(w, t, 0.0, b);
        left_edge.record(scaled(one_sided(f, -gap, hw)?, -edge), [-gap, t, b]);
        right_edge.record(scaled(one_sided(f, gap, -hw)?, edge), [gap, t, b]);

        // Inside the cone means b < bc; the natural b-scale is x e^b.
        let hc = 2e-3 * xc / (-bc).exp();
        let f = |b: f64| e(xc, t, 0.0, b);
        let rhs = t.exp() * (4.0 + t.exp() * xc * (1.0 + 4.0 * m * m))
            / (16.0 * (1.0 + t.exp() * xc).sqrt());
        char_b.record(scaled(one_sided(f, bc, -hc)?, rhs), [xc, t, bc]);

        let z = rng.gen_range(0.0..0.9) * phi(t);
        let hk = 1e-3 * (phi(t) - z);
        let f = |b: f64| e(z, t, 0.0, b);
        let fd = -central(f, 0.0, hk)?;
        k0.record(scaled(evaluate_k0(z, t, mass)?.value, fd), [z, t, 0.0]);
    }

    Ok(IdentityReport {
        m,
        identities: [
            symmetry,
            translation,
            char_value,
            boundary,
            weighted,
            left_edge,
            right_edge,
            char_b,
            k0,
        ]
        .into_iter()
        .map(Tracker::finish)
        .collect(),
    })
}

/// Residuals of one characteristic condition at steps h and h/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub coarse: f64,
    pub fine: f64,
}

impl RefinementCheck {
    /// Observed convergence factor; 4 for a second-order stencil.
    pub fn ratio(&self) -> f64 {
        self.coarse / self.fine
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannReport {
    pub m: f64,
    pub h: f64,
    /// ∂_l R − R/(2(l−b)) on m = b.
    pub along_m_equals_b: RefinementCheck,
    /// ∂_m R + R/(2(a−m)) on l = a.
    pub along_l_equals_a: RefinementCheck,
    /// |R(a,b;a,b) − 1|
    pub normalization: f64,
}

/// Checks the Riemann function's values on the two characteristics through
/// (a, b) by central differences with steps h and h/2.
pub fn riemann_conditions(mass: &CurvedMass, spec: &SampleSpec, h: f64) -> Result<RiemannReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = |l: f64, m: f64, a: f64, b: f64| -> Result<f64> {
        let v = riemann_r(&CharCoords { l, m, a, b }, mass)?;
        Ok(v.re)
    };
    let mut along_m = [0.0f64; 2];
    let mut along_l = [0.0f64; 2];
    let mut normalization = 0.0f64;
    for _ in 0..spec.count.max(1) {
        let x0 = rng.gen_range(-1.0..1.0);
        let t0: f64 = rng.gen_range(0.0..1.0);
        let (a, b) = (x0 + (-t0).exp(), x0 - (-t0).exp());
        let w = a - b;
        let l = b + rng.gen_range(0.3..1.5) * w;
        let m = a - rng.gen_range(0.3..1.5) * w;
        for (k, step) in [h, h / 2.0].into_iter().enumerate() {
            let dl = (r(l + step, b, a, b)? - r(l - step, b, a, b)?) / (2.0 * step);
            along_m[k] = along_m[k].max((dl - r(l, b, a, b)? / (2.0 * (l - b))).abs());
            let dm = (r(a, m + step, a, b)? - r(a, m - step, a, b)?) / (2.0 * step);
            along_l[k] = along_l[k].max((dm + r(a, m, a, b)? / (2.0 * (a - m))).abs());
        }
        let v = riemann_r(&CharCoords { l: a, m: b, a, b }, mass)?;
        normalization = normalization.max((v - 1.0).norm());
    }
    Ok(RiemannReport {
        m: mass.m(),
        h,
        along_m_equals_b: RefinementCheck {
            coarse: along_m[0],
            fine: along_m[1],
        },
        along_l_equals_a: RefinementCheck {
            coarse: along_l[0],
            fine: along_l[1],
        },
        normalization,
    })
}

/// E_tt − e^(−2t)E_xx + M²E at an interior point by the 5-point stencil.
pub fn pde_residual(p: &KernelPoint, mass: &CurvedMass, h: f64) -> Result<f64> {
    let e = |dx: f64, dt: f64| -> Result<f64> {
        Ok(evaluate_e(&KernelPoint::new(p.x + dx, p.t + dt, p.x0, p.t0), mass)?.value)
    };
    let c = e(0.0, 0.0)?;
    let ett = (e(0.0, h)? - 2.0 * c + e(0.0, -h)?) / (h * h);
    let exx = (e(h, 0.0)? - 2.0 * c + e(-h, 0.0)?) / (h * h);
    Ok(ett - (-2.0 * p.t).exp() * exx + mass.m() * mass.m() * c)
}

/// Random points strictly inside the forward or backward cone, with
/// |t − t₀| ≤ 4.
pub fn sample_cone_points(count: usize, seed: u64) -> Vec<KernelPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t0 = rng.gen_range(-1.0..2.0);
            let dt = rng.gen_range(0.01..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let t = t0 + dt;
            let x0 = rng.gen_range(-1.0..1.0);
            let x = x0 + rng.gen_range(-0.999..0.999) * horizon_gap(t0, t).abs();
            KernelPoint::new(x, t, x0, t0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mass(m: f64) -> CurvedMass {
        CurvedMass::new(m).unwrap()
    }

    #[test]
    fn identities_hold_for_several_masses() {
        let spec = SampleSpec {
            count: 40,
            ..SampleSpec::default()
        };
        for m in [0.0, 0.5, 2.0, 5.0] {
            let report = verify_kernel_identities(&mass(m), &spec).unwrap();
            for id in &report.identities {
                assert!(id.max_residual < 1e-6, "M={m}: {id:?}");
                assert_eq!(id.samples, 40);
            }
        }
    }

    #[test]
    fn riemann_characteristic_conditions_converge_at_second_order() {
        let spec = SampleSpec {
            count: 20,
            ..SampleSpec::default()
        };
        let rep = riemann_conditions(&mass(1.0), &spec, 0.02).unwrap();
        for c in [rep.along_m_equals_b, rep.along_l_equals_a] {
            assert!((3.5..4.5).contains(&c.ratio()), "{c:?}");
        }
        assert!(rep.normalization < 1e-13);
    }

    #[test]
    fn pde_residual_is_truncation_error() {
        let p = KernelPoint::new(0.1, 1.0, 0.0, 0.0);
        for m in [0.0, 1.5] {
            let r1 = pde_residual(&p, &mass(m), 1e-2).unwrap();
            let r2 = pde_residual(&p, &mass(m), 5e-3).unwrap();
            assert!((3.8..4.2).contains(&(r1 / r2)), "M={m}: {r1} {r2}");
        }
    }

    #[test]
    fn one_sided_difference_is_accurate() {
        let f = |x: f64| -> Result<f64> { Ok(x.sin()) };
        let d = one_sided(f, 0.3, 1e-3).unwrap();
        assert!((d - 0.3f64.cos()).abs() < 1e-10);
        let d = one_sided(f, 0.3, -1e-3).unwrap();
        assert!((d - 0.3f64.cos()).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kernel_is_real_inside_cone(seed in 0u64..1000, m in 0.0f64..5.0) {
            for p in sample_cone_points(8, seed) {
                let v = evaluate_e(&p, &mass(m)).unwrap();
                prop_assert!(v.imag_residual.abs() <= 1e-10 * (1.0 + v.value.abs()));
            }
        }

        #[test]
        fn kernel_is_symmetric(seed in 0u64..1000, m in 0.0f64..5.0) {
            for p in sample_cone_points(4, seed) {
                let swapped = KernelPoint::new(p.x0, p.t0, p.x, p.t);
                let a = evaluate_e(&p, &mass(m)).unwrap().value;
                let b = evaluate_e(&swapped, &mass(m)).unwrap().value;
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }
}
