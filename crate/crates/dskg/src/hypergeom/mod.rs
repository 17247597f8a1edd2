//! Gauss hypergeometric function ₂F₁(a, b; c; z) for complex parameters and
//! real argument z ∈ [0, 1).
//!
//! Small arguments use the power series directly. Above z = 0.5 the z → 1 − z
//! connection formula is used unless c − a − b sits near an integer, where the
//! gamma factors blow up; that case falls back to the power series summed in
//! double-double arithmetic.

mod gamma;

pub use gamma::{gamma, rgamma, GAMMA_REL_ERROR};

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 20_000;

/// Arguments above this use the connection formula (when well conditioned).
const SERIES_LIMIT: f64 = 0.5;
/// Minimum distance of c − a − b from an integer for the connection formula.
const CONNECTION_MIN_GAP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypergeomParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub z: f64,
}

impl HypergeomParams {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Self {
        HypergeomParams { a, b, c, z }
    }

    /// Parameters with real a, b, c.
    pub fn real(a: f64, b: f64, c: f64, z: f64) -> Self {
        HypergeomParams::new(a.into(), b.into(), c.into(), z)
    }

    /// F(1/2 + iM, 1/2 + iM; 1; z), the family appearing in the kernels.
    pub fn kernel(m: f64, z: f64) -> Self {
        let g = Complex64::new(0.5, m);
        HypergeomParams::new(g, g, 1.0.into(), z)
    }

    fn validate(&self) -> Result<()> {
        if !(self.z >= 0.0 && self.z < 1.0) {
            return Err(Error::Domain(format!("z = {} not in [0, 1)", self.z)));
        }
        if is_nonpositive_integer(self.c) {
            return Err(Error::Domain(format!(
                "c = {} is a non-positive integer",
                self.c
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypergeomValue {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub terms_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl SeriesOptions {
    pub fn with_tol(tol: f64) -> Self {
        SeriesOptions {
            tol,
            ..Default::default()
        }
    }
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn integer_gap(s: Complex64) -> f64 {
    Complex64::new(s.re - s.re.round(), s.im).norm()
}

/// Bound on the tail of a series whose current term has modulus `last` and
/// whose future term ratios are at most `rho`.
fn tail_bound(last: f64, rho: f64) -> f64 {
    if rho <= 0.5 {
        2.0 * last
    } else {
        last * rho / (1.0 - rho)
    }
}

/// Sums `first + Σ_{k ≥ k0}` of the hypergeometric term recurrence
/// t_{k+1} = t_k (a+k)(b+k) / ((c+k)(k+1)) z, starting from t_{k0} = `first`.
fn series_f64(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: f64,
    first: Complex64,
    k0: usize,
    opts: SeriesOptions,
) -> Result<HypergeomValue> {
    let mut term = first;
    let mut sum = first;
    let mut abs_sum = first.norm();
    if z == 0.0 || first == Complex64::new(0.0, 0.0) {
        return Ok(HypergeomValue {
            value: sum,
            abs_error_estimate: 0.0,
            terms_used: 1,
        });
    }
    let mut k = k0;
    let mut used = 1;
    loop {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        term *= ratio;
        sum += term;
        abs_sum += term.norm();
        used += 1;
        k += 1;
        let rho = ratio.norm().max(z);
        if rho < 1.0 {
            let est = tail_bound(term.norm(), rho);
            if est <= opts.tol * sum.norm() || est < 1e-300 {
                return Ok(HypergeomValue {
                    value: sum,
                    abs_error_estimate: est + 4.0 * f64::EPSILON * abs_sum,
                    terms_used: used,
                });
            }
        }
        if used >= opts.max_terms {
            return Err(Error::NonConvergent {
                terms: used,
                last_term: term.norm(),
            });
        }
    }
}

/// Same recurrence as [`series_f64`] carried out in double-double arithmetic.
fn series_dd(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: f64,
    first: Complex64,
    k0: usize,
    opts: SeriesOptions,
) -> Result<HypergeomValue> {
    let (a, b, c) = (CDd::from(a), CDd::from(b), CDd::from(c));
    let zd = Dd::new(z);
    let mut term = CDd::from(first);
    let mut sum = term;
    if z == 0.0 || first == Complex64::new(0.0, 0.0) {
        return Ok(HypergeomValue {
            value: sum.to_c64(),
            abs_error_estimate: 0.0,
            terms_used: 1,
        });
    }
    let mut k = k0;
    let mut used = 1;
    loop {
        let kd = CDd::new(k as f64, 0.0);
        let num = (a + kd) * (b + kd);
        let den = (c + kd).scale(Dd::new(k as f64 + 1.0));
        let ratio = (num / den).scale(zd);
        term = term * ratio;
        sum = sum + term;
        used += 1;
        k += 1;
        let rho = ratio.abs_f64().max(z);
        if rho < 1.0 {
            let est = tail_bound(term.abs_f64(), rho);
            if est <= opts.tol * sum.abs_f64() || est < 1e-300 {
                return Ok(HypergeomValue {
                    value: sum.to_c64(),
                    abs_error_estimate: est + 1e-28 * sum.abs_f64() * used as f64,
                    terms_used: used,
                });
            }
        }
        if used >= opts.max_terms {
            return Err(Error::NonConvergent {
                terms: used,
                last_term: term.abs_f64(),
            });
        }
    }
}

/// z → 1 − z connection formula:
///
/// F(a,b;c;z) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)) F(a,b;a+b−c+1;1−z)
///            + (1−z)^(c−a−b) Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)) F(c−a,c−b;c−a−b+1;1−z).
///
/// Fails with [`Error::IllConditioned`] when c − a − b is within 0.05 of an
/// integer, where the individual terms diverge.
pub fn connection_formula(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: f64,
    opts: SeriesOptions,
) -> Result<HypergeomValue> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("z = {z} not in (0, 1)")));
    }
    let s = c - a - b;
    let gap = integer_gap(s);
    if gap < CONNECTION_MIN_GAP {
        return Err(Error::IllConditioned { distance: gap });
    }
    let w = 1.0 - z;
    let one = Complex64::new(1.0, 0.0);
    let gc = gamma(c);
    let c1 = gc * gamma(s) * rgamma(c - a) * rgamma(c - b);
    let c2 = gc * gamma(-s) * rgamma(a) * rgamma(b);
    let pw = (s * w.ln()).exp();
    let f1 = series_f64(a, b, one - s, w, one, 0, opts)?;
    let f2 = series_f64(c - a, c - b, one + s, w, one, 0, opts)?;
    let t1 = c1 * f1.value;
    let t2 = c2 * pw * f2.value;
    let est = c1.norm() * f1.abs_error_estimate
        + (c2 * pw).norm() * f2.abs_error_estimate
        + 4.0 * GAMMA_REL_ERROR * (t1.norm() + t2.norm());
    Ok(HypergeomValue {
        value: t1 + t2,
        abs_error_estimate: est,
        terms_used: f1.terms_used + f2.terms_used,
    })
}

/// ₂F₁(a, b; c; z) with default term budget; `tol` is relative to |F|.
pub fn gauss_2f1(params: HypergeomParams, tol: f64) -> Result<HypergeomValue> {
    gauss_2f1_with(params, SeriesOptions::with_tol(tol))
}

pub fn gauss_2f1_with(params: HypergeomParams, opts: SeriesOptions) -> Result<HypergeomValue> {
    params.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!(
            "tol = {} must be positive",
            opts.tol
        )));
    }
    let HypergeomParams { a, b, c, z } = params;
    let one = Complex64::new(1.0, 0.0);
    if z <= SERIES_LIMIT {
        return series_f64(a, b, c, z, one, 0, opts);
    }
    match connection_formula(a, b, c, z, opts) {
        Ok(v) => Ok(v),
        Err(Error::IllConditioned { .. }) => series_dd(a, b, c, z, one, 0, opts),
        Err(e) => Err(e),
    }
}

/// (F(a,b;c;z) − 1)/z, evaluated without cancellation for small z. At z = 0
/// this is ab/c.
pub fn gauss_2f1_reduced(params: HypergeomParams, tol: f64) -> Result<HypergeomValue> {
    params.validate()?;
    let HypergeomParams { a, b, c, z } = params;
    let opts = SeriesOptions::with_tol(tol);
    if z <= SERIES_LIMIT {
        let first = a * b / c;
        return series_f64(a, b, c, z, first, 1, opts);
    }
    let f = gauss_2f1_with(params, opts)?;
    Ok(HypergeomValue {
        value: (f.value - 1.0) / z,
        abs_error_estimate: f.abs_error_estimate / z,
        terms_used: f.terms_used,
    })
}

/// dF/dz through dF/dz = (ab/c) F(a+1, b+1; c+1; z).
pub fn gauss_2f1_dz(params: HypergeomParams, tol: f64) -> Result<HypergeomValue> {
    params.validate()?;
    let HypergeomParams { a, b, c, z } = params;
    let pre = a * b / c;
    let shifted = HypergeomParams::new(a + 1.0, b + 1.0, c + 1.0, z);
    let f = gauss_2f1(shifted, tol)?;
    Ok(HypergeomValue {
        value: pre * f.value,
        abs_error_estimate: pre.norm() * f.abs_error_estimate,
        terms_used: f.terms_used,
    })
}

/// |Γ(1/2 + iM)|² = π / cosh(πM).
pub fn abs_gamma_half_plus_im_sq(m: f64) -> f64 {
    PI / (PI * m).cosh()
}

/// F(a, b; c; z) for real parameters (the value is then real).
pub fn gauss_2f1_real(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<f64> {
    Ok(gauss_2f1(HypergeomParams::real(a, b, c, z), tol)?.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Complete elliptic integral through the arithmetic-geometric mean:
    /// F(1/2,1/2;1;z) = 1 / AGM(1, √(1−z)).
    fn agm_oracle(z: f64) -> f64 {
        let (mut x, mut y) = (1.0f64, (1.0 - z).sqrt());
        for _ in 0..60 {
            let (nx, ny) = (0.5 * (x + y), (x * y).sqrt());
            x = nx;
            y = ny;
        }
        1.0 / x
    }

    #[test]
    fn constant_term_at_origin() {
        let v = gauss_2f1(HypergeomParams::kernel(0.7, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
    }

    #[test]
    fn elliptic_agreement() {
        for z in [0.1, 0.5, 0.9] {
            let v = gauss_2f1_real(0.5, 0.5, 1.0, z, DEFAULT_TOL).unwrap();
            let o = agm_oracle(z);
            assert!((v - o).abs() < 1e-12 * o, "z = {z}: {v} vs {o}");
        }
    }

    #[test]
    fn derivative_at_origin() {
        let v = gauss_2f1_dz(HypergeomParams::kernel(2.0, 0.0), DEFAULT_TOL).unwrap();
        assert!((v.value - c(-3.75, 2.0)).norm() < 1e-15);
        let v = gauss_2f1_dz(HypergeomParams::real(0.5, 0.5, 1.0, 0.0), DEFAULT_TOL).unwrap();
        assert!((v.value - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_matches_richardson_difference() {
        let p = HypergeomParams::kernel(0.5, 0.4);
        let f = |z: f64| gauss_2f1(HypergeomParams { z, ..p }, 1e-15).unwrap().value;
        let h = 1e-5;
        let d1 = (f(0.4 + h) - f(0.4 - h)) / (2.0 * h);
        let d2 = (f(0.4 + h / 2.0) - f(0.4 - h / 2.0)) / h;
        let fd = (4.0 * d2 - d1) / 3.0;
        let v = gauss_2f1_dz(p, 1e-14).unwrap().value;
        assert!((v - fd).norm() < 1e-8 * v.norm(), "{v} vs {fd}");
    }

    #[test]
    fn gamma_modulus_identity() {
        assert!((abs_gamma_half_plus_im_sq(0.0) - PI).abs() < 1e-15);
        let v1 = abs_gamma_half_plus_im_sq(1.0);
        assert!((v1 - PI / PI.cosh()).abs() < 1e-16);
        assert!((v1 - 0.271_015).abs() < 1e-6);
        let m = 10.0;
        let direct = gamma(c(0.5, m)).norm_sqr();
        let v = abs_gamma_half_plus_im_sq(m);
        assert!((direct - v).abs() < 1e-10 * v);
    }

    #[test]
    fn connection_rejects_integer_gap() {
        let r = connection_formula(
            c(0.5, 0.0),
            c(0.5, 0.0),
            c(1.0, 0.0),
            0.9,
            Default::default(),
        );
        assert!(matches!(r, Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn connection_agrees_with_series_at_small_argument() {
        // The series in 1 − z converges slowly as z → 0, so the check sits at
        // z = 0.05 where F is already within 2% of its limit 1.
        let (a, b, cc) = (c(0.5, 0.0), c(0.75, 0.0), c(1.5, 0.0));
        let v = connection_formula(a, b, cc, 0.05, Default::default()).unwrap();
        let s = gauss_2f1(HypergeomParams::new(a, b, cc, 0.05), 1e-15).unwrap();
        assert!((v.value - s.value).norm() < 1e-11);
        assert!((v.value - 1.0).norm() < 0.02);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            gauss_2f1(HypergeomParams::kernel(1.0, 1.0), DEFAULT_TOL),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gauss_2f1(HypergeomParams::kernel(1.0, -0.1), DEFAULT_TOL),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gauss_2f1(HypergeomParams::real(0.5, 0.5, -2.0, 0.3), DEFAULT_TOL),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = SeriesOptions {
            tol: 1e-14,
            max_terms: 50,
        };
        let r = gauss_2f1_with(HypergeomParams::real(0.5, 0.5, 1.0, 0.99), opts);
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn reduced_form_matches_difference() {
        let p = HypergeomParams::new(c(-0.5, 1.3), c(0.5, 1.3), c(1.0, 0.0), 0.2);
        let f = gauss_2f1(p, 1e-15).unwrap().value;
        let g = gauss_2f1_reduced(p, 1e-15).unwrap().value;
        assert!((g - (f - 1.0) / 0.2).norm() < 1e-13);
        let g0 = gauss_2f1_reduced(HypergeomParams { z: 0.0, ..p }, 1e-15)
            .unwrap()
            .value;
        assert!((g0 - p.a * p.b).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn euler_transformation(m in 0.0f64..5.0, z in 0.0f64..0.99) {
            let f = gauss_2f1(HypergeomParams::kernel(m, z), 1e-14).unwrap().value;
            let g = gauss_2f1(HypergeomParams::kernel(-m, z), 1e-14).unwrap().value;
            let rhs = (c(0.0, -2.0 * m) * (1.0 - z).ln()).exp() * g;
            prop_assert!((f - rhs).norm() <= 1e-10 * f.norm().max(1e-300) + 1e-14);
        }

        #[test]
        fn bound_by_real_parameter_case(m in 0.0f64..5.0, z in 0.0f64..0.98) {
            let f = gauss_2f1(HypergeomParams::kernel(m, z), 1e-13).unwrap().value.norm();
            let g = gauss_2f1_real(0.5, 0.5, 1.0, z, 1e-13).unwrap();
            prop_assert!(f <= PI / abs_gamma_half_plus_im_sq(m) * g * (1.0 + 1e-10));
        }

        #[test]
        fn conjugation_symmetry(ar in -1.0f64..1.0, ai in -3.0f64..3.0, bi in -3.0f64..3.0, z in 0.0f64..0.95) {
            let p = HypergeomParams::new(c(ar, ai), c(0.5, bi), c(1.0, 0.0), z);
            let q = HypergeomParams::new(c(ar, -ai), c(0.5, -bi), c(1.0, 0.0), z);
            let f = gauss_2f1(p, 1e-13).unwrap().value;
            let g = gauss_2f1(q, 1e-13).unwrap().value;
            prop_assert!((f.conj() - g).norm() <= 1e-11 * f.norm().max(1.0));
        }

        #[test]
        fn derivative_consistency(m in 0.0f64..3.0, z in 0.05f64..0.95) {
            let p = HypergeomParams::kernel(m, z);
            let f = |z: f64| gauss_2f1(HypergeomParams { z, ..p }, 1e-15).unwrap().value;
            let h = 1e-4;
            let d1 = (f(z + h) - f(z - h)) / (2.0 * h);
            let d2 = (f(z + h / 2.0) - f(z - h / 2.0)) / h;
            let fd = (4.0 * d2 - d1) / 3.0;
            let v = gauss_2f1_dz(p, 1e-14).unwrap().value;
            prop_assert!((v - fd).norm() <= 1e-7 * v.norm().max(1.0));
        }
    }
}
