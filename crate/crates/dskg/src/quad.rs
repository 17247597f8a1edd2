//! One-dimensional quadrature: Gauss–Legendre rules, globally adaptive
//! Gauss–Legendre panel bisection, and tanh-sinh for endpoint singularities.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Applies the rule on [a, b].
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x)?;
        }
        Ok(s * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 10-point rule used by the adaptive integrator.
pub fn gl10() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(10))
}

/// Shared 32-point rule.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    GaussLegendre,
    TanhSinh,
}

/// Tolerances and budget for adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Initial number of equal panels.
    pub panels: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of panels created by bisection.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rule: Rule::GaussLegendre,
            panels: 1,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_panels: 1 << 14,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 {
            return Err(Error::Validation(
                "quadrature needs at least one panel".into(),
            ));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Validation(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        Ok(())
    }

    /// Same rule with tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadratureSpec {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_panel<F>(a: f64, b: f64, whole: f64, f: &mut F, evals: &mut usize) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let rule = gl10();
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, &mut *f)?;
    let right = rule.integrate(m, b, &mut *f)?;
    *evals += 2 * rule.nodes.len();
    Ok(Panel {
        a,
        b,
        left,
        right,
        err: (whole - left - right).abs(),
    })
}

/// Globally adaptive Gauss–Legendre integration over consecutive intervals
/// delimited by `breaks` (sorted, at least two entries). Each panel's error is
/// the difference between the 10-point rule on the panel and on its halves;
/// the worst panel is bisected until the summed error meets the tolerance.
pub fn adaptive_gl<F>(mut f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    let lo = breaks.first().copied().unwrap_or(0.0);
    let hi = breaks.last().copied().unwrap_or(0.0);
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let rule = gl10();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let h = (b - a) / spec.panels as f64;
        for i in 0..spec.panels {
            let pa = a + h * i as f64;
            let pb = if i + 1 == spec.panels { b } else { pa + h };
            let whole = rule.integrate(pa, pb, &mut f)?;
            evals += rule.nodes.len();
            heap.push(make_panel(pa, pb, whole, &mut f, &mut evals)?);
        }
    }
    loop {
        let (value, err) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.left + p.right, e + p.err));
        if err <= spec.target(value) {
            return Ok(QuadResult {
                value,
                error: err,
                evals,
            });
        }
        if heap.len() >= spec.max_panels {
            tracing::warn!(
                lo,
                hi,
                err,
                panels = heap.len(),
                "adaptive quadrature hit the panel limit"
            );
            return Err(Error::QuadratureFailure {
                a: lo,
                b: hi,
                error: err,
                panels: heap.len(),
            });
        }
        // Split the worst panels; several at once keeps the bookkeeping cheap.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let p = match heap.pop() {
                Some(p) => p,
                None => break,
            };
            let m = 0.5 * (p.a + p.b);
            if !(m > p.a && m < p.b) {
                // Panel cannot be split further in floating point.
                return Err(Error::QuadratureFailure {
                    a: p.a,
                    b: p.b,
                    error: p.err,
                    panels: heap.len() + 1,
                });
            }
            heap.push(make_panel(p.a, m, p.left, &mut f, &mut evals)?);
            heap.push(make_panel(m, p.b, p.right, &mut f, &mut evals)?);
        }
    }
}

/// Adaptive Gauss–Legendre on [a, b].
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, spec)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    adaptive_gl(f, &[a, b], spec)
}

/// Tanh-sinh (double exponential) quadrature on [a, b]. The integrand is
/// never evaluated at the endpoints, and abscissas near them are formed from
/// the distance to the endpoint so that singular integrands can be handled.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let half = 0.5 * (b - a);
    // Far enough out that abscissas reach within ~1e-300 of an endpoint at zero.
    let u_max = 6.5;
    let mut evals = 0;
    let node = |u: f64, f: &mut F| -> Result<f64> {
        let s = 0.5 * PI * u.sinh();
        let cs = s.cosh();
        let w = 0.5 * PI * u.cosh() / (cs * cs);
        // Distance from the nearer endpoint, in units of the half-width.
        let d = 2.0 / ((2.0 * s.abs()).exp() + 1.0);
        let x = if u > 0.0 { b - half * d } else { a + half * d };
        if d == 0.0 || x <= a || x >= b {
            return Ok(0.0);
        }
        Ok(w * f(x)?)
    };
    let mut h = 0.5;
    let mut sum = node(0.0, &mut f)?;
    evals += 1;
    let mut k = 1;
    loop {
        let u = k as f64 * h;
        if u > u_max {
            break;
        }
        sum += node(u, &mut f)? + node(-u, &mut f)?;
        evals += 2;
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _level in 0..8 {
        h *= 0.5;
        let mut k = 1;
        loop {
            let u = k as f64 * h;
            if u > u_max {
                break;
            }
            sum += node(u, &mut f)? + node(-u, &mut f)?;
            evals += 2;
            k += 2;
        }
        let next = sum * h * half;
        let err = (next - estimate).abs();
        estimate = next;
        // Convergence is quadratic in the level, so the last difference
        // overstates the remaining error.
        if err <= spec.target(next) {
            return Ok(QuadResult {
                value: next,
                error: err,
                evals,
            });
        }
    }
    Err(Error::QuadratureFailure {
        a,
        b,
        error: f64::NAN,
        panels: evals,
    })
}

/// Composite Gauss–Legendre nodes and weights: `panels` equal panels on
/// [a, b], each with the given rule.
pub fn composite_nodes(
    a: f64,
    b: f64,
    panels: usize,
    rule: &GaussLegendre,
) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * rule.nodes.len());
    let mut ws = Vec::with_capacity(xs.capacity());
    for i in 0..panels {
        let mid = a + h * (i as f64 + 0.5);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(10);
        // Degree 19 is the highest exact degree for 10 nodes.
        let v = rule.integrate(-1.0, 1.0, |x| Ok(x.powi(18))).unwrap();
        assert!((v - 2.0 / 19.0).abs() < 1e-15);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = GaussLegendre::new(5);
        assert_eq!(rule.nodes[2], 0.0);
        assert!((rule.weights[2] - 128.0 / 225.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_smooth() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x| Ok(x.sin()), 0.0, PI, &spec).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_sharp_peak() {
        let spec = QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..Default::default()
        };
        let eps: f64 = 1e-3;
        let r = integrate(|x| Ok(eps / (x * x + eps * eps)), -1.0, 1.0, &spec).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((r.value - exact).abs() < 1e-10, "{} vs {}", r.value, exact);
    }

    #[test]
    fn budget_is_enforced() {
        let spec = QuadratureSpec {
            max_panels: 4,
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            ..Default::default()
        };
        let r = integrate(|x: f64| Ok(x.abs().sqrt()), -1.0, 1.0, &spec);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let spec = QuadratureSpec::default();
        let r = integrate(Ok, 1.0, 0.0, &spec).unwrap();
        assert!((r.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let spec = QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..Default::default()
        };
        // ∫₀¹ 1/√x dx = 2.
        let r = tanh_sinh(|x: f64| Ok(1.0 / x.sqrt()), 0.0, 1.0, &spec).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
        // ∫₀¹ ln x dx = −1.
        let r = tanh_sinh(|x: f64| Ok(x.ln()), 0.0, 1.0, &spec).unwrap();
        assert!((r.value + 1.0).abs() < 1e-11);
    }

    #[test]
    fn composite_rule_weights_sum_to_length() {
        let (xs, ws) = composite_nodes(-0.5, 2.0, 7, gl10());
        assert_eq!(xs.len(), 70);
        assert!((ws.iter().sum::<f64>() - 2.5).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn polynomial_exactness(n in 1usize..40, deg_frac in 0.0f64..1.0) {
            let rule = GaussLegendre::new(n);
            let deg = ((2 * n - 1) as f64 * deg_frac) as i32;
            let v = rule.integrate(0.0, 1.0, |x| Ok(x.powi(deg))).unwrap();
            prop_assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13);
        }

        #[test]
        fn adaptive_gaussian(s in 0.05f64..2.0, c in -1.0f64..1.0) {
            let spec = QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-12, ..Default::default() };
            let r = integrate(|x: f64| Ok((-(x - c).powi(2) / (2.0 * s * s)).exp()), c - 12.0 * s, c + 12.0 * s, &spec).unwrap();
            let exact = s * (2.0 * PI).sqrt();
            prop_assert!((r.value - exact).abs() < 1e-10 * exact);
        }
    }
}
