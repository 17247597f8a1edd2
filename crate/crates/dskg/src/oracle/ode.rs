//! Dormand–Prince 5(4) with PI step control, stepping exactly onto requested
//! output times.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeTolerance {
    pub rtol: f64,
    pub atol: f64,
    pub min_step: f64,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        OdeTolerance {
            rtol: 1e-10,
            atol: 1e-12,
            min_step: 1e-12,
        }
    }
}

/// Integrates y' = f(t, y) from `t0` through the increasing `times`, calling
/// `out(j, y)` at each. Returns the number of accepted steps.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    times: &[f64],
    tol: &OdeTolerance,
    mut out: O,
) -> Result<usize>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(usize, &[f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut t = t0;
    f(t, &y, &mut k[0]);
    let mut h = initial_step(&y, &k[0], tol, times.last().map_or(1.0, |&e| e - t0));
    let mut prev_err: f64 = 1e-4;
    let mut steps = 0;
    for (j, &target) in times.iter().enumerate() {
        while t < target {
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (r, kr) in k.iter().enumerate().take(s) {
                        acc += step * A[s][r] * kr[i];
                    }
                    tmp[i] = acc;
                }
                f(t + C[s] * step, &tmp, &mut k[s]);
            }
            // tmp holds the fifth-order solution (FSAL stage 7 input).
            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for (r, kr) in k.iter().enumerate() {
                    e += E[r] * kr[i];
                }
                let sc = tol.atol + tol.rtol * y[i].abs().max(tmp[i].abs());
                err = err.max((step * e / sc).abs());
            }
            if !err.is_finite() || tmp.iter().any(|v| !v.is_finite()) {
                return Err(Error::StiffnessFailure { t, min_step: step });
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y.copy_from_slice(&tmp);
                k.swap(0, 6);
                steps += 1;
                // PI controller.
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * prev_err.powf(0.4 / 5.0);
                prev_err = err.max(1e-4);
                if !last {
                    h = step * fac.clamp(0.2, 5.0);
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).max(0.2);
                if h < tol.min_step * (1.0 + t.abs()) {
                    return Err(Error::StiffnessFailure { t, min_step: h });
                }
            }
        }
        out(j, &y);
    }
    Ok(steps)
}

fn initial_step(y: &[f64], dy: &[f64], tol: &OdeTolerance, span: f64) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (&yi, &di) in y.iter().zip(dy) {
        let sc = tol.atol + tol.rtol * yi.abs();
        d0 = d0.max(yi.abs() / sc);
        d1 = d1.max(di.abs() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span.abs().max(1e-12))
}
