//! Named, analytically defined data sets with known supports and gradients.

use crate::cauchy::{CauchyData1D, Field1D, Source1D};
use crate::error::{Error, Result};
use crate::spherical::{CauchyDataND, FieldND, SourceND};

pub const PRESETS: [&str; 5] = [
    "bump-phi0",
    "bump-phi1",
    "shell-3d",
    "source-pulse",
    "mode-cos",
];

/// The standard mollifier exp(1/(x²−1)) on |x| < 1.
pub fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 / (x * x - 1.0)).exp()
    } else {
        0.0
    }
}

pub fn bump_derivative(x: f64) -> f64 {
    if x.abs() < 1.0 {
        let d = x * x - 1.0;
        -2.0 * x / (d * d) * (1.0 / d).exp()
    } else {
        0.0
    }
}

const SHELL_CENTER: f64 = 0.5;
const SHELL_WIDTH: f64 = 0.1;
const PULSE_RADIUS: f64 = 0.5;
const PULSE_WINDOW: [f64; 2] = [0.0, 1.0];
const COS_WAVENUMBER: f64 = 4.0;
const COS_ENVELOPE: f64 = 3.0;

fn pulse_time(b: f64) -> f64 {
    bump((b - 0.5) / 0.5)
}

#[derive(Clone, Debug)]
pub enum PresetData {
    OneD(CauchyData1D),
    Nd(CauchyDataND),
}

fn unknown(name: &str) -> Error {
    Error::UnknownPreset(name.to_string())
}

/// One-dimensional version of a preset. `shell-3d` has none.
pub fn preset_1d(name: &str) -> Result<CauchyData1D> {
    let mut d = CauchyData1D::default();
    match name {
        "bump-phi0" => d.phi0 = Some(Field1D::new(1.0, bump)?),
        "bump-phi1" => d.phi1 = Some(Field1D::new(1.0, bump)?),
        "source-pulse" => {
            d.f = Some(Source1D::separable(
                PULSE_RADIUS,
                PULSE_WINDOW,
                |y| bump(y / PULSE_RADIUS),
                pulse_time,
            )?)
        }
        "mode-cos" => {
            d.phi0 = Some(Field1D::new(COS_ENVELOPE, |x| {
                (COS_WAVENUMBER * x).cos() * bump(x / COS_ENVELOPE)
            })?)
        }
        "shell-3d" => {
            return Err(Error::Validation(
                "preset shell-3d is only defined for n = 3".into(),
            ))
        }
        _ => return Err(unknown(name)),
    }
    Ok(d)
}

/// Preset in n ∈ {2, 3} dimensions. All but `mode-cos` are radial.
pub fn preset_nd(name: &str, n: usize) -> Result<CauchyDataND> {
    let mut d = CauchyDataND::new(n)?;
    match name {
        "bump-phi0" => d.phi0 = Some(FieldND::radial(1.0, bump, bump_derivative)?),
        "bump-phi1" => d.phi1 = Some(FieldND::radial(1.0, bump, bump_derivative)?),
        "shell-3d" => {
            if n != 3 {
                return Err(Error::Validation(
                    "preset shell-3d is only defined for n = 3".into(),
                ));
            }
            d.phi1 = Some(FieldND::radial(
                SHELL_CENTER + SHELL_WIDTH,
                |r| bump((r - SHELL_CENTER) / SHELL_WIDTH),
                |r| bump_derivative((r - SHELL_CENTER) / SHELL_WIDTH) / SHELL_WIDTH,
            )?)
        }
        "source-pulse" => {
            d.f = Some(SourceND::radial_separable(
                PULSE_RADIUS,
                PULSE_WINDOW,
                |r| bump(r / PULSE_RADIUS),
                |r| bump_derivative(r / PULSE_RADIUS) / PULSE_RADIUS,
                pulse_time,
            )?)
        }
        "mode-cos" => {
            let f = |x: &[f64]| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                (COS_WAVENUMBER * x[0]).cos() * bump(r / COS_ENVELOPE)
            };
            let field = FieldND::new(COS_ENVELOPE, f)?.with_gradient(|x, out| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let (c, s) = ((COS_WAVENUMBER * x[0]).cos(), (COS_WAVENUMBER * x[0]).sin());
                let b = bump(r / COS_ENVELOPE);
                let db = if r > 0.0 {
                    bump_derivative(r / COS_ENVELOPE) / (COS_ENVELOPE * r)
                } else {
                    0.0
                };
                for (i, o) in out.iter_mut().enumerate() {
                    *o = c * db * x[i];
                }
                out[0] -= COS_WAVENUMBER * s * b;
            });
            d.phi0 = Some(field)
        }
        _ => return Err(unknown(name)),
    }
    Ok(d)
}

/// `preset_1d` for n = 1, `preset_nd` otherwise.
pub fn preset_data(name: &str, n: usize) -> Result<PresetData> {
    if !PRESETS.contains(&name) {
        return Err(unknown(name));
    }
    if n == 1 {
        Ok(PresetData::OneD(preset_1d(name)?))
    } else {
        Ok(PresetData::Nd(preset_nd(name, n)?))
    }
}
