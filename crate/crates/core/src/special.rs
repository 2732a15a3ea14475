//! Inverse hyperbolic and trigonometric helpers with explicit domain guards.

use crate::error::{Error, Result};

/// Arguments of `acosh` in `[1 - ACOSH_CLAMP, 1)` are treated as exactly 1.
pub const ACOSH_CLAMP: f64 = 1e-12;

/// `acosh` that absorbs roundoff just below 1 and rejects anything smaller.
pub fn acosh_clamped(func: &'static str, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain(func, "arccosh of NaN"));
    }
    if x >= 1.0 {
        Ok(x.acosh())
    } else if x >= 1.0 - ACOSH_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::domain(func, format!("arccosh argument {x} < 1")))
    }
}

/// `arcsec(x) = arccos(1/x)`, defined for `|x| >= 1`.
pub fn arcsec(x: f64) -> Result<f64> {
    if !(x.abs() >= 1.0) {
        return Err(Error::domain("arcsec", format!("|{x}| < 1")));
    }
    Ok((1.0 / x).acos())
}

/// `arcsech(y)` for `y in (0, 1]`, evaluated from `1 - y` to keep relative
/// accuracy when `y` is close to 1.
pub fn arcsech_from_complement(one_minus_y: f64) -> Result<f64> {
    let y = 1.0 - one_minus_y;
    if !(one_minus_y >= 0.0 && y > 0.0) {
        return Err(Error::domain("arcsech", format!("argument {y} outside (0, 1]")));
    }
    // acosh(1 + x) with x = 1/y - 1
    let x = one_minus_y / y;
    Ok((x + (x * (x + 2.0)).sqrt()).ln_1p())
}

pub fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}
