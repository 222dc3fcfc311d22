//! Reference values transcribed from published tables, and the matching
//! rules used to compare against them.

use serde::Serialize;

use crate::jets::Scalar;
use crate::method::Method;

/// Which part of a computed value a reference constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Re,
    Im,
    /// The whole scalar; distances are moduli.
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Value(Scalar),
    /// The table cell printed "Indeterminate": the iteration produced a
    /// non-finite value at or before this index.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    Exact,
    /// Agreement after rounding to this many significant digits.
    SigDigits(u32),
    /// The reference is the computed value cut (not rounded) after this
    /// many significant digits, as in "0.1523...".
    Truncated(u32),
    Absolute(f64),
    /// Same sign, magnitude within this factor.
    Factor(f64),
}

fn unit_in_last_digit(reference: f64, digits: u32) -> f64 {
    let exponent = reference.abs().log10().floor() as i32;
    10f64.powi(exponent - digits as i32 + 1)
}

impl Tolerance {
    /// Compares a real computed value to a real reference.
    pub fn accepts(&self, reference: f64, got: f64) -> bool {
        if !got.is_finite() {
            return false;
        }
        // slack for the decimal reference not being exactly representable
        let slack = 1.0 + 1e-9;
        match *self {
            Tolerance::Exact => got == reference,
            Tolerance::SigDigits(d) => {
                if reference == 0.0 {
                    return got == 0.0;
                }
                (got - reference).abs() <= 0.5 * unit_in_last_digit(reference, d) * slack
            }
            Tolerance::Truncated(d) => {
                if reference == 0.0 {
                    return got == 0.0;
                }
                let ulp = unit_in_last_digit(reference, d);
                let same_sign = got.signum() == reference.signum();
                let excess = got.abs() - reference.abs();
                same_sign && excess >= -1e-9 * ulp && excess < ulp
            }
            Tolerance::Absolute(tol) => (got - reference).abs() <= tol,
            Tolerance::Factor(f) => {
                let ratio = got / reference;
                ratio > 0.0 && ratio <= f && ratio >= 1.0 / f
            }
        }
    }

    /// Compares whole scalars: `Absolute` uses the modulus of the
    /// difference, the digit-based rules apply per component.
    pub fn accepts_scalar(&self, reference: Scalar, got: Scalar) -> bool {
        match *self {
            Tolerance::Absolute(tol) => got.is_finite() && (got - reference).abs() <= tol,
            _ => {
                self.accepts(reference.re(), got.re())
                    && (reference.im() == 0.0 && got.im().abs() == 0.0 || self.accepts(reference.im(), got.im()))
            }
        }
    }
}

/// One reference cell of a table.
///
/// For [`Component::Re`] and [`Component::Im`] the expected value is the
/// component itself, stored as a real scalar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Golden {
    pub method: Method,
    pub index: usize,
    pub component: Component,
    pub expected: Expected,
    pub tolerance: Tolerance,
}

impl Golden {
    /// Whether a finite computed value satisfies this reference.
    pub fn accepts(&self, got: Scalar) -> bool {
        let Expected::Value(want) = self.expected else {
            return false;
        };
        let t = self.tolerance;
        match self.component {
            Component::Re => t.accepts(want.re(), got.re()),
            Component::Im => t.accepts(want.re(), got.im()),
            Component::Value => t.accepts_scalar(want, got),
        }
    }
}
