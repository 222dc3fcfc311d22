use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A double-precision number that is either real or complex.
///
/// The variant is fixed when the value is constructed. Binary operations
/// between a real and a complex operand promote the real one, so constants
/// written as reals can be mixed freely into complex computations.
///
/// Complex operations restricted to the real axis reproduce the real
/// variant bit for bit; division uses Smith's algorithm for that reason.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Real(f64),
    Complex(Complex64),
}

impl Scalar {
    pub const ZERO: Scalar = Scalar::Real(0.0);
    pub const ONE: Scalar = Scalar::Real(1.0);

    pub fn real(x: f64) -> Self {
        Scalar::Real(x)
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Complex(Complex64::new(re, im))
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Scalar::Complex(_))
    }

    pub fn re(&self) -> f64 {
        match self {
            Scalar::Real(x) => *x,
            Scalar::Complex(z) => z.re,
        }
    }

    pub fn im(&self) -> f64 {
        match self {
            Scalar::Real(_) => 0.0,
            Scalar::Complex(z) => z.im,
        }
    }

    /// Absolute value, or modulus for the complex variant.
    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Real(x) => x.abs(),
            Scalar::Complex(z) => z.norm(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Real(x) => x.is_finite(),
            Scalar::Complex(z) => z.re.is_finite() && z.im.is_finite(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re() == 0.0 && self.im() == 0.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Scalar::Real(x) => Complex64::new(x, 0.0),
            Scalar::Complex(z) => z,
        }
    }

    /// Promotes to the complex variant when `like` is complex.
    pub fn same_kind_as(self, like: Scalar) -> Scalar {
        match (self, like) {
            (Scalar::Real(x), Scalar::Complex(_)) => Scalar::complex(x, 0.0),
            _ => self,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            Scalar::Real(_) => self,
            Scalar::Complex(z) => Scalar::Complex(z.conj()),
        }
    }

    pub fn sin(self) -> Self {
        match self {
            Scalar::Real(x) => Scalar::Real(x.sin()),
            Scalar::Complex(z) => Scalar::Complex(z.sin()),
        }
    }

    pub fn cos(self) -> Self {
        match self {
            Scalar::Real(x) => Scalar::Real(x.cos()),
            Scalar::Complex(z) => Scalar::Complex(z.cos()),
        }
    }

    pub fn exp(self) -> Self {
        match self {
            Scalar::Real(x) => Scalar::Real(x.exp()),
            Scalar::Complex(z) => Scalar::Complex(z.exp()),
        }
    }

    /// Natural logarithm; principal branch for complex input, NaN for
    /// negative reals.
    pub fn ln(self) -> Self {
        match self {
            Scalar::Real(x) => Scalar::Real(x.ln()),
            Scalar::Complex(z) => Scalar::Complex(z.ln()),
        }
    }

    pub fn sqrt(self) -> Self {
        match self {
            Scalar::Real(x) => Scalar::Real(x.sqrt()),
            Scalar::Complex(z) => Scalar::Complex(z.sqrt()),
        }
    }

    /// Real power; principal branch for complex input.
    pub fn powf(self, exponent: f64) -> Self {
        match self {
            Scalar::Real(x) => Scalar::Real(x.powf(exponent)),
            Scalar::Complex(z) if z.re == 0.0 && z.im == 0.0 => {
                Scalar::Complex(Complex64::new(0f64.powf(exponent), 0.0))
            }
            Scalar::Complex(z) => Scalar::Complex(z.powf(exponent)),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::ZERO
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Complex(z)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Real(x) => write!(f, "{x}"),
            Scalar::Complex(z) if z.im.is_sign_negative() => write!(f, "{}-{}i", z.re, -z.im),
            Scalar::Complex(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Scalar", 2)?;
        st.serialize_field("re", &self.re())?;
        st.serialize_field("im", &self.im())?;
        st.end()
    }
}

// Smith's algorithm. With zero imaginary parts it reduces to a/c exactly.
fn complex_div(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $real:expr, $complex:expr) => {
        impl $trait for Scalar {
            type Output = Scalar;

            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real($real(a, b)),
                    (a, b) => Scalar::Complex($complex(a.to_complex(), b.to_complex())),
                }
            }
        }

        impl $trait<f64> for Scalar {
            type Output = Scalar;

            fn $method(self, rhs: f64) -> Scalar {
                self.$method(Scalar::Real(rhs))
            }
        }

        impl $trait<Scalar> for f64 {
            type Output = Scalar;

            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::Real(self).$method(rhs)
            }
        }
    };
}

binary_op!(Add, add, |a: f64, b: f64| a + b, |a: Complex64, b: Complex64| a + b);
binary_op!(Sub, sub, |a: f64, b: f64| a - b, |a: Complex64, b: Complex64| a - b);
binary_op!(Mul, mul, |a: f64, b: f64| a * b, |a: Complex64, b: Complex64| a * b);
binary_op!(Div, div, |a: f64, b: f64| a / b, complex_div);

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Real(x) => Scalar::Real(-x),
            Scalar::Complex(z) => Scalar::Complex(-z),
        }
    }
}
