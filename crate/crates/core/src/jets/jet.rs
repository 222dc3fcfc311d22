use std::ops::{Add, Mul, Neg, Sub};

use super::{JetError, Scalar};

/// Truncated Taylor arithmetic through second order.
///
/// A `Jet2` carries `(f(x), f'(x), f''(x))`. Lift the independent variable
/// with [`Jet2::variable`] and build the map from the arithmetic operators
/// and the elementary functions below; every derivative is exact up to
/// floating-point rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: Scalar,
    pub d1: Scalar,
    pub d2: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Ln,
    /// `x^β` for a real exponent β.
    PowReal(f64),
    Sqrt,
}

impl Jet2 {
    pub fn new(value: Scalar, d1: Scalar, d2: Scalar) -> Self {
        Self { value, d1, d2 }
    }

    /// The identity map lifted at `x`: `(x, 1, 0)`.
    pub fn variable(x: Scalar) -> Self {
        Self::new(x, Scalar::ONE.same_kind_as(x), Scalar::ZERO.same_kind_as(x))
    }

    /// A constant: `(c, 0, 0)`.
    pub fn constant(c: impl Into<Scalar>) -> Self {
        let c = c.into();
        Self::new(c, Scalar::ZERO.same_kind_as(c), Scalar::ZERO.same_kind_as(c))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Applies one of the five arithmetic operations. `b` is ignored for
    /// `Neg`.
    pub fn arith(self, b: Jet2, op: ArithOp) -> Result<Jet2, JetError> {
        Ok(match op {
            ArithOp::Add => self + b,
            ArithOp::Sub => self - b,
            ArithOp::Mul => self * b,
            ArithOp::Div => self.try_div(b)?,
            ArithOp::Neg => -self,
        })
    }

    pub fn try_div(self, rhs: Jet2) -> Result<Jet2, JetError> {
        if rhs.value.is_zero() {
            return Err(JetError::SingularDivision);
        }
        let q = self.value / rhs.value;
        let q1 = (self.d1 - q * rhs.d1) / rhs.value;
        let q2 = (self.d2 - 2.0 * q1 * rhs.d1 - q * rhs.d2) / rhs.value;
        Ok(Jet2::new(q, q1, q2))
    }

    /// Chain rule through second order given `f(a)`, `f'(a)`, `f''(a)`.
    fn compose(self, f0: Scalar, f1: Scalar, f2: Scalar) -> Jet2 {
        Jet2::new(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)
    }

    pub fn elementary(self, f: Elementary) -> Result<Jet2, JetError> {
        match f {
            Elementary::Sin => Ok(self.sin()),
            Elementary::Cos => Ok(self.cos()),
            Elementary::Exp => Ok(self.exp()),
            Elementary::Ln => self.ln(),
            Elementary::PowReal(beta) => self.powf(beta),
            Elementary::Sqrt => self.sqrt(),
        }
    }

    pub fn sin(self) -> Jet2 {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Jet2 {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.compose(c, -s, -c)
    }

    pub fn exp(self) -> Jet2 {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Result<Jet2, JetError> {
        let x = self.value;
        let outside = match x {
            Scalar::Real(r) => r <= 0.0,
            Scalar::Complex(_) => x.is_zero(),
        };
        if outside {
            return Err(JetError::Domain {
                function: "ln",
                input: x,
            });
        }
        let inv = 1.0 / x;
        Ok(self.compose(x.ln(), inv, -(inv * inv)))
    }

    /// `x^β` for real β. In the real variant a negative base is only
    /// accepted for integer β; the complex variant uses the principal branch.
    pub fn powf(self, beta: f64) -> Result<Jet2, JetError> {
        let x = self.value;
        if let Scalar::Real(r) = x {
            if r < 0.0 && beta.fract() != 0.0 {
                return Err(JetError::Domain {
                    function: "pow_real",
                    input: x,
                });
            }
        }
        let f0 = x.powf(beta);
        let f1 = beta * x.powf(beta - 1.0);
        let f2 = beta * (beta - 1.0) * x.powf(beta - 2.0);
        Ok(self.compose(f0, f1, f2))
    }

    pub fn sqrt(self) -> Result<Jet2, JetError> {
        let x = self.value;
        if let Scalar::Real(r) = x {
            if r < 0.0 {
                return Err(JetError::Domain {
                    function: "sqrt",
                    input: x,
                });
            }
        }
        let s = x.sqrt();
        let f1 = 0.5 / s;
        let f2 = -0.5 * f1 / x;
        Ok(self.compose(s, f1, f2))
    }

    /// Integer power by repeated multiplication; no domain restriction.
    pub fn powi(self, n: u32) -> Jet2 {
        let mut acc = Jet2::constant(Scalar::ONE.same_kind_as(self.value));
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Add for Jet2 {
    type Output = Jet2;

    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2::new(self.value + rhs.value, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;

    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2::new(self.value - rhs.value, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;

    fn mul(self, rhs: Jet2) -> Jet2 {
        Jet2::new(
            self.value * rhs.value,
            self.d1 * rhs.value + self.value * rhs.d1,
            self.d2 * rhs.value + 2.0 * self.d1 * rhs.d1 + self.value * rhs.d2,
        )
    }
}

impl Neg for Jet2 {
    type Output = Jet2;

    fn neg(self) -> Jet2 {
        Jet2::new(-self.value, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;

    fn add(self, rhs: f64) -> Jet2 {
        Jet2::new(self.value + rhs, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;

    fn sub(self, rhs: f64) -> Jet2 {
        Jet2::new(self.value - rhs, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;

    fn mul(self, rhs: f64) -> Jet2 {
        Jet2::new(self.value * rhs, self.d1 * rhs, self.d2 * rhs)
    }
}

impl Mul<Scalar> for Jet2 {
    type Output = Jet2;

    fn mul(self, rhs: Scalar) -> Jet2 {
        Jet2::new(self.value * rhs, self.d1 * rhs, self.d2 * rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(j: Jet2) -> (f64, f64, f64) {
        (j.value.re(), j.d1.re(), j.d2.re())
    }

    fn lift(x: f64) -> Jet2 {
        Jet2::variable(Scalar::real(x))
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(triple(lift(2.0) * lift(2.0)), (4.0, 4.0, 2.0));
        assert_eq!(triple(Jet2::constant(3.0) + lift(1.0)), (4.0, 1.0, 0.0));
        let q = lift(2.0).arith(Jet2::constant(2.0), ArithOp::Div).unwrap();
        assert_eq!(triple(q), (1.0, 0.5, 0.0));
        let n = lift(2.0).arith(lift(0.0), ArithOp::Neg).unwrap();
        assert_eq!(triple(n), (-2.0, -1.0, 0.0));
    }

    #[test]
    fn division_by_zero_valued_jet_is_singular() {
        let err = lift(1.0).try_div(lift(0.0)).unwrap_err();
        assert!(matches!(err, JetError::SingularDivision));
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(triple(lift(0.0).sin()), (0.0, 1.0, -0.0));
        assert_eq!(triple(lift(0.0).exp()), (1.0, 1.0, 1.0));
        assert_eq!(triple(lift(1.0).powf(1.5).unwrap()), (1.0, 1.5, 0.75));
        assert_eq!(triple(lift(4.0).sqrt().unwrap()), (2.0, 0.25, -1.0 / 32.0));
        assert_eq!(triple(lift(1.0).ln().unwrap()), (0.0, 1.0, -1.0));
    }

    #[test]
    fn domain_errors_name_the_function() {
        let e = lift(-1.0).ln().unwrap_err();
        assert!(e.to_string().contains("ln"));
        let e = lift(-1.0).powf(0.5).unwrap_err();
        assert!(e.to_string().contains("pow_real"));
        assert!(lift(-2.0).powf(3.0).is_ok());
        assert!(lift(-1.0).sqrt().is_err());
        // principal branch in the complex variant
        let z = Jet2::variable(Scalar::complex(-1.0, 0.0)).sqrt().unwrap();
        assert!((z.value.im() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = lift(1.3);
        assert_eq!(x.powi(3), x * x * x);
        assert_eq!(triple(x.powi(0)), (1.0, 0.0, 0.0));
    }
}
