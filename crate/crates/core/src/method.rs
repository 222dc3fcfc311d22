//! The catalogue of iteration methods and sequence transforms that can be
//! run against a problem.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::accelerators::{
    compose_step, first_newtonisation, integral_accelerator_step, phi_step, plain_step, standard_step, steffensen_step,
    AccelError, StepOutcome,
};
use crate::jets::Scalar;
use crate::maps::IterationMap;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Method {
    /// `x_{n+1} = u(x_n)`.
    Plain,
    /// Newton's map for `x - u(x)`, continuously extended at `x*`.
    FirstNewton,
    /// The double newtonisation `w = C(x, C(x, u))`.
    Standard,
    Phi,
    Steffensen,
    Integral(u32),
    Compose(Box<Method>, u32),
    Aitken,
    IteratedAitken(u32),
    Theta2,
    WTransform,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MethodParseError {
    #[error("unknown method `{0}`; expected plain, first_newton, standard, phi, steffensen, integral(j), compose(method,k), aitken, iterated_aitken(depth), theta2 or w_transform")]
    Unknown(String),
    #[error("bad argument in `{0}`")]
    BadArgument(String),
    #[error("compose(...) needs an iteration method, not the sequence transform `{0}`")]
    ComposeTransform(String),
}

impl Method {
    /// Sequence transforms act on the recorded plain iterates instead of
    /// defining a step of their own.
    pub fn is_transform(&self) -> bool {
        matches!(
            self,
            Method::Aitken | Method::IteratedAitken(_) | Method::Theta2 | Method::WTransform
        )
    }

    /// One application of the method's iteration function at `x`.
    ///
    /// Returns [`AccelError::NotAStep`] for sequence transforms.
    pub fn step(&self, map: &IterationMap, x: Scalar, tol: f64) -> Result<StepOutcome, AccelError> {
        match self {
            Method::Plain => plain_step(x, map),
            Method::FirstNewton => Ok(first_newtonisation(x, &map.eval(x)?, tol).value),
            Method::Standard => Ok(standard_step(x, &map.eval(x)?, tol)),
            Method::Phi => Ok(phi_step(x, &map.eval(x)?)),
            Method::Steffensen => steffensen_step(x, map),
            Method::Integral(j) => integral_accelerator_step(x, map, *j),
            Method::Compose(inner, k) => compose_step(x, |y| inner.step(map, y, tol), *k),
            _ => Err(AccelError::NotAStep(self.to_string())),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Plain => f.write_str("plain"),
            Method::FirstNewton => f.write_str("first_newton"),
            Method::Standard => f.write_str("standard"),
            Method::Phi => f.write_str("phi"),
            Method::Steffensen => f.write_str("steffensen"),
            Method::Integral(j) => write!(f, "integral({j})"),
            Method::Compose(m, k) => write!(f, "compose({m},{k})"),
            Method::Aitken => f.write_str("aitken"),
            Method::IteratedAitken(d) => write!(f, "iterated_aitken({d})"),
            Method::Theta2 => f.write_str("theta2"),
            Method::WTransform => f.write_str("w_transform"),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn parse_count(full: &str, arg: &str) -> Result<u32, MethodParseError> {
    arg.trim()
        .parse()
        .map_err(|_| MethodParseError::BadArgument(full.to_string()))
}

impl FromStr for Method {
    type Err = MethodParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (head, args) = match s.find('(') {
            Some(open) if s.ends_with(')') => (&s[..open], Some(&s[open + 1..s.len() - 1])),
            Some(_) => return Err(MethodParseError::BadArgument(s.to_string())),
            None => (s, None),
        };
        let method = match (head.trim(), args) {
            ("plain", None) => Method::Plain,
            ("first_newton", None) => Method::FirstNewton,
            ("standard", None) => Method::Standard,
            ("phi", None) => Method::Phi,
            ("steffensen", None) => Method::Steffensen,
            ("aitken", None) => Method::Aitken,
            ("theta2", None) => Method::Theta2,
            ("w_transform", None) => Method::WTransform,
            ("integral", Some(a)) => Method::Integral(parse_count(s, a)?),
            ("iterated_aitken", Some(a)) => Method::IteratedAitken(parse_count(s, a)?),
            ("compose", Some(a)) => {
                // the inner method may itself contain commas
                let split = a
                    .rfind(',')
                    .ok_or_else(|| MethodParseError::BadArgument(s.to_string()))?;
                let inner: Method = a[..split].parse()?;
                if inner.is_transform() {
                    return Err(MethodParseError::ComposeTransform(inner.to_string()));
                }
                Method::Compose(Box::new(inner), parse_count(s, &a[split + 1..])?)
            }
            _ => return Err(MethodParseError::Unknown(s.to_string())),
        };
        Ok(method)
    }
}
