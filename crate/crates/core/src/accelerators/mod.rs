//! Acceleration constructions for neutral fixed points.
//!
//! The central object is the combined iteration function
//!
//! ```text
//! C(u, v)(x) = (v(x) - u(x) v'(x)) / (1 - v'(x))
//! ```
//!
//! which shares the fixed point of `u` and `v` and has zero derivative there
//! whenever `u'(x*) = 1`. Taking `u` to be the identity, `v = C(x, u)` is
//! Newton's map for `x - u(x)` and `w = C(x, v)` is Newton's map again, now
//! for `(x - u(x)) / (1 - u'(x))`. That double newtonisation is the
//! standard accelerator.
//!
//! Everything here works on 2-jets of the map, so `u`, `u'` and `u''` are
//! exact; `v'` is carried in closed form as
//! `u''(x) (u(x) - x) / (1 - u'(x))^2`.

mod quadrature;

use std::cell::RefCell;

use serde::Serialize;
use thiserror::Error;

use crate::jets::{Jet2, JetError, Scalar};
use crate::maps::IterationMap;

/// Guard for near-zero denominators, relative to `1 + |x|`.
pub const EPS_SING: f64 = 1e-12;

/// Default tolerance for the continuous-extension branch at `x*`.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Deepest nesting accepted by [`integral_accelerator_step`].
pub const MAX_INTEGRAL_ORDER: u32 = 3;

const QUADRATURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Ok,
    /// `u(x) = x` to tolerance; the step returns its input.
    ConvergedAtInput,
    Singular,
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub value: Scalar,
    pub status: StepStatus,
}

impl StepOutcome {
    fn ok(value: Scalar) -> Self {
        if value.is_finite() {
            Self {
                value,
                status: StepStatus::Ok,
            }
        } else {
            Self {
                value,
                status: StepStatus::NonFinite,
            }
        }
    }

    fn converged(x: Scalar) -> Self {
        Self {
            value: x,
            status: StepStatus::ConvergedAtInput,
        }
    }

    fn singular(x: Scalar) -> Self {
        Self {
            value: x,
            status: StepStatus::Singular,
        }
    }

    fn non_finite() -> Self {
        Self {
            value: Scalar::real(f64::NAN),
            status: StepStatus::NonFinite,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == StepStatus::Ok
    }
}

/// The first newtonisation `v = C(x, u)` evaluated at a point, with its
/// derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Newtonised {
    pub value: StepOutcome,
    pub slope: Scalar,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AccelError {
    #[error(transparent)]
    Map(#[from] JetError),
    #[error("adaptive quadrature did not reach tolerance on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },
    #[error("integral accelerators are defined for real arguments and real maps only")]
    RealOnly,
    #[error("integral accelerator order {0} is outside 1..={max}", max = MAX_INTEGRAL_ORDER)]
    IntegralOrder(u32),
    #[error("composition count must be at least 1")]
    ZeroComposition,
    #[error("`{0}` is a sequence transform, not an iteration step")]
    NotAStep(String),
}

fn singular_denominator(d: Scalar, x: Scalar) -> bool {
    d.abs() <= EPS_SING * (1.0 + x.abs())
}

/// `C(u, v)` at `x` from the values `u(x)`, `v(x)` and `v'(x)`.
pub fn combined_map_value(u_val: Scalar, v_val: Scalar, v_d1: Scalar, x: Scalar) -> StepOutcome {
    if !(u_val.is_finite() && v_val.is_finite() && v_d1.is_finite() && x.is_finite()) {
        return StepOutcome::non_finite();
    }
    let denom = 1.0 - v_d1;
    if singular_denominator(denom, x) {
        return StepOutcome::singular(x);
    }
    StepOutcome::ok((v_val - u_val * v_d1) / denom)
}

/// `v(x) = (u(x) - x u'(x)) / (1 - u'(x))` and `v'(x)`.
///
/// When `|u(x) - x| <= tol (1 + |x|)` the point is taken as the fixed point
/// itself: `v(x) = x` with status [`StepStatus::ConvergedAtInput`] and zero
/// slope.
pub fn first_newtonisation(x: Scalar, u_jet: &Jet2, tol: f64) -> Newtonised {
    let gap = u_jet.value - x;
    if !(u_jet.value.is_finite() && u_jet.d1.is_finite() && x.is_finite()) {
        return Newtonised {
            value: StepOutcome::non_finite(),
            slope: Scalar::real(f64::NAN),
        };
    }
    if gap.abs() <= tol * (1.0 + x.abs()) {
        return Newtonised {
            value: StepOutcome::converged(x),
            slope: Scalar::ZERO.same_kind_as(x),
        };
    }
    let denom = 1.0 - u_jet.d1;
    if singular_denominator(denom, x) {
        return Newtonised {
            value: StepOutcome::singular(x),
            slope: Scalar::real(f64::NAN),
        };
    }
    let v = (u_jet.value - x * u_jet.d1) / denom;
    let slope = u_jet.d2 * gap / (denom * denom);
    Newtonised {
        value: StepOutcome::ok(v),
        slope,
    }
}

/// The standard accelerator `w(x) = (v(x) - x v'(x)) / (1 - v'(x))`.
pub fn standard_step(x: Scalar, u_jet: &Jet2, tol: f64) -> StepOutcome {
    let inner = first_newtonisation(x, u_jet, tol);
    if !inner.value.is_ok() {
        return inner.value;
    }
    combined_map_value(x, inner.value.value, inner.slope, x)
}

/// `C(x, φ)` with `φ(x) = u(x) - u'(x) + 1`, an accelerator for maps with
/// `u''(x*) != 0`.
pub fn phi_step(x: Scalar, u_jet: &Jet2) -> StepOutcome {
    let phi = u_jet.value - u_jet.d1 + 1.0;
    let phi_d1 = u_jet.d1 - u_jet.d2;
    combined_map_value(x, phi, phi_d1, x)
}

/// One plain iteration `u(x)`.
pub fn plain_step(x: Scalar, u: &IterationMap) -> Result<StepOutcome, AccelError> {
    Ok(StepOutcome::ok(u.value(x)?))
}

/// Steffensen's map `x - (u(x) - x)^2 / (x - 2u(x) + u(u(x)))`.
pub fn steffensen_step(x: Scalar, u: &IterationMap) -> Result<StepOutcome, AccelError> {
    let ux = u.value(x)?;
    let gap = ux - x;
    if !ux.is_finite() {
        return Ok(StepOutcome::non_finite());
    }
    if gap.abs() <= DEFAULT_TOL * (1.0 + x.abs()) {
        return Ok(StepOutcome::converged(x));
    }
    let uux = u.value(ux)?;
    let denom = x - 2.0 * ux + uux;
    if !denom.is_finite() {
        return Ok(StepOutcome::non_finite());
    }
    if singular_denominator(denom, x) {
        return Ok(StepOutcome::singular(x));
    }
    Ok(StepOutcome::ok(x - gap * gap / denom))
}

/// `h_j(x)`, the `j`-fold integral of `g` from 0, by nested adaptive
/// Simpson quadrature. Requires a real argument, a real-valued `g` and
/// `1 <= j <= 3`.
pub fn integral_accelerator_step(x: Scalar, g: &IterationMap, j: u32) -> Result<StepOutcome, AccelError> {
    if !(1..=MAX_INTEGRAL_ORDER).contains(&j) {
        return Err(AccelError::IntegralOrder(j));
    }
    let Scalar::Real(xr) = x else {
        return Err(AccelError::RealOnly);
    };
    if !xr.is_finite() {
        return Ok(StepOutcome::non_finite());
    }
    Ok(StepOutcome::ok(Scalar::real(repeated_integral(
        g,
        xr,
        j,
        QUADRATURE_TOL,
    )?)))
}

fn repeated_integral(g: &IterationMap, x: f64, j: u32, tol: f64) -> Result<f64, AccelError> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut level = Antiderivative::new(g, None, 0.0);
    // inner errors are integrated over a length |x| at every level
    let mut per_length = tol / (1.0 + x.abs());
    for _ in 1..j {
        per_length /= 4.0 * (1.0 + x.abs());
    }
    for _ in 0..j {
        level = Antiderivative::new(g, Some(Box::new(level)), per_length);
        per_length *= 4.0 * (1.0 + x.abs());
    }
    level.eval(x)
}

/// `g` itself when `inner` is `None`, otherwise `h(t) = ∫_0^t inner`.
///
/// Every computed value of `h` is kept. A new point is reached from the nearest
/// known one, so the nested quadratures only cover short fresh segments.
struct Antiderivative<'a> {
    g: &'a IterationMap,
    inner: Option<Box<Antiderivative<'a>>>,
    /// Absolute tolerance per unit of segment length.
    per_length: f64,
    /// `(t, h(t))`, sorted by `t`.
    known: RefCell<Vec<(f64, f64)>>,
}

impl<'a> Antiderivative<'a> {
    fn new(g: &'a IterationMap, inner: Option<Box<Antiderivative<'a>>>, per_length: f64) -> Self {
        Self {
            g,
            inner,
            per_length,
            known: RefCell::new(vec![(0.0, 0.0)]),
        }
    }

    fn eval(&self, t: f64) -> Result<f64, AccelError> {
        let Some(f) = &self.inner else {
            return match self.g.value(Scalar::real(t))? {
                Scalar::Real(v) => Ok(v),
                Scalar::Complex(_) => Err(AccelError::RealOnly),
            };
        };
        let (t0, h0) = {
            let known = self.known.borrow();
            let slot = known.partition_point(|&(s, _)| s < t);
            if known.get(slot).is_some_and(|&(s, _)| s == t) {
                return Ok(known[slot].1);
            }
            let left = slot.checked_sub(1).map(|i| known[i]);
            let right = known.get(slot).copied();
            match (left, right) {
                (Some(l), Some(r)) if (r.0 - t) < (t - l.0) => r,
                (Some(l), _) => l,
                (None, Some(r)) => r,
                (None, None) => unreachable!("the origin is always known"),
            }
        };
        let segment = quadrature::adaptive_simpson(&|s| f.eval(s), t0, t, self.per_length * (t - t0).abs())?;
        let value = h0 + segment;
        let mut known = self.known.borrow_mut();
        let slot = known.partition_point(|&(s, _)| s < t);
        known.insert(slot, (t, value));
        Ok(value)
    }
}

/// Applies `h` `k` times, stopping at the first outcome that is not
/// [`StepStatus::Ok`].
pub fn compose_step<F, E>(x: Scalar, mut h: F, k: u32) -> Result<StepOutcome, E>
where
    F: FnMut(Scalar) -> Result<StepOutcome, E>,
    E: From<AccelError>,
{
    if k == 0 {
        return Err(AccelError::ZeroComposition.into());
    }
    let mut current = StepOutcome::ok(x);
    for _ in 0..k {
        current = h(current.value)?;
        if !current.is_ok() {
            break;
        }
    }
    Ok(current)
}
