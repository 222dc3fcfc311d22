//! Sequence-to-sequence transforms on recorded iterates: Aitken's Δ², its
//! iterates, the second column of the θ-algorithm, and the W transform
//! `w_n = w(x_{n-1})` built on the standard accelerator.

use serde::Serialize;
use thiserror::Error;

use crate::accelerators::{standard_step, StepStatus, EPS_SING};
use crate::jets::Scalar;
use crate::maps::IterationMap;

/// Why a transformed sequence ended before its input did.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// A vanishing difference at this output position.
    Singular {
        at: usize,
    },
    NonFinite {
        at: usize,
    },
    Evaluation {
        at: usize,
        message: String,
    },
}

/// An ordered run of finite terms.
///
/// `offset` is the position of `items[0]` in the table the view belongs to.
/// Transforms place each output at the centre of the input window it was
/// computed from: Δ² output `n` uses `s[n..=n+2]` and sits at `n + 1`,
/// Θ₂ output `n` uses `s[n..=n+3]` and sits at `n + 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceView {
    pub items: Vec<Scalar>,
    pub provenance: String,
    pub offset: usize,
    pub truncation: Option<Truncation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("{transform} needs at least {needed} terms, got {got}")]
    TooShort {
        transform: &'static str,
        needed: usize,
        got: usize,
    },
}

impl SequenceView {
    /// Builds a view from raw terms, stopping at the first non-finite one.
    pub fn new(items: impl IntoIterator<Item = Scalar>, provenance: impl Into<String>) -> Self {
        let mut kept = Vec::new();
        let mut truncation = None;
        for (i, x) in items.into_iter().enumerate() {
            if !x.is_finite() {
                truncation = Some(Truncation::NonFinite { at: i });
                break;
            }
            kept.push(x);
        }
        Self {
            items: kept,
            provenance: provenance.into(),
            offset: 0,
            truncation,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `(table position, value)` pairs.
    pub fn positioned(&self) -> impl Iterator<Item = (usize, Scalar)> + '_ {
        self.items.iter().enumerate().map(|(i, &x)| (self.offset + i, x))
    }

    fn derived(&self, name: &str, shift: usize) -> SequenceView {
        SequenceView {
            items: Vec::new(),
            provenance: format!("{name}({})", self.provenance),
            offset: self.offset + shift,
            truncation: None,
        }
    }
}

fn tiny(d: Scalar, scale: Scalar) -> bool {
    d.abs() <= EPS_SING * (1.0 + scale.abs())
}

/// Aitken's Δ²: `s[n] - (Δs[n])^2 / Δ²s[n]`.
pub fn aitken_delta2(s: &SequenceView) -> Result<SequenceView, TransformError> {
    if s.len() < 3 {
        return Err(TransformError::TooShort {
            transform: "aitken",
            needed: 3,
            got: s.len(),
        });
    }
    let mut out = s.derived("aitken", 1);
    for (n, w) in s.items.windows(3).enumerate() {
        let d1 = w[1] - w[0];
        let d2 = w[2] - 2.0 * w[1] + w[0];
        if tiny(d2, w[0]) {
            out.truncation = Some(Truncation::Singular { at: n });
            break;
        }
        out.items.push(w[0] - d1 * d1 / d2);
    }
    Ok(out)
}

/// Δ² applied `depth` times; `depth = 0` is the identity.
pub fn iterated_aitken(s: &SequenceView, depth: u32) -> Result<SequenceView, TransformError> {
    let needed = 2 * depth as usize + 1;
    if s.len() < needed {
        return Err(TransformError::TooShort {
            transform: "iterated_aitken",
            needed,
            got: s.len(),
        });
    }
    let mut current = s.clone();
    for _ in 0..depth {
        let truncated = current.truncation.clone();
        current = aitken_delta2(&current)?;
        // an earlier truncation explains why this pass stopped short
        if current.truncation.is_none() {
            current.truncation = truncated;
        }
        if current.len() < 3 && current.truncation.is_some() {
            break;
        }
    }
    Ok(current)
}

/// Second column Θ₂ of the θ-algorithm.
///
/// With `θ_{-1} = 0` and `θ_0^{(n)} = s_n`:
///
/// ```text
/// θ_1^{(n)} = 1 / Δs_n
/// θ_2^{(n)} = s_{n+1} + Δs_{n+1} Δθ_1^{(n+1)} / Δ²θ_1^{(n)}
/// ```
pub fn theta2(s: &SequenceView) -> Result<SequenceView, TransformError> {
    if s.len() < 4 {
        return Err(TransformError::TooShort {
            transform: "theta2",
            needed: 4,
            got: s.len(),
        });
    }
    let mut out = s.derived("theta2", 2);
    let mut theta1 = Vec::with_capacity(s.len() - 1);
    for w in s.items.windows(2) {
        let d = w[1] - w[0];
        if tiny(d, w[0]) {
            break;
        }
        theta1.push(1.0 / d);
    }
    for n in 0..s.len() - 3 {
        if n + 2 >= theta1.len() {
            out.truncation = Some(Truncation::Singular { at: n });
            break;
        }
        let (t0, t1, t2) = (theta1[n], theta1[n + 1], theta1[n + 2]);
        let curvature = t2 - 2.0 * t1 + t0;
        if tiny(curvature, t0) {
            out.truncation = Some(Truncation::Singular { at: n });
            break;
        }
        let ds = s.items[n + 2] - s.items[n + 1];
        let value = s.items[n + 1] + ds * (t2 - t1) / curvature;
        if !value.is_finite() {
            out.truncation = Some(Truncation::NonFinite { at: n });
            break;
        }
        out.items.push(value);
    }
    Ok(out)
}

/// The W transform: `w_n = w(s_{n-1})` for the standard accelerator `w`
/// of the map `u` that generated `s`.
pub fn w_transform(s: &SequenceView, u: &IterationMap, tol: f64) -> SequenceView {
    let mut out = s.derived("w_transform", 1);
    for (n, &x) in s.items.iter().enumerate() {
        let jet = match u.eval(x) {
            Ok(j) => j,
            Err(e) => {
                out.truncation = Some(Truncation::Evaluation {
                    at: n,
                    message: e.to_string(),
                });
                break;
            }
        };
        let step = standard_step(x, &jet, tol);
        match step.status {
            StepStatus::Ok | StepStatus::ConvergedAtInput => out.items.push(step.value),
            StepStatus::Singular => {
                out.truncation = Some(Truncation::Singular { at: n });
                break;
            }
            StepStatus::NonFinite => {
                out.truncation = Some(Truncation::NonFinite { at: n });
                break;
            }
        }
    }
    out
}
