//! Differentiable iteration maps and the built-in problem corpus.

mod corpus;

pub use corpus::{corpus_lookup, CORPUS_NAMES};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::golden::Golden;
use crate::jets::{Jet2, JetError, Scalar};

/// Classification of the fixed point of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapClass {
    /// `u'(x*) = 1`.
    Neu,
    /// `|u'(x*)| != 1`.
    Hyp,
    Unknown,
}

/// Where evaluation is expected to be valid. Advisory only: `eval` does
/// not enforce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainHint {
    Interval { lo: f64, hi: f64 },
    Disk { center: Scalar, radius: f64 },
}

impl DomainHint {
    pub fn contains(&self, x: Scalar) -> bool {
        match *self {
            DomainHint::Interval { lo, hi } => !x.is_complex() && x.re() >= lo && x.re() <= hi,
            DomainHint::Disk { center, radius } => (x - center).abs() <= radius,
        }
    }
}

type MapFn = dyn Fn(Jet2) -> Result<Jet2, JetError> + Send + Sync;

/// A named map `u` evaluated on 2-jets, with metadata describing its
/// fixed point: the class, the order `m` of the first non-vanishing
/// derivative beyond the first, and `alpha = u^(m)(x*)`.
#[derive(Clone)]
pub struct IterationMap {
    name: String,
    eval: Arc<MapFn>,
    pub class: MapClass,
    pub order: Option<u32>,
    pub alpha: Option<Scalar>,
    pub domain_hint: Option<DomainHint>,
}

impl IterationMap {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(Jet2) -> Result<Jet2, JetError> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            class: MapClass::Unknown,
            order: None,
            alpha: None,
            domain_hint: None,
        }
    }

    /// Declares a neutral fixed point satisfying `u^(m)(x*) = alpha`.
    pub fn neutral(mut self, order: Option<u32>, alpha: Option<Scalar>) -> Self {
        self.class = MapClass::Neu;
        self.order = order;
        self.alpha = alpha;
        self
    }

    pub fn hyperbolic(mut self) -> Self {
        self.class = MapClass::Hyp;
        self
    }

    pub fn with_domain(mut self, hint: DomainHint) -> Self {
        self.domain_hint = Some(hint);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The 2-jet `(u(x), u'(x), u''(x))`.
    pub fn eval(&self, x: Scalar) -> Result<Jet2, JetError> {
        (self.eval)(Jet2::variable(x))
    }

    pub fn eval_jet(&self, x: Jet2) -> Result<Jet2, JetError> {
        (self.eval)(x)
    }

    pub fn value(&self, x: Scalar) -> Result<Scalar, JetError> {
        (self.eval)(Jet2::constant(x)).map(|j| j.value)
    }
}

impl fmt::Debug for IterationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IterationMap")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("order", &self.order)
            .field("alpha", &self.alpha)
            .field("domain_hint", &self.domain_hint)
            .finish_non_exhaustive()
    }
}

/// A corpus entry: a map, where to start, and what to expect.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub map: IterationMap,
    pub x0: Scalar,
    pub x_star: Option<Scalar>,
    pub golden: Vec<Golden>,
}

impl ProblemSpec {
    /// `|u(x*) - x*|`, if the fixed point is known.
    pub fn fixed_point_residual(&self) -> Option<Result<f64, JetError>> {
        self.x_star.map(|xs| self.map.value(xs).map(|ux| (ux - xs).abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("unknown problem `{0}`; expected one of: {list}", list = CORPUS_NAMES.join(", "))]
    UnknownProblem(String),
    #[error("problem `{problem}` does not take parameter `{key}`")]
    UnknownParam { problem: String, key: String },
    #[error("problem `{problem}` requires parameter `{key}`")]
    MissingParam { problem: String, key: String },
    #[error("invalid value `{value}` for parameter `{key}`: {reason}")]
    InvalidParam { key: String, value: String, reason: String },
}
