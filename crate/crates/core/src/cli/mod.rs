//! Experiment harness behind the `fixaccel` binary: run methods against a
//! corpus problem, render the resulting table, and check reference suites.

mod render;
mod suite;

pub use render::{format_significant, render, OutputFormat};
pub use suite::{run_suite, CheckResult, SuiteError, SuiteReport, SUITE_NAMES};

use serde::Serialize;
use thiserror::Error;

use crate::accelerators::DEFAULT_TOL;
use crate::engine::{iterate, IterateOptions, IterationTrace, PointStatus, StopReason, DEFAULT_MAX_ITER};
use crate::jets::Scalar;
use crate::maps::{corpus_lookup, CorpusError, ProblemSpec};
use crate::method::Method;
use crate::transforms::{aitken_delta2, iterated_aitken, theta2, w_transform, SequenceView, Truncation};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub params: Vec<(String, String)>,
    pub methods: Vec<Method>,
    pub x0: Option<Scalar>,
    pub max_iter: usize,
    pub tol: f64,
    /// Iterations stop once `|x_n|` exceeds this. Unbounded by default so
    /// that overflow shows up as "Indeterminate" cells.
    pub divergence_bound: f64,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(problem: impl Into<String>, methods: Vec<Method>) -> Self {
        Self {
            problem: problem.into(),
            params: Vec::new(),
            methods,
            x0: None,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            divergence_bound: f64::INFINITY,
            format: OutputFormat::Markdown,
        }
    }

    pub fn param(mut self, key: &str, value: &str) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn x0(mut self, x0: Scalar) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    /// Checks the config and resolves its problem.
    pub fn validate(&self) -> Result<ProblemSpec, ConfigError> {
        if self.methods.is_empty() {
            return Err(ConfigError::NoMethods);
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(ConfigError::Tolerance(self.tol));
        }
        if self.divergence_bound.is_nan() || self.divergence_bound <= 0.0 {
            return Err(ConfigError::DivergenceBound(self.divergence_bound));
        }
        if let Some(x0) = self.x0 {
            if !x0.is_finite() {
                return Err(ConfigError::StartPoint(x0.to_string()));
            }
        }
        Ok(corpus_lookup(&self.problem, &self.params)?)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("no methods given; pass at least one --method")]
    NoMethods,
    #[error("tolerance must be finite and non-negative, got {0}")]
    Tolerance(f64),
    #[error("divergence bound must be positive, got {0}")]
    DivergenceBound(f64),
    #[error("start point must be finite, got {0}")]
    StartPoint(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Value {
        value: Scalar,
        status: PointStatus,
    },
    /// The computation overflowed before reaching this row.
    Indeterminate,
    /// Nothing is defined at this row.
    Blank,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub method: Method,
    pub cells: Vec<Cell>,
    pub stop_reason: String,
}

/// A table with one column per method and one row per iteration index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub problem: String,
    pub x0: Scalar,
    pub columns: Vec<Column>,
}

impl Report {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.cells.len())
    }

    pub fn column(&self, method: &Method) -> Option<&Column> {
        self.columns.iter().find(|c| &c.method == method)
    }
}

fn problem_label(config: &ExperimentConfig) -> String {
    if config.params.is_empty() {
        return config.problem.clone();
    }
    let params: Vec<String> = config.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{}({})", config.problem, params.join(","))
}

fn trace_column(method: &Method, trace: &IterationTrace, rows: usize) -> Column {
    let mut cells = vec![Cell::Blank; rows];
    for p in &trace.points {
        if p.index < rows {
            cells[p.index] = Cell::Value {
                value: p.value,
                status: p.status,
            };
        }
    }
    if trace.stop_reason == StopReason::NonFinite {
        let next = trace.points.len();
        for cell in cells.iter_mut().skip(next) {
            *cell = Cell::Indeterminate;
        }
    }
    Column {
        method: method.clone(),
        cells,
        stop_reason: trace.stop_reason.to_string(),
    }
}

fn view_column(method: &Method, view: &SequenceView, rows: usize) -> Column {
    let mut cells = vec![Cell::Blank; rows];
    for (n, value) in view.positioned() {
        if n < rows {
            cells[n] = Cell::Value {
                value,
                status: PointStatus::Ok,
            };
        }
    }
    let stop_reason = match &view.truncation {
        None => "end_of_input".to_string(),
        Some(Truncation::Singular { at }) => format!("singular at {}", view.offset + at),
        Some(Truncation::NonFinite { at }) => {
            for cell in cells.iter_mut().skip(view.offset + at) {
                *cell = Cell::Indeterminate;
            }
            format!("nonfinite at {}", view.offset + at)
        }
        Some(Truncation::Evaluation { at, message }) => {
            format!("failed at {}: {message}", view.offset + at)
        }
    };
    Column {
        method: method.clone(),
        cells,
        stop_reason,
    }
}

/// Runs every configured method and assembles the table.
///
/// Iteration methods start from the configured (or the problem's) start
/// point. Sequence transforms are applied to the plain iterates and placed
/// at the rows given by their offsets.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, ConfigError> {
    let problem = config.validate()?;
    let x0 = config.x0.unwrap_or(problem.x0);
    let map = &problem.map;
    let opts = IterateOptions {
        max_iter: config.max_iter,
        tol: config.tol,
        divergence_bound: config.divergence_bound,
        x_star: problem.x_star,
    };
    let rows = config.max_iter + 1;
    let run = |method: &Method| iterate(|x| method.step(map, x, config.tol), x0, &opts);

    let needs_plain = config.methods.iter().any(Method::is_transform);
    let plain = needs_plain.then(|| run(&Method::Plain));

    let columns = config
        .methods
        .iter()
        .map(|method| {
            if !method.is_transform() {
                return trace_column(method, &run(method), rows);
            }
            let plain = plain.as_ref().expect("plain trace computed for transforms");
            let source = SequenceView::new(plain.values(), "plain");
            let derived = match method {
                Method::Aitken => aitken_delta2(&source),
                Method::IteratedAitken(depth) => iterated_aitken(&source, *depth),
                Method::Theta2 => theta2(&source),
                Method::WTransform => Ok(w_transform(&source, map, config.tol)),
                _ => unreachable!("only transforms reach here"),
            };
            match derived {
                Ok(view) => view_column(method, &view, rows),
                Err(e) => Column {
                    method: method.clone(),
                    cells: vec![Cell::Blank; rows],
                    stop_reason: e.to_string(),
                },
            }
        })
        .collect();

    Ok(Report {
        problem: problem_label(config),
        x0,
        columns,
    })
}
