use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{run_experiment, Cell, ConfigError, ExperimentConfig};
use crate::golden::{Expected, Golden};
use crate::jets::Scalar;
use crate::maps::corpus_lookup;
use crate::method::Method;

pub const SUITE_NAMES: &[&str] = &["table1", "table2", "table3"];

struct SuiteDef {
    name: &'static str,
    problem: &'static str,
    params: &'static [(&'static str, &'static str)],
    methods: &'static [Method],
    max_iter: usize,
}

const SUITES: &[SuiteDef] = &[
    SuiteDef {
        name: "table1",
        problem: "sin",
        params: &[],
        methods: &[
            Method::Plain,
            Method::FirstNewton,
            Method::Standard,
            Method::Aitken,
            Method::Theta2,
        ],
        max_iter: 4,
    },
    SuiteDef {
        name: "table2",
        problem: "logistic",
        params: &[("a", "1")],
        methods: &[Method::Plain, Method::Phi],
        max_iter: 3,
    },
    SuiteDef {
        name: "table3",
        problem: "kvb_complex",
        params: &[],
        methods: &[Method::Plain, Method::Standard],
        max_iter: 5,
    },
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error("unknown suite `{0}`; expected one of: {list}", list = SUITE_NAMES.join(", "))]
    UnknownSuite(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub golden: Golden,
    pub got: Option<Scalar>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let g = &c.golden;
            let expected = match g.expected {
                Expected::Value(v) => v.to_string(),
                Expected::Indeterminate => "Indeterminate".to_string(),
            };
            let got = c.got.map_or_else(|| "Indeterminate".to_string(), |v| v.to_string());
            writeln!(
                f,
                "{} {} {}[{}].{:?}: expected {expected} ({:?}), got {got}",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                g.method,
                g.index,
                g.component,
                g.tolerance,
            )?;
        }
        write!(f, "{} checks, {} failed", self.checks.len(), self.failures())
    }
}

fn check(golden: &Golden, cell: Cell) -> (Option<Scalar>, bool) {
    match (golden.expected, cell) {
        (Expected::Indeterminate, Cell::Indeterminate) => (None, true),
        (Expected::Indeterminate, Cell::Value { value, .. }) => (Some(value), false),
        (Expected::Value(_), Cell::Value { value, .. }) => (Some(value), golden.accepts(value)),
        (_, _) => (None, false),
    }
}

/// Runs the named reference tables and checks every populated cell with a
/// reference value.
pub fn run_suite<S: AsRef<str>>(names: &[S]) -> Result<SuiteReport, SuiteError> {
    let defs = names
        .iter()
        .map(|n| {
            SUITES
                .iter()
                .find(|s| s.name == n.as_ref())
                .ok_or_else(|| SuiteError::UnknownSuite(n.as_ref().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut report = SuiteReport::default();
    for def in defs {
        let mut config = ExperimentConfig::new(def.problem, def.methods.to_vec()).max_iter(def.max_iter);
        for (k, v) in def.params {
            config = config.param(k, v);
        }
        let table = run_experiment(&config)?;
        let problem = corpus_lookup(def.problem, def.params).map_err(ConfigError::from)?;
        for golden in problem.golden.into_iter().filter(|g| def.methods.contains(&g.method)) {
            let cell = table
                .column(&golden.method)
                .and_then(|c| c.cells.get(golden.index).copied())
                .unwrap_or(Cell::Blank);
            let (got, passed) = check(&golden, cell);
            report.checks.push(CheckResult {
                suite: def.name.to_string(),
                golden,
                got,
                passed,
            });
        }
    }
    Ok(report)
}
