//! Running an iteration to completion and judging how it converged.

use std::fmt::Display;

use serde::Serialize;
use thiserror::Error;

use crate::accelerators::{StepOutcome, StepStatus, DEFAULT_TOL};
use crate::jets::Scalar;

pub const DEFAULT_MAX_ITER: usize = 20;
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateOptions {
    pub max_iter: usize,
    /// Stop once `|x_{n+1} - x_n| <= tol (1 + |x_{n+1}|)`.
    pub tol: f64,
    /// Stop once `|x_n|` exceeds this.
    pub divergence_bound: f64,
    /// When known, the trace records `|x_n - x*|`.
    pub x_star: Option<Scalar>,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
            x_star: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    Converged,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub index: usize,
    pub value: Scalar,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIter,
    Converged,
    Diverged,
    Singular,
    /// The next iterate was not finite; the last recorded point is the last
    /// finite one.
    NonFinite,
    /// The map could not be evaluated.
    Failed(String),
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StopReason::MaxIter => f.write_str("max_iter"),
            StopReason::Converged => f.write_str("converged"),
            StopReason::Diverged => f.write_str("diverged"),
            StopReason::Singular => f.write_str("singular"),
            StopReason::NonFinite => f.write_str("nonfinite"),
            StopReason::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub points: Vec<TracePoint>,
    pub stop_reason: StopReason,
    pub error_sequence: Option<Vec<f64>>,
}

impl IterationTrace {
    pub fn values(&self) -> impl Iterator<Item = Scalar> + '_ {
        self.points.iter().map(|p| p.value)
    }

    pub fn last(&self) -> Scalar {
        self.points.last().expect("a trace always holds its start point").value
    }
}

/// Iterates `step` from `x0` until one of the stopping rules in
/// [`IterateOptions`] fires, the step reports a singular or non-finite
/// outcome, or `max_iter` steps have been taken.
pub fn iterate<F, E>(mut step: F, x0: Scalar, opts: &IterateOptions) -> IterationTrace
where
    F: FnMut(Scalar) -> Result<StepOutcome, E>,
    E: Display,
{
    let mut points = vec![TracePoint {
        index: 0,
        value: x0,
        status: PointStatus::Ok,
    }];
    let mut x = x0;
    let mut stop_reason = StopReason::MaxIter;
    for index in 1..=opts.max_iter {
        let outcome = match step(x) {
            Ok(o) => o,
            Err(e) => {
                stop_reason = StopReason::Failed(e.to_string());
                break;
            }
        };
        match outcome.status {
            StepStatus::Singular => {
                stop_reason = StopReason::Singular;
                break;
            }
            StepStatus::NonFinite => {
                stop_reason = StopReason::NonFinite;
                break;
            }
            StepStatus::Ok | StepStatus::ConvergedAtInput => {}
        }
        let next = outcome.value;
        if !next.is_finite() {
            stop_reason = StopReason::NonFinite;
            break;
        }
        if (next - x).abs() <= opts.tol * (1.0 + next.abs()) {
            points.push(TracePoint {
                index,
                value: next,
                status: PointStatus::Converged,
            });
            stop_reason = StopReason::Converged;
            break;
        }
        if next.abs() > opts.divergence_bound {
            points.push(TracePoint {
                index,
                value: next,
                status: PointStatus::Diverged,
            });
            stop_reason = StopReason::Diverged;
            break;
        }
        points.push(TracePoint {
            index,
            value: next,
            status: PointStatus::Ok,
        });
        x = next;
    }
    let error_sequence = opts
        .x_star
        .map(|xs| points.iter().map(|p| (p.value - xs).abs()).collect());
    IterationTrace {
        points,
        stop_reason,
        error_sequence,
    }
}

/// Windows used to classify the error ratios `|e_{n+1}| / |e_n|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderThresholds {
    /// Final ratio inside this open interval: logarithmic.
    pub logarithmic: (f64, f64),
    /// Final ratio inside this open interval and stable: linear.
    pub linear: (f64, f64),
    /// Final ratio below this: superlinear.
    pub superlinear_below: f64,
    /// Largest change between the last two ratios still counted as stable.
    pub stabilization: f64,
}

impl Default for OrderThresholds {
    fn default() -> Self {
        Self {
            logarithmic: (0.95, 1.05),
            linear: (0.05, 0.95),
            superlinear_below: 0.05,
            stabilization: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Logarithmic,
    Linear(f64),
    Superlinear,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderReport {
    Ratios {
        ratios: Vec<f64>,
        verdict: Verdict,
    },
    /// The iterate at `index` hit the fixed point exactly.
    EarlyExact {
        index: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("need at least 4 distinct finite iterates to estimate an order, got {0}")]
    InsufficientPoints(usize),
    #[error("the fixed point must be finite")]
    NonFiniteFixedPoint,
}

pub fn empirical_order(trace: &IterationTrace, x_star: Scalar) -> Result<OrderReport, EngineError> {
    empirical_order_with(trace, x_star, &OrderThresholds::default())
}

pub fn empirical_order_with(
    trace: &IterationTrace,
    x_star: Scalar,
    thresholds: &OrderThresholds,
) -> Result<OrderReport, EngineError> {
    if !x_star.is_finite() {
        return Err(EngineError::NonFiniteFixedPoint);
    }
    let mut values: Vec<Scalar> = trace.values().filter(Scalar::is_finite).collect();
    // a converged step that returned its input adds no information
    while values.len() >= 2 && values[values.len() - 1] == values[values.len() - 2] {
        values.pop();
    }
    let errors: Vec<f64> = values.iter().map(|&x| (x - x_star).abs()).collect();
    if let Some(index) = errors
        .iter()
        .take(errors.len().saturating_sub(1))
        .position(|&e| e == 0.0)
    {
        return Ok(OrderReport::EarlyExact { index });
    }
    if errors.len() < 4 {
        return Err(EngineError::InsufficientPoints(errors.len()));
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    let last = ratios[ratios.len() - 1];
    let prev = ratios[ratios.len() - 2];
    let inside = |(lo, hi): (f64, f64), r: f64| r > lo && r < hi;
    let verdict = if last < thresholds.superlinear_below {
        Verdict::Superlinear
    } else if inside(thresholds.logarithmic, last) {
        Verdict::Logarithmic
    } else if inside(thresholds.linear, last) && (last - prev).abs() <= thresholds.stabilization {
        Verdict::Linear(last)
    } else {
        Verdict::Inconclusive
    };
    Ok(OrderReport::Ratios { ratios, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accelerators::{first_newtonisation, standard_step, AccelError};
    use crate::maps::{corpus_lookup, IterationMap};
    use crate::method::Method;

    const NONE: &[(&str, &str)] = &[];

    fn run(map: &IterationMap, method: Method, x0: Scalar, max_iter: usize) -> IterationTrace {
        let opts = IterateOptions {
            max_iter,
            ..Default::default()
        };
        iterate(|x| method.step(map, x, DEFAULT_TOL), x0, &opts)
    }

    #[test]
    fn identity_converges_after_one_step() {
        let trace = iterate(
            |x| {
                Ok::<_, AccelError>(StepOutcome {
                    value: x,
                    status: StepStatus::Ok,
                })
            },
            Scalar::real(0.7),
            &IterateOptions::default(),
        );
        assert_eq!(trace.points.len(), 2);
        assert_eq!(trace.stop_reason, StopReason::Converged);
        assert_eq!(trace.points[0].status, PointStatus::Ok);
    }

    #[test]
    fn plain_complex_iteration_blows_up() {
        let p = corpus_lookup("kvb_complex", NONE).unwrap();
        let opts = IterateOptions {
            max_iter: 5,
            divergence_bound: f64::INFINITY,
            ..Default::default()
        };
        let trace = iterate(|x| Method::Plain.step(&p.map, x, DEFAULT_TOL), p.x0, &opts);
        assert_eq!(trace.points.len(), 4);
        assert!(trace.points[3].value.abs() > 1e40);
        assert_eq!(trace.stop_reason, StopReason::NonFinite);

        // with the default bound the same run is flagged one step earlier
        let trace = run(&p.map, Method::Plain, p.x0, 5);
        assert_eq!(trace.stop_reason, StopReason::Diverged);
        assert_eq!(trace.points.last().unwrap().status, PointStatus::Diverged);
    }

    #[test]
    fn standard_complex_iteration_converges() {
        let p = corpus_lookup("kvb_complex", NONE).unwrap();
        let trace = run(&p.map, Method::Standard, p.x0, 5);
        assert_eq!(trace.points.len(), 6);
        let z5 = trace.points[5].value;
        assert!((z5 - Scalar::complex(2.0, 0.0)).abs() < 1e-9);
        assert!((z5.re() - 1.999999999946048).abs() < 1e-9);
    }

    #[test]
    fn trace_bounds_and_errors() {
        let p = corpus_lookup("sin", NONE).unwrap();
        let opts = IterateOptions {
            max_iter: 7,
            x_star: p.x_star,
            ..Default::default()
        };
        let trace = iterate(|x| Method::Plain.step(&p.map, x, DEFAULT_TOL), p.x0, &opts);
        assert_eq!(trace.points.len(), 8);
        assert_eq!(trace.stop_reason, StopReason::MaxIter);
        let errs = trace.error_sequence.as_ref().unwrap();
        assert_eq!(errs.len(), 8);
        assert_eq!(errs[0], 3.0);
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        let fdil = corpus_lookup("fdil", NONE).unwrap();
        let trace = run(&fdil.map, Method::Plain, Scalar::real(0.5), 3);
        assert!(matches!(trace.stop_reason, StopReason::Failed(_)));
        assert_eq!(trace.points.len(), 1);

        let singular = iterate(
            |x| {
                Ok::<_, AccelError>(StepOutcome {
                    value: x,
                    status: StepStatus::Singular,
                })
            },
            Scalar::real(1.0),
            &IterateOptions::default(),
        );
        assert_eq!(singular.stop_reason, StopReason::Singular);
    }

    #[test]
    fn verdicts_on_sin() {
        let p = corpus_lookup("sin", NONE).unwrap();
        let xs = p.x_star.unwrap();

        let plain = run(&p.map, Method::Plain, p.x0, 20);
        match empirical_order(&plain, xs).unwrap() {
            OrderReport::Ratios { verdict, .. } => assert_eq!(verdict, Verdict::Logarithmic),
            other => panic!("{other:?}"),
        }

        let v = run(&p.map, Method::FirstNewton, p.x0, 25);
        match empirical_order(&v, xs).unwrap() {
            OrderReport::Ratios {
                verdict: Verdict::Linear(rho),
                ..
            } => {
                assert!((rho - 2.0 / 3.0).abs() < 0.02, "{rho}")
            }
            other => panic!("{other:?}"),
        }

        let w = run(&p.map, Method::Standard, p.x0, 20);
        match empirical_order(&w, xs).unwrap() {
            OrderReport::Ratios { verdict, .. } => assert_eq!(verdict, Verdict::Superlinear),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn early_exact_and_short_traces() {
        let trace = IterationTrace {
            points: [3.0, 0.0, 0.0, 0.0]
                .iter()
                .enumerate()
                .map(|(i, &v)| TracePoint {
                    index: i,
                    value: Scalar::real(v),
                    status: PointStatus::Ok,
                })
                .collect(),
            stop_reason: StopReason::MaxIter,
            error_sequence: None,
        };
        // trailing repeats collapse, leaving [3, 0]; the zero is last
        assert_eq!(
            empirical_order(&trace, Scalar::real(0.0)),
            Err(EngineError::InsufficientPoints(2))
        );
        let mut trace = trace;
        trace.points[2].value = Scalar::real(1.0);
        assert_eq!(
            empirical_order(&trace, Scalar::real(0.0)),
            Ok(OrderReport::EarlyExact { index: 1 })
        );
        assert_eq!(
            empirical_order(&trace, Scalar::real(f64::NAN)),
            Err(EngineError::NonFiniteFixedPoint)
        );
    }

    #[test]
    fn deterministic() {
        let p = corpus_lookup("kvb_complex", NONE).unwrap();
        let a = run(&p.map, Method::Standard, p.x0, 8);
        let b = run(&p.map, Method::Standard, p.x0, 8);
        assert_eq!(a, b);
        let bits = |t: &IterationTrace| -> Vec<(u64, u64)> {
            t.values().map(|v| (v.re().to_bits(), v.im().to_bits())).collect()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn newtonisation_closures_iterate() {
        let p = corpus_lookup("logistic", &[("a", "1")]).unwrap();
        let trace = iterate(
            |x| -> Result<StepOutcome, AccelError> {
                let jet = p.map.eval(x)?;
                Ok(first_newtonisation(x, &jet, DEFAULT_TOL).value)
            },
            p.x0,
            &IterateOptions {
                max_iter: 30,
                ..Default::default()
            },
        );
        // v(x) = x / 2
        assert_eq!(trace.points[1].value, Scalar::real(0.25));
        let w = iterate(
            |x| -> Result<StepOutcome, AccelError> { Ok(standard_step(x, &p.map.eval(x)?, DEFAULT_TOL)) },
            p.x0,
            &IterateOptions::default(),
        );
        assert_eq!(w.points[1].value.re().abs(), 0.0);
    }
}
