use crate::golden::{Component, Expected, Golden, Tolerance};
use crate::jets::{Jet2, Scalar};
use crate::method::Method;

use super::{CorpusError, DomainHint, IterationMap, ProblemSpec};

pub const CORPUS_NAMES: &[&str] = &["sin", "logistic", "fdil", "power_family", "s_family", "kvb_complex"];

/// Resolves a corpus entry by name. Parameters are `(key, value)` pairs;
/// unknown keys are rejected.
pub fn corpus_lookup<K, V>(name: &str, params: &[(K, V)]) -> Result<ProblemSpec, CorpusError>
where
    K: AsRef<str>,
    V: AsRef<str>,
{
    let params = Params::new(name, params);
    match name {
        "sin" => {
            params.only(&[])?;
            Ok(sin_problem())
        }
        "logistic" => {
            params.only(&["a"])?;
            logistic_problem(params.real_or("a", 1.0)?)
        }
        "fdil" => {
            params.only(&[])?;
            Ok(fdil_problem())
        }
        "power_family" => {
            params.only(&["alpha", "r", "x_star"])?;
            power_family_problem(params.real("alpha")?, params.real("r")?, params.real("x_star")?)
        }
        "s_family" => {
            params.only(&["alphas", "r", "x_star"])?;
            s_family_problem(
                &params.list("alphas")?,
                params.real_or("r", 1.0)?,
                params.real_or("x_star", 0.0)?,
            )
        }
        "kvb_complex" => {
            params.only(&[])?;
            Ok(kvb_problem())
        }
        other => Err(CorpusError::UnknownProblem(other.to_string())),
    }
}

struct Params<'a> {
    problem: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn new<K: AsRef<str>, V: AsRef<str>>(problem: &'a str, pairs: &'a [(K, V)]) -> Self {
        Self {
            problem,
            pairs: pairs
                .iter()
                .map(|(k, v)| (k.as_ref().trim(), v.as_ref().trim()))
                .collect(),
        }
    }

    fn only(&self, allowed: &[&str]) -> Result<(), CorpusError> {
        match self.pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            Some((k, _)) => Err(CorpusError::UnknownParam {
                problem: self.problem.to_string(),
                key: k.to_string(),
            }),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().rev().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn parse(key: &str, value: &str) -> Result<f64, CorpusError> {
        value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CorpusError::InvalidParam {
                key: key.to_string(),
                value: value.to_string(),
                reason: "expected a finite number".to_string(),
            })
    }

    fn real(&self, key: &str) -> Result<f64, CorpusError> {
        let raw = self.raw(key).ok_or_else(|| CorpusError::MissingParam {
            problem: self.problem.to_string(),
            key: key.to_string(),
        })?;
        Self::parse(key, raw)
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, CorpusError> {
        match self.raw(key) {
            Some(raw) => Self::parse(key, raw),
            None => Ok(default),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, CorpusError> {
        let raw = self.raw(key).ok_or_else(|| CorpusError::MissingParam {
            problem: self.problem.to_string(),
            key: key.to_string(),
        })?;
        raw.split(',').map(|v| Self::parse(key, v.trim())).collect()
    }
}

fn invalid(key: &str, value: f64, reason: &str) -> CorpusError {
    CorpusError::InvalidParam {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn as_small_integer(r: f64) -> Option<u32> {
    (r.fract() == 0.0 && (0.0..=64.0).contains(&r)).then_some(r as u32)
}

/// `(x - x*)^r`, by repeated products when `r` is a small integer.
fn shifted_power(x: Jet2, x_star: f64, r: f64) -> Result<Jet2, crate::jets::JetError> {
    let d = x - x_star;
    match as_small_integer(r) {
        Some(n) => Ok(d.powi(n)),
        None => d.powf(r),
    }
}

fn golden(method: Method, index: usize, value: f64, tolerance: Tolerance) -> Golden {
    Golden {
        method,
        index,
        component: Component::Re,
        expected: Expected::Value(Scalar::real(value)),
        tolerance,
    }
}

fn sin_problem() -> ProblemSpec {
    let map = IterationMap::new("sin", |x| Ok(x.sin())).neutral(Some(3), Some(Scalar::real(-1.0)));
    let five = Tolerance::SigDigits(5);
    let mut table = Vec::new();
    for m in [Method::Plain, Method::FirstNewton, Method::Standard] {
        table.push(golden(m, 0, 3.0, Tolerance::Exact));
    }
    for (i, v) in [0.14112, 0.140652, 0.140189, 0.13973].into_iter().enumerate() {
        table.push(golden(Method::Plain, i + 1, v, five));
    }
    for (i, v) in [1.56337, 0.995758, 0.652467, 0.431844].into_iter().enumerate() {
        table.push(golden(Method::FirstNewton, i + 1, v, five));
    }
    for (i, v) in [1.40041, 0.173163, 0.000345858].into_iter().enumerate() {
        table.push(golden(Method::Standard, i + 1, v, five));
    }
    // roundoff scale: order of magnitude only
    table.push(golden(Method::Standard, 4, 7.30548e-13, Tolerance::Factor(10.0)));
    for (i, v) in [0.140652, 0.0938926, 0.0935825].into_iter().enumerate() {
        table.push(golden(Method::Aitken, i + 1, v, five));
    }
    for (i, v) in [0.141125, -0.000754788].into_iter().enumerate() {
        table.push(golden(Method::Theta2, i + 2, v, Tolerance::SigDigits(4)));
    }
    ProblemSpec {
        map,
        x0: Scalar::real(3.0),
        x_star: Some(Scalar::real(0.0)),
        golden: table,
    }
}

fn logistic_problem(a: f64) -> Result<ProblemSpec, CorpusError> {
    let map = IterationMap::new(format!("logistic(a={a})"), move |x| {
        Ok(x * (Jet2::constant(1.0) - x) * a)
    });
    if a == 1.0 {
        let golden_rows = vec![
            golden(Method::Plain, 0, 0.5, Tolerance::Exact),
            golden(Method::Plain, 1, 0.25, Tolerance::Exact),
            golden(Method::Plain, 2, 0.1875, Tolerance::Exact),
            golden(Method::Plain, 3, 0.1523, Tolerance::Truncated(4)),
            golden(Method::Phi, 0, 0.5, Tolerance::Exact),
            golden(Method::Phi, 1, -0.25, Tolerance::SigDigits(2)),
            golden(Method::Phi, 2, -0.025, Tolerance::SigDigits(2)),
            golden(Method::Phi, 3, -0.000304, Tolerance::Truncated(3)),
        ];
        return Ok(ProblemSpec {
            map: map.neutral(Some(2), Some(Scalar::real(-2.0))),
            x0: Scalar::real(0.5),
            x_star: Some(Scalar::real(0.0)),
            golden: golden_rows,
        });
    }
    let x_star = if a == 0.0 { 0.0 } else { (a - 1.0) / a };
    Ok(ProblemSpec {
        map: map.hyperbolic(),
        x0: Scalar::real(0.5),
        x_star: Some(Scalar::real(x_star)),
        golden: Vec::new(),
    })
}

fn fdil_problem() -> ProblemSpec {
    let map = IterationMap::new("fdil", |x| Ok(x + (x - 1.0).powf(1.5)?))
        .neutral(None, None)
        .with_domain(DomainHint::Interval {
            lo: 1.0,
            hi: f64::INFINITY,
        });
    ProblemSpec {
        map,
        x0: Scalar::real(2.0),
        x_star: Some(Scalar::real(1.0)),
        golden: Vec::new(),
    }
}

fn power_family_problem(alpha: f64, r: f64, x_star: f64) -> Result<ProblemSpec, CorpusError> {
    if alpha == 0.0 {
        return Err(invalid("alpha", alpha, "must be nonzero"));
    }
    if r <= 0.0 {
        return Err(invalid("r", r, "must be positive"));
    }
    let mut map = IterationMap::new(format!("power_family(alpha={alpha},r={r},x_star={x_star})"), move |x| {
        Ok(x + shifted_power(x, x_star, r)? * alpha)
    });
    map = if r > 1.0 {
        let order = as_small_integer(r);
        map.neutral(order, order.map(|m| Scalar::real(alpha * factorial(m))))
    } else if r == 1.0 && (1.0 + alpha).abs() != 1.0 {
        map.hyperbolic()
    } else {
        map
    };
    if as_small_integer(r).is_none() {
        map = map.with_domain(DomainHint::Interval {
            lo: x_star,
            hi: f64::INFINITY,
        });
    }
    Ok(ProblemSpec {
        map,
        x0: Scalar::real(x_star + 0.5),
        x_star: Some(Scalar::real(x_star)),
        golden: Vec::new(),
    })
}

fn s_family_problem(alphas: &[f64], r: f64, x_star: f64) -> Result<ProblemSpec, CorpusError> {
    match alphas.first() {
        None => return Err(invalid("alphas", f64::NAN, "at least one coefficient is required")),
        Some(&a1) if a1 == 0.0 => return Err(invalid("alphas", a1, "the first coefficient must be nonzero")),
        _ => {}
    }
    if r < 1.0 {
        return Err(invalid("r", r, "must be at least 1"));
    }
    let coeffs = alphas.to_vec();
    let name = format!(
        "s_family(alphas=[{}],r={r},x_star={x_star})",
        coeffs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
    );
    let mut map = IterationMap::new(name, move |x| {
        let mut acc = x;
        for (i, &c) in coeffs.iter().enumerate() {
            acc = acc + shifted_power(x, x_star, r + (i + 1) as f64)? * c;
        }
        Ok(acc)
    });
    let order = as_small_integer(r + 1.0);
    map = map.neutral(order, order.map(|m| Scalar::real(alphas[0] * factorial(m))));
    if as_small_integer(r).is_none() {
        map = map.with_domain(DomainHint::Interval {
            lo: x_star,
            hi: f64::INFINITY,
        });
    }
    Ok(ProblemSpec {
        map,
        x0: Scalar::real(x_star + 0.5),
        x_star: Some(Scalar::real(x_star)),
        golden: Vec::new(),
    })
}

/// `f(z) = z^2 (z-2)^2 (e^{2z} cos z + z^3 - 1 - sin z)`.
pub(crate) fn kvb_function(z: Jet2) -> Jet2 {
    let z2 = z * z;
    let zm2 = z - 2.0;
    let inner = (z * 2.0).exp() * z.cos() + z2 * z - 1.0 - z.sin();
    z2 * zm2 * zm2 * inner
}

fn kvb_problem() -> ProblemSpec {
    let map = IterationMap::new("kvb_complex", |z| Ok(z - kvb_function(z)));
    // u''(2) = -f''(2) = -8 h(2)
    let h2 = 4f64.exp() * 2f64.cos() + 7.0 - 2f64.sin();
    let map = map.neutral(Some(2), Some(Scalar::complex(-8.0 * h2, 0.0)));

    let mut table = Vec::new();
    let mut push = |method: Method, index: usize, component: Component, value: f64, tol: Tolerance| {
        table.push(Golden {
            method,
            index,
            component,
            expected: Expected::Value(Scalar::real(value)),
            tolerance: tol,
        })
    };
    push(Method::Plain, 0, Component::Re, 1.9, Tolerance::Exact);
    push(Method::Plain, 0, Component::Im, 0.1, Tolerance::Exact);
    let plain = [
        (2.391422135261736, -0.4699667, 7),
        (-190.6272479365824, 83.78040, 7),
        (-1.078985533e45, 2.057e45, 4),
    ];
    for (i, (re, im, digits)) in plain.into_iter().enumerate() {
        push(Method::Plain, i + 1, Component::Re, re, Tolerance::SigDigits(9));
        push(Method::Plain, i + 1, Component::Im, im, Tolerance::Truncated(digits));
    }
    let accelerated = [
        (2.033556020548597, 0.0804529, 6),
        (2.010056510555553, -0.01717596, 7),
        (2.000502552323976, 0.0010266, 5),
        (2.000002378186929, -3.083e-6, 4),
    ];
    for (i, (re, im, digits)) in accelerated.into_iter().enumerate() {
        push(Method::Standard, i + 1, Component::Re, re, Tolerance::SigDigits(9));
        push(Method::Standard, i + 1, Component::Im, im, Tolerance::Truncated(digits));
    }
    for index in [4, 5] {
        table.push(Golden {
            method: Method::Plain,
            index,
            component: Component::Value,
            expected: Expected::Indeterminate,
            tolerance: Tolerance::Exact,
        });
    }
    table.push(Golden {
        method: Method::Standard,
        index: 5,
        component: Component::Value,
        expected: Expected::Value(Scalar::complex(1.999999999946048, 0.0)),
        tolerance: Tolerance::Absolute(1e-9),
    });

    ProblemSpec {
        map,
        x0: Scalar::complex(1.9, 0.1),
        x_star: Some(Scalar::complex(2.0, 0.0)),
        golden: table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::MapClass;

    const NONE: &[(&str, &str)] = &[];

    #[test]
    fn sin_values() {
        let p = corpus_lookup("sin", NONE).unwrap();
        let j = p.map.eval(p.x0).unwrap();
        assert!((j.value.re() - 0.14112).abs() < 5e-6);
        assert!((j.d1.re() - 3f64.cos()).abs() < 1e-15);
        assert!((j.d1.re() + 0.989992).abs() < 1e-6);
    }

    #[test]
    fn logistic_values_and_class() {
        let p = corpus_lookup("logistic", &[("a", "1")]).unwrap();
        assert_eq!(p.map.value(Scalar::real(0.5)).unwrap(), Scalar::real(0.25));
        assert_eq!(p.map.class, MapClass::Neu);
        assert_eq!(p.map.order, Some(2));
        assert_eq!(p.map.alpha, Some(Scalar::real(-2.0)));
        let j = p.map.eval(Scalar::real(0.0)).unwrap();
        assert_eq!(j.d2.re(), -2.0);

        let p = corpus_lookup("logistic", &[("a", "2.5")]).unwrap();
        assert_eq!(p.map.class, MapClass::Hyp);
        assert!((p.x_star.unwrap().re() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn fdil_and_power_family_coincide() {
        let fdil = corpus_lookup("fdil", NONE).unwrap();
        assert_eq!(fdil.x_star, Some(Scalar::real(1.0)));
        let pf = corpus_lookup("power_family", &[("alpha", "1"), ("r", "1.5"), ("x_star", "1")]).unwrap();
        for x in [1.0, 1.3, 2.0, 4.0, 10.0] {
            let a = fdil.map.eval(Scalar::real(x)).unwrap();
            let b = pf.map.eval(Scalar::real(x)).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.d1, b.d1);
        }
    }

    #[test]
    fn power_family_metadata() {
        let p = corpus_lookup("power_family", &[("alpha", "2"), ("r", "3"), ("x_star", "0.5")]).unwrap();
        assert_eq!(p.map.order, Some(3));
        assert_eq!(p.map.alpha, Some(Scalar::real(12.0)));
        let p = corpus_lookup("power_family", &[("alpha", "0.5"), ("r", "1"), ("x_star", "0")]).unwrap();
        assert_eq!(p.map.class, MapClass::Hyp);
    }

    #[test]
    fn s_family_truncated_series() {
        let p = corpus_lookup("s_family", &[("alphas", "-1, 0.5"), ("r", "1"), ("x_star", "0")]).unwrap();
        let x = 0.2;
        let expect = x - x * x + 0.5 * x * x * x;
        assert!((p.map.value(Scalar::real(x)).unwrap().re() - expect).abs() < 1e-16);
        assert_eq!(p.map.order, Some(2));
        assert_eq!(p.map.alpha, Some(Scalar::real(-2.0)));
    }

    #[test]
    fn kvb_fixed_point() {
        let p = corpus_lookup("kvb_complex", NONE).unwrap();
        let j = p.map.eval(Scalar::complex(2.0, 0.0)).unwrap();
        assert_eq!(j.value, Scalar::complex(2.0, 0.0));
        assert!((j.d1.re() - 1.0).abs() < 1e-12);
        assert!((j.d2 - p.map.alpha.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(
            corpus_lookup("nope", NONE),
            Err(CorpusError::UnknownProblem(_))
        ));
        assert!(matches!(
            corpus_lookup("sin", &[("a", "1")]),
            Err(CorpusError::UnknownParam { .. })
        ));
        assert!(matches!(
            corpus_lookup("power_family", &[("alpha", "1")]),
            Err(CorpusError::MissingParam { .. })
        ));
        assert!(matches!(
            corpus_lookup("logistic", &[("a", "x")]),
            Err(CorpusError::InvalidParam { .. })
        ));
        assert!(corpus_lookup("power_family", &[("alpha", "0"), ("r", "2"), ("x_star", "0")]).is_err());
        assert!(corpus_lookup("s_family", &[("alphas", "0,1")]).is_err());
    }

    #[test]
    fn every_known_fixed_point_is_fixed() {
        let cases: Vec<(&str, Vec<(&str, &str)>)> = vec![
            ("sin", vec![]),
            ("logistic", vec![("a", "1")]),
            ("logistic", vec![("a", "3.2")]),
            ("fdil", vec![]),
            ("power_family", vec![("alpha", "-1"), ("r", "3"), ("x_star", "0.5")]),
            ("s_family", vec![("alphas", "-1,0.25,2"), ("r", "2"), ("x_star", "-1")]),
            ("kvb_complex", vec![]),
        ];
        for (name, params) in cases {
            let p = corpus_lookup(name, &params).unwrap();
            let xs = p.x_star.unwrap();
            let res = p.fixed_point_residual().unwrap().unwrap();
            assert!(res <= 1e-12 * (1.0 + xs.abs()), "{name}: {res}");
        }
    }
}
