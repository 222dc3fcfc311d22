use fixaccel::accelerators::{first_newtonisation, phi_step, standard_step, StepStatus, DEFAULT_TOL};
use fixaccel::engine::{empirical_order, iterate, IterateOptions, OrderReport, Verdict};
use fixaccel::jets::{Jet2, JetError};
use fixaccel::kernel::{affinity_test, kernel_family_fit};
use fixaccel::maps::{corpus_lookup, IterationMap, CORPUS_NAMES};
use fixaccel::transforms::{aitken_delta2, SequenceView};
use fixaccel::{Method, Scalar};
use proptest::prelude::*;

const H: f64 = 1e-5;
const NONE: &[(&str, &str)] = &[];

type Case = (&'static str, Vec<(&'static str, &'static str)>, bool);

type JetFn = fn(Jet2) -> Result<Jet2, JetError>;

fn rel_err(got: f64, reference: f64) -> f64 {
    (got - reference).abs() / reference.abs().max(1.0)
}

/// Checks `d1` against a central difference of values and `d2` against a
/// central difference of `d1`.
fn check_jet(f: JetFn, x: f64) -> Result<(), TestCaseError> {
    let at = |t: f64| f(Jet2::variable(Scalar::real(t))).unwrap();
    let (j, p, m) = (at(x), at(x + H), at(x - H));
    let fd1 = (p.value.re() - m.value.re()) / (2.0 * H);
    let fd2 = (p.d1.re() - m.d1.re()) / (2.0 * H);
    prop_assert!(rel_err(j.d1.re(), fd1) <= 1e-6, "d1 at {x}: {} vs {fd1}", j.d1.re());
    prop_assert!(rel_err(j.d2.re(), fd2) <= 1e-6, "d2 at {x}: {} vs {fd2}", j.d2.re());
    Ok(())
}

fn half(x: Jet2) -> Jet2 {
    x * 0.5
}

const UNRESTRICTED: &[(&str, JetFn)] = &[
    ("sin", |x| Ok(x.sin())),
    ("cos", |x| Ok(x.cos())),
    ("exp", |x| Ok(x.exp())),
    ("add", |x| Ok(x.sin() + half(x).exp())),
    ("sub", |x| Ok(x.sin() - half(x).exp())),
    ("mul", |x| Ok(x.sin() * half(x).exp())),
    ("div", |x| x.sin().try_div(half(x).exp())),
    ("neg", |x| Ok(-x.cos())),
    ("powi", |x| Ok(x.powi(5))),
];

const POSITIVE: &[(&str, JetFn)] = &[
    ("ln", |x| x.ln()),
    ("sqrt", |x| x.sqrt()),
    ("pow_real", |x| x.powf(1.7)),
    ("pow_real_negative", |x| x.powf(-2.3)),
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jets_match_finite_differences_everywhere(x in -3.0f64..3.0) {
        for (_, f) in UNRESTRICTED {
            check_jet(*f, x)?;
        }
    }

    #[test]
    fn jets_match_finite_differences_on_positive_axis(x in 0.1f64..5.0) {
        for (_, f) in POSITIVE {
            check_jet(*f, x)?;
        }
    }

    #[test]
    fn complex_jets_agree_bitwise_on_real_inputs(x in 0.05f64..4.0) {
        let composite = |t: Scalar| -> Jet2 {
            let j = Jet2::variable(t);
            let a = j.sin() * half(j).exp() - j.cos();
            let b = j.ln().unwrap() + j.sqrt().unwrap() * j.powf(1.5).unwrap();
            a.try_div(b + 3.0).unwrap()
        };
        let real = composite(Scalar::real(x));
        let complex = composite(Scalar::complex(x, 0.0));
        prop_assert!(complex.value.is_complex());
        for (r, c) in [(real.value, complex.value), (real.d1, complex.d1), (real.d2, complex.d2)] {
            prop_assert_eq!(r.re().to_bits(), c.re().to_bits());
        }
    }

    #[test]
    fn first_newtonisation_slope_matches_finite_differences(
        which in 0usize..3,
        t in 0.0f64..1.0,
    ) {
        let (name, params, lo, hi): (&str, Vec<(&str, &str)>, f64, f64) = match which {
            0 => ("sin", vec![], 0.3, 2.0),
            1 => ("logistic", vec![("a", "1")], 0.2, 0.9),
            _ => ("power_family", vec![("alpha", "-1"), ("r", "3"), ("x_star", "0.5")], 0.7, 1.5),
        };
        let map = corpus_lookup(name, &params).unwrap().map;
        let x = lo + t * (hi - lo);
        let v = |y: f64| {
            let y = Scalar::real(y);
            first_newtonisation(y, &map.eval(y).unwrap(), DEFAULT_TOL)
        };
        let fd = (v(x + H).value.value.re() - v(x - H).value.value.re()) / (2.0 * H);
        let slope = v(x).slope.re();
        prop_assert!(rel_err(slope, fd) <= 1e-5, "{name} at {x}: {slope} vs {fd}");
    }

    #[test]
    fn phi_step_closed_form_on_logistic(x in -0.9f64..0.9) {
        let map = corpus_lookup("logistic", &[("a", "1")]).unwrap().map;
        let x = Scalar::real(x);
        let got = phi_step(x, &map.eval(x).unwrap()).value.re();
        let want = x.re() * x.re() / (2.0 * (x.re() - 1.0));
        prop_assert!((got - want).abs() <= 1e-12);
    }

    #[test]
    fn aitken_is_exact_on_geometric_sequences(
        x_star in -1.0f64..1.0,
        c in 0.5f64..2.0,
        c_negative: bool,
        r in 0.1f64..0.85,
        r_negative: bool,
        len in 3usize..=8,
    ) {
        let c = if c_negative { -c } else { c };
        let r = if r_negative { -r } else { r };
        let s = SequenceView::new((0..len).map(|n| Scalar::real(x_star + c * r.powi(n as i32))), "geometric");
        let out = aitken_delta2(&s).unwrap();
        for x in &out.items {
            prop_assert!((x.re() - x_star).abs() <= 1e-13, "{} vs {x_star}", x.re());
        }
    }

    #[test]
    fn traces_are_bounded_and_deterministic(
        problem in 0usize..CORPUS_NAMES.len(),
        method in prop::sample::select(vec!["plain", "first_newton", "standard", "steffensen", "phi", "compose(standard,2)"]),
        max_iter in 1usize..30,
    ) {
        let p = match CORPUS_NAMES[problem] {
            "power_family" => corpus_lookup("power_family", &[("alpha", "-1"), ("r", "2"), ("x_star", "0")]),
            "s_family" => corpus_lookup("s_family", &[("alphas", "-1,0.5")]),
            name => corpus_lookup(name, NONE),
        }.unwrap();
        let method: Method = method.parse().unwrap();
        let opts = IterateOptions { max_iter, ..Default::default() };
        let run = || iterate(|x| method.step(&p.map, x, DEFAULT_TOL), p.x0, &opts);
        let (a, b) = (run(), run());
        prop_assert!(a.points.len() <= max_iter + 1);
        prop_assert_eq!(a.points.len(), b.points.len());
        for (pa, pb) in a.points.iter().zip(&b.points) {
            prop_assert_eq!(pa.value.re().to_bits(), pb.value.re().to_bits());
            prop_assert_eq!(pa.value.im().to_bits(), pb.value.im().to_bits());
        }
        prop_assert_eq!(a.stop_reason, b.stop_reason);
    }
}

fn kernel_family_map(alpha: f64, beta: f64, x_star: f64) -> IterationMap {
    corpus_lookup(
        "power_family",
        &[
            ("alpha", alpha.to_string()),
            ("r", beta.to_string()),
            ("x_star", x_star.to_string()),
        ],
    )
    .unwrap()
    .map
}

fn right_side(x_star: f64) -> Vec<Scalar> {
    [0.05, 0.1, 0.2, 0.3].iter().map(|d| Scalar::real(x_star + d)).collect()
}

fn both_verdicts(map: &IterationMap, x_star: Scalar, center: Scalar, radius: f64, probes: &[Scalar]) -> (bool, bool) {
    let affine = affinity_test(map, center, radius, 11).unwrap();
    let family = kernel_family_fit(map, x_star, probes).unwrap();
    (affine.member, family.member)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn kernel_family_maps_are_members_and_collapse(
        alpha in 0.1f64..3.0,
        negative: bool,
        beta in 1.1f64..4.0,
        x_star in -2.0f64..2.0,
    ) {
        let alpha = if negative { -alpha } else { alpha };
        let map = kernel_family_map(alpha, beta, x_star);
        let xs = Scalar::real(x_star);
        let (affine, family) = both_verdicts(&map, xs, Scalar::real(x_star + 0.15), 0.15, &right_side(x_star));
        prop_assert!(affine && family, "alpha={alpha} beta={beta} x*={x_star}");
        for x in right_side(x_star) {
            let w = standard_step(x, &map.eval(x).unwrap(), DEFAULT_TOL);
            prop_assert_eq!(w.status, StepStatus::Ok);
            prop_assert!((w.value.re() - x_star).abs() <= 1e-8, "w({x}) = {}", w.value);
        }
    }
}

#[test]
fn tests_agree_on_corpus_maps() {
    let real_cases: Vec<Case> = vec![
        ("sin", vec![], false),
        ("logistic", vec![("a", "1")], true),
        ("logistic", vec![("a", "2")], false),
        ("fdil", vec![], true),
        (
            "power_family",
            vec![("alpha", "2"), ("r", "3"), ("x_star", "0.5")],
            true,
        ),
        (
            "power_family",
            vec![("alpha", "-0.5"), ("r", "2.5"), ("x_star", "-1")],
            true,
        ),
        ("s_family", vec![("alphas", "-1,0.5")], false),
        (
            "s_family",
            vec![("alphas", "0.3,0.2,-0.1,0.05"), ("r", "2"), ("x_star", "1")],
            false,
        ),
    ];
    for (name, params, expected) in real_cases {
        let p = corpus_lookup(name, &params).unwrap();
        let xs = p.x_star.unwrap();
        let (affine, family) = both_verdicts(&p.map, xs, xs + 0.15, 0.15, &right_side(xs.re()));
        assert_eq!(affine, family, "{name} {params:?}");
        assert_eq!(affine, expected, "{name} {params:?}");
    }

    let p = corpus_lookup("kvb_complex", NONE).unwrap();
    let xs = p.x_star.unwrap();
    let probes: Vec<Scalar> = (0..6)
        .map(|k| {
            let t = k as f64;
            xs + Scalar::complex(0.1 * (1.0 + t).cos(), 0.1 * (1.0 + t).sin()) * (0.3 + 0.1 * t)
        })
        .collect();
    let (affine, family) = both_verdicts(&p.map, xs, xs + Scalar::complex(0.05, 0.0), 0.05, &probes);
    assert!(!affine && !family);
}

#[test]
fn sin_has_declared_order_three() {
    let sin = corpus_lookup("sin", NONE).unwrap().map;
    let at = |x: f64| sin.eval(Scalar::real(x)).unwrap();
    let j = at(0.0);
    assert_eq!(j.d1.re(), 1.0);
    assert_eq!(j.d2.re(), 0.0);
    let h = 1e-4;
    let third = (at(h).d2.re() - at(-h).d2.re()) / (2.0 * h);
    assert!((third + 1.0).abs() < 1e-6, "{third}");
    assert_eq!(sin.order, Some(3));
}

fn verdict(map: &IterationMap, method: &Method, x0: Scalar, x_star: Scalar, max_iter: usize) -> Verdict {
    let opts = IterateOptions {
        max_iter,
        ..Default::default()
    };
    let trace = iterate(|x| method.step(map, x, DEFAULT_TOL), x0, &opts);
    match empirical_order(&trace, x_star) {
        Ok(OrderReport::Ratios { verdict, .. }) => verdict,
        // an exact hit on x* is the limiting superlinear case
        Ok(OrderReport::EarlyExact { .. }) => Verdict::Superlinear,
        Err(_) if (trace.last() - x_star).abs() <= 1e-12 => Verdict::Superlinear,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn order_verdicts_on_convergent_neutral_problems() {
    let cases: Vec<(&str, Vec<(&str, &str)>)> = vec![
        ("sin", vec![]),
        ("logistic", vec![("a", "1")]),
        ("power_family", vec![("alpha", "-1"), ("r", "2"), ("x_star", "0.5")]),
        ("power_family", vec![("alpha", "-0.5"), ("r", "3"), ("x_star", "0")]),
        ("s_family", vec![("alphas", "-1,0.5")]),
    ];
    for (name, params) in cases {
        let p = corpus_lookup(name, &params).unwrap();
        let xs = p.x_star.unwrap();
        let m = p.map.order.unwrap() as f64;
        assert_eq!(
            verdict(&p.map, &Method::Plain, p.x0, xs, 40),
            Verdict::Logarithmic,
            "{name} plain"
        );
        match verdict(&p.map, &Method::FirstNewton, p.x0, xs, 30) {
            Verdict::Linear(rho) => assert!((rho - (1.0 - 1.0 / m)).abs() <= 0.02, "{name} rho={rho}"),
            other => panic!("{name} first_newton: {other:?}"),
        }
        assert_eq!(
            verdict(&p.map, &Method::Standard, p.x0, xs, 20),
            Verdict::Superlinear,
            "{name} standard"
        );
    }
}
