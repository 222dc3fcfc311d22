//! Deciding whether a map lies in the kernel of the standard accelerator,
//! i.e. whether `w(x) = x*` for every `x` near the fixed point.
//!
//! Two independent criteria are offered. [`affinity_test`] checks that the
//! first newtonisation `v` is affine, `v(x) = a x + (1 - a) x*`.
//! [`kernel_family_fit`] checks that `u` itself has the closed form
//! `u(x) = x + α (x* - x)^β`.

use serde::Serialize;
use thiserror::Error;

use crate::accelerators::{first_newtonisation, StepStatus, DEFAULT_TOL, EPS_SING};
use crate::jets::Scalar;
use crate::maps::IterationMap;

/// Affine-fit residual allowed, relative to `1 + |b|`.
pub const AFFINE_RESIDUAL_TOL: f64 = 1e-9;
/// Power-law fit residual allowed (log scale and relative coefficient spread).
pub const FAMILY_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    AffineV,
    FamilyFit,
    None,
}

/// How the fitted power is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerConvention {
    /// `u(x) = x + α (x* - x)^β`
    Reflected,
    /// `u(x) = x + α (x - x*)^β`
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyFit {
    pub alpha: Scalar,
    pub beta: f64,
    pub x_star: Scalar,
    pub convention: PowerConvention,
    /// `α` in the other convention, when it is well defined (integer β).
    pub alternate_alpha: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelVerdict {
    pub member: bool,
    pub evidence: Evidence,
    /// Slope `a` of the affine model of `v` (affinity test only).
    pub slope: Option<Scalar>,
    pub x_star: Option<Scalar>,
    pub fitted: Option<FamilyFit>,
    pub residual: f64,
    /// Whether the fitted exponent exceeds 1, as the order hypothesis on
    /// neutral maps requires. `None` when no exponent was fitted.
    pub exponent_above_one: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("at least {needed} samples are required, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("inconclusive: only {usable} usable samples, need {needed}")]
    Inconclusive { usable: usize, needed: usize },
}

fn sample_points(center: Scalar, radius: f64, n: usize) -> Vec<Scalar> {
    match center {
        Scalar::Real(c) => (0..n)
            .map(|i| Scalar::real(c - radius + 2.0 * radius * i as f64 / (n - 1) as f64))
            .collect(),
        Scalar::Complex(_) => (0..n)
            .map(|i| {
                // alternate between the rim and half radius to cover the disk
                let rho = if i % 2 == 0 { radius } else { 0.5 * radius };
                let theta = std::f64::consts::TAU * i as f64 / n as f64;
                center + Scalar::complex(rho * theta.cos(), rho * theta.sin())
            })
            .collect(),
    }
}

/// Least-squares `y ≈ a x + b` over real or complex samples.
fn affine_fit(xs: &[Scalar], ys: &[Scalar]) -> (Scalar, Scalar) {
    let n = xs.len() as f64;
    let mean = |v: &[Scalar]| v.iter().fold(Scalar::ZERO, |acc, &x| acc + x) / n;
    let (xm, ym) = (mean(xs), mean(ys));
    let mut num = Scalar::ZERO;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - xm;
        num = num + dx.conj() * (y - ym);
        den += dx.abs() * dx.abs();
    }
    let a = num / den;
    (a, ym - a * xm)
}

/// Samples the first newtonisation `v` at `n_samples` points within
/// `radius` of `center` and tests whether it is affine.
pub fn affinity_test(
    u: &IterationMap,
    center: Scalar,
    radius: f64,
    n_samples: usize,
) -> Result<KernelVerdict, KernelError> {
    if n_samples < 5 {
        return Err(KernelError::TooFewSamples {
            needed: 5,
            got: n_samples,
        });
    }
    let mut xs = Vec::with_capacity(n_samples);
    let mut vs = Vec::with_capacity(n_samples);
    for x in sample_points(center, radius, n_samples) {
        let Ok(jet) = u.eval(x) else { continue };
        let v = first_newtonisation(x, &jet, DEFAULT_TOL).value;
        if v.status == StepStatus::Ok {
            xs.push(x);
            vs.push(v.value);
        }
    }
    let needed = n_samples.div_ceil(2).max(3);
    if xs.len() < needed {
        return Err(KernelError::Inconclusive {
            usable: xs.len(),
            needed,
        });
    }
    let (a, b) = affine_fit(&xs, &vs);
    let residual = xs
        .iter()
        .zip(&vs)
        .map(|(&x, &v)| (v - (a * x + b)).abs())
        .fold(0.0, f64::max);
    let repelling_free = (1.0 - a).abs() > EPS_SING;
    let member = residual.is_finite() && residual <= AFFINE_RESIDUAL_TOL * (1.0 + b.abs()) && repelling_free;
    let x_star = repelling_free.then(|| b / (1.0 - a));
    Ok(KernelVerdict {
        member,
        evidence: if member { Evidence::AffineV } else { Evidence::None },
        slope: Some(a),
        x_star,
        fitted: None,
        residual,
        exponent_above_one: None,
    })
}

fn near_integer(beta: f64) -> Option<i32> {
    let r = beta.round();
    ((beta - r).abs() <= 1e-6).then_some(r as i32)
}

/// Fits `u(x) - x = α (x* - x)^β` by linear regression of `ln|u(x) - x|`
/// on `ln|x* - x|`.
///
/// Probes where `u` cannot be evaluated or where `u(x) = x` are dropped.
/// For real maps only probes on one side of `x*` are used (the side with
/// more usable probes, preferring `x < x*` on a tie) so that the power is
/// real; probes above `x*` are reported in the [`PowerConvention::Direct`]
/// form.
pub fn kernel_family_fit(
    u: &IterationMap,
    x_star: Scalar,
    probe_points: &[Scalar],
) -> Result<KernelVerdict, KernelError> {
    let mut usable: Vec<(Scalar, Scalar)> = probe_points
        .iter()
        .filter(|&&x| x != x_star)
        .filter_map(|&x| {
            let gap = u.value(x).ok()? - x;
            (gap.is_finite() && !gap.is_zero()).then_some((x, gap))
        })
        .collect();

    let mut convention = PowerConvention::Reflected;
    if !x_star.is_complex() && !usable.iter().any(|(x, _)| x.is_complex()) {
        let below = usable.iter().filter(|(x, _)| x.re() < x_star.re()).count();
        let above = usable.len() - below;
        if above > below {
            convention = PowerConvention::Direct;
        }
        let keep_below = convention == PowerConvention::Reflected;
        usable.retain(|(x, _)| (x.re() < x_star.re()) == keep_below);
    }
    if usable.len() < 3 {
        return Err(KernelError::Inconclusive {
            usable: usable.len(),
            needed: 3,
        });
    }

    let base = |x: Scalar| match convention {
        PowerConvention::Reflected => x_star - x,
        PowerConvention::Direct => x - x_star,
    };
    let ts: Vec<f64> = usable.iter().map(|&(x, _)| base(x).abs().ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, g)| g.abs().ln()).collect();
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let stt: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    if stt <= f64::EPSILON {
        return Err(KernelError::Inconclusive { usable: 1, needed: 3 });
    }
    let beta = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum::<f64>() / stt;
    let intercept = ym - beta * tm;
    let log_residual = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - (intercept + beta * t)).abs())
        .fold(0.0, f64::max);

    let coefficients: Vec<Scalar> = usable
        .iter()
        .map(|&(x, gap)| gap / base(x).same_kind_as(gap).powf(beta))
        .collect();
    let alpha = coefficients.iter().fold(Scalar::ZERO, |acc, &c| acc + c) / n;
    let spread = coefficients
        .iter()
        .map(|&c| (c - alpha).abs() / alpha.abs())
        .fold(0.0, f64::max);
    let residual = log_residual.max(spread);

    let member = residual.is_finite() && residual <= FAMILY_RESIDUAL_TOL && beta.abs() > EPS_SING;
    let alternate_alpha = near_integer(beta).map(|k| if k % 2 == 0 { alpha } else { -alpha });
    Ok(KernelVerdict {
        member,
        evidence: if member { Evidence::FamilyFit } else { Evidence::None },
        slope: None,
        x_star: Some(x_star),
        fitted: Some(FamilyFit {
            alpha,
            beta,
            x_star,
            convention,
            alternate_alpha,
        }),
        residual,
        exponent_above_one: Some(beta > 1.0),
    })
}
