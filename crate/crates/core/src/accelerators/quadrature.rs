use super::AccelError;

const MAX_DEPTH: u32 = 40;

struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`, with the usual Richardson correction on accepted panels.
///
/// Panels whose error estimate is already at rounding level of their own
/// contribution are accepted regardless of `tol`.
pub(crate) fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, AccelError>
where
    F: Fn(f64) -> Result<f64, AccelError>,
{
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(
        f,
        Panel {
            a,
            m,
            b,
            fa,
            fm,
            fb,
            whole,
        },
        tol,
        MAX_DEPTH,
    )
}

fn refine<F>(f: &F, p: Panel, tol: f64, depth: u32) -> Result<f64, AccelError>
where
    F: Fn(f64) -> Result<f64, AccelError>,
{
    let lm = 0.5 * (p.a + p.m);
    let rm = 0.5 * (p.m + p.b);
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    let right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    let sum = left + right;
    let delta = sum - p.whole;
    let scale = p.fa.abs().max(p.fm.abs()).max(p.fb.abs()) * (p.b - p.a).abs();
    let floor = 64.0 * f64::EPSILON * scale;
    if !delta.is_finite() {
        return Err(AccelError::Quadrature { lo: p.a, hi: p.b });
    }
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(sum + delta / 15.0);
    }
    if depth == 0 {
        return Err(AccelError::Quadrature { lo: p.a, hi: p.b });
    }
    let l = Panel {
        a: p.a,
        m: lm,
        b: p.m,
        fa: p.fa,
        fm: flm,
        fb: p.fm,
        whole: left,
    };
    let r = Panel {
        a: p.m,
        m: rm,
        b: p.b,
        fa: p.fm,
        fm: frm,
        fb: p.fb,
        whole: right,
    };
    Ok(refine(f, l, 0.5 * tol, depth - 1)? + refine(f, r, 0.5 * tol, depth - 1)?)
}
