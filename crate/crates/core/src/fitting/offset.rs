use nalgebra::DMatrix;

use super::{powerlaw_fit, FitKind, FitResult, Window};
use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const MAX_ITER: usize = 400;

/// `y = a x^{−b} + c` by golden-section search over `c`.
///
/// For each trial offset the pair `(a, b)` comes from a log-log line
/// through `(x, y − c)`; the search minimizes the residual of the full
/// model in linear space. The log-space residual is not usable as the
/// outer objective: it keeps falling as `c → −∞`.
///
/// `offset_seed`, when given, centres the search bracket on a prior guess
/// instead of spanning ten data ranges below the smallest `y`.
pub fn powerlaw_offset_fit(
    points: &[(f64, f64)],
    window: Window,
    offset_seed: Option<f64>,
) -> Result<FitResult> {
    let sel = window.select(points);
    if sel.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, found: sel.len() });
    }
    if let Some(&(x, _)) = sel.iter().find(|p| p.0 <= 0.0) {
        return Err(Error::NonPositive(x));
    }
    let ymin = sel.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ymax = sel.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let span = ymax - ymin;
    if !(span > 0.0) {
        return Err(Error::Degenerate("constant data leave the offset undetermined".into()));
    }

    let hi = ymin - 1e-10 * span.max(ymin.abs());
    let lo = match offset_seed {
        Some(s) => s.min(hi) - span,
        None => ymin - 10.0 * span,
    };

    let objective = |c: f64| -> f64 {
        match inner(&sel, c) {
            Some((a, b)) => rss(&sel, a, b, c),
            None => f64::INFINITY,
        }
    };

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    let tol = 1e-12 * (span + ymin.abs());
    for _ in 0..MAX_ITER {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = objective(x2);
        }
    }
    let c = 0.5 * (a + b);
    let edge = 1e-6 * (hi - lo);
    if c - lo < edge || hi - c < edge {
        return Err(Error::OffsetBracket(c));
    }
    let (amp, expo) = inner(&sel, c).ok_or(Error::OffsetBracket(c))?;
    let res = rss(&sel, amp, expo, c);

    let n = sel.len();
    let jac = DMatrix::from_fn(n, 3, |i, k| {
        let (x, _) = sel[i];
        let p = x.powf(-expo);
        match k {
            0 => p,
            1 => -amp * x.ln() * p,
            _ => 1.0,
        }
    });
    let s2 = res / (n as f64 - 3.0);
    let normal = jac.transpose() * &jac;
    let covariance = normal
        .try_inverse()
        .map(|inv| inv * s2)
        .ok_or_else(|| Error::Degenerate("singular Jacobian at the optimum".into()))?;

    let mean = sel.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sst: f64 = sel.iter().map(|p| (p.1 - mean).powi(2)).sum();
    Ok(FitResult {
        kind: FitKind::PowerLawOffset,
        params: vec![amp, expo, c],
        covariance,
        window,
        rss: res,
        points: n,
        r_squared: 1.0 - res / sst,
    })
}

fn inner(sel: &[(f64, f64)], c: f64) -> Option<(f64, f64)> {
    let shifted: Vec<(f64, f64)> = sel.iter().map(|&(x, y)| (x, y - c)).collect();
    let f = powerlaw_fit(&shifted, Window::all()).ok()?;
    Some((f.params[0], f.params[1]))
}

fn rss(sel: &[(f64, f64)], a: f64, b: f64, c: f64) -> f64 {
    sel.iter().map(|&(x, y)| (y - a * x.powf(-b) - c).powi(2)).sum()
}
