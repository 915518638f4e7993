//! Least-squares recipes: straight lines, exponentials and power laws fitted
//! as lines in log space, a power law with additive offset, zero crossings
//! and `1/L` extrapolation.

mod offset;

pub use offset::powerlaw_offset_fit;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitKind {
    Linear,
    Exponential,
    PowerLaw,
    PowerLawOffset,
}

impl FitKind {
    pub fn name(&self) -> &'static str {
        match self {
            FitKind::Linear => "linear",
            FitKind::Exponential => "exponential",
            FitKind::PowerLaw => "powerlaw",
            FitKind::PowerLawOffset => "powerlaw_offset",
        }
    }

    /// Parameter names in storage order.
    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            FitKind::Linear => &["slope", "intercept"],
            FitKind::Exponential => &["amplitude", "rate"],
            FitKind::PowerLaw => &["amplitude", "exponent"],
            FitKind::PowerLawOffset => &["amplitude", "exponent", "offset"],
        }
    }
}

/// Closed interval of abscissae taking part in a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn all() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn select(&self, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        points.iter().copied().filter(|p| self.contains(p.0)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub kind: FitKind,
    /// Values in the order of [`FitKind::parameters`].
    pub params: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub window: Window,
    pub rss: f64,
    pub points: usize,
    /// Coefficient of determination of the underlying (log-space) line.
    pub r_squared: f64,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<Estimate> {
        let i = self.kind.parameters().iter().position(|p| *p == name)?;
        Some(Estimate { value: self.params[i], stderr: self.covariance[(i, i)].max(0.0).sqrt() })
    }

    fn expect(&self, name: &str) -> Estimate {
        self.get(name)
            .unwrap_or_else(|| panic!("{} fit has no parameter {name}", self.kind.name()))
    }

    /// Slope of a linear fit.
    pub fn slope(&self) -> Estimate {
        self.expect("slope")
    }

    pub fn intercept(&self) -> Estimate {
        self.expect("intercept")
    }

    /// Decay rate or power-law exponent, whichever this kind carries.
    pub fn exponent(&self) -> Estimate {
        match self.kind {
            FitKind::Exponential => self.expect("rate"),
            _ => self.expect("exponent"),
        }
    }

    pub fn offset(&self) -> Estimate {
        self.expect("offset")
    }
}

struct Line {
    slope: f64,
    intercept: f64,
    var_slope: f64,
    var_intercept: f64,
    cov: f64,
    rss: f64,
    r_squared: f64,
}

fn line(points: &[(f64, f64)]) -> Result<Line> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, found: n });
    }
    let nf = n as f64;
    let xm = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - xm).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let s2 = if n > 2 { rss / (nf - 2.0) } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    Ok(Line {
        slope,
        intercept,
        var_slope: s2 / sxx,
        var_intercept: s2 * (1.0 / nf + xm * xm / sxx),
        cov: -xm * s2 / sxx,
        rss,
        r_squared,
    })
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(points: &[(f64, f64)], window: Window) -> Result<FitResult> {
    let sel = window.select(points);
    let l = line(&sel)?;
    Ok(FitResult {
        kind: FitKind::Linear,
        params: vec![l.slope, l.intercept],
        covariance: DMatrix::from_row_slice(2, 2, &[l.var_slope, l.cov, l.cov, l.var_intercept]),
        window,
        rss: l.rss,
        points: sel.len(),
        r_squared: l.r_squared,
    })
}

fn log_y(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    points
        .iter()
        .map(|&(x, y)| if y > 0.0 { Ok((x, y.ln())) } else { Err(Error::NonPositive(y)) })
        .collect()
}

/// `y = A e^{−η x}` fitted as a line through `(x, ln y)`.
pub fn exponential_fit(points: &[(f64, f64)], window: Window) -> Result<FitResult> {
    let sel = log_y(&window.select(points))?;
    let l = line(&sel)?;
    let amp = l.intercept.exp();
    // parameters (A, η) = (e^b, −a) from the line (a, b)
    let cov = DMatrix::from_row_slice(
        2,
        2,
        &[amp * amp * l.var_intercept, -amp * l.cov, -amp * l.cov, l.var_slope],
    );
    Ok(FitResult {
        kind: FitKind::Exponential,
        params: vec![amp, -l.slope],
        covariance: cov,
        window,
        rss: l.rss,
        points: sel.len(),
        r_squared: l.r_squared,
    })
}

/// `y = A x^{−ν}` fitted as a line through `(ln x, ln y)`.
pub fn powerlaw_fit(points: &[(f64, f64)], window: Window) -> Result<FitResult> {
    let sel = window.select(points);
    if let Some(&(x, _)) = sel.iter().find(|p| p.0 <= 0.0) {
        return Err(Error::NonPositive(x));
    }
    let logged = log_y(&sel.iter().map(|&(x, y)| (x.ln(), y)).collect::<Vec<_>>())?;
    let l = line(&logged)?;
    let amp = l.intercept.exp();
    let cov = DMatrix::from_row_slice(
        2,
        2,
        &[amp * amp * l.var_intercept, -amp * l.cov, -amp * l.cov, l.var_slope],
    );
    Ok(FitResult {
        kind: FitKind::PowerLaw,
        params: vec![amp, -l.slope],
        covariance: cov,
        window,
        rss: l.rss,
        points: sel.len(),
        r_squared: l.r_squared,
    })
}

/// Root `x* = −intercept/slope` of a linear fit, with first-order error
/// propagation including the slope/intercept covariance.
pub fn zero_crossing(fit: &FitResult) -> Result<Estimate> {
    if fit.kind != FitKind::Linear {
        return Err(Error::Degenerate(format!("zero crossing of a {} fit", fit.kind.name())));
    }
    let (a, b) = (fit.params[0], fit.params[1]);
    if a == 0.0 {
        return Err(Error::Degenerate("zero slope has no crossing".into()));
    }
    let x = -b / a;
    let c = &fit.covariance;
    // ∂x/∂a = b/a², ∂x/∂b = −1/a
    let ga = b / (a * a);
    let gb = -1.0 / a;
    let var = ga * ga * c[(0, 0)] + gb * gb * c[(1, 1)] + 2.0 * ga * gb * c[(0, 1)];
    Ok(Estimate { value: x, stderr: var.max(0.0).sqrt() })
}

/// Linear fit of `value` against `1/L`; the intercept is the `L → ∞` limit.
pub fn extrapolate_inverse_size(pairs: &[(usize, f64)]) -> Result<FitResult> {
    let mut sizes: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 || sizes[0] == 0 {
        return Err(Error::Degenerate("need at least two distinct positive sizes".into()));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(l, v)| (1.0 / l as f64, v)).collect();
    linear_fit(&pts, Window::all())
}
