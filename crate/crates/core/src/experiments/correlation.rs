use rayon::prelude::*;

use super::locality::{law_row, Regime};
use super::rows::{sort_rows, CorrelationRow, SummaryRow};
use super::{key, pool, solve_all, ExperimentConfig, Kind};
use crate::correlations::curve_from_grid;
use crate::error::Result;
use crate::fitting::{exponential_fit, linear_fit, powerlaw_offset_fit, Estimate, FitResult, Window};
use crate::model::{LatticeSpec, OccupationGrid};

/// At or below this temperature the fitted exponents are too noisy to use.
pub const UNRELIABLE_BELOW: f64 = 0.5;

#[derive(Debug)]
pub struct CorrelationFit {
    pub t: f64,
    pub l0: usize,
    pub regime: Regime,
    pub unreliable: bool,
    /// Power law with offset below the transition, exponential above.
    pub fit: Result<FitResult>,
    pub limit: f64,
}

impl CorrelationFit {
    /// `ν_C` or `η_C`.
    pub fn exponent(&self) -> Option<Estimate> {
        self.fit.as_ref().ok().map(FitResult::exponent)
    }
}

#[derive(Debug)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
    pub fits: Vec<CorrelationFit>,
    /// `η_C` against `T` over `(T_c, law_Tmax]`, per `L₀`.
    pub eta_law: Vec<(usize, Result<FitResult>)>,
}

impl CorrelationReport {
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out = Vec::new();
        for f in &self.fits {
            let name = match f.regime {
                Regime::Below => "nu_C",
                Regime::Above => "eta_C",
            };
            let mut note = String::new();
            if f.unreliable {
                note.push_str("unreliable (T <= 0.5), excluded");
            }
            let row = SummaryRow::new(Kind::Correlations, name).at(Some(f.t), Some(f.l0), None);
            out.push(match &f.fit {
                Ok(fit) => row.fit(fit, fit.exponent()).note(note),
                Err(e) => row.note(format!("{note} {e}").trim().to_string()),
            });
            if let Ok(fit) = &f.fit {
                if f.regime == Regime::Below {
                    out.push(
                        SummaryRow::new(Kind::Correlations, "offset")
                            .at(Some(f.t), Some(f.l0), None)
                            .fit(fit, fit.offset())
                            .note(format!("n0^2 = {:e}", f.limit)),
                    );
                }
            }
        }
        for (l0, law) in &self.eta_law {
            out.push(law_row(Kind::Correlations, "eta_C_slope", *l0, law));
        }
        out.sort_by(SummaryRow::compare);
        out
    }
}

/// Density-density correlation curves along one axis and their decay fits.
///
/// Below the transition a power law with offset is fitted on
/// `d ∈ [10, 2L₀/5]`; above it an exponential on `d ∈ [L₀/5, 7L₀/20]`.
pub fn correlation_scan(cfg: &ExperimentConfig) -> Result<CorrelationReport> {
    cfg.validate()?;
    let temps = cfg.betas();
    let pool = pool(cfg.threads)?;
    let results: Vec<(Vec<CorrelationRow>, CorrelationFit)> = pool.install(|| {
        let mu = solve_all(&cfg.l0, &temps, cfg.density)?;
        let tasks: Vec<(f64, f64, usize)> = temps
            .iter()
            .flat_map(|&(t, b)| cfg.l0.iter().map(move |&l0| (t, b, l0)))
            .collect();
        tasks
            .par_iter()
            .map(|&(t, beta, l0)| {
                let m = mu[&key(l0, t)];
                let grid = OccupationGrid::new(&LatticeSpec::new(l0)?, beta, m)?;
                let curve = curve_from_grid(&grid, beta, m, l0 / 2)?;
                let rows = curve
                    .distances
                    .iter()
                    .zip(&curve.values)
                    .map(|(&d, &value)| CorrelationRow { t, l0, mu: m, d, value, limit: curve.limit })
                    .collect();
                let pts = curve.points();
                let l = l0 as f64;
                let regime = Regime::of(t, cfg.tc);
                let fit = match regime {
                    Regime::Below => powerlaw_offset_fit(&pts, Window::new(10.0, 2.0 * l / 5.0), None),
                    Regime::Above => exponential_fit(&pts, Window::new(l / 5.0, 7.0 * l / 20.0)),
                };
                let unreliable = t <= UNRELIABLE_BELOW;
                Ok((rows, CorrelationFit { t, l0, regime, unreliable, fit, limit: curve.limit }))
            })
            .collect::<Result<_>>()
    })?;

    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        fits.push(f);
    }
    sort_rows(&mut rows);
    let eta_law = cfg
        .l0
        .iter()
        .map(|&l0| {
            let pts: Vec<(f64, f64)> = fits
                .iter()
                .filter(|f| f.l0 == l0 && f.regime == Regime::Above && f.t <= cfg.law_tmax)
                .filter(|f| !f.unreliable)
                .filter_map(|f| f.exponent().map(|e| (f.t, e.value)))
                .collect();
            (l0, linear_fit(&pts, Window::all()))
        })
        .collect();
    Ok(CorrelationReport { rows, fits, eta_law })
}
