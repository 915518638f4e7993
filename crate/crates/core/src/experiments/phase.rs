use rayon::prelude::*;

use super::rows::{sort_rows, PhaseRow, SummaryRow};
use super::{pool, ExperimentConfig, Kind};
use crate::error::{Error, Result};
use crate::fitting::{extrapolate_inverse_size, linear_fit, zero_crossing, Estimate, FitResult, Window};
use crate::model::{LatticeSpec, Thermodynamics};

/// Condensate fractions used for the linear fit near the transition.
pub const FRACTION_WINDOW: (f64, f64) = (0.01, 0.05);

#[derive(Debug, Clone)]
pub struct PhaseCrossing {
    pub l: usize,
    /// `N₀/N` against `T` over the fraction window.
    pub fit: FitResult,
    /// Zero crossing of that line, the finite-size `T_c(L)`.
    pub tc: Estimate,
}

#[derive(Debug, Clone)]
pub struct PhaseReport {
    pub rows: Vec<PhaseRow>,
    pub crossings: Vec<PhaseCrossing>,
    /// `T_c(L)` against `1/L`; the intercept is the infinite-size `T_c`.
    pub extrapolation: FitResult,
}

impl PhaseReport {
    pub fn tc(&self) -> Estimate {
        self.extrapolation.intercept()
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = self
            .crossings
            .iter()
            .map(|c| {
                SummaryRow::new(Kind::Phase, "Tc_L")
                    .at(None, Some(c.l), None)
                    .fit(&c.fit, c.tc)
                    .note("zero crossing of N0/N on [0.01, 0.05]")
            })
            .collect();
        out.push(
            SummaryRow::new(Kind::Phase, "Tc")
                .fit(&self.extrapolation, self.tc())
                .note("linear in 1/L"),
        );
        out.sort_by(SummaryRow::compare);
        out
    }
}

/// `μ` and `N₀/N` over the grid for every size, then `T_c(L)` and its
/// extrapolation.
pub fn phase_transition_scan(cfg: &ExperimentConfig) -> Result<PhaseReport> {
    cfg.validate()?;
    let temps = cfg.betas();
    let pool = pool(cfg.threads)?;
    let per_size: Vec<Vec<PhaseRow>> = pool.install(|| {
        cfg.l0
            .par_iter()
            .map(|&l| {
                let thermo = Thermodynamics::new(LatticeSpec::new(l)?);
                let mut guess = None;
                temps
                    .iter()
                    .map(|&(t, beta)| {
                        let mu = thermo.solve_mu_from(beta, cfg.density, guess)?;
                        guess = Some(mu);
                        Ok(PhaseRow {
                            t,
                            l,
                            mu,
                            condensate_fraction: thermo.condensate_fraction(beta, mu)?,
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()
    })?;

    let mut crossings = Vec::new();
    for rows in &per_size {
        crossings.push(crossing(rows)?);
    }
    let pairs: Vec<(usize, f64)> = crossings.iter().map(|c| (c.l, c.tc.value)).collect();
    let extrapolation = extrapolate_inverse_size(&pairs)?;
    let mut rows: Vec<PhaseRow> = per_size.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(PhaseReport { rows, crossings, extrapolation })
}

fn crossing(rows: &[PhaseRow]) -> Result<PhaseCrossing> {
    let l = rows.first().map_or(0, |r| r.l);
    let (lo, hi) = FRACTION_WINDOW;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.condensate_fraction >= lo && r.condensate_fraction <= hi)
        .map(|r| (r.t, r.condensate_fraction))
        .collect();
    if pts.len() < 2 {
        return Err(Error::CoarseGrid { size: l, found: pts.len() });
    }
    let t_lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut fit = linear_fit(&pts, Window::all())?;
    fit.window = Window::new(t_lo, t_hi);
    let tc = zero_crossing(&fit)?;
    Ok(PhaseCrossing { l, fit, tc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Span, TemperatureGrid};

    #[test]
    fn fraction_falls_with_temperature() {
        let mut c = ExperimentConfig::defaults(Kind::Phase);
        c.l0 = vec![50, 60];
        c.temperatures = TemperatureGrid::Range { base: Span::new(1.0, 7.0, 0.5), refine: None };
        let err = phase_transition_scan(&c).unwrap_err();
        assert!(matches!(err, Error::CoarseGrid { .. }), "{err}");
        assert!(err.to_string().contains("refine"));

        c.temperatures = TemperatureGrid::Range {
            base: Span::new(1.0, 7.0, 0.5),
            refine: Some(Span::new(5.0, 6.4, 0.02)),
        };
        let r = phase_transition_scan(&c).unwrap();
        let at50: Vec<_> = r.rows.iter().filter(|x| x.l == 50).collect();
        assert!(at50.windows(2).all(|w| w[1].condensate_fraction < w[0].condensate_fraction));
        for cr in &r.crossings {
            assert!(cr.tc.value > 5.4 && cr.tc.value < 6.2, "{:?}", cr.tc);
        }
        assert!(r.rows.windows(2).all(|w| (w[0].t, w[0].l) < (w[1].t, w[1].l)));
    }
}
