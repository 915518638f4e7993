use std::collections::HashMap;

use rayon::prelude::*;

use super::rows::{sort_rows, LocalityRow, SummaryRow};
use super::{block_states, key, pool, solve_all, ExperimentConfig, Kind};
use crate::error::Result;
use crate::fitting::{
    exponential_fit, extrapolate_inverse_size, linear_fit, powerlaw_fit, Estimate, FitResult,
    Window,
};
use crate::gaussian::{fidelity, infidelity, ThermalGaussianState};

/// Below `L_cut`, `1 − F` has dropped under this and stops carrying signal.
pub const INFIDELITY_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Power-law decay of `1 − F` in `L_BC`, at or below the transition.
    Below,
    /// Exponential decay above the transition.
    Above,
}

impl Regime {
    pub fn of(t: f64, tc: f64) -> Self {
        if t <= tc {
            Regime::Below
        } else {
            Regime::Above
        }
    }
}

#[derive(Debug)]
pub struct RegimeFit {
    pub t: f64,
    pub l0: usize,
    pub regime: Regime,
    /// Smallest `L_BC` with `1 − F` below [`INFIDELITY_FLOOR`].
    pub l_cut: Option<usize>,
    pub fit: Result<FitResult>,
}

impl RegimeFit {
    /// `ν_F` or `η_F`, when the fit succeeded.
    pub fn exponent(&self) -> Option<Estimate> {
        self.fit.as_ref().ok().map(FitResult::exponent)
    }

    fn summary(&self, primary: bool) -> SummaryRow {
        let name = match self.regime {
            Regime::Below => "nu_F",
            Regime::Above => "eta_F",
        };
        let mut note = if primary { "primary".to_string() } else { "diagnostic".to_string() };
        if let Some(l) = self.l_cut {
            note.push_str(&format!("; L_cut={l}"));
        }
        let row = SummaryRow::new(Kind::Locality, name).at(Some(self.t), Some(self.l0), None);
        match &self.fit {
            Ok(f) => row.fit(f, f.exponent()).note(note),
            Err(e) => row.note(format!("{note}; {e}")),
        }
    }
}

#[derive(Debug)]
pub struct LocalityReport {
    pub rows: Vec<LocalityRow>,
    /// The fit matching each temperature's regime.
    pub fits: Vec<RegimeFit>,
    /// The other regime's fit on its own window, for comparing residuals.
    pub diagnostics: Vec<RegimeFit>,
    /// `η_F` against `T` over `(T_c, law_Tmax]`, per `L₀`.
    pub eta_law: Vec<(usize, Result<FitResult>)>,
    /// `ν_F` extrapolated linearly in `1/L₀`, per temperature.
    pub continuum: Vec<(f64, Result<FitResult>)>,
}

impl LocalityReport {
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = self.fits.iter().map(|f| f.summary(true)).collect();
        out.extend(self.diagnostics.iter().map(|f| f.summary(false)));
        for (l0, law) in &self.eta_law {
            out.push(law_row(Kind::Locality, "eta_F_slope", *l0, law));
        }
        for (t, fit) in &self.continuum {
            let row = SummaryRow::new(Kind::Locality, "nu_F_continuum").at(Some(*t), None, None);
            out.push(match fit {
                Ok(f) => row.fit(f, f.intercept()).note("linear in 1/L0"),
                Err(e) => row.note(format!("linear in 1/L0; {e}")),
            });
        }
        out.sort_by(SummaryRow::compare);
        out
    }
}

pub(crate) fn law_row(kind: Kind, name: &str, l0: usize, law: &Result<FitResult>) -> SummaryRow {
    let row = SummaryRow::new(kind, name).at(None, Some(l0), None);
    match law {
        Ok(f) => row.fit(f, f.slope()),
        Err(e) => row.note(e.to_string()),
    }
}

/// Fidelity of the `L₀` block against the `L_BC` reference at every grid
/// point.
pub(crate) fn sweep_rows(cfg: &ExperimentConfig, kind: Kind) -> Result<Vec<LocalityRow>> {
    cfg.validate()?;
    let temps = cfg.betas();
    let shape = [cfg.shape()];
    let pool = pool(cfg.threads)?;
    pool.install(|| {
        let mut sizes = cfg.l0.clone();
        if !cfg.reuse_mu {
            for &l0 in &cfg.l0 {
                sizes.extend(cfg.lbc.sizes(l0));
            }
        }
        let mu = solve_all(&sizes, &temps, cfg.density)?;

        let anchors: Vec<(f64, f64, usize)> = temps
            .iter()
            .flat_map(|&(t, b)| cfg.l0.iter().map(move |&l0| (t, b, l0)))
            .collect();
        let base: HashMap<(usize, u64), ThermalGaussianState> = anchors
            .par_iter()
            .map(|&(t, beta, l0)| {
                let st = block_states(l0, beta, mu[&key(l0, t)], &shape)?.remove(0);
                Ok((key(l0, t), st))
            })
            .collect::<Result<_>>()?;

        let tasks: Vec<(f64, f64, usize, usize)> = anchors
            .iter()
            .flat_map(|&(t, b, l0)| cfg.lbc.sizes(l0).into_iter().map(move |lbc| (t, b, l0, lbc)))
            .collect();
        let mut rows = tasks
            .par_iter()
            .map(|&(t, beta, l0, lbc)| {
                let mu_l0 = mu[&key(l0, t)];
                let mu_lbc = if cfg.reuse_mu { mu_l0 } else { mu[&key(lbc, t)] };
                let rho = &base[&key(l0, t)];
                let reference = block_states(lbc, beta, mu_lbc, &shape)?.remove(0);
                Ok(LocalityRow {
                    kind,
                    t,
                    l0,
                    lbc,
                    mu_l0,
                    mu_lbc,
                    fidelity: fidelity(rho, &reference)?,
                    infidelity: infidelity(rho, &reference)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        sort_rows(&mut rows);
        Ok(rows)
    })
}

/// `F(ρ_C, ρ_C′)` over `(T, L_BC)`, plus the scaling fits.
pub fn locality_sweep(cfg: &ExperimentConfig) -> Result<LocalityReport> {
    let rows = sweep_rows(cfg, Kind::Locality)?;
    let mut fits = Vec::new();
    let mut diagnostics = Vec::new();
    for fit in fit_locality(&rows, Regime::Below).into_iter().chain(fit_locality(&rows, Regime::Above)) {
        if Regime::of(fit.t, cfg.tc) == fit.regime {
            fits.push(fit);
        } else {
            diagnostics.push(fit);
        }
    }
    let order = |a: &RegimeFit, b: &RegimeFit| a.t.total_cmp(&b.t).then(a.l0.cmp(&b.l0));
    fits.sort_by(order);
    diagnostics.sort_by(order);

    let eta_law = cfg
        .l0
        .iter()
        .map(|&l0| {
            let pts: Vec<(f64, f64)> = fits
                .iter()
                .filter(|f| f.l0 == l0 && f.regime == Regime::Above && f.t <= cfg.law_tmax)
                .filter_map(|f| f.exponent().map(|e| (f.t, e.value)))
                .collect();
            (l0, linear_fit(&pts, Window::all()))
        })
        .collect();

    let mut continuum = Vec::new();
    if cfg.l0.len() > 1 {
        let mut temps: Vec<f64> = fits.iter().filter(|f| f.regime == Regime::Below).map(|f| f.t).collect();
        temps.dedup();
        for t in temps {
            let pairs: Vec<(usize, f64)> = fits
                .iter()
                .filter(|f| f.t == t && f.regime == Regime::Below)
                .filter_map(|f| f.exponent().map(|e| (f.l0, e.value)))
                .collect();
            continuum.push((t, finite_size_exponent(&pairs)));
        }
    }
    Ok(LocalityReport { rows, fits, diagnostics, eta_law, continuum })
}

/// Scaling fit of `1 − F` in `L_BC` for every `(T, L₀)` in `rows`.
///
/// Below the transition: power law on `L_BC ∈ [6, L₀/3]`. Above: exponential
/// on `[max(L_max − 2L₀/5, 6), L_max]` with `L_max = min(2L₀/3, L_cut)`.
pub fn fit_locality(rows: &[LocalityRow], regime: Regime) -> Vec<RegimeFit> {
    let mut groups: Vec<((u64, usize), Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        let k = (r.t.to_bits(), r.l0);
        match groups.iter_mut().find(|g| g.0 == k) {
            Some(g) => g.1.push((r.lbc as f64, r.infidelity)),
            None => groups.push((k, vec![(r.lbc as f64, r.infidelity)])),
        }
    }
    groups
        .into_iter()
        .map(|((tb, l0), mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let l = l0 as f64;
            let l_cut = pts.iter().find(|p| p.1 < INFIDELITY_FLOOR).map(|p| p.0 as usize);
            let fit = match regime {
                Regime::Below => powerlaw_fit(&pts, Window::new(6.0, l / 3.0)),
                Regime::Above => {
                    let l_max = (2.0 * l / 3.0).min(l_cut.map_or(f64::INFINITY, |c| c as f64));
                    let l_min = (l_max - 2.0 * l / 5.0).max(6.0);
                    exponential_fit(&pts, Window::new(l_min, l_max))
                }
            };
            RegimeFit { t: f64::from_bits(tb), l0, regime, l_cut, fit }
        })
        .collect()
}

/// Continuum estimate of an exponent from its values at several `L₀`,
/// linear in `1/L₀`; the intercept is the estimate.
pub fn finite_size_exponent(pairs: &[(usize, f64)]) -> Result<FitResult> {
    extrapolate_inverse_size(pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileMinimum {
    pub l0: usize,
    pub lbc: usize,
    /// Temperature of the smallest `F` on the grid.
    pub argmin: f64,
    pub min_fidelity: f64,
    /// Interior grid points where `F` is strictly below both neighbours.
    pub local_minima: Vec<f64>,
    /// `(1 − F)` at the coldest interior minimum over `(1 − F)` at the
    /// global one, when they differ.
    pub low_t_ratio: Option<f64>,
}

#[derive(Debug)]
pub struct ProfileReport {
    pub rows: Vec<LocalityRow>,
    pub minima: Vec<ProfileMinimum>,
    /// `1 − F ∝ e^{−γ_F T}` on `[gamma_Tmin, law_Tmax]`, per `(L₀, L_BC)`.
    pub gamma: Vec<(usize, usize, Result<FitResult>)>,
    /// `γ_F` against `L_BC`, per `L₀`.
    pub gamma_law: Vec<(usize, Result<FitResult>)>,
}

impl ProfileReport {
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out = Vec::new();
        for m in &self.minima {
            let at = |r: SummaryRow| r.at(None, Some(m.l0), Some(m.lbc));
            out.push(at(SummaryRow::new(Kind::Profile, "argmin_T")).value(m.argmin));
            out.push(at(SummaryRow::new(Kind::Profile, "min_F")).value(m.min_fidelity));
            let list: Vec<String> = m.local_minima.iter().map(|t| t.to_string()).collect();
            let mut row = at(SummaryRow::new(Kind::Profile, "local_minima")).note(list.join(" "));
            row.value = m.low_t_ratio;
            out.push(row);
        }
        for (l0, lbc, fit) in &self.gamma {
            let row = SummaryRow::new(Kind::Profile, "gamma_F").at(None, Some(*l0), Some(*lbc));
            out.push(match fit {
                Ok(f) => row.fit(f, f.exponent()),
                Err(e) => row.note(e.to_string()),
            });
        }
        for (l0, law) in &self.gamma_law {
            out.push(law_row(Kind::Profile, "gamma_F_slope", *l0, law));
        }
        out.sort_by(SummaryRow::compare);
        out
    }
}

/// `F(T)` for each `L_BC`, its minima, and the `γ_F` law.
pub fn temperature_profile(cfg: &ExperimentConfig) -> Result<ProfileReport> {
    let rows = sweep_rows(cfg, Kind::Profile)?;
    let mut minima = Vec::new();
    let mut gamma = Vec::new();
    let mut gamma_law = Vec::new();
    let window = Window::new(cfg.gamma_tmin - 1e-9, cfg.law_tmax + 1e-9);
    for &l0 in &cfg.l0 {
        let mut law_pts = Vec::new();
        for lbc in cfg.lbc.sizes(l0) {
            let series: Vec<&LocalityRow> =
                rows.iter().filter(|r| r.l0 == l0 && r.lbc == lbc).collect();
            let pts: Vec<(f64, f64)> = series.iter().map(|r| (r.t, r.infidelity)).collect();
            minima.push(profile_minimum(l0, lbc, &series));
            let fit = exponential_fit(&pts, window);
            if let Ok(f) = &fit {
                law_pts.push((lbc as f64, f.exponent().value));
            }
            gamma.push((l0, lbc, fit));
        }
        gamma_law.push((l0, linear_fit(&law_pts, Window::all())));
    }
    Ok(ProfileReport { rows, minima, gamma, gamma_law })
}

/// Minimum search on `1 − F`, which keeps resolution where `F` rounds to 1.
pub(crate) fn profile_minimum(l0: usize, lbc: usize, series: &[&LocalityRow]) -> ProfileMinimum {
    let e: Vec<f64> = series.iter().map(|r| r.infidelity).collect();
    let mut best = 0;
    for (i, &x) in e.iter().enumerate() {
        if x > e[best] {
            best = i;
        }
    }
    let local: Vec<usize> =
        (1..e.len().saturating_sub(1)).filter(|&i| e[i] > e[i - 1] && e[i] > e[i + 1]).collect();
    let low_t_ratio = local.first().filter(|&&i| i != best).map(|&i| e[i] / e[best]);
    ProfileMinimum {
        l0,
        lbc,
        argmin: series.get(best).map_or(f64::NAN, |r| r.t),
        min_fidelity: series.get(best).map_or(f64::NAN, |r| r.fidelity),
        local_minima: local.iter().map(|&i| series[i].t).collect(),
        low_t_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{LbcRule, Shape, TemperatureGrid};

    fn row(t: f64, l0: usize, lbc: usize, infid: f64) -> LocalityRow {
        LocalityRow {
            kind: Kind::Locality,
            t,
            l0,
            lbc,
            mu_l0: 1.0,
            mu_lbc: 1.0,
            fidelity: 1.0 - infid,
            infidelity: infid,
        }
    }

    #[test]
    fn synthetic_exponential_rate() {
        let rows: Vec<_> =
            (6..=60).step_by(2).map(|l| row(6.5, 60, l, (-0.5 * l as f64).exp())).collect();
        let fits = fit_locality(&rows, Regime::Above);
        let f = fits[0].fit.as_ref().unwrap();
        assert!((f.exponent().value - 0.5).abs() < 1e-12);
        // e^{−30} is still above the floor, so only 2L₀/3 caps the window
        assert_eq!(fits[0].l_cut, None);
        assert_eq!(f.window.hi, 2.0 * 60.0 / 3.0);
        assert_eq!(f.window.lo, 40.0 - 24.0);
    }

    #[test]
    fn synthetic_power_law_and_window() {
        let rows: Vec<_> =
            (6..=90).step_by(2).map(|l| row(2.6, 90, l, 3.0 * (l as f64).powf(-4.5))).collect();
        let fits = fit_locality(&rows, Regime::Below);
        let f = fits[0].fit.as_ref().unwrap();
        assert!((f.exponent().value - 4.5).abs() < 1e-10);
        assert_eq!(f.points, 13);
    }

    #[test]
    fn flat_profile_has_no_interior_minimum() {
        let rows: Vec<_> = (1..20).map(|i| row(i as f64 * 0.3, 20, 8, 1e-3)).collect();
        let refs: Vec<&LocalityRow> = rows.iter().collect();
        let m = profile_minimum(20, 8, &refs);
        assert!(m.local_minima.is_empty());
        assert!(m.low_t_ratio.is_none());
    }

    #[test]
    fn constant_size_exponent_extrapolates_to_itself() {
        let f = finite_size_exponent(&[(60, 4.8), (80, 4.8), (100, 4.8)]).unwrap();
        assert!((f.intercept().value - 4.8).abs() < 1e-12);
        assert!(finite_size_exponent(&[(60, 4.8)]).is_err());
    }

    fn small(kind: Kind) -> ExperimentConfig {
        let mut c = ExperimentConfig::defaults(kind);
        c.l0 = vec![16];
        c.lbc = LbcRule::From(4);
        c.shapes = vec![Shape::Cube];
        c.temperatures = TemperatureGrid::List(vec![1.0, 6.5]);
        c
    }

    #[test]
    fn sweep_ends_at_identity_and_rises() {
        let report = locality_sweep(&small(Kind::Locality)).unwrap();
        assert_eq!(report.rows.len(), 2 * 7);
        for t in [1.0, 6.5] {
            let s: Vec<_> = report.rows.iter().filter(|r| r.t == t).collect();
            let last = s.last().unwrap();
            assert_eq!(last.lbc, 16);
            assert!((last.fidelity - 1.0).abs() < 1e-10);
            assert!(s.windows(2).all(|w| w[1].fidelity >= w[0].fidelity));
            assert!(s.iter().all(|r| r.mu_l0 > 0.0 && r.mu_lbc > 0.0));
        }
    }

    #[test]
    fn reuse_mu_keeps_the_large_system_potential() {
        let mut c = small(Kind::Locality);
        c.reuse_mu = true;
        let rows = sweep_rows(&c, Kind::Locality).unwrap();
        assert!(rows.iter().all(|r| r.mu_lbc == r.mu_l0));
    }

    #[test]
    fn same_rows_for_any_thread_count() {
        let mut c = small(Kind::Locality);
        c.threads = 1;
        let a = sweep_rows(&c, Kind::Locality).unwrap();
        c.threads = 3;
        let b = sweep_rows(&c, Kind::Locality).unwrap();
        assert_eq!(a, b);
    }
}
