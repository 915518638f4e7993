//! Sweep drivers behind each figure: locality of temperature, temperature
//! profiles, the condensation transition, correlation decay and subsystem
//! comparisons.
//!
//! Grid points are independent, so they run on a rayon pool of the
//! configured size. Results are gathered in a fixed order and sorted before
//! they leave this module, which keeps output identical for any thread
//! count.

mod config;
mod correlation;
mod locality;
mod phase;
mod rows;
mod subsystems;

pub use config::{ExperimentConfig, Kind, LbcRule, Shape, Span, TemperatureGrid, KEYS};
pub use correlation::{correlation_scan, CorrelationFit, CorrelationReport};
pub use locality::{
    finite_size_exponent, fit_locality, locality_sweep, temperature_profile, LocalityReport,
    ProfileMinimum, ProfileReport, Regime, RegimeFit,
};
pub use phase::{phase_transition_scan, PhaseCrossing, PhaseReport, FRACTION_WINDOW};
pub use rows::{
    float, sort_rows, CorrelationRow, LocalityRow, PhaseRow, Row, SubsystemRow, SummaryRow,
    SCHEMA_VERSION,
};
pub use subsystems::{subsystem_report, SubsystemReport};

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::ThermalGaussianState;
use crate::model::{covariance_from_grid, LatticeSpec, OccupationGrid, Thermodynamics};

pub(crate) fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// `μ(β, L)` for every size and temperature, keyed by `(L, T bits)`.
///
/// Each size walks its temperatures in ascending order, warm-starting from
/// the previous root, so the result does not depend on scheduling.
pub(crate) fn solve_all(
    sizes: &[usize],
    temps: &[(f64, f64)],
    density: f64,
) -> Result<HashMap<(usize, u64), f64>> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut temps = temps.to_vec();
    temps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let per_size: Vec<Vec<((usize, u64), f64)>> = sizes
        .par_iter()
        .map(|&l| {
            let thermo = Thermodynamics::new(LatticeSpec::new(l)?);
            let mut guess = None;
            temps
                .iter()
                .map(|&(t, beta)| {
                    let mu = thermo.solve_mu_from(beta, density, guess)?;
                    guess = Some(mu);
                    Ok(((l, t.to_bits()), mu))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_size.into_iter().flatten().collect())
}

/// Reduced states of the configured blocks from one lattice at `(β, μ)`.
pub(crate) fn block_states(
    l: usize,
    beta: f64,
    mu: f64,
    shapes: &[Shape],
) -> Result<Vec<ThermalGaussianState>> {
    let spec = LatticeSpec::new(l)?;
    let grid = OccupationGrid::new(&spec, beta, mu)?;
    shapes
        .iter()
        .map(|s| {
            let sites: Vec<_> = s.sites().into_iter().map(|x| spec.wrap(x)).collect();
            covariance_from_grid(&grid, &sites)
        })
        .collect()
}

pub(crate) fn key(l: usize, t: f64) -> (usize, u64) {
    (l, t.to_bits())
}
