//! Connected density-density correlations `⟨n_i n_j⟩ − ⟨n_i⟩⟨n_j⟩`.
//!
//! With zero anomalous moments Wick's theorem leaves `|M_ij|²` for `i ≠ j`
//! and `M_ii (M_ii + 1)` on a single site.

use crate::error::{Error, Result};
use crate::gaussian::ThermalGaussianState;
use crate::model::{bose, covariance, LatticeSpec, OccupationGrid, Site};

/// `n₀ = (1/L³)/(e^μ − 1)`, the density of the `k = 0` mode.
pub fn ground_state_density(spec: &LatticeSpec, mu: f64) -> f64 {
    bose(mu) / spec.volume() as f64
}

/// Correlation between entries `i` and `j` of a state's site list.
pub fn from_state(state: &ThermalGaussianState, i: usize, j: usize) -> f64 {
    let m = state.matrix();
    if i == j {
        let n = m[(i, i)].re;
        n * (n + 1.0)
    } else {
        m[(i, j)].norm_sqr()
    }
}

pub fn density_density(spec: &LatticeSpec, beta: f64, mu: f64, i: Site, j: Site) -> Result<f64> {
    if i == j {
        let st = covariance(spec, beta, mu, &[i])?;
        Ok(from_state(&st, 0, 0))
    } else {
        let st = covariance(spec, beta, mu, &[i, j])?;
        Ok(from_state(&st, 0, 1))
    }
}

/// Correlations between `(i, 1, 1)` and `(i + d, 1, 1)` for `d = 0..=d_max`.
#[derive(Debug, Clone)]
pub struct CorrelationCurve {
    pub side: usize,
    pub beta: f64,
    pub mu: f64,
    pub distances: Vec<usize>,
    pub values: Vec<f64>,
    /// Long-distance limit `n₀²`.
    pub limit: f64,
}

impl CorrelationCurve {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.distances.iter().map(|&d| d as f64).zip(self.values.iter().copied()).collect()
    }
}

pub fn correlation_curve(
    spec: &LatticeSpec,
    beta: f64,
    mu: f64,
    d_max: usize,
) -> Result<CorrelationCurve> {
    let grid = OccupationGrid::new(spec, beta, mu)?;
    curve_from_grid(&grid, beta, mu, d_max)
}

pub(crate) fn curve_from_grid(
    grid: &OccupationGrid,
    beta: f64,
    mu: f64,
    d_max: usize,
) -> Result<CorrelationCurve> {
    let spec = grid.spec();
    if d_max > spec.side() / 2 {
        return Err(Error::InvalidParameter(format!(
            "d_max = {d_max} exceeds L/2 = {}",
            spec.side() / 2
        )));
    }
    let g = grid.axis_profile(d_max);
    let values = g
        .iter()
        .enumerate()
        .map(|(d, &x)| if d == 0 { x * (x + 1.0) } else { x * x })
        .collect();
    let n0 = ground_state_density(spec, mu);
    Ok(CorrelationCurve {
        side: spec.side(),
        beta,
        mu,
        distances: (0..=d_max).collect(),
        values,
        limit: n0 * n0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::solve_mu;

    #[test]
    fn off_diagonal_is_squared_entry() {
        let spec = LatticeSpec::new(8).unwrap();
        let st = covariance(&spec, 0.5, 0.3, &[[0, 1, 1], [3, 1, 1]]).unwrap();
        let c = density_density(&spec, 0.5, 0.3, [0, 1, 1], [3, 1, 1]).unwrap();
        assert_eq!(c, st.matrix()[(0, 1)].norm_sqr());
        let n = st.matrix()[(0, 0)].re;
        let c0 = density_density(&spec, 0.5, 0.3, [0, 1, 1], [0, 1, 1]).unwrap();
        assert_eq!(c0, n * (n + 1.0));
    }

    #[test]
    fn curve_matches_pairwise_values_and_is_periodic() {
        let spec = LatticeSpec::new(10).unwrap();
        let curve = correlation_curve(&spec, 0.4, 0.1, 5).unwrap();
        for d in 1..=5i64 {
            let j = spec.wrap([d, 1, 1]);
            let pair = density_density(&spec, 0.4, 0.1, [0, 1, 1], j).unwrap();
            assert!((curve.values[d as usize] - pair).abs() < 1e-14);
            let back = spec.wrap([10 - d, 1, 1]);
            let mirror = density_density(&spec, 0.4, 0.1, [0, 1, 1], back).unwrap();
            assert!((pair - mirror).abs() < 1e-14);
        }
        assert!(correlation_curve(&spec, 0.4, 0.1, 6).is_err());
    }

    #[test]
    fn condensed_curve_approaches_n0_squared() {
        let spec = LatticeSpec::new(60).unwrap();
        let beta = 1.0 / 2.0;
        let mu = solve_mu(&spec, beta, 1.0).unwrap();
        let curve = correlation_curve(&spec, beta, mu, 30).unwrap();
        let tail = *curve.values.last().unwrap();
        // thermal modes still oscillate at d = L/2, so the tail can sit on either side
        assert!((tail - curve.limit).abs() / curve.limit < 0.05, "{tail} vs {}", curve.limit);
        assert!(curve.values[1] > tail);
    }
}
