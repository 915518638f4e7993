//! Lattice geometry, dispersion and grand-canonical thermodynamics of the
//! free Bose gas on an `L × L × L` periodic cubic lattice.
//!
//! Units: Boltzmann constant and hopping amplitude are 1, so `T = 1/β`.
//! Mode occupations are `1/(exp(β ε(k) + μ) − 1)` with `μ > 0`.

mod covariance;
mod grid;
mod thermo;

pub use covariance::{covariance, covariance_kernel_fft, CovarianceKernel, OccupationGrid};
pub(crate) use covariance::covariance_from_grid;
pub use grid::MomentumGrid;
pub use thermo::{condensate_fraction, density, solve_mu, Thermodynamics};

use crate::error::{Error, Result};

/// Integer lattice coordinates `(n_x, n_y, n_z)`.
pub type Site = [i64; 3];

/// Cubic lattice with periodic boundaries and even side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    side: usize,
}

impl LatticeSpec {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 || !side.is_multiple_of(2) {
            return Err(Error::BadLattice(side));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn volume(&self) -> usize {
        self.side.pow(3)
    }

    fn half(&self) -> i64 {
        (self.side / 2) as i64
    }

    /// Whether every coordinate lies in `[−L/2, L/2 − 1]`.
    pub fn contains(&self, site: Site) -> bool {
        let h = self.half();
        site.iter().all(|&c| (-h..h).contains(&c))
    }

    /// Maps arbitrary integer coordinates back into `[−L/2, L/2 − 1]`.
    pub fn wrap(&self, site: Site) -> Site {
        let l = self.side as i64;
        let h = self.half();
        site.map(|c| (c + h).rem_euclid(l) - h)
    }

    /// All sites in lexicographic order.
    pub fn sites(&self) -> Vec<Site> {
        let h = self.half();
        let mut out = Vec::with_capacity(self.volume());
        for x in -h..h {
            for y in -h..h {
                for z in -h..h {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

/// Inverse temperature, chemical potential and density target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    pub beta: f64,
    pub mu: f64,
    pub n_target: f64,
}

impl ThermalParams {
    pub fn new(beta: f64, mu: f64, n_target: f64) -> Result<Self> {
        check_beta(beta)?;
        check_mu(mu)?;
        if !(n_target > 0.0 && n_target.is_finite()) {
            return Err(Error::InvalidParameter(format!("density target {n_target}")));
        }
        Ok(Self { beta, mu, n_target })
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("beta = {beta} must be positive")))
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mu = {mu} must be positive")))
    }
}

/// `ε(k) = 2(3 − cos k_x − cos k_y − cos k_z)`.
pub fn dispersion(k: [f64; 3]) -> f64 {
    2.0 * (3.0 - k[0].cos() - k[1].cos() - k[2].cos())
}

/// Bose factor `1/(e^x − 1)` for `x > 0`.
#[inline]
pub(crate) fn bose(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Mean occupation of a mode with energy `eps`.
pub fn occupation(beta: f64, mu: f64, eps: f64) -> Result<f64> {
    check_beta(beta)?;
    check_mu(mu)?;
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("mode energy {eps} is negative")));
    }
    Ok(bose(beta * eps + mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dispersion_corners() {
        assert_eq!(dispersion([0.0; 3]), 0.0);
        assert!((dispersion([PI; 3]) - 12.0).abs() < 1e-14);
        assert!((dispersion([PI, 0.0, 0.0]) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn occupation_values() {
        let one = occupation(1.0, 2f64.ln(), 0.0).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        assert!(occupation(1.0, 50.0, 3.0).unwrap() < 1e-21);
        let n = occupation(1.0, 0.1, 0.0).unwrap();
        assert!((n - 9.508331944775794).abs() < 1e-12);
    }

    #[test]
    fn occupation_rejects_bad_input() {
        assert!(occupation(1.0, 0.0, 1.0).is_err());
        assert!(occupation(-1.0, 1.0, 1.0).is_err());
        assert!(occupation(1.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn lattice_wraps_and_rejects_odd() {
        assert!(LatticeSpec::new(7).is_err());
        assert!(LatticeSpec::new(0).is_err());
        let s = LatticeSpec::new(4).unwrap();
        assert_eq!(s.wrap([2, -3, 5]), [-2, 1, 1]);
        assert!(s.contains([-2, 1, 1]));
        assert!(!s.contains([2, 0, 0]));
        assert_eq!(s.sites().len(), 64);
    }
}
