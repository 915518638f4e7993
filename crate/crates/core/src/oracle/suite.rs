//! Fixed cross-check of the Gaussian path against the Fock oracle on the
//! `L = 2` lattice.

use std::fmt;

use crate::correlations;
use crate::error::Result;
use crate::gaussian::{self, ThermalGaussianState};
use crate::model::{covariance, LatticeSpec, Site};

use super::{fock_states, oracle_fidelity, FockSpec, FockState};

pub const BETAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const MUS: [f64; 3] = [1.5, 2.0, 3.0];
pub const TOLERANCE: f64 = 1e-6;

/// Two-site subsystems whose reductions are compared.
pub const PAIRS: [[Site; 2]; 2] = [[[0, 0, 0], [-1, 0, 0]], [[0, 0, 0], [-1, -1, -1]]];

#[derive(Debug, Clone)]
pub struct Check {
    pub quantity: String,
    pub beta: f64,
    pub point: String,
    pub gaussian: f64,
    pub oracle: f64,
}

impl Check {
    pub fn error(&self) -> f64 {
        (self.gaussian - self.oracle).abs()
    }

    pub fn passed(&self) -> bool {
        self.error() <= TOLERANCE
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<22} beta={:<4} {:<16} gauss={:>22.15e} oracle={:>22.15e} err={:.2e}",
            if self.passed() { "ok" } else { "FAIL" },
            self.quantity,
            self.beta,
            self.point,
            self.gaussian,
            self.oracle,
            self.error()
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn max_error(&self) -> f64 {
        self.checks.iter().map(Check::error).fold(0.0, f64::max)
    }
}

/// Runs every comparison at the fixed validation points.
pub fn run() -> Result<SuiteReport> {
    let lattice = LatticeSpec::new(2)?;
    let subsets: Vec<Vec<Site>> = PAIRS.iter().map(|p| p.to_vec()).collect();
    let spec = FockSpec::lattice(&lattice)?.with_subsets(&subsets)?;
    let sites = spec.sites().to_vec();
    let mut report = SuiteReport::default();

    for &beta in &BETAS {
        let exact = fock_states(&spec, beta, &MUS)?;
        let gauss = MUS
            .iter()
            .map(|&mu| covariance(&lattice, beta, mu, &sites))
            .collect::<Result<Vec<_>>>()?;
        for (g, o) in gauss.iter().zip(&exact) {
            single_point(&mut report, g, o)?;
        }
        for a in 0..MUS.len() {
            for b in a + 1..MUS.len() {
                pair_point(&mut report, [&gauss[a], &gauss[b]], [&exact[a], &exact[b]])?;
            }
        }
    }
    Ok(report)
}

fn single_point(report: &mut SuiteReport, g: &ThermalGaussianState, o: &FockState) -> Result<()> {
    let mut push = |quantity: &str, point: String, gaussian: f64, oracle: f64| {
        report.checks.push(Check {
            quantity: quantity.into(),
            beta: o.beta,
            point,
            gaussian,
            oracle,
        });
    };
    let at = format!("mu={}", o.mu);
    let v = o.sites().len();

    // report the worst entry rather than 64 lines
    let (mut worst, mut gw, mut ow) = (-1.0, 0.0, 0.0);
    for i in 0..v {
        for j in 0..v {
            let x = g.matrix()[(i, j)];
            let y = o.covariance()[(i, j)];
            let e = (x.re - y).abs().max(x.im.abs());
            if e > worst {
                (worst, gw, ow) = (e, x.re, y);
            }
        }
    }
    push("covariance", at.clone(), gw, ow);

    push("purity(8 sites)", at.clone(), gaussian::purity(g), o.purity());
    push("entropy(8 sites)", at.clone(), gaussian::entropy(g), o.entropy());

    for j in [1usize, 3, 7] {
        let point = format!("{at} sites 0-{j}");
        push("correlation", point, correlations::from_state(g, 0, j), o.correlation(0, j));
    }
    push("correlation", format!("{at} site 0"), correlations::from_state(g, 0, 0), o.correlation(0, 0));

    for pair in &PAIRS {
        let red = g.reduce(pair)?;
        let rho = o.reduced(pair)?;
        let point = format!("{at} {pair:?}");
        push("purity(2 sites)", point.clone(), gaussian::purity(&red), rho.purity());
        push("entropy(2 sites)", point.clone(), gaussian::entropy(&red), rho.entropy());
        let sigma = red.to_quadrature();
        let moments = rho.quadrature_moments();
        let diff = (sigma.sigma() - &moments).amax();
        push("quadrature moments", point, diff, 0.0);
    }
    Ok(())
}

fn pair_point(
    report: &mut SuiteReport,
    g: [&ThermalGaussianState; 2],
    o: [&FockState; 2],
) -> Result<()> {
    let at = format!("mu={}/{}", o[0].mu, o[1].mu);
    report.checks.push(Check {
        quantity: "fidelity(8 sites)".into(),
        beta: o[0].beta,
        point: at.clone(),
        gaussian: gaussian::fidelity(g[0], g[1])?,
        oracle: o[0].fidelity_same_beta(o[1])?,
    });
    for pair in &PAIRS {
        let r1 = o[0].reduced(pair)?;
        let r2 = o[1].reduced(pair)?;
        report.checks.push(Check {
            quantity: "fidelity(2 sites)".into(),
            beta: o[0].beta,
            point: format!("{at} {pair:?}"),
            gaussian: gaussian::fidelity(&g[0].reduce(pair)?, &g[1].reduce(pair)?)?,
            oracle: oracle_fidelity(&r1.rho, &r2.rho)?,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    #[test]
    fn validation_points_agree() {
        let report = super::run().unwrap();
        for c in &report.checks {
            eprintln!("{c}");
        }
        assert!(report.passed(), "max error {:e}", report.max_error());
    }
}
