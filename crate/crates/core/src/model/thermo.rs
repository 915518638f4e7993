use super::grid::DensityTable;
use super::{bose, check_beta, check_mu, LatticeSpec};
use crate::error::{Error, Result};

const MU_MIN: f64 = 1e-16;
const MU_MAX: f64 = 1e3;
const MAX_ITER: usize = 200;
const REL_TOL: f64 = 1e-12;

/// Cached momentum table for repeated thermodynamic queries on one lattice.
#[derive(Debug, Clone)]
pub struct Thermodynamics {
    spec: LatticeSpec,
    table: DensityTable,
}

impl Thermodynamics {
    pub fn new(spec: LatticeSpec) -> Self {
        Self { spec, table: DensityTable::new(&spec) }
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn density(&self, beta: f64, mu: f64) -> Result<f64> {
        check_beta(beta)?;
        check_mu(mu)?;
        Ok(self.table.density(beta, mu))
    }

    pub fn solve_mu(&self, beta: f64, n_target: f64) -> Result<f64> {
        self.solve_mu_from(beta, n_target, None)
    }

    /// Root of `density(β, μ) = n_target`, optionally warm-started.
    ///
    /// Newton steps in `ln μ`, falling back to bisection whenever a step
    /// leaves the current bracket. Density is strictly decreasing in `μ`,
    /// so the bracket always shrinks onto the unique root.
    pub fn solve_mu_from(&self, beta: f64, n_target: f64, guess: Option<f64>) -> Result<f64> {
        check_beta(beta)?;
        if !(n_target > 0.0 && n_target.is_finite()) {
            return Err(Error::InvalidParameter(format!("density target {n_target}")));
        }
        let residual = |x: f64| {
            let mu = x.exp();
            let (d, slope) = self.table.density_and_slope(beta, mu);
            (d - n_target, slope * mu)
        };

        let mut lo = MU_MIN.ln();
        let mut hi = MU_MAX.ln();
        if residual(lo).0 < 0.0 || residual(hi).0 > 0.0 {
            return Err(Error::Bracket(n_target));
        }

        let mut x = guess
            .filter(|g| *g > MU_MIN && *g < MU_MAX)
            .map(f64::ln)
            .unwrap_or(0.1f64.ln());
        let mut last = f64::INFINITY;
        for _ in 0..MAX_ITER {
            let (f, df) = residual(x);
            last = f;
            if f.abs() <= REL_TOL * n_target {
                return Ok(x.exp());
            }
            if f > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let step = x - f / df;
            x = if step > lo && step < hi && step.is_finite() { step } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 {
                break;
            }
        }
        // the bracket may collapse before the residual test when the density
        // is flat in floating point; accept if still within the contract
        if last.abs() <= 1e-10 * n_target {
            Ok(x.exp())
        } else {
            Err(Error::NoConvergence(last))
        }
    }

    pub fn condensate_fraction(&self, beta: f64, mu: f64) -> Result<f64> {
        let d = self.density(beta, mu)?;
        Ok(bose(mu) / (self.spec.volume() as f64 * d))
    }
}

/// `(1/L³) Σ_k 1/(exp(β ε(k) + μ) − 1)`.
pub fn density(spec: &LatticeSpec, beta: f64, mu: f64) -> Result<f64> {
    Thermodynamics::new(*spec).density(beta, mu)
}

/// Chemical potential holding the density at `n_target`.
pub fn solve_mu(spec: &LatticeSpec, beta: f64, n_target: f64) -> Result<f64> {
    Thermodynamics::new(*spec).solve_mu(beta, n_target)
}

/// Fraction of particles in the `k = 0` mode.
pub fn condensate_fraction(spec: &LatticeSpec, beta: f64, mu: f64) -> Result<f64> {
    Thermodynamics::new(*spec).condensate_fraction(beta, mu)
}
