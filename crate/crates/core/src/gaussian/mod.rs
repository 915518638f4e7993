//! Zero-mean bosonic Gaussian states without anomalous terms.
//!
//! Such a state is fixed by `M[a][b] = ⟨b†_a b_b⟩`. Quadrature moments use
//! `x = (b + b†)/√2`, `p = (b − b†)/(i√2)` with vacuum `σ = I/2`.

mod fidelity;
mod spectrum;

pub use fidelity::{fidelity, fidelity_quadrature, infidelity};
pub use spectrum::{entropy, purity, symplectic_eigenvalues};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Site;

/// Occupations below this are treated as exactly zero.
pub const SPECTRUM_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalGaussianState {
    sites: Vec<Site>,
    m: DMatrix<Complex64>,
}

impl ThermalGaussianState {
    pub fn new(sites: Vec<Site>, m: DMatrix<Complex64>) -> Result<Self> {
        let n = sites.len();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(n, m.nrows()));
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..n {
            for j in 0..=i {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "covariance is not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        let st = Self { sites, m };
        if let Some(&low) = st.raw_occupations().first() {
            if low < -1e-12 * scale {
                return Err(Error::NotPositive(low));
            }
        }
        Ok(st)
    }

    pub fn from_real(sites: Vec<Site>, m: DMatrix<f64>) -> Result<Self> {
        Self::new(sites, m.map(|x| Complex64::new(x, 0.0)))
    }

    pub(crate) fn from_real_unchecked(sites: Vec<Site>, m: DMatrix<f64>) -> Self {
        Self { sites, m: m.map(|x| Complex64::new(x, 0.0)) }
    }

    pub fn vacuum(sites: Vec<Site>) -> Self {
        let n = sites.len();
        Self { sites, m: DMatrix::zeros(n, n) }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Principal submatrix on `subset`, in the order given.
    pub fn reduce(&self, subset: &[Site]) -> Result<Self> {
        let idx = subset
            .iter()
            .map(|s| self.sites.iter().position(|t| t == s).ok_or(Error::UnknownSite(*s)))
            .collect::<Result<Vec<_>>>()?;
        for (i, s) in subset.iter().enumerate() {
            if subset[..i].contains(s) {
                return Err(Error::DuplicateSite(*s));
            }
        }
        let k = idx.len();
        let m = DMatrix::from_fn(k, k, |i, j| self.m[(idx[i], idx[j])]);
        Ok(Self { sites: subset.to_vec(), m })
    }

    pub fn to_quadrature(&self) -> QuadratureCM {
        let n = self.len();
        let mut sigma = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.m[(i, j)];
                let diag = if i == j { 0.5 } else { 0.0 };
                sigma[(i, j)] = diag + z.re;
                sigma[(n + i, n + j)] = diag + z.re;
                sigma[(i, n + j)] = z.im;
                sigma[(n + i, j)] = -z.im;
            }
        }
        QuadratureCM { sigma }
    }

    fn raw_occupations(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.m.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenvalues of `M` (normal-mode occupations), ascending, with values
    /// below [`SPECTRUM_FLOOR`] clamped to zero.
    pub fn mode_occupations(&self) -> Vec<f64> {
        self.raw_occupations()
            .into_iter()
            .map(|x| if x < SPECTRUM_FLOOR { 0.0 } else { x })
            .collect()
    }

    pub(crate) fn commutes_with(&self, other: &Self) -> bool {
        let a = &self.m;
        let b = &other.m;
        let c = a * b - b * a;
        c.norm() <= 1e-10 * (1.0 + a.norm()) * (1.0 + b.norm())
    }
}

/// Symmetrized quadrature covariance in `(x_1..x_N, p_1..p_N)` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCM {
    sigma: DMatrix<f64>,
}

impl QuadratureCM {
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() || !sigma.nrows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(sigma.nrows(), sigma.ncols()));
        }
        Ok(Self { sigma })
    }

    pub fn vacuum(modes: usize) -> Self {
        Self { sigma: DMatrix::identity(2 * modes, 2 * modes) * 0.5 }
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    /// Uncertainty relation `σ + iΩ/2 ⪰ 0`, checked on the Hermitian form.
    pub fn satisfies_uncertainty(&self, tol: f64) -> bool {
        let n = self.modes();
        let omega = symplectic_form(n);
        let h = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            Complex64::new(self.sigma[(i, j)], 0.5 * omega[(i, j)])
        });
        SymmetricEigen::new(h).eigenvalues.iter().all(|&e| e >= -tol)
    }

    /// Moduli of the eigenvalues of `iΩσ`, one per mode, ascending.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let a = symplectic_form(self.modes()) * &self.sigma;
        let mut ev: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        ev.sort_by(f64::total_cmp);
        ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    }

    /// `1/√det(2σ)`.
    pub fn purity(&self) -> f64 {
        let two = &self.sigma * 2.0;
        1.0 / two.determinant().sqrt()
    }
}

/// `Ω = [[0, I], [−I, 0]]`.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let n = modes;
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        o[(i, n + i)] = 1.0;
        o[(n + i, i)] = -1.0;
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sites(n: usize) -> Vec<Site> {
        (0..n as i64).map(|i| [i, 0, 0]).collect()
    }

    #[test]
    fn reduce_identity_and_single_site() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.2, 1.0, 0.2, 0.1, 0.2, 1.0]);
        let st = ThermalGaussianState::from_real(sites(3), m).unwrap();
        assert_eq!(st.reduce(&sites(3)).unwrap(), st);
        let one = st.reduce(&[[2, 0, 0]]).unwrap();
        assert_eq!(one.matrix()[(0, 0)].re, 1.0);
        assert!(matches!(st.reduce(&[[5, 0, 0]]), Err(Error::UnknownSite(_))));
    }

    #[test]
    fn reduce_keeps_requested_order() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.1, 0.7]);
        let st = ThermalGaussianState::from_real(sites(2), m).unwrap();
        let r = st.reduce(&[[1, 0, 0], [0, 0, 0]]).unwrap();
        assert_eq!(r.matrix()[(0, 0)].re, 0.7);
    }

    #[test]
    fn rejects_non_hermitian_and_negative() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.2, 0.7]);
        assert!(ThermalGaussianState::from_real(sites(2), m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[0.1, 0.5, 0.5, 0.1]);
        assert!(matches!(
            ThermalGaussianState::from_real(sites(2), m),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn quadrature_of_vacuum_and_thermal_mode() {
        let v = ThermalGaussianState::vacuum(sites(3)).to_quadrature();
        assert_eq!(v, QuadratureCM::vacuum(3));
        let m = DMatrix::from_element(1, 1, 2.0);
        let q = ThermalGaussianState::from_real(sites(1), m).unwrap().to_quadrature();
        assert_eq!(q.sigma(), &DMatrix::from_row_slice(2, 2, &[2.5, 0.0, 0.0, 2.5]));
    }

    #[test]
    fn complex_covariance_quadrature_is_symmetric_and_physical() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.6, 0.0),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.4, 0.0),
            ],
        );
        let st = ThermalGaussianState::new(sites(2), m).unwrap();
        let q = st.to_quadrature();
        assert_eq!(q.sigma(), &q.sigma().transpose());
        assert!(q.satisfies_uncertainty(1e-12));
        let a = symplectic_eigenvalues(&st);
        let b = q.symplectic_eigenvalues();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
