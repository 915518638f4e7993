use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::{cos_frac, HalfAxis};
use super::{bose, check_beta, check_mu, LatticeSpec, Site};
use crate::error::{Error, Result};
use crate::gaussian::ThermalGaussianState;

/// Mode occupations on the folded grid `m ∈ [0, L/2]³`.
///
/// Real-space kernel entries are separable cosine transforms of this
/// table, so any single displacement costs `O((L/2)³)` without an FFT.
#[derive(Debug, Clone)]
pub struct OccupationGrid {
    spec: LatticeSpec,
    axis: HalfAxis,
    occ: Vec<f64>,
}

impl OccupationGrid {
    pub fn new(spec: &LatticeSpec, beta: f64, mu: f64) -> Result<Self> {
        check_beta(beta)?;
        check_mu(mu)?;
        let axis = HalfAxis::new(spec.side());
        let n = axis.len();
        let mut occ = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let eps = 2.0 * (3.0 - axis.cos[a] - axis.cos[b] - axis.cos[c]);
                    let eps = if a + b + c == 0 { 0.0 } else { eps };
                    occ.push(bose(beta * eps + mu));
                }
            }
        }
        Ok(Self { spec: *spec, axis, occ })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    fn fold(&self, d: i64) -> usize {
        let l = self.spec.side() as i64;
        let r = d.rem_euclid(l);
        r.min(l - r) as usize
    }

    /// `g(d) = (1/L³) Σ_k cos(k·d) n(k)`, i.e. `⟨b†_a b_b⟩` for `n_a − n_b = d`.
    pub fn kernel(&self, d: [i64; 3]) -> f64 {
        let n = self.axis.len();
        let w = &self.axis.weight;
        let cx = self.axis.cos_shift(self.fold(d[0]));
        let cy = self.axis.cos_shift(self.fold(d[1]));
        let cz = self.axis.cos_shift(self.fold(d[2]));
        let mut total = 0.0;
        for a in 0..n {
            let mut sa = 0.0;
            for b in 0..n {
                let row = &self.occ[(a * n + b) * n..(a * n + b + 1) * n];
                let sb: f64 = row.iter().zip(&cz).zip(w).map(|((o, c), w)| o * c * w).sum();
                sa += w[b] * cy[b] * sb;
            }
            total += w[a] * cx[a] * sa;
        }
        total / self.spec.volume() as f64
    }

    /// `g((d, 0, 0))` for `d = 0..=d_max` via the axis marginal of the
    /// occupation table; one `O(L³)` pass instead of a full 3D transform.
    pub fn axis_profile(&self, d_max: usize) -> Vec<f64> {
        let n = self.axis.len();
        let w = &self.axis.weight;
        let marginal: Vec<f64> = (0..n)
            .map(|a| {
                let mut s = 0.0;
                for b in 0..n {
                    let row = &self.occ[(a * n + b) * n..(a * n + b + 1) * n];
                    let sb: f64 = row.iter().zip(w).map(|(o, w)| o * w).sum();
                    s += w[b] * sb;
                }
                s
            })
            .collect();
        let side = self.spec.side();
        let vol = self.spec.volume() as f64;
        (0..=d_max)
            .map(|d| {
                (0..n).map(|a| w[a] * cos_frac(a * d, side) * marginal[a]).sum::<f64>() / vol
            })
            .collect()
    }
}

/// Covariance matrix `M[a][b] = ⟨b†_a b_b⟩` of the grand-canonical state on
/// an ordered list of sites.
pub fn covariance(
    spec: &LatticeSpec,
    beta: f64,
    mu: f64,
    sites: &[Site],
) -> Result<ThermalGaussianState> {
    let grid = OccupationGrid::new(spec, beta, mu)?;
    covariance_from_grid(&grid, sites)
}

pub(crate) fn covariance_from_grid(
    grid: &OccupationGrid,
    sites: &[Site],
) -> Result<ThermalGaussianState> {
    let spec = grid.spec();
    for (i, s) in sites.iter().enumerate() {
        if !spec.contains(*s) {
            return Err(Error::SiteOutOfRange { site: *s, side: spec.side() });
        }
        if sites[..i].contains(s) {
            return Err(Error::DuplicateSite(*s));
        }
    }
    let n = sites.len();
    let mut cache: HashMap<[usize; 3], f64> = HashMap::new();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut key = [0, 1, 2].map(|k| grid.fold(sites[i][k] - sites[j][k]));
            key.sort_unstable();
            let g = *cache
                .entry(key)
                .or_insert_with(|| grid.kernel(key.map(|r| r as i64)));
            m[(i, j)] = g;
            m[(j, i)] = g;
        }
    }
    Ok(ThermalGaussianState::from_real_unchecked(sites.to_vec(), m))
}

/// Real-space kernel `g(d)` on every displacement of the lattice.
#[derive(Debug, Clone)]
pub struct CovarianceKernel {
    side: usize,
    values: Vec<f64>,
}

impl CovarianceKernel {
    pub fn side(&self) -> usize {
        self.side
    }

    /// Kernel at displacement `d`, reduced mod `L`.
    pub fn get(&self, d: [i64; 3]) -> f64 {
        let l = self.side as i64;
        let [x, y, z] = d.map(|c| c.rem_euclid(l) as usize);
        self.values[(x * self.side + y) * self.side + z]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Full kernel through a 3D FFT of the occupation grid.
pub fn covariance_kernel_fft(spec: &LatticeSpec, beta: f64, mu: f64) -> Result<CovarianceKernel> {
    check_beta(beta)?;
    check_mu(mu)?;
    let l = spec.side();
    let cos: Vec<f64> = (0..l).map(|m| cos_frac(m, l)).collect();
    let mut buf = Vec::with_capacity(l * l * l);
    for a in 0..l {
        for b in 0..l {
            for c in 0..l {
                let eps = if a + b + c == 0 { 0.0 } else { 2.0 * (3.0 - cos[a] - cos[b] - cos[c]) };
                buf.push(Complex64::new(bose(beta * eps + mu), 0.0));
            }
        }
    }
    fft3(&mut buf, l);
    let vol = spec.volume() as f64;
    let values = buf.iter().map(|z| z.re / vol).collect();
    Ok(CovarianceKernel { side: l, values })
}

fn fft3(buf: &mut [Complex64], l: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(l);
    // innermost axis is contiguous
    fft.process(buf);

    let mut line = vec![Complex64::new(0.0, 0.0); l];
    for stride in [l, l * l] {
        for base in 0..l * l {
            // enumerate line starts for this stride
            let start = if stride == l { (base / l) * l * l + base % l } else { base };
            for (k, v) in line.iter_mut().enumerate() {
                *v = buf[start + k * stride];
            }
            fft.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                buf[start + k * stride] = *v;
            }
        }
    }
}
