use std::f64::consts::PI;

use super::{dispersion, LatticeSpec};

/// Full list of allowed momenta `k = 2π m / L`, `m_i ∈ [−L/2, L/2 − 1]`.
///
/// Only practical for small lattices; the thermodynamic sums use the
/// reduced tables below instead.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    pub vectors: Vec<[f64; 3]>,
    pub energies: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(spec: &LatticeSpec) -> Self {
        let l = spec.side() as i64;
        let h = l / 2;
        let step = 2.0 * PI / l as f64;
        let mut vectors = Vec::with_capacity(spec.volume());
        for a in -h..h {
            for b in -h..h {
                for c in -h..h {
                    vectors.push([a as f64 * step, b as f64 * step, c as f64 * step]);
                }
            }
        }
        let energies = vectors.iter().map(|&k| dispersion(k)).collect();
        Self { vectors, energies }
    }
}

/// One axis folded onto `m ∈ [0, L/2]`.
///
/// Every summand used here is even in each momentum component, so the
/// full axis sum equals the folded sum with weight 2 on interior points.
#[derive(Debug, Clone)]
pub(crate) struct HalfAxis {
    pub side: usize,
    pub cos: Vec<f64>,
    pub weight: Vec<f64>,
}

impl HalfAxis {
    pub fn new(side: usize) -> Self {
        let h = side / 2;
        let cos = (0..=h).map(|m| cos_frac(m, side)).collect();
        let weight = (0..=h).map(|m| if m == 0 || m == h { 1.0 } else { 2.0 }).collect();
        Self { side, cos, weight }
    }

    pub fn len(&self) -> usize {
        self.cos.len()
    }

    /// `cos(2π m r / L)` for every folded `m`, reduced exactly in integers.
    pub fn cos_shift(&self, r: usize) -> Vec<f64> {
        (0..self.len()).map(|m| cos_frac(m * r, self.side)).collect()
    }
}

/// `cos(2π j / L)` with `j` reduced mod `L` first.
pub(crate) fn cos_frac(j: usize, side: usize) -> f64 {
    let j = j % side;
    (2.0 * PI * j as f64 / side as f64).cos()
}

/// Distinct mode energies with multiplicities.
///
/// The occupation depends on `k` only through the multiset of the three
/// cosines, so summing over sorted folded triples cuts the work by ~48×.
#[derive(Debug, Clone)]
pub(crate) struct DensityTable {
    pub volume: f64,
    pub eps: Vec<f64>,
    pub mult: Vec<f64>,
}

impl DensityTable {
    pub fn new(spec: &LatticeSpec) -> Self {
        let axis = HalfAxis::new(spec.side());
        let n = axis.len();
        let cap = n * (n + 1) * (n + 2) / 6;
        let mut eps = Vec::with_capacity(cap);
        let mut mult = Vec::with_capacity(cap);
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let perms = match (a == b, b == c) {
                        (true, true) => 1.0,
                        (false, false) => 6.0,
                        _ => 3.0,
                    };
                    let w = axis.weight[a] * axis.weight[b] * axis.weight[c] * perms;
                    eps.push(2.0 * (3.0 - axis.cos[a] - axis.cos[b] - axis.cos[c]));
                    mult.push(w);
                }
            }
        }
        // the k = 0 mode comes first; clamp rounding so it is exactly zero
        eps[0] = 0.0;
        Self { volume: spec.volume() as f64, eps, mult }
    }

    /// Density and its derivative with respect to `μ`.
    pub fn density_and_slope(&self, beta: f64, mu: f64) -> (f64, f64) {
        let mut d = 0.0;
        let mut s = 0.0;
        for (&e, &w) in self.eps.iter().zip(&self.mult) {
            let n = super::bose(beta * e + mu);
            d += w * n;
            s += w * n * (n + 1.0);
        }
        (d / self.volume, -s / self.volume)
    }

    pub fn density(&self, beta: f64, mu: f64) -> f64 {
        let d: f64 = self
            .eps
            .iter()
            .zip(&self.mult)
            .map(|(&e, &w)| w * super::bose(beta * e + mu))
            .sum();
        d / self.volume
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_one_zero_and_symmetric_energies() {
        for side in [2, 4, 6] {
            let spec = LatticeSpec::new(side).unwrap();
            let g = MomentumGrid::new(&spec);
            assert_eq!(g.vectors.len(), spec.volume());
            assert_eq!(g.energies.iter().filter(|&&e| e.abs() < 1e-12).count(), 1);
            assert!(g.energies.iter().all(|&e| (-1e-12..=12.0 + 1e-12).contains(&e)));
            let max = g.energies.iter().cloned().fold(0.0, f64::max);
            assert!((max - 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn table_multiplicities_cover_the_grid() {
        for side in [2, 4, 10, 16] {
            let spec = LatticeSpec::new(side).unwrap();
            let t = DensityTable::new(&spec);
            let total: f64 = t.mult.iter().sum();
            assert_eq!(total, spec.volume() as f64);
        }
    }

    #[test]
    fn table_matches_full_grid_sum() {
        let spec = LatticeSpec::new(8).unwrap();
        let g = MomentumGrid::new(&spec);
        let t = DensityTable::new(&spec);
        let (beta, mu) = (0.7, 0.3);
        let direct: f64 =
            g.energies.iter().map(|&e| super::super::bose(beta * e + mu)).sum::<f64>() / 512.0;
        assert!((t.density(beta, mu) - direct).abs() < 1e-13 * direct);
    }
}
