//! Exact grand-canonical states in a particle-number-truncated Fock space.
//!
//! This is the independent reference for the Gaussian code path. It never
//! touches momentum space: `ρ ∝ ⊕_N e^{−μN} e^{−βH_N}` is built from the
//! real-space single-particle matrix `h`, and every observable is a
//! definitional trace.
//!
//! For the `L = 2` lattice, `h = 6 − 2A` with `A` the adjacency of a cube.
//! The three axis layers of bonds commute with each other and the bonds in
//! one layer are disjoint, so `e^{−βH}` is an exact product of two-site
//! gates. Smaller generic systems fall back to dense exponentiation.

mod basis;
mod propagator;
pub mod suite;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{LatticeSpec, Site};
use basis::{sector_dim, LocalBasis, Sector};
use propagator::{sector_data, sector_hamiltonian, Bond, SectorData};

/// Default cap on the total truncated dimension `Σ_{N ≤ N_max} dim_N`.
pub const DEFAULT_CEILING: usize = 150_000;
/// Default bound on the relative weight of the top particle-number sector.
pub const DEFAULT_WEIGHT_THRESHOLD: f64 = 1e-7;

/// Description of a small bosonic system for the oracle.
#[derive(Debug, Clone)]
pub struct FockSpec {
    sites: Vec<Site>,
    h: DMatrix<f64>,
    hops: Vec<(usize, usize, f64)>,
    layers: Option<Vec<Bond>>,
    symmetries: Vec<Vec<usize>>,
    subsets: Vec<Vec<usize>>,
    n_max: Option<usize>,
    ceiling: usize,
    threshold: f64,
}

impl FockSpec {
    /// The full `L = 2` lattice, sites ordered by the bits `(x, y, z)`. Site
    /// coordinates follow [`LatticeSpec::wrap`], so a set bit reads `−1`.
    pub fn lattice(spec: &LatticeSpec) -> Result<Self> {
        if spec.side() != 2 {
            return Err(Error::InvalidParameter(format!(
                "the Fock oracle handles L = 2 only, got L = {}",
                spec.side()
            )));
        }
        let sites: Vec<Site> = (0..8i64)
            .map(|i| spec.wrap([i & 1, (i >> 1) & 1, (i >> 2) & 1]))
            .collect();
        // both ±1 neighbours coincide, so each bond carries hopping 2
        let h = DMatrix::from_fn(8, 8, |i, j| match (i ^ j).count_ones() {
            0 => 6.0,
            1 => -2.0,
            _ => 0.0,
        });
        let mut bonds = Vec::new();
        for axis in 0..3 {
            for i in 0..8usize {
                if i & (1 << axis) == 0 {
                    bonds.push(Bond { i, j: i | (1 << axis), ei: 2.0, ej: 2.0, hop: 2.0 });
                }
            }
        }
        let mut generators: Vec<Vec<usize>> =
            (0..3).map(|a| (0..8).map(|i| i ^ (1 << a)).collect()).collect();
        // axis swaps x↔y and y↔z
        let swap = |i: usize, a: usize, b: usize| {
            let (ba, bb) = ((i >> a) & 1, (i >> b) & 1);
            (i & !(1 << a) & !(1 << b)) | (bb << a) | (ba << b)
        };
        generators.push((0..8).map(|i| swap(i, 0, 1)).collect());
        generators.push((0..8).map(|i| swap(i, 1, 2)).collect());

        let mut out = Self::from_hopping(sites, h)?;
        out.check_layers(&bonds)?;
        out.layers = Some(bonds);
        out.symmetries = close_group(&generators);
        out.check_symmetries()?;
        Ok(out)
    }

    /// Arbitrary Hermitian (real symmetric) single-particle matrix; sectors
    /// are exponentiated densely.
    pub fn from_hopping(sites: Vec<Site>, h: DMatrix<f64>) -> Result<Self> {
        let v = sites.len();
        if v == 0 || v > 16 {
            return Err(Error::InvalidParameter(format!("{v} sites is outside 1..=16")));
        }
        if h.nrows() != v || h.ncols() != v {
            return Err(Error::DimensionMismatch(v, h.nrows()));
        }
        if (&h - h.transpose()).amax() > 1e-12 {
            return Err(Error::InvalidParameter("h must be symmetric".into()));
        }
        let mut hops = Vec::new();
        for i in 0..v {
            for j in 0..v {
                if i != j && h[(i, j)] != 0.0 {
                    hops.push((i, j, h[(i, j)]));
                }
            }
        }
        Ok(Self {
            sites,
            h,
            hops,
            layers: None,
            symmetries: vec![(0..v).collect()],
            subsets: Vec::new(),
            n_max: None,
            ceiling: DEFAULT_CEILING,
            threshold: DEFAULT_WEIGHT_THRESHOLD,
        })
    }

    /// One mode with on-site energy `energy`.
    pub fn single_site(energy: f64) -> Self {
        Self::from_hopping(vec![[0, 0, 0]], DMatrix::from_element(1, 1, energy))
            .expect("one site is always valid")
    }

    /// Fix the cutoff instead of choosing it from the sector weights.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = Some(n_max);
        self
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// Site subsets whose reduced density matrices should be accumulated.
    pub fn with_subsets(mut self, subsets: &[Vec<Site>]) -> Result<Self> {
        self.subsets = subsets
            .iter()
            .map(|sub| {
                sub.iter()
                    .map(|s| self.site_index(*s).ok_or(Error::UnknownSite(*s)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn hopping(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn site_index(&self, s: Site) -> Option<usize> {
        self.sites.iter().position(|t| *t == s)
    }

    /// Truncated Hilbert-space dimension for cutoff `n_max`.
    pub fn dimension(&self, n_max: usize) -> usize {
        (0..=n_max).map(|n| sector_dim(self.sites.len(), n)).sum()
    }

    fn largest_cutoff(&self) -> usize {
        let mut n = 0;
        while n < 250 && self.dimension(n + 1) <= self.ceiling {
            n += 1;
        }
        n
    }

    fn check_layers(&self, bonds: &[Bond]) -> Result<()> {
        let v = self.sites.len();
        let mut sum = DMatrix::<f64>::zeros(v, v);
        let mut layers: Vec<DMatrix<f64>> = Vec::new();
        let mut used: Vec<Vec<usize>> = Vec::new();
        // consecutive bonds with disjoint sites form one layer
        for b in bonds {
            let fits = used.last().map(|u| !u.contains(&b.i) && !u.contains(&b.j));
            if fits != Some(true) {
                layers.push(DMatrix::zeros(v, v));
                used.push(Vec::new());
            }
            let m = layers.last_mut().unwrap();
            m[(b.i, b.i)] += b.ei;
            m[(b.j, b.j)] += b.ej;
            m[(b.i, b.j)] -= b.hop;
            m[(b.j, b.i)] -= b.hop;
            used.last_mut().unwrap().extend([b.i, b.j]);
        }
        for m in &layers {
            sum += m;
        }
        if (&sum - &self.h).amax() > 1e-12 {
            return Err(Error::InvalidParameter("bond layers do not add up to h".into()));
        }
        for (a, x) in layers.iter().enumerate() {
            for y in &layers[a + 1..] {
                if (x * y - y * x).amax() > 1e-12 {
                    return Err(Error::InvalidParameter("bond layers do not commute".into()));
                }
            }
        }
        Ok(())
    }

    fn check_symmetries(&self) -> Result<()> {
        let v = self.sites.len();
        for g in &self.symmetries {
            for i in 0..v {
                for j in 0..v {
                    if self.h[(g[i], g[j])] != self.h[(i, j)] {
                        return Err(Error::InvalidParameter(
                            "symmetry does not commute with h".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn close_group(generators: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = generators[0].len();
    let mut group: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut frontier = group.clone();
    while let Some(g) = frontier.pop() {
        for s in generators {
            let h: Vec<usize> = (0..n).map(|i| s[g[i]]).collect();
            if !group.contains(&h) {
                group.push(h.clone());
                frontier.push(h);
            }
        }
    }
    group.sort();
    group
}

/// Reduced density matrix on a site subset, in a basis grouped by total
/// particle number.
#[derive(Debug, Clone)]
pub struct ReducedState {
    pub sites: Vec<Site>,
    pub configs: Vec<Vec<u8>>,
    pub rho: DMatrix<f64>,
}

impl ReducedState {
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace()
    }

    pub fn entropy(&self) -> f64 {
        von_neumann(&self.rho)
    }

    /// `b_k` for the `k`-th site of the subset in the truncated local basis.
    fn lowering(&self, k: usize) -> DMatrix<f64> {
        let d = self.configs.len();
        let mut m = DMatrix::zeros(d, d);
        for (c, conf) in self.configs.iter().enumerate() {
            if conf[k] == 0 {
                continue;
            }
            let mut target = conf.clone();
            target[k] -= 1;
            if let Some(r) = self.configs.iter().position(|x| *x == target) {
                m[(r, c)] = (conf[k] as f64).sqrt();
            }
        }
        m
    }

    /// Symmetrized quadrature moments `½⟨{R_a, R_b}⟩`, `R = (x…, p…)`,
    /// evaluated as traces against this density matrix.
    pub fn quadrature_moments(&self) -> DMatrix<f64> {
        let k = self.sites.len();
        let s2 = std::f64::consts::SQRT_2;
        let mut ops: Vec<DMatrix<Complex64>> = Vec::with_capacity(2 * k);
        let lowers: Vec<DMatrix<f64>> = (0..k).map(|a| self.lowering(a)).collect();
        for b in &lowers {
            ops.push((b + b.transpose()).map(|x| Complex64::new(x / s2, 0.0)));
        }
        for b in &lowers {
            // (b − b†)/(i√2)
            ops.push((b - b.transpose()).map(|x| Complex64::new(0.0, -x / s2)));
        }
        let rho = self.rho.map(|x| Complex64::new(x, 0.0));
        DMatrix::from_fn(2 * k, 2 * k, |a, b| {
            let ab = (&rho * &ops[a] * &ops[b]).trace();
            let ba = (&rho * &ops[b] * &ops[a]).trace();
            0.5 * (ab + ba).re
        })
    }
}

/// Grand-canonical state of a [`FockSpec`] at one `(β, μ)`.
#[derive(Debug, Clone)]
pub struct FockState {
    pub beta: f64,
    pub mu: f64,
    pub n_max: usize,
    sites: Vec<Site>,
    sector_z: Vec<f64>,
    partition: f64,
    mean_n: f64,
    energy: f64,
    purity: f64,
    cov: DMatrix<f64>,
    nn: DMatrix<f64>,
    reduced: Vec<ReducedState>,
}

impl FockState {
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// `⟨b†_i b_j⟩`.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn partition_function(&self) -> f64 {
        self.partition
    }

    pub fn mean_particle_number(&self) -> f64 {
        self.mean_n
    }

    /// Probability of the empty lattice.
    pub fn vacuum_probability(&self) -> f64 {
        1.0 / self.partition
    }

    /// Weight of the highest retained particle-number sector.
    pub fn top_sector_weight(&self) -> f64 {
        let n = self.sector_z.len() - 1;
        (-self.mu * n as f64).exp() * self.sector_z[n] / self.partition
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    /// `S = ln Z + β⟨H⟩ + μ⟨N⟩`.
    pub fn entropy(&self) -> f64 {
        self.partition.ln() + self.beta * self.energy + self.mu * self.mean_n
    }

    /// `⟨n_i n_j⟩ − ⟨n_i⟩⟨n_j⟩` by site index.
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.nn[(i, j)] - self.cov[(i, i)] * self.cov[(j, j)]
    }

    pub fn reduced(&self, subset: &[Site]) -> Result<&ReducedState> {
        self.reduced
            .iter()
            .find(|r| r.sites == subset)
            .ok_or_else(|| Error::UnknownSite(subset.first().copied().unwrap_or([0; 3])))
    }

    /// Fidelity of two states sharing `β` and the spec. Both commute with
    /// `H` and `N`, so `F = Z(β, (μ₁+μ₂)/2)² / (Z(β, μ₁) Z(β, μ₂))`.
    pub fn fidelity_same_beta(&self, other: &FockState) -> Result<f64> {
        if self.beta != other.beta || self.sites != other.sites {
            return Err(Error::InvalidParameter("states differ in beta or sites".into()));
        }
        let n = self.sector_z.len().min(other.sector_z.len());
        let mid = 0.5 * (self.mu + other.mu);
        let z = |mu: f64| -> f64 {
            self.sector_z[..n].iter().enumerate().map(|(k, z)| (-mu * k as f64).exp() * z).sum()
        };
        Ok(z(mid).powi(2) / (z(self.mu) * z(other.mu)))
    }
}

/// Exact states for several chemical potentials at one `β`.
///
/// The sector blocks `e^{−βH_N}` do not depend on `μ`, so they are built
/// once. Without a fixed cutoff, sectors are added until the top one
/// carries relative weight below the threshold for every `μ`.
pub fn fock_states(spec: &FockSpec, beta: f64, mus: &[f64]) -> Result<Vec<FockState>> {
    crate::model::check_beta(beta)?;
    for &mu in mus {
        crate::model::check_mu(mu)?;
    }
    let cap = match spec.n_max {
        Some(n) => {
            let dim = spec.dimension(n);
            if dim > spec.ceiling {
                return Err(Error::FockDimension { dim, ceiling: spec.ceiling });
            }
            n
        }
        None => spec.largest_cutoff(),
    };
    let locals: Vec<LocalBasis> =
        spec.subsets.iter().map(|s| LocalBasis::new(s.len(), cap)).collect();

    let top_weight = |sectors: &[SectorData], mu: f64| -> f64 {
        let ws: Vec<f64> = sectors.iter().map(|s| (-mu * s.n as f64).exp() * s.z).collect();
        ws.last().unwrap() / ws.iter().sum::<f64>()
    };

    let mut sectors: Vec<SectorData> = Vec::new();
    for n in 0..=cap {
        sectors.push(sector_data(spec, &locals, beta, n)?);
        if spec.n_max.is_none()
            && n >= 1
            && mus.iter().all(|&mu| top_weight(&sectors, mu) < spec.threshold)
        {
            break;
        }
    }
    let n_max = sectors.len() - 1;
    for &mu in mus {
        let w = top_weight(&sectors, mu);
        if w >= spec.threshold {
            return Err(Error::Truncation { weight: w, n_max, threshold: spec.threshold });
        }
    }

    Ok(mus.iter().map(|&mu| assemble(spec, &locals, &sectors, beta, mu)).collect())
}

pub fn fock_state(spec: &FockSpec, beta: f64, mu: f64) -> Result<FockState> {
    Ok(fock_states(spec, beta, &[mu])?.remove(0))
}

fn assemble(
    spec: &FockSpec,
    locals: &[LocalBasis],
    sectors: &[SectorData],
    beta: f64,
    mu: f64,
) -> FockState {
    let n_max = sectors.len() - 1;
    let v = spec.sites.len();
    let weights: Vec<f64> = sectors.iter().map(|s| (-mu * s.n as f64).exp()).collect();
    let z: f64 = sectors.iter().zip(&weights).map(|(s, w)| w * s.z).sum();
    let avg = |f: &dyn Fn(&SectorData) -> f64| -> f64 {
        sectors.iter().zip(&weights).map(|(s, w)| w * f(s)).sum::<f64>() / z
    };
    let mean_n = avg(&|s| s.n as f64 * s.z);
    let energy = avg(&|s| s.energy);
    let purity = sectors.iter().zip(&weights).map(|(s, w)| w * w * s.purity).sum::<f64>() / (z * z);
    let mut cov = DMatrix::zeros(v, v);
    let mut nn = DMatrix::zeros(v, v);
    for (s, w) in sectors.iter().zip(&weights) {
        cov += &s.cov * (w / z);
        nn += &s.nn * (w / z);
    }
    let reduced = spec
        .subsets
        .iter()
        .zip(locals)
        .enumerate()
        .map(|(k, (sub, local))| {
            let dim = local.range(n_max).1;
            let mut rho = DMatrix::zeros(dim, dim);
            for (s, w) in sectors.iter().zip(&weights) {
                rho += s.rdms[k].view((0, 0), (dim, dim)) * (w / z);
            }
            ReducedState {
                sites: sub.iter().map(|&i| spec.sites[i]).collect(),
                configs: local.configs[..dim].to_vec(),
                rho,
            }
        })
        .collect();
    FockState {
        beta,
        mu,
        n_max,
        sites: spec.sites.clone(),
        sector_z: sectors.iter().map(|s| s.z).collect(),
        partition: z,
        mean_n,
        energy,
        purity,
        cov,
        nn,
        reduced,
    }
}

/// Full normalized density matrix over all sectors up to the cutoff, in
/// sector order. Meant for small checks only.
pub fn dense_density_matrix(spec: &FockSpec, beta: f64, mu: f64) -> Result<DMatrix<f64>> {
    let n_max = spec
        .n_max
        .ok_or_else(|| Error::InvalidParameter("dense assembly needs a fixed n_max".into()))?;
    let dim = spec.dimension(n_max);
    if dim > 4000 {
        return Err(Error::FockDimension { dim, ceiling: 4000 });
    }
    let mut rho = DMatrix::zeros(dim, dim);
    let mut off = 0;
    for n in 0..=n_max {
        let sector = Sector::new(spec.sites.len(), n);
        let d = sector.len();
        let block = propagator::block(spec, &sector, beta)?;
        rho.view_mut((off, off), (d, d)).copy_from(&(block * (-mu * n as f64).exp()));
        off += d;
    }
    let tr = rho.trace();
    Ok(rho / tr)
}

/// Truncated `H` over all sectors up to the cutoff, matching
/// [`dense_density_matrix`]'s basis order.
pub fn truncated_hamiltonian(spec: &FockSpec, n_max: usize) -> DMatrix<f64> {
    let dim = spec.dimension(n_max);
    let mut h = DMatrix::zeros(dim, dim);
    let mut off = 0;
    for n in 0..=n_max {
        let sector = Sector::new(spec.sites.len(), n);
        let d = sector.len();
        h.view_mut((off, off), (d, d)).copy_from(&sector_hamiltonian(spec, &sector));
        off += d;
    }
    h
}

/// Particle number on the same basis as [`truncated_hamiltonian`].
pub fn truncated_number(spec: &FockSpec, n_max: usize) -> DMatrix<f64> {
    let diag: Vec<f64> = (0..=n_max)
        .flat_map(|n| std::iter::repeat_n(n as f64, sector_dim(spec.sites.len(), n)))
        .collect();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
}

/// `−tr ρ ln ρ` from the eigenvalues.
pub fn von_neumann(rho: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(rho.clone())
        .eigenvalues
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Definitional Uhlmann fidelity `[tr √(√ρ σ √ρ)]²`.
pub fn oracle_fidelity(rho1: &DMatrix<f64>, rho2: &DMatrix<f64>) -> Result<f64> {
    if rho1.shape() != rho2.shape() {
        return Err(Error::DimensionMismatch(rho1.nrows(), rho2.nrows()));
    }
    let root = psd_sqrt(rho1)?;
    let inner = &root * rho2 * &root;
    let inner = (&inner + inner.transpose()) * 0.5;
    let eig = SymmetricEigen::new(inner);
    let mut tr = 0.0;
    for &x in eig.eigenvalues.iter() {
        if x < -1e-10 {
            return Err(Error::NotPositive(x));
        }
        tr += x.max(0.0).sqrt();
    }
    Ok(tr * tr)
}

fn psd_sqrt(rho: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(rho.clone());
    if let Some(&low) = eig.eigenvalues.iter().find(|&&x| x < -1e-10) {
        return Err(Error::NotPositive(low));
    }
    let d = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&d) * v.transpose())
}

/// Truncated single-mode thermal state with mean occupation `n`.
pub fn thermal_mode(n: f64, cutoff: usize) -> DMatrix<f64> {
    let q = n / (n + 1.0);
    let p: Vec<f64> = (0..=cutoff).map(|k| (1.0 - q) * q.powi(k as i32)).collect();
    let tr: f64 = p.iter().sum();
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p.len(), p.iter().map(|x| x / tr)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bose;

    fn cube() -> FockSpec {
        FockSpec::lattice(&LatticeSpec::new(2).unwrap()).unwrap()
    }

    #[test]
    fn cube_has_full_symmetry_group() {
        let spec = cube();
        assert_eq!(spec.symmetries.len(), 48);
        assert_eq!(spec.layers.as_ref().unwrap().len(), 12);
        assert_eq!(spec.dimension(4), 495);
    }

    #[test]
    fn rejects_other_lattices_and_oversized_spaces() {
        assert!(FockSpec::lattice(&LatticeSpec::new(4).unwrap()).is_err());
        let spec = cube().with_n_max(20);
        assert!(matches!(
            fock_state(&spec, 1.0, 2.0),
            Err(Error::FockDimension { .. })
        ));
        let spec = cube().with_n_max(2);
        assert!(matches!(fock_state(&spec, 1.0, 1.5), Err(Error::Truncation { .. })));
    }

    #[test]
    fn single_site_is_geometric() {
        let spec = FockSpec::single_site(0.4).with_threshold(1e-15);
        let st = fock_state(&spec, 2.0, 0.3).unwrap();
        let expect = bose(2.0 * 0.4 + 0.3);
        assert!((st.covariance()[(0, 0)] - expect).abs() < 1e-13);
    }

    #[test]
    fn thermal_modes_and_fidelity() {
        let a = thermal_mode(0.0, 60);
        let b = thermal_mode(1.0, 60);
        assert!((oracle_fidelity(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        assert!((oracle_fidelity(&b, &b).unwrap() - 1.0).abs() < 1e-12);
        // S = 2 ln 2 for n = 1
        assert!((von_neumann(&b) - 2.0 * 2f64.ln()).abs() < 1e-12);
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.5, -0.5]));
        assert!(oracle_fidelity(&bad, &bad).is_err());
    }

    #[test]
    fn cold_limit_keeps_only_the_zero_mode() {
        // every excited mode has ε ≥ 4, the k = 0 mode stays thermal at μ
        let st = fock_state(&cube().with_threshold(1e-14), 40.0, 3.0).unwrap();
        let n0 = bose(3.0);
        assert!((st.mean_particle_number() - n0).abs() < 1e-12);
        assert!((st.vacuum_probability() - (1.0 - (-3.0f64).exp())).abs() < 1e-12);
        let c = st.covariance();
        assert!((c[(0, 5)] - n0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn sectors_match_dense_exponential() {
        let spec = cube().with_n_max(3);
        let (beta, mu) = (0.7, 1.1);
        let rho = dense_density_matrix(&spec, beta, mu).unwrap();
        let k = truncated_hamiltonian(&spec, 3) * beta + truncated_number(&spec, 3) * mu;
        let direct = propagator::exp_symmetric(k, -1.0);
        let direct = &direct / direct.trace();
        assert!((&rho - direct).amax() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_purity_factorizes_over_momenta() {
        let lattice = LatticeSpec::new(2).unwrap();
        let (beta, mu) = (1.0, 2.0);
        let st = fock_state(&cube().with_threshold(1e-10), beta, mu).unwrap();
        let grid = crate::model::MomentumGrid::new(&lattice);
        let expect: f64 = grid
            .energies
            .iter()
            .map(|&e| 1.0 / (2.0 * bose(beta * e + mu) + 1.0))
            .product();
        assert!((st.purity() - expect).abs() < 1e-8, "{} vs {expect}", st.purity());
    }

    #[test]
    fn reductions_are_normalized_and_subadditive() {
        let spec = cube()
            .with_subsets(&[vec![[0, 0, 0], [-1, 0, 0]], vec![[0, 0, 0]], vec![[-1, 0, 0]]])
            .unwrap();
        let st = fock_state(&spec, 0.5, 1.5).unwrap();
        let pair = st.reduced(&[[0, 0, 0], [-1, 0, 0]]).unwrap();
        assert!((pair.rho.trace() - 1.0).abs() < 1e-12);
        let s1 = st.reduced(&[[0, 0, 0]]).unwrap().entropy();
        let s2 = st.reduced(&[[-1, 0, 0]]).unwrap().entropy();
        assert!(pair.entropy() <= s1 + s2);
        assert!((s1 - s2).abs() < 1e-12);
        assert!(st.reduced(&[[-1, -1, 0]]).is_err());
    }

    #[test]
    fn ladder_converges_at_large_mu() {
        let a = fock_state(&cube().with_n_max(8), 1.0, 3.0).unwrap();
        let b = fock_state(&cube().with_n_max(9), 1.0, 3.0).unwrap();
        assert!((a.covariance() - b.covariance()).amax() < 1e-8);
        assert!((a.purity() - b.purity()).abs() < 1e-8);
        assert!((a.entropy() - b.entropy()).abs() < 1e-8);
    }

    #[test]
    fn same_beta_fidelity_matches_the_definition() {
        let spec = cube().with_n_max(3).with_threshold(1.0);
        let (beta, m1, m2) = (0.8, 1.2, 1.6);
        let r1 = dense_density_matrix(&spec, beta, m1).unwrap();
        let r2 = dense_density_matrix(&spec, beta, m2).unwrap();
        let s = fock_states(&spec, beta, &[m1, m2]).unwrap();
        let f = s[0].fidelity_same_beta(&s[1]).unwrap();
        // the definitional route loses digits in the square roots of tiny eigenvalues
        assert!((f - oracle_fidelity(&r1, &r2).unwrap()).abs() < 1e-8);
    }
}
