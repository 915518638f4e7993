//! Unnormalized sector blocks `e^{−βH_N}` and the traces the oracle needs.
//!
//! Columns `e^{−βH_N}|c⟩` are built one at a time, either by a product of
//! commuting two-site gates or by dense exponentiation for small sectors.
//! A site-permutation group commuting with `H` means only one column per
//! orbit has to be propagated; the rest follow by relabelling.

use nalgebra::{DMatrix, SymmetricEigen};

use super::basis::{LocalBasis, Sector};
use super::FockSpec;
use crate::error::{Error, Result};

/// Largest sector handled by dense exponentiation.
const DENSE_LIMIT: usize = 2500;

/// A two-site piece `e_i n_i + e_j n_j − τ (b†_i b_j + b†_j b_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bond {
    pub i: usize,
    pub j: usize,
    pub ei: f64,
    pub ej: f64,
    pub hop: f64,
}

impl Bond {
    /// `exp(−β K_s)` on the pair sector with `n_i + n_j = s`, basis `n_i = 0..=s`.
    pub fn gate(&self, beta: f64, s: usize) -> DMatrix<f64> {
        let k = DMatrix::from_fn(s + 1, s + 1, |r, c| {
            if r == c {
                self.ei * r as f64 + self.ej * (s - r) as f64
            } else if r == c + 1 {
                -self.hop * ((c + 1) as f64 * (s - c) as f64).sqrt()
            } else if c == r + 1 {
                -self.hop * ((r + 1) as f64 * (s - r) as f64).sqrt()
            } else {
                0.0
            }
        });
        exp_symmetric(k, -beta)
    }
}

/// `exp(t·A)` for real symmetric `A`.
pub(crate) fn exp_symmetric(a: DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a);
    let d = eig.eigenvalues.map(|x| (t * x).exp());
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&d) * v.transpose()
}

struct BondPlan {
    members: Vec<u32>,
    /// `(offset into members, s)`; the group holds `s + 1` states ordered by `n_i`.
    groups: Vec<(u32, u8)>,
    gates: Vec<DMatrix<f64>>,
}

enum Columns {
    Gates(Vec<BondPlan>),
    Dense(DMatrix<f64>),
}

impl Columns {
    fn gates(sector: &Sector, bonds: &[Bond], beta: f64) -> Self {
        let mut buf = vec![0u8; sector.sites];
        let plans = bonds
            .iter()
            .map(|b| {
                let mut members = Vec::with_capacity(sector.len());
                let mut groups = Vec::new();
                for idx in 0..sector.len() {
                    let c = sector.config(idx);
                    if c[b.i] != 0 {
                        continue;
                    }
                    let s = c[b.j];
                    groups.push((members.len() as u32, s));
                    buf.copy_from_slice(c);
                    for t in 0..=s {
                        buf[b.i] = t;
                        buf[b.j] = s - t;
                        members.push(sector.find(&buf).expect("pair move stays in sector") as u32);
                    }
                }
                let gates = (0..=sector.n).map(|s| b.gate(beta, s)).collect();
                BondPlan { members, groups, gates }
            })
            .collect();
        Columns::Gates(plans)
    }

    fn column(&self, c: usize, out: &mut Vec<f64>, scratch: &mut Vec<f64>) {
        match self {
            Columns::Dense(m) => {
                out.clear();
                out.extend(m.column(c).iter());
            }
            Columns::Gates(plans) => {
                out.iter_mut().for_each(|x| *x = 0.0);
                out[c] = 1.0;
                for p in plans {
                    for &(start, s) in &p.groups {
                        let len = s as usize + 1;
                        let members = &p.members[start as usize..start as usize + len];
                        scratch.clear();
                        scratch.extend(members.iter().map(|&m| out[m as usize]));
                        if scratch.iter().all(|&x| x == 0.0) {
                            continue;
                        }
                        let g = &p.gates[s as usize];
                        for (r, &m) in members.iter().enumerate() {
                            let mut acc = 0.0;
                            for (k, &x) in scratch.iter().enumerate() {
                                acc += g[(r, k)] * x;
                            }
                            out[m as usize] = acc;
                        }
                    }
                }
            }
        }
    }
}

/// Matrix of `H` restricted to one sector, in that sector's basis.
pub(crate) fn sector_hamiltonian(spec: &FockSpec, sector: &Sector) -> DMatrix<f64> {
    let d = sector.len();
    let mut h = DMatrix::zeros(d, d);
    let mut buf = vec![0u8; sector.sites];
    for c in 0..d {
        for_each_h_entry(spec, sector, c, &mut buf, |r, x| h[(r, c)] += x);
    }
    h
}

/// Calls `f(r, ⟨r|H|c⟩)` for every nonzero entry of column `c`.
fn for_each_h_entry(
    spec: &FockSpec,
    sector: &Sector,
    c: usize,
    buf: &mut [u8],
    mut f: impl FnMut(usize, f64),
) {
    let conf = sector.config(c);
    let diag: f64 = conf.iter().enumerate().map(|(i, &n)| spec.h[(i, i)] * n as f64).sum();
    f(c, diag);
    for &(i, j, hij) in &spec.hops {
        // b†_i b_j moves one boson from j to i
        if conf[j] == 0 {
            continue;
        }
        buf.copy_from_slice(conf);
        let amp = ((conf[i] as f64 + 1.0) * conf[j] as f64).sqrt();
        buf[i] += 1;
        buf[j] -= 1;
        let r = sector.find(buf).expect("hop stays in sector");
        f(r, hij * amp);
    }
}

/// Traces of one sector block `e^{−βH_N}` (not normalized, no `μ` factor).
#[derive(Debug, Clone)]
pub(crate) struct SectorData {
    pub n: usize,
    pub z: f64,
    pub purity: f64,
    pub energy: f64,
    pub cov: DMatrix<f64>,
    pub nn: DMatrix<f64>,
    pub rdms: Vec<DMatrix<f64>>,
}

pub(crate) fn sector_data(
    spec: &FockSpec,
    locals: &[LocalBasis],
    beta: f64,
    n: usize,
) -> Result<SectorData> {
    let v_sites = spec.sites.len();
    let sector = Sector::new(v_sites, n);
    let dim = sector.len();
    let columns = match &spec.layers {
        Some(bonds) => Columns::gates(&sector, bonds, beta),
        None => {
            if dim > DENSE_LIMIT {
                return Err(Error::FockDimension { dim, ceiling: DENSE_LIMIT });
            }
            Columns::Dense(exp_symmetric(sector_hamiltonian(spec, &sector), -beta))
        }
    };

    let group = &spec.symmetries;
    let inverses: Vec<Vec<usize>> = group.iter().map(|g| invert(g)).collect();
    let gsize = group.len() as f64;

    let mut data = SectorData {
        n,
        z: 0.0,
        purity: 0.0,
        energy: 0.0,
        cov: DMatrix::zeros(v_sites, v_sites),
        nn: DMatrix::zeros(v_sites, v_sites),
        rdms: locals.iter().map(|l| DMatrix::zeros(l.len(), l.len())).collect(),
    };

    let mut seen = vec![false; dim];
    let mut images = Vec::with_capacity(group.len());
    let mut buf = vec![0u8; v_sites];
    let mut col = vec![0.0; dim];
    let mut scratch = Vec::new();
    let mut c_loc = DMatrix::<f64>::zeros(v_sites, v_sites);
    let mut d_loc = DMatrix::<f64>::zeros(v_sites, v_sites);

    for rep in 0..dim {
        if seen[rep] {
            continue;
        }
        images.clear();
        for g in group {
            let conf = sector.config(rep);
            for (i, &x) in conf.iter().enumerate() {
                buf[g[i]] = x;
            }
            let idx = sector.find(&buf).expect("symmetry preserves the sector");
            seen[idx] = true;
            images.push(idx);
        }
        images.sort_unstable();
        images.dedup();
        let orbit = images.len() as f64;
        let w = orbit / gsize;

        columns.column(rep, &mut col, &mut scratch);
        let conf = sector.config(rep).to_vec();
        let diag = col[rep];

        data.z += orbit * diag;
        data.purity += orbit * col.iter().map(|x| x * x).sum::<f64>();
        let mut e = 0.0;
        for_each_h_entry(spec, &sector, rep, &mut buf, |r, x| e += x * col[r]);
        data.energy += orbit * e;

        for i in 0..v_sites {
            for j in 0..v_sites {
                let (ni, nj) = (conf[i] as f64, conf[j] as f64);
                d_loc[(i, j)] = ni * nj * diag;
                c_loc[(i, j)] = if i == j {
                    ni * diag
                } else if conf[i] == 0 {
                    0.0
                } else {
                    // ⟨c| b†_i b_j |r⟩ with r = c − e_i + e_j
                    buf.copy_from_slice(&conf);
                    buf[i] -= 1;
                    buf[j] += 1;
                    let r = sector.find(&buf).expect("hop stays in sector");
                    (ni * (nj + 1.0)).sqrt() * col[r]
                };
            }
        }
        for ginv in &inverses {
            for i in 0..v_sites {
                for j in 0..v_sites {
                    data.cov[(i, j)] += w * c_loc[(ginv[i], ginv[j])];
                    data.nn[(i, j)] += w * d_loc[(ginv[i], ginv[j])];
                }
            }
        }

        for ((subset, local), rdm) in spec.subsets.iter().zip(locals).zip(data.rdms.iter_mut()) {
            for ginv in &inverses {
                let moved: Vec<usize> = subset.iter().map(|&a| ginv[a]).collect();
                let prime: Vec<u8> = moved.iter().map(|&s| conf[s]).collect();
                let col_idx = local.find(&prime).expect("local basis covers n_max");
                let total: usize = prime.iter().map(|&x| x as usize).sum();
                let (lo, hi) = local.range(total);
                for row_idx in lo..hi {
                    buf.copy_from_slice(&conf);
                    for (k, &s) in moved.iter().enumerate() {
                        buf[s] = local.configs[row_idx][k];
                    }
                    let r = sector.find(&buf).expect("local move stays in sector");
                    rdm[(row_idx, col_idx)] += w * col[r];
                }
            }
        }
    }
    Ok(data)
}

/// The whole block `e^{−βH_N}` for one sector.
pub(crate) fn block(spec: &FockSpec, sector: &Sector, beta: f64) -> Result<DMatrix<f64>> {
    let d = sector.len();
    let columns = match &spec.layers {
        Some(bonds) => Columns::gates(sector, bonds, beta),
        None => {
            if d > DENSE_LIMIT {
                return Err(Error::FockDimension { dim: d, ceiling: DENSE_LIMIT });
            }
            return Ok(exp_symmetric(sector_hamiltonian(spec, sector), -beta));
        }
    };
    let mut out = DMatrix::zeros(d, d);
    let mut col = vec![0.0; d];
    let mut scratch = Vec::new();
    for c in 0..d {
        columns.column(c, &mut col, &mut scratch);
        out.column_mut(c).copy_from_slice(&col);
    }
    Ok(out)
}

pub(crate) fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}
