use std::collections::HashMap;

/// Occupation-number basis of one particle-number sector.
#[derive(Debug, Clone)]
pub(crate) struct Sector {
    pub n: usize,
    pub sites: usize,
    occ: Vec<u8>,
    index: HashMap<u128, u32>,
}

pub(crate) fn pack(config: &[u8]) -> u128 {
    config.iter().fold(0u128, |acc, &x| (acc << 8) | x as u128)
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of ways to put `n` bosons on `sites` modes.
pub(crate) fn sector_dim(sites: usize, n: usize) -> usize {
    binomial(n + sites - 1, sites - 1)
}

fn compositions(sites: usize, total: usize, out: &mut Vec<u8>, cur: &mut Vec<u8>) {
    if cur.len() + 1 == sites {
        cur.push(total as u8);
        out.extend_from_slice(cur);
        cur.pop();
        return;
    }
    for first in (0..=total).rev() {
        cur.push(first as u8);
        compositions(sites, total - first, out, cur);
        cur.pop();
    }
}

impl Sector {
    pub fn new(sites: usize, n: usize) -> Self {
        let mut occ = Vec::with_capacity(sector_dim(sites, n) * sites);
        compositions(sites, n, &mut occ, &mut Vec::with_capacity(sites));
        let index = occ
            .chunks(sites)
            .enumerate()
            .map(|(i, c)| (pack(c), i as u32))
            .collect();
        Self { n, sites, occ, index }
    }

    pub fn len(&self) -> usize {
        self.occ.len() / self.sites
    }

    pub fn config(&self, i: usize) -> &[u8] {
        &self.occ[i * self.sites..(i + 1) * self.sites]
    }

    pub fn find(&self, config: &[u8]) -> Option<usize> {
        self.index.get(&pack(config)).map(|&i| i as usize)
    }
}

/// Local basis of a few sites, all totals up to `n_max`, grouped by total.
#[derive(Debug, Clone)]
pub(crate) struct LocalBasis {
    pub configs: Vec<Vec<u8>>,
    ranges: Vec<(usize, usize)>,
    index: HashMap<u128, usize>,
}

impl LocalBasis {
    pub fn new(sites: usize, n_max: usize) -> Self {
        let mut configs = Vec::new();
        let mut ranges = Vec::with_capacity(n_max + 1);
        for t in 0..=n_max {
            let s = Sector::new(sites, t);
            let lo = configs.len();
            for i in 0..s.len() {
                configs.push(s.config(i).to_vec());
            }
            ranges.push((lo, configs.len()));
        }
        let index = configs.iter().enumerate().map(|(i, c)| (pack(c), i)).collect();
        Self { configs, ranges, index }
    }

    /// Index range of configurations holding exactly `total` bosons.
    pub fn range(&self, total: usize) -> (usize, usize) {
        self.ranges[total]
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn find(&self, config: &[u8]) -> Option<usize> {
        self.index.get(&pack(config)).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(sector_dim(8, 4), 330);
        assert_eq!((0..=4).map(|n| sector_dim(8, n)).sum::<usize>(), 495);
        assert_eq!(sector_dim(8, 11), 31824);
        assert_eq!(sector_dim(1, 7), 1);
        for n in 0..5 {
            let s = Sector::new(4, n);
            assert_eq!(s.len(), sector_dim(4, n));
            for i in 0..s.len() {
                assert_eq!(s.config(i).iter().map(|&x| x as usize).sum::<usize>(), n);
                assert_eq!(s.find(s.config(i)), Some(i));
            }
        }
    }

    #[test]
    fn local_basis_is_grouped_by_total() {
        let b = LocalBasis::new(2, 3);
        assert_eq!(b.len(), 1 + 2 + 3 + 4);
        let totals: Vec<u8> = b.configs.iter().map(|c| c.iter().sum()).collect();
        assert!(totals.windows(2).all(|w| w[0] <= w[1]));
    }
}
