use rayon::prelude::*;

use super::rows::{sort_rows, SubsystemRow, SummaryRow};
use super::{block_states, key, pool, solve_all, ExperimentConfig, Kind, Shape};
use crate::error::Result;
use crate::gaussian::{entropy, fidelity, infidelity, purity};

#[derive(Debug, Clone)]
pub struct SubsystemReport {
    pub rows: Vec<SubsystemRow>,
}

impl SubsystemReport {
    pub fn rows_for(&self, shape: Shape) -> impl Iterator<Item = &SubsystemRow> {
        self.rows.iter().filter(move |r| r.shape == shape)
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut shapes: Vec<Shape> = self.rows.iter().map(|r| r.shape).collect();
        shapes.sort();
        shapes.dedup();
        let mut out = Vec::new();
        for s in shapes {
            let min_f = self.rows_for(s).map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
            let max_p = self.rows_for(s).map(|r| r.purity).fold(f64::NEG_INFINITY, f64::max);
            out.push(SummaryRow::new(Kind::Subsystems, "min_F").value(min_f).note(s.to_string()));
            out.push(SummaryRow::new(Kind::Subsystems, "max_P").value(max_p).note(s.to_string()));
        }
        out
    }
}

/// Fidelity, purity and entropy of each block shape over the grid.
pub fn subsystem_report(cfg: &ExperimentConfig) -> Result<SubsystemReport> {
    cfg.validate()?;
    let temps = cfg.betas();
    let pool = pool(cfg.threads)?;
    let rows = pool.install(|| {
        let mut sizes = cfg.l0.clone();
        if !cfg.reuse_mu {
            for &l0 in &cfg.l0 {
                sizes.extend(cfg.lbc.sizes(l0));
            }
        }
        let mu = solve_all(&sizes, &temps, cfg.density)?;
        let tasks: Vec<(f64, f64, usize, usize)> = temps
            .iter()
            .flat_map(|&(t, b)| {
                cfg.l0.iter().flat_map(move |&l0| {
                    cfg.lbc.sizes(l0).into_iter().map(move |lbc| (t, b, l0, lbc))
                })
            })
            .collect();
        let nested = tasks
            .par_iter()
            .map(|&(t, beta, l0, lbc)| {
                let mu_l0 = mu[&key(l0, t)];
                let mu_lbc = if cfg.reuse_mu { mu_l0 } else { mu[&key(lbc, t)] };
                let big = block_states(l0, beta, mu_l0, &cfg.shapes)?;
                let small = block_states(lbc, beta, mu_lbc, &cfg.shapes)?;
                cfg.shapes
                    .iter()
                    .zip(big.iter().zip(&small))
                    .map(|(&shape, (a, b))| {
                        Ok(SubsystemRow {
                            shape,
                            t,
                            l0,
                            lbc,
                            mu_l0,
                            mu_lbc,
                            fidelity: fidelity(a, b)?,
                            infidelity: infidelity(a, b)?,
                            purity: purity(a),
                            entropy: entropy(a),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows: Vec<SubsystemRow> = nested.into_iter().flatten().collect();
        sort_rows(&mut rows);
        Ok::<_, crate::Error>(rows)
    })?;
    Ok(SubsystemReport { rows })
}
