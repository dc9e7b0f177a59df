use msmaxwell::pml::{init_unsplit_from_fields, split_from_fields, SplitYee};
use msmaxwell::yee::YeeSolver;
use msmaxwell::{max_diff, Component};
use serde::Serialize;

use super::Status;
use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::init::{initial_state, Sampling};

pub const EQUIVALENCE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    /// Largest parent-field difference relative to the largest field value.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub max_gap: f64,
    pub status: Status,
    #[serde(skip)]
    pub rows: Vec<GapRow>,
}

impl EquivalenceReport {
    pub fn render(&self) -> String {
        format!(
            "equivalence: {} steps, max relative gap {:.3e}: {}\n",
            self.rows.len().saturating_sub(1),
            self.max_gap,
            self.status.label()
        )
    }
}

/// Co-evolves the split and unsplit formulations from matched initial data.
pub fn equivalence(cfg: &RunConfig) -> Result<EquivalenceReport> {
    let grid = cfg.grid.build()?;
    let pml = cfg.pml.build(&grid)?;
    if !pml.is_z_specialization() {
        return Err(HarnessError::Setup("equivalence needs damping on the z axis only".into()));
    }
    let em = initial_state(&grid, &cfg.ic, cfg.seed, Sampling::Staggered)?;
    let split_solver = SplitYee::new(&grid, &pml)?;
    let unsplit_solver = YeeSolver::new(&grid, &pml)?;
    let mut split = split_from_fields(&grid, &pml, &em)?;
    let mut unsplit = init_unsplit_from_fields(&grid, &pml, &em)?;
    let gap = |split: &msmaxwell::pml::SplitState<f64>, unsplit: &msmaxwell::pml::UnsplitState<f64>| {
        let phys = unsplit.physical();
        let scale = phys.max_abs().max(f64::MIN_POSITIVE);
        Component::ALL.iter().map(|&c| max_diff(&split.parent(c), phys.component(c))).fold(0.0, f64::max) / scale
    };
    let mut rows = vec![GapRow { n: 0, gap: gap(&split, &unsplit) }];
    for n in 1..=cfg.steps {
        split_solver.step(&mut split)?;
        unsplit_solver.advance(&mut unsplit)?;
        if !(split.all_finite() && unsplit.all_finite()) {
            return Err(HarnessError::Divergence { step: n, detail: "non-finite field".into() });
        }
        rows.push(GapRow { n, gap: gap(&split, &unsplit) });
    }
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(EquivalenceReport { max_gap, status: Status::from_bound(max_gap, EQUIVALENCE_TOL), rows })
}
