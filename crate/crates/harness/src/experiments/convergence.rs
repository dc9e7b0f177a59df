use msmaxwell::maxwell::energy_i;
use msmaxwell::msrk::MsrkSolver;
use msmaxwell::pml::{split_from_fields, PmlConfig};
use msmaxwell::yee::classical_yee_step;
use serde::Serialize;

use super::Status;
use crate::config::{GridConfig, RunConfig, Scheme};
use crate::error::Result;
use crate::init::{exact_plane_wave, Sampling};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub error: f64,
    pub order: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub scheme: String,
    pub status: Status,
    pub rows: Vec<LevelRow>,
}

impl ConvergenceReport {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "convergence {}\n{:>5} {:>10} {:>12} {:>6} {:>12} {:>7}\n",
            self.scheme, "n", "h", "dt", "steps", "error", "order"
        );
        for r in &self.rows {
            let order = r.order.map_or_else(|| "-".to_string(), |o| format!("{o:.3}"));
            out +=
                &format!("{:>5} {:>10.6} {:>12.6e} {:>6} {:>12.6e} {:>7}\n", r.n, r.h, r.dt, r.steps, r.error, order);
        }
        out += &format!("convergence: {}\n", self.status.label());
        out
    }
}

/// Plane-wave refinement study on the unit periodic cube.
///
/// Leapfrog orders must sit within the tolerance of the target; Runge–Kutta
/// orders only need to reach it from above.
pub fn convergence(cfg: &RunConfig) -> Result<ConvergenceReport> {
    let c = &cfg.convergence;
    let tableau = cfg.solver.scheme.tableau();
    let mut rows: Vec<LevelRow> = Vec::with_capacity(c.levels);
    for level in 0..c.levels {
        let n = c.base << level;
        let steps = c.base_steps << level;
        let grid = GridConfig::cubic(n, cfg.grid.cfl_fraction).build()?;
        let sampling = if tableau.is_some() { Sampling::Collocated } else { Sampling::Staggered };
        let mut u = exact_plane_wave(&grid, 0.0, sampling)?;
        match &tableau {
            None => {
                for _ in 0..steps {
                    classical_yee_step(&grid, &mut u)?;
                }
            }
            Some(t) => {
                let pml = PmlConfig::lossless();
                let solver = MsrkSolver::new(&grid, &pml, t.clone(), cfg.solver.stage())?;
                let mut s = split_from_fields(&grid, &pml, &u)?;
                for _ in 0..steps {
                    solver.step(&mut s)?;
                }
                u = s.parents();
            }
        }
        let exact = exact_plane_wave(&grid, steps as f64 * grid.dt(), sampling)?;
        let error = energy_i(&grid, &exact.zip_fields(&u, |a, b| a.sub(b))).sqrt();
        let order = rows.last().map(|prev| (prev.error / error).log2());
        rows.push(LevelRow { n, h: 1.0 / n as f64, dt: *grid.dt(), steps, error, order });
    }
    let two_sided = cfg.solver.scheme == Scheme::Yee;
    let status = Status::all(rows.iter().filter_map(|r| r.order).map(|o| {
        let low = o >= c.target_order - c.tolerance;
        let high = !two_sided || o <= c.target_order + c.tolerance;
        if low && high {
            Status::Pass
        } else {
            Status::Fail
        }
    }));
    Ok(ConvergenceReport { scheme: cfg.solver.scheme.to_string(), status, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yee_two_levels_second_order() {
        let mut cfg = RunConfig::default();
        cfg.convergence.levels = 2;
        let r = convergence(&cfg).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.render());
        assert_eq!(r.rows[1].steps, 16);
    }

    #[test]
    fn midpoint_runge_kutta_reaches_second_order() {
        let mut cfg = RunConfig::default();
        cfg.convergence.levels = 2;
        cfg.grid.cfl_fraction = 0.5;
        cfg.solver.scheme = Scheme::Msrk("midpoint".into());
        let r = convergence(&cfg).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.render());
    }
}
