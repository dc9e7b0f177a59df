use msmaxwell::maxwell::EmState;
use msmaxwell::pml::{init_unsplit_from_fields, make_layer_config, PmlConfig};
use msmaxwell::yee::{YeeRunState, YeeSolver};
use msmaxwell::{make_grid, Boundary, Component, Grid};
use serde::Serialize;

use super::Status;
use crate::config::{AbsorptionConfig, RunConfig};
use crate::error::{HarnessError, Result};
use crate::init::{gaussian_pulse, Pulse, Sampling};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThicknessRow {
    pub thickness: usize,
    /// Interior energy of the difference from the unbounded reference run,
    /// relative to the initial pulse energy.
    pub reflected: f64,
    /// Interior energy of the layered run itself, same normalization.
    pub interior: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbsorptionReport {
    pub sigma: f64,
    pub steps: usize,
    pub status: Status,
    pub rows: Vec<ThicknessRow>,
}

impl AbsorptionReport {
    pub fn reflected(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.reflected).collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "absorption sigma {} after {} steps\n{:>9} {:>12} {:>12}\n",
            self.sigma, self.steps, "thickness", "reflected", "interior"
        );
        for r in &self.rows {
            out += &format!("{:>9} {:>12.4e} {:>12.4e}\n", r.thickness, r.reflected, r.interior);
        }
        out += &format!("absorption: {}\n", self.status.label());
        out
    }
}

/// Guide of `interior` cells along z with `pad` extra cells on each side.
struct Setup<'a> {
    a: &'a AbsorptionConfig,
    h: f64,
}

impl Setup<'_> {
    fn grid(&self, pad: usize) -> Result<Grid> {
        let nz = self.a.interior + 2 * pad;
        Ok(make_grid([2, self.a.transverse, nz], [self.h; 3], 0.9, Boundary::PecWithPml)?)
    }

    fn pulse(&self, pad: usize) -> Pulse {
        Pulse {
            center: (pad as f64 + self.a.interior as f64 / 2.0) * self.h,
            width: self.a.pulse_width * self.h,
            wavelength: self.a.wavelength * self.h,
        }
    }

    /// Initial and final physical fields.
    fn evolve(&self, pad: usize, cfg: &PmlConfig<f64>) -> Result<(Grid, EmState<f64>, EmState<f64>)> {
        let grid = self.grid(pad)?;
        let em = gaussian_pulse(&grid, self.pulse(pad), Sampling::Staggered);
        let solver = YeeSolver::new(&grid, cfg)?;
        let mut run = YeeRunState::new(init_unsplit_from_fields(&grid, cfg, &em)?);
        for _ in 0..self.steps(&grid) {
            solver.step(&mut run)?;
        }
        let last = run.current().physical();
        Ok((grid, em, last))
    }

    fn steps(&self, grid: &Grid) -> usize {
        (self.a.travel as f64 * self.h / grid.dt()).ceil() as usize
    }

    /// Entries with z index in `[pad, pad + interior)`.
    fn interior<'s>(&self, grid: &'s Grid, s: &'s EmState<f64>, pad: usize) -> impl Iterator<Item = f64> + 's {
        let hi = pad + self.a.interior;
        Component::ALL.into_iter().flat_map(move |c| {
            s.component(c).as_slice().iter().enumerate().filter_map(move |(idx, v)| {
                let k = grid.coords(idx)[2];
                (pad..hi).contains(&k).then_some(*v)
            })
        })
    }
}

/// Sweeps layer thickness at fixed damping and measures what stays behind in
/// the interior once the pulse has had time to leave.
pub fn absorption(cfg: &RunConfig) -> Result<AbsorptionReport> {
    let a = &cfg.absorption;
    let setup = Setup { a, h: 1.0 / a.resolution as f64 };
    if 3.0 * a.pulse_width > a.interior as f64 / 2.0 {
        return Err(HarnessError::Setup(format!(
            "pulse of width {} cells reaches the layer from an interior of {} cells",
            a.pulse_width, a.interior
        )));
    }
    let ref_pad = a.travel / 2 + 8;
    let (rgrid, r0, r1) = setup.evolve(ref_pad, &PmlConfig::lossless())?;
    let e0: f64 = setup.interior(&rgrid, &r0, ref_pad).map(|v| v * v).sum();
    let reference: Vec<f64> = setup.interior(&rgrid, &r1, ref_pad).collect();
    let mut rows = Vec::with_capacity(a.thicknesses.len());
    for &t in &a.thicknesses {
        let grid = setup.grid(t)?;
        let layer = make_layer_config(&grid, t, a.sigma)?;
        let (grid, _, last) = setup.evolve(t, &layer)?;
        let ours: Vec<f64> = setup.interior(&grid, &last, t).collect();
        let reflected = ours.iter().zip(&reference).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / e0;
        let interior = ours.iter().map(|x| x * x).sum::<f64>() / e0;
        rows.push(ThicknessRow { thickness: t, reflected, interior });
    }
    let monotone = rows.windows(2).all(|w| w[1].reflected <= w[0].reflected);
    let status = if monotone { Status::Pass } else { Status::Fail };
    Ok(AbsorptionReport { sigma: a.sigma, steps: setup.steps(&rgrid), status, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let absorption = AbsorptionConfig {
            thicknesses: vec![2, 6],
            travel: 60,
            interior: 40,
            transverse: 8,
            pulse_width: 4.0,
            ..AbsorptionConfig::default()
        };
        RunConfig { absorption, ..RunConfig::default() }
    }

    #[test]
    fn thicker_layer_reflects_less() {
        let r = absorption(&small()).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.render());
        assert!(r.rows[1].reflected < r.rows[0].reflected);
    }

    #[test]
    fn wide_pulse_is_rejected() {
        let mut cfg = small();
        cfg.absorption.pulse_width = 10.0;
        assert!(matches!(absorption(&cfg), Err(HarnessError::Setup(_))));
    }
}
