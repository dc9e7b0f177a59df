//! Initial data on the harness grids.

use std::f64::consts::PI;

use msmaxwell::maxwell::{plane_wave, Dispersion, EmState};
use msmaxwell::{Axis, Component, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::InitialCondition;
use crate::error::{HarnessError, Result};

/// Time level of `H` relative to `E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// `H` half a step behind `E`, as the leapfrog expects.
    Staggered,
    /// `E` and `H` at the same instant, as the Runge–Kutta path expects.
    Collocated,
}

impl Sampling {
    fn h_lag(self, grid: &Grid) -> f64 {
        match self {
            Sampling::Staggered => 0.5 * grid.dt(),
            Sampling::Collocated => 0.0,
        }
    }
}

/// Unit plane wave `Ey = Hz = cos(2 pi x - 2 pi t)` at time `t`.
pub fn exact_plane_wave(grid: &Grid, t: f64, sampling: Sampling) -> Result<EmState<f64>> {
    let mut s = plane_wave(grid, t, Dispersion::Continuum)?;
    if sampling == Sampling::Collocated {
        s.h = plane_wave(grid, t + 0.5 * grid.dt(), Dispersion::Continuum)?.h;
    }
    Ok(s)
}

/// Pulse shape in absolute units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pulse {
    pub center: f64,
    pub width: f64,
    pub wavelength: f64,
}

impl Pulse {
    fn profile(&self, z: f64) -> f64 {
        let d = z - self.center;
        (-(d * d) / (self.width * self.width)).exp() * (2.0 * PI * d / self.wavelength).cos()
    }
}

/// `Ex = Hy` packet moving toward `+z`. On PEC grids the transverse profile
/// is the lowest guided mode `sin(pi y / Ly)`.
pub fn gaussian_pulse(grid: &Grid, pulse: Pulse, sampling: Sampling) -> EmState<f64> {
    let ly = grid.count(Axis::Y) as f64 * grid.spacing(Axis::Y);
    let guided = !grid.is_periodic();
    let lag = sampling.h_lag(grid);
    EmState::from_fn(grid, |c, _, j, k| {
        let s = c.stagger();
        let z = grid.coordinate(Axis::Z, s, k);
        let along = match c {
            Component::Ex => pulse.profile(z),
            Component::Hy => pulse.profile(z + lag),
            _ => return 0.0,
        };
        let across = if guided { (PI * grid.coordinate(Axis::Y, s, j) / ly).sin() } else { 1.0 };
        across * along
    })
}

pub fn random_state(grid: &Grid, seed: u64) -> EmState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EmState::from_fn(grid, |_, _, _, _| rng.gen_range(-1.0..1.0))
}

pub fn initial_state(grid: &Grid, ic: &InitialCondition, seed: u64, sampling: Sampling) -> Result<EmState<f64>> {
    match *ic {
        InitialCondition::PlaneWave => exact_plane_wave(grid, 0.0, sampling)
            .map_err(|_| HarnessError::Setup("plane_wave initial data needs a periodic grid".into())),
        InitialCondition::GaussianPulse { center, width, wavelength } => {
            let lz = grid.count(Axis::Z) as f64 * grid.spacing(Axis::Z);
            let pulse = Pulse { center: center * lz, width: width * lz, wavelength: wavelength * lz };
            Ok(gaussian_pulse(grid, pulse, sampling))
        }
        InitialCondition::Random => Ok(random_state(grid, seed)),
        InitialCondition::Zero => Ok(EmState::zeros(grid)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use msmaxwell::{make_grid, Boundary};

    #[test]
    fn random_state_is_reproducible() {
        let g = make_grid([4; 3], [0.25; 3], 0.9, Boundary::Periodic).unwrap();
        assert_eq!(random_state(&g, 9), random_state(&g, 9));
        assert_ne!(random_state(&g, 9), random_state(&g, 10));
    }

    #[test]
    fn guided_pulse_vanishes_on_side_walls() {
        let g = make_grid([2, 8, 32], [0.125; 3], 0.9, Boundary::PecWithPml).unwrap();
        let s = gaussian_pulse(&g, Pulse { center: 2.0, width: 0.5, wavelength: 1.0 }, Sampling::Staggered);
        for k in 0..32 {
            assert_eq!(*s.e[0].get(0, 0, k), 0.0);
        }
        assert!(s.e[0].max_abs() > 0.5);
        assert_eq!(s.e[2].max_abs(), 0.0);
    }

    #[test]
    fn collocated_plane_wave_samples_one_instant() {
        let g = make_grid([8; 3], [0.125; 3], 0.9, Boundary::Periodic).unwrap();
        let s = exact_plane_wave(&g, 0.0, Sampling::Collocated).unwrap();
        // Hz at x = 1/16 and Ey at x = 0 share the phase convention at t = 0.
        assert!((s.h[2].get(0, 0, 0) - (PI / 8.0).cos()).abs() < 1e-14);
        assert_eq!(*s.e[1].get(0, 0, 0), 1.0);
    }
}
