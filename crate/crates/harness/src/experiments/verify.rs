use msmaxwell::maxwell::{
    build_structure_matrices, curl_rhs, discrete_two_form, residual_multisymplectic_form, VariationalPair,
};
use msmaxwell::msrk::{
    check_axis_conditions, check_symplectic_conditions, AxisTableauSet, ButcherTableau, MsrkSolver,
    PmlEvolutionOperator,
};
use msmaxwell::ops::{
    norm_h, verify_commutation, verify_summation_by_parts, verify_time_commutation, verify_time_product_identity,
    TimePair,
};
use msmaxwell::pml::{init_unsplit_from_fields, split_from_fields, PmlConfig};
use msmaxwell::yee::{classical_yee_step, YeeRunState, YeeSolver};
use msmaxwell::{make_grid, Axis, Boundary, Component, Field, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Status;
use crate::config::RunConfig;
use crate::error::Result;
use crate::init::random_state;

const IDENTITY_TOL: f64 = 1e-13;
const LAW_TOL: f64 = 1e-12;
const TABLEAU_TOL: f64 = 1e-15;
const LAW_STEPS: usize = 20;
const MSRK_STEPS: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    /// Expected failures do not fail the suite.
    pub fn status(&self) -> Status {
        match Status::all(self.checks.iter().map(|c| c.status)) {
            Status::Fail => Status::Fail,
            _ => Status::Pass,
        }
    }

    pub fn expected_failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::ExpectedFail).count()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            out += &format!("{:<width$}  {:>10.3e}  <= {:>8.1e}  {}\n", c.name, c.value, c.bound, c.status.label());
        }
        out += &format!("verify: {} ({} expected failures)\n", self.status().label(), self.expected_failures());
        out
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        let status = Status::from_bound(value, bound);
        self.checks.push(Check { name: name.into(), value: value.abs(), bound, status });
    }

    fn push_control(&mut self, name: impl Into<String>, value: f64, bound: f64, expect_fail: bool) {
        let status = match (Status::from_bound(value, bound), expect_fail) {
            (s, false) => s,
            (Status::Pass, true) => Status::Fail,
            (_, true) => Status::ExpectedFail,
        };
        self.checks.push(Check { name: name.into(), value: value.abs(), bound, status });
    }
}

fn random_field(g: &Grid, c: Component, rng: &mut ChaCha8Rng) -> Field<f64> {
    Field::from_fn(g, c.stagger(), |_, _, _| rng.gen_range(-1.0..1.0))
}

/// Runs the identity and conservation suite on the periodic version of the configured grid.
pub fn verify(cfg: &RunConfig) -> Result<VerifyReport> {
    let base = cfg.grid.build()?;
    let g = base.with_boundary(Boundary::Periodic);
    let mut suite = Suite { checks: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trials = cfg.verify.trials.max(1);

    let pairs = [
        (Axis::X, Component::Hy, Component::Ez),
        (Axis::Y, Component::Hz, Component::Ex),
        (Axis::Z, Component::Hx, Component::Ey),
    ];
    for (axis, a, b) in pairs {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let u = random_field(&g, a, &mut rng);
            let v = random_field(&g, b, &mut rng);
            let scale = norm_h(&g, &u) * norm_h(&g, &v) / g.spacing(axis) + 1.0;
            worst = worst.max(verify_summation_by_parts(&g, axis, &u, &v)?.abs() / scale);
        }
        suite.push(format!("summation_by_parts_{axis}"), worst, IDENTITY_TOL);
    }

    let mut worst = 0.0f64;
    for _ in 0..trials {
        let lo = random_field(&g, Component::Ez, &mut rng);
        let hi = random_field(&g, Component::Ez, &mut rng);
        let scale = (norm_h(&g, &lo).powi(2) + norm_h(&g, &hi).powi(2)) / g.dt() + 1.0;
        worst = worst.max(verify_time_product_identity(&g, TimePair::new(&lo, &hi)?)?.abs() / scale);
    }
    suite.push("time_product", worst, IDENTITY_TOL);

    let hmin = Axis::ALL.map(|a| *g.spacing(a)).into_iter().fold(f64::INFINITY, f64::min);
    for &sigma in &cfg.verify.sigmas {
        let (mut space, mut time) = (0.0f64, 0.0f64);
        for _ in 0..trials {
            let u: Vec<Field<f64>> = (0..3).map(|_| random_field(&g, Component::Hx, &mut rng)).collect();
            let amp = u.iter().map(|f| f.max_abs()).fold(1.0, f64::max);
            for axis in Axis::ALL {
                let r = verify_commutation(&g, &sigma, axis, TimePair::new(&u[0], &u[1])?)?;
                space = space.max(r.abs() * g.dt() * hmin / ((1.0 + sigma) * amp));
            }
            let r = verify_time_commutation(&g, &sigma, [&u[0], &u[1], &u[2]])?;
            time = time.max(r.abs() * g.dt() * g.dt() / ((1.0 + sigma) * amp));
        }
        suite.push(format!("commutation_space_sigma_{sigma}"), space, IDENTITY_TOL);
        suite.push(format!("commutation_time_sigma_{sigma}"), time, IDENTITY_TOL);
    }

    for name in &cfg.verify.tableaux {
        let t = ButcherTableau::<f64>::by_name(name)?;
        let expect_fail = cfg.verify.expected_fail.contains(name);
        suite.push_control(format!("tableau_{name}"), check_symplectic_conditions(&t), TABLEAU_TOL, expect_fail);
    }
    let set = AxisTableauSet {
        time: ButcherTableau::midpoint(),
        x: ButcherTableau::yee_space(),
        y: ButcherTableau::yee_space(),
        z: ButcherTableau::yee_space(),
    };
    let axis_worst = check_axis_conditions(&set).into_iter().fold(0.0, f64::max);
    suite.push("tableau_axis_set_yee", axis_worst, TABLEAU_TOL);

    let op = PmlEvolutionOperator::new(&g, &PmlConfig::lossless())?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let u = split_from_fields(&g, &PmlConfig::lossless(), &random_state(&g, rng.gen()))?.sub;
        let (_, parents) = op.ptilde_pairings(&u)?;
        worst = worst.max(parents.abs() * g.dt() / op.inner(&u, &u));
    }
    suite.push("ptilde_skew_parents", worst, IDENTITY_TOL);

    let mats = build_structure_matrices(1.0, 1.0)?;
    let skew6 = |m: &[[f64; 6]; 6]| (0..36).map(|k| (m[k / 6][k % 6] + m[k % 6][k / 6]).abs()).fold(0.0, f64::max);
    let skew = mats.k.iter().map(skew6).fold(skew6(&mats.m), f64::max);
    suite.push("structure_matrices_skew", skew, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let s = random_state(&g, rng.gen());
        let zt = curl_rhs(&g, &s)?;
        worst = worst.max(residual_multisymplectic_form(&g, &mats, &s, &zt)? / (1.0 + zt.max_abs()));
    }
    suite.push("multisymplectic_form", worst, IDENTITY_TOL);

    for &sigma in &cfg.verify.sigmas {
        let pml = PmlConfig::uniform_z(sigma);
        let solver = YeeSolver::new(&g, &pml)?;
        let mut run = YeeRunState::new(init_unsplit_from_fields(&g, &pml, &random_state(&g, rng.gen()))?);
        let mut worst = 0.0f64;
        for step in 1..=LAW_STEPS {
            solver.step(&mut run)?;
            if step >= 3 {
                let b = solver.energy_residual(&run)?;
                worst = worst.max(b.residual.abs() / b.scale());
            }
        }
        suite.push(format!("yee_energy_law_sigma_{sigma}"), worst, LAW_TOL);
    }

    let mut a = random_state(&g, rng.gen());
    let mut b = random_state(&g, rng.gen());
    let w0 = discrete_two_form(&g, VariationalPair { a: &a, b: &b })?.curl_paired;
    let mut drift = 0.0f64;
    for _ in 0..LAW_STEPS {
        classical_yee_step(&g, &mut a)?;
        classical_yee_step(&g, &mut b)?;
        let w = discrete_two_form(&g, VariationalPair { a: &a, b: &b })?.curl_paired;
        drift = drift.max((w - w0).abs() / w0.abs().max(f64::MIN_POSITIVE));
    }
    suite.push("two_form_lossless_yee", drift, LAW_TOL);

    let [nx, ny, nz] = g.counts();
    let h = Axis::ALL.map(|a| *g.spacing(a));
    let rk_grid = make_grid([nx, ny, nz], h, 0.5, Boundary::Periodic)?;
    let sigma = cfg.verify.sigmas.iter().copied().fold(0.0, f64::max);
    let pml = PmlConfig::uniform_z(sigma);
    for name in &cfg.verify.tableaux {
        let t = ButcherTableau::<f64>::by_name(name)?;
        let solver = MsrkSolver::new(&rk_grid, &pml, t, cfg.solver.stage())?;
        let mut u = split_from_fields(&rk_grid, &pml, &random_state(&rk_grid, rng.gen()))?;
        let (mut worst, mut bound) = (0.0f64, 0.0f64);
        for _ in 0..MSRK_STEPS {
            let law = solver.energy_law_residual(&solver.step(&mut u)?)?;
            worst = worst.max(law.residual.abs() / law.scale);
            bound = law.bound / law.scale;
        }
        let expect_fail = cfg.verify.expected_fail.contains(name);
        suite.push_control(format!("msrk_energy_law_{name}_sigma_{sigma}"), worst, bound, expect_fail);
    }

    Ok(VerifyReport { checks: suite.checks })
}
