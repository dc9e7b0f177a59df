//! Acceptance criteria 1 to 9. Each test prints one `criterion N: PASS|FAIL` line.

use msmaxwell::maxwell::{discrete_two_form, EmState, VariationalPair};
use msmaxwell::msrk::{check_symplectic_conditions, ButcherTableau, MsrkSolver, StageSolveConfig};
use msmaxwell::pml::{init_unsplit_from_fields, split_from_fields, PmlConfig, SplitState, SplitYee, Sub};
use msmaxwell::yee::{classical_yee_step, YeeRunState, YeeSolver};
use msmaxwell::{max_diff, Boundary, Component, Exact, ExactGrid, Field, StaggeredGrid3};
use msmaxwell_harness::config::{GridConfig, InitialCondition, RunConfig, Scheme};
use msmaxwell_harness::experiments::{absorption, convergence, equivalence, run, verify};
use msmaxwell_harness::init::random_state;
use msmaxwell_harness::Status;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, what: &str, ok: bool, detail: String) {
    println!("criterion {n}: {} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn cube(n: usize, cfl: f64, sigma: f64, steps: usize) -> RunConfig {
    let mut cfg = RunConfig { steps, grid: GridConfig::cubic(n, cfl), ..RunConfig::default() };
    cfg.pml.sigma = sigma;
    cfg
}

#[test]
fn criterion_1_operator_identities() {
    let report = verify::verify(&cube(8, 0.9, 0.0, 0)).unwrap();
    let picked: Vec<_> = report
        .checks
        .iter()
        .filter(|c| {
            c.name.starts_with("summation_by_parts") || c.name == "time_product" || c.name.starts_with("commutation")
        })
        .collect();
    let ok = picked.len() == 10 && picked.iter().all(|c| c.status == Status::Pass);
    let worst = picked.iter().map(|c| c.value).fold(0.0, f64::max);
    verdict(
        1,
        "summation by parts, time product, commutation",
        ok,
        format!("{} checks, worst {worst:.2e} <= 1e-13", picked.len()),
    );
}

#[test]
fn criterion_2_yee_energy_law() {
    let mut detail = Vec::new();
    let mut ok = true;
    for sigma in [0.0, 0.5, 2.0] {
        let r = run::run(&cube(8, 0.9, sigma, 50), None).unwrap();
        let checked = r.rows.iter().filter(|row| row.residual.is_some()).count();
        let worst = r.rows.iter().filter_map(|row| Some(row.residual?.abs() / row.bound?)).fold(0.0, f64::max);
        ok &= r.violations == 0 && checked == 48;
        detail.push(format!("sigma {sigma}: {checked} steps, worst residual/bound {worst:.2e}"));
    }
    let mut cfg = cube(8, 0.9, 0.0, 1000);
    cfg.ic = InitialCondition::PlaneWave;
    let long = run::run(&cfg, None).unwrap();
    let drift = long.eps1_drift();
    ok &= drift <= 1e-12 && long.violations == 0;
    detail.push(format!("sigma 0 eps1 drift over 1000 steps {drift:.2e}"));
    verdict(2, "leapfrog energy law", ok, detail.join("; "));
}

#[test]
fn criterion_3_symplectic_conditions() {
    let good: Vec<f64> = ["midpoint", "gauss2", "gauss3"]
        .iter()
        .map(|n| check_symplectic_conditions(&ButcherTableau::<f64>::by_name(n).unwrap()))
        .collect();
    let heun = check_symplectic_conditions(&ButcherTableau::<f64>::heun());
    let ok = good.iter().all(|v| v.abs() <= 1e-15) && heun == 0.25;
    verdict(3, "tableau conditions", ok, format!("midpoint/gauss2/gauss3 {good:?}, heun {heun}"));
}

#[test]
fn criterion_4_runge_kutta_energy_law() {
    let mut detail = Vec::new();
    let mut ok = true;
    for sigma in [0.0, 0.5] {
        for name in ["midpoint", "gauss2"] {
            let mut cfg = cube(6, 0.5, sigma, 50);
            cfg.solver.scheme = Scheme::Msrk(name.into());
            cfg.solver.stage_tolerance = 1e-13;
            let r = run::run(&cfg, None).unwrap();
            let worst = r.rows.iter().filter_map(|row| Some(row.residual?.abs() / row.bound?)).fold(0.0, f64::max);
            ok &= r.violations == 0 && r.rows.len() == 51;
            detail.push(format!("{name} sigma {sigma}: worst residual/bound {worst:.2e}"));
        }
    }
    let g = GridConfig::cubic(6, 0.5).build().unwrap();
    let solver =
        MsrkSolver::new(&g, &PmlConfig::lossless(), ButcherTableau::heun(), StageSolveConfig::default()).unwrap();
    let u = split_from_fields(&g, &PmlConfig::lossless(), &random_state(&g, 1)).unwrap();
    let law = solver.energy_law_residual(&solver.rk_step(&u.sub).unwrap()).unwrap();
    let excess = law.residual.abs() / law.bound;
    ok &= excess >= 1e3;
    detail.push(format!("heun residual/bound {excess:.2e}"));
    verdict(4, "Runge-Kutta energy law", ok, detail.join("; "));
}

fn rational(num: i64, den: i64) -> Exact {
    Exact::new(BigInt::from(num), BigInt::from(den))
}

/// Largest parent difference between split and unsplit updates in exact arithmetic.
fn exact_gap(sigma: Exact, steps: usize) -> Exact {
    let g: ExactGrid =
        StaggeredGrid3::with_dt([3; 3], [Exact::one(), Exact::one(), Exact::one()], rational(1, 2), Boundary::Periodic)
            .unwrap();
    let cfg = PmlConfig::uniform_z(sigma);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let em = EmState::from_fn(&g, |_, _, _, _| rational(rng.gen_range(-8..=8), 8));
    let mut split = split_from_fields(&g, &cfg, &em).unwrap();
    let mut unsplit = init_unsplit_from_fields(&g, &cfg, &em).unwrap();
    let stepper = SplitYee::new(&g, &cfg).unwrap();
    let solver = YeeSolver::new(&g, &cfg).unwrap();
    let mut worst = Exact::zero();
    for _ in 0..steps {
        stepper.step(&mut split).unwrap();
        solver.advance(&mut unsplit).unwrap();
        let phys = unsplit.physical();
        for c in Component::ALL {
            let d = max_diff(&split.parent(c), phys.component(c));
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

#[test]
fn criterion_5_split_unsplit_equivalence() {
    let r = equivalence::equivalence(&cube(8, 0.9, 0.5, 100)).unwrap();
    let exact = exact_gap(Exact::zero(), 6);
    let ok = r.max_gap <= 1e-12 && r.rows.len() == 101 && exact.is_zero();
    verdict(
        5,
        "split against unsplit",
        ok,
        format!("sigma 0.5 gap {:.2e} over 100 steps; sigma 0 exact gap {exact}", r.max_gap),
    );
}

#[test]
fn criterion_6_two_form() {
    let g = GridConfig::cubic(8, 0.9).build().unwrap();
    let mut a = random_state(&g, 61);
    let mut b = random_state(&g, 62);
    let w0 = discrete_two_form(&g, VariationalPair { a: &a, b: &b }).unwrap().curl_paired;
    let mut drift = 0.0f64;
    for _ in 0..100 {
        classical_yee_step(&g, &mut a).unwrap();
        classical_yee_step(&g, &mut b).unwrap();
        let w = discrete_two_form(&g, VariationalPair { a: &a, b: &b }).unwrap().curl_paired;
        drift = drift.max((w - w0).abs() / w0.abs());
    }
    verdict(6, "two-form conservation", drift <= 1e-12, format!("relative drift {drift:.2e} over 100 steps"));
}

#[test]
fn criterion_7_convergence() {
    let r = convergence::convergence(&RunConfig::default()).unwrap();
    let orders = r.orders();
    let ok = r.status == Status::Pass
        && r.rows.iter().map(|x| x.n).eq([8, 16, 32])
        && orders.iter().all(|o| (o - 2.0).abs() <= 0.15);
    verdict(7, "plane-wave convergence", ok, format!("orders {orders:.3?}"));
}

#[test]
fn criterion_8_damping_factor() {
    let want: f64 = 0.9047619047619048;
    let g = StaggeredGrid3::with_dt([4; 3], [1.0; 3], 0.1, Boundary::Periodic).unwrap();
    let cfg = PmlConfig::uniform_z(1.0);
    let yee = YeeSolver::new(&g, &cfg).unwrap();
    let em = EmState::from_fn(&g, |c, _, _, _| if c == Component::Ex { 1.0 } else { 0.0 });
    let mut state = YeeRunState::new(init_unsplit_from_fields(&g, &cfg, &em).unwrap());
    yee.step(&mut state).unwrap();
    let yee_factor = *state.current().ex.get(1, 2, 3);
    let rk = MsrkSolver::new(&g, &cfg, ButcherTableau::midpoint(), StageSolveConfig::default()).unwrap();
    let mut u = SplitState::zeros(&g);
    u.sub[Sub::Exz.index()] = Field::constant(&g, Component::Ex.stagger(), 1.0);
    rk.step(&mut u).unwrap();
    let rk_factor = *u.get(Sub::Exz).get(1, 2, 3);
    let rel = |v: f64| (v - want).abs() / want;
    let ok = rel(yee_factor) <= 1e-15 && rel(rk_factor) <= 1e-15;
    verdict(
        8,
        "one-step damping factor",
        ok,
        format!("leapfrog {yee_factor:.16}, midpoint {rk_factor:.16}, want {want}"),
    );
}

#[test]
fn criterion_9_absorption() {
    let r = absorption::absorption(&RunConfig::default()).unwrap();
    let refl = r.reflected();
    let thick: Vec<usize> = r.rows.iter().map(|x| x.thickness).collect();
    let ok = thick == [2, 4, 8, 16] && refl.windows(2).all(|w| w[1] <= w[0]);
    verdict(9, "layer absorption", ok, format!("thickness {thick:?} reflected {refl:?}"));
}
