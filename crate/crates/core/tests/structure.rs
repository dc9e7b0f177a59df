use msmaxwell::maxwell::{
    discrete_two_form, energy_i, plane_wave, te_mode_embed, Dispersion, EmState, VariationalPair,
};
use msmaxwell::pml::{init_unsplit_from_fields, PmlConfig};
use msmaxwell::yee::{classical_yee_step, YeeRunState, YeeSolver};
use msmaxwell::{make_grid, Boundary, Component};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn two_form_is_conserved_by_lossless_yee() {
    let g = make_grid([8; 3], [0.125; 3], 0.9, Boundary::Periodic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut a: EmState<f64> = EmState::from_fn(&g, |_, _, _, _| rng.gen_range(-1.0..1.0));
    let mut b: EmState<f64> = EmState::from_fn(&g, |_, _, _, _| rng.gen_range(-1.0..1.0));
    let w0 = discrete_two_form(&g, VariationalPair { a: &a, b: &b }).unwrap().curl_paired;
    for _ in 0..100 {
        classical_yee_step(&g, &mut a).unwrap();
        classical_yee_step(&g, &mut b).unwrap();
        let w = discrete_two_form(&g, VariationalPair { a: &a, b: &b }).unwrap().curl_paired;
        assert!((w - w0).abs() <= 1e-12 * w0.abs());
    }
}

#[test]
fn te_subspace_is_invariant() {
    let g = make_grid([6, 5, 2], [0.2, 0.25, 0.5], 0.9, Boundary::Periodic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut draw = || (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let (ex, ey, hz) = (draw(), draw(), draw());
    let em = te_mode_embed(&g, &ex, &ey, &hz).unwrap();
    for sigma in [0.0, 0.7] {
        let cfg = PmlConfig::uniform_z(sigma);
        let solver = YeeSolver::new(&g, &cfg).unwrap();
        let mut run = YeeRunState::new(init_unsplit_from_fields(&g, &cfg, &em).unwrap());
        for _ in 0..10 {
            solver.step(&mut run).unwrap();
        }
        let p = run.current().physical();
        for c in [Component::Ez, Component::Hx, Component::Hy] {
            assert_eq!(p.component(c).max_abs(), 0.0);
        }
    }
}

#[test]
fn plane_wave_error_is_second_order() {
    let errors: Vec<f64> = (0..3)
        .map(|level| {
            let n = 8usize << level;
            let g = make_grid([n; 3], [1.0 / n as f64; 3], 0.9, Boundary::Periodic).unwrap();
            let mut s = plane_wave(&g, 0.0, Dispersion::Continuum).unwrap();
            let steps = 8 << level;
            for _ in 0..steps {
                classical_yee_step(&g, &mut s).unwrap();
            }
            let exact = plane_wave(&g, steps as f64 * g.dt(), Dispersion::Continuum).unwrap();
            assert!((energy_i(&g, &exact) - 1.0).abs() < 1e-12);
            exact.zip_fields(&s, |a, b| a.sub(b)).max_abs()
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() <= 0.15, "{order}");
    }
}
