//! Runge–Kutta time integration of the split PML system
//! `dU/dt + Sigma U = P U`, with Yee differences in space.

use std::array;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Component, StaggeredGrid3};
use crate::ops::{d_space, dot};
use crate::pml::{PmlConfig, SplitState, Sub};
use crate::scalar::{abs, max, Real, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub label: String,
}

impl<T: Real> ButcherTableau<T> {
    pub fn new(a: Vec<Vec<T>>, b: Vec<T>, label: impl Into<String>) -> Result<Self> {
        let s = b.len();
        if s == 0 || a.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidParameter(format!("tableau must be s x s with s = {s} weights")));
        }
        Ok(Self { a, b, label: label.into() })
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn midpoint() -> Self {
        Self { a: vec![vec![T::lit(0.5)]], b: vec![T::one()], label: "midpoint".into() }
    }

    pub fn gauss2() -> Self {
        let q = T::lit(0.25);
        let r = T::lit(3.0).sqrt() / T::lit(6.0);
        Self { a: vec![vec![q, q - r], vec![q + r, q]], b: vec![T::lit(0.5); 2], label: "gauss2".into() }
    }

    pub fn gauss3() -> Self {
        let r = T::lit(15.0).sqrt();
        let c = |v: f64| T::lit(v);
        let f536 = c(5.0) / c(36.0);
        let f29 = c(2.0) / c(9.0);
        Self {
            a: vec![
                vec![f536, f29 - r / c(15.0), f536 - r / c(30.0)],
                vec![f536 + r / c(24.0), f29, f536 - r / c(24.0)],
                vec![f536 + r / c(30.0), f29 + r / c(15.0), f536],
            ],
            b: vec![c(5.0) / c(18.0), c(4.0) / c(9.0), c(5.0) / c(18.0)],
            label: "gauss3".into(),
        }
    }

    /// Explicit second-order Heun method, used as a negative control.
    pub fn heun() -> Self {
        Self {
            a: vec![vec![T::zero(), T::zero()], vec![T::one(), T::zero()]],
            b: vec![T::lit(0.5); 2],
            label: "heun-nonsymplectic".into(),
        }
    }

    /// Centered staggered difference viewed as a one-stage box rule.
    pub fn yee_space() -> Self {
        Self { label: "yee-space".into(), ..Self::midpoint() }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "midpoint" => Ok(Self::midpoint()),
            "gauss2" => Ok(Self::gauss2()),
            "gauss3" => Ok(Self::gauss3()),
            "heun-nonsymplectic" | "heun" => Ok(Self::heun()),
            "yee-space" => Ok(Self::yee_space()),
            other => Err(Error::InvalidParameter(format!("unknown tableau '{other}'"))),
        }
    }

    pub const NAMES: [&'static str; 5] = ["midpoint", "gauss2", "gauss3", "heun-nonsymplectic", "yee-space"];
}

/// `max |b_m b_n - b_m a_mn - b_n a_nm|`.
pub fn check_symplectic_conditions<T: Scalar>(t: &ButcherTableau<T>) -> T {
    let s = t.b.len();
    let mut worst = T::zero();
    for m in 0..s {
        for n in 0..s {
            let v = t.b[m].clone() * t.b[n].clone()
                - t.b[m].clone() * t.a[m][n].clone()
                - t.b[n].clone() * t.a[n][m].clone();
            worst = max(worst, abs(&v));
        }
    }
    worst
}

/// One tableau for time and one per space direction.
#[derive(Clone, Debug)]
pub struct AxisTableauSet<T> {
    pub time: ButcherTableau<T>,
    pub x: ButcherTableau<T>,
    pub y: ButcherTableau<T>,
    pub z: ButcherTableau<T>,
}

/// Violations in the order time, x, y, z.
pub fn check_axis_conditions<T: Scalar>(set: &AxisTableauSet<T>) -> [T; 4] {
    [&set.time, &set.x, &set.y, &set.z].map(check_symplectic_conditions)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageSolveConfig {
    /// Increment bound relative to the discrete norm of the starting state.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for StageSolveConfig {
    fn default() -> Self {
        Self { tolerance: 1e-13, max_iterations: 200 }
    }
}

/// Sweeps run after the tolerance is met so the stages settle to rounding.
const POLISH_SWEEPS: usize = 2;

pub type SplitVector<T> = [Field<T>; 12];

/// `-Sigma U + P U` on the twelve subcomponents.
#[derive(Clone, Debug)]
pub struct PmlEvolutionOperator<T> {
    grid: StaggeredGrid3<T>,
    sigma: [Vec<T>; 12],
}

impl<T: Scalar> PmlEvolutionOperator<T> {
    pub fn new(grid: &StaggeredGrid3<T>, cfg: &PmlConfig<T>) -> Result<Self> {
        cfg.validate(grid)?;
        if !grid.is_periodic() {
            return Err(Error::InvalidGrid("the Runge-Kutta path runs on periodic grids only".into()));
        }
        let sigma = array::from_fn(|i| {
            let s = Sub::ALL[i];
            cfg.site_sigma(grid, s.axis(), s.parent().stagger(), !s.parent().is_electric())
        });
        Ok(Self { grid: grid.clone(), sigma })
    }

    pub fn grid(&self) -> &StaggeredGrid3<T> {
        &self.grid
    }

    fn parent(u: &SplitVector<T>, c: Component) -> Field<T> {
        let [a, b] = Sub::of_parent(c);
        u[a.index()].add(&u[b.index()])
    }

    /// Yee differences of the parent sums, one row per subcomponent.
    pub fn apply_ptilde(&self, u: &SplitVector<T>) -> Result<SplitVector<T>> {
        let parents: [Field<T>; 6] = Component::ALL.map(|c| Self::parent(u, c));
        let mut out = Vec::with_capacity(12);
        for s in Sub::ALL {
            let src = &parents[Component::ALL.iter().position(|&c| c == s.source()).expect("component")];
            let d = d_space(&self.grid, src, s.axis())?;
            out.push(if s.positive() { d } else { d.scaled(&-T::one()) });
        }
        Ok(out.try_into().expect("twelve rows"))
    }

    pub fn apply_sigma(&self, u: &SplitVector<T>) -> SplitVector<T> {
        array::from_fn(|i| {
            let mut f = u[i].clone();
            for (v, s) in f.as_mut_slice().iter_mut().zip(&self.sigma[i]) {
                *v = s.clone() * v.clone();
            }
            f
        })
    }

    pub fn apply(&self, u: &SplitVector<T>) -> Result<SplitVector<T>> {
        let p = self.apply_ptilde(u)?;
        let s = self.apply_sigma(u);
        Ok(array::from_fn(|i| p[i].sub(&s[i])))
    }

    /// Weighted product over all twelve subcomponents.
    pub fn inner(&self, u: &SplitVector<T>, v: &SplitVector<T>) -> T {
        let vol = self.grid.cell_volume();
        u.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + dot(a.as_slice(), b.as_slice())) * vol
    }

    /// Weighted product of the parent sums.
    pub fn inner_parents(&self, u: &SplitVector<T>, v: &SplitVector<T>) -> T {
        let vol = self.grid.cell_volume();
        Component::ALL
            .iter()
            .fold(T::zero(), |acc, &c| acc + dot(Self::parent(u, c).as_slice(), Self::parent(v, c).as_slice()))
            * vol
    }

    /// `((U, P U))` over subcomponents and over parents; only the latter vanishes.
    pub fn ptilde_pairings(&self, u: &SplitVector<T>) -> Result<(T, T)> {
        let p = self.apply_ptilde(u)?;
        Ok((self.inner(u, &p), self.inner_parents(u, &p)))
    }
}

/// Stages and endpoints of one Runge–Kutta step.
#[derive(Clone, Debug)]
pub struct StepRecord<T> {
    pub u0: SplitVector<T>,
    pub u1: SplitVector<T>,
    pub stages: Vec<SplitVector<T>>,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct MsrkSolver<T> {
    op: PmlEvolutionOperator<T>,
    tableau: ButcherTableau<T>,
    stage: StageSolveConfig,
}

impl<T: Real> MsrkSolver<T> {
    pub fn new(
        grid: &StaggeredGrid3<T>,
        cfg: &PmlConfig<T>,
        tableau: ButcherTableau<T>,
        stage: StageSolveConfig,
    ) -> Result<Self> {
        if stage.tolerance.is_nan() || stage.tolerance <= 0.0 || stage.max_iterations == 0 {
            return Err(Error::InvalidParameter("stage tolerance and iteration cap must be positive".into()));
        }
        Ok(Self { op: PmlEvolutionOperator::new(grid, cfg)?, tableau, stage })
    }

    pub fn operator(&self) -> &PmlEvolutionOperator<T> {
        &self.op
    }

    pub fn tableau(&self) -> &ButcherTableau<T> {
        &self.tableau
    }

    pub fn stage_config(&self) -> &StageSolveConfig {
        &self.stage
    }

    /// Advances `state` one step; the auxiliary offsets are left untouched.
    pub fn step(&self, state: &mut SplitState<T>) -> Result<StepRecord<T>> {
        state.check(self.op.grid())?;
        let rec = self.rk_step(&state.sub)?;
        state.sub = rec.u1.clone();
        Ok(rec)
    }

    pub fn rk_step(&self, u0: &SplitVector<T>) -> Result<StepRecord<T>> {
        let s = self.tableau.stages();
        let dt = *self.op.grid().dt();
        let scale = self.op.inner(u0, u0).sqrt().as_f64().max(f64::MIN_POSITIVE);
        let mut stages: Vec<SplitVector<T>> = vec![u0.clone(); s];
        let mut derivs: Vec<SplitVector<T>> = stages.iter().map(|u| self.op.apply(u)).collect::<Result<_>>()?;
        let mut iterations = 0;
        let mut polish = 0;
        loop {
            iterations += 1;
            let mut increment = 0.0f64;
            let mut next = Vec::with_capacity(s);
            for (row, old) in self.tableau.a.iter().zip(&stages) {
                let mut u = u0.clone();
                for (a, f) in row.iter().zip(&derivs) {
                    let c = dt * *a;
                    if c != T::zero() {
                        for (ui, fi) in u.iter_mut().zip(f) {
                            ui.axpy(&c, fi);
                        }
                    }
                }
                let diff: SplitVector<T> = array::from_fn(|i| u[i].sub(&old[i]));
                increment = increment.max(self.op.inner(&diff, &diff).sqrt().as_f64());
                next.push(u);
            }
            stages = next;
            derivs = stages.iter().map(|u| self.op.apply(u)).collect::<Result<_>>()?;
            if !increment.is_finite() {
                return Err(Error::NonFinite { field: "stage", step: iterations });
            }
            if increment <= self.stage.tolerance * scale {
                if increment == 0.0 || polish == POLISH_SWEEPS {
                    break;
                }
                polish += 1;
            } else if iterations >= self.stage.max_iterations {
                return Err(Error::StageSolve { iterations, last_increment: increment / scale });
            }
        }
        let mut u1 = u0.clone();
        for (m, f) in derivs.iter().enumerate() {
            let c = dt * self.tableau.b[m];
            for (ui, fi) in u1.iter_mut().zip(f) {
                ui.axpy(&c, fi);
            }
        }
        Ok(StepRecord { u0: u0.clone(), u1, stages, iterations })
    }

    /// Energy balance of one recorded step.
    pub fn energy_law_residual(&self, rec: &StepRecord<T>) -> Result<EnergyLaw> {
        if rec.stages.len() != self.tableau.stages() {
            return Err(Error::InvalidParameter(format!(
                "{} stages recorded for a {}-stage tableau",
                rec.stages.len(),
                self.tableau.stages()
            )));
        }
        let op = &self.op;
        let two_dt = *op.grid().dt() * T::lit(2.0);
        let mut loss = T::zero();
        let mut loss_parents = T::zero();
        for (b, u) in self.tableau.b.iter().zip(&rec.stages) {
            let su = op.apply_sigma(u);
            loss = loss + *b * op.inner(u, &su);
            loss_parents = loss_parents + *b * op.inner_parents(u, &su);
        }
        let n0 = op.inner_parents(&rec.u0, &rec.u0);
        let n1 = op.inner_parents(&rec.u1, &rec.u1);
        let residual = n1 - n0 + two_dt * loss_parents;
        let literal = op.inner(&rec.u1, &rec.u1) - op.inner(&rec.u0, &rec.u0) + two_dt * loss;
        let scale = (n0 + n1).as_f64();
        let bound = (1e-12 * scale).max(4.0 * self.stage.tolerance * scale);
        Ok(EnergyLaw {
            residual: residual.as_f64(),
            residual_subcomponents: literal.as_f64(),
            energy_before: n0.as_f64(),
            energy_after: n1.as_f64(),
            loss: (two_dt * loss_parents).as_f64(),
            scale,
            bound,
        })
    }
}

/// Energy bookkeeping of one step.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLaw {
    /// `|V1|^2 - |V0|^2 + 2 dt sum b_m ((V^m, L Sigma U^m))` on parent sums `V`.
    pub residual: f64,
    /// The same balance taken over the twelve subcomponents.
    pub residual_subcomponents: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    pub loss: f64,
    pub scale: f64,
    pub bound: f64,
}

impl EnergyLaw {
    pub fn within_bound(&self) -> bool {
        self.residual.abs() <= self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Boundary};
    use crate::maxwell::{plane_wave, Dispersion};
    use crate::pml::split_from_fields;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> StaggeredGrid3<f64> {
        make_grid([n; 3], [1.0 / n as f64; 3], 0.5, Boundary::Periodic).unwrap()
    }

    fn random_split(g: &StaggeredGrid3<f64>, seed: u64) -> SplitVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        array::from_fn(|i| Field::from_fn(g, Sub::ALL[i].parent().stagger(), |_, _, _| rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn symplectic_condition_values() {
        assert_eq!(check_symplectic_conditions(&ButcherTableau::<f64>::midpoint()), 0.0);
        assert_eq!(check_symplectic_conditions(&ButcherTableau::<f64>::heun()), 0.25);
        assert!(check_symplectic_conditions(&ButcherTableau::<f64>::gauss2()) <= 1e-16);
        assert!(check_symplectic_conditions(&ButcherTableau::<f64>::gauss3()) <= 1e-15);
        assert_eq!(check_symplectic_conditions(&ButcherTableau::<f64>::yee_space()), 0.0);
    }

    #[test]
    fn axis_conditions() {
        let m = ButcherTableau::<f64>::midpoint();
        let set = AxisTableauSet { time: m.clone(), x: m.clone(), y: m.clone(), z: m.clone() };
        assert_eq!(check_axis_conditions(&set), [0.0; 4]);
        let set = AxisTableauSet { x: ButcherTableau::heun(), ..set };
        assert_eq!(check_axis_conditions(&set), [0.0, 0.25, 0.0, 0.0]);
    }

    #[test]
    fn tableau_registry() {
        for name in ButcherTableau::<f64>::NAMES {
            let t = ButcherTableau::<f64>::by_name(name).unwrap();
            assert_eq!(t.label, name);
            let sum: f64 = t.b.iter().sum();
            assert!((sum - 1.0).abs() < 1e-15);
        }
        assert!(ButcherTableau::<f64>::by_name("rk4").is_err());
        assert!(ButcherTableau::new(vec![vec![0.5]], vec![0.5, 0.5], "bad").is_err());
    }

    #[test]
    fn ptilde_trivial_cases() {
        let g = grid(4);
        let op = PmlEvolutionOperator::new(&g, &PmlConfig::lossless()).unwrap();
        let z = SplitState::zeros(&g).sub;
        assert!(op.apply_ptilde(&z).unwrap().iter().all(|f| f.max_abs() == 0.0));
        let c: SplitVector<f64> = array::from_fn(|i| Field::constant(&g, Sub::ALL[i].parent().stagger(), 1.5));
        assert!(op.apply_ptilde(&c).unwrap().iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn ptilde_is_skew_on_parents_only() {
        let g = grid(6);
        let op = PmlEvolutionOperator::new(&g, &PmlConfig::lossless()).unwrap();
        let u = random_split(&g, 3);
        let (sub, parents) = op.ptilde_pairings(&u).unwrap();
        let scale = op.inner(&u, &u) / g.dt();
        assert!(parents.abs() <= 1e-13 * scale);
        assert!(sub.abs() > 1e-6 * scale);
    }

    #[test]
    fn sigma_selects_damped_subcomponents() {
        let g = grid(4);
        let op = PmlEvolutionOperator::new(&g, &PmlConfig::uniform_z(2.0)).unwrap();
        let ones: SplitVector<f64> = array::from_fn(|i| Field::constant(&g, Sub::ALL[i].parent().stagger(), 1.0));
        let s = op.apply_sigma(&ones);
        let damped: Vec<&str> =
            Sub::ALL.iter().filter(|sub| s[sub.index()].max_abs() != 0.0).map(|sub| sub.name()).collect();
        assert_eq!(damped, ["Exz", "Eyz", "Hxz", "Hyz"]);
    }

    #[test]
    fn rejects_non_periodic_grid() {
        let g = grid(4).with_boundary(Boundary::PecWithPml);
        assert!(PmlEvolutionOperator::new(&g, &PmlConfig::lossless()).is_err());
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = grid(4);
        let solver =
            MsrkSolver::new(&g, &PmlConfig::uniform_z(0.5), ButcherTableau::gauss2(), StageSolveConfig::default())
                .unwrap();
        let rec = solver.rk_step(&SplitState::zeros(&g).sub).unwrap();
        assert!(rec.u1.iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn uniform_subcomponent_midpoint_decay() {
        let g = StaggeredGrid3::with_dt([4; 3], [1.0; 3], 0.1, Boundary::Periodic).unwrap();
        let solver =
            MsrkSolver::new(&g, &PmlConfig::uniform_z(1.0), ButcherTableau::midpoint(), StageSolveConfig::default())
                .unwrap();
        let mut u = SplitState::zeros(&g);
        u.sub[Sub::Exz.index()] = Field::constant(&g, Component::Ex.stagger(), 1.0);
        solver.step(&mut u).unwrap();
        let want: f64 = 0.9047619047619048;
        for v in u.get(Sub::Exz).as_slice() {
            assert!((v - want).abs() <= 1e-15 * want, "{v}");
        }
    }

    #[test]
    fn explicit_tableau_converges_in_few_sweeps() {
        let g = grid(4);
        let solver =
            MsrkSolver::new(&g, &PmlConfig::lossless(), ButcherTableau::heun(), StageSolveConfig::default()).unwrap();
        let rec = solver.rk_step(&random_split(&g, 1)).unwrap();
        assert!(rec.iterations <= 3, "{}", rec.iterations);
    }

    #[test]
    fn oversized_step_reports_stage_failure() {
        let g = StaggeredGrid3::with_dt([4; 3], [0.25; 3], 2.0, Boundary::Periodic).unwrap();
        let cfg = StageSolveConfig { tolerance: 1e-13, max_iterations: 20 };
        let solver = MsrkSolver::new(&g, &PmlConfig::lossless(), ButcherTableau::midpoint(), cfg).unwrap();
        match solver.rk_step(&random_split(&g, 2)) {
            Err(Error::StageSolve { .. }) | Err(Error::NonFinite { .. }) => {}
            other => panic!("expected a stage failure, got {other:?}"),
        }
    }

    #[test]
    fn lossless_midpoint_conserves_plane_wave_energy() {
        let g = grid(8);
        let cfg = PmlConfig::lossless();
        let w = plane_wave(&g, 0.0, Dispersion::Continuum).unwrap();
        let mut u = split_from_fields(&g, &cfg, &w).unwrap();
        let solver = MsrkSolver::new(&g, &cfg, ButcherTableau::midpoint(), StageSolveConfig::default()).unwrap();
        let op = solver.operator();
        let e0 = op.inner_parents(&u.sub, &u.sub);
        for _ in 0..100 {
            let rec = solver.step(&mut u).unwrap();
            assert!(solver.energy_law_residual(&rec).unwrap().within_bound());
        }
        let e1 = op.inner_parents(&u.sub, &u.sub);
        assert!((e1 - e0).abs() <= 1e-11 * e0);
    }

    #[test]
    fn damped_energy_is_non_increasing() {
        let g = grid(4);
        let solver =
            MsrkSolver::new(&g, &PmlConfig::uniform_z(1.0), ButcherTableau::gauss2(), StageSolveConfig::default())
                .unwrap();
        let mut u = SplitState::zeros(&g);
        u.sub = random_split(&g, 8);
        let op = solver.operator();
        let mut last = op.inner_parents(&u.sub, &u.sub);
        for _ in 0..10 {
            let rec = solver.step(&mut u).unwrap();
            let law = solver.energy_law_residual(&rec).unwrap();
            assert!(law.within_bound());
            let now = op.inner_parents(&u.sub, &u.sub);
            assert!(now <= last + law.bound);
            last = now;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn energy_law_for_symplectic_tableaus(seed in any::<u64>(), sigma in prop::sample::select(vec![0.0, 0.1, 1.0, 10.0])) {
            let g = grid(4);
            for t in [ButcherTableau::midpoint(), ButcherTableau::gauss2(), ButcherTableau::gauss3()] {
                let solver = MsrkSolver::new(&g, &PmlConfig::uniform_z(sigma), t, StageSolveConfig::default()).unwrap();
                let rec = solver.rk_step(&random_split(&g, seed)).unwrap();
                let law = solver.energy_law_residual(&rec).unwrap();
                prop_assert!(law.within_bound(), "{law:?}");
            }
        }
    }
}
