//! Berenger split-field PML and its unsplit z-face form.
//!
//! The split system carries twelve subcomponents, each damped by the
//! conductivity of the axis it differentiates along. The unsplit form keeps
//! the six physical fields plus auxiliary copies of `Ez` and `Hz` that absorb
//! the split coupling.

use std::array;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Axis, Component, Stagger, StaggeredGrid3};
use crate::maxwell::EmState;
use crate::ops::d_space;
use crate::scalar::{half, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct PmlConfig<T> {
    /// Electric conductivities `(sigma_x, sigma_y, sigma_z)`.
    pub sigma: [T; 3],
    /// Magnetic conductivities.
    pub sigma_star: [T; 3],
    /// Layer depth in cells on each face; `None` damps the whole grid.
    pub thickness: Option<usize>,
}

impl<T: Scalar> PmlConfig<T> {
    pub fn lossless() -> Self {
        Self::uniform_z(T::zero())
    }

    /// `sigma_z = sigma_z* = sigma` everywhere, other axes lossless.
    pub fn uniform_z(sigma: T) -> Self {
        Self {
            sigma: [T::zero(), T::zero(), sigma.clone()],
            sigma_star: [T::zero(), T::zero(), sigma],
            thickness: None,
        }
    }

    pub fn is_z_specialization(&self) -> bool {
        self.sigma[0] == T::zero()
            && self.sigma[1] == T::zero()
            && self.sigma_star[0] == T::zero()
            && self.sigma_star[1] == T::zero()
            && self.sigma[2] == self.sigma_star[2]
    }

    pub fn validate(&self, grid: &StaggeredGrid3<T>) -> Result<()> {
        for s in self.sigma.iter().chain(&self.sigma_star) {
            if *s < T::zero() || !s.is_finite_value() {
                return Err(Error::InvalidParameter(format!("conductivity must be finite and >= 0, got {s:?}")));
            }
        }
        if let Some(t) = self.thickness {
            if t == 0 {
                return Err(Error::InvalidParameter("layer thickness must be at least one cell".into()));
            }
            for axis in Axis::ALL {
                let active = self.sigma[axis.index()] != T::zero() || self.sigma_star[axis.index()] != T::zero();
                if active && 2 * t >= grid.count(axis) {
                    return Err(Error::InvalidParameter(format!(
                        "layer thickness {t} leaves no interior along {axis} ({} cells)",
                        grid.count(axis)
                    )));
                }
            }
        }
        Ok(())
    }

    fn require_z(&self) -> Result<()> {
        if self.is_z_specialization() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("unsplit form needs sigma on the z axis only with sigma_star = sigma".into()))
        }
    }

    /// Conductivity of `axis` at every entry of a field with the given stagger.
    pub fn site_sigma(&self, grid: &StaggeredGrid3<T>, axis: Axis, stagger: Stagger, magnetic: bool) -> Vec<T> {
        let s = if magnetic { &self.sigma_star } else { &self.sigma }[axis.index()].clone();
        let n = grid.count(axis);
        let half_site = usize::from(stagger.is_half(axis));
        (0..grid.len())
            .map(|idx| match self.thickness {
                None => s.clone(),
                Some(t) => {
                    // Coordinates in half-cell units.
                    let c2 = 2 * grid.coords(idx)[axis.index()] + half_site;
                    if c2 < 2 * t || c2 > 2 * (n - t) {
                        s.clone()
                    } else {
                        T::zero()
                    }
                }
            })
            .collect()
    }

    /// `sigma * dt / 2` per entry.
    pub(crate) fn site_damping(
        &self,
        grid: &StaggeredGrid3<T>,
        axis: Axis,
        stagger: Stagger,
        magnetic: bool,
    ) -> Vec<T> {
        let c = grid.dt().clone() * half::<T>();
        self.site_sigma(grid, axis, stagger, magnetic).into_iter().map(|s| s * c.clone()).collect()
    }
}

/// Outer `thickness` cells on both z faces damped by `sigma`, interior lossless.
pub fn make_layer_config<T: Scalar>(grid: &StaggeredGrid3<T>, thickness: usize, sigma: T) -> Result<PmlConfig<T>> {
    if thickness == 0 {
        return Err(Error::InvalidParameter("layer thickness must be at least one cell".into()));
    }
    if 2 * thickness >= grid.count(Axis::Z) {
        return Err(Error::InvalidParameter(format!(
            "layer thickness {thickness} needs more than {} z cells",
            2 * thickness
        )));
    }
    let cfg = PmlConfig { thickness: Some(thickness), ..PmlConfig::uniform_z(sigma) };
    cfg.validate(grid)?;
    Ok(cfg)
}

/// The twelve split subcomponents in state-vector order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sub {
    Exy,
    Exz,
    Eyz,
    Eyx,
    Ezx,
    Ezy,
    Hxy,
    Hxz,
    Hyz,
    Hyx,
    Hzx,
    Hzy,
}

impl Sub {
    pub const ALL: [Sub; 12] = [
        Sub::Exy,
        Sub::Exz,
        Sub::Eyz,
        Sub::Eyx,
        Sub::Ezx,
        Sub::Ezy,
        Sub::Hxy,
        Sub::Hxz,
        Sub::Hyz,
        Sub::Hyx,
        Sub::Hzx,
        Sub::Hzy,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn parent(self) -> Component {
        use Component::*;
        [Ex, Ex, Ey, Ey, Ez, Ez, Hx, Hx, Hy, Hy, Hz, Hz][self.index()]
    }

    /// Axis this subcomponent is differentiated along and damped by.
    pub fn axis(self) -> Axis {
        use Axis::*;
        [Y, Z, Z, X, X, Y, Y, Z, Z, X, X, Y][self.index()]
    }

    /// Parent field whose difference drives this subcomponent.
    pub fn source(self) -> Component {
        use Component::*;
        [Hz, Hy, Hx, Hz, Hy, Hx, Ez, Ey, Ex, Ez, Ey, Ex][self.index()]
    }

    pub fn positive(self) -> bool {
        [true, false, true, false, true, false, false, true, false, true, false, true][self.index()]
    }

    pub fn name(self) -> &'static str {
        ["Exy", "Exz", "Eyz", "Eyx", "Ezx", "Ezy", "Hxy", "Hxz", "Hyz", "Hyx", "Hzx", "Hzy"][self.index()]
    }

    /// The pair of subcomponents summing to `parent`.
    pub fn of_parent(parent: Component) -> [Sub; 2] {
        let base = 2 * parent.direction().index() + if parent.is_electric() { 0 } else { 6 };
        [Sub::ALL[base], Sub::ALL[base + 1]]
    }

    /// Subcomponent that receives the whole parent at initialization.
    pub fn seeded(parent: Component) -> Sub {
        use Component::*;
        match parent {
            Ex => Sub::Exz,
            Ey => Sub::Eyz,
            Ez => Sub::Ezx,
            Hx => Sub::Hxz,
            Hy => Sub::Hyz,
            Hz => Sub::Hzx,
        }
    }
}

/// Twelve subcomponents plus the running offsets `Ez~ - Ez` and `Hz~ - Hz`
/// of the unsplit auxiliary fields.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitState<T> {
    pub sub: [Field<T>; 12],
    pub ez_offset: Field<T>,
    pub hz_offset: Field<T>,
}

impl<T: Scalar> SplitState<T> {
    pub fn zeros(grid: &StaggeredGrid3<T>) -> Self {
        Self {
            sub: array::from_fn(|s| Field::zeros(grid, Sub::ALL[s].parent().stagger())),
            ez_offset: Field::zeros(grid, Component::Ez.stagger()),
            hz_offset: Field::zeros(grid, Component::Hz.stagger()),
        }
    }

    pub fn get(&self, s: Sub) -> &Field<T> {
        &self.sub[s.index()]
    }

    pub fn parent(&self, c: Component) -> Field<T> {
        let [a, b] = Sub::of_parent(c);
        self.get(a).add(self.get(b))
    }

    pub fn parents(&self) -> EmState<T> {
        EmState {
            e: [Component::Ex, Component::Ey, Component::Ez].map(|c| self.parent(c)),
            h: [Component::Hx, Component::Hy, Component::Hz].map(|c| self.parent(c)),
        }
    }

    pub fn check(&self, grid: &StaggeredGrid3<T>) -> Result<()> {
        for s in Sub::ALL {
            let f = self.get(s);
            f.check_grid(grid)?;
            if f.stagger() != s.parent().stagger() {
                return Err(Error::SiteMismatch(format!("{} stored at {:?}", s.name(), f.stagger())));
            }
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.sub.iter().all(Field::all_finite)
    }
}

/// Physical fields and auxiliary `Ez~`, `Hz~` of the unsplit z-face system.
#[derive(Clone, Debug, PartialEq)]
pub struct UnsplitState<T> {
    pub ex: Field<T>,
    pub ey: Field<T>,
    pub ez_star: Field<T>,
    pub ez_tilde: Field<T>,
    pub hx: Field<T>,
    pub hy: Field<T>,
    pub hz_star: Field<T>,
    pub hz_tilde: Field<T>,
}

impl<T: Scalar> UnsplitState<T> {
    pub fn physical(&self) -> EmState<T> {
        EmState {
            e: [self.ex.clone(), self.ey.clone(), self.ez_star.clone()],
            h: [self.hx.clone(), self.hy.clone(), self.hz_star.clone()],
        }
    }

    pub fn fields(&self) -> [&Field<T>; 8] {
        [&self.ex, &self.ey, &self.ez_star, &self.ez_tilde, &self.hx, &self.hy, &self.hz_star, &self.hz_tilde]
    }

    pub fn all_finite(&self) -> bool {
        self.fields().iter().all(|f| f.all_finite())
    }
}

fn offsets<T: Scalar>(
    grid: &StaggeredGrid3<T>,
    cfg: &PmlConfig<T>,
    ez: &Field<T>,
    hz: &Field<T>,
) -> (Field<T>, Field<T>) {
    let ae = cfg.site_damping(grid, Axis::Z, ez.stagger(), false);
    let ah = cfg.site_damping(grid, Axis::Z, hz.stagger(), true);
    let mut eo = ez.clone();
    for (v, a) in eo.as_mut_slice().iter_mut().zip(&ae) {
        *v = a.clone() * v.clone();
    }
    let mut ho = hz.clone();
    for (v, a) in ho.as_mut_slice().iter_mut().zip(&ah) {
        *v = -(a.clone() * v.clone());
    }
    (eo, ho)
}

/// Puts each parent entirely into its damped subcomponent.
pub fn split_from_fields<T: Scalar>(
    grid: &StaggeredGrid3<T>,
    cfg: &PmlConfig<T>,
    em: &EmState<T>,
) -> Result<SplitState<T>> {
    em.check(grid)?;
    cfg.validate(grid)?;
    let mut s = SplitState::zeros(grid);
    for c in Component::ALL {
        s.sub[Sub::seeded(c).index()] = em.component(c).clone();
    }
    let (eo, ho) = offsets(grid, cfg, &em.e[2], &em.h[2]);
    s.ez_offset = eo;
    s.hz_offset = ho;
    Ok(s)
}

/// Unsplit initial data matching [`split_from_fields`].
///
/// The auxiliary fields start at `Ez + a Ez` and `Hz - a Hz` with
/// `a = sigma dt / 2`; both reduce to copies when `sigma = 0`.
pub fn init_unsplit_from_fields<T: Scalar>(
    grid: &StaggeredGrid3<T>,
    cfg: &PmlConfig<T>,
    em: &EmState<T>,
) -> Result<UnsplitState<T>> {
    cfg.require_z()?;
    cfg.validate(grid)?;
    em.check(grid)?;
    let (eo, ho) = offsets(grid, cfg, &em.e[2], &em.h[2]);
    Ok(UnsplitState {
        ex: em.e[0].clone(),
        ey: em.e[1].clone(),
        ez_star: em.e[2].clone(),
        ez_tilde: em.e[2].add(&eo),
        hx: em.h[0].clone(),
        hy: em.h[1].clone(),
        hz_star: em.h[2].clone(),
        hz_tilde: em.h[2].add(&ho),
    })
}

/// Parent sums together with the co-evolved auxiliary fields.
pub fn split_to_unsplit<T: Scalar>(state: &SplitState<T>) -> UnsplitState<T> {
    let p = state.parents();
    let [ex, ey, ez] = p.e;
    let [hx, hy, hz] = p.h;
    UnsplitState {
        ez_tilde: ez.add(&state.ez_offset),
        hz_tilde: hz.add(&state.hz_offset),
        ex,
        ey,
        ez_star: ez,
        hx,
        hy,
        hz_star: hz,
    }
}

/// `u <- ((1 - a) u + dt r) / (1 + a)` entrywise; `a = None` is the undamped step.
pub(crate) fn damped_update<T: Scalar>(dt: &T, u: &mut Field<T>, r: &Field<T>, a: Option<&[T]>) {
    match a {
        None => {
            for (u, r) in u.as_mut_slice().iter_mut().zip(r.as_slice()) {
                *u = u.clone() + dt.clone() * r.clone();
            }
        }
        Some(a) => {
            for ((u, r), a) in u.as_mut_slice().iter_mut().zip(r.as_slice()).zip(a) {
                *u = ((T::one() - a.clone()) * u.clone() + dt.clone() * r.clone()) / (T::one() + a.clone());
            }
        }
    }
}

/// `offset += a (new + old)` entrywise, i.e. the time integral of `sigma * avg_t`.
pub(crate) fn accumulate_offset<T: Scalar>(offset: &mut Field<T>, a: &[T], old: &Field<T>, new: &Field<T>) {
    for (((o, a), p), q) in offset.as_mut_slice().iter_mut().zip(a).zip(old.as_slice()).zip(new.as_slice()) {
        *o = o.clone() + a.clone() * (q.clone() + p.clone());
    }
}

/// Planes where the tangential electric field vanishes on a PEC box.
pub(crate) fn pec_planes(c: Component) -> &'static [Axis] {
    match c {
        Component::Ex => &[Axis::Y, Axis::Z],
        Component::Ey => &[Axis::X, Axis::Z],
        Component::Ez => &[Axis::X, Axis::Y],
        _ => &[],
    }
}

/// Leapfrog stepper for the split system.
#[derive(Clone, Debug)]
pub struct SplitYee<T> {
    grid: StaggeredGrid3<T>,
    cfg: PmlConfig<T>,
    damping: [Vec<T>; 12],
    ez_damping: Vec<T>,
    hz_damping: Vec<T>,
}

impl<T: Scalar> SplitYee<T> {
    pub fn new(grid: &StaggeredGrid3<T>, cfg: &PmlConfig<T>) -> Result<Self> {
        cfg.validate(grid)?;
        let damping = array::from_fn(|i| {
            let s = Sub::ALL[i];
            cfg.site_damping(grid, s.axis(), s.parent().stagger(), !s.parent().is_electric())
        });
        Ok(Self {
            grid: grid.clone(),
            cfg: cfg.clone(),
            damping,
            ez_damping: cfg.site_damping(grid, Axis::Z, Component::Ez.stagger(), false),
            hz_damping: cfg.site_damping(grid, Axis::Z, Component::Hz.stagger(), true),
        })
    }

    pub fn grid(&self) -> &StaggeredGrid3<T> {
        &self.grid
    }

    pub fn config(&self) -> &PmlConfig<T> {
        &self.cfg
    }

    /// `(E^n, H^{n-1/2}) -> (E^{n+1}, H^{n+1/2})`.
    pub fn step(&self, state: &mut SplitState<T>) -> Result<()> {
        state.check(&self.grid)?;
        let dt = self.grid.dt().clone();
        for electric in [false, true] {
            let old_z = state.parent(if electric { Component::Ez } else { Component::Hz });
            let sources: Vec<(Sub, Field<T>)> = Sub::ALL
                .iter()
                .filter(|s| s.parent().is_electric() == electric)
                .map(|&s| Ok((s, self.rhs(state, s)?)))
                .collect::<Result<_>>()?;
            for (s, r) in sources {
                damped_update(&dt, &mut state.sub[s.index()], &r, Some(&self.damping[s.index()]));
            }
            if electric && !self.grid.is_periodic() {
                for c in [Component::Ex, Component::Ey, Component::Ez] {
                    for &axis in pec_planes(c) {
                        for s in Sub::of_parent(c) {
                            state.sub[s.index()].zero_plane(axis, 0);
                        }
                    }
                }
            }
            let new_z = state.parent(if electric { Component::Ez } else { Component::Hz });
            if electric {
                accumulate_offset(&mut state.ez_offset, &self.ez_damping, &old_z, &new_z);
            } else {
                accumulate_offset(&mut state.hz_offset, &self.hz_damping, &old_z, &new_z);
            }
        }
        if !state.all_finite() {
            return Err(Error::NonFinite { field: "split", step: 0 });
        }
        Ok(())
    }

    fn rhs(&self, state: &SplitState<T>, s: Sub) -> Result<Field<T>> {
        let d = d_space(&self.grid, &state.parent(s.source()), s.axis())?;
        Ok(if s.positive() { d } else { d.scaled(&-T::one()) })
    }
}

/// One split leapfrog step with a freshly built stepper.
pub fn step_split_yee<T: Scalar>(
    grid: &StaggeredGrid3<T>,
    cfg: &PmlConfig<T>,
    state: &mut SplitState<T>,
) -> Result<()> {
    SplitYee::new(grid, cfg)?.step(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Boundary};
    use crate::maxwell::{curl_e, curl_h};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> StaggeredGrid3<f64> {
        make_grid([n; 3], [1.0 / n as f64; 3], 0.9, Boundary::Periodic).unwrap()
    }

    fn random_em(g: &StaggeredGrid3<f64>, seed: u64) -> EmState<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        EmState::from_fn(g, |_, _, _, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn subcomponent_table_is_consistent() {
        for s in Sub::ALL {
            assert_ne!(s.parent().is_electric(), s.source().is_electric());
            assert!(Sub::of_parent(s.parent()).contains(&s));
            let site = s.source().stagger().toggled(s.axis());
            assert_eq!(site, s.parent().stagger(), "{}", s.name());
        }
        for c in Component::ALL {
            assert!(Sub::of_parent(c).contains(&Sub::seeded(c)));
        }
        let damped: Vec<_> = Sub::ALL
            .iter()
            .filter(|s| s.axis() == Axis::Z && (s.parent().direction() != Axis::Z))
            .map(|s| s.name())
            .collect();
        assert_eq!(damped, ["Exz", "Eyz", "Hxz", "Hyz"]);
    }

    #[test]
    fn layer_config_validation() {
        let g = make_grid([4, 4, 16], [1.0; 3], 0.9, Boundary::PecWithPml).unwrap();
        assert!(make_layer_config(&g, 0, 1.0).is_err());
        assert!(make_layer_config(&g, 8, 1.0).is_err());
        let cfg = make_layer_config(&g, 4, 2.0).unwrap();
        assert!(cfg.is_z_specialization());
        let s = cfg.site_sigma(&g, Axis::Z, Component::Ex.stagger(), false);
        let at = |k: usize| s[g.index(0, 0, k)];
        assert_eq!(at(3), 2.0);
        assert_eq!(at(4), 0.0);
        assert_eq!(at(12), 0.0);
        assert_eq!(at(13), 2.0);
        let bad = PmlConfig { sigma: [0.0, 0.0, -1.0], ..PmlConfig::lossless() };
        assert!(bad.validate(&g).is_err());
    }

    #[test]
    fn uniform_subcomponent_decays_geometrically() {
        let g = StaggeredGrid3::with_dt([4; 3], [1.0; 3], 0.1, Boundary::Periodic).unwrap();
        let cfg = PmlConfig::uniform_z(1.0);
        let mut s = SplitState::zeros(&g);
        s.sub[Sub::Exz.index()] = Field::constant(&g, Component::Ex.stagger(), 1.0);
        step_split_yee(&g, &cfg, &mut s).unwrap();
        let want: f64 = 0.9047619047619048;
        for v in s.get(Sub::Exz).as_slice() {
            assert!((v - want).abs() <= 1e-15 * want);
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = grid(4);
        let mut s = SplitState::zeros(&g);
        step_split_yee(&g, &PmlConfig::uniform_z(0.7), &mut s).unwrap();
        assert_eq!(s, SplitState::zeros(&g));
    }

    #[test]
    fn lossless_split_matches_plain_leapfrog() {
        let g = grid(6);
        let em = random_em(&g, 1);
        let cfg = PmlConfig::lossless();
        let mut s = split_from_fields(&g, &cfg, &em).unwrap();
        let mut e = em.e.clone();
        let mut h = em.h.clone();
        for _ in 0..5 {
            step_split_yee(&g, &cfg, &mut s).unwrap();
            let ce = curl_e(&g, &e).unwrap();
            for a in 0..3 {
                h[a].axpy(&-g.dt(), &ce[a]);
            }
            let ch = curl_h(&g, &h).unwrap();
            for a in 0..3 {
                e[a].axpy(g.dt(), &ch[a]);
            }
        }
        let p = s.parents();
        for a in 0..3 {
            assert!(crate::field::max_diff(&p.e[a], &e[a]) < 1e-13);
            assert!(crate::field::max_diff(&p.h[a], &h[a]) < 1e-13);
        }
    }

    #[test]
    fn initializers_agree_at_time_zero() {
        let g = grid(4);
        let em = random_em(&g, 2);
        for sigma in [0.0, 0.5] {
            let cfg = PmlConfig::uniform_z(sigma);
            let s = split_from_fields(&g, &cfg, &em).unwrap();
            let u = init_unsplit_from_fields(&g, &cfg, &em).unwrap();
            assert_eq!(split_to_unsplit(&s), u);
            if sigma == 0.0 {
                assert_eq!(u.ez_tilde, u.ez_star);
                assert_eq!(u.hz_tilde, u.hz_star);
            }
        }
        let z = EmState::zeros(&g);
        let u = init_unsplit_from_fields(&g, &PmlConfig::uniform_z(0.3), &z).unwrap();
        assert!(u.fields().iter().all(|f| f.max_abs() == 0.0));
        let full = PmlConfig { sigma: [0.1, 0.0, 0.3], sigma_star: [0.1, 0.0, 0.3], thickness: None };
        assert!(init_unsplit_from_fields(&g, &full, &em).is_err());
    }
}
