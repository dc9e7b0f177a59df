//! Source-free Maxwell equations on the Yee lattice with unit material
//! constants: the curl right-hand side, the multi-symplectic structure
//! matrices, Energy I and II, the TE reduction, a plane-wave oracle and the
//! discrete 2-form.

use std::array;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Axis, Component, StaggeredGrid3};
use crate::ops::{d_space, d_time, dot, norm_sq_h, TimePair};
use crate::scalar::{half, max, Real, Scalar};

/// `E` at an integer time level together with `H` half a step earlier.
#[derive(Clone, Debug, PartialEq)]
pub struct EmState<T> {
    pub e: [Field<T>; 3],
    pub h: [Field<T>; 3],
}

const E_COMPONENTS: [Component; 3] = [Component::Ex, Component::Ey, Component::Ez];
const H_COMPONENTS: [Component; 3] = [Component::Hx, Component::Hy, Component::Hz];

impl<T: Scalar> EmState<T> {
    pub fn zeros(grid: &StaggeredGrid3<T>) -> Self {
        Self {
            e: array::from_fn(|a| Field::zeros(grid, E_COMPONENTS[a].stagger())),
            h: array::from_fn(|a| Field::zeros(grid, H_COMPONENTS[a].stagger())),
        }
    }

    /// Fills every component from `f(component, i, j, k)`.
    pub fn from_fn(grid: &StaggeredGrid3<T>, mut f: impl FnMut(Component, usize, usize, usize) -> T) -> Self {
        let e = array::from_fn(|a| {
            let c = E_COMPONENTS[a];
            Field::from_fn(grid, c.stagger(), |i, j, k| f(c, i, j, k))
        });
        let h = array::from_fn(|a| {
            let c = H_COMPONENTS[a];
            Field::from_fn(grid, c.stagger(), |i, j, k| f(c, i, j, k))
        });
        Self { e, h }
    }

    pub fn component(&self, c: Component) -> &Field<T> {
        let a = c.direction().index();
        if c.is_electric() {
            &self.e[a]
        } else {
            &self.h[a]
        }
    }

    pub fn component_mut(&mut self, c: Component) -> &mut Field<T> {
        let a = c.direction().index();
        if c.is_electric() {
            &mut self.e[a]
        } else {
            &mut self.h[a]
        }
    }

    /// Verifies shapes and Yee sites.
    pub fn check(&self, grid: &StaggeredGrid3<T>) -> Result<()> {
        for c in Component::ALL {
            let f = self.component(c);
            f.check_grid(grid)?;
            if f.stagger() != c.stagger() {
                return Err(Error::SiteMismatch(format!("{} stored at {:?}", c.name(), f.stagger())));
            }
        }
        Ok(())
    }

    pub fn map_fields(&self, f: impl Fn(&Field<T>) -> Field<T>) -> Self {
        Self { e: array::from_fn(|a| f(&self.e[a])), h: array::from_fn(|a| f(&self.h[a])) }
    }

    pub fn zip_fields(&self, other: &Self, f: impl Fn(&Field<T>, &Field<T>) -> Field<T>) -> Self {
        Self { e: array::from_fn(|a| f(&self.e[a], &other.e[a])), h: array::from_fn(|a| f(&self.h[a], &other.h[a])) }
    }

    pub fn scaled(&self, s: &T) -> Self {
        self.map_fields(|f| f.scaled(s))
    }

    pub fn max_abs(&self) -> T {
        self.e.iter().chain(&self.h).fold(T::zero(), |m, f| max(m, f.max_abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.e.iter().chain(&self.h).all(Field::all_finite)
    }
}

/// `curl H` sampled on the `E` sites.
pub fn curl_h<T: Scalar>(grid: &StaggeredGrid3<T>, h: &[Field<T>; 3]) -> Result<[Field<T>; 3]> {
    let [hx, hy, hz] = h;
    Ok([
        d_space(grid, hz, Axis::Y)?.sub(&d_space(grid, hy, Axis::Z)?),
        d_space(grid, hx, Axis::Z)?.sub(&d_space(grid, hz, Axis::X)?),
        d_space(grid, hy, Axis::X)?.sub(&d_space(grid, hx, Axis::Y)?),
    ])
}

/// `curl E` sampled on the `H` sites.
pub fn curl_e<T: Scalar>(grid: &StaggeredGrid3<T>, e: &[Field<T>; 3]) -> Result<[Field<T>; 3]> {
    let [ex, ey, ez] = e;
    Ok([
        d_space(grid, ez, Axis::Y)?.sub(&d_space(grid, ey, Axis::Z)?),
        d_space(grid, ex, Axis::Z)?.sub(&d_space(grid, ez, Axis::X)?),
        d_space(grid, ey, Axis::X)?.sub(&d_space(grid, ex, Axis::Y)?),
    ])
}

/// `(dE/dt, dH/dt) = (curl H, -curl E)`, each on the site of the field it drives.
pub fn curl_rhs<T: Scalar>(grid: &StaggeredGrid3<T>, state: &EmState<T>) -> Result<EmState<T>> {
    state.check(grid)?;
    let ce = curl_e(grid, &state.e)?;
    Ok(EmState { e: curl_h(grid, &state.h)?, h: ce.map(|f| f.scaled(&-T::one())) })
}

pub type Mat<T, const N: usize> = [[T; N]; N];

/// `M`, `K_p` and `R_p` of the multi-symplectic form `M Z_t + sum_p K_p Z_{x_p} = 0`
/// with `Z = (Hx, Hy, Hz, Ex, Ey, Ez)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureMatrices<T> {
    pub m: Mat<T, 6>,
    pub k: [Mat<T, 6>; 3],
    pub r: [Mat<T, 3>; 3],
    pub epsilon: T,
    pub mu: T,
}

fn int_mat<T: Scalar, const N: usize>(rows: [[i8; N]; N]) -> Mat<T, N> {
    rows.map(|r| r.map(|v| T::from_i8(v).expect("small integer")))
}

pub fn build_structure_matrices<T: Scalar>(epsilon: T, mu: T) -> Result<StructureMatrices<T>> {
    if !(epsilon > T::zero() && mu > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "material constants must be positive, got epsilon={epsilon:?} mu={mu:?}"
        )));
    }
    let r: [Mat<T, 3>; 3] = [
        int_mat([[0, 0, 0], [0, 0, -1], [0, 1, 0]]),
        int_mat([[0, 0, 1], [0, 0, 0], [-1, 0, 0]]),
        int_mat([[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
    ];
    let mut m: Mat<T, 6> = int_mat([[0; 6]; 6]);
    for i in 0..3 {
        m[i][i + 3] = -T::one();
        m[i + 3][i] = T::one();
    }
    let k = array::from_fn(|p| {
        let mut kp: Mat<T, 6> = int_mat([[0; 6]; 6]);
        for i in 0..3 {
            for j in 0..3 {
                kp[i][j] = r[p][i][j].clone() / epsilon.clone();
                kp[i + 3][j + 3] = r[p][i][j].clone() / mu.clone();
            }
        }
        kp
    });
    Ok(StructureMatrices { m, k, r, epsilon, mu })
}

fn z_vector<T>(s: &EmState<T>) -> [&Field<T>; 6] {
    [&s.h[0], &s.h[1], &s.h[2], &s.e[0], &s.e[1], &s.e[2]]
}

/// Max-norm of `M Z_t + sum_p K_p D_p Z`, evaluated row by row on the site
/// each row lives on.
pub fn residual_multisymplectic_form<T: Scalar>(
    grid: &StaggeredGrid3<T>,
    mats: &StructureMatrices<T>,
    state: &EmState<T>,
    z_t: &EmState<T>,
) -> Result<T> {
    state.check(grid)?;
    z_t.check(grid)?;
    let z = z_vector(state);
    let zt = z_vector(z_t);
    let dz: [[Field<T>; 6]; 3] = {
        let mut out = Vec::with_capacity(3);
        for axis in Axis::ALL {
            let mut row = Vec::with_capacity(6);
            for f in z {
                row.push(d_space(grid, f, axis)?);
            }
            out.push(row.try_into().expect("six entries"));
        }
        out.try_into().expect("three axes")
    };
    let mut worst = T::zero();
    for row in 0..6 {
        let site = z[(row + 3) % 6].stagger();
        let mut acc = Field::zeros(grid, site);
        for c in 0..6 {
            if mats.m[row][c] != T::zero() {
                add_term(&mut acc, &mats.m[row][c], zt[c])?;
            }
            for (k, d) in mats.k.iter().zip(&dz) {
                if k[row][c] != T::zero() {
                    add_term(&mut acc, &k[row][c], &d[c])?;
                }
            }
        }
        worst = max(worst, acc.max_abs());
    }
    Ok(worst)
}

fn add_term<T: Scalar>(acc: &mut Field<T>, coef: &T, f: &Field<T>) -> Result<()> {
    acc.check_compatible(f)?;
    acc.axpy(coef, f);
    Ok(())
}

/// `sum ||f||_h^2` over the six components.
pub fn energy_i<T: Scalar>(grid: &StaggeredGrid3<T>, state: &EmState<T>) -> T {
    state.e.iter().chain(&state.h).fold(T::zero(), |acc, f| acc + norm_sq_h(grid, f))
}

/// Energy I of the time difference between two consecutive states.
pub fn energy_ii<T: Scalar>(grid: &StaggeredGrid3<T>, prev: &EmState<T>, next: &EmState<T>) -> Result<T> {
    prev.check(grid)?;
    next.check(grid)?;
    let mut acc = T::zero();
    for (lo, hi) in prev.e.iter().chain(&prev.h).zip(next.e.iter().chain(&next.h)) {
        acc = acc + norm_sq_h(grid, &d_time(grid, TimePair::new(lo, hi)?)?);
    }
    Ok(acc)
}

/// Extrudes 2D `(Ex, Ey, Hz)` data, indexed `i + nx * j`, constantly along z.
pub fn te_mode_embed<T: Scalar>(grid: &StaggeredGrid3<T>, ex: &[T], ey: &[T], hz: &[T]) -> Result<EmState<T>> {
    let [nx, ny, _] = grid.counts();
    if !grid.is_periodic() {
        return Err(Error::InvalidGrid("TE embedding needs a periodic z axis".into()));
    }
    for (name, d) in [("Ex", ex), ("Ey", ey), ("Hz", hz)] {
        if d.len() != nx * ny {
            return Err(Error::ShapeMismatch(format!("{name}: expected {} entries, got {}", nx * ny, d.len())));
        }
    }
    let mut s = EmState::zeros(grid);
    s.e[0] = Field::from_fn(grid, Component::Ex.stagger(), |i, j, _| ex[i + nx * j].clone());
    s.e[1] = Field::from_fn(grid, Component::Ey.stagger(), |i, j, _| ey[i + nx * j].clone());
    s.h[2] = Field::from_fn(grid, Component::Hz.stagger(), |i, j, _| hz[i + nx * j].clone());
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dispersion {
    /// `omega = 2 pi`
    Continuum,
    /// The Yee dispersion relation `sin(omega dt / 2) / dt = sin(pi dx) / dx`.
    Discrete,
}

pub fn plane_wave_frequency<T: Real>(grid: &StaggeredGrid3<T>, dispersion: Dispersion) -> T {
    let two_pi = T::PI() + T::PI();
    match dispersion {
        Dispersion::Continuum => two_pi,
        Dispersion::Discrete => {
            let dx = *grid.spacing(Axis::X);
            let dt = *grid.dt();
            let s = dt * (T::PI() * dx).sin() / dx;
            (T::one() + T::one()) / dt * s.asin()
        }
    }
}

/// `Ey = Hz = cos(2 pi x - omega t)` on the unit periodic cube, with `E`
/// sampled at `t` and `H` at `t - dt/2`.
pub fn plane_wave<T: Real>(grid: &StaggeredGrid3<T>, t: T, dispersion: Dispersion) -> Result<EmState<T>> {
    if !grid.is_periodic() {
        return Err(Error::InvalidGrid("plane wave needs a periodic grid".into()));
    }
    let omega = plane_wave_frequency(grid, dispersion);
    let two_pi = T::PI() + T::PI();
    let th = t - *grid.dt() * half::<T>();
    let mut s = EmState::zeros(grid);
    let ey = Component::Ey.stagger();
    let hz = Component::Hz.stagger();
    s.e[1] = Field::from_fn(grid, ey, |i, _, _| (two_pi * grid.coordinate(Axis::X, ey, i) - omega * t).cos());
    s.h[2] = Field::from_fn(grid, hz, |i, _, _| (two_pi * grid.coordinate(Axis::X, hz, i) - omega * th).cos());
    Ok(s)
}

/// Two solutions of the same linear scheme.
#[derive(Clone, Copy, Debug)]
pub struct VariationalPair<'a, T> {
    pub a: &'a EmState<T>,
    pub b: &'a EmState<T>,
}

/// Values of the two candidate 2-forms for one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm<T> {
    /// `sum (E_a . curl H_b - curl H_a . E_b)` with `H` averaged to the `E` level.
    pub curl_paired: T,
    /// `sum dZ_a^T M dZ_b` with `H` averaged to the `E` level.
    pub literal: T,
}

/// Discrete 2-form of a pair of lossless Yee states held as `(E^n, H^{n-1/2})`.
///
/// `H^{n+1/2}` is recovered with one source-free half step. The curl-paired
/// value is the one the leapfrog conserves.
pub fn discrete_two_form<T: Scalar>(grid: &StaggeredGrid3<T>, pair: VariationalPair<'_, T>) -> Result<TwoForm<T>> {
    if !grid.is_periodic() {
        return Err(Error::InvalidGrid("the 2-form is only conserved on periodic grids".into()));
    }
    let abar = averaged_h(grid, pair.a)?;
    let bbar = averaged_h(grid, pair.b)?;
    let ca = curl_h(grid, &abar)?;
    let cb = curl_h(grid, &bbar)?;
    let vol = grid.cell_volume();
    let mut curl_paired = T::zero();
    let mut literal = T::zero();
    for x in 0..3 {
        curl_paired =
            curl_paired + dot(pair.a.e[x].as_slice(), cb[x].as_slice()) - dot(ca[x].as_slice(), pair.b.e[x].as_slice());
        literal =
            literal + dot(pair.a.e[x].as_slice(), bbar[x].as_slice()) - dot(abar[x].as_slice(), pair.b.e[x].as_slice());
    }
    Ok(TwoForm { curl_paired: curl_paired * vol.clone(), literal: literal * vol })
}

fn averaged_h<T: Scalar>(grid: &StaggeredGrid3<T>, s: &EmState<T>) -> Result<[Field<T>; 3]> {
    s.check(grid)?;
    let ce = curl_e(grid, &s.e)?;
    let c = grid.dt().clone() * half::<T>();
    Ok(array::from_fn(|x| {
        let mut h = s.h[x].clone();
        h.axpy(&-c.clone(), &ce[x]);
        h
    }))
}
