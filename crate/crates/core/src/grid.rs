//! Staggered space-time lattice.
//!
//! Every field component is stored as one dense array of `nx * ny * nz`
//! entries, x fastest. Array index `i` along an axis sits at coordinate
//! `i * h` for an integer-offset component and at `(i + 1/2) * h` for a
//! half-offset one.

use std::fmt;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Conventional safe Courant fraction for leapfrog Yee stepping.
pub const DEFAULT_CFL: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// All offsets wrap; the setting under which the discrete identities are exact.
    Periodic,
    /// Perfect electric conductor on all six faces; absorbing layers are
    /// configured separately.
    PecWithPml,
}

/// Half-offset flags per axis. `true` means the component lives at `i + 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Stagger(pub [bool; 3]);

impl Stagger {
    pub fn is_half(self, axis: Axis) -> bool {
        self.0[axis.index()]
    }

    /// The stagger a centered difference along `axis` lands on.
    pub fn toggled(self, axis: Axis) -> Stagger {
        let mut s = self.0;
        s[axis.index()] = !s[axis.index()];
        Stagger(s)
    }

    /// `true` when `self` and `other` differ exactly along `axis`.
    pub fn complementary(self, other: Stagger, axis: Axis) -> bool {
        self.toggled(axis) == other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TimeParity {
    Integer,
    HalfInteger,
}

/// The six physical field components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Ex,
    Ey,
    Ez,
    Hx,
    Hy,
    Hz,
}

impl Component {
    pub const ALL: [Component; 6] =
        [Component::Ex, Component::Ey, Component::Ez, Component::Hx, Component::Hy, Component::Hz];

    pub fn stagger(self) -> Stagger {
        match self {
            Component::Ex => Stagger([true, false, false]),
            Component::Ey => Stagger([false, true, false]),
            Component::Ez => Stagger([false, false, true]),
            Component::Hx => Stagger([false, true, true]),
            Component::Hy => Stagger([true, false, true]),
            Component::Hz => Stagger([true, true, false]),
        }
    }

    pub fn is_electric(self) -> bool {
        matches!(self, Component::Ex | Component::Ey | Component::Ez)
    }

    pub fn direction(self) -> Axis {
        match self {
            Component::Ex | Component::Hx => Axis::X,
            Component::Ey | Component::Hy => Axis::Y,
            Component::Ez | Component::Hz => Axis::Z,
        }
    }

    pub fn site(self) -> StaggerSite {
        StaggerSite {
            component: self,
            stagger: self.stagger(),
            parity: if self.is_electric() { TimeParity::Integer } else { TimeParity::HalfInteger },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Ex => "Ex",
            Component::Ey => "Ey",
            Component::Ez => "Ez",
            Component::Hx => "Hx",
            Component::Hy => "Hy",
            Component::Hz => "Hz",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StaggerSite {
    pub component: Component,
    pub stagger: Stagger,
    pub parity: TimeParity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaggeredGrid3<T> {
    n: [usize; 3],
    h: [T; 3],
    dt: T,
    boundary: Boundary,
}

impl<T: Scalar> StaggeredGrid3<T> {
    /// Builds a grid with an explicit time step.
    pub fn with_dt(n: [usize; 3], h: [T; 3], dt: T, boundary: Boundary) -> Result<Self> {
        if n.iter().any(|&c| c < 2) {
            return Err(Error::InvalidGrid(format!("cell counts must be >= 2, got {n:?}")));
        }
        for (v, name) in h.iter().zip(["dx", "dy", "dz"]) {
            if !(v.is_finite_value() && *v > T::zero()) {
                return Err(Error::InvalidGrid(format!("{name} must be positive and finite")));
            }
        }
        if !(dt.is_finite_value() && dt > T::zero()) {
            return Err(Error::InvalidGrid("dt must be positive and finite".into()));
        }
        Ok(Self { n, h, dt, boundary })
    }

    pub fn counts(&self) -> [usize; 3] {
        self.n
    }

    pub fn count(&self, axis: Axis) -> usize {
        self.n[axis.index()]
    }

    pub fn spacing(&self, axis: Axis) -> &T {
        &self.h[axis.index()]
    }

    pub fn dt(&self) -> &T {
        &self.dt
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Number of entries of every component array.
    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weight `hx * hy * hz` of the discrete scalar product.
    pub fn cell_volume(&self) -> T {
        self.h[0].clone() * self.h[1].clone() * self.h[2].clone()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    /// Inverse of [`index`](Self::index).
    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.n[0];
        let rest = idx / self.n[0];
        [i, rest % self.n[1], rest / self.n[1]]
    }

    /// Maps a raw signed index onto `[0, n)`. Out-of-range indices are an
    /// error unless the grid is periodic.
    pub fn wrap_index(&self, axis: Axis, raw: isize) -> Result<usize> {
        let n = self.count(axis);
        match self.boundary {
            Boundary::Periodic => Ok(raw.rem_euclid(n as isize) as usize),
            Boundary::PecWithPml => {
                if raw >= 0 && (raw as usize) < n {
                    Ok(raw as usize)
                } else {
                    Err(Error::Boundary { axis, raw, count: n })
                }
            }
        }
    }

    /// Physical coordinate of array index `i` for a component with the given stagger.
    pub fn coordinate(&self, axis: Axis, stagger: Stagger, i: usize) -> T {
        let mut c = T::from_count(i);
        if stagger.is_half(axis) {
            c = c + T::lit(0.5);
        }
        c * self.spacing(axis).clone()
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self { boundary, ..self.clone() }
    }

    pub fn with_time_step(&self, dt: T) -> Result<Self> {
        Self::with_dt(self.n, self.h.clone(), dt, self.boundary)
    }
}

/// Builds a grid whose time step is the given fraction of the unit-speed
/// Courant limit `1 / sqrt(1/dx^2 + 1/dy^2 + 1/dz^2)`.
pub fn make_grid<T: Real>(n: [usize; 3], h: [T; 3], cfl_fraction: T, boundary: Boundary) -> Result<StaggeredGrid3<T>> {
    if !(Float::is_finite(cfl_fraction) && cfl_fraction > T::zero() && cfl_fraction <= T::one()) {
        return Err(Error::CflOutOfRange(cfl_fraction.as_f64()));
    }
    if n.iter().any(|&c| c < 2) {
        return Err(Error::InvalidGrid(format!("cell counts must be >= 2, got {n:?}")));
    }
    if h.iter().any(|v| !(Float::is_finite(*v) && *v > T::zero())) {
        return Err(Error::InvalidGrid("spacings must be positive and finite".into()));
    }
    let inv = h.iter().fold(T::zero(), |acc, v| acc + T::one() / (*v * *v));
    let dt = cfl_fraction / inv.sqrt();
    StaggeredGrid3::with_dt(n, h, dt, boundary)
}
