//! Discrete calculus on the staggered lattice: time differences and averages,
//! the damped difference `D^sigma = D_t + sigma * avg_t`, centered staggered
//! space differences, the cell-volume weighted scalar product, and residual
//! checks for summation by parts, the time-product identity and commutation
//! of `D^sigma` with the other difference operators.

use crate::error::{Error, Result};
use crate::field::{max_diff, Field};
use crate::grid::{Axis, StaggeredGrid3};
use crate::scalar::{abs, half, two, Real, Scalar};

/// Two time levels of one component, `lo` one step before `hi`.
#[derive(Debug)]
pub struct TimePair<'a, T> {
    pub lo: &'a Field<T>,
    pub hi: &'a Field<T>,
}

impl<T> Clone for TimePair<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for TimePair<'_, T> {}

impl<'a, T: Scalar> TimePair<'a, T> {
    pub fn new(lo: &'a Field<T>, hi: &'a Field<T>) -> Result<Self> {
        lo.check_compatible(hi)?;
        Ok(Self { lo, hi })
    }
}

/// `(hi - lo) / dt`
pub fn d_time<T: Scalar>(grid: &StaggeredGrid3<T>, p: TimePair<'_, T>) -> Result<Field<T>> {
    p.lo.check_compatible(p.hi)?;
    let dt = grid.dt().clone();
    Ok(p.hi.zip_map(p.lo, |h, l| (h.clone() - l.clone()) / dt.clone()))
}

/// `(hi + lo) / 2`
pub fn avg_time<T: Scalar>(p: TimePair<'_, T>) -> Result<Field<T>> {
    p.lo.check_compatible(p.hi)?;
    let h2 = half::<T>();
    Ok(p.hi.zip_map(p.lo, |h, l| (h.clone() + l.clone()) * h2.clone()))
}

/// `d_time + sigma * avg_time`, evaluated in exactly that order.
pub fn d_sigma_time<T: Scalar>(grid: &StaggeredGrid3<T>, p: TimePair<'_, T>, sigma: &T) -> Result<Field<T>> {
    if *sigma < T::zero() || !sigma.is_finite_value() {
        return Err(Error::InvalidParameter(format!("sigma must be finite and >= 0, got {sigma:?}")));
    }
    let d = d_time(grid, p)?;
    let a = avg_time(p)?;
    Ok(d.zip_map(&a, |d, a| d.clone() + sigma.clone() * a.clone()))
}

/// Centered staggered difference along `axis`.
///
/// Half-offset input maps to integer-offset output with a backward stencil
/// `(u[i] - u[i-1]) / h`; integer input maps to half-offset output with a
/// forward stencil `(u[i+1] - u[i]) / h`. Periodic grids wrap; on PEC grids
/// the missing neighbour is zero.
pub fn d_space<T: Scalar>(grid: &StaggeredGrid3<T>, u: &Field<T>, axis: Axis) -> Result<Field<T>> {
    u.check_grid(grid)?;
    let n = grid.counts();
    let na = n[axis.index()];
    let stride = match axis {
        Axis::X => 1,
        Axis::Y => n[0],
        Axis::Z => n[0] * n[1],
    };
    let h = grid.spacing(axis).clone();
    let periodic = grid.is_periodic();
    let backward = u.stagger().is_half(axis);
    let src = u.as_slice();
    let mut out = Vec::with_capacity(src.len());
    for (idx, here) in src.iter().enumerate() {
        let c = (idx / stride) % na;
        let v = if backward {
            let prev = if c > 0 {
                Some(&src[idx - stride])
            } else if periodic {
                Some(&src[idx + (na - 1) * stride])
            } else {
                None
            };
            match prev {
                Some(p) => here.clone() - p.clone(),
                None => here.clone(),
            }
        } else {
            let next = if c + 1 < na {
                Some(&src[idx + stride])
            } else if periodic {
                Some(&src[idx - (na - 1) * stride])
            } else {
                None
            };
            match next {
                Some(nx) => nx.clone() - here.clone(),
                None => T::zero() - here.clone(),
            }
        };
        out.push(v / h.clone());
    }
    Field::from_vec(grid, u.stagger().toggled(axis), out)
}

/// Cell-volume weighted scalar product, summed x fastest.
pub fn inner_h<T: Scalar>(grid: &StaggeredGrid3<T>, u: &Field<T>, v: &Field<T>) -> Result<T> {
    u.check_grid(grid)?;
    u.check_compatible(v)?;
    Ok(dot(u.as_slice(), v.as_slice()) * grid.cell_volume())
}

pub fn norm_sq_h<T: Scalar>(grid: &StaggeredGrid3<T>, u: &Field<T>) -> T {
    dot(u.as_slice(), u.as_slice()) * grid.cell_volume()
}

pub fn norm_h<T: Real>(grid: &StaggeredGrid3<T>, u: &Field<T>) -> T {
    norm_sq_h(grid, u).sqrt()
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// `|(D u, v) + (u, D v)|` for `u`, `v` complementary along `axis`.
pub fn verify_summation_by_parts<T: Scalar>(
    grid: &StaggeredGrid3<T>,
    axis: Axis,
    u: &Field<T>,
    v: &Field<T>,
) -> Result<T> {
    if !grid.is_periodic() {
        return Err(Error::InvalidParameter("summation by parts is only exact on periodic grids".into()));
    }
    if !u.stagger().complementary(v.stagger(), axis) {
        return Err(Error::SiteMismatch(format!(
            "{:?} and {:?} are not complementary along {axis}",
            u.stagger(),
            v.stagger()
        )));
    }
    let lhs = inner_h(grid, &d_space(grid, u, axis)?, v)?;
    let rhs = inner_h(grid, u, &d_space(grid, v, axis)?)?;
    Ok(abs(&(lhs + rhs)))
}

/// `|((D_t U, avg U)) - (|hi|^2 - |lo|^2) / (2 dt)|`, both sides evaluated independently.
pub fn verify_time_product_identity<T: Scalar>(grid: &StaggeredGrid3<T>, p: TimePair<'_, T>) -> Result<T> {
    let lhs = inner_h(grid, &d_time(grid, p)?, &avg_time(p)?)?;
    let rhs = (norm_sq_h(grid, p.hi) - norm_sq_h(grid, p.lo)) / (two::<T>() * grid.dt().clone());
    Ok(abs(&(lhs - rhs)))
}

/// Max-norm of `D^sigma(D_axis U) - D_axis(D^sigma U)` over a time pair.
pub fn verify_commutation<T: Scalar>(grid: &StaggeredGrid3<T>, sigma: &T, axis: Axis, p: TimePair<'_, T>) -> Result<T> {
    let dlo = d_space(grid, p.lo, axis)?;
    let dhi = d_space(grid, p.hi, axis)?;
    let first = d_sigma_time(grid, TimePair::new(&dlo, &dhi)?, sigma)?;
    let second = d_space(grid, &d_sigma_time(grid, p, sigma)?, axis)?;
    Ok(max_diff(&first, &second))
}

/// Max-norm of `D^sigma(D_t U) - D_t(D^sigma U)` over three consecutive levels.
pub fn verify_time_commutation<T: Scalar>(grid: &StaggeredGrid3<T>, sigma: &T, levels: [&Field<T>; 3]) -> Result<T> {
    let [u0, u1, u2] = levels;
    let d01 = d_time(grid, TimePair::new(u0, u1)?)?;
    let d12 = d_time(grid, TimePair::new(u1, u2)?)?;
    let first = d_sigma_time(grid, TimePair::new(&d01, &d12)?, sigma)?;
    let s01 = d_sigma_time(grid, TimePair::new(u0, u1)?, sigma)?;
    let s12 = d_sigma_time(grid, TimePair::new(u1, u2)?, sigma)?;
    let second = d_time(grid, TimePair::new(&s01, &s12)?)?;
    Ok(max_diff(&first, &second))
}
