use crate::error::{Error, Result};
use crate::grid::{Stagger, StaggeredGrid3};
use crate::scalar::{abs, max, Scalar};

/// One dense scalar array bound to a stagger and grid shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    stagger: Stagger,
    dims: [usize; 3],
    data: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn zeros(grid: &StaggeredGrid3<T>, stagger: Stagger) -> Self {
        Self::constant(grid, stagger, T::zero())
    }

    pub fn constant(grid: &StaggeredGrid3<T>, stagger: Stagger, value: T) -> Self {
        Self { stagger, dims: grid.counts(), data: vec![value; grid.len()] }
    }

    /// Fills by array index `(i, j, k)`.
    pub fn from_fn(grid: &StaggeredGrid3<T>, stagger: Stagger, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let [nx, ny, nz] = grid.counts();
        let mut data = Vec::with_capacity(grid.len());
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { stagger, dims: grid.counts(), data }
    }

    pub fn from_vec(grid: &StaggeredGrid3<T>, stagger: Stagger, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!("expected {} entries, got {}", grid.len(), data.len())));
        }
        Ok(Self { stagger, dims: grid.counts(), data })
    }

    pub fn stagger(&self) -> Stagger {
        self.stagger
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[i + self.dims[0] * (j + self.dims[1] * k)]
    }

    pub fn check_grid(&self, grid: &StaggeredGrid3<T>) -> Result<()> {
        if self.dims != grid.counts() {
            return Err(Error::ShapeMismatch(format!("field dims {:?} vs grid {:?}", self.dims, grid.counts())));
        }
        Ok(())
    }

    /// Same dims and stagger.
    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        if self.stagger != other.stagger {
            return Err(Error::SiteMismatch(format!("{:?} vs {:?}", self.stagger, other.stagger)));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self { stagger: self.stagger, dims: self.dims, data: self.data.iter().map(f).collect() }
    }

    /// Elementwise combination; panics on incompatible shapes (callers check first).
    pub fn zip_map(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!(self.dims, other.dims, "zip_map on mismatched fields");
        Self {
            stagger: self.stagger,
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scaled(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a.clone() - b.clone())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: &T, other: &Self) {
        assert_eq!(self.dims, other.dims, "axpy on mismatched fields");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = a.clone() + s.clone() * b.clone();
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| max(m, abs(v)))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(Scalar::is_finite_value)
    }

    /// Sets every entry whose array index along `axis` is `index` to zero.
    pub fn zero_plane(&mut self, axis: crate::Axis, index: usize) {
        let [nx, ny, _] = self.dims;
        for (idx, v) in self.data.iter_mut().enumerate() {
            let c = [idx % nx, (idx / nx) % ny, idx / (nx * ny)];
            if c[axis.index()] == index {
                *v = T::zero();
            }
        }
    }
}

/// Max-norm of the difference of two fields.
pub fn max_diff<T: Scalar>(a: &Field<T>, b: &Field<T>) -> T {
    a.as_slice().iter().zip(b.as_slice()).fold(T::zero(), |m, (x, y)| max(m, abs(&(x.clone() - y.clone()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Axis, Boundary, Component};

    fn grid() -> StaggeredGrid3<f64> {
        make_grid([3, 2, 2], [1.0; 3], 0.9, Boundary::Periodic).unwrap()
    }

    #[test]
    fn layout_is_x_fastest() {
        let g = grid();
        let f = Field::from_fn(&g, Component::Ex.stagger(), |i, j, k| (i + 10 * j + 100 * k) as f64);
        assert_eq!(f.as_slice()[1], 1.0);
        assert_eq!(f.as_slice()[3], 10.0);
        assert_eq!(f.as_slice()[6], 100.0);
        assert_eq!(*f.get(2, 1, 1), 112.0);
    }

    #[test]
    fn compatibility_checks() {
        let g = grid();
        let a = Field::zeros(&g, Component::Ex.stagger());
        let b = Field::zeros(&g, Component::Hz.stagger());
        assert!(matches!(a.check_compatible(&b), Err(Error::SiteMismatch(_))));
        let other = make_grid([2, 2, 2], [1.0; 3], 0.9, Boundary::Periodic).unwrap();
        assert!(a.check_grid(&other).is_err());
        assert!(Field::from_vec(&g, Component::Ex.stagger(), vec![0.0; 5]).is_err());
    }

    #[test]
    fn arithmetic() {
        let g = grid();
        let s = Component::Ey.stagger();
        let mut a = Field::constant(&g, s, 2.0);
        let b = Field::constant(&g, s, -1.0);
        assert_eq!(a.add(&b).as_slice()[0], 1.0);
        assert_eq!(a.sub(&b).as_slice()[0], 3.0);
        a.axpy(&3.0, &b);
        assert_eq!(a.max_abs(), 1.0);
        assert_eq!(max_diff(&a, &b), 0.0);
        assert_eq!(max_diff(&a, &Field::constant(&g, s, 1.0)), 2.0);
        assert!(a.all_finite());
        a.as_mut_slice()[0] = f64::NAN;
        assert!(!a.all_finite());
    }

    #[test]
    fn zero_plane_clears_one_slice() {
        let g = grid();
        let mut f = Field::constant(&g, Component::Ez.stagger(), 1.0);
        f.zero_plane(Axis::X, 0);
        assert_eq!(*f.get(0, 1, 1), 0.0);
        assert_eq!(*f.get(1, 1, 1), 1.0);
        assert_eq!(f.as_slice().iter().filter(|v| **v == 0.0).count(), 4);
    }
}
