//! Yee leapfrog for the unsplit z-face PML system and its discrete energy law.
//!
//! The state holds `E` at integer levels and `H` half a step behind. Damped
//! components use the closed form of `D^sigma u = r`; the auxiliary fields
//! accumulate `sigma * avg_t` of their physical partners.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Axis, Component, StaggeredGrid3};
use crate::maxwell::{curl_e, curl_h, EmState};
use crate::ops::dot;
use crate::pml::{accumulate_offset, damped_update, pec_planes, PmlConfig, UnsplitState};
use crate::scalar::{abs, half, two, Scalar};

/// Snapshots kept for the energy law: levels `n-1 ..= n+2`.
pub const HISTORY: usize = 4;

/// Per-entry conductivities used by the unsplit scheme.
#[derive(Clone, Debug)]
struct Sigmas<T> {
    ex: Vec<T>,
    ey: Vec<T>,
    ez: Vec<T>,
    hx: Vec<T>,
    hy: Vec<T>,
    hz: Vec<T>,
}

impl<T: Scalar> Sigmas<T> {
    fn new(grid: &StaggeredGrid3<T>, cfg: &PmlConfig<T>) -> Self {
        let s = |c: Component| cfg.site_sigma(grid, Axis::Z, c.stagger(), !c.is_electric());
        Self {
            ex: s(Component::Ex),
            ey: s(Component::Ey),
            ez: s(Component::Ez),
            hx: s(Component::Hx),
            hy: s(Component::Hy),
            hz: s(Component::Hz),
        }
    }

    fn damping(v: &[T], dt: &T) -> Vec<T> {
        let c = dt.clone() * half::<T>();
        v.iter().map(|s| s.clone() * c.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct YeeSolver<T> {
    grid: StaggeredGrid3<T>,
    cfg: PmlConfig<T>,
    sigma: Sigmas<T>,
    damping: Sigmas<T>,
}

impl<T: Scalar> YeeSolver<T> {
    pub fn new(grid: &StaggeredGrid3<T>, cfg: &PmlConfig<T>) -> Result<Self> {
        cfg.validate(grid)?;
        if !cfg.is_z_specialization() {
            return Err(Error::InvalidParameter(
                "the unsplit Yee scheme needs sigma on the z axis only with sigma_star = sigma".into(),
            ));
        }
        let sigma = Sigmas::new(grid, cfg);
        let dt = grid.dt();
        let damping = Sigmas {
            ex: Sigmas::damping(&sigma.ex, dt),
            ey: Sigmas::damping(&sigma.ey, dt),
            ez: Sigmas::damping(&sigma.ez, dt),
            hx: Sigmas::damping(&sigma.hx, dt),
            hy: Sigmas::damping(&sigma.hy, dt),
            hz: Sigmas::damping(&sigma.hz, dt),
        };
        Ok(Self { grid: grid.clone(), cfg: cfg.clone(), sigma, damping })
    }

    pub fn grid(&self) -> &StaggeredGrid3<T> {
        &self.grid
    }

    pub fn config(&self) -> &PmlConfig<T> {
        &self.cfg
    }

    /// `(E^n, H^{n-1/2}) -> (E^{n+1}, H^{n+1/2})`: magnetic half first, then electric.
    pub fn advance(&self, s: &mut UnsplitState<T>) -> Result<()> {
        let g = &self.grid;
        let dt = g.dt();
        let neg = -T::one();

        let ce = curl_e(g, &[s.ex.clone(), s.ey.clone(), s.ez_tilde.clone()])?;
        let [cx, cy, cz] = ce.map(|f| f.scaled(&neg));
        damped_update(dt, &mut s.hx, &cx, Some(&self.damping.hx));
        damped_update(dt, &mut s.hy, &cy, Some(&self.damping.hy));
        let old = s.hz_star.clone();
        damped_update(dt, &mut s.hz_star, &cz, None);
        advance_tilde(&mut s.hz_tilde, &self.damping.hz, &old, &s.hz_star);

        let [cx, cy, cz] = curl_h(g, &[s.hx.clone(), s.hy.clone(), s.hz_tilde.clone()])?;
        damped_update(dt, &mut s.ex, &cx, Some(&self.damping.ex));
        damped_update(dt, &mut s.ey, &cy, Some(&self.damping.ey));
        let old = s.ez_star.clone();
        damped_update(dt, &mut s.ez_star, &cz, None);
        if !g.is_periodic() {
            for (f, c) in [(&mut s.ex, Component::Ex), (&mut s.ey, Component::Ey), (&mut s.ez_star, Component::Ez)] {
                for &axis in pec_planes(c) {
                    f.zero_plane(axis, 0);
                }
            }
        }
        advance_tilde(&mut s.ez_tilde, &self.damping.ez, &old, &s.ez_star);
        Ok(())
    }

    pub fn step(&self, run: &mut YeeRunState<T>) -> Result<()> {
        let mut next = run.current().clone();
        self.advance(&mut next)?;
        if !next.all_finite() {
            return Err(Error::NonFinite { field: "unsplit", step: run.steps + 1 });
        }
        run.push(next);
        Ok(())
    }

    /// Energy law at the centre of the four retained levels.
    pub fn energy_residual(&self, run: &YeeRunState<T>) -> Result<EnergyBreakdown<T>> {
        let [s0, s1, s2, s3] = run.window()?;
        self.breakdown(s0, s1, s2, s3)
    }

    /// `eps1` at the upper half level of the last three retained levels.
    pub fn eps1(&self, run: &YeeRunState<T>) -> Result<T> {
        let have = run.history.len();
        if have < 3 {
            return Err(Error::InsufficientHistory { needed: 3, have });
        }
        let h = &run.history;
        Ok(self.eps1_parts(&h[have - 3], &h[have - 2], &h[have - 1]).corrected())
    }

    pub fn dissipation_rate(&self, run: &YeeRunState<T>) -> Result<T> {
        Ok(self.energy_residual(run)?.dissipation)
    }

    fn ip(&self, a: &Field<T>, b: &Field<T>) -> T {
        dot(a.as_slice(), b.as_slice()) * self.grid.cell_volume()
    }

    /// `sum sigma_i a_i b_i`, weighted.
    fn ip_sigma(&self, sigma: &[T], a: &Field<T>, b: &Field<T>) -> T {
        let s = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .zip(sigma)
            .fold(T::zero(), |acc, ((x, y), s)| acc + s.clone() * x.clone() * y.clone());
        s * self.grid.cell_volume()
    }

    fn dt_diff(&self, lo: &Field<T>, hi: &Field<T>) -> Field<T> {
        let dt = self.grid.dt().clone();
        hi.zip_map(lo, |h, l| (h.clone() - l.clone()) / dt.clone())
    }

    fn avg(lo: &Field<T>, hi: &Field<T>) -> Field<T> {
        hi.zip_map(lo, |h, l| (h.clone() + l.clone()) * half::<T>())
    }

    fn d_sigma(&self, sigma: &[T], lo: &Field<T>, hi: &Field<T>) -> Field<T> {
        let d = self.dt_diff(lo, hi);
        let a = Self::avg(lo, hi);
        let mut out = d.clone();
        for (((o, d), a), s) in out.as_mut_slice().iter_mut().zip(d.as_slice()).zip(a.as_slice()).zip(sigma) {
            *o = d.clone() + s.clone() * a.clone();
        }
        out
    }

    /// `(u^{n+1} - u^{n-1}) / (2 dt)`
    fn centered(&self, lo: &Field<T>, hi: &Field<T>) -> Field<T> {
        let c = two::<T>() * self.grid.dt().clone();
        hi.zip_map(lo, |h, l| (h.clone() - l.clone()) / c.clone())
    }

    fn eps1_parts(&self, a: &UnsplitState<T>, b: &UnsplitState<T>, c: &UnsplitState<T>) -> Eps1Parts<T> {
        let dt2 = two::<T>() * self.grid.dt().clone();
        let sq = |f: &Field<T>| self.ip(f, f);
        let sq_s = |s: &[T], f: &Field<T>| {
            let s2: Vec<T> = s.iter().map(|v| v.clone() * v.clone()).collect();
            self.ip_sigma(&s2, f, f)
        };
        let dex = sq(&self.dt_diff(&a.ex, &b.ex));
        let dey = sq(&self.dt_diff(&a.ey, &b.ey));
        let dez = sq(&self.dt_diff(&a.ez_tilde, &b.ez_tilde));
        let aex = sq_s(&self.sigma.ex, &Self::avg(&a.ex, &b.ex));
        let aey = sq_s(&self.sigma.ey, &Self::avg(&a.ey, &b.ey));
        let gx = self.ip(&self.d_sigma(&self.sigma.hx, &b.hx, &c.hx), &self.d_sigma(&self.sigma.hx, &a.hx, &b.hx));
        let gy = self.ip(&self.d_sigma(&self.sigma.hy, &b.hy, &c.hy), &self.d_sigma(&self.sigma.hy, &a.hy, &b.hy));
        let x = self.ip(&self.dt_diff(&b.hz_tilde, &c.hz_tilde), &self.dt_diff(&a.hz_tilde, &b.hz_tilde));
        let reduced = (dex + dey + dez + aex + aey + gx + gy) / dt2.clone();
        Eps1Parts { reduced, hz_cross: x / dt2 }
    }

    fn breakdown(
        &self,
        s0: &UnsplitState<T>,
        s1: &UnsplitState<T>,
        s2: &UnsplitState<T>,
        s3: &UnsplitState<T>,
    ) -> Result<EnergyBreakdown<T>> {
        let g = &self.grid;
        let dt = g.dt().clone();
        let dt2 = two::<T>() * dt.clone();
        let up = self.eps1_parts(s1, s2, s3);
        let down = self.eps1_parts(s0, s1, s2);

        // Integer-level quantities at n.
        let ez_second = s2.ez_tilde.zip_map(&s1.ez_tilde, |p, q| p.clone() - q.clone() - q.clone());
        let ez_second = ez_second.zip_map(&s0.ez_tilde, |p, m| (p.clone() + m.clone()) / (dt.clone() * dt.clone()));
        let s1_direct = self.ip(&ez_second, &self.centered(&s0.ez_tilde, &s2.ez_tilde));

        let e_part = |sig: &[T], f0: &Field<T>, f1: &Field<T>, f2: &Field<T>| {
            let lo = self.d_sigma(sig, f0, f1);
            let hi = self.d_sigma(sig, f1, f2);
            let dd = self.d_sigma(sig, &lo, &hi);
            let cen = self.centered(f0, f2);
            (self.ip(&dd, &cen), self.ip_sigma(sig, &cen, &cen))
        };
        let (s2_direct, diss_x) = e_part(&self.sigma.ex, &s0.ex, &s1.ex, &s2.ex);
        let (s3_direct, diss_y) = e_part(&self.sigma.ey, &s0.ey, &s1.ey, &s2.ey);

        let h_part = |sig: &[T], f0: &Field<T>, f1: &Field<T>, f2: &Field<T>, f3: &Field<T>| {
            let gm = self.d_sigma(sig, f0, f1);
            let g0 = self.d_sigma(sig, f1, f2);
            let gp = self.d_sigma(sig, f2, f3);
            self.ip(&self.centered(&gm, &gp), &g0)
        };
        let s4 = h_part(&self.sigma.hx, &s0.hx, &s1.hx, &s2.hx, &s3.hx);
        let s5 = h_part(&self.sigma.hy, &s0.hy, &s1.hy, &s2.hy, &s3.hy);

        let gz = self.d_sigma(&self.sigma.hz, &s1.hz_tilde, &s2.hz_tilde);
        let q = |s: &UnsplitState<T>| -> Result<Field<T>> {
            // Dx Ey - Dy Ex on the Hz site.
            let c = curl_e(g, &[s.ex.clone(), s.ey.clone(), s.ez_star.clone()])?;
            let [_, _, z] = c;
            Ok(z)
        };
        let (q0, q1, q2) = (q(s0)?, q(s1)?, q(s2)?);
        let quarter = half::<T>() * half::<T>();
        let qq = q1.zip_map(&q0, |b, a| b.clone() + b.clone() + a.clone());
        let qq = qq.zip_map(&q2, |s, c| (s.clone() + c.clone()) * quarter.clone());
        let s6 = self.ip_sigma(&self.sigma.hz, &qq, &gz);

        let xm = self.dt_diff(&s0.hz_tilde, &s1.hz_tilde);
        let xp = self.dt_diff(&s2.hz_tilde, &s3.hz_tilde);
        let adx = self.centered(&xm, &xp);
        let s_hz = self.ip(&adx, &gz);
        let hz_loss = self.ip_sigma(&self.sigma.hz, &adx, &Self::avg(&s1.hz_tilde, &s2.hz_tilde));

        let sq = |f: &Field<T>| self.ip(f, f);
        let s1_tel = (sq(&self.dt_diff(&s1.ez_tilde, &s2.ez_tilde)) - sq(&self.dt_diff(&s0.ez_tilde, &s1.ez_tilde)))
            / dt2.clone();
        let e_tel = |sig: &[T], f0: &Field<T>, f1: &Field<T>, f2: &Field<T>, loss: &T| {
            let s2v: Vec<T> = sig.iter().map(|v| v.clone() * v.clone()).collect();
            let hi = sq(&self.dt_diff(f1, f2)) + self.ip_sigma(&s2v, &Self::avg(f1, f2), &Self::avg(f1, f2));
            let lo = sq(&self.dt_diff(f0, f1)) + self.ip_sigma(&s2v, &Self::avg(f0, f1), &Self::avg(f0, f1));
            (hi - lo) / dt2.clone() + two::<T>() * loss.clone()
        };
        let s2_tel = e_tel(&self.sigma.ex, &s0.ex, &s1.ex, &s2.ex, &diss_x);
        let s3_tel = e_tel(&self.sigma.ey, &s0.ey, &s1.ey, &s2.ey, &diss_y);

        let two_t = two::<T>();
        let dissipation_reduced = two_t.clone() * diss_x + two_t * diss_y + s6.clone();
        let dissipation = dissipation_reduced.clone() + hz_loss;
        let eps1_half_up = up.corrected();
        let eps1_half_down = down.corrected();
        let residual = eps1_half_up.clone() - eps1_half_down.clone() + dissipation.clone();
        let residual_reduced = up.reduced.clone() - down.reduced.clone() + dissipation_reduced;
        let term_sum = s1_direct.clone()
            + s2_direct.clone()
            + s3_direct.clone()
            + s4.clone()
            + s5.clone()
            + s6.clone()
            + s_hz.clone();
        Ok(EnergyBreakdown {
            s: [s1_direct, s2_direct, s3_direct, s4, s5, s6],
            s_hz,
            term_sum,
            s_telescoped: [s1_tel, s2_tel, s3_tel],
            eps1_half_up,
            eps1_half_down,
            dissipation,
            residual,
            eps1_reduced_up: up.reduced,
            eps1_reduced_down: down.reduced,
            residual_reduced,
        })
    }
}

fn advance_tilde<T: Scalar>(tilde: &mut Field<T>, a: &[T], old: &Field<T>, new: &Field<T>) {
    let mut offset = tilde.sub(old);
    accumulate_offset(&mut offset, a, old, new);
    *tilde = new.add(&offset);
}

struct Eps1Parts<T> {
    reduced: T,
    hz_cross: T,
}

impl<T: Scalar> Eps1Parts<T> {
    fn corrected(&self) -> T {
        self.reduced.clone() + self.hz_cross.clone()
    }
}

/// Terms of the discrete energy law at one centre level `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyBreakdown<T> {
    /// `S1 .. S6` evaluated directly from the fields.
    pub s: [T; 6],
    /// `(avg_t D_t^2 Hz~, D^sigma Hz~)`, the auxiliary magnetic term.
    pub s_hz: T,
    /// `S1 + .. + S6 + s_hz`, zero up to rounding.
    pub term_sum: T,
    /// `S1`, `S2`, `S3` in telescoped form.
    pub s_telescoped: [T; 3],
    pub eps1_half_up: T,
    pub eps1_half_down: T,
    /// Non-telescoping loss terms.
    pub dissipation: T,
    /// `eps1^{n+1/2} - eps1^{n-1/2} + dissipation`.
    pub residual: T,
    /// `eps1` without the `Hz~` cross term.
    pub eps1_reduced_up: T,
    pub eps1_reduced_down: T,
    /// The law with both `Hz~` contributions dropped.
    pub residual_reduced: T,
}

impl<T: Scalar> EnergyBreakdown<T> {
    /// `|eps1^{n+1/2}| + |eps1^{n-1/2}| + 1`.
    pub fn scale(&self) -> T {
        abs(&self.eps1_half_up) + abs(&self.eps1_half_down) + T::one()
    }

    /// Sum of magnitudes of the terms that cancel in `term_sum`.
    pub fn term_scale(&self) -> T {
        self.s.iter().fold(abs(&self.s_hz), |acc, v| acc + abs(v))
    }
}

/// Current state with the last [`HISTORY`] levels, oldest first.
#[derive(Clone, Debug)]
pub struct YeeRunState<T> {
    history: VecDeque<UnsplitState<T>>,
    steps: usize,
}

impl<T: Scalar> YeeRunState<T> {
    pub fn new(initial: UnsplitState<T>) -> Self {
        let mut history = VecDeque::with_capacity(HISTORY);
        history.push_back(initial);
        Self { history, steps: 0 }
    }

    pub fn current(&self) -> &UnsplitState<T> {
        self.history.back().expect("history is never empty")
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn history(&self) -> impl Iterator<Item = &UnsplitState<T>> {
        self.history.iter()
    }

    fn push(&mut self, s: UnsplitState<T>) {
        if self.history.len() == HISTORY {
            self.history.pop_front();
        }
        self.history.push_back(s);
        self.steps += 1;
    }

    fn window(&self) -> Result<[&UnsplitState<T>; 4]> {
        if self.history.len() < HISTORY {
            return Err(Error::InsufficientHistory { needed: HISTORY, have: self.history.len() });
        }
        let h = &self.history;
        Ok([&h[0], &h[1], &h[2], &h[3]])
    }

    /// Level index of the centre used by [`YeeSolver::energy_residual`].
    pub fn centre_level(&self) -> Option<usize> {
        (self.history.len() == HISTORY).then(|| self.steps - 2)
    }
}

/// Source-free leapfrog on the six physical fields.
pub fn classical_yee_step<T: Scalar>(grid: &StaggeredGrid3<T>, s: &mut EmState<T>) -> Result<()> {
    s.check(grid)?;
    let ce = curl_e(grid, &s.e)?;
    let neg = -grid.dt().clone();
    for (h, c) in s.h.iter_mut().zip(&ce) {
        h.axpy(&neg, c);
    }
    let ch = curl_h(grid, &s.h)?;
    for (e, c) in s.e.iter_mut().zip(&ch) {
        e.axpy(grid.dt(), c);
    }
    Ok(())
}
