//! Crank-Nicolson steps for `u_t = d u_xx + c u_x` with reflecting
//! (Neumann) ends.
//!
//! Ghost points mirror the first interior neighbour, so the end rows read
//! `2 d (u_1 - u_0) / dx^2` and the advective flux vanishes there. The
//! implicit and explicit halves are both M-matrices (and the step is
//! monotone) while `d h / dx^2 <= 1` and `|c| dx <= 2 d`.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::real::Real;

/// Pre-factored CN operator for one diffusivity, advection speed and step.
#[derive(Clone, Debug)]
pub struct CrankNicolson<T = f64> {
    n: usize,
    /// `alpha - beta`, `1 - 2 alpha`, `alpha + beta` of the explicit half.
    west: T,
    centre: T,
    east: T,
    edge: T,
    /// Implicit half, factored for the Thomas sweep.
    lower: Vec<T>,
    cprime: Vec<T>,
    inv_denom: Vec<T>,
}

impl<T: Real> CrankNicolson<T> {
    /// Operator advancing `u_t = d u_xx + c u_x` by `h` on `n` points of spacing `dx`.
    pub fn new(n: usize, dx: T, d: T, c: T, h: T) -> Result<Self> {
        if n < 3 {
            return Err(Error::config("Crank-Nicolson needs at least 3 points"));
        }
        if !(d >= T::zero()) || !(h > T::zero()) || !(dx > T::zero()) {
            return Err(Error::config(format!(
                "Crank-Nicolson needs d >= 0, h > 0, dx > 0 (d = {d}, h = {h}, dx = {dx})"
            )));
        }
        let two = T::lit(2.0);
        let alpha = d * h / (two * dx * dx);
        let beta = c * h / (T::lit(4.0) * dx);
        let mut lower = vec![-(alpha - beta); n];
        let diag = vec![T::one() + two * alpha; n];
        let mut upper = vec![-(alpha + beta); n];
        lower[0] = T::zero();
        upper[0] = -(two * alpha);
        lower[n - 1] = -(two * alpha);
        upper[n - 1] = T::zero();
        let mut cprime = vec![T::zero(); n];
        let mut inv_denom = vec![T::zero(); n];
        let mut denom = diag[0];
        for i in 0..n {
            if i > 0 {
                denom = diag[i] - lower[i] * cprime[i - 1];
            }
            if denom == T::zero() {
                return Err(Error::numeric("Crank-Nicolson: singular implicit matrix"));
            }
            inv_denom[i] = T::one() / denom;
            cprime[i] = upper[i] * inv_denom[i];
        }
        Ok(Self {
            n,
            west: alpha - beta,
            centre: T::one() - two * alpha,
            east: alpha + beta,
            edge: two * alpha,
            lower,
            cprime,
            inv_denom,
        })
    }

    /// Whether the step is a monotone (order-preserving, range-preserving) map.
    pub fn is_monotone(&self) -> bool {
        self.west >= T::zero() && self.centre >= T::zero() && self.east >= T::zero()
    }

    /// Advances one component in place; `scratch` must have the same length.
    pub fn apply(&self, u: &mut [T], scratch: &mut [T]) {
        let n = self.n;
        debug_assert_eq!(u.len(), n);
        let rhs = scratch;
        rhs[0] = self.centre * u[0] + self.edge * u[1];
        for i in 1..n - 1 {
            rhs[i] = self.west * u[i - 1] + self.centre * u[i] + self.east * u[i + 1];
        }
        rhs[n - 1] = self.edge * u[n - 2] + self.centre * u[n - 1];
        // forward sweep
        u[0] = rhs[0] * self.inv_denom[0];
        for i in 1..n {
            u[i] = (rhs[i] - self.lower[i] * u[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            u[i] = u[i] - self.cprime[i] * u[i + 1];
        }
    }
}

/// One CN step of `u_t = d_k u_xx` for every component `k`.
pub fn diffusion_step<T: Real>(f: &Field<T>, d_per_component: &[T], dt: T) -> Result<Field<T>> {
    if d_per_component.len() != f.n_components() {
        return Err(Error::config(format!(
            "{} diffusivities for {} components",
            d_per_component.len(),
            f.n_components()
        )));
    }
    let mut out = f.clone();
    let n = f.grid().len();
    let mut scratch = vec![T::zero(); n];
    for (k, &d) in d_per_component.iter().enumerate() {
        let op = CrankNicolson::new(n, f.grid().dx(), d, T::zero(), dt)?;
        op.apply(out.component_mut(k), &mut scratch);
    }
    Ok(out)
}
