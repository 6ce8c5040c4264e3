//! Initial-condition builders: the bump `h`, the plateau `xi_d` and the
//! inverted plateau `xi~_{d,rho}`.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid1D};
use crate::real::Real;

/// `h(x) = 1` on `[-1, 1]`, `0` outside `(-2, 2)`, linear in between.
pub fn bump_h<T: Real>(x: T) -> T {
    let two = T::lit(2.0);
    let ax = x.abs();
    if ax <= T::one() {
        T::one()
    } else if ax < two {
        two - ax
    } else {
        T::zero()
    }
}

/// `xi_d(x) = max(0, min(1, d + 1 - |x|))`.
pub fn xi<T: Real>(d: T, x: T) -> T {
    (d + T::one() - x.abs()).min(T::one()).max(T::zero())
}

/// `xi~_{d,rho}(x) = min(rho, max(1, (rho - 1)|x| - rho d + d + 1))`.
pub fn xi_tilde<T: Real>(d: T, rho: T, x: T) -> T {
    let ramp = (rho - T::one()) * x.abs() - rho * d + d + T::one();
    ramp.max(T::one()).min(rho)
}

pub fn ic_bump_h<T: Real>(grid: &Grid1D<T>, amplitude: T) -> Result<Field<T>> {
    Field::sample_scalar(*grid, |x| amplitude * bump_h(x))
}

pub fn ic_xi<T: Real>(grid: &Grid1D<T>, d: T) -> Result<Field<T>> {
    if !(d > T::zero()) {
        return Err(Error::config(format!("xi needs d > 0, got {d}")));
    }
    Field::sample_scalar(*grid, |x| xi(d, x))
}

pub fn ic_xi_tilde<T: Real>(grid: &Grid1D<T>, d: T, rho: T) -> Result<Field<T>> {
    if !(d > T::zero()) {
        return Err(Error::config(format!("xi_tilde needs d > 0, got {d}")));
    }
    if !(rho >= T::one()) {
        return Err(Error::config(format!("xi_tilde needs rho >= 1, got {rho}")));
    }
    Field::sample_scalar(*grid, |x| xi_tilde(d, rho, x))
}
