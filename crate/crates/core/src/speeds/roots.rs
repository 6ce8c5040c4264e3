//! One-dimensional root finding and minimization.

use crate::error::{Error, Result};
use crate::real::Real;

/// Real root of `z = a + b exp(-z tau)` for `b >= 0`.
///
/// `g(z) = z - a - b exp(-z tau)` is strictly increasing, so the root is
/// unique. It is bracketed by `[a, a + b exp(-a tau)]` and bisected down to
/// floating point resolution.
pub fn principal_root<T: Real>(a: T, b: T, tau: T) -> Result<T> {
    if !(b >= T::zero()) {
        return Err(Error::config(format!("principal_root needs b >= 0, got {b}")));
    }
    if !(tau >= T::zero()) {
        return Err(Error::config(format!("principal_root needs tau >= 0, got {tau}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::numeric("principal_root: non-finite coefficients"));
    }
    if tau == T::zero() || b == T::zero() {
        return Ok(a + b);
    }
    let g = |z: T| z - a - b * (-z * tau).exp();
    let mut lo = a;
    let mut hi = a + b * (-a * tau).exp();
    if !hi.is_finite() {
        // exp(-a tau) overflowed; grow a bracket from a instead
        let mut step = T::one();
        hi = a + step;
        while !(g(hi) > T::zero()) {
            step = step + step;
            hi = a + step;
            if !hi.is_finite() {
                return Err(Error::numeric("principal_root: bracket expansion failed"));
            }
        }
    }
    for _ in 0..2000 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi })
}

/// Minimizes a unimodal `f` on `[lo, hi]` by golden-section search until the
/// bracket is shorter than `tol`. Returns `(x, f(x))`.
pub fn golden_section<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..500 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Lambert-W style oracle: Newton on z e^z = 1 from 0.5.
    fn omega_oracle() -> f64 {
        let mut z: f64 = 0.5;
        for _ in 0..50 {
            let e = z.exp();
            z -= (z * e - 1.0) / (e * (1.0 + z));
        }
        z
    }

    #[test]
    fn omega_constant() {
        let z = principal_root::<f64>(0.0, 1.0, 1.0).unwrap();
        assert!((z - 0.5671432904).abs() < 1e-8);
        assert!((z - omega_oracle()).abs() < 1e-14);
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(principal_root(0.3, 2.0, 0.0).unwrap(), 2.3);
        assert_eq!(principal_root(-0.7, 0.0, 1.5).unwrap(), -0.7);
        assert!(principal_root(0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn residual_is_tiny_for_wide_ranges() {
        for &(a, b, tau) in &[(-3.0, 4.0, 0.5), (2500.0, 4.0, 0.5), (-3.0, 1e-3, 10.0), (5.0, 50.0, 2.0)] {
            let z: f64 = principal_root(a, b, tau).unwrap();
            let g = z - a - b * (-z * tau).exp();
            assert!(g.abs() <= 1e-12 * (1.0 + a.abs() + b), "{a} {b} {tau}: {g}");
        }
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section(|x: f64| (x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-10);
        // f is flat to rounding within sqrt(eps) of the minimizer
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn root_increases_with_a_and_b(
            a in -5.0f64..5.0, b in 0.01f64..5.0, tau in 0.01f64..3.0, da in 0.01f64..1.0, db in 0.01f64..1.0
        ) {
            let z = principal_root(a, b, tau).unwrap();
            prop_assert!(principal_root(a + da, b, tau).unwrap() > z);
            prop_assert!(principal_root(a, b + db, tau).unwrap() > z);
            let g = z - a - b * (-z * tau).exp();
            prop_assert!(g.abs() < 1e-12 * (1.0 + a.abs() + b));
        }
    }
}
