//! Positive equilibria of the limiting reactions.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;

fn not_found(detail: impl std::fmt::Display) -> Error {
    Error::numeric(format!("equilibrium not found: {detail}"))
}

/// Residual tolerance `|g(u*)| < 1e-12` scaled to the data.
fn residual_tol<T: Real>(scale: T) -> T {
    T::tol_floor(1e-12) * scale.max(T::one())
}

/// Positive root of `g(u) = f(u) - u` in `(0, cap]` by damped Newton from `cap`.
pub fn newton_fixed_point<T: Real>(
    f: impl Fn(T) -> T,
    df: impl Fn(T) -> T,
    cap: T,
) -> Result<T> {
    let g = |u: T| f(u) - u;
    let tol = residual_tol(cap);
    let mut u = cap;
    let mut gu = g(u);
    for _ in 0..200 {
        if gu.abs() < tol {
            // roots this close to zero are the trivial equilibrium
            if u > T::tol_floor(1e-8) * cap {
                return Ok(u);
            }
            return Err(not_found("Newton reached zero"));
        }
        let slope = df(u) - T::one();
        if slope == T::zero() || !slope.is_finite() {
            return Err(not_found("Newton hit a flat spot"));
        }
        let step = gu / slope;
        let mut lam = T::one();
        loop {
            let cand = u - lam * step;
            if cand > T::zero() && cand <= cap * T::lit(1.5) {
                let gc = g(cand);
                if gc.abs() < gu.abs() {
                    u = cand;
                    gu = gc;
                    break;
                }
            }
            lam = lam * T::lit(0.5);
            if lam < T::lit(1e-12) {
                return Err(not_found("Newton line search stalled"));
            }
        }
    }
    Err(not_found("Newton did not converge"))
}

/// Positive root of `f(u) = u` in `(0, cap]` by bisection, bracketed by the
/// sign change between small `u` (where `f(u) > u`) and `cap`.
pub fn bisect_fixed_point<T: Real>(f: impl Fn(T) -> T, cap: T) -> Result<T> {
    let g = |u: T| f(u) - u;
    let mut hi = cap;
    let ghi = g(hi);
    if ghi.abs() < residual_tol(cap) {
        return Ok(hi);
    }
    if ghi > T::zero() {
        return Err(not_found("f(cap) > cap, no sign change"));
    }
    let mut lo = cap;
    let mut found = false;
    for _ in 0..200 {
        lo = lo * T::lit(0.5);
        if g(lo) > T::zero() {
            found = true;
            break;
        }
    }
    if !found {
        return Err(not_found("no sign change near zero"));
    }
    for _ in 0..400 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (glo, ghi) = (g(lo).abs(), g(hi).abs());
    Ok(if glo < ghi { lo } else { hi })
}

/// Newton first, bisection as fallback. Both agree on well-posed inputs.
pub fn scalar_fixed_point<T: Real>(
    f: impl Fn(T) -> T,
    df: impl Fn(T) -> T,
    cap: T,
) -> Result<T> {
    if !(cap > T::zero()) || !cap.is_finite() {
        return Err(not_found(format!("invalid cap {cap}")));
    }
    let root = match newton_fixed_point(&f, &df, cap) {
        Ok(u) => u,
        Err(_) => bisect_fixed_point(&f, cap)?,
    };
    let resid = (f(root) - root).abs();
    if resid >= residual_tol(cap) * T::lit(10.0) {
        return Err(not_found(format!("residual {resid:e} too large")));
    }
    Ok(root)
}

fn norm_inf<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Zero of `f` in the positive cone, by damped Newton from `start` with an
/// explicit relaxation of `u' = f(u)` as fallback (the relaxation converges to
/// the stable positive equilibrium for cooperative subhomogeneous `f`).
pub fn vector_equilibrium<T: Real>(
    f: impl Fn(&[T], &mut [T]),
    jac: impl Fn(&[T]) -> Matrix<T>,
    start: &[T],
) -> Result<Vec<T>> {
    let n = start.len();
    let scale = norm_inf(start).max(T::one());
    let tol = residual_tol(scale);
    let eval = |u: &[T]| {
        let mut out = vec![T::zero(); n];
        f(u, &mut out);
        out
    };
    let newton = |mut u: Vec<T>| -> Option<Vec<T>> {
        let mut fu = eval(&u);
        for _ in 0..100 {
            let r = norm_inf(&fu);
            if r < tol {
                return Some(u);
            }
            let step = jac(&u).solve(&fu).ok()?;
            let mut lam = T::one();
            loop {
                let cand: Vec<T> = u.iter().zip(&step).map(|(a, s)| *a - lam * *s).collect();
                if cand.iter().all(|v| *v > T::zero()) {
                    let fc = eval(&cand);
                    if norm_inf(&fc) < r {
                        u = cand;
                        fu = fc;
                        break;
                    }
                }
                lam = lam * T::lit(0.5);
                if lam < T::lit(1e-12) {
                    return None;
                }
            }
        }
        None
    };
    if let Some(u) = newton(start.to_vec()) {
        return Ok(u);
    }
    // Relax along the flow, then polish.
    let mut u = start.to_vec();
    let lip = jac(&u).norm1().max(T::one());
    let h = T::lit(0.2) / lip;
    for _ in 0..200_000 {
        let k1 = eval(&u);
        let mid: Vec<T> = u.iter().zip(&k1).map(|(a, k)| *a + h * T::lit(0.5) * *k).collect();
        let k2 = eval(&mid);
        for (a, k) in u.iter_mut().zip(&k2) {
            *a = *a + h * *k;
        }
        if norm_inf(&k2) < T::lit(1e-6) * scale {
            break;
        }
    }
    newton(u).ok_or_else(|| not_found("Newton and relaxation both failed"))
}
