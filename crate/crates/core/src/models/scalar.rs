//! The delayed scalar model `u_t = d u_xx - mu u + mu f(x - c t, u(t - tau, x))`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::models::equilibrium::scalar_fixed_point;
use crate::models::reaction::{LogisticReaction, RickerReaction, ScalarReaction, Side};
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct ScalarShiftModel<T = f64> {
    pub d: T,
    pub mu: T,
    pub tau: T,
    pub c: T,
    reaction: Arc<dyn ScalarReaction<T>>,
    kind: String,
    cap: T,
    b_plus: T,
    b_minus: T,
    u_star_plus: Option<T>,
    u_star_minus: Option<T>,
    monotone: bool,
    subhomogeneous: bool,
}

/// Parameters of the shifted logistic built-in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticParams<T = f64> {
    pub beta_minus: T,
    pub beta_plus: T,
    pub w: T,
    pub mu: T,
    pub d: T,
    pub tau: T,
    pub c: T,
}

/// Parameters of the shifted Ricker built-in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RickerParams<T = f64> {
    pub p_minus: T,
    pub p_plus: T,
    pub w: T,
    pub mu: T,
    pub d: T,
    pub tau: T,
    pub c: T,
}

fn check_common<T: Real>(d: T, mu: T, tau: T, c: T) -> Result<()> {
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::config(format!("diffusivity d must be positive, got {d}")));
    }
    if !(mu > T::zero()) || !mu.is_finite() {
        return Err(Error::config(format!("decay mu must be positive, got {mu}")));
    }
    if !(tau >= T::zero()) || !tau.is_finite() {
        return Err(Error::config(format!("delay tau must be >= 0, got {tau}")));
    }
    if !c.is_finite() {
        return Err(Error::config("shift speed c must be finite"));
    }
    Ok(())
}

/// Sampling nodes for the habitat coordinate: dense through the transition,
/// reaching far into both tails.
pub(crate) fn s_nodes<T: Real>(width: T, n: usize) -> Vec<T> {
    let reach = T::lit(20.0) * width;
    (0..n)
        .map(|i| -reach + (reach + reach) * T::from_count(i) / T::from_count(n - 1))
        .collect()
}

impl<T: Real> ScalarShiftModel<T> {
    /// Generic constructor; `b_+-`, `u*_+-` and the monotonicity flags are
    /// derived from the reaction.
    pub fn from_reaction(
        kind: impl Into<String>,
        reaction: Arc<dyn ScalarReaction<T>>,
        d: T,
        mu: T,
        tau: T,
        c: T,
        cap: T,
    ) -> Result<Self> {
        check_common(d, mu, tau, c)?;
        if !(cap > T::zero()) || !cap.is_finite() {
            return Err(Error::config(format!("cap must be positive, got {cap}")));
        }
        let b_plus = reaction.limit_du(Side::Plus, T::zero());
        let b_minus = reaction.limit_du(Side::Minus, T::zero());
        let mut model = Self {
            d,
            mu,
            tau,
            c,
            reaction,
            kind: kind.into(),
            cap,
            b_plus,
            b_minus,
            u_star_plus: None,
            u_star_minus: None,
            monotone: false,
            subhomogeneous: false,
        };
        model.u_star_plus = model.positive_equilibrium(Side::Plus).ok();
        model.u_star_minus = model.positive_equilibrium(Side::Minus).ok();
        model.monotone = model.sample_monotone();
        model.subhomogeneous = model.sample_subhomogeneous();
        Ok(model)
    }

    pub fn shifted_logistic(p: LogisticParams<T>) -> Result<Self> {
        if !(p.beta_minus > T::zero()) {
            return Err(Error::config(format!(
                "beta_minus > 0 violated (beta_minus = {})",
                p.beta_minus
            )));
        }
        if !(p.beta_plus > p.beta_minus) {
            return Err(Error::config(format!(
                "beta_plus > beta_minus violated ({} <= {})",
                p.beta_plus, p.beta_minus
            )));
        }
        Self::logistic_unchecked_order(p, "shifted_logistic")
    }

    /// Logistic growth `u (beta - u)` with no habitat dependence.
    pub fn homogeneous_logistic(beta: T, mu: T, d: T, tau: T, c: T) -> Result<Self> {
        if !(beta > T::zero()) {
            return Err(Error::config(format!("beta > 0 violated (beta = {beta})")));
        }
        let p = LogisticParams {
            beta_minus: beta,
            beta_plus: beta,
            w: T::one(),
            mu,
            d,
            tau,
            c,
        };
        Self::logistic_unchecked_order(p, "homogeneous_logistic")
    }

    /// `u_t = u_xx + u (1 - u)`, encoded with `mu = 1`, `beta = 1`.
    pub fn fisher() -> Self {
        Self::homogeneous_logistic(T::one(), T::one(), T::one(), T::zero(), T::zero())
            .expect("Fisher parameters are admissible")
            .with_kind("fisher")
    }

    fn logistic_unchecked_order(p: LogisticParams<T>, kind: &str) -> Result<Self> {
        check_common(p.d, p.mu, p.tau, p.c)?;
        if !(p.w > T::zero()) {
            return Err(Error::config(format!("transition width w must be positive, got {}", p.w)));
        }
        if !(p.beta_plus < p.mu + p.beta_minus) {
            return Err(Error::config(format!(
                "beta_plus < mu + beta_minus violated ({} >= {} + {})",
                p.beta_plus, p.mu, p.beta_minus
            )));
        }
        if !(p.mu >= T::lit(2.0) * p.beta_plus - p.beta_minus) {
            return Err(Error::config(format!(
                "mu >= 2 beta_plus - beta_minus violated ({} < 2*{} - {})",
                p.mu, p.beta_plus, p.beta_minus
            )));
        }
        let reaction = LogisticReaction {
            beta_minus: p.beta_minus,
            beta_plus: p.beta_plus,
            w: p.w,
            mu: p.mu,
        };
        Ok(Self {
            d: p.d,
            mu: p.mu,
            tau: p.tau,
            c: p.c,
            reaction: Arc::new(reaction),
            kind: kind.to_string(),
            cap: p.beta_plus,
            b_plus: T::one() + p.beta_plus / p.mu,
            b_minus: T::one() + p.beta_minus / p.mu,
            u_star_plus: Some(p.beta_plus),
            u_star_minus: Some(p.beta_minus),
            monotone: true,
            subhomogeneous: true,
        })
    }

    pub fn shifted_ricker(p: RickerParams<T>) -> Result<Self> {
        check_common(p.d, p.mu, p.tau, p.c)?;
        let e2 = T::E() * T::E();
        if !(T::one() < p.p_minus && p.p_minus < p.p_plus && p.p_plus < e2) {
            return Err(Error::config(format!(
                "(B±) period-two uniqueness not guaranteed: need 1 < p_minus < p_plus < e^2, got p_minus = {}, p_plus = {}",
                p.p_minus, p.p_plus
            )));
        }
        if !(p.w > T::zero()) {
            return Err(Error::config(format!("transition width w must be positive, got {}", p.w)));
        }
        let reaction = RickerReaction {
            p_minus: p.p_minus,
            p_plus: p.p_plus,
            w: p.w,
        };
        let cap = (p.p_plus / T::E()).max(p.p_plus.ln());
        let mut model = Self {
            d: p.d,
            mu: p.mu,
            tau: p.tau,
            c: p.c,
            reaction: Arc::new(reaction),
            kind: "shifted_ricker".to_string(),
            cap,
            b_plus: p.p_plus,
            b_minus: p.p_minus,
            u_star_plus: Some(p.p_plus.ln()),
            u_star_minus: Some(p.p_minus.ln()),
            monotone: false,
            subhomogeneous: true,
        };
        // u e^{-u} increases only up to u = 1
        model.monotone = cap <= T::one();
        Ok(model)
    }

    pub fn with_kind(mut self, kind: impl Into<String>) -> Self {
        self.kind = kind.into();
        self
    }

    pub fn with_c(mut self, c: T) -> Self {
        self.c = c;
        self
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = tau;
        self
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn reaction(&self) -> &Arc<dyn ScalarReaction<T>> {
        &self.reaction
    }

    #[inline]
    pub fn f(&self, s: T, u: T) -> T {
        self.reaction.eval(s, u)
    }

    #[inline]
    pub fn f_limit(&self, side: Side, u: T) -> T {
        self.reaction.limit(side, u)
    }

    pub fn cap(&self) -> T {
        self.cap
    }

    /// `f'_+-(0)`.
    pub fn limit_jacobian(&self, side: Side) -> T {
        match side {
            Side::Plus => self.b_plus,
            Side::Minus => self.b_minus,
        }
    }

    /// Cached `u*_+-`.
    pub fn u_star(&self, side: Side) -> Result<T> {
        let u = match side {
            Side::Plus => self.u_star_plus,
            Side::Minus => self.u_star_minus,
        };
        u.ok_or_else(|| {
            Error::numeric(format!("equilibrium not found: no positive fixed point of f_{side}"))
        })
    }

    /// Solves `f_+-(u) = u` afresh (Newton from the cap, bisection fallback).
    pub fn positive_equilibrium(&self, side: Side) -> Result<T> {
        scalar_fixed_point(
            |u| self.reaction.limit(side, u),
            |u| self.reaction.limit_du(side, u),
            self.cap,
        )
    }

    /// Nondecreasing in `u` on the box (closed form for built-ins, sampled otherwise).
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn is_subhomogeneous(&self) -> bool {
        self.subhomogeneous
    }

    pub fn transition_width(&self) -> T {
        self.reaction.transition_width()
    }

    /// Sampled `max |df/du|` over the habitat and the box `[0, cap]`.
    pub fn max_abs_du(&self) -> T {
        let mut m = T::zero();
        let us: Vec<T> = (0..=100)
            .map(|j| self.cap * T::from_count(j) / T::lit(100.0))
            .collect();
        let mut scan = |dfdu: &dyn Fn(T) -> T| {
            for &u in &us {
                m = m.max(dfdu(u).abs());
            }
        };
        for s in s_nodes(self.transition_width(), 201) {
            scan(&|u| self.reaction.du(s, u));
        }
        for side in Side::BOTH {
            scan(&|u| self.reaction.limit_du(side, u));
        }
        m
    }

    fn sample_monotone(&self) -> bool {
        let tol = T::lit(-1e-12);
        s_nodes(self.transition_width(), 81).into_iter().all(|s| {
            (0..=80).all(|j| {
                let u = self.cap * T::from_count(j) / T::lit(80.0);
                self.reaction.du(s, u) >= tol
            })
        })
    }

    fn sample_subhomogeneous(&self) -> bool {
        let tol = T::tol_floor(1e-12);
        s_nodes(self.transition_width(), 41).into_iter().all(|s| {
            (1..=20).all(|j| {
                let u = self.cap * T::from_count(j) / T::lit(20.0);
                (1..10).all(|k| {
                    let a = T::from_count(k) / T::lit(10.0);
                    self.f(s, a * u) - a * self.f(s, u) >= -tol
                })
            })
        })
    }
}
