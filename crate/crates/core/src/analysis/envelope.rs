//! Monotone minorant and linear majorant of a scalar birth function.
//!
//! The minorant `f_min <= f` is nondecreasing in `s` and `u` and
//! subhomogeneous; the majorant is `Rbar(s) u >= f` with `Rbar`
//! nonincreasing. Both are sampled and checked before being returned.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::models::{s_nodes, ScalarReaction, ScalarShiftModel, Side};
use crate::real::Real;

/// Side length of the validation grid (`VALIDATION_N^2` samples).
pub const VALIDATION_N: usize = 200;
/// Width multiples scanned past the transition abscissa for `f_*`.
pub const INF_SCAN_WIDTHS: f64 = 50.0;
/// Allowed sampled violation of an envelope inequality.
pub const ENVELOPE_TOL: f64 = 1e-12;

/// Outcome of the sampled invariant checks, one entry per inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeCheck {
    pub name: &'static str,
    pub samples: usize,
    /// Largest violation found (`<= 0` means the inequality held with slack).
    pub worst: f64,
    pub at: (f64, f64),
}

impl EnvelopeCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            samples: 0,
            worst: f64::NEG_INFINITY,
            at: (f64::NAN, f64::NAN),
        }
    }

    fn record<T: Real>(&mut self, violation: T, s: T, u: T) {
        self.samples += 1;
        let v = violation.to_f64_lossy();
        if v > self.worst || v.is_nan() {
            self.worst = if v.is_nan() { f64::INFINITY } else { v };
            self.at = (s.to_f64_lossy(), u.to_f64_lossy());
        }
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.worst <= tol
    }
}

fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    (0..n)
        .map(|i| lo + (hi - lo) * T::from_count(i) / T::from_count(n - 1))
        .collect()
}

fn envelope_tol<T: Real>(scale: T) -> T {
    T::tol_floor(ENVELOPE_TOL) * scale.max(T::one())
}

fn require(checks: &[EnvelopeCheck], tol: f64, what: &str) -> Result<()> {
    for c in checks {
        if !c.pass(tol) {
            return Err(Error::numeric(format!(
                "{what} validation failed: {} violated by {:e} at (s, u) = ({}, {})",
                c.name, c.worst, c.at.0, c.at.1
            )));
        }
    }
    Ok(())
}

/// Lower envelope `f_{u**, gamma}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorantSpec<T = f64> {
    pub u_star_star: T,
    pub gamma: T,
    /// `f'_+(0)`.
    pub b: T,
    pub k: T,
    pub s_frak: T,
    pub delta1: T,
    pub f_star: T,
    pub checks: Vec<EnvelopeCheck>,
}

impl<T: Real> MinorantSpec<T> {
    /// Piecewise linear: `-1/K` up to `s_frak`, `(b - 1 - gamma)/K` from
    /// `s_frak + 1`, linear in between.
    pub fn r(&self, s: T) -> T {
        if s <= self.s_frak {
            -T::one() / self.k
        } else if s >= self.s_frak + T::one() {
            self.r_limit(Side::Plus)
        } else {
            ((self.b - self.gamma) * (s - self.s_frak) - T::one()) / self.k
        }
    }

    pub fn r_limit(&self, side: Side) -> T {
        match side {
            Side::Plus => (self.b - T::one() - self.gamma) / self.k,
            Side::Minus => -T::one() / self.k,
        }
    }

    /// `u + K u (r - u)` below the vertex `(1 + K r)/(2K)`, the vertex value
    /// `(1 + K r)^2 / (4K)` above it.
    pub fn value(&self, r: T, u: T) -> T {
        let v = T::one() + self.k * r;
        let vertex = v / (self.k + self.k);
        if u >= vertex {
            v * v / (T::lit(4.0) * self.k)
        } else {
            u * (v - self.k * u)
        }
    }

    pub fn f_min(&self, s: T, u: T) -> T {
        self.value(self.r(s), u)
    }

    /// Positive fixed point of `f_min(+inf, .)` in closed form.
    pub fn u_infinity(&self) -> T {
        let r = self.r_limit(Side::Plus);
        if r * self.k > T::one() {
            let v = T::one() + self.k * r;
            v * v / (T::lit(4.0) * self.k)
        } else {
            r
        }
    }

    /// The model with `f` replaced by the minorant.
    pub fn model(&self, base: &ScalarShiftModel<T>) -> Result<ScalarShiftModel<T>> {
        ScalarShiftModel::from_reaction(
            "minorant",
            Arc::new(self.clone()),
            base.d,
            base.mu,
            base.tau,
            base.c,
            self.u_star_star,
        )
    }
}

impl<T: Real> ScalarReaction<T> for MinorantSpec<T> {
    fn eval(&self, s: T, u: T) -> T {
        self.f_min(s, u)
    }

    fn limit(&self, side: Side, u: T) -> T {
        self.value(self.r_limit(side), u)
    }

    fn transition_width(&self) -> T {
        T::one()
    }

    fn name(&self) -> &str {
        "minorant"
    }
}

/// Builds the minorant for `u** >= u*_+` and `0 < gamma < f'_+(0) - 1`.
pub fn build_minorant<T: Real>(model: &ScalarShiftModel<T>, u_star_star: T, gamma: T) -> Result<MinorantSpec<T>> {
    let b = model.limit_jacobian(Side::Plus);
    if !(b > T::one()) {
        return Err(Error::Hypotheses(format!("(B+) needs f'_+(0) > 1, got {b}")));
    }
    if !(gamma > T::zero() && gamma < b - T::one()) {
        return Err(Error::config(format!(
            "minorant needs 0 < gamma < f'_+(0) - 1 = {}, got {gamma}",
            b - T::one()
        )));
    }
    let u_plus = model.u_star(Side::Plus)?;
    if !(u_star_star >= u_plus) || !u_star_star.is_finite() {
        return Err(Error::config(format!(
            "minorant needs u** >= u*_+ = {u_plus}, got {u_star_star}"
        )));
    }
    let r = model.reaction();
    let three = T::lit(3.0);

    // delta1: f_+' stays above b - gamma/3 on [0, delta1]
    let us = linspace(T::zero(), u_star_star, 2001);
    let mut delta1 = T::zero();
    for &u in &us[1..] {
        if r.limit_du(Side::Plus, u) > b - gamma / three {
            delta1 = u;
        } else {
            break;
        }
    }
    if delta1 == T::zero() {
        let mut u = us[1];
        while u > T::epsilon() && !(r.limit_du(Side::Plus, u) > b - gamma / three) {
            u = u * T::lit(0.5);
        }
        if !(r.limit_du(Side::Plus, u) > b - gamma / three) {
            return Err(Error::numeric("minorant: no delta1 with f_+' > b - gamma/3"));
        }
        delta1 = u;
    }

    // s_frak: du f > b - 2 gamma/3 on [s_frak, inf) x [0, delta1]
    let w = model.transition_width();
    let u_small = linspace(T::zero(), delta1, 51);
    let bound = b - (gamma + gamma) / three;
    let ok_at = |s: Option<T>| {
        u_small.iter().all(|&u| {
            let d = match s {
                Some(s) => r.du(s, u),
                None => r.limit_du(Side::Plus, u),
            };
            d > bound
        })
    };
    if !ok_at(None) {
        return Err(Error::Hypotheses("(B+) derivative bound fails in the limit".into()));
    }
    let nodes = s_nodes(w, 4001);
    let mut first = nodes.len();
    for i in (0..nodes.len()).rev() {
        if ok_at(Some(nodes[i])) {
            first = i;
        } else {
            break;
        }
    }
    if first == nodes.len() {
        return Err(Error::Hypotheses(format!(
            "(B+) derivative bound fails at s = {}",
            nodes[nodes.len() - 1]
        )));
    }
    let s_frak = nodes[first].max(T::zero());

    // f_* over [s_frak, s_frak + 50 w] x [delta1, u**] and the limit
    let ss = linspace(s_frak, s_frak + T::lit(INF_SCAN_WIDTHS) * w, 1001);
    let uu = linspace(delta1, u_star_star, 201);
    let mut f_star = T::infinity();
    for &u in &uu {
        for &s in &ss {
            f_star = f_star.min(r.eval(s, u));
        }
        f_star = f_star.min(r.limit(Side::Plus, u));
    }
    if !(f_star > T::zero()) {
        return Err(Error::Hypotheses(format!(
            "(B+) positivity fails: inf f = {f_star} on [s_frak, inf) x [delta1, u**]"
        )));
    }
    let k = b * b / (T::lit(4.0) * f_star);
    let mut spec = MinorantSpec {
        u_star_star,
        gamma,
        b,
        k,
        s_frak,
        delta1,
        f_star,
        checks: Vec::new(),
    };
    spec.checks = validate_minorant(&spec, model);
    require(&spec.checks, envelope_tol(u_star_star).to_f64_lossy(), "minorant")?;
    Ok(spec)
}

/// Sampling window in `s` covering both tails and the ramp of `r`.
fn validation_s<T: Real>(w: T, s_frak: T) -> Vec<T> {
    let reach = T::lit(20.0) * w;
    let lo = (-reach).min(s_frak - reach);
    let hi = reach.max(s_frak + T::one() + reach);
    linspace(lo, hi, VALIDATION_N)
}

fn validate_minorant<T: Real>(spec: &MinorantSpec<T>, model: &ScalarShiftModel<T>) -> Vec<EnvelopeCheck> {
    let ss = validation_s(model.transition_width(), spec.s_frak);
    let us = linspace(T::zero(), spec.u_star_star, VALIDATION_N);
    let alphas = linspace(T::zero(), T::one(), 11);
    let mut below = EnvelopeCheck::new("f_min <= f");
    let mut mono_s = EnvelopeCheck::new("f_min nondecreasing in s");
    let mut mono_u = EnvelopeCheck::new("f_min nondecreasing in u");
    let mut subhom = EnvelopeCheck::new("f_min subhomogeneous in u");
    for (i, &s) in ss.iter().enumerate() {
        for (j, &u) in us.iter().enumerate() {
            let fm = spec.f_min(s, u);
            below.record(fm - model.f(s, u), s, u);
            if i + 1 < ss.len() {
                mono_s.record(fm - spec.f_min(ss[i + 1], u), s, u);
            }
            if j + 1 < us.len() {
                mono_u.record(fm - spec.f_min(s, us[j + 1]), s, u);
            }
            for &a in &alphas {
                subhom.record(a * fm - spec.f_min(s, a * u), s, u);
            }
        }
    }
    vec![below, mono_s, mono_u, subhom]
}

/// Upper envelope `Rbar(s) u`, with `Rbar` tabulated on a grid in `s` and
/// linearly interpolated.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorantSpec<T = f64> {
    pub u_star_star: T,
    pub gamma: T,
    pub nodes: Vec<T>,
    pub values: Vec<T>,
    /// `Rbar` below the first node.
    pub left_value: T,
    /// `Rbar(+inf) = gamma + f'_+(0)`.
    pub right_value: T,
    pub checks: Vec<EnvelopeCheck>,
}

impl<T: Real> MajorantSpec<T> {
    pub fn r_bar(&self, s: T) -> T {
        let n = self.nodes.len();
        if s < self.nodes[0] {
            return self.left_value;
        }
        if s >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let h = self.nodes[1] - self.nodes[0];
        let pos = (s - self.nodes[0]) / h;
        let i = pos.floor().to_usize().unwrap_or(0).min(n - 2);
        let th = pos - T::from_count(i);
        self.values[i] + th * (self.values[i + 1] - self.values[i])
    }

    /// The linear model `u_t = d u_xx - mu u + mu Rbar(x - ct) u(t - tau, x)`.
    pub fn model(&self, base: &ScalarShiftModel<T>) -> Result<ScalarShiftModel<T>> {
        ScalarShiftModel::from_reaction(
            "linear_majorant",
            Arc::new(self.clone()),
            base.d,
            base.mu,
            base.tau,
            base.c,
            self.u_star_star,
        )
    }
}

impl<T: Real> ScalarReaction<T> for MajorantSpec<T> {
    fn eval(&self, s: T, u: T) -> T {
        self.r_bar(s) * u
    }

    fn limit(&self, side: Side, u: T) -> T {
        match side {
            Side::Plus => self.right_value * u,
            Side::Minus => self.left_value * u,
        }
    }

    fn du(&self, s: T, _u: T) -> T {
        self.r_bar(s)
    }

    fn limit_du(&self, side: Side, _u: T) -> T {
        match side {
            Side::Plus => self.right_value,
            Side::Minus => self.left_value,
        }
    }

    fn has_analytic_du(&self) -> bool {
        true
    }

    fn name(&self) -> &str {
        "linear_majorant"
    }
}

/// `sup_u f(s, u)/u` over a log-dense sample of `(0, u**]`, with `u -> 0+`
/// covered by the derivative.
fn ratio_sup<T: Real>(f: impl Fn(T) -> T, df0: T, u_star_star: T, logs: &[T]) -> T {
    logs.iter()
        .map(|&e| {
            let u = u_star_star * e;
            f(u) / u
        })
        .fold(df0, |m, v| if v.is_nan() { T::infinity() } else { m.max(v) })
}

/// Builds `Rbar` as the running maximum from the right of
/// `max(gamma + f'_+(0), sup_u f(s, u)/u)`.
pub fn build_majorant<T: Real>(model: &ScalarShiftModel<T>, u_star_star: T, gamma: T) -> Result<MajorantSpec<T>> {
    for side in Side::BOTH {
        let b = model.limit_jacobian(side);
        if !(b > T::one()) {
            return Err(Error::Hypotheses(format!("(B{}) needs f'(0) > 1, got {b}", if side == Side::Plus { "+" } else { "-" })));
        }
    }
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(Error::config(format!("majorant needs gamma > 0, got {gamma}")));
    }
    if !(u_star_star > T::zero()) || !u_star_star.is_finite() {
        return Err(Error::config(format!("majorant needs u** > 0, got {u_star_star}")));
    }
    let r = model.reaction();
    let floor = gamma + model.limit_jacobian(Side::Plus);
    // 10^-12 .. 1 log-spaced, then linear on (0, 1]
    let mut logs: Vec<T> = (0..400)
        .map(|j| T::lit(10f64.powf(-12.0 + 12.0 * j as f64 / 399.0)))
        .collect();
    logs.extend((1..=200).map(|j| T::from_count(j) / T::lit(200.0)));
    let nodes = s_nodes(model.transition_width(), 2001);
    let g_at = |s: T| ratio_sup(|u| r.eval(s, u), r.du(s, T::zero()), u_star_star, &logs).max(floor);
    let g_plus = ratio_sup(|u| r.limit(Side::Plus, u), r.limit_du(Side::Plus, T::zero()), u_star_star, &logs).max(floor);
    let g_minus = ratio_sup(|u| r.limit(Side::Minus, u), r.limit_du(Side::Minus, T::zero()), u_star_star, &logs).max(floor);
    let mut values: Vec<T> = nodes.iter().map(|&s| g_at(s)).collect();
    let mut running = g_plus;
    for v in values.iter_mut().rev() {
        running = running.max(*v);
        *v = running;
    }
    let left_value = values[0].max(g_minus);
    if !left_value.is_finite() || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("majorant envelope unbounded: f(s, u)/u blows up"));
    }
    let mut spec = MajorantSpec {
        u_star_star,
        gamma,
        nodes,
        values,
        left_value,
        right_value: g_plus,
        checks: Vec::new(),
    };
    spec.checks = validate_majorant(&spec, model);
    require(&spec.checks, envelope_tol(u_star_star).to_f64_lossy(), "majorant")?;
    Ok(spec)
}

fn validate_majorant<T: Real>(spec: &MajorantSpec<T>, model: &ScalarShiftModel<T>) -> Vec<EnvelopeCheck> {
    let ss = validation_s(model.transition_width(), T::zero());
    let us = linspace(T::zero(), spec.u_star_star, VALIDATION_N);
    let mut above = EnvelopeCheck::new("f <= Rbar u");
    let mut mono = EnvelopeCheck::new("Rbar nonincreasing");
    for (i, &s) in ss.iter().enumerate() {
        let rb = spec.r_bar(s);
        if i + 1 < ss.len() {
            mono.record(spec.r_bar(ss[i + 1]) - rb, s, T::zero());
        }
        for &u in &us {
            above.record(model.f(s, u) - rb * u, s, u);
        }
    }
    vec![above, mono]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ClosureReaction, LogisticParams};

    fn logistic() -> ScalarShiftModel {
        ScalarShiftModel::shifted_logistic(LogisticParams {
            beta_minus: 0.25,
            beta_plus: 1.0,
            w: 2.0,
            mu: 3.0,
            d: 1.0,
            tau: 0.5,
            c: 0.5,
        })
        .unwrap()
    }

    #[test]
    fn r_shape() {
        let m = logistic();
        let b = m.limit_jacobian(Side::Plus);
        let spec = build_minorant(&m, 1.0, (b - 1.0) / 2.0).unwrap();
        assert_eq!(spec.r(spec.s_frak - 3.0), -1.0 / spec.k);
        assert_eq!(spec.r(spec.s_frak), -1.0 / spec.k);
        assert_eq!(spec.r(spec.s_frak + 1.0), spec.r_limit(Side::Plus));
        assert!((spec.r_limit(Side::Plus) * spec.k - (b - 1.0 - spec.gamma)).abs() < 1e-14);
        assert_eq!(spec.f_min(-1e3, 0.7), 0.0);
        assert!(spec.s_frak >= 0.0);
    }

    #[test]
    fn gamma_range_enforced() {
        let m = logistic();
        assert!(build_minorant(&m, 1.0, 0.0).is_err());
        assert!(build_minorant(&m, 1.0, 0.34).is_err());
        assert!(build_minorant(&m, 0.5, 0.1).is_err());
    }

    #[test]
    fn logistic_majorant_is_flat() {
        let m = logistic();
        let spec = build_majorant(&m, 1.0, 0.1).unwrap();
        // f/u = 1 + (beta(s) - u)/mu <= 4/3 everywhere
        assert!((spec.right_value - (0.1 + 4.0 / 3.0)).abs() < 1e-12);
        assert!((spec.r_bar(-100.0) - spec.right_value).abs() < 1e-12);
    }

    #[test]
    fn linear_reaction_majorant() {
        let lin = ClosureReaction::homogeneous("linear", |u: f64| 1.7 * u);
        let m = ScalarShiftModel::from_reaction("linear", Arc::new(lin), 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let spec = build_majorant(&m, 1.0, 0.2).unwrap();
        for s in [-50.0, 0.0, 50.0] {
            assert!((spec.r_bar(s) - 1.9).abs() < 1e-6);
        }
    }
}
