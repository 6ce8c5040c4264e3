//! Reaction terms: the scalar birth function `f(s, u)` and vector reactions
//! `f(x, u)`, with their limits as the spatial argument goes to `+-inf`.

use std::fmt;
use std::sync::Arc;

use crate::linalg::Matrix;
use crate::real::Real;

/// Which end of the habitat a limit refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Side {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            other => Err(crate::Error::config(format!(
                "side must be plus or minus, got {other:?}"
            ))),
        }
    }
}

/// Step for central differences at `u = 0`.
pub const FD_STEP: f64 = 1e-6;

pub(crate) fn central_diff<T: Real>(f: impl Fn(T) -> T, u: T) -> T {
    let h = T::lit(FD_STEP).max(T::epsilon().cbrt());
    (f(u + h) - f(u - h)) / (h + h)
}

/// Scalar birth function `f(s, u)` of the delayed model.
pub trait ScalarReaction<T: Real>: Send + Sync + fmt::Debug {
    fn eval(&self, s: T, u: T) -> T;

    /// `f_+-(u)`, the limit of `f(s, u)` as `s -> +-inf`.
    fn limit(&self, side: Side, u: T) -> T;

    fn du(&self, s: T, u: T) -> T {
        central_diff(|v| self.eval(s, v), u)
    }

    fn limit_du(&self, side: Side, u: T) -> T {
        central_diff(|v| self.limit(side, v), u)
    }

    /// Whether `du` and `limit_du` are closed-form rather than finite differences.
    fn has_analytic_du(&self) -> bool {
        false
    }

    /// Length over which `f` changes in `s`; sets sampling windows.
    fn transition_width(&self) -> T {
        T::one()
    }

    fn name(&self) -> &str;
}

/// Vector reaction `f(x, u)` of a cooperative system.
pub trait VectorReaction<T: Real>: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn eval(&self, x: T, u: &[T], out: &mut [T]);

    fn limit(&self, side: Side, u: &[T], out: &mut [T]);

    fn jacobian(&self, x: T, u: &[T]) -> Matrix<T> {
        fd_jacobian(self.dim(), |v, out| self.eval(x, v, out), u)
    }

    fn limit_jacobian(&self, side: Side, u: &[T]) -> Matrix<T> {
        fd_jacobian(self.dim(), |v, out| self.limit(side, v, out), u)
    }

    fn has_analytic_jacobian(&self) -> bool {
        false
    }

    fn transition_width(&self) -> T {
        T::one()
    }

    fn name(&self) -> &str;
}

pub(crate) fn fd_jacobian<T: Real>(
    n: usize,
    f: impl Fn(&[T], &mut [T]),
    u: &[T],
) -> Matrix<T> {
    let h = T::lit(FD_STEP).max(T::epsilon().cbrt());
    let mut jac = Matrix::zeros(n, n);
    let mut up = u.to_vec();
    let mut fp = vec![T::zero(); n];
    let mut fm = vec![T::zero(); n];
    for j in 0..n {
        up[j] = u[j] + h;
        f(&up, &mut fp);
        up[j] = u[j] - h;
        f(&up, &mut fm);
        up[j] = u[j];
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (h + h);
        }
    }
    jac
}

/// `lo + (hi - lo) (1 + tanh(s / w)) / 2`.
pub fn tanh_profile<T: Real>(lo: T, hi: T, w: T, s: T) -> T {
    let half = T::lit(0.5);
    lo + (hi - lo) * half * (T::one() + (s / w).tanh())
}

/// `f(s, u) = u + u (beta(s) - u) / mu` with a tanh profile `beta(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticReaction<T = f64> {
    pub beta_minus: T,
    pub beta_plus: T,
    pub w: T,
    pub mu: T,
}

impl<T: Real> LogisticReaction<T> {
    pub fn beta(&self, s: T) -> T {
        if self.beta_minus == self.beta_plus {
            return self.beta_plus;
        }
        tanh_profile(self.beta_minus, self.beta_plus, self.w, s)
    }

    fn beta_limit(&self, side: Side) -> T {
        match side {
            Side::Plus => self.beta_plus,
            Side::Minus => self.beta_minus,
        }
    }

    fn at(&self, beta: T, u: T) -> T {
        u + u * (beta - u) / self.mu
    }
}

impl<T: Real> ScalarReaction<T> for LogisticReaction<T> {
    fn eval(&self, s: T, u: T) -> T {
        self.at(self.beta(s), u)
    }

    fn limit(&self, side: Side, u: T) -> T {
        self.at(self.beta_limit(side), u)
    }

    fn du(&self, s: T, u: T) -> T {
        T::one() + (self.beta(s) - u - u) / self.mu
    }

    fn limit_du(&self, side: Side, u: T) -> T {
        T::one() + (self.beta_limit(side) - u - u) / self.mu
    }

    fn has_analytic_du(&self) -> bool {
        true
    }

    fn transition_width(&self) -> T {
        self.w
    }

    fn name(&self) -> &str {
        "shifted_logistic"
    }
}

/// `f(s, u) = p(s) u exp(-u)` with a tanh profile `p(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RickerReaction<T = f64> {
    pub p_minus: T,
    pub p_plus: T,
    pub w: T,
}

impl<T: Real> RickerReaction<T> {
    pub fn p(&self, s: T) -> T {
        if self.p_minus == self.p_plus {
            return self.p_plus;
        }
        tanh_profile(self.p_minus, self.p_plus, self.w, s)
    }

    fn p_limit(&self, side: Side) -> T {
        match side {
            Side::Plus => self.p_plus,
            Side::Minus => self.p_minus,
        }
    }
}

impl<T: Real> ScalarReaction<T> for RickerReaction<T> {
    fn eval(&self, s: T, u: T) -> T {
        self.p(s) * u * (-u).exp()
    }

    fn limit(&self, side: Side, u: T) -> T {
        self.p_limit(side) * u * (-u).exp()
    }

    fn du(&self, s: T, u: T) -> T {
        self.p(s) * (-u).exp() * (T::one() - u)
    }

    fn limit_du(&self, side: Side, u: T) -> T {
        self.p_limit(side) * (-u).exp() * (T::one() - u)
    }

    fn has_analytic_du(&self) -> bool {
        true
    }

    fn transition_width(&self) -> T {
        self.w
    }

    fn name(&self) -> &str {
        "shifted_ricker"
    }
}

type ScalarFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;
type LimitFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A reaction given by closures; derivatives come from finite differences.
#[derive(Clone)]
pub struct ClosureReaction<T = f64> {
    name: String,
    f: ScalarFn<T>,
    plus: LimitFn<T>,
    minus: LimitFn<T>,
    width: T,
}

impl<T: Real> ClosureReaction<T> {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(T, T) -> T + Send + Sync + 'static,
        plus: impl Fn(T) -> T + Send + Sync + 'static,
        minus: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            plus: Arc::new(plus),
            minus: Arc::new(minus),
            width: T::one(),
        }
    }

    /// A reaction with no dependence on `s`.
    pub fn homogeneous(
        name: impl Into<String>,
        f: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        let f: LimitFn<T> = Arc::new(f);
        let (a, b, c) = (f.clone(), f.clone(), f);
        Self {
            name: name.into(),
            f: Arc::new(move |_, u| a(u)),
            plus: b,
            minus: c,
            width: T::one(),
        }
    }

    pub fn with_width(mut self, width: T) -> Self {
        self.width = width;
        self
    }
}

impl<T: Real> fmt::Debug for ClosureReaction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosureReaction").field("name", &self.name).finish()
    }
}

impl<T: Real> ScalarReaction<T> for ClosureReaction<T> {
    fn eval(&self, s: T, u: T) -> T {
        (self.f)(s, u)
    }

    fn limit(&self, side: Side, u: T) -> T {
        match side {
            Side::Plus => (self.plus)(u),
            Side::Minus => (self.minus)(u),
        }
    }

    fn transition_width(&self) -> T {
        self.width
    }

    fn name(&self) -> &str {
        &self.name
    }
}
