//! Cooperative systems `u_t = D u_xx + f(x, u)` with limits `f_+-` as `x -> +-inf`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{stability_modulus, Matrix};
use crate::models::assumptions::halton;
use crate::models::equilibrium::vector_equilibrium;
use crate::models::reaction::{tanh_profile, Side, VectorReaction};
use crate::models::scalar::s_nodes;
use crate::real::Real;

/// Tolerance on negative off-diagonal Jacobian entries.
const COOP_TOL: f64 = 1e-8;

/// `f_i(x, u) = u_i (beta_i(x) - u_i) + kappa (u_j - u_i)` for two components.
#[derive(Clone, Debug, PartialEq)]
pub struct PairReaction<T = f64> {
    pub beta_minus: [T; 2],
    pub beta_plus: [T; 2],
    pub kappa: T,
    pub w: T,
}

impl<T: Real> PairReaction<T> {
    fn beta(&self, i: usize, x: T) -> T {
        if self.beta_minus[i] == self.beta_plus[i] {
            return self.beta_plus[i];
        }
        tanh_profile(self.beta_minus[i], self.beta_plus[i], self.w, x)
    }

    fn beta_limit(&self, side: Side, i: usize) -> T {
        match side {
            Side::Plus => self.beta_plus[i],
            Side::Minus => self.beta_minus[i],
        }
    }

    fn apply(&self, beta: [T; 2], u: &[T], out: &mut [T]) {
        out[0] = u[0] * (beta[0] - u[0]) + self.kappa * (u[1] - u[0]);
        out[1] = u[1] * (beta[1] - u[1]) + self.kappa * (u[0] - u[1]);
    }

    fn jac(&self, beta: [T; 2], u: &[T]) -> Matrix<T> {
        let two = T::lit(2.0);
        let mut m = Matrix::zeros(2, 2);
        m[(0, 0)] = beta[0] - two * u[0] - self.kappa;
        m[(0, 1)] = self.kappa;
        m[(1, 0)] = self.kappa;
        m[(1, 1)] = beta[1] - two * u[1] - self.kappa;
        m
    }
}

impl<T: Real> VectorReaction<T> for PairReaction<T> {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: T, u: &[T], out: &mut [T]) {
        self.apply([self.beta(0, x), self.beta(1, x)], u, out);
    }

    fn limit(&self, side: Side, u: &[T], out: &mut [T]) {
        self.apply([self.beta_limit(side, 0), self.beta_limit(side, 1)], u, out);
    }

    fn jacobian(&self, x: T, u: &[T]) -> Matrix<T> {
        self.jac([self.beta(0, x), self.beta(1, x)], u)
    }

    fn limit_jacobian(&self, side: Side, u: &[T]) -> Matrix<T> {
        self.jac([self.beta_limit(side, 0), self.beta_limit(side, 1)], u)
    }

    fn has_analytic_jacobian(&self) -> bool {
        true
    }

    fn transition_width(&self) -> T {
        self.w
    }

    fn name(&self) -> &str {
        "cooperative_pair"
    }
}

/// Linear reaction `f(x, u) = A u`, independent of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearReaction<T = f64> {
    pub a: Matrix<T>,
}

impl<T: Real> VectorReaction<T> for LinearReaction<T> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn eval(&self, _x: T, u: &[T], out: &mut [T]) {
        out.copy_from_slice(&self.a.mul_vec(u));
    }

    fn limit(&self, _side: Side, u: &[T], out: &mut [T]) {
        out.copy_from_slice(&self.a.mul_vec(u));
    }

    fn jacobian(&self, _x: T, _u: &[T]) -> Matrix<T> {
        self.a.clone()
    }

    fn limit_jacobian(&self, _side: Side, _u: &[T]) -> Matrix<T> {
        self.a.clone()
    }

    fn has_analytic_jacobian(&self) -> bool {
        true
    }

    fn name(&self) -> &str {
        "linear"
    }
}

/// Parameters of the two-component built-in.
#[derive(Clone, Debug, PartialEq)]
pub struct PairParams<T = f64> {
    pub beta_minus: [T; 2],
    pub beta_plus: [T; 2],
    pub kappa: T,
    pub w: T,
    pub diffusivities: [T; 2],
}

#[derive(Clone, Debug)]
pub struct CooperativeModel<T = f64> {
    diffusivities: Vec<T>,
    reaction: Arc<dyn VectorReaction<T>>,
    kind: String,
    cap: Vec<T>,
    a_plus: Matrix<T>,
    a_minus: Matrix<T>,
    u_star_plus: Option<Vec<T>>,
    u_star_minus: Option<Vec<T>>,
    alpha0: T,
}

impl<T: Real> CooperativeModel<T> {
    pub fn from_reaction(
        kind: impl Into<String>,
        reaction: Arc<dyn VectorReaction<T>>,
        diffusivities: Vec<T>,
        cap: Vec<T>,
    ) -> Result<Self> {
        let n = reaction.dim();
        if n == 0 || diffusivities.len() != n || cap.len() != n {
            return Err(Error::config(format!(
                "component count mismatch: reaction {n}, diffusivities {}, cap {}",
                diffusivities.len(),
                cap.len()
            )));
        }
        if diffusivities.iter().any(|d| !(*d > T::zero()) || !d.is_finite()) {
            return Err(Error::config("diffusivities must be positive"));
        }
        if cap.iter().any(|m| !(*m > T::zero()) || !m.is_finite()) {
            return Err(Error::config("cap vector must be strictly positive"));
        }
        let zero = vec![T::zero(); n];
        let a_plus = reaction.limit_jacobian(Side::Plus, &zero);
        let a_minus = reaction.limit_jacobian(Side::Minus, &zero);
        for (side, a) in [(Side::Plus, &a_plus), (Side::Minus, &a_minus)] {
            check_cooperative(a, side)?;
        }
        let mut model = Self {
            diffusivities,
            reaction,
            kind: kind.into(),
            cap,
            a_plus,
            a_minus,
            u_star_plus: None,
            u_star_minus: None,
            alpha0: T::zero(),
        };
        model.u_star_plus = model.positive_equilibrium(Side::Plus).ok();
        model.u_star_minus = model.positive_equilibrium(Side::Minus).ok();
        model.alpha0 = model.alpha_star(4096)?;
        Ok(model)
    }

    /// Two logistic components coupled by symmetric migration `kappa`.
    /// The cap is `2 max beta` in both components.
    pub fn cooperative_pair(p: PairParams<T>) -> Result<Self> {
        if !(p.kappa > T::zero()) {
            return Err(Error::config(format!(
                "kappa > 0 required (kappa = {} makes the Jacobian reducible)",
                p.kappa
            )));
        }
        if p.beta_minus.iter().chain(&p.beta_plus).any(|b| !(*b > T::zero())) {
            return Err(Error::config("beta limits must be positive"));
        }
        if !(p.w > T::zero()) {
            return Err(Error::config(format!("transition width w must be positive, got {}", p.w)));
        }
        let reaction = PairReaction {
            beta_minus: p.beta_minus,
            beta_plus: p.beta_plus,
            kappa: p.kappa,
            w: p.w,
        };
        let zero = [T::zero(); 2];
        for side in Side::BOTH {
            let s = stability_modulus(&reaction.limit_jacobian(side, &zero))?;
            if !(s > T::zero()) {
                return Err(Error::config(format!(
                    "(C±) instability of 0 fails: s(A_{side}) = {s}"
                )));
            }
        }
        let m = p
            .beta_minus
            .iter()
            .chain(&p.beta_plus)
            .copied()
            .fold(T::zero(), T::max);
        let cap = vec![T::lit(2.0) * m; 2];
        Self::from_reaction(
            "cooperative_pair",
            Arc::new(reaction),
            p.diffusivities.to_vec(),
            cap,
        )
    }

    pub fn with_kind(mut self, kind: impl Into<String>) -> Self {
        self.kind = kind.into();
        self
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.diffusivities.len()
    }

    pub fn diffusivities(&self) -> &[T] {
        &self.diffusivities
    }

    pub fn reaction(&self) -> &Arc<dyn VectorReaction<T>> {
        &self.reaction
    }

    pub fn cap(&self) -> &[T] {
        &self.cap
    }

    pub fn alpha0(&self) -> T {
        self.alpha0
    }

    pub fn transition_width(&self) -> T {
        self.reaction.transition_width()
    }

    /// `A_+- = D_u f_+-(0)`.
    pub fn limit_jacobian(&self, side: Side) -> &Matrix<T> {
        match side {
            Side::Plus => &self.a_plus,
            Side::Minus => &self.a_minus,
        }
    }

    pub fn u_star(&self, side: Side) -> Result<&[T]> {
        let u = match side {
            Side::Plus => self.u_star_plus.as_deref(),
            Side::Minus => self.u_star_minus.as_deref(),
        };
        u.ok_or_else(|| {
            Error::numeric(format!("equilibrium not found: no positive zero of f_{side}"))
        })
    }

    /// Solves `f_+-(u) = 0` with `u >> 0`, starting from the cap.
    pub fn positive_equilibrium(&self, side: Side) -> Result<Vec<T>> {
        let r = &self.reaction;
        let u = vector_equilibrium(
            |u, out| r.limit(side, u, out),
            |u| r.limit_jacobian(side, u),
            &self.cap,
        )?;
        if u.iter().any(|v| !(*v > T::zero())) {
            return Err(Error::numeric(format!(
                "equilibrium not found: Newton ended at {u:?}, not in the interior"
            )));
        }
        Ok(u)
    }

    /// Sampled `alpha_0^*`: 1.1 times the largest negative part of a diagonal
    /// Jacobian entry over the habitat and the box `[0, cap]`.
    pub fn alpha_star(&self, n_samples: usize) -> Result<T> {
        let n = self.dim();
        let mut worst = T::infinity();
        let mut visit = |jac: Matrix<T>| -> Result<()> {
            if !jac.is_finite() {
                return Err(Error::numeric("alpha_star: unbounded Jacobian sample"));
            }
            worst = worst.min(jac.min_diag());
            Ok(())
        };
        let xs = s_nodes(self.transition_width(), 41);
        let mut points: Vec<Vec<T>> = Vec::with_capacity(n_samples + (1 << n));
        for corner in 0..(1usize << n) {
            points.push(
                (0..n)
                    .map(|k| if corner >> k & 1 == 1 { self.cap[k] } else { T::zero() })
                    .collect(),
            );
        }
        for i in 1..=n_samples {
            points.push((0..n).map(|k| self.cap[k] * halton::<T>(i, k + 1)).collect());
        }
        for u in &points {
            for &x in &xs {
                visit(self.reaction.jacobian(x, u))?;
            }
            for side in Side::BOTH {
                visit(self.reaction.limit_jacobian(side, u))?;
            }
        }
        Ok(T::lit(1.1) * (-worst).max(T::zero()))
    }

    /// Sampled `max_i sum_j |df_i/du_j|` on the box, for the reaction step bound.
    pub fn max_abs_jacobian(&self) -> T {
        let n = self.dim();
        let mut m = T::zero();
        for i in 0..=64 {
            let u: Vec<T> = (0..n)
                .map(|k| self.cap[k] * halton::<T>(i + 1, k + 1))
                .collect();
            for x in s_nodes(self.transition_width(), 41) {
                m = m.max(self.reaction.jacobian(x, &u).transpose().norm1());
            }
        }
        let corner = self.cap.clone();
        for x in s_nodes(self.transition_width(), 41) {
            m = m.max(self.reaction.jacobian(x, &corner).transpose().norm1());
        }
        m
    }
}

fn check_cooperative<T: Real>(a: &Matrix<T>, side: Side) -> Result<()> {
    if a.min_off_diag() < -T::lit(COOP_TOL) {
        return Err(Error::config(format!(
            "(C3) violated: negative off-diagonal entry in A_{side} = {a:?}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(beta: f64, kappa: f64) -> PairParams {
        PairParams {
            beta_minus: [beta; 2],
            beta_plus: [beta; 2],
            kappa,
            w: 1.0,
            diffusivities: [1.0; 2],
        }
    }

    #[test]
    fn pair_limit_jacobian() {
        let m = CooperativeModel::cooperative_pair(pair(1.0, 2.0)).unwrap();
        let a = m.limit_jacobian(Side::Plus);
        let want = Matrix::from_rows(&[vec![-1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        assert_eq!(a, &want);
        assert!((stability_modulus(a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_symmetric_equilibrium() {
        let m = CooperativeModel::cooperative_pair(pair(1.0, 2.0)).unwrap();
        let u = m.u_star(Side::Plus).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-12 && (u[1] - 1.0).abs() < 1e-12);
        let m = CooperativeModel::cooperative_pair(pair(0.7, 0.3)).unwrap();
        for side in Side::BOTH {
            let u = m.u_star(side).unwrap();
            assert!((u[0] - 0.7).abs() < 1e-12 && (u[1] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_alpha_star() {
        let m = CooperativeModel::cooperative_pair(pair(1.0, 2.0)).unwrap();
        assert_eq!(m.cap(), &[2.0, 2.0]);
        assert!((m.alpha0() - 5.5).abs() < 1e-12, "alpha0 = {}", m.alpha0());
    }

    #[test]
    fn logistic_diagonal_alpha_star() {
        // f(u) = u (beta - u) on [0, beta]: diagonal beta - 2u bottoms out at -beta
        let beta = 0.8;
        let r = crate::models::reaction::ClosureReaction::homogeneous("l", move |u: f64| {
            u * (beta - u)
        });
        let v = ScalarAsVector(Arc::new(r));
        let m = CooperativeModel::from_reaction("l", Arc::new(v), vec![1.0], vec![beta]).unwrap();
        assert!((m.alpha0() - 1.1 * beta).abs() < 1e-6);
    }

    #[test]
    fn linear_quasimonotone_needs_no_shift() {
        let a = Matrix::from_rows(&[vec![0.5, 1.0], vec![0.2, 0.0]]).unwrap();
        let m = CooperativeModel::from_reaction(
            "lin",
            Arc::new(LinearReaction { a }),
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(m.alpha0(), 0.0);
    }

    #[test]
    fn pair_rejects_bad_parameters() {
        let e = CooperativeModel::cooperative_pair(pair(1.0, 0.0)).unwrap_err();
        assert!(e.to_string().contains("reducible"));
        let e = CooperativeModel::cooperative_pair(PairParams {
            beta_minus: [0.1, 0.1],
            beta_plus: [1.0, 1.0],
            kappa: 0.3,
            w: 1.0,
            diffusivities: [1.0; 2],
        });
        assert!(e.is_ok());
    }

    #[test]
    fn rejects_competitive_linearization() {
        let a = Matrix::from_rows(&[vec![1.0, -0.5], vec![-0.5, 1.0]]).unwrap();
        let e = CooperativeModel::from_reaction(
            "comp",
            Arc::new(LinearReaction { a }),
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        )
        .unwrap_err();
        assert!(e.to_string().contains("(C3) violated"));
    }

    #[test]
    fn fd_jacobian_matches_analytic() {
        let r = PairReaction {
            beta_minus: [0.25, 0.4],
            beta_plus: [1.0, 0.9],
            kappa: 0.3,
            w: 2.0,
        };
        for &(x, u) in &[(0.0, [0.1, 0.2]), (-3.0, [1.0, 0.5]), (4.0, [0.0, 0.0])] {
            let a = r.jacobian(x, &u);
            let n = crate::models::reaction::fd_jacobian(2, |v, o| r.eval(x, v, o), &u);
            assert!(a.max_abs_diff(&n) <= 1e-6 * a.norm1());
        }
    }

    /// One-component system built from a scalar growth law.
    #[derive(Debug)]
    struct ScalarAsVector(Arc<dyn crate::models::ScalarReaction<f64>>);

    impl VectorReaction<f64> for ScalarAsVector {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: f64, u: &[f64], out: &mut [f64]) {
            out[0] = self.0.eval(x, u[0]);
        }
        fn limit(&self, side: Side, u: &[f64], out: &mut [f64]) {
            out[0] = self.0.limit(side, u[0]);
        }
        fn name(&self) -> &str {
            "scalar"
        }
    }
}
