//! Sampled checks of the standing hypotheses on a model's reaction.

use crate::linalg::{stability_modulus, Matrix};
use crate::models::cooperative::CooperativeModel;
use crate::models::reaction::Side;
use crate::models::scalar::ScalarShiftModel;
use crate::real::Real;

/// Default violation tolerance for sampled checks.
pub const ASSUMPTION_TOL: f64 = 1e-8;

/// `i`-th point of the van der Corput sequence in the `k`-th prime base.
pub fn halton<T: Real>(mut i: usize, k: usize) -> T {
    const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let base = PRIMES[k % PRIMES.len()];
    let mut f = 1.0f64;
    let mut r = 0.0f64;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    T::lit(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClauseCheck {
    pub name: String,
    pub pass: bool,
    /// Largest amount by which the inequality failed (negative means slack).
    pub worst_violation: f64,
    /// Sample coordinates where the worst violation occurred.
    pub worst_location: Vec<f64>,
    pub tolerance: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssumptionReport {
    pub clauses: Vec<ClauseCheck>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseCheck> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClauseCheck> {
        self.clauses.iter().filter(|c| !c.pass)
    }
}

/// Running worst case of one clause.
struct Tracker {
    name: &'static str,
    worst: f64,
    at: Vec<f64>,
    samples: usize,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            worst: f64::NEG_INFINITY,
            at: Vec::new(),
            samples: 0,
        }
    }

    fn see<T: Real>(&mut self, violation: T, at: &[T]) {
        self.samples += 1;
        let v = violation.to_f64_lossy();
        if v > self.worst || v.is_nan() {
            self.worst = if v.is_nan() { f64::INFINITY } else { v };
            self.at = at.iter().map(|x| x.to_f64_lossy()).collect();
        }
    }

    fn finish(self, tol: f64) -> ClauseCheck {
        ClauseCheck {
            name: self.name.to_string(),
            pass: self.worst <= tol,
            worst_violation: self.worst,
            worst_location: self.at,
            tolerance: tol,
            samples: self.samples,
        }
    }
}

/// Distances `sup_u |f(X, u) - f_limit(u)|` at `X = 2w, 4w, ..., 64w`; the
/// violation is the largest increase along the sequence or the final value.
fn limit_convergence<T: Real>(
    name: &'static str,
    width: T,
    gap: impl Fn(T) -> T,
) -> ClauseCheck {
    let mut t = Tracker::new(name);
    let dists: Vec<(T, T)> = (1..=6)
        .map(|k| {
            let x = width * T::lit(2f64.powi(k));
            (x, gap(x))
        })
        .collect();
    for w in dists.windows(2) {
        t.see(w[1].1 - w[0].1, &[w[1].0]);
    }
    let (x_last, d_last) = *dists.last().unwrap();
    t.see(d_last, &[x_last]);
    t.finish(ASSUMPTION_TOL)
}

impl<T: Real> ScalarShiftModel<T> {
    /// Samples `(s, u, alpha)` on a Halton sequence over the habitat window
    /// `|s| <= 20 w` and the box `[0, cap]`.
    pub fn verify_assumptions(&self, sample_budget: usize) -> AssumptionReport {
        let width = self.transition_width();
        let reach = T::lit(20.0) * width;
        let cap = self.cap();
        let mut zero = Tracker::new("f(s,0)=0");
        let mut nonneg = Tracker::new("f>=0 on box");
        let mut boxmap = Tracker::new("box mapping f<=cap");
        let mut subh = Tracker::new("subhomogeneity");
        let mut linb = Tracker::new("linear bound f<=f_u(s,0)u");
        for i in 1..=sample_budget.max(1) {
            let s = -reach + (reach + reach) * halton::<T>(i, 0);
            let u = cap * halton::<T>(i, 1);
            let a = halton::<T>(i, 2);
            let f = self.f(s, u);
            zero.see(self.f(s, T::zero()).abs(), &[s]);
            nonneg.see(-f, &[s, u]);
            boxmap.see(f - cap, &[s, u]);
            subh.see(a * f - self.f(s, a * u), &[s, u, a]);
            linb.see(f - self.reaction().du(s, T::zero()) * u, &[s, u]);
        }
        let tol = ASSUMPTION_TOL;
        let mut clauses = vec![
            zero.finish(tol),
            nonneg.finish(tol),
            boxmap.finish(tol),
            subh.finish(tol),
            linb.finish(tol),
        ];
        let us: Vec<T> = (0..=200).map(|j| cap * T::from_count(j) / T::lit(200.0)).collect();
        for (side, name) in [(Side::Plus, "limit convergence +"), (Side::Minus, "limit convergence -")] {
            let sign = T::lit(side.sign());
            clauses.push(limit_convergence(name, width, |x| {
                us.iter().fold(T::zero(), |m, &u| {
                    m.max((self.f(sign * x, u) - self.f_limit(side, u)).abs())
                })
            }));
        }
        for (side, name) in [(Side::Plus, "(B+) b_+ > 1"), (Side::Minus, "(B-) b_- > 1")] {
            let mut t = Tracker::new(name);
            t.see(T::one() - self.limit_jacobian(side), &[]);
            // equality is not instability
            let mut c = t.finish(tol);
            c.pass = c.worst_violation < 0.0;
            clauses.push(c);
        }
        AssumptionReport { clauses }
    }
}

impl<T: Real> CooperativeModel<T> {
    /// Samples `(x, u, alpha)` on a Halton sequence over `|x| <= 20 w` and the
    /// box `[0, M]`.
    pub fn verify_assumptions(&self, sample_budget: usize) -> AssumptionReport {
        let n = self.dim();
        let width = self.transition_width();
        let reach = T::lit(20.0) * width;
        let cap = self.cap().to_vec();
        let r = self.reaction();
        let mut zero = Tracker::new("f(x,0)=0");
        let mut coop = Tracker::new("(C3) cooperativity");
        let mut c4 = Tracker::new("(C4) f(x,aM)<<0");
        let mut subh = Tracker::new("subhomogeneity");
        let mut linb = Tracker::new("linear bound f<=D_uf(x,0)u");
        let zeros = vec![T::zero(); n];
        let mut out = vec![T::zero(); n];
        let mut out2 = vec![T::zero(); n];
        for i in 1..=sample_budget.max(1) {
            let x = -reach + (reach + reach) * halton::<T>(i, 0);
            let u: Vec<T> = (0..n).map(|k| cap[k] * halton::<T>(i, k + 1)).collect();
            let a = halton::<T>(i, n + 1);
            let mut loc = vec![x];
            loc.extend_from_slice(&u);
            r.eval(x, &zeros, &mut out);
            zero.see(out.iter().fold(T::zero(), |m, v| m.max(v.abs())), &[x]);
            coop.see(-r.jacobian(x, &u).min_off_diag().min(T::zero()), &loc);
            let big = T::one() + T::lit(2.0) * a;
            let am: Vec<T> = cap.iter().map(|m| big * *m).collect();
            r.eval(x, &am, &mut out);
            coop_max(&mut c4, &out, &[x, big]);
            r.eval(x, &u, &mut out);
            let au: Vec<T> = u.iter().map(|v| a * *v).collect();
            r.eval(x, &au, &mut out2);
            let gap: Vec<T> = out.iter().zip(&out2).map(|(f, fa)| a * *f - *fa).collect();
            let mut loc_a = loc.clone();
            loc_a.push(a);
            coop_max(&mut subh, &gap, &loc_a);
            let lin = r.jacobian(x, &zeros).mul_vec(&u);
            let gap: Vec<T> = out.iter().zip(&lin).map(|(f, l)| *f - *l).collect();
            coop_max(&mut linb, &gap, &loc);
        }
        let tol = ASSUMPTION_TOL;
        let mut clauses = vec![
            zero.finish(tol),
            coop.finish(tol),
            c4.finish(tol),
            subh.finish(tol),
            linb.finish(tol),
        ];
        for side in Side::BOTH {
            let a: &Matrix<T> = self.limit_jacobian(side);
            let mut irr = Tracker::new(if side == Side::Plus {
                "irreducible A_+"
            } else {
                "irreducible A_-"
            });
            irr.see(if a.is_irreducible() { T::zero() } else { T::one() }, &[] as &[T]);
            clauses.push(irr.finish(tol));
            let mut st = Tracker::new(if side == Side::Plus {
                "(C+) s(A_+) > 0"
            } else {
                "(C-) s(A_-) > 0"
            });
            let s = stability_modulus(a).unwrap_or(T::nan());
            st.see(-s, &[] as &[T]);
            let mut c = st.finish(tol);
            c.pass = c.worst_violation < 0.0;
            clauses.push(c);
        }
        let probes: Vec<Vec<T>> = (0..=64)
            .map(|i| (0..n).map(|k| cap[k] * halton::<T>(i, k + 1)).collect())
            .collect();
        for (side, name) in [(Side::Plus, "limit convergence +"), (Side::Minus, "limit convergence -")] {
            let sign = T::lit(side.sign());
            clauses.push(limit_convergence(name, width, |x| {
                let mut a = vec![T::zero(); n];
                let mut b = vec![T::zero(); n];
                probes.iter().fold(T::zero(), |m, u| {
                    r.eval(sign * x, u, &mut a);
                    r.limit(side, u, &mut b);
                    a.iter().zip(&b).fold(m, |m, (p, q)| m.max((*p - *q).abs()))
                })
            }));
        }
        AssumptionReport { clauses }
    }
}

fn coop_max<T: Real>(t: &mut Tracker, v: &[T], at: &[T]) {
    let m = v.iter().copied().fold(T::neg_infinity(), T::max);
    t.see(m, at);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::cooperative::PairParams;
    use crate::models::reaction::ClosureReaction;
    use crate::models::scalar::{LogisticParams, RickerParams};
    use std::sync::Arc;

    #[test]
    fn halton_base_two() {
        let v: Vec<f64> = (1..=4).map(|i| halton(i, 0)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
        assert!((halton::<f64>(1, 1) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn logistic_passes_everything() {
        let m = ScalarShiftModel::shifted_logistic(LogisticParams {
            beta_minus: 0.25,
            beta_plus: 1.0,
            w: 1.0,
            mu: 3.0,
            d: 1.0,
            tau: 0.5,
            c: 1.5,
        })
        .unwrap();
        let rep = m.verify_assumptions(4000);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        // margin alpha u^2 (1 - alpha) / mu is never negative
        assert!(rep.clause("subhomogeneity").unwrap().worst_violation <= 1e-15);
        assert_eq!(rep.clause("f(s,0)=0").unwrap().worst_violation, 0.0);
    }

    #[test]
    fn ricker_passes_everything() {
        let m = ScalarShiftModel::shifted_ricker(RickerParams {
            p_minus: 1.5,
            p_plus: 5.0,
            w: 1.0,
            mu: 1.0,
            d: 1.0,
            tau: 0.0,
            c: 0.0,
        })
        .unwrap();
        let rep = m.verify_assumptions(4000);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn squared_growth_fails_linear_bound() {
        let r = ClosureReaction::homogeneous("square", |u: f64| u * u);
        let m = ScalarShiftModel::from_reaction("square", Arc::new(r), 1.0, 1.0, 0.0, 0.0, 2.0)
            .unwrap();
        let rep = m.verify_assumptions(2000);
        let lin = rep.clause("linear bound f<=f_u(s,0)u").unwrap();
        assert!(!lin.pass);
        // worst case at u = cap = 2: 4 - 0
        assert!(lin.worst_violation > 3.9);
        assert!(!rep.clause("(B+) b_+ > 1").unwrap().pass);
    }

    #[test]
    fn pair_passes_everything() {
        let m = CooperativeModel::cooperative_pair(PairParams {
            beta_minus: [0.25, 0.25],
            beta_plus: [1.0, 1.0],
            kappa: 0.3,
            w: 1.0,
            diffusivities: [1.0, 1.0],
        })
        .unwrap();
        let rep = m.verify_assumptions(4000);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn report_pass_matches_tolerance() {
        let m = ScalarShiftModel::<f64>::fisher();
        for c in m.verify_assumptions(500).clauses {
            if !c.name.starts_with('(') {
                assert_eq!(c.pass, c.worst_violation <= c.tolerance, "{}", c.name);
            }
        }
    }
}
