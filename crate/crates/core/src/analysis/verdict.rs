//! Pass/fail records for the long-time limit statements: spreading,
//! annihilation, attractivity and wave tails.
//!
//! Regions are given in lab coordinates `x` and scaled with `t`; comoving
//! trajectories are mapped back through `x = z + c t`. Sup-errors use grid
//! points only.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{Field, Frame, Trajectory};
use crate::models::{CooperativeModel, ScalarShiftModel, Side};
use crate::real::Real;
use crate::speeds::FrameSpeeds;
use crate::waves::WaveProfile;

/// Spreading and attractivity tolerance as a fraction of `u*_+`.
pub const SPREADING_TOL: f64 = 0.05;
/// Annihilation tolerance as a fraction of `u*_+`.
pub const ANNIHILATION_TOL: f64 = 0.01;
pub const SANDWICH_TOL: f64 = 1e-8;
/// Number of final evaluations over which the error must not increase.
pub const TAIL_CHECKS: usize = 3;
/// Increases smaller than this fraction of the tolerance count as flat.
pub const MONOTONE_SLACK: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    Spreading,
    Annihilation,
    Attractivity,
    WaveTails,
    Sandwich,
}

impl Clause {
    pub fn label(self) -> &'static str {
        match self {
            Clause::Spreading => "spreading",
            Clause::Annihilation => "annihilation",
            Clause::Attractivity => "attractivity",
            Clause::WaveTails => "wave-tails",
            Clause::Sandwich => "sandwich",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Clause {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "spreading" => Ok(Clause::Spreading),
            "annihilation" => Ok(Clause::Annihilation),
            "attractivity" => Ok(Clause::Attractivity),
            "wave" | "wave-tails" => Ok(Clause::WaveTails),
            "sandwich" => Ok(Clause::Sandwich),
            other => Err(Error::config(format!("unknown clause `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<T = f64> {
    pub clause: Clause,
    pub region: String,
    /// Sup-error at the last evaluated time.
    pub sup_error: T,
    pub tolerance: T,
    pub pass: bool,
    /// Evaluation times and the sup-error curve over them.
    pub times: Vec<T>,
    pub errors: Vec<T>,
    /// Where the final sup-error is attained (lab coordinate).
    pub worst_location: Option<T>,
    pub tail_nonincreasing: bool,
    pub notes: Vec<String>,
}

impl<T: Real> Verdict<T> {
    pub fn status(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// `(final error <= tol, last TAIL_CHECKS errors nonincreasing)`.
fn limit_rule<T: Real>(errors: &[T], tol: T) -> (bool, bool) {
    let tail = &errors[errors.len().saturating_sub(TAIL_CHECKS)..];
    let slack = tol * T::lit(MONOTONE_SLACK);
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0] + slack);
    let last = *errors.last().expect("at least one evaluation");
    (last <= tol, nonincreasing)
}

/// Per-snapshot sup of `err` over the grid points of `regions(t)`.
struct Sweep<T> {
    times: Vec<T>,
    errors: Vec<T>,
    worst: Vec<Option<T>>,
    empty: Vec<bool>,
    truncated: bool,
}

fn sweep<T: Real>(
    traj: &Trajectory<T>,
    c_frame: T,
    t_min: T,
    regions: impl Fn(T) -> Vec<(T, T)>,
    err: impl Fn(T, T, &Field<T>, usize) -> T,
) -> Result<Sweep<T>> {
    let mut out = Sweep {
        times: Vec::new(),
        errors: Vec::new(),
        worst: Vec::new(),
        empty: Vec::new(),
        truncated: false,
    };
    let eps_t = T::tol_floor(1e-9) * t_min.abs().max(T::one());
    for (t, f) in traj.iter() {
        if t < t_min - eps_t {
            continue;
        }
        let offset = match traj.frame {
            Frame::Lab => T::zero(),
            Frame::Comoving => c_frame * t,
        };
        let g = f.grid();
        let mut sup = T::zero();
        let mut at = None;
        let mut any = false;
        for (lo, hi) in regions(t) {
            if lo > hi {
                continue;
            }
            let (zlo, zhi) = (lo - offset, hi - offset);
            if zlo < g.x_min() || zhi > g.x_max() {
                out.truncated = true;
            }
            for i in g.indices_in(zlo, zhi) {
                any = true;
                let x = g.x(i) + offset;
                let e = err(t, x, f, i);
                if !(e <= sup) {
                    sup = if e.is_nan() { T::infinity() } else { e };
                    at = Some(x);
                }
            }
        }
        out.times.push(t);
        out.errors.push(sup);
        out.worst.push(at);
        out.empty.push(!any);
    }
    if out.times.is_empty() {
        return Err(Error::config(format!(
            "no snapshot at t >= t_min = {t_min}; extend domain or t_min"
        )));
    }
    Ok(out)
}

fn describe<T: Real>(intervals: &[(T, T)], t_min: T) -> String {
    let parts: Vec<String> = intervals
        .iter()
        .map(|(a, b)| format!("t*[{:.6}, {:.6}]", a.to_f64_lossy(), b.to_f64_lossy()))
        .collect();
    format!("{}, t >= {}", parts.join(" U "), t_min.to_f64_lossy())
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    if !(tol >= T::zero()) || !tol.is_finite() {
        return Err(Error::config(format!("tolerance must be >= 0, got {tol}")));
    }
    Ok(())
}

/// Sup-error curve judged by the limit rule: small at the final time and not
/// increasing over the last three evaluations.
fn limit_verdict<T: Real>(
    clause: Clause,
    region: String,
    s: Sweep<T>,
    tol: T,
    mut notes: Vec<String>,
) -> Result<Verdict<T>> {
    if s.empty[0] {
        return Err(Error::config(format!(
            "{clause} region is empty at t = {}; extend domain or t_min",
            s.times[0]
        )));
    }
    if s.times.len() < TAIL_CHECKS {
        return Err(Error::config(format!(
            "{clause} needs at least {TAIL_CHECKS} snapshots at t >= t_min, got {}",
            s.times.len()
        )));
    }
    if s.truncated {
        notes.push("region clipped to the computational domain".into());
    }
    let (small, nonincreasing) = limit_rule(&s.errors, tol);
    Ok(Verdict {
        clause,
        region,
        sup_error: *s.errors.last().unwrap(),
        tolerance: tol,
        pass: small && nonincreasing,
        worst_location: *s.worst.last().unwrap(),
        tail_nonincreasing: nonincreasing,
        times: s.times,
        errors: s.errors,
        notes,
    })
}

fn sup_abs<T: Real>(f: &Field<T>, i: usize) -> T {
    (0..f.n_components()).fold(T::zero(), |m, k| m.max(f.get(k, i).abs()))
}

/// Scalar spreading: `u -> u*_+ 1{x > ct} + u*_- 1{x < ct}` on `t E_{eps,c}`,
/// `E = [-c*_- + eps, min(c, c*_-) - eps] U [c + eps, c*_+ - eps]`.
pub fn spreading_verdict<T: Real>(
    traj: &Trajectory<T>,
    model: &ScalarShiftModel<T>,
    speeds: &FrameSpeeds<T>,
    epsilon: T,
    t_min: T,
    tol: T,
) -> Result<Verdict<T>> {
    check_tol(tol)?;
    let (c, cp, cm) = (model.c, speeds.rightward, speeds.leftward);
    if !(c < cp) {
        return Err(Error::Hypotheses(format!(
            "spreading needs c < c*(+inf), got c = {c}, c*(+inf) = {cp}"
        )));
    }
    let half = T::lit(0.5);
    let eps_max = half * cm.min(cp - c);
    if !(epsilon > T::zero() && epsilon < eps_max) {
        return Err(Error::config(format!(
            "spreading needs 0 < epsilon < min(c*(-inf), c*(+inf) - c)/2 = {eps_max}, got {epsilon}"
        )));
    }
    let up = model.u_star(Side::Plus)?;
    let um = model.u_star(Side::Minus)?;
    let intervals = [(-cm + epsilon, c.min(cm) - epsilon), (c + epsilon, cp - epsilon)];
    let s = sweep(
        traj,
        c,
        t_min,
        |t| intervals.iter().map(|&(a, b)| (a * t, b * t)).collect(),
        |t, x, f, i| {
            let target = if x - c * t >= T::zero() { up } else { um };
            (f.get(0, i) - target).abs()
        },
    )?;
    limit_verdict(Clause::Spreading, describe(&intervals, t_min), s, tol, Vec::new())
}

/// System spreading: `u -> u*_+` on `[alpha, t (c*_+ - eps)]` and
/// `u -> u*_-` on `[t (-c*_- + eps), -alpha]`, for `t >= alpha`.
pub fn system_spreading_verdict<T: Real>(
    traj: &Trajectory<T>,
    model: &CooperativeModel<T>,
    speeds: &FrameSpeeds<T>,
    epsilon: T,
    alpha: T,
    t_min: T,
    tol: T,
) -> Result<Verdict<T>> {
    check_tol(tol)?;
    let (cp, cm) = (speeds.rightward, speeds.leftward);
    let eps_max = cp.min(cm);
    if !(epsilon > T::zero() && epsilon < eps_max) {
        return Err(Error::config(format!(
            "spreading needs 0 < epsilon < min(c*(+inf), c*(-inf)) = {eps_max}, got {epsilon}"
        )));
    }
    if !(alpha > T::zero()) {
        return Err(Error::config(format!("alpha must be positive, got {alpha}")));
    }
    let up = model.u_star(Side::Plus)?.to_vec();
    let um = model.u_star(Side::Minus)?.to_vec();
    let t_start = t_min.max(alpha);
    let s = sweep(
        traj,
        T::zero(),
        t_start,
        |t| vec![(alpha, t * (cp - epsilon)), (t * (-cm + epsilon), -alpha)],
        |_, x, f, i| {
            let target = if x >= T::zero() { &up } else { &um };
            (0..f.n_components()).fold(T::zero(), |m, k| m.max((f.get(k, i) - target[k]).abs()))
        },
    )?;
    let region = format!(
        "[{:.6}, t*{:.6}] U [t*{:.6}, {:.6}], t >= {}",
        alpha.to_f64_lossy(),
        (cp - epsilon).to_f64_lossy(),
        (-cm + epsilon).to_f64_lossy(),
        (-alpha).to_f64_lossy(),
        t_start.to_f64_lossy()
    );
    limit_verdict(Clause::Spreading, region, s, tol, Vec::new())
}

/// Sup of `|u|` beyond `t (right + eps)` and below `-t (left + eps)`; pass iff
/// small at the final time.
fn annihilation<T: Real>(
    traj: &Trajectory<T>,
    c_frame: T,
    right: T,
    left: T,
    epsilon: T,
    t_min: T,
    tol: T,
) -> Result<Verdict<T>> {
    check_tol(tol)?;
    if !(epsilon > T::zero()) {
        return Err(Error::config(format!("epsilon must be positive, got {epsilon}")));
    }
    let far = T::max_value();
    let (a, b) = (right + epsilon, left + epsilon);
    let s = sweep(
        traj,
        c_frame,
        t_min,
        |t| vec![(a * t, far), (-far, -b * t)],
        |_, _, f, i| sup_abs(f, i),
    )?;
    if *s.empty.last().unwrap() {
        return Err(Error::config(format!(
            "annihilation region misses the domain at t = {}; extend domain or t_min",
            s.times.last().unwrap()
        )));
    }
    let mut notes = vec!["region truncated to the computational domain".to_string()];
    if let Some((_, f0)) = traj.iter().next() {
        let n = f0.grid().len();
        if sup_abs(f0, 0) > T::zero() || sup_abs(f0, n - 1) > T::zero() {
            notes.push("initial data not compactly supported inside the domain".into());
        }
    }
    let last = *s.errors.last().unwrap();
    let (_, nonincreasing) = limit_rule(&s.errors, tol);
    Ok(Verdict {
        clause: Clause::Annihilation,
        region: format!(
            "x >= t*{:.6} or x <= -t*{:.6}, t >= {}",
            a.to_f64_lossy(),
            b.to_f64_lossy(),
            t_min.to_f64_lossy()
        ),
        sup_error: last,
        tolerance: tol,
        pass: last <= tol,
        worst_location: *s.worst.last().unwrap(),
        tail_nonincreasing: nonincreasing,
        times: s.times,
        errors: s.errors,
        notes,
    })
}

/// Scalar annihilation beyond `t (max(c, c*_+) + eps)` and `-t (c*_- + eps)`.
pub fn annihilation_verdict<T: Real>(
    traj: &Trajectory<T>,
    model: &ScalarShiftModel<T>,
    speeds: &FrameSpeeds<T>,
    epsilon: T,
    t_min: T,
    tol: T,
) -> Result<Verdict<T>> {
    let right = model.c.max(speeds.rightward);
    annihilation(traj, model.c, right, speeds.leftward, epsilon, t_min, tol)
}

/// System annihilation beyond `t (c*_+ + eps)` and `-t (c*_- + eps)`.
pub fn system_annihilation_verdict<T: Real>(
    traj: &Trajectory<T>,
    speeds: &FrameSpeeds<T>,
    epsilon: T,
    t_min: T,
    tol: T,
) -> Result<Verdict<T>> {
    annihilation(traj, T::zero(), speeds.rightward, speeds.leftward, epsilon, t_min, tol)
}

/// Scalar attractivity: `u(t, x) -> W(x - ct)` on
/// `[t (-c*_- + eps), t (c*_+ - eps)]`.
pub fn attractivity_verdict<T: Real>(
    traj: &Trajectory<T>,
    wave: &WaveProfile<T>,
    model: &ScalarShiftModel<T>,
    speeds: &FrameSpeeds<T>,
    epsilon: T,
    t_min: T,
    tol: T,
) -> Result<Verdict<T>> {
    check_tol(tol)?;
    let (c, cp, cm) = (model.c, speeds.rightward, speeds.leftward);
    if !(c < cp.min(cm)) {
        return Err(Error::Hypotheses(format!(
            "attractivity needs c < min(c*(+inf), c*(-inf)), got c = {c}, speeds {cp}, {cm}"
        )));
    }
    if !model.is_monotone() || !model.is_subhomogeneous() {
        return Err(Error::Hypotheses(format!(
            "attractivity needs f nondecreasing and subhomogeneous in u; {} is not",
            model.kind()
        )));
    }
    if (wave.speed - c).abs() > T::tol_floor(1e-12) * c.abs().max(T::one()) {
        return Err(Error::config(format!(
            "wave speed {} differs from the model's c = {c}",
            wave.speed
        )));
    }
    let eps_max = (cp - c).min(cm + c);
    if !(epsilon > T::zero() && epsilon < eps_max) {
        return Err(Error::config(format!(
            "attractivity needs 0 < epsilon < min(c*(+inf) - c, c*(-inf) + c) = {eps_max}, got {epsilon}"
        )));
    }
    let interval = [(-cm + epsilon, cp - epsilon)];
    let w = &wave.values;
    let s = sweep(
        traj,
        c,
        t_min,
        |t| vec![(interval[0].0 * t, interval[0].1 * t)],
        |t, x, f, i| (f.get(0, i) - w.interpolate_at(0, x - c * t)).abs(),
    )?;
    let mut notes = Vec::new();
    if !wave.converged {
        notes.push("wave profile did not meet its drift tolerance".into());
    }
    limit_verdict(Clause::Attractivity, describe(&interval, t_min), s, tol, notes)
}

/// System attractivity: `u(t, x) -> W(x)` on `[t (-c*_- + eps), t (c*_+ - eps)]`.
pub fn system_attractivity_verdict<T: Real>(
    traj: &Trajectory<T>,
    wave: &WaveProfile<T>,
    speeds: &FrameSpeeds<T>,
    epsilon: T,
    t_min: T,
    tol: T,
) -> Result<Verdict<T>> {
    check_tol(tol)?;
    let (cp, cm) = (speeds.rightward, speeds.leftward);
    let eps_max = cp.min(cm);
    if !(epsilon > T::zero() && epsilon < eps_max) {
        return Err(Error::config(format!(
            "attractivity needs 0 < epsilon < min(c*(+inf), c*(-inf)) = {eps_max}, got {epsilon}"
        )));
    }
    let interval = [(-cm + epsilon, cp - epsilon)];
    let w = &wave.values;
    let s = sweep(
        traj,
        T::zero(),
        t_min,
        |t| vec![(interval[0].0 * t, interval[0].1 * t)],
        |_, x, f, i| {
            (0..f.n_components()).fold(T::zero(), |m, k| {
                m.max((f.get(k, i) - w.interpolate_at(k, x)).abs())
            })
        },
    )?;
    limit_verdict(Clause::Attractivity, describe(&interval, t_min), s, tol, Vec::new())
}

/// Tails of a relaxed profile against the limiting equilibria. Passes only
/// for a converged, non-oscillating profile.
pub fn wave_tails_verdict<T: Real>(wave: &WaveProfile<T>, u_plus: &[T], u_minus: &[T], tol: T) -> Result<Verdict<T>> {
    check_tol(tol)?;
    let err = wave.tail_error(u_plus, u_minus);
    let mut notes = vec![format!(
        "final drift {:e} after t = {}",
        wave.final_drift.to_f64_lossy(),
        wave.time_used.to_f64_lossy()
    )];
    if !wave.converged {
        notes.push("relaxation did not converge".into());
    }
    if wave.oscillating {
        notes.push("period-two oscillation detected".into());
    }
    Ok(Verdict {
        clause: Clause::WaveTails,
        region: "outer 5% of interior cells at both ends".into(),
        sup_error: err,
        tolerance: tol,
        pass: err <= tol && wave.converged && !wave.oscillating,
        times: vec![wave.time_used],
        errors: vec![err],
        worst_location: None,
        tail_nonincreasing: true,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    fn speeds(plus: f64, minus: f64) -> FrameSpeeds {
        FrameSpeeds {
            rightward: plus,
            leftward: minus,
            comoving_right: plus,
            comoving_left: minus,
        }
    }

    fn constant_traj(value: f64, times: &[f64]) -> Trajectory {
        let g = Grid1D::<f64>::new(-50.0, 50.0, 201).unwrap();
        let mut tr = Trajectory::new("const", Frame::Lab);
        for &t in times {
            tr.push(t, Field::constant(g, 1, value)).unwrap();
        }
        tr
    }

    #[test]
    fn limit_rule_cases() {
        assert_eq!(limit_rule(&[0.3, 0.2, 0.01], 0.05), (true, true));
        assert_eq!(limit_rule(&[0.01, 0.02, 0.03], 0.05), (true, false));
        assert_eq!(limit_rule(&[0.3, 0.2, 0.1], 0.05), (false, true));
        // flat within the slack
        assert_eq!(limit_rule(&[1e-9, 1.00001e-9, 1e-9], 0.05), (true, true));
    }

    #[test]
    fn zero_trajectory_is_annihilated() {
        let tr = constant_traj(0.0, &[0.0, 1.0, 2.0, 3.0]);
        let v = system_annihilation_verdict(&tr, &speeds(2.0, 2.0), 0.5, 1.0, 0.01).unwrap();
        assert!(v.pass);
        assert_eq!(v.sup_error, 0.0);
    }

    #[test]
    fn t_min_past_end_is_an_error() {
        let tr = constant_traj(1.0, &[0.0, 1.0, 2.0]);
        let m = ScalarShiftModel::<f64>::fisher();
        let e = spreading_verdict(&tr, &m, &speeds(2.0, 2.0), 0.5, 10.0, 0.05).unwrap_err();
        assert!(e.to_string().contains("extend domain or t_min"));
    }

    #[test]
    fn constant_state_spreads() {
        let tr = constant_traj(1.0, &[0.0, 5.0, 10.0, 15.0]);
        let m = ScalarShiftModel::<f64>::fisher();
        let v = spreading_verdict(&tr, &m, &speeds(2.0, 2.0), 0.5, 5.0, 0.05).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.times.len(), 3);
    }

    #[test]
    fn premise_failures() {
        let tr = constant_traj(1.0, &[0.0, 1.0, 2.0]);
        let m = ScalarShiftModel::<f64>::fisher().with_c(3.0);
        let e = spreading_verdict(&tr, &m, &speeds(2.0, 2.0), 0.2, 0.0, 0.05).unwrap_err();
        assert!(matches!(e, Error::Hypotheses(_)));
        let m = ScalarShiftModel::<f64>::fisher();
        assert!(spreading_verdict(&tr, &m, &speeds(2.0, 2.0), 1.5, 0.0, 0.05).is_err());
    }
}
