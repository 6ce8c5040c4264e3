//! Forced travelling waves `W(x - c t)` of the delayed scalar model and
//! steady states `W(x)` of cooperative systems, found by relaxing the
//! comoving-frame dynamics from a constant supersolution.

use crate::error::{Error, Result};
use crate::grid::{shift_into, Field, Frame, Grid1D};
use crate::models::{CooperativeModel, ScalarShiftModel, Side};
use crate::real::Real;
use crate::sim::{ScalarStepper, SimConfig, SimState, SystemStepper};

/// Boundary cells left out of tail averages.
pub const TAIL_SKIP: usize = 10;
/// Share of the interior averaged for each tail.
pub const TAIL_FRACTION: f64 = 0.05;
/// Headroom of the starting supersolution over the larger equilibrium.
pub const SUPERSOLUTION_FACTOR: f64 = 1.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxConfig<T = f64> {
    pub dt: T,
    /// Stop once `sup |u(t + Delta) - u(t)| / Delta` drops below this.
    pub tol_steady: T,
    pub t_max: T,
    /// The check interval `Delta`.
    pub interval: T,
}

impl<T: Real> RelaxConfig<T> {
    pub fn new(dt: T, tol_steady: T, t_max: T) -> Self {
        Self {
            dt,
            tol_steady,
            t_max,
            interval: T::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveProfile<T = f64> {
    pub values: Field<T>,
    pub speed: T,
    pub residual_sup: T,
    /// Mean over the right tail window, per component.
    pub tail_plus: Vec<T>,
    pub tail_minus: Vec<T>,
    pub converged: bool,
    /// Period-two pattern between successive checks.
    pub oscillating: bool,
    pub time_used: T,
    pub final_drift: T,
    /// Largest `sup (u(t + Delta) - u(t))` seen; nonpositive for a monotone descent.
    pub max_increase: T,
    pub checks: usize,
}

impl<T: Real> WaveProfile<T> {
    pub fn grid(&self) -> &Grid1D<T> {
        self.values.grid()
    }

    /// Writes `z,W1[,W2..]`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.values.n_components();
        let header: Vec<String> = std::iter::once("z".to_string())
            .chain((1..=n).map(|k| format!("W{k}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.grid().len() {
            let mut row = vec![crate::grid::fmt_sig17(self.grid().x(i))];
            for k in 0..n {
                row.push(crate::grid::fmt_sig17(self.values.get(k, i)));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Largest gap between measured tails and the given equilibria.
    pub fn tail_error(&self, u_plus: &[T], u_minus: &[T]) -> T {
        let gap = |a: &[T], b: &[T]| {
            a.iter()
                .zip(b)
                .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
        };
        gap(&self.tail_plus, u_plus).max(gap(&self.tail_minus, u_minus))
    }
}

/// Tail means per component: outer 5% of interior cells, skipping 10
/// boundary cells on each side.
pub fn tail_means<T: Real>(f: &Field<T>) -> Result<(Vec<T>, Vec<T>)> {
    let n = f.grid().len();
    if n < 2 * TAIL_SKIP + 2 {
        return Err(Error::config("grid too small for tail windows"));
    }
    let interior = n - 2 * TAIL_SKIP;
    let k = ((interior as f64 * TAIL_FRACTION).round() as usize).max(1);
    let mean = |s: &[T]| s.iter().copied().sum::<T>() / T::from_count(s.len());
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for c in 0..f.n_components() {
        let v = f.component(c);
        minus.push(mean(&v[TAIL_SKIP..TAIL_SKIP + k]));
        plus.push(mean(&v[n - TAIL_SKIP - k..n - TAIL_SKIP]));
    }
    Ok((plus, minus))
}

/// Sup of the discrete steady comoving equation
/// `d W'' + c W' - mu W + mu f(z, W(z + c tau))` over interior cells.
pub fn steady_residual<T: Real>(profile: &Field<T>, model: &ScalarShiftModel<T>) -> Result<T> {
    let g = profile.grid();
    let n = g.len();
    if n < 7 {
        return Err(Error::config("steady_residual needs at least 5 interior points"));
    }
    let w = profile.component(0);
    let mut lag = vec![T::zero(); n];
    shift_into(w, g, model.c * model.tau, &mut lag);
    let dx = g.dx();
    let two = T::lit(2.0);
    let mut sup = T::zero();
    for i in 1..n - 1 {
        let wxx = (w[i - 1] - two * w[i] + w[i + 1]) / (dx * dx);
        let wx = (w[i + 1] - w[i - 1]) / (two * dx);
        let r = model.d * wxx + model.c * wx - model.mu * w[i] + model.mu * model.f(g.x(i), lag[i]);
        sup = sup.max(r.abs());
    }
    Ok(sup)
}

/// Sup over interior cells and components of `D W'' + f(x, W)`.
pub fn system_residual<T: Real>(profile: &Field<T>, model: &CooperativeModel<T>) -> Result<T> {
    let g = profile.grid();
    let n = g.len();
    if n < 7 {
        return Err(Error::config("system_residual needs at least 5 interior points"));
    }
    let m = model.dim();
    let dx = g.dx();
    let two = T::lit(2.0);
    let mut u = vec![T::zero(); m];
    let mut fu = vec![T::zero(); m];
    let mut sup = T::zero();
    for i in 1..n - 1 {
        for k in 0..m {
            u[k] = profile.get(k, i);
        }
        model.reaction().eval(g.x(i), &u, &mut fu);
        for k in 0..m {
            let c = profile.component(k);
            let wxx = (c[i - 1] - two * c[i] + c[i + 1]) / (dx * dx);
            sup = sup.max((model.diffusivities()[k] * wxx + fu[k]).abs());
        }
    }
    Ok(sup)
}

/// Outcome of relaxation before residual and tails are attached.
struct Relaxed<T> {
    field: Field<T>,
    converged: bool,
    oscillating: bool,
    time_used: T,
    final_drift: T,
    max_increase: T,
    checks: usize,
}

fn sup_diff<T: Real>(a: &Field<T>, b: &Field<T>) -> (T, T) {
    a.values()
        .iter()
        .zip(b.values())
        .fold((T::zero(), T::neg_infinity()), |(m, inc), (x, y)| {
            (m.max((*x - *y).abs()), inc.max(*x - *y))
        })
}

fn relax<T: Real>(
    mut state: SimState<T>,
    cfg: &RelaxConfig<T>,
    mut step: impl FnMut(&mut SimState<T>, usize) -> Result<()>,
) -> Result<Relaxed<T>> {
    if !(cfg.tol_steady > T::zero()) || !(cfg.t_max > T::zero()) || !(cfg.interval > T::zero()) {
        return Err(Error::config("relaxation needs positive tol_steady, t_max and interval"));
    }
    let per_check = (cfg.interval / cfg.dt).round().to_usize().unwrap_or(1).max(1);
    let delta = T::from_count(per_check) * cfg.dt;
    let max_checks = (cfg.t_max / delta).ceil().to_usize().unwrap_or(0).max(1);
    let mut prev = state.current.clone();
    let mut prev_prev: Option<Field<T>> = None;
    let mut max_increase = T::neg_infinity();
    let mut drift = T::infinity();
    let mut oscillating = false;
    let mut step_index = 0usize;
    for check in 1..=max_checks {
        for _ in 0..per_check {
            step(&mut state, step_index)?;
            step_index += 1;
        }
        let (d, inc) = sup_diff(&state.current, &prev);
        drift = d / delta;
        max_increase = max_increase.max(inc);
        if let Some(pp) = &prev_prev {
            let (back, _) = sup_diff(&state.current, pp);
            if d > cfg.tol_steady * delta && back < T::lit(0.1) * d {
                oscillating = true;
            }
        }
        if drift < cfg.tol_steady {
            return Ok(Relaxed {
                field: state.current,
                converged: true,
                oscillating,
                time_used: state.t,
                final_drift: drift,
                max_increase,
                checks: check,
            });
        }
        prev_prev = Some(std::mem::replace(&mut prev, state.current.clone()));
    }
    Ok(Relaxed {
        field: state.current,
        converged: false,
        oscillating,
        time_used: state.t,
        final_drift: drift,
        max_increase,
        checks: max_checks,
    })
}

/// The constant supersolution `r** = 1.05 max(u*_+, u*_-)`.
pub fn scalar_supersolution<T: Real>(model: &ScalarShiftModel<T>) -> Result<T> {
    let top = model.u_star(Side::Plus)?.max(model.u_star(Side::Minus)?);
    Ok(T::lit(SUPERSOLUTION_FACTOR) * top)
}

/// Relaxes the comoving delayed system from `ic` (constant history).
pub fn relax_forced_wave<T: Real>(
    model: &ScalarShiftModel<T>,
    ic: Field<T>,
    cfg: &RelaxConfig<T>,
) -> Result<WaveProfile<T>> {
    let sim = SimConfig::new(cfg.dt, cfg.t_max).with_frame(Frame::Comoving);
    let mut stepper = ScalarStepper::new(model, ic.grid(), sim)?;
    let state = stepper.initial_state(ic)?;
    let r = relax(state, cfg, |s, n| stepper.step(s, n))?;
    let residual_sup = steady_residual(&r.field, model)?;
    let (tail_plus, tail_minus) = tail_means(&r.field)?;
    Ok(WaveProfile {
        values: r.field,
        speed: model.c,
        residual_sup,
        tail_plus,
        tail_minus,
        converged: r.converged,
        oscillating: r.oscillating,
        time_used: r.time_used,
        final_drift: r.final_drift,
        max_increase: r.max_increase,
        checks: r.checks,
    })
}

/// Forced wave from the constant supersolution `r**`.
pub fn solve_forced_wave<T: Real>(
    model: &ScalarShiftModel<T>,
    grid: &Grid1D<T>,
    cfg: &RelaxConfig<T>,
) -> Result<WaveProfile<T>> {
    let top = scalar_supersolution(model)?;
    relax_forced_wave(model, Field::constant(*grid, 1, top), cfg)
}

/// Relaxes the system from `ic`.
pub fn relax_steady_state<T: Real>(
    model: &CooperativeModel<T>,
    ic: Field<T>,
    cfg: &RelaxConfig<T>,
) -> Result<WaveProfile<T>> {
    let sim = SimConfig::new(cfg.dt, cfg.t_max);
    let mut stepper = SystemStepper::new(model, ic.grid(), sim)?;
    let state = stepper.initial_state(ic)?;
    let r = relax(state, cfg, |s, n| stepper.step(s, n))?;
    let residual_sup = system_residual(&r.field, model)?;
    let (tail_plus, tail_minus) = tail_means(&r.field)?;
    Ok(WaveProfile {
        values: r.field,
        speed: T::zero(),
        residual_sup,
        tail_plus,
        tail_minus,
        converged: r.converged,
        oscillating: r.oscillating,
        time_used: r.time_used,
        final_drift: r.final_drift,
        max_increase: r.max_increase,
        checks: r.checks,
    })
}

/// Steady state from `r** = 1.05 max_k max(u*_+, u*_-)_k` in every component.
pub fn solve_steady_state<T: Real>(
    model: &CooperativeModel<T>,
    grid: &Grid1D<T>,
    cfg: &RelaxConfig<T>,
) -> Result<WaveProfile<T>> {
    let top = model
        .u_star(Side::Plus)?
        .iter()
        .chain(model.u_star(Side::Minus)?)
        .copied()
        .fold(T::zero(), T::max);
    let ic = Field::constant(*grid, model.dim(), T::lit(SUPERSOLUTION_FACTOR) * top);
    relax_steady_state(model, ic, cfg)
}
