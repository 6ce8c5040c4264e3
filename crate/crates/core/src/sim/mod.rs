//! Time integration by Strang splitting: half a Crank-Nicolson diffusion
//! step, a full explicit reaction step, half a diffusion step.
//!
//! In the comoving frame `z = x - c t` the advection `c u_z` is carried by
//! the diffusion half-steps (central differences inside the CN system) and
//! the delayed argument is read at `z + c tau`.

pub mod diffusion;
pub mod ic;

use crate::error::{Error, Result};
use crate::grid::{shift_into, steps_in, DelayHistory, Field, Frame, Grid1D, Trajectory};
use crate::models::{CooperativeModel, ScalarShiftModel};
use crate::real::Real;

pub use diffusion::{diffusion_step, CrankNicolson};
pub use ic::{bump_h, ic_bump_h, ic_xi, ic_xi_tilde, xi, xi_tilde};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig<T = f64> {
    pub dt: T,
    pub t_end: T,
    pub frame: Frame,
    /// Keep every `snapshot_stride`-th step (the initial and final states are always kept).
    pub snapshot_stride: usize,
    /// Abort when `sup |u|` exceeds this.
    pub blowup_guard: T,
}

impl<T: Real> SimConfig<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        Self {
            dt,
            t_end,
            frame: Frame::Lab,
            snapshot_stride: 1,
            blowup_guard: T::lit(1e6),
        }
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride.max(1);
        self
    }

    pub fn with_guard(mut self, guard: T) -> Self {
        self.blowup_guard = guard;
        self
    }

    /// Number of steps to reach `t_end` (rounded to the nearest step).
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return Err(Error::config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        (self.t_end / self.dt)
            .round()
            .to_usize()
            .ok_or_else(|| Error::config("step count out of range"))
    }
}

#[derive(Clone, Debug)]
pub struct SimState<T = f64> {
    pub t: T,
    pub current: Field<T>,
    /// Past states on `[t - tau, t]`; present only for delayed scalar runs.
    pub history: Option<DelayHistory<T>>,
}

/// Extremes seen during a run, for the invariant monitor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMonitor<T = f64> {
    pub min_value: T,
    pub max_value: T,
    /// Largest `|u(t, boundary) - u(0, boundary)|` over the run.
    pub boundary_activity: T,
    pub steps: usize,
}

impl<T: Real> RunMonitor<T> {
    fn new(ic: &Field<T>) -> Self {
        Self {
            min_value: ic.min_value(),
            max_value: ic.max_value(),
            boundary_activity: T::zero(),
            steps: 0,
        }
    }

    fn observe(&mut self, ic: &Field<T>, f: &Field<T>) {
        self.min_value = self.min_value.min(f.min_value());
        self.max_value = self.max_value.max(f.max_value());
        let n = f.grid().len();
        for k in 0..f.n_components() {
            for i in [0, n - 1] {
                let d = (f.get(k, i) - ic.get(k, i)).abs();
                self.boundary_activity = self.boundary_activity.max(d);
            }
        }
        self.steps += 1;
    }
}

fn guard<T: Real>(f: &Field<T>, t: T, limit: T) -> Result<()> {
    let m = f.values().iter().fold(T::zero(), |m, v| {
        if v.is_nan() {
            T::infinity()
        } else {
            m.max(v.abs())
        }
    });
    if !(m <= limit) {
        return Err(Error::Blowup {
            t: t.to_f64_lossy(),
            value: m.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Stepper for the delayed scalar model.
pub struct ScalarStepper<'a, T: Real> {
    model: &'a ScalarShiftModel<T>,
    cfg: SimConfig<T>,
    grid: Grid1D<T>,
    half: CrankNicolson<T>,
    m: usize,
    scratch: Vec<T>,
    lag_a: Vec<T>,
    lag_b: Vec<T>,
}

impl<'a, T: Real> ScalarStepper<'a, T> {
    pub fn new(model: &'a ScalarShiftModel<T>, grid: &Grid1D<T>, cfg: SimConfig<T>) -> Result<Self> {
        let m = steps_in(model.tau, cfg.dt)?;
        let c_adv = match cfg.frame {
            Frame::Lab => T::zero(),
            Frame::Comoving => model.c,
        };
        let half = CrankNicolson::new(grid.len(), grid.dx(), model.d, c_adv, cfg.dt * T::lit(0.5))?;
        let n = grid.len();
        Ok(Self {
            model,
            cfg,
            grid: *grid,
            half,
            m,
            scratch: vec![T::zero(); n],
            lag_a: vec![T::zero(); n],
            lag_b: vec![T::zero(); n],
        })
    }

    /// Initial state with constant history `u(theta, .) = ic` on `[-tau, 0]`.
    pub fn initial_state(&self, ic: Field<T>) -> Result<SimState<T>> {
        self.check_field(&ic)?;
        let history = if self.m > 0 {
            Some(DelayHistory::constant(ic.clone(), self.cfg.dt, self.model.tau)?)
        } else {
            None
        };
        Ok(SimState {
            t: T::zero(),
            current: ic,
            history,
        })
    }

    fn check_field(&self, f: &Field<T>) -> Result<()> {
        if f.n_components() != 1 {
            return Err(Error::config("the scalar model needs a one-component field"));
        }
        if f.grid() != &self.grid {
            return Err(Error::config("field grid differs from the simulation grid"));
        }
        f.check_finite()
    }

    /// Habitat coordinate of grid point `i` at time `t`.
    #[inline]
    fn s_at(&self, i: usize, t: T) -> T {
        match self.cfg.frame {
            Frame::Lab => self.grid.x(i) - self.model.c * t,
            Frame::Comoving => self.grid.x(i),
        }
    }

    fn load_lag(&mut self, hist: &DelayHistory<T>) {
        let shift = match self.cfg.frame {
            Frame::Lab => T::zero(),
            Frame::Comoving => self.model.c * self.model.tau,
        };
        let a = hist.at_steps(self.m).component(0);
        let b = hist.at_steps(self.m - 1).component(0);
        if shift == T::zero() {
            self.lag_a.copy_from_slice(a);
            self.lag_b.copy_from_slice(b);
        } else {
            shift_into(a, &self.grid, shift, &mut self.lag_a);
            shift_into(b, &self.grid, shift, &mut self.lag_b);
        }
    }

    pub fn step(&mut self, state: &mut SimState<T>, step_index: usize) -> Result<()> {
        let dt = self.cfg.dt;
        let t0 = T::from_count(step_index) * dt;
        let t1 = T::from_count(step_index + 1) * dt;
        let half = T::lit(0.5);
        let mu = self.model.mu;
        let h = dt;
        self.half.apply(state.current.component_mut(0), &mut self.scratch);
        if let Some(hist) = &state.history {
            self.load_lag(hist);
            let w_u = T::one() - mu * h + mu * mu * h * h * half;
            let w_a = mu * h * half - mu * mu * h * h * half;
            let w_b = mu * h * half;
            let u = state.current.component_mut(0);
            for i in 0..u.len() {
                let fa = self.model.f(self.s_at(i, t0), self.lag_a[i]);
                let fb = self.model.f(self.s_at(i, t1), self.lag_b[i]);
                u[i] = w_u * u[i] + w_a * fa + w_b * fb;
            }
        } else {
            let tm = t0 + half * dt;
            let u = state.current.component_mut(0);
            for (i, ui) in u.iter_mut().enumerate() {
                let k1 = -mu * *ui + mu * self.model.f(self.s_at(i, t0), *ui);
                let mid = *ui + half * h * k1;
                *ui = *ui + h * (-mu * mid + mu * self.model.f(self.s_at(i, tm), mid));
            }
        }
        let u = state.current.component_mut(0);
        self.half.apply(u, &mut self.scratch);
        state.t = t1;
        guard(&state.current, t1, self.cfg.blowup_guard)?;
        if let Some(hist) = state.history.as_mut() {
            hist.push(state.current.clone());
        }
        Ok(())
    }
}

/// Stepper for cooperative systems (lab frame, no delay).
pub struct SystemStepper<'a, T: Real> {
    model: &'a CooperativeModel<T>,
    cfg: SimConfig<T>,
    grid: Grid1D<T>,
    half: Vec<CrankNicolson<T>>,
    scratch: Vec<T>,
}

impl<'a, T: Real> SystemStepper<'a, T> {
    pub fn new(model: &'a CooperativeModel<T>, grid: &Grid1D<T>, cfg: SimConfig<T>) -> Result<Self> {
        cfg.steps()?;
        if cfg.frame == Frame::Comoving {
            return Err(Error::config(
                "cooperative systems have a fixed habitat; use the lab frame",
            ));
        }
        let half = model
            .diffusivities()
            .iter()
            .map(|&d| CrankNicolson::new(grid.len(), grid.dx(), d, T::zero(), cfg.dt * T::lit(0.5)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model,
            cfg,
            grid: *grid,
            half,
            scratch: vec![T::zero(); grid.len()],
        })
    }

    pub fn initial_state(&self, ic: Field<T>) -> Result<SimState<T>> {
        if ic.n_components() != self.model.dim() {
            return Err(Error::config(format!(
                "initial field has {} components, model has {}",
                ic.n_components(),
                self.model.dim()
            )));
        }
        if ic.grid() != &self.grid {
            return Err(Error::config("field grid differs from the simulation grid"));
        }
        ic.check_finite()?;
        Ok(SimState {
            t: T::zero(),
            current: ic,
            history: None,
        })
    }

    pub fn step(&mut self, state: &mut SimState<T>, step_index: usize) -> Result<()> {
        let dt = self.cfg.dt;
        let half = T::lit(0.5);
        let t1 = T::from_count(step_index + 1) * dt;
        for (k, op) in self.half.iter().enumerate() {
            op.apply(state.current.component_mut(k), &mut self.scratch);
        }
        let n = self.model.dim();
        let r = self.model.reaction();
        let mut u = vec![T::zero(); n];
        let mut k1 = vec![T::zero(); n];
        let mut mid = vec![T::zero(); n];
        let mut k2 = vec![T::zero(); n];
        for i in 0..self.grid.len() {
            let x = self.grid.x(i);
            for k in 0..n {
                u[k] = state.current.get(k, i);
            }
            r.eval(x, &u, &mut k1);
            for k in 0..n {
                mid[k] = u[k] + half * dt * k1[k];
            }
            r.eval(x, &mid, &mut k2);
            for k in 0..n {
                state.current.component_mut(k)[i] = u[k] + dt * k2[k];
            }
        }
        for (k, op) in self.half.iter().enumerate() {
            op.apply(state.current.component_mut(k), &mut self.scratch);
        }
        state.t = t1;
        guard(&state.current, t1, self.cfg.blowup_guard)
    }
}

/// Models that can be integrated in time.
pub trait Simulate<T: Real> {
    fn model_id(&self) -> String;

    fn run_monitored(&self, ic: &Field<T>, cfg: &SimConfig<T>) -> Result<(Trajectory<T>, RunMonitor<T>)>;
}

fn drive<T: Real>(
    id: String,
    ic: &Field<T>,
    cfg: &SimConfig<T>,
    mut state: SimState<T>,
    mut step: impl FnMut(&mut SimState<T>, usize) -> Result<()>,
) -> Result<(Trajectory<T>, RunMonitor<T>)> {
    let steps = cfg.steps()?;
    let stride = cfg.snapshot_stride.max(1);
    let mut traj = Trajectory::new(id, cfg.frame);
    let mut monitor = RunMonitor::new(ic);
    traj.push(T::zero(), state.current.clone())?;
    for n in 0..steps {
        step(&mut state, n)?;
        monitor.observe(ic, &state.current);
        if (n + 1) % stride == 0 || n + 1 == steps {
            traj.push(state.t, state.current.clone())?;
        }
    }
    Ok((traj, monitor))
}

impl<T: Real> Simulate<T> for ScalarShiftModel<T> {
    fn model_id(&self) -> String {
        self.kind().to_string()
    }

    fn run_monitored(&self, ic: &Field<T>, cfg: &SimConfig<T>) -> Result<(Trajectory<T>, RunMonitor<T>)> {
        let mut stepper = ScalarStepper::new(self, ic.grid(), *cfg)?;
        let state = stepper.initial_state(ic.clone())?;
        drive(self.model_id(), ic, cfg, state, |s, n| stepper.step(s, n))
    }
}

impl<T: Real> Simulate<T> for CooperativeModel<T> {
    fn model_id(&self) -> String {
        self.kind().to_string()
    }

    fn run_monitored(&self, ic: &Field<T>, cfg: &SimConfig<T>) -> Result<(Trajectory<T>, RunMonitor<T>)> {
        let mut stepper = SystemStepper::new(self, ic.grid(), *cfg)?;
        let state = stepper.initial_state(ic.clone())?;
        drive(self.model_id(), ic, cfg, state, |s, n| stepper.step(s, n))
    }
}

/// Integrates `model` from `ic` and returns the snapshots.
pub fn run<T: Real, M: Simulate<T> + ?Sized>(model: &M, ic: &Field<T>, cfg: &SimConfig<T>) -> Result<Trajectory<T>> {
    Ok(model.run_monitored(ic, cfg)?.0)
}

/// Continues a scalar run from an arbitrary state (including its history)
/// for `cfg.steps()` further steps.
pub fn run_scalar_from<T: Real>(
    model: &ScalarShiftModel<T>,
    mut state: SimState<T>,
    cfg: &SimConfig<T>,
) -> Result<SimState<T>> {
    let mut stepper = ScalarStepper::new(model, state.current.grid(), *cfg)?;
    stepper.check_field(&state.current)?;
    if stepper.m > 0 && state.history.as_ref().map(DelayHistory::m) != Some(stepper.m) {
        return Err(Error::config("state history does not span tau at this dt"));
    }
    let start = (state.t / cfg.dt).round().to_usize().unwrap_or(0);
    for n in 0..cfg.steps()? {
        stepper.step(&mut state, start + n)?;
    }
    Ok(state)
}
