//! Uniform 1-D grids, multi-component fields, delay history and trajectories.
//!
//! The real line is truncated to `[x_min, x_max]`. Everything downstream
//! (diffusion, interpolation, verdict regions) works on the points
//! `x_i = x_min + i * dx`.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform grid on `[x_min, x_max]` with `n` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D<T = f64> {
    x_min: T,
    x_max: T,
    n: usize,
    dx: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::config("grid bounds must be finite"));
        }
        if x_min >= x_max {
            return Err(Error::config(format!(
                "inverted bounds: x_min = {x_min} must be < x_max = {x_max}"
            )));
        }
        if n < 3 {
            return Err(Error::config(format!("grid needs n >= 3 points, got {n}")));
        }
        let dx = (x_max - x_min) / T::from_count(n - 1);
        Ok(Self { x_min, x_max, n, dx })
    }

    /// Grid with (approximately) the requested spacing; the point count is
    /// rounded so that both bounds are grid points.
    pub fn with_spacing(x_min: T, x_max: T, dx: T) -> Result<Self> {
        if !(dx > T::zero()) {
            return Err(Error::config("grid spacing must be positive"));
        }
        let cells = ((x_max - x_min) / dx).round().to_usize().unwrap_or(0);
        Self::new(x_min, x_max, cells + 1)
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.x_min + T::from_count(i) * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Indices of the grid points lying in `[lo, hi]`.
    pub fn indices_in(&self, lo: T, hi: T) -> std::ops::Range<usize> {
        if lo > hi || hi < self.x_min || lo > self.x_max {
            return 0..0;
        }
        let slack = self.dx * T::lit(1e-9);
        let first = ((lo - self.x_min - slack) / self.dx).ceil().max(T::zero());
        let last = ((hi - self.x_min + slack) / self.dx)
            .floor()
            .min(T::from_count(self.n - 1));
        let first = first.to_usize().unwrap_or(0);
        let last = last.to_usize().unwrap_or(0);
        if first > last {
            0..0
        } else {
            first..last + 1
        }
    }
}

/// Values of an `n_components`-vector function sampled on a grid.
///
/// Storage is component-major: component `k` occupies
/// `values[k * n .. (k + 1) * n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T = f64> {
    grid: Grid1D<T>,
    n_components: usize,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn constant(grid: Grid1D<T>, n_components: usize, value: T) -> Self {
        assert!(n_components >= 1, "a field needs at least one component");
        Self {
            grid,
            n_components,
            values: vec![value; n_components * grid.len()],
        }
    }

    pub fn zeros(grid: Grid1D<T>, n_components: usize) -> Self {
        Self::constant(grid, n_components, T::zero())
    }

    /// Builds a field from per-component value vectors.
    pub fn from_components(grid: Grid1D<T>, components: Vec<Vec<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::config("a field needs at least one component"));
        }
        let n_components = components.len();
        let mut values = Vec::with_capacity(n_components * grid.len());
        for (k, c) in components.into_iter().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::config(format!(
                    "component {k} has {} values, grid has {}",
                    c.len(),
                    grid.len()
                )));
            }
            values.extend(c);
        }
        let field = Self {
            grid,
            n_components,
            values,
        };
        field.check_finite()?;
        Ok(field)
    }

    /// `values[k][i] = f(x_i)[k]`.
    pub fn sample<F>(grid: Grid1D<T>, n_components: usize, f: F) -> Result<Self>
    where
        F: Fn(T) -> Vec<T>,
    {
        let mut field = Self::zeros(grid, n_components);
        for i in 0..grid.len() {
            let x = grid.x(i);
            let v = f(x);
            if v.len() != n_components {
                return Err(Error::config(format!(
                    "sampler returned {} components, expected {n_components}",
                    v.len()
                )));
            }
            for (k, vk) in v.into_iter().enumerate() {
                if !vk.is_finite() {
                    return Err(Error::config(format!("non-finite sample at x = {x}")));
                }
                field.values[k * grid.len() + i] = vk;
            }
        }
        Ok(field)
    }

    pub fn sample_scalar<F>(grid: Grid1D<T>, f: F) -> Result<Self>
    where
        F: Fn(T) -> T,
    {
        Self::sample(grid, 1, |x| vec![f(x)])
    }

    #[inline]
    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    #[inline]
    pub fn n_components(&self) -> usize {
        self.n_components
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn component(&self, k: usize) -> &[T] {
        let n = self.grid.len();
        &self.values[k * n..(k + 1) * n]
    }

    #[inline]
    pub fn component_mut(&mut self, k: usize) -> &mut [T] {
        let n = self.grid.len();
        &mut self.values[k * n..(k + 1) * n]
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize) -> T {
        self.values[k * self.grid.len() + i]
    }

    /// Vector value at grid point `i`.
    pub fn point(&self, i: usize) -> Vec<T> {
        (0..self.n_components).map(|k| self.get(k, i)).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(p) => Err(Error::numeric(format!(
                "non-finite entry in component {} at x = {}",
                p / self.grid.len(),
                self.grid.x(p % self.grid.len())
            ))),
        }
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, v| if v.abs() > m || v.is_nan() { v.abs() } else { m })
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Linear interpolation of component `k` at `x`, constant beyond the ends.
    pub fn interpolate_at(&self, k: usize, x: T) -> T {
        interpolate_clamped(self.component(k), &self.grid, x)
    }

    /// `out(x_i) = self(x_i + delta)` by linear interpolation, holding the
    /// boundary value constant outside the grid.
    pub fn shift_interpolate(&self, delta: T) -> Field<T> {
        let mut out = self.clone();
        if delta == T::zero() {
            return out;
        }
        for k in 0..self.n_components {
            shift_into(self.component(k), &self.grid, delta, out.component_mut(k));
        }
        out
    }

    /// Max over components and grid points inside `window` of `|self - other|`.
    pub fn sup_distance(&self, other: &Field<T>, window: (T, T)) -> Result<T> {
        if self.grid != other.grid || self.n_components != other.n_components {
            return Err(Error::config("sup_distance needs fields on one grid"));
        }
        let range = self.grid.indices_in(window.0, window.1);
        if range.is_empty() {
            return Err(Error::config(format!(
                "empty window [{}, {}]",
                window.0, window.1
            )));
        }
        let mut sup = T::zero();
        for k in 0..self.n_components {
            let a = &self.component(k)[range.clone()];
            let b = &other.component(k)[range.clone()];
            for (x, y) in a.iter().zip(b) {
                sup = sup.max((*x - *y).abs());
            }
        }
        Ok(sup)
    }

    /// Writes `x,u1[,u2,...]` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "x")?;
        for k in 0..self.n_components {
            write!(w, ",u{}", k + 1)?;
        }
        writeln!(w)?;
        for i in 0..self.grid.len() {
            write!(w, "{}", fmt_sig17(self.grid.x(i)))?;
            for k in 0..self.n_components {
                write!(w, ",{}", fmt_sig17(self.get(k, i)))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads a field written by [`Field::write_csv`]. The x column must be uniform.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::config("empty field CSV"))?
            .map_err(|e| Error::config(e.to_string()))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.first() != Some(&"x") || cols.len() < 2 {
            return Err(Error::config("field CSV header must be `x,u1[,u2,...]`"));
        }
        let n_components = cols.len() - 1;
        let mut xs = Vec::new();
        let mut comps = vec![Vec::new(); n_components];
        for line in lines {
            let line = line.map_err(|e| Error::config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::config(format!("bad number in field CSV: {e}")))?;
            if parsed.len() != cols.len() {
                return Err(Error::config("ragged row in field CSV"));
            }
            xs.push(parsed[0]);
            for k in 0..n_components {
                comps[k].push(T::lit(parsed[k + 1]));
            }
        }
        if xs.len() < 3 {
            return Err(Error::config("field CSV needs at least 3 rows"));
        }
        let grid = Grid1D::new(T::lit(xs[0]), T::lit(xs[xs.len() - 1]), xs.len())?;
        let tol = grid.dx().to_f64_lossy() * 1e-6;
        for (i, &x) in xs.iter().enumerate() {
            if (x - grid.x(i).to_f64_lossy()).abs() > tol {
                return Err(Error::config("field CSV x column is not uniform"));
            }
        }
        Self::from_components(grid, comps)
    }
}

/// 17 significant digits, round-trippable for `f64`.
pub fn fmt_sig17<T: Real>(v: T) -> String {
    format!("{:.16e}", v.to_f64_lossy())
}

pub(crate) fn interpolate_clamped<T: Real>(values: &[T], grid: &Grid1D<T>, x: T) -> T {
    let n = grid.len();
    let pos = (x - grid.x_min()) / grid.dx();
    if !(pos > T::zero()) {
        return values[0];
    }
    let last = T::from_count(n - 1);
    if pos >= last {
        return values[n - 1];
    }
    let i = pos.floor().to_usize().unwrap_or(0).min(n - 2);
    let theta = pos - T::from_count(i);
    values[i] + theta * (values[i + 1] - values[i])
}

pub(crate) fn shift_into<T: Real>(src: &[T], grid: &Grid1D<T>, delta: T, dst: &mut [T]) {
    let n = grid.len();
    let shift = delta / grid.dx();
    let whole = shift.floor();
    let theta = shift - whole;
    let whole = whole.to_isize().unwrap_or(0);
    let clamp = |j: isize| -> T { src[j.clamp(0, n as isize - 1) as usize] };
    for (i, d) in dst.iter_mut().enumerate() {
        let j = i as isize + whole;
        *d = if theta == T::zero() {
            clamp(j)
        } else {
            let a = clamp(j);
            let b = clamp(j + 1);
            a + theta * (b - a)
        };
    }
}

/// Ring buffer of the last `m + 1` states, `tau = m * dt`.
///
/// Slots run oldest to newest; `at_lag(0)` is the newest, `at_lag(tau)` the oldest.
#[derive(Clone, Debug)]
pub struct DelayHistory<T = f64> {
    slots: VecDeque<Field<T>>,
    dt: T,
    tau: T,
    m: usize,
}

impl<T: Real> DelayHistory<T> {
    /// History filled with `initial` on the whole interval `[-tau, 0]`.
    pub fn constant(initial: Field<T>, dt: T, tau: T) -> Result<Self> {
        let m = steps_in(tau, dt)?;
        let mut slots = VecDeque::with_capacity(m + 1);
        for _ in 0..=m {
            slots.push_back(initial.clone());
        }
        Ok(Self { slots, dt, tau, m })
    }

    /// History from explicit slots ordered oldest to newest.
    pub fn from_slots(slots: Vec<Field<T>>, dt: T, tau: T) -> Result<Self> {
        let m = steps_in(tau, dt)?;
        if slots.len() != m + 1 {
            return Err(Error::config(format!(
                "history needs {} slots, got {}",
                m + 1,
                slots.len()
            )));
        }
        Ok(Self {
            slots: slots.into(),
            dt,
            tau,
            m,
        })
    }

    pub fn push(&mut self, f: Field<T>) {
        self.slots.push_back(f);
        while self.slots.len() > self.m + 1 {
            self.slots.pop_front();
        }
    }

    /// State `lag` time units ago. `lag` must be a stored multiple of `dt`.
    pub fn at_lag(&self, lag: T) -> Result<&Field<T>> {
        let k = lag / self.dt;
        let kr = k.round();
        if lag < T::zero() || (k - kr).abs() > T::tol_floor(1e-9) * T::one().max(kr) {
            return Err(Error::config(format!("lag not on grid: {lag}")));
        }
        let k = kr.to_usize().unwrap_or(usize::MAX);
        if k > self.m {
            return Err(Error::config(format!(
                "lag {lag} exceeds stored delay {}",
                self.tau
            )));
        }
        Ok(self.at_steps(k))
    }

    /// State `k` steps ago (`k <= m`).
    #[inline]
    pub fn at_steps(&self, k: usize) -> &Field<T> {
        &self.slots[self.slots.len() - 1 - k]
    }

    #[inline]
    pub fn newest(&self) -> &Field<T> {
        self.at_steps(0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    #[inline]
    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn iter(&self) -> impl Iterator<Item = &Field<T>> {
        self.slots.iter()
    }
}

/// `tau / dt` as an integer, or an error when `tau` is not a multiple of `dt`.
pub fn steps_in<T: Real>(tau: T, dt: T) -> Result<usize> {
    if !(dt > T::zero()) || tau < T::zero() {
        return Err(Error::config("need dt > 0 and tau >= 0"));
    }
    let k = tau / dt;
    let kr = k.round();
    if (k - kr).abs() > T::tol_floor(1e-9) * T::one().max(kr) {
        return Err(Error::config(format!(
            "tau = {tau} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(kr.to_usize().unwrap_or(0))
}

/// Frame of reference of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Comoving,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Comoving => "comoving",
        })
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lab" => Ok(Frame::Lab),
            "comoving" => Ok(Frame::Comoving),
            other => Err(Error::config(format!("unknown frame `{other}`"))),
        }
    }
}

/// Snapshots of a run at strictly increasing times.
#[derive(Clone, Debug)]
pub struct Trajectory<T = f64> {
    pub model_id: String,
    pub frame: Frame,
    times: Vec<T>,
    snapshots: Vec<Field<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(model_id: impl Into<String>, frame: Frame) -> Self {
        Self {
            model_id: model_id.into(),
            frame,
            times: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub fn push(&mut self, t: T, f: Field<T>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::config(format!(
                    "snapshot time {t} not after previous {last}"
                )));
            }
        }
        self.times.push(t);
        self.snapshots.push(f);
        Ok(())
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Field<T>] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(T, &Field<T>)> {
        self.times.last().map(|&t| (t, self.snapshots.last().unwrap()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, &Field<T>)> {
        self.times.iter().copied().zip(self.snapshots.iter())
    }

    /// Long format `t,x,u1[,u2,...]`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let nc = self.snapshots.first().map_or(1, |f| f.n_components());
        write!(w, "t,x")?;
        for k in 0..nc {
            write!(w, ",u{}", k + 1)?;
        }
        writeln!(w)?;
        for (t, f) in self.iter() {
            let ts = fmt_sig17(t);
            for i in 0..f.grid().len() {
                write!(w, "{ts},{}", fmt_sig17(f.grid().x(i)))?;
                for k in 0..nc {
                    write!(w, ",{}", fmt_sig17(f.get(k, i)))?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }
}
