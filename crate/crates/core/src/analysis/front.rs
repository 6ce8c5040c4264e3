//! Level-set front tracking and least-squares speed estimates.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{fmt_sig17, Field, Frame, Trajectory};
use crate::real::Real;

/// Which crossing of the level a trace follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Rightmost,
    Leftmost,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Rightmost => "rightmost",
            Direction::Leftmost => "leftmost",
        })
    }
}

/// Positions of the outermost level crossing per snapshot. `None` marks a
/// snapshot without a crossing; gaps are never filled in.
///
/// Positions are in the trajectory's own coordinate (lab `x` or comoving `z`).
#[derive(Clone, Debug, PartialEq)]
pub struct FrontTrace<T = f64> {
    pub times: Vec<T>,
    pub positions: Vec<Option<T>>,
    pub level: T,
    pub direction: Direction,
    pub component: usize,
    pub frame: Frame,
}

impl<T: Real> FrontTrace<T> {
    /// `(t, x)` pairs of the snapshots where the level was crossed.
    pub fn recorded(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.times
            .iter()
            .zip(&self.positions)
            .filter_map(|(&t, p)| p.map(|x| (t, x)))
    }

    /// Same trace expressed in the lab frame, given the habitat speed `c`.
    pub fn to_lab(&self, c: T) -> FrontTrace<T> {
        let mut out = self.clone();
        if self.frame == Frame::Comoving {
            for (p, &t) in out.positions.iter_mut().zip(&self.times) {
                *p = p.map(|z| z + c * t);
            }
            out.frame = Frame::Lab;
        }
        out
    }

    /// Rows `t,position` with an empty position where nothing was crossed.
    pub fn write_csv_rows<W: std::io::Write>(&self, mut w: W, label: &str) -> std::io::Result<()> {
        for (t, p) in self.times.iter().zip(&self.positions) {
            let pos = p.map(fmt_sig17).unwrap_or_default();
            writeln!(w, "{label},{},{pos}", fmt_sig17(*t))?;
        }
        Ok(())
    }
}

/// Outermost crossing of `level` by component `k` of `f`, linearly
/// interpolated inside the grid interval where it happens.
pub fn crossing<T: Real>(f: &Field<T>, k: usize, level: T, direction: Direction) -> Option<T> {
    let u = f.component(k);
    let g = f.grid();
    let crosses = |i: usize| {
        let (a, b) = (u[i] - level, u[i + 1] - level);
        (a >= T::zero()) != (b >= T::zero())
    };
    let at = |i: usize| {
        let (a, b) = (u[i], u[i + 1]);
        g.x(i) + (level - a) / (b - a) * g.dx()
    };
    let n = u.len();
    if n < 2 {
        return None;
    }
    match direction {
        Direction::Rightmost => (0..n - 1).rev().find(|&i| crosses(i)).map(at),
        Direction::Leftmost => (0..n - 1).find(|&i| crosses(i)).map(at),
    }
}

pub fn track_front<T: Real>(
    traj: &Trajectory<T>,
    level: T,
    direction: Direction,
    component: usize,
) -> Result<FrontTrace<T>> {
    if !(level > T::zero()) || !level.is_finite() {
        return Err(Error::config(format!("front level must be positive, got {level}")));
    }
    if let Some(f) = traj.snapshots().first() {
        if component >= f.n_components() {
            return Err(Error::config(format!(
                "component {component} out of range (field has {})",
                f.n_components()
            )));
        }
    }
    let positions = traj
        .snapshots()
        .iter()
        .map(|f| crossing(f, component, level, direction))
        .collect();
    Ok(FrontTrace {
        times: traj.times().to_vec(),
        positions,
        level,
        direction,
        component,
        frame: traj.frame,
    })
}

/// Fewest recorded points `estimate_speed` accepts in its window.
pub const MIN_FIT_POINTS: usize = 10;

/// Least-squares slope of position against time over the last
/// `window_fraction` of the traced time span. Returns `(speed, r^2)`.
pub fn estimate_speed<T: Real>(trace: &FrontTrace<T>, window_fraction: T) -> Result<(T, T)> {
    if !(window_fraction > T::zero() && window_fraction <= T::one()) {
        return Err(Error::config(format!(
            "window fraction must lie in (0, 1], got {window_fraction}"
        )));
    }
    let (Some(&t0), Some(&t1)) = (trace.times.first(), trace.times.last()) else {
        return Err(Error::numeric("empty front trace"));
    };
    let start = t1 - window_fraction * (t1 - t0);
    let pts: Vec<(T, T)> = trace.recorded().filter(|&(t, _)| t >= start).collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::numeric(format!(
            "only {} front positions in the fit window, need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    Ok(linear_fit(&pts))
}

/// `(slope, r^2)` of an ordinary least-squares line; centred sums keep exact
/// linear data exact.
pub(crate) fn linear_fit<T: Real>(pts: &[(T, T)]) -> (T, T) {
    let n = T::from_count(pts.len());
    let mt = pts.iter().map(|p| p.0).sum::<T>() / n;
    let mx = pts.iter().map(|p| p.1).sum::<T>() / n;
    let (mut stt, mut stx, mut sxx) = (T::zero(), T::zero(), T::zero());
    for &(t, x) in pts {
        let (dt, dx) = (t - mt, x - mx);
        stt = stt + dt * dt;
        stx = stx + dt * dx;
        sxx = sxx + dx * dx;
    }
    if stt == T::zero() {
        return (T::zero(), T::zero());
    }
    let slope = stx / stt;
    let r2 = if sxx == T::zero() {
        T::one()
    } else {
        let ss_res = pts
            .iter()
            .map(|&(t, x)| {
                let e = x - mx - slope * (t - mt);
                e * e
            })
            .sum::<T>();
        (T::one() - ss_res / sxx).max(T::zero())
    };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    fn trace_of(times: &[f64], pos: impl Fn(f64) -> f64) -> FrontTrace {
        FrontTrace {
            times: times.to_vec(),
            positions: times.iter().map(|&t| Some(pos(t))).collect(),
            level: 0.5,
            direction: Direction::Rightmost,
            component: 0,
            frame: Frame::Lab,
        }
    }

    #[test]
    fn step_profile_crosses_at_origin() {
        let g = Grid1D::<f64>::new(-5.0, 5.0, 101).unwrap();
        let f = Field::sample_scalar(g, |x| if x < 0.0 { 1.0 } else { 0.0 }).unwrap();
        let x = crossing(&f, 0, 0.5, Direction::Rightmost).unwrap();
        assert!(x.abs() <= g.dx() / 2.0 + 1e-12);
    }

    #[test]
    fn zero_field_records_nothing() {
        let g = Grid1D::<f64>::new(-5.0, 5.0, 11).unwrap();
        let mut traj = Trajectory::new("zero", Frame::Lab);
        for k in 0..3 {
            traj.push(k as f64, Field::zeros(g, 1)).unwrap();
        }
        let tr = track_front(&traj, 0.5, Direction::Leftmost, 0).unwrap();
        assert!(tr.positions.iter().all(Option::is_none));
        assert!(estimate_speed(&tr, 1.0).is_err());
    }

    #[test]
    fn translation_shifts_positions() {
        let g = Grid1D::<f64>::new(-20.0, 20.0, 401).unwrap();
        let prof = |x: f64| 1.0 / (1.0 + (x - 0.37).exp());
        let a = Field::sample_scalar(g, prof).unwrap();
        let b = Field::sample_scalar(g, |x| prof(x - 3.0)).unwrap();
        for dir in [Direction::Rightmost, Direction::Leftmost] {
            let xa = crossing(&a, 0, 0.5, dir).unwrap();
            let xb = crossing(&b, 0, 0.5, dir).unwrap();
            assert!((xb - xa - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_lines() {
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.4).collect();
        let (s, r2) = estimate_speed(&trace_of(&times, |t| 2.0 * t), 1.0).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
        let (s, r2) = estimate_speed(&trace_of(&times, |_| 3.5), 0.5).unwrap();
        assert_eq!(s, 0.0);
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn log_corrected_front() {
        // closed-form least squares of 2t - 1.5 ln t on the same samples
        let times: Vec<f64> = (0..=80).map(|k| k as f64).collect();
        let tr = trace_of(&times, |t| 2.0 * t - 1.5 * t.max(1e-300).ln());
        let (s, _) = estimate_speed(&tr, 0.5).unwrap();
        let ts: Vec<f64> = (40..=80).map(|k| k as f64).collect();
        let n = ts.len() as f64;
        let mt = ts.iter().sum::<f64>() / n;
        let ml = ts.iter().map(|t| t.ln()).sum::<f64>() / n;
        let cov = ts.iter().map(|t| (t - mt) * (t.ln() - ml)).sum::<f64>();
        let var = ts.iter().map(|t| (t - mt) * (t - mt)).sum::<f64>();
        let oracle = 2.0 - 1.5 * cov / var;
        assert!((s - oracle).abs() < 1e-12);
        assert!((s - 1.975).abs() < 2e-3);
    }

    #[test]
    fn too_few_points() {
        let times: Vec<f64> = (0..9).map(|k| k as f64).collect();
        assert!(estimate_speed(&trace_of(&times, |t| t), 1.0).is_err());
    }
}
