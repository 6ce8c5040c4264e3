//! Empirical check of the propagation estimate
//! `T_{-nc} T_{-y} Q^n T_y [(r/16) h] >= (r/4) h` on `[-2, 2]`, with `Q` the
//! time-one map of the comoving system and `r = u*_+`.

use crate::error::{Error, Result};
use crate::grid::{Field, Frame, Grid1D};
use crate::models::{ScalarShiftModel, Side};
use crate::real::Real;
use crate::sim::{bump_h, run, SimConfig};
use crate::speeds::FrameSpeeds;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig<T = f64> {
    pub epsilon: T,
    pub n_grid: Vec<usize>,
    pub y_grid: Vec<T>,
    /// Probe speeds sampled evenly across the admissible interval.
    pub c_samples: usize,
    /// Extra probe speeds, admissible or not.
    pub extra_c: Vec<T>,
    pub x_min: T,
    pub x_max: T,
    pub dx: T,
    pub dt: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSample<T = f64> {
    pub c: T,
    pub n: usize,
    pub y: T,
    /// `min_{|x| <= 2} (value - (r/4) h(x))`.
    pub margin: T,
    pub holds: bool,
}

/// For one probe speed: the smallest tested `y` from which the inequality
/// holds for every larger tested `y`, per `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeFrontier<T = f64> {
    pub c: T,
    pub admissible: bool,
    pub y0: Vec<(usize, Option<T>)>,
    pub n0: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport<T = f64> {
    /// `[-c_-* + 2 eps/3, c_+* - 2 eps/3]` in the comoving frame.
    pub admissible: (T, T),
    pub samples: Vec<ProbeSample<T>>,
    pub frontier: Vec<ProbeFrontier<T>>,
}

pub fn propagation_probe<T: Real>(
    model: &ScalarShiftModel<T>,
    speeds: &FrameSpeeds<T>,
    cfg: &ProbeConfig<T>,
) -> Result<ProbeReport<T>> {
    let two_thirds = T::lit(2.0) / T::lit(3.0);
    let lo = -speeds.comoving_left + two_thirds * cfg.epsilon;
    let hi = speeds.comoving_right - two_thirds * cfg.epsilon;
    if !(cfg.epsilon > T::zero()) {
        return Err(Error::config(format!("epsilon must be positive, got {}", cfg.epsilon)));
    }
    let mut cs: Vec<T> = match cfg.c_samples {
        0 => Vec::new(),
        1 => vec![(lo + hi) * T::lit(0.5)],
        k if lo <= hi => (0..k)
            .map(|i| lo + (hi - lo) * T::from_count(i) / T::from_count(k - 1))
            .collect(),
        _ => Vec::new(),
    };
    cs.extend(cfg.extra_c.iter().copied());
    if cs.is_empty() || cfg.n_grid.is_empty() || cfg.y_grid.is_empty() {
        return Err(Error::config("probe needs at least one c, n and y"));
    }
    let mut ns = cfg.n_grid.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut ys = cfg.y_grid.clone();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n_max = *ns.last().unwrap();

    // every evaluation window [y + n c - 2, y + n c + 2] and the initial bump must fit
    let two = T::lit(2.0);
    let mut need = (T::infinity(), T::neg_infinity());
    for &y in &ys {
        need = (need.0.min(y - two), need.1.max(y + two));
        for &c in &cs {
            for &n in &ns {
                let centre = y + T::from_count(n) * c;
                need = (need.0.min(centre - two), need.1.max(centre + two));
            }
        }
    }
    if need.0 < cfg.x_min || need.1 > cfg.x_max {
        return Err(Error::config(format!(
            "probe domain [{}, {}] too small: largest y + n c needs [{}, {}]",
            cfg.x_min, cfg.x_max, need.0, need.1
        )));
    }
    let per_unit = (T::one() / cfg.dt).round();
    if (per_unit * cfg.dt - T::one()).abs() > T::tol_floor(1e-9) {
        return Err(Error::config(format!("probe dt must divide 1, got {}", cfg.dt)));
    }
    let stride = per_unit.to_usize().unwrap_or(1);
    let grid = Grid1D::with_spacing(cfg.x_min, cfg.x_max, cfg.dx)?;
    let r = model.u_star(Side::Plus)?;
    let sixteenth = r / T::lit(16.0);
    let quarter = r / T::lit(4.0);
    let sim = SimConfig::new(cfg.dt, T::from_count(n_max))
        .with_frame(Frame::Comoving)
        .with_stride(stride);
    let window = grid.indices_in(-two, two);
    let noise = T::tol_floor(1e-12) * r.max(T::one());

    let mut samples = Vec::new();
    for &y in &ys {
        let ic = Field::sample_scalar(grid, |x| sixteenth * bump_h(x - y))?;
        let traj = run(model, &ic, &sim)?;
        for &n in &ns {
            // snapshot k sits at t = k
            let f = &traj.snapshots()[n];
            for &c in &cs {
                let shift = y + T::from_count(n) * c;
                let margin = window
                    .clone()
                    .map(|i| {
                        let x = grid.x(i);
                        f.interpolate_at(0, x + shift) - quarter * bump_h(x)
                    })
                    .fold(T::infinity(), T::min);
                samples.push(ProbeSample {
                    c,
                    n,
                    y,
                    margin,
                    holds: margin >= -noise,
                });
            }
        }
    }

    let frontier = cs
        .iter()
        .map(|&c| {
            let y0: Vec<(usize, Option<T>)> = ns
                .iter()
                .map(|&n| {
                    let holds: Vec<bool> = ys
                        .iter()
                        .map(|&y| {
                            samples
                                .iter()
                                .any(|s| s.c == c && s.n == n && s.y == y && s.holds)
                        })
                        .collect();
                    let mut first = None;
                    for k in (0..ys.len()).rev() {
                        if holds[k] {
                            first = Some(ys[k]);
                        } else {
                            break;
                        }
                    }
                    (n, first)
                })
                .collect();
            let n0 = y0.iter().find(|(_, y)| y.is_some()).map(|(n, _)| *n);
            ProbeFrontier {
                c,
                admissible: c >= lo && c <= hi,
                y0,
                n0,
            }
        })
        .collect();
    Ok(ProbeReport {
        admissible: (lo, hi),
        samples,
        frontier,
    })
}
