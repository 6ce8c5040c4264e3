//! Comparison check: the minorant run stays below the full run, which stays
//! below the linear majorant run.

use crate::analysis::envelope::{build_majorant, build_minorant, MajorantSpec, MinorantSpec};
use crate::analysis::verdict::{Clause, Verdict};
use crate::error::{Error, Result};
use crate::grid::{Field, Trajectory};
use crate::models::{ScalarShiftModel, Side};
use crate::real::Real;
use crate::sim::{run, SimConfig};

/// Default `gamma = (f'_+(0) - 1)/2` for both envelopes, `u** = cap`.
pub fn sandwich_check<T: Real>(
    model: &ScalarShiftModel<T>,
    ic: &Field<T>,
    sim: &SimConfig<T>,
    tol: T,
) -> Result<Verdict<T>> {
    let gamma = (model.limit_jacobian(Side::Plus) - T::one()) * T::lit(0.5);
    let minorant = build_minorant(model, model.cap(), gamma)?;
    let majorant = build_majorant(model, model.cap(), gamma)?;
    sandwich_with(model, &minorant, &majorant, ic, sim, tol)
}

/// Runs the three models concurrently from `ic` and reports the largest
/// ordering violation over all snapshots.
pub fn sandwich_with<T: Real>(
    model: &ScalarShiftModel<T>,
    minorant: &MinorantSpec<T>,
    majorant: &MajorantSpec<T>,
    ic: &Field<T>,
    sim: &SimConfig<T>,
    tol: T,
) -> Result<Verdict<T>> {
    if !(tol >= T::zero()) {
        return Err(Error::config(format!("tolerance must be >= 0, got {tol}")));
    }
    let lower = minorant.model(model)?;
    let upper = majorant.model(model)?;
    // the linear run grows exponentially; only NaN should stop it
    let upper_sim = sim.with_guard(T::max_value().sqrt());
    let (lo, mid, hi) = std::thread::scope(|scope| {
        let a = scope.spawn(|| run(&lower, ic, sim));
        let b = scope.spawn(|| run(model, ic, sim));
        let c = scope.spawn(|| run(&upper, ic, &upper_sim));
        (join(a), join(b), join(c))
    });
    let (lo, mid, hi) = (lo?, mid?, hi?);
    ordering_verdict(&lo, &mid, &hi, tol)
}

fn join<T>(h: std::thread::ScopedJoinHandle<'_, Result<T>>) -> Result<T> {
    h.join()
        .unwrap_or_else(|_| Err(Error::numeric("sandwich worker panicked")))
}

/// Per snapshot, `max(u_min - u, u - u_lin)` over the grid.
pub fn ordering_verdict<T: Real>(
    lo: &Trajectory<T>,
    mid: &Trajectory<T>,
    hi: &Trajectory<T>,
    tol: T,
) -> Result<Verdict<T>> {
    if lo.times() != mid.times() || hi.times() != mid.times() {
        return Err(Error::numeric("sandwich runs produced different snapshot times"));
    }
    let mut errors = Vec::with_capacity(mid.len());
    let mut worst = T::neg_infinity();
    let mut worst_at = None;
    for ((a, b), c) in lo.snapshots().iter().zip(mid.snapshots()).zip(hi.snapshots()) {
        let g = b.grid();
        let mut sup = T::zero();
        for i in 0..g.len() {
            let (ua, ub, uc) = (a.get(0, i), b.get(0, i), c.get(0, i));
            let v = (ua - ub).max(ub - uc);
            if v > sup || v.is_nan() {
                sup = if v.is_nan() { T::infinity() } else { v };
            }
            if v > worst {
                worst = v;
                worst_at = Some(g.x(i));
            }
        }
        errors.push(sup);
    }
    let violation = errors.iter().copied().fold(T::zero(), T::max);
    let mut notes = vec![format!(
        "largest signed gap max(u_min - u, u - u_lin) = {:e}",
        worst.to_f64_lossy()
    )];
    let pass = violation <= tol;
    if !pass {
        notes.push("ordering violated beyond tolerance".into());
    }
    Ok(Verdict {
        clause: Clause::Sandwich,
        region: "whole grid, every snapshot".into(),
        sup_error: violation,
        tolerance: tol,
        pass,
        times: mid.times().to_vec(),
        errors,
        worst_location: if pass { None } else { worst_at },
        tail_nonincreasing: true,
        notes,
    })
}
