//! The five subcommands. Each writes CSV data plus a JSON sibling carrying
//! the config hash, and returns the lines meant for stdout.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use propagate_core::analysis::{
    annihilation_verdict, attractivity_verdict, estimate_speed, sandwich_check, spreading_verdict,
    system_annihilation_verdict, system_attractivity_verdict, system_spreading_verdict, track_front,
    wave_tails_verdict, Clause, Direction, FrontTrace, Verdict, SANDWICH_TOL,
};
use propagate_core::sim::{bump_h, xi, xi_tilde, RunMonitor, SimConfig, Simulate};
use propagate_core::speeds::{spreading_speed, FrameSpeeds, SpeedReport};
use propagate_core::waves::{solve_forced_wave, solve_steady_state, RelaxConfig};
use propagate_core::{Error as CoreError, Field, Grid1D, Side, Trajectory, WaveProfile};

use crate::config::{IcKind, Model, RunConfig};
use crate::CliError;

/// Box tolerance for the invariant monitor.
pub const BOX_TOL: f64 = 1e-8;

/// Default clause list for `verify`.
pub const DEFAULT_CLAUSES: [Clause; 4] = [
    Clause::Spreading,
    Clause::Annihilation,
    Clause::WaveTails,
    Clause::Attractivity,
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CommandOutcome {
    pub stdout: Vec<String>,
    pub files: Vec<PathBuf>,
    /// `verify` only: some clause did not pass.
    pub verdict_failed: bool,
}

fn create(dir: &Path, name: &str, files: &mut Vec<PathBuf>) -> Result<BufWriter<fs::File>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let f = fs::File::create(&path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    files.push(path);
    Ok(BufWriter::new(f))
}

fn write_json(dir: &Path, name: &str, value: &Value, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut w = create(dir, name, files)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn header(cfg: &RunConfig) -> Value {
    json!({
        "config_hash": cfg.hash(),
        "config": cfg.echo(),
        "warnings": cfg.warnings,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn initial_field(cfg: &RunConfig) -> Result<Field, CliError> {
    let ic = &cfg.ic;
    let profile = |x: f64| -> f64 {
        let y = x - ic.center;
        ic.amplitude
            * match ic.kind {
                IcKind::Bump => bump_h(y),
                IcKind::Xi => xi(ic.d, y),
                IcKind::XiTilde => xi_tilde(ic.d, ic.rho, y),
                IcKind::Constant => 1.0,
            }
    };
    let dim = cfg.model.dim();
    Ok(Field::sample(cfg.grid, dim, |x| vec![profile(x); dim])?)
}

pub fn sim_config(cfg: &RunConfig) -> SimConfig {
    SimConfig::new(cfg.dt, cfg.t_end)
        .with_frame(cfg.frame)
        .with_stride(cfg.stride)
}

pub fn simulate(cfg: &RunConfig) -> Result<(Trajectory, RunMonitor), CliError> {
    let ic = initial_field(cfg)?;
    let sim = sim_config(cfg);
    Ok(match &cfg.model {
        Model::Scalar(m) => m.run_monitored(&ic, &sim)?,
        Model::System(m) => m.run_monitored(&ic, &sim)?,
    })
}

/// Forced wave (scalar) or steady state (system) on the analysis window.
pub fn wave_profile(cfg: &RunConfig) -> Result<WaveProfile, CliError> {
    let a = &cfg.analysis;
    let grid = Grid1D::with_spacing(a.wave_x_min, a.wave_x_max, cfg.grid.dx())?;
    let relax = RelaxConfig::new(cfg.dt, a.tol_steady, a.wave_t_max);
    Ok(match &cfg.model {
        Model::Scalar(m) => solve_forced_wave(m, &grid, &relax)?,
        Model::System(m) => solve_steady_state(m, &grid, &relax)?,
    })
}

fn speed_json(r: &SpeedReport) -> Value {
    json!({
        "side": r.side.label(),
        "c_star": r.c_star,
        "nu_star": r.nu_star,
        "perron_vector": r.perron_vector,
    })
}

fn frame_json(fs: &FrameSpeeds) -> Value {
    json!({
        "rightward": fs.rightward,
        "leftward": fs.leftward,
        "comoving_right": fs.comoving_right,
        "comoving_left": fs.comoving_left,
    })
}

fn monitor_json(cfg: &RunConfig, mon: &RunMonitor) -> Value {
    let top = cfg.model.cap().into_iter().fold(f64::NEG_INFINITY, f64::max);
    json!({
        "min_value": mon.min_value,
        "max_value": mon.max_value,
        "boundary_activity": mon.boundary_activity,
        "steps": mon.steps,
        "box_ok": mon.min_value >= -BOX_TOL && mon.max_value <= top + BOX_TOL,
    })
}

/// `c*` and `nu*` for one side; writes `speed_<side>.csv` and `.json`.
pub fn cmd_speed(cfg: &RunConfig, side: Side) -> Result<CommandOutcome, CliError> {
    let report = match &cfg.model {
        Model::Scalar(m) => spreading_speed(m, side)?,
        Model::System(m) => spreading_speed(m, side)?,
    };
    let mut out = CommandOutcome::default();
    let dir = &cfg.output_dir;
    let mut w = create(dir, &format!("speed_{side}.csv"), &mut out.files)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    let body = merge(header(cfg), json!({ "speed": speed_json(&report), "csv": format!("speed_{side}.csv") }));
    write_json(dir, &format!("speed_{side}.json"), &body, &mut out.files)?;
    out.stdout.push(format!("c_star={:.6}, nu_star={:.6}", report.c_star, report.nu_star));
    Ok(out)
}

/// Runs the configured simulation; writes `trajectory.csv` and `meta.json`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutcome, CliError> {
    let (traj, mon) = simulate(cfg)?;
    let mut out = CommandOutcome::default();
    let dir = &cfg.output_dir;
    let mut w = create(dir, "trajectory.csv", &mut out.files)?;
    traj.write_csv(&mut w)?;
    w.flush()?;
    let body = merge(
        header(cfg),
        json!({
            "csv": "trajectory.csv",
            "grid": {
                "x_min": cfg.grid.x_min(),
                "x_max": cfg.grid.x_max(),
                "dx": cfg.grid.dx(),
                "n": cfg.grid.len(),
            },
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "frame": cfg.frame.to_string(),
            "snapshots": traj.len(),
            "model": { "kind": cfg.model_kind, "params": cfg.model_params.iter().cloned().collect::<std::collections::BTreeMap<_, _>>() },
            "monitor": monitor_json(cfg, &mon),
        }),
    );
    write_json(dir, "meta.json", &body, &mut out.files)?;
    out.stdout.push(format!(
        "simulated to t={} in {} steps, {} snapshots, u in [{:.6e}, {:.6e}]",
        cfg.t_end,
        mon.steps,
        traj.len(),
        mon.min_value,
        mon.max_value
    ));
    Ok(out)
}

fn wave_json(cfg: &RunConfig, w: &WaveProfile) -> Result<Value, CliError> {
    let up = cfg.model.u_star(Side::Plus)?;
    let um = cfg.model.u_star(Side::Minus)?;
    Ok(json!({
        "speed": w.speed,
        "residual_sup": w.residual_sup,
        "tail_plus": w.tail_plus,
        "tail_minus": w.tail_minus,
        "u_star_plus": up,
        "u_star_minus": um,
        "tail_error": w.tail_error(&up, &um),
        "converged": w.converged,
        "oscillating": w.oscillating,
        "time_used": w.time_used,
        "final_drift": w.final_drift,
        "max_increase": w.max_increase,
        "checks": w.checks,
    }))
}

/// Relaxes to the forced wave; writes `wave.csv` and `wave_report.json`.
/// A relaxation that misses its drift tolerance still writes both files and
/// then reports a numeric failure.
pub fn cmd_wave(cfg: &RunConfig) -> Result<CommandOutcome, CliError> {
    let wave = wave_profile(cfg)?;
    let mut out = CommandOutcome::default();
    let dir = &cfg.output_dir;
    let mut w = create(dir, "wave.csv", &mut out.files)?;
    wave.write_csv(&mut w)?;
    w.flush()?;
    let body = merge(header(cfg), json!({ "csv": "wave.csv", "wave": wave_json(cfg, &wave)? }));
    write_json(dir, "wave_report.json", &body, &mut out.files)?;
    if !wave.converged {
        return Err(CliError::Numeric(format!(
            "wave relaxation stopped at t = {} with drift {:e} > tol_steady = {:e}",
            wave.time_used, wave.final_drift, cfg.analysis.tol_steady
        )));
    }
    out.stdout.push(format!(
        "wave speed={} drift={:.3e} tails=({}, {})",
        wave.speed,
        wave.final_drift,
        join(&wave.tail_plus),
        join(&wave.tail_minus)
    ));
    Ok(out)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.8}")).collect::<Vec<_>>().join(",")
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "clause": v.clause.label(),
        "status": v.status(),
        "pass": v.pass,
        "region": v.region,
        "sup_error": v.sup_error,
        "tolerance": v.tolerance,
        "times": v.times,
        "errors": v.errors,
        "worst_location": v.worst_location,
        "tail_nonincreasing": v.tail_nonincreasing,
        "notes": v.notes,
    })
}

/// Theorem premises that fail are recorded on the clause, not raised.
fn clause_record(clause: Clause, r: Result<Verdict, CoreError>) -> Result<(bool, Value), CliError> {
    match r {
        Ok(v) => Ok((v.pass, verdict_json(&v))),
        Err(CoreError::Hypotheses(msg)) => Ok((
            false,
            json!({
                "clause": clause.label(),
                "status": "hypotheses-unmet",
                "pass": false,
                "message": msg,
            }),
        )),
        Err(e) => Err(e.into()),
    }
}

fn fronts(cfg: &RunConfig, traj: &Trajectory) -> Result<Vec<(&'static str, FrontTrace)>, CliError> {
    let up = cfg.model.u_star(Side::Plus)?[0];
    let um = cfg.model.u_star(Side::Minus)?[0];
    let c = cfg.model.c();
    Ok(vec![
        ("rightmost", track_front(traj, 0.5 * up, Direction::Rightmost, 0)?.to_lab(c)),
        ("leftmost", track_front(traj, 0.5 * um, Direction::Leftmost, 0)?.to_lab(c)),
    ])
}

/// Evaluates the requested clauses on one run; writes `verdicts.json` and
/// `fronts.csv`.
pub fn cmd_verify(cfg: &RunConfig, clauses: &[Clause]) -> Result<CommandOutcome, CliError> {
    let (plus, minus) = cfg.model.speeds()?;
    let fs = plus.frame_speeds.expect("speeds carry frame speeds");
    let (traj, mon) = simulate(cfg)?;
    let a = &cfg.analysis;
    let mut wave: Option<WaveProfile> = None;
    let mut records = Vec::new();
    let mut all_pass = true;
    let mut lines = Vec::new();
    for &clause in clauses {
        if matches!(clause, Clause::WaveTails | Clause::Attractivity) && wave.is_none() {
            wave = Some(wave_profile(cfg)?);
        }
        let r = match (clause, &cfg.model) {
            (Clause::Spreading, Model::Scalar(m)) => {
                spreading_verdict(&traj, m, &fs, a.epsilon, a.t_min, a.spreading_tol)
            }
            (Clause::Spreading, Model::System(m)) => {
                system_spreading_verdict(&traj, m, &fs, a.epsilon, a.alpha, a.t_min, a.spreading_tol)
            }
            (Clause::Annihilation, Model::Scalar(m)) => {
                annihilation_verdict(&traj, m, &fs, a.epsilon, a.t_min, a.annihilation_tol)
            }
            (Clause::Annihilation, Model::System(_)) => {
                system_annihilation_verdict(&traj, &fs, a.epsilon, a.t_min, a.annihilation_tol)
            }
            (Clause::WaveTails, model) => {
                let up = model.u_star(Side::Plus)?;
                let um = model.u_star(Side::Minus)?;
                wave_tails_verdict(wave.as_ref().unwrap(), &up, &um, a.wave_tol)
            }
            (Clause::Attractivity, Model::Scalar(m)) => attractivity_verdict(
                &traj,
                wave.as_ref().unwrap(),
                m,
                &fs,
                a.epsilon,
                a.t_min,
                a.attractivity_tol,
            ),
            (Clause::Attractivity, Model::System(_)) => system_attractivity_verdict(
                &traj,
                wave.as_ref().unwrap(),
                &fs,
                a.epsilon,
                a.t_min,
                a.attractivity_tol,
            ),
            (Clause::Sandwich, Model::Scalar(m)) => {
                sandwich_check(m, &initial_field(cfg)?, &sim_config(cfg), SANDWICH_TOL)
            }
            (Clause::Sandwich, Model::System(_)) => {
                return Err(CliError::Config(
                    "--clauses: sandwich applies to scalar models only".into(),
                ))
            }
        };
        let (pass, record) = clause_record(clause, r)?;
        let status = record["status"].as_str().unwrap_or("fail").to_string();
        let detail = record
            .get("sup_error")
            .and_then(Value::as_f64)
            .map(|e| format!("sup_error={e:.6e}"))
            .or_else(|| record.get("message").and_then(Value::as_str).map(str::to_string))
            .unwrap_or_default();
        lines.push(format!("{}: {status} {detail}", clause.label()));
        all_pass &= pass;
        records.push(record);
    }

    let mut out = CommandOutcome::default();
    let dir = &cfg.output_dir;
    let mut w = create(dir, "fronts.csv", &mut out.files)?;
    writeln!(w, "front,t,x")?;
    for (label, trace) in fronts(cfg, &traj)? {
        trace.write_csv_rows(&mut w, label)?;
    }
    w.flush()?;
    let body = merge(
        header(cfg),
        json!({
            "csv": "fronts.csv",
            "speeds": {
                "plus": speed_json(&plus),
                "minus": speed_json(&minus),
                "frames": frame_json(&fs),
            },
            "monitor": monitor_json(cfg, &mon),
            "verdicts": records,
        }),
    );
    write_json(dir, "verdicts.json", &body, &mut out.files)?;
    out.stdout = lines;
    out.verdict_failed = !all_pass;
    Ok(out)
}

struct SweepRow {
    value: f64,
    hash: String,
    c_star_plus: f64,
    c_star_minus: f64,
    right: Option<(f64, f64)>,
    left: Option<(f64, f64)>,
    monitor: RunMonitor,
}

fn sweep_one(base: &RunConfig, section: &str, key: &str, value: f64) -> Result<SweepRow, CliError> {
    let cfg = base.with_override(section, key, value)?;
    let (traj, monitor) = simulate(&cfg)?;
    let frac = cfg.analysis.front_fraction;
    // a front that never forms or stalls leaves its cells empty
    let fit = |trace: FrontTrace| estimate_speed(&trace, frac).ok();
    let mut traces = fronts(&cfg, &traj)?.into_iter().map(|(_, t)| t);
    let right = fit(traces.next().unwrap());
    let left = fit(traces.next().unwrap());
    Ok(SweepRow {
        value,
        hash: cfg.hash(),
        c_star_plus: cfg.c_star_plus,
        c_star_minus: cfg.c_star_minus,
        right,
        left,
        monitor,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(propagate_core::grid::fmt_sig17).unwrap_or_default()
}

/// Runs the configuration once per value of `analysis.sweep_param`, at most
/// `jobs` at a time; writes `sweep.csv` (rows in input order) and
/// `sweep.json`.
pub fn cmd_sweep(cfg: &RunConfig, jobs: usize) -> Result<CommandOutcome, CliError> {
    let a = &cfg.analysis;
    let Some((section, key)) = a.sweep_param.clone() else {
        return Err(CliError::Config("analysis.sweep_param: required by sweep".into()));
    };
    if a.sweep_values.is_empty() {
        return Err(CliError::Config("analysis.sweep_values: required by sweep".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        a.sweep_values
            .par_iter()
            .map(|&v| sweep_one(cfg, &section, &key, v))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut out = CommandOutcome::default();
    let dir = &cfg.output_dir;
    let mut w = create(dir, "sweep.csv", &mut out.files)?;
    writeln!(
        w,
        "{key},c_star_plus,c_star_minus,front_speed_right,r2_right,front_speed_left,r2_left,min_u,max_u"
    )?;
    for r in &rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            cell(Some(r.value)),
            cell(Some(r.c_star_plus)),
            cell(Some(r.c_star_minus)),
            cell(r.right.map(|p| p.0)),
            cell(r.right.map(|p| p.1)),
            cell(r.left.map(|p| p.0)),
            cell(r.left.map(|p| p.1)),
            cell(Some(r.monitor.min_value)),
            cell(Some(r.monitor.max_value)),
        )?;
    }
    w.flush()?;
    let runs: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "value": r.value, "config_hash": r.hash, "front_found": r.right.is_some() }))
        .collect();
    let body = merge(
        header(cfg),
        json!({ "csv": "sweep.csv", "param": format!("{section}.{key}"), "jobs": jobs.max(1), "runs": runs }),
    );
    write_json(dir, "sweep.json", &body, &mut out.files)?;
    out.stdout.push(format!("swept {section}.{key} over {} values", rows.len()));
    for r in &rows {
        out.stdout.push(format!(
            "{key}={} front_speed_right={}",
            r.value,
            r.right.map(|p| format!("{:.6}", p.0)).unwrap_or_else(|| "none".into())
        ));
    }
    Ok(out)
}
