//! Run configuration: flat `[section]` blocks of `key = value` lines.
//!
//! Values are bare words, numbers or comma-separated number lists, which is
//! why this is a small line parser rather than TOML. Every key is checked
//! against the section (and, for `[model]`, the model kind); anything unknown
//! is rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use propagate_core::analysis::{ANNIHILATION_TOL, SPREADING_TOL};
use propagate_core::models::{LogisticParams, PairParams, RickerParams, TabulatedReaction};
use propagate_core::speeds::{scalar_speeds, system_speeds, SpeedReport};
use propagate_core::{CooperativeModel, Frame, Grid1D, ScalarShiftModel, Side};

use crate::CliError;

const SECTIONS: [&str; 6] = ["model", "grid", "time", "ic", "analysis", "output"];

/// Extra room, on top of twice the fastest front's travel, that the domain
/// must provide.
pub const DOMAIN_PAD: f64 = 20.0;
/// `dt <= REACTION_DT_FACTOR / (mu max |df/du|)`.
pub const REACTION_DT_FACTOR: f64 = 0.1;

/// Parsed but unvalidated sections, kept so sweeps can override one key and
/// reload.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        let mut current: Option<String> = None;
        for (n, line) in text.lines().enumerate() {
            let lineno = n + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(CliError::Config(format!(
                        "line {lineno}: unknown section [{name}] (expected one of {})",
                        SECTIONS.join(", ")
                    )));
                }
                raw.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!("line {lineno}: expected `key = value`, got {line:?}")));
            };
            let Some(section) = &current else {
                return Err(CliError::Config(format!("line {lineno}: `{}` appears before any [section]", key.trim())));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(CliError::Config(format!("line {lineno}: empty key or value")));
            }
            let entries = raw.sections.get_mut(section).unwrap();
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Config(format!("line {lineno}: {section}.{key} set twice")));
            }
        }
        Ok(raw)
    }

    /// Sets `section.key`, replacing any previous value.
    pub fn set(&mut self, section: &str, key: &str, value: String) -> Result<(), CliError> {
        if !SECTIONS.contains(&section) {
            return Err(CliError::Config(format!("unknown section [{section}]")));
        }
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value);
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }
}

/// Typed access to one section that remembers which keys were consumed.
struct Section<'a> {
    name: &'static str,
    entries: Option<&'a BTreeMap<String, String>>,
    used: Vec<&'static str>,
}

impl<'a> Section<'a> {
    fn new(raw: &'a RawConfig, name: &'static str) -> Self {
        Self {
            name,
            entries: raw.sections.get(name),
            used: Vec::new(),
        }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a str> {
        self.used.push(key);
        self.entries?.get(key).map(String::as_str)
    }

    fn num(&mut self, key: &'static str, default: f64) -> Result<f64, CliError> {
        self.num_opt(key).map(|v| v.unwrap_or(default))
    }

    fn num_opt(&mut self, key: &'static str) -> Result<Option<f64>, CliError> {
        let name = self.name;
        match self.raw(key) {
            None => Ok(None),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(CliError::Config(format!("{name}.{key}: expected a finite number, got {v:?}"))),
            },
        }
    }

    fn list(&mut self, key: &'static str) -> Result<Vec<f64>, CliError> {
        let name = self.name;
        let Some(v) = self.raw(key) else {
            return Ok(Vec::new());
        };
        v.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Config(format!("{name}.{key}: bad list entry {:?}", p.trim())))
            })
            .collect()
    }

    fn word(&mut self, key: &'static str, default: &'static str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    /// Rejects keys nobody asked for.
    fn finish(self) -> Result<(), CliError> {
        if let Some(entries) = self.entries {
            for key in entries.keys() {
                if !self.used.contains(&key.as_str()) {
                    let mut known = self.used.clone();
                    known.sort_unstable();
                    known.dedup();
                    return Err(CliError::Config(format!(
                        "unknown key {}.{key} (known here: {})",
                        self.name,
                        known.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }
}

fn require(ok: bool, key: &str, constraint: impl std::fmt::Display) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: constraint violated: {constraint}")))
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    Scalar(ScalarShiftModel),
    System(CooperativeModel),
}

impl Model {
    /// Habitat shift speed; systems are stationary.
    pub fn c(&self) -> f64 {
        match self {
            Model::Scalar(m) => m.c,
            Model::System(_) => 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Scalar(_) => 1,
            Model::System(m) => m.dim(),
        }
    }

    pub fn cap(&self) -> Vec<f64> {
        match self {
            Model::Scalar(m) => vec![m.cap()],
            Model::System(m) => m.cap().to_vec(),
        }
    }

    pub fn u_star(&self, side: Side) -> Result<Vec<f64>, CliError> {
        Ok(match self {
            Model::Scalar(m) => vec![m.u_star(side)?],
            Model::System(m) => m.u_star(side)?.to_vec(),
        })
    }

    pub fn speeds(&self) -> Result<(SpeedReport, SpeedReport), CliError> {
        Ok(match self {
            Model::Scalar(m) => scalar_speeds(m)?,
            Model::System(m) => system_speeds(m)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IcKind {
    Bump,
    Xi,
    XiTilde,
    Constant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IcSpec {
    pub kind: IcKind,
    pub amplitude: f64,
    pub d: f64,
    pub rho: f64,
    pub center: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisSpec {
    pub epsilon: f64,
    pub t_min: f64,
    /// Lower end `alpha` of the system spreading region.
    pub alpha: f64,
    pub spreading_tol: f64,
    pub annihilation_tol: f64,
    pub attractivity_tol: f64,
    pub wave_tol: f64,
    pub front_fraction: f64,
    pub wave_x_min: f64,
    pub wave_x_max: f64,
    pub tol_steady: f64,
    pub wave_t_max: f64,
    /// `section.key` varied by `sweep`.
    pub sweep_param: Option<(String, String)>,
    pub sweep_values: Vec<f64>,
}

/// A validated run configuration with every derived quantity resolved.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub model: Model,
    pub model_kind: String,
    /// Model parameters as given or defaulted, for the echo.
    pub model_params: Vec<(String, String)>,
    pub grid: Grid1D,
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub frame: Frame,
    pub ic: IcSpec,
    pub analysis: AnalysisSpec,
    pub output_dir: PathBuf,
    /// Directory relative paths in the config resolve against.
    pub base_dir: PathBuf,
    pub c_star_plus: f64,
    pub c_star_minus: f64,
    /// Closed form `2 sqrt(d mu (f'_+(0) - 1))` for delay-free scalar models,
    /// the computed `c*(+inf)` otherwise.
    pub c_star_prediction: f64,
    pub warnings: Vec<String>,
}

/// Parses and validates `text`; relative paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    load(RawConfig::parse(text)?, base_dir)
}

pub fn load(raw: RawConfig, base_dir: &Path) -> Result<RunConfig, CliError> {
    let mut warnings = Vec::new();
    let (model, model_kind, model_params) = load_model(&raw, base_dir)?;

    let mut g = Section::new(&raw, "grid");
    let x_min = g.num("x_min", -200.0)?;
    let x_max = g.num("x_max", 200.0)?;
    let dx_req = g.num("dx", 0.1)?;
    g.finish()?;
    require(x_min < x_max, "grid.x_min", format!("x_min < x_max ({x_min} >= {x_max})"))?;
    require(dx_req > 0.0, "grid.dx", format!("dx > 0 (got {dx_req})"))?;
    let grid = Grid1D::with_spacing(x_min, x_max, dx_req)?;

    let mut t = Section::new(&raw, "time");
    let mut dt = t.num("dt", 0.02)?;
    let t_end = t.num("t_end", 60.0)?;
    let every = t.num("snapshot_every", 1.0)?;
    let frame: Frame = t.word("frame", "lab").parse()?;
    t.finish()?;
    require(dt > 0.0, "time.dt", format!("dt > 0 (got {dt})"))?;
    require(t_end >= dt, "time.t_end", format!("t_end >= dt ({t_end} < {dt})"))?;
    if matches!(model, Model::System(_)) && frame == Frame::Comoving {
        return Err(CliError::Config(
            "time.frame: constraint violated: systems are stationary, use frame = lab".into(),
        ));
    }

    let tau = match &model {
        Model::Scalar(m) => m.tau,
        Model::System(_) => 0.0,
    };
    if tau > 0.0 {
        let k = (tau / dt - 1e-9).ceil().max(1.0);
        let adjusted = tau / k;
        if (adjusted - dt).abs() > 1e-12 * dt {
            warnings.push(format!(
                "time.dt adjusted from {dt} to {adjusted} so that tau/dt = {k} is an integer"
            ));
            dt = adjusted;
        }
    }
    let (bound, bound_text) = match &model {
        Model::Scalar(m) => (
            REACTION_DT_FACTOR / (m.mu * m.max_abs_du()),
            "0.1/(mu*max|df/du|)",
        ),
        Model::System(m) => (REACTION_DT_FACTOR / m.max_abs_jacobian(), "0.1/max|Df|"),
    };
    require(
        dt <= bound * (1.0 + 1e-12),
        "time.dt",
        format!("dt <= {bound_text} = {bound} (got {dt})"),
    )?;
    require(every >= dt * (1.0 - 1e-12), "time.snapshot_every", format!("snapshot_every >= dt = {dt}"))?;
    let stride = ((every / dt).round() as usize).max(1);

    let (plus, minus) = model.speeds()?;
    let (cp, cm) = (plus.c_star, minus.c_star);
    let c = model.c();
    let fastest = match frame {
        Frame::Lab => cp.max(cm),
        Frame::Comoving => (cp - c).abs().max((cm + c).abs()),
    };
    let needed = 2.0 * fastest * t_end + DOMAIN_PAD;
    require(
        x_max - x_min >= needed,
        "grid",
        format!(
            "domain margin: x_max - x_min = {} must be >= 2*maxspeed*t_end + {DOMAIN_PAD} = {needed} (maxspeed {fastest})",
            x_max - x_min
        ),
    )?;
    let c_star_prediction = match &model {
        Model::Scalar(m) if m.tau == 0.0 => {
            2.0 * (m.d * m.mu * (m.limit_jacobian(Side::Plus) - 1.0)).max(0.0).sqrt()
        }
        _ => cp,
    };

    let mut s = Section::new(&raw, "ic");
    let kind = match s.word("kind", "bump") {
        "bump" | "h" => IcKind::Bump,
        "xi" => IcKind::Xi,
        "xi_tilde" => IcKind::XiTilde,
        "constant" => IcKind::Constant,
        other => {
            return Err(CliError::Config(format!(
                "ic.kind: unknown initial condition {other:?} (bump, xi, xi_tilde, constant)"
            )))
        }
    };
    let ic = IcSpec {
        kind,
        amplitude: s.num("amplitude", 1.0)?,
        d: s.num("d", 5.0)?,
        rho: s.num("rho", 0.1)?,
        center: s.num("center", 0.0)?,
    };
    s.finish()?;
    let top = model.cap().into_iter().fold(f64::INFINITY, f64::min);
    require(
        ic.amplitude >= 0.0 && ic.amplitude <= top,
        "ic.amplitude",
        format!("0 <= amplitude <= cap = {top}"),
    )?;
    require(ic.d >= 0.0, "ic.d", "d >= 0")?;
    require((0.0..=1.0).contains(&ic.rho), "ic.rho", "0 <= rho <= 1")?;

    let u_plus = model.u_star(Side::Plus)?.into_iter().fold(f64::INFINITY, f64::min);
    let mut a = Section::new(&raw, "analysis");
    let sweep_param = match a.raw("sweep_param") {
        None => None,
        Some(p) => {
            let (sec, key) = p.split_once('.').unwrap_or(("model", p));
            if !SECTIONS.contains(&sec) || sec == "output" {
                return Err(CliError::Config(format!("analysis.sweep_param: unknown section in {p:?}")));
            }
            Some((sec.to_string(), key.to_string()))
        }
    };
    let analysis = AnalysisSpec {
        epsilon: a.num("epsilon", 0.2)?,
        t_min: a.num("t_min", 0.5 * t_end)?,
        alpha: a.num("alpha", 20.0)?,
        spreading_tol: a.num("spreading_tol", SPREADING_TOL * u_plus)?,
        annihilation_tol: a.num("annihilation_tol", ANNIHILATION_TOL * u_plus)?,
        attractivity_tol: a.num("attractivity_tol", SPREADING_TOL * u_plus)?,
        wave_tol: a.num("wave_tol", 1e-3)?,
        front_fraction: a.num("front_fraction", 0.4)?,
        wave_x_min: a.num("wave_x_min", x_min)?,
        wave_x_max: a.num("wave_x_max", x_max)?,
        tol_steady: a.num("tol_steady", 1e-8)?,
        wave_t_max: a.num("wave_t_max", 400.0)?,
        sweep_param,
        sweep_values: a.list("sweep_values")?,
    };
    a.finish()?;
    require(analysis.epsilon > 0.0, "analysis.epsilon", "epsilon > 0")?;
    require(
        analysis.t_min >= 0.0 && analysis.t_min <= t_end,
        "analysis.t_min",
        format!("0 <= t_min <= t_end = {t_end}"),
    )?;
    require(
        analysis.front_fraction > 0.0 && analysis.front_fraction <= 1.0,
        "analysis.front_fraction",
        "0 < front_fraction <= 1",
    )?;
    require(
        analysis.wave_x_min < analysis.wave_x_max,
        "analysis.wave_x_min",
        "wave_x_min < wave_x_max",
    )?;
    require(analysis.tol_steady > 0.0, "analysis.tol_steady", "tol_steady > 0")?;
    require(analysis.wave_t_max > 0.0, "analysis.wave_t_max", "wave_t_max > 0")?;
    for (key, v) in [
        ("analysis.spreading_tol", analysis.spreading_tol),
        ("analysis.annihilation_tol", analysis.annihilation_tol),
        ("analysis.attractivity_tol", analysis.attractivity_tol),
        ("analysis.wave_tol", analysis.wave_tol),
    ] {
        require(v >= 0.0, key, "tolerance >= 0")?;
    }

    let mut o = Section::new(&raw, "output");
    let dir = o.word("dir", ".");
    o.finish()?;
    let output_dir = base_dir.join(dir);

    Ok(RunConfig {
        raw,
        model,
        model_kind,
        model_params,
        grid,
        dt,
        t_end,
        stride,
        frame,
        ic,
        analysis,
        output_dir,
        base_dir: base_dir.to_path_buf(),
        c_star_plus: cp,
        c_star_minus: cm,
        c_star_prediction,
        warnings,
    })
}

fn param(s: &mut Section, params: &mut Vec<(String, String)>, key: &'static str, default: f64) -> Result<f64, CliError> {
    let v = s.num(key, default)?;
    params.push((key.to_string(), v.to_string()));
    Ok(v)
}

type LoadedModel = (Model, String, Vec<(String, String)>);

fn load_model(raw: &RawConfig, base_dir: &Path) -> Result<LoadedModel, CliError> {
    let mut s = Section::new(raw, "model");
    let kind = s.word("kind", "fisher").to_string();
    let mut params: Vec<(String, String)> = Vec::new();
    let p = &mut params;
    let model = match kind.as_str() {
        "fisher" => Model::Scalar(ScalarShiftModel::fisher()),
        "homogeneous_logistic" => {
            let beta = param(&mut s, p, "beta", 1.0)?;
            let mu = param(&mut s, p, "mu", 3.0)?;
            let d = param(&mut s, p, "d", 1.0)?;
            let tau = param(&mut s, p, "tau", 0.0)?;
            let c = param(&mut s, p, "c", 0.0)?;
            Model::Scalar(ScalarShiftModel::homogeneous_logistic(beta, mu, d, tau, c)?)
        }
        "shifted_logistic" => Model::Scalar(ScalarShiftModel::shifted_logistic(LogisticParams {
            beta_minus: param(&mut s, p, "beta_minus", 0.25)?,
            beta_plus: param(&mut s, p, "beta_plus", 1.0)?,
            w: param(&mut s, p, "w", 1.0)?,
            mu: param(&mut s, p, "mu", 3.0)?,
            d: param(&mut s, p, "d", 1.0)?,
            tau: param(&mut s, p, "tau", 0.0)?,
            c: param(&mut s, p, "c", 0.0)?,
        })?),
        "shifted_ricker" => Model::Scalar(ScalarShiftModel::shifted_ricker(RickerParams {
            p_minus: param(&mut s, p, "p_minus", 1.5)?,
            p_plus: param(&mut s, p, "p_plus", 2.0)?,
            w: param(&mut s, p, "w", 1.0)?,
            mu: param(&mut s, p, "mu", 3.0)?,
            d: param(&mut s, p, "d", 1.0)?,
            tau: param(&mut s, p, "tau", 0.0)?,
            c: param(&mut s, p, "c", 0.0)?,
        })?),
        "cooperative_pair" => {
            let bm = param(&mut s, p, "beta_minus", 0.25)?;
            let bp = param(&mut s, p, "beta_plus", 1.0)?;
            let p = PairParams {
                beta_minus: [param(&mut s, p, "beta_minus_1", bm)?, param(&mut s, p, "beta_minus_2", bm)?],
                beta_plus: [param(&mut s, p, "beta_plus_1", bp)?, param(&mut s, p, "beta_plus_2", bp)?],
                kappa: param(&mut s, p, "kappa", 0.3)?,
                w: param(&mut s, p, "w", 1.0)?,
                diffusivities: [param(&mut s, p, "d1", 1.0)?, param(&mut s, p, "d2", 1.0)?],
            };
            Model::System(CooperativeModel::cooperative_pair(p)?)
        }
        "tabulated" => {
            let Some(table) = s.raw("table") else {
                return Err(CliError::Config("model.table: required for kind = tabulated".into()));
            };
            p.push(("table".into(), table.to_string()));
            let path = base_dir.join(table);
            let file = std::fs::File::open(&path)
                .map_err(|e| CliError::Config(format!("model.table: cannot open {}: {e}", path.display())))?;
            let reaction = TabulatedReaction::read_csv(std::io::BufReader::new(file))?;
            let cap_default = reaction.u_max();
            let d = param(&mut s, p, "d", 1.0)?;
            let mu = param(&mut s, p, "mu", 3.0)?;
            let tau = param(&mut s, p, "tau", 0.0)?;
            let c = param(&mut s, p, "c", 0.0)?;
            let cap = param(&mut s, p, "cap", cap_default)?;
            Model::Scalar(ScalarShiftModel::from_reaction(
                "tabulated",
                Arc::new(reaction),
                d,
                mu,
                tau,
                c,
                cap,
            )?)
        }
        other => {
            return Err(CliError::Config(format!(
                "model.kind: unknown model {other:?} (fisher, homogeneous_logistic, shifted_logistic, shifted_ricker, cooperative_pair, tabulated)"
            )))
        }
    };
    s.finish()?;
    Ok((model, kind, params))
}

impl RunConfig {
    /// Every resolved setting as sorted `key = value` pairs. The output
    /// directory is left out so that relocating a run keeps its hash.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut e = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            e.insert(k.to_string(), v);
        };
        put("model.kind", self.model_kind.clone());
        for (k, v) in &self.model_params {
            put(&format!("model.{k}"), v.clone());
        }
        put("model.cap", join(&self.model.cap()));
        for side in Side::BOTH {
            if let Ok(u) = self.model.u_star(side) {
                put(&format!("model.u_star_{side}"), join(&u));
            }
        }
        put("grid.x_min", self.grid.x_min().to_string());
        put("grid.x_max", self.grid.x_max().to_string());
        put("grid.dx", self.grid.dx().to_string());
        put("grid.n", self.grid.len().to_string());
        put("time.dt", self.dt.to_string());
        put("time.t_end", self.t_end.to_string());
        put("time.steps", ((self.t_end / self.dt).round() as usize).to_string());
        put("time.stride", self.stride.to_string());
        put("time.frame", self.frame.to_string());
        let ic_kind = match self.ic.kind {
            IcKind::Bump => "bump",
            IcKind::Xi => "xi",
            IcKind::XiTilde => "xi_tilde",
            IcKind::Constant => "constant",
        };
        put("ic.kind", ic_kind.into());
        put("ic.amplitude", self.ic.amplitude.to_string());
        put("ic.d", self.ic.d.to_string());
        put("ic.rho", self.ic.rho.to_string());
        put("ic.center", self.ic.center.to_string());
        let a = &self.analysis;
        for (k, v) in [
            ("epsilon", a.epsilon),
            ("t_min", a.t_min),
            ("alpha", a.alpha),
            ("spreading_tol", a.spreading_tol),
            ("annihilation_tol", a.annihilation_tol),
            ("attractivity_tol", a.attractivity_tol),
            ("wave_tol", a.wave_tol),
            ("front_fraction", a.front_fraction),
            ("wave_x_min", a.wave_x_min),
            ("wave_x_max", a.wave_x_max),
            ("tol_steady", a.tol_steady),
            ("wave_t_max", a.wave_t_max),
        ] {
            put(&format!("analysis.{k}"), v.to_string());
        }
        if let Some((sec, key)) = &a.sweep_param {
            put("analysis.sweep_param", format!("{sec}.{key}"));
            put("analysis.sweep_values", join(&a.sweep_values));
        }
        put("derived.c_star_plus", self.c_star_plus.to_string());
        put("derived.c_star_minus", self.c_star_minus.to_string());
        put("derived.c_star_prediction", self.c_star_prediction.to_string());
        e
    }

    /// SHA-256 of the echo, one `key = value` line per entry.
    pub fn hash(&self) -> String {
        let mut text = String::new();
        for (k, v) in self.echo() {
            let _ = writeln!(text, "{k} = {v}");
        }
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// The same configuration with one raw key replaced.
    pub fn with_override(&self, section: &str, key: &str, value: f64) -> Result<RunConfig, CliError> {
        let mut raw = self.raw.clone();
        raw.set(section, key, value.to_string())?;
        let mut out = load(raw, &self.base_dir)?;
        out.output_dir = self.output_dir.clone();
        Ok(out)
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Reads and resolves a config file; relative paths resolve against its directory.
pub fn load_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}
