//! Flat `key = value` experiment configs.
//!
//! One assignment per line, `#` starts a comment, keys carry dotted section
//! prefixes. Unknown and repeated keys are errors. List values are comma
//! separated.
//!
//! ```text
//! model = vdp
//! params.kappa2 = 100
//! grid.delta.min = -5
//! grid.delta.max = 5
//! grid.delta.count = 41
//! measures = mi, sc
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::measures::Side;
use crate::models::{CavityQubitParams, VdpParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Vdp,
    CavityQubit,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Vdp => "vdp",
            ModelKind::CavityQubit => "cavity-qubit",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vdp" => Ok(ModelKind::Vdp),
            "cavity-qubit" => Ok(ModelKind::CavityQubit),
            _ => Err(Error::Config(format!("model: unknown model '{s}' (vdp | cavity-qubit)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    Mi,
    Sc,
    Classical,
    Discord,
    Negativity,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Mi => "mi",
            Measure::Sc => "sc",
            Measure::Classical => "classical",
            Measure::Discord => "discord",
            Measure::Negativity => "negativity",
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mi" => Ok(Measure::Mi),
            "sc" => Ok(Measure::Sc),
            "classical" => Ok(Measure::Classical),
            "discord" => Ok(Measure::Discord),
            "negativity" => Ok(Measure::Negativity),
            _ => Err(Error::Config(format!(
                "measures: unknown measure '{s}' (mi, sc, classical, discord, negativity)"
            ))),
        }
    }
}

/// `count` evenly spaced values from `min` to `max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config(format!("{name}.count must be at least 1")));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(format!("{name}: bounds must be finite")));
        }
        if self.min > self.max {
            return Err(Error::Config(format!(
                "{name}: min {} exceeds max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Bound on the steady-state residual `‖L(ρ)‖_F`.
    pub tol: f64,
    pub leak_tol: f64,
    /// Allowed change of the mutual information between consecutive cutoffs.
    pub obs_tol: f64,
    pub start_cutoff: usize,
    pub max_cutoff: usize,
    pub growth: f64,
}

impl SolverConfig {
    /// The cavity-qubit space is `4d²`, so its schedule stays short.
    fn defaults(model: ModelKind, start_cutoff: usize) -> Self {
        let (max_cutoff, growth) = match model {
            ModelKind::Vdp => (32, 1.5),
            ModelKind::CavityQubit => (6, 1.25),
        };
        Self {
            tol: 1e-9,
            leak_tol: 1e-4,
            obs_tol: 1e-4,
            start_cutoff,
            max_cutoff,
            growth,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("solver.tol must be positive, got {}", self.tol)));
        }
        if !(self.leak_tol >= 0.0) {
            return Err(Error::Config(format!("solver.leak_tol must be non-negative, got {}", self.leak_tol)));
        }
        if !(self.obs_tol >= 0.0) {
            return Err(Error::Config(format!("solver.obs_tol must be non-negative, got {}", self.obs_tol)));
        }
        if self.start_cutoff < 3 {
            return Err(Error::Config(format!(
                "solver.start_cutoff must be at least 3, got {}",
                self.start_cutoff
            )));
        }
        if self.max_cutoff < self.start_cutoff {
            return Err(Error::Config(format!(
                "solver.max_cutoff {} is below solver.start_cutoff {}",
                self.max_cutoff, self.start_cutoff
            )));
        }
        if !(self.growth > 1.0) {
            return Err(Error::Config(format!("solver.growth must exceed 1, got {}", self.growth)));
        }
        Ok(())
    }
}

/// Fixed model parameters; the grid overrides the detuning and coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Vdp(VdpParams),
    CavityQubit(CavityQubitParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Vdp(_) => ModelKind::Vdp,
            ModelParams::CavityQubit(_) => ModelKind::CavityQubit,
        }
    }
}

/// A `(Δ, g)` steady-state sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub params: ModelParams,
    pub delta: GridAxis,
    pub g: GridAxis,
    pub measures: Vec<Measure>,
    /// Qubit measured for classical correlations and discord.
    pub side: Side,
    pub solver: SolverConfig,
    pub output: PathBuf,
    pub json: bool,
    pub workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialState {
    /// Both cavities empty, both qubits in the `σz = -1` state.
    VacuumGround,
    /// Both cavities empty, both qubits in the `σz = +1` state.
    VacuumExcited,
}

impl InitialState {
    pub fn name(self) -> &'static str {
        match self {
            InitialState::VacuumGround => "vacuum-ground",
            InitialState::VacuumExcited => "vacuum-excited",
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vacuum-ground" => Ok(InitialState::VacuumGround),
            "vacuum-excited" => Ok(InitialState::VacuumExcited),
            _ => Err(Error::Config(format!(
                "transient.initial: unknown state '{s}' (vacuum-ground | vacuum-excited)"
            ))),
        }
    }
}

/// Observables recorded during a transient run.
pub const TRANSIENT_OBSERVABLES: [&str; 8] = ["sx1", "sx2", "sy1", "sy2", "sz1", "sz2", "n1", "n2"];

/// Time evolution of the cavity-qubit pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransientConfig {
    pub params: CavityQubitParams,
    pub initial: InitialState,
    /// Duration in units of `τ = 2π/ω1`.
    pub periods: f64,
    pub samples_per_period: usize,
    /// The qubit mutual information is evaluated on every `mi_every`-th sample.
    pub mi_every: usize,
    pub observables: Vec<String>,
    pub rtol: f64,
    pub atol: f64,
    pub output: PathBuf,
    pub json: bool,
}

/// Either kind of config, as selected by the `kind` key.
#[derive(Clone, Debug, PartialEq)]
pub enum Config {
    Sweep(SweepConfig),
    Transient(TransientConfig),
}

/// Reads and validates a config file; `kind = transient` selects a
/// transient run, anything else a sweep.
pub fn parse_config(path: impl AsRef<Path>) -> Result<Config> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.as_ref().display())))?;
    let entries = Entries::parse(&text)?;
    match entries.map.get("kind").map(String::as_str) {
        Some("transient") => Ok(Config::Transient(TransientConfig::parse(&text)?)),
        Some("sweep") | None => Ok(Config::Sweep(SweepConfig::parse(&text, None)?)),
        Some(other) => Err(Error::Config(format!("kind: unknown kind '{other}' (sweep | transient)"))),
    }
}

impl SweepConfig {
    /// Parses a sweep config. `model` may be omitted when `default_model`
    /// is given.
    pub fn parse(text: &str, default_model: Option<ModelKind>) -> Result<Self> {
        Self::parse_with(text, default_model, None)
    }

    /// Like [`SweepConfig::parse`], with the measure list used when the
    /// config has no `measures` key.
    pub fn parse_with(text: &str, default_model: Option<ModelKind>, default_measures: Option<&[Measure]>) -> Result<Self> {
        let mut e = Entries::parse(text)?;
        if let Some(kind) = e.take("kind") {
            if kind != "sweep" {
                return Err(Error::Config(format!("kind: expected 'sweep', got '{kind}'")));
            }
        }
        let model = match e.take("model") {
            Some(m) => m.parse()?,
            None => default_model.ok_or_else(|| Error::Config("model: missing (vdp | cavity-qubit)".into()))?,
        };
        let params = match model {
            ModelKind::Vdp => ModelParams::Vdp(e.params(VdpParams::default(), &GRID_DRIVEN)?),
            ModelKind::CavityQubit => {
                ModelParams::CavityQubit(e.params(CavityQubitParams::default(), &GRID_DRIVEN)?)
            }
        };
        let (delta_default, g_default, start_default, measures_default) = match &params {
            ModelParams::Vdp(p) => (
                GridAxis::new(-5.0, 5.0, 41),
                GridAxis::new(0.0, 5.0, 21),
                VdpParams::default_cutoff(p.kappa1, p.kappa2),
                vec![Measure::Mi, Measure::Sc],
            ),
            ModelParams::CavityQubit(_) => (
                GridAxis::new(-10.0, 10.0, 41),
                GridAxis::new(0.0, 1.0, 21),
                4,
                vec![Measure::Mi],
            ),
        };
        let delta = e.axis("grid.delta", delta_default)?;
        let g = e.axis("grid.g", g_default)?;
        let mut measures = match e.take("measures") {
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<Result<Vec<Measure>>>()?,
            None => default_measures.map_or(measures_default, <[Measure]>::to_vec),
        };
        measures.sort();
        measures.dedup();
        let side = match e.take("correlations.side").as_deref() {
            None | Some("a") => Side::A,
            Some("b") => Side::B,
            Some(other) => return Err(Error::Config(format!("correlations.side: expected a or b, got '{other}'"))),
        };
        let d = SolverConfig::defaults(model, start_default);
        let solver = SolverConfig {
            tol: e.value("solver.tol", d.tol)?,
            leak_tol: e.value("solver.leak_tol", d.leak_tol)?,
            obs_tol: e.value("solver.obs_tol", d.obs_tol)?,
            start_cutoff: e.value("solver.start_cutoff", d.start_cutoff)?,
            max_cutoff: e.value("solver.max_cutoff", d.max_cutoff)?,
            growth: e.value("solver.growth", d.growth)?,
        };
        let default_output = match model {
            ModelKind::Vdp => "vdp_sweep.csv",
            ModelKind::CavityQubit => "qubit_sweep.csv",
        };
        let output = PathBuf::from(e.take("output.path").unwrap_or_else(|| default_output.into()));
        let json = e.value("output.json", false)?;
        let workers = e.value("run.workers", default_workers())?;
        e.finish()?;

        let cfg = Self {
            params,
            delta,
            g,
            measures,
            side,
            solver,
            output,
            json,
            workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn model(&self) -> ModelKind {
        self.params.kind()
    }

    pub fn validate(&self) -> Result<()> {
        self.delta.validate("grid.delta")?;
        self.g.validate("grid.g")?;
        self.solver.validate()?;
        if self.measures.is_empty() {
            return Err(Error::Config("measures: at least one measure is required".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("run.workers must be at least 1".into()));
        }
        match &self.params {
            ModelParams::Vdp(p) => {
                p.validate().map_err(|e| Error::Config(format!("params: {e}")))?;
                if let Some(m) = self
                    .measures
                    .iter()
                    .find(|m| matches!(m, Measure::Classical | Measure::Discord))
                {
                    return Err(Error::Config(format!(
                        "measures: '{}' is only defined for the cavity-qubit model",
                        m.name()
                    )));
                }
            }
            ModelParams::CavityQubit(p) => {
                p.validate().map_err(|e| Error::Config(format!("params: {e}")))?;
                if self.measures.contains(&Measure::Sc) {
                    return Err(Error::Config("measures: 'sc' needs two bosonic modes (vdp model only)".into()));
                }
            }
        }
        Ok(())
    }

    /// Every setting that influences results, one `key = value` per line.
    /// Parsing the output yields the same config (up to `run.workers`,
    /// which is omitted).
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("kind", "sweep".into());
        put("model", self.model().name().into());
        for (k, v) in params_entries(&self.params, &GRID_DRIVEN) {
            put(&format!("params.{k}"), v);
        }
        for (name, axis) in [("grid.delta", &self.delta), ("grid.g", &self.g)] {
            put(&format!("{name}.min"), fmt_f64(axis.min));
            put(&format!("{name}.max"), fmt_f64(axis.max));
            put(&format!("{name}.count"), axis.count.to_string());
        }
        put(
            "measures",
            self.measures.iter().map(|m| m.name()).collect::<Vec<_>>().join(", "),
        );
        put(
            "correlations.side",
            match self.side {
                Side::A => "a".into(),
                Side::B => "b".into(),
            },
        );
        put("solver.tol", fmt_f64(self.solver.tol));
        put("solver.leak_tol", fmt_f64(self.solver.leak_tol));
        put("solver.obs_tol", fmt_f64(self.solver.obs_tol));
        put("solver.start_cutoff", self.solver.start_cutoff.to_string());
        put("solver.max_cutoff", self.solver.max_cutoff.to_string());
        put("solver.growth", fmt_f64(self.solver.growth));
        put("output.path", self.output.display().to_string());
        put("output.json", self.json.to_string());
        out
    }
}

impl TransientConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = Entries::parse(text)?;
        if let Some(kind) = e.take("kind") {
            if kind != "transient" {
                return Err(Error::Config(format!("kind: expected 'transient', got '{kind}'")));
            }
        }
        if let Some(m) = e.take("model") {
            if m.parse::<ModelKind>()? != ModelKind::CavityQubit {
                return Err(Error::Config("model: transient runs need the cavity-qubit model".into()));
            }
        }
        let params = e.params(
            CavityQubitParams {
                kappa: 0.1,
                ..Default::default()
            },
            &[],
        )?;
        let initial = match e.take("transient.initial") {
            Some(s) => s.parse()?,
            None => InitialState::VacuumGround,
        };
        let periods = e.value("transient.periods", 50.0)?;
        let samples_per_period = e.value("transient.samples_per_period", 40)?;
        let mi_every = e.value("transient.mi_every", 10)?;
        let observables = match e.take("transient.observables") {
            Some(v) => v
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
            None => vec!["sx1".to_string(), "sx2".to_string()],
        };
        let rtol = e.value("evolve.rtol", 1e-8)?;
        let atol = e.value("evolve.atol", 1e-10)?;
        let output = PathBuf::from(e.take("output.path").unwrap_or_else(|| "transient.csv".into()));
        let json = e.value("output.json", false)?;
        e.finish()?;
        let cfg = Self {
            params,
            initial,
            periods,
            samples_per_period,
            mi_every,
            observables,
            rtol,
            atol,
            output,
            json,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| Error::Config(format!("params: {e}")))?;
        if !(self.params.omega1 > 0.0) {
            return Err(Error::Config("params.omega1 must be positive (it sets the time unit)".into()));
        }
        if !(self.periods >= 20.0) || !self.periods.is_finite() {
            return Err(Error::Config(format!(
                "transient.periods must be at least 20, got {}",
                self.periods
            )));
        }
        if self.samples_per_period < 4 {
            return Err(Error::Config(format!(
                "transient.samples_per_period must be at least 4, got {}",
                self.samples_per_period
            )));
        }
        if self.mi_every == 0 {
            return Err(Error::Config("transient.mi_every must be at least 1".into()));
        }
        for o in &self.observables {
            if !TRANSIENT_OBSERVABLES.contains(&o.as_str()) {
                return Err(Error::Config(format!(
                    "transient.observables: unknown observable '{o}' ({})",
                    TRANSIENT_OBSERVABLES.join(", ")
                )));
            }
        }
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::Config("evolve.rtol and evolve.atol must be positive".into()));
        }
        Ok(())
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("kind", "transient".into());
        put("model", ModelKind::CavityQubit.name().into());
        for (k, v) in params_entries(&ModelParams::CavityQubit(self.params.clone()), &[]) {
            put(&format!("params.{k}"), v);
        }
        put("transient.initial", self.initial.name().into());
        put("transient.periods", fmt_f64(self.periods));
        put("transient.samples_per_period", self.samples_per_period.to_string());
        put("transient.mi_every", self.mi_every.to_string());
        put("transient.observables", self.observables.join(", "));
        put("evolve.rtol", fmt_f64(self.rtol));
        put("evolve.atol", fmt_f64(self.atol));
        put("output.path", self.output.display().to_string());
        put("output.json", self.json.to_string());
        out
    }
}

/// Parameters a sweep sets per grid point.
const GRID_DRIVEN: [&str; 3] = ["omega2", "g", "cutoff"];

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Shortest representation that parses back to the same value.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Parameter fields in declaration order, skipping the grid-driven ones.
fn params_entries(p: &ModelParams, skip: &[&str]) -> Vec<(String, String)> {
    let value = match p {
        ModelParams::Vdp(v) => serde_json::to_value(v).expect("plain struct"),
        ModelParams::CavityQubit(v) => serde_json::to_value(v).expect("plain struct"),
    };
    let Value::Object(map) = value else {
        return Vec::new();
    };
    let order: &[&str] = match p {
        ModelParams::Vdp(_) => &["omega1", "omega2", "g", "kappa1", "kappa2", "cutoff"],
        ModelParams::CavityQubit(_) => &[
            "omega1",
            "omega2",
            "g",
            "mu",
            "drive",
            "kappa",
            "cutoff",
            "qubit_energy_factor",
        ],
    };
    order
        .iter()
        .filter(|k| !skip.contains(k))
        .filter_map(|&k| {
            map.get(k).map(|v| {
                let s = match v.as_f64() {
                    Some(x) if v.is_f64() => fmt_f64(x),
                    _ => v.to_string(),
                };
                (k.to_string(), s)
            })
        })
        .collect()
}

/// Raw assignments, consumed key by key.
struct Entries {
    map: BTreeMap<String, String>,
    lines: BTreeMap<String, usize>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut lines = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected 'key = value', got '{line}'", i + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(Error::Config(format!("line {}: invalid key '{k}'", i + 1)));
            }
            if let Some(prev) = lines.insert(k.to_string(), i + 1) {
                return Err(Error::Config(format!(
                    "line {}: key '{k}' already set on line {prev}",
                    i + 1
                )));
            }
            map.insert(k.to_string(), v.to_string());
        }
        Ok(Self { map, lines })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn value<V: FromStr>(&mut self, key: &str, default: V) -> Result<V> {
        match self.map.remove(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| {
                Error::Config(format!(
                    "{key}: cannot parse '{s}' (line {})",
                    self.lines.get(key).copied().unwrap_or(0)
                ))
            }),
        }
    }

    fn axis(&mut self, name: &str, default: GridAxis) -> Result<GridAxis> {
        Ok(GridAxis {
            min: self.value(&format!("{name}.min"), default.min)?,
            max: self.value(&format!("{name}.max"), default.max)?,
            count: self.value(&format!("{name}.count"), default.count)?,
        })
    }

    /// Overlays `params.*` entries on `defaults` through serde so unknown
    /// fields are rejected by the parameter record itself.
    fn params<P>(&mut self, defaults: P, grid_driven: &[&str]) -> Result<P>
    where
        P: Serialize + for<'de> Deserialize<'de>,
    {
        let Value::Object(mut fields) = serde_json::to_value(&defaults).expect("plain struct") else {
            unreachable!("parameter records serialize to objects");
        };
        let keys: Vec<String> = self.map.keys().filter(|k| k.starts_with("params.")).cloned().collect();
        for key in keys {
            let raw = self.map.remove(&key).unwrap_or_default();
            let field = &key["params.".len()..];
            if grid_driven.contains(&field) {
                return Err(Error::Config(format!(
                    "{key}: set by the sweep (grid.delta, grid.g, solver.start_cutoff)"
                )));
            }
            let Some(slot) = fields.get_mut(field) else {
                return Err(Error::Config(format!("{key}: unknown parameter")));
            };
            *slot = if slot.is_u64() {
                raw.parse::<u64>()
                    .map(Value::from)
                    .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got '{raw}'")))?
            } else {
                raw.parse::<f64>()
                    .ok()
                    .and_then(|x| serde_json::Number::from_f64(x).map(Value::Number))
                    .ok_or_else(|| Error::Config(format!("{key}: expected a finite number, got '{raw}'")))?
            };
        }
        serde_json::from_value(Value::Object(Map::from_iter(fields)))
            .map_err(|e| Error::Config(format!("params: {e}")))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::Config(format!(
                "{k}: unknown key (line {})",
                self.lines.get(k).copied().unwrap_or(0)
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "model = vdp\ngrid.delta.count = 3\ngrid.g.count = 2\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = SweepConfig::parse(MINIMAL, None).unwrap();
        assert_eq!(c.model(), ModelKind::Vdp);
        assert_eq!(c.delta, GridAxis::new(-5.0, 5.0, 3));
        assert_eq!(c.solver.start_cutoff, 6);
        assert_eq!(c.solver.tol, 1e-9);
        assert_eq!(c.measures, vec![Measure::Mi, Measure::Sc]);
        assert!(c.workers >= 1);
    }

    #[test]
    fn zero_count_names_the_field() {
        let err = SweepConfig::parse("model = vdp\ngrid.g.count = 0\n", None).unwrap_err();
        assert!(err.to_string().contains("grid.g.count"), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        let err = SweepConfig::parse("model = vdp\ngrid.dleta.min = 1\n", None).unwrap_err();
        assert!(err.to_string().contains("grid.dleta.min"));
        let err = SweepConfig::parse("model = vdp\nparams.kappa3 = 1\n", None).unwrap_err();
        assert!(err.to_string().contains("params.kappa3"));
        let err = SweepConfig::parse("model = vdp\nsolver.tol = 1\nsolver.tol = 2\n", None).unwrap_err();
        assert!(err.to_string().contains("already set"));
        let err = SweepConfig::parse("model = vdp\nparams.g = 1\n", None).unwrap_err();
        assert!(err.to_string().contains("params.g"));
    }

    #[test]
    fn materialized_config_round_trips() {
        let text = "model = cavity-qubit # Fig. 3 setting\nparams.kappa = 0.05\nmeasures = discord, mi, negativity\n\
                    grid.delta.min = -2.5\nsolver.obs_tol = 3e-5\noutput.json = true\nrun.workers = 2\n";
        let c = SweepConfig::parse(text, None).unwrap();
        let again = SweepConfig::parse(&c.to_config_string(), None).unwrap();
        assert_eq!(again, SweepConfig { workers: again.workers, ..c.clone() });
        assert_eq!(again.to_config_string(), c.to_config_string());

        let t = TransientConfig::parse("params.g = -0.5\ntransient.periods = 25\n").unwrap();
        assert_eq!(TransientConfig::parse(&t.to_config_string()).unwrap(), t);
    }

    #[test]
    fn measure_model_compatibility() {
        assert!(SweepConfig::parse("model = vdp\nmeasures = discord\n", None).is_err());
        assert!(SweepConfig::parse("model = cavity-qubit\nmeasures = sc\n", None).is_err());
        assert!(SweepConfig::parse("measures = \n", Some(ModelKind::Vdp)).is_err());
    }

    #[test]
    fn transient_validation() {
        assert!(TransientConfig::parse("transient.periods = 10\n").is_err());
        assert!(TransientConfig::parse("transient.observables = sx1, foo\n").is_err());
        let t = TransientConfig::parse("").unwrap();
        assert_eq!(t.params.kappa, 0.1);
        assert_eq!(t.observables, vec!["sx1", "sx2"]);
    }

    #[test]
    fn grid_axis_values() {
        assert_eq!(GridAxis::new(2.0, 9.0, 1).values(), vec![2.0]);
        let v = GridAxis::new(-1.0, 1.0, 5).values();
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
