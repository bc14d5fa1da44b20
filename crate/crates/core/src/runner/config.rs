use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::gpe::AnharmonicParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    GpeShakeup,
    BosehubbardMott,
    TwoparticleGate,
    OneparticleTweezer,
    TwolevelLandauZener,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 5] = [
        ScenarioId::GpeShakeup,
        ScenarioId::BosehubbardMott,
        ScenarioId::TwoparticleGate,
        ScenarioId::OneparticleTweezer,
        ScenarioId::TwolevelLandauZener,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::GpeShakeup => "gpe-shakeup",
            ScenarioId::BosehubbardMott => "bosehubbard-mott",
            ScenarioId::TwoparticleGate => "twoparticle-gate",
            ScenarioId::OneparticleTweezer => "oneparticle-tweezer",
            ScenarioId::TwolevelLandauZener => "twolevel-landau-zener",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioId::GpeShakeup => "condensate shaken from the ground into the first excited state of an atom-chip trap",
            ScenarioId::BosehubbardMott => "superfluid to Mott-insulator transfer in a five-site Bose-Hubbard chain",
            ScenarioId::TwoparticleGate => "interacting atom pair transported by a displaced trap",
            ScenarioId::OneparticleTweezer => "single atom moved by an optical tweezer",
            ScenarioId::TwolevelLandauZener => "Landau-Zener sweep of a two-level system",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| Error::Config {
            path: "scenario".into(),
            message: format!(
                "unknown scenario `{s}`; expected one of {}",
                Self::ALL.map(|id| id.as_str()).join(", ")
            ),
        })
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Simulate the initial control only.
    None,
    GrapeSteepestL2,
    GrapeSteepestH1,
    GrapeBfgsL2,
    GrapeBfgsH1,
    GroupSteepest,
    GroupBfgs,
    DgroupSteepest,
    DgroupBfgs,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::None => "none",
            Algorithm::GrapeSteepestL2 => "grape-steepest-l2",
            Algorithm::GrapeSteepestH1 => "grape-steepest-h1",
            Algorithm::GrapeBfgsL2 => "grape-bfgs-l2",
            Algorithm::GrapeBfgsH1 => "grape-bfgs-h1",
            Algorithm::GroupSteepest => "group-steepest",
            Algorithm::GroupBfgs => "group-bfgs",
            Algorithm::DgroupSteepest => "dgroup-steepest",
            Algorithm::DgroupBfgs => "dgroup-bfgs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    pub fidelity_target: f64,
    pub min_step_size: f64,
    pub max_step_size: f64,
    pub max_initial_guess: f64,
    pub lbfgs_memory: usize,
    /// Number of sine functions in the GROUP basis.
    pub basis_size: usize,
    /// Bound on the random frequency offsets of dGROUP bases.
    pub max_rand: f64,
    /// Height of the sigmoid shape function at a tenth of the duration.
    pub shape_plateau: f64,
    /// dGROUP starts a new superiteration once a step is shorter than this.
    pub restart_step_size: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::GrapeBfgsL2,
            max_iterations: 2000,
            fidelity_target: 0.999,
            min_step_size: 1e-7,
            max_step_size: 5.0,
            max_initial_guess: 1.0,
            lbfgs_memory: 10,
            basis_size: 60,
            max_rand: 0.1,
            shape_plateau: 0.999,
            restart_step_size: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Keep every `snapshot_stride`-th state and potential.
    pub snapshot_stride: usize,
    /// Constant-control steps simulated after the final time; `null` means
    /// half the number of control samples.
    pub hold_steps: Option<usize>,
    /// Print a collector line every this many iterations; 0 disables.
    pub print_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            snapshot_stride: 5,
            hold_steps: None,
            print_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpeParams {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub kappa: f64,
    pub g1d: f64,
    pub p2: f64,
    pub p4: f64,
    pub p6: f64,
    pub dt: f64,
    pub duration: f64,
    pub initial_amplitude: f64,
    pub gamma: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub bound_weight: f64,
    pub state_tolerance: f64,
    pub optimizer: OptimizerConfig,
    pub output: OutputConfig,
}

impl Default for GpeParams {
    fn default() -> Self {
        let trap = AnharmonicParams::ATOM_CHIP;
        Self {
            x_min: -2.0,
            x_max: 2.0,
            n_points: 256,
            kappa: 0.36537,
            g1d: 1.8299,
            p2: trap.p2,
            p4: trap.p4,
            p6: trap.p6,
            dt: 0.002,
            duration: 1.25,
            initial_amplitude: 0.55,
            gamma: 1e-5,
            bound_lower: -1.0,
            bound_upper: 1.0,
            bound_weight: 2e3,
            state_tolerance: 1e-10,
            optimizer: OptimizerConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoseHubbardParams {
    pub sites: usize,
    pub particles: usize,
    pub hopping: f64,
    /// Site potential `trap * x^2` on `x = linspace(-1, 1, sites)`.
    pub trap: f64,
    pub periodic: bool,
    pub u_min: f64,
    pub u_max: f64,
    /// Interaction of the Hamiltonian whose ground state starts the transfer.
    pub initial_state_u: f64,
    /// Interaction of the target ground state and of the ramp's end point.
    pub target_u: f64,
    pub dt: f64,
    pub duration: f64,
    pub krylov_order: usize,
    pub gamma: f64,
    pub state_tolerance: f64,
    pub optimizer: OptimizerConfig,
    pub output: OutputConfig,
}

impl Default for BoseHubbardParams {
    fn default() -> Self {
        Self {
            sites: 5,
            particles: 5,
            hopping: 1.0,
            trap: 0.1,
            periodic: false,
            u_min: 2.0,
            u_max: 40.0,
            initial_state_u: 4.0,
            target_u: 30.0,
            dt: 0.002,
            duration: 2.2,
            krylov_order: 4,
            gamma: 0.0,
            state_tolerance: 1e-12,
            optimizer: OptimizerConfig {
                max_rand: 0.0,
                ..OptimizerConfig::default()
            },
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    pub x_min: f64,
    pub x_max: f64,
    /// Points per axis of the square grid.
    pub n_points: usize,
    pub kappa: f64,
    /// Contact interaction strength between the two atoms.
    pub interaction: f64,
    pub p2: f64,
    pub p4: f64,
    pub p6: f64,
    /// Trap position at the final time.
    pub displacement: f64,
    pub dt: f64,
    pub duration: f64,
    pub gamma: f64,
    pub state_tolerance: f64,
    pub optimizer: OptimizerConfig,
    pub output: OutputConfig,
}

impl Default for PairParams {
    fn default() -> Self {
        let trap = AnharmonicParams::ATOM_CHIP;
        Self {
            x_min: -2.0,
            x_max: 2.0,
            n_points: 64,
            kappa: 0.36537,
            interaction: 1.5,
            p2: trap.p2,
            p4: trap.p4,
            p6: trap.p6,
            displacement: 0.3,
            dt: 5e-4,
            duration: 0.4,
            gamma: 1e-5,
            state_tolerance: 1e-9,
            optimizer: OptimizerConfig {
                max_iterations: 300,
                ..OptimizerConfig::default()
            },
            output: OutputConfig {
                snapshot_stride: 50,
                ..OutputConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TweezerParams {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub kappa: f64,
    pub depth: f64,
    pub waist: f64,
    /// Tweezer position at the final time.
    pub displacement: f64,
    pub dt: f64,
    pub duration: f64,
    pub gamma: f64,
    pub state_tolerance: f64,
    pub optimizer: OptimizerConfig,
    pub output: OutputConfig,
}

impl Default for TweezerParams {
    fn default() -> Self {
        Self {
            x_min: -2.0,
            x_max: 2.0,
            n_points: 256,
            kappa: 0.36537,
            depth: 150.0,
            waist: 0.5,
            displacement: 0.5,
            dt: 0.002,
            duration: 0.2,
            gamma: 1e-6,
            state_tolerance: 1e-10,
            optimizer: OptimizerConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandauZenerParams {
    /// Off-diagonal coupling `delta` of `u sigma_z + delta sigma_x`.
    pub coupling: f64,
    pub u_start: f64,
    pub u_end: f64,
    pub dt: f64,
    pub duration: f64,
    pub gamma: f64,
    pub optimizer: OptimizerConfig,
    pub output: OutputConfig,
}

impl Default for LandauZenerParams {
    fn default() -> Self {
        Self {
            coupling: 1.0,
            u_start: -5.0,
            u_end: 5.0,
            dt: 0.01,
            duration: 3.0,
            gamma: 1e-4,
            optimizer: OptimizerConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Physical, control and output parameters of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioParams {
    Gpe(GpeParams),
    BoseHubbard(BoseHubbardParams),
    Pair(PairParams),
    Tweezer(TweezerParams),
    LandauZener(LandauZenerParams),
}

fn config_error(prefix: &str, path: String, message: String) -> Error {
    let path = match (prefix.is_empty(), path.as_str()) {
        (true, _) => path,
        (false, ".") => prefix.to_string(),
        (false, _) => format!("{prefix}.{path}"),
    };
    Error::Config { path, message }
}

fn decode<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        config_error(prefix, path, e.into_inner().to_string())
    })
}

impl ScenarioParams {
    pub fn defaults(id: ScenarioId) -> Self {
        match id {
            ScenarioId::GpeShakeup => ScenarioParams::Gpe(GpeParams::default()),
            ScenarioId::BosehubbardMott => ScenarioParams::BoseHubbard(BoseHubbardParams::default()),
            ScenarioId::TwoparticleGate => ScenarioParams::Pair(PairParams::default()),
            ScenarioId::OneparticleTweezer => ScenarioParams::Tweezer(TweezerParams::default()),
            ScenarioId::TwolevelLandauZener => ScenarioParams::LandauZener(LandauZenerParams::default()),
        }
    }

    pub fn id(&self) -> ScenarioId {
        match self {
            ScenarioParams::Gpe(_) => ScenarioId::GpeShakeup,
            ScenarioParams::BoseHubbard(_) => ScenarioId::BosehubbardMott,
            ScenarioParams::Pair(_) => ScenarioId::TwoparticleGate,
            ScenarioParams::Tweezer(_) => ScenarioId::OneparticleTweezer,
            ScenarioParams::LandauZener(_) => ScenarioId::TwolevelLandauZener,
        }
    }

    pub fn optimizer(&self) -> &OptimizerConfig {
        match self {
            ScenarioParams::Gpe(p) => &p.optimizer,
            ScenarioParams::BoseHubbard(p) => &p.optimizer,
            ScenarioParams::Pair(p) => &p.optimizer,
            ScenarioParams::Tweezer(p) => &p.optimizer,
            ScenarioParams::LandauZener(p) => &p.optimizer,
        }
    }

    pub fn output(&self) -> &OutputConfig {
        match self {
            ScenarioParams::Gpe(p) => &p.output,
            ScenarioParams::BoseHubbard(p) => &p.output,
            ScenarioParams::Pair(p) => &p.output,
            ScenarioParams::Tweezer(p) => &p.output,
            ScenarioParams::LandauZener(p) => &p.output,
        }
    }

    pub fn to_value(&self) -> Value {
        let v = match self {
            ScenarioParams::Gpe(p) => serde_json::to_value(p),
            ScenarioParams::BoseHubbard(p) => serde_json::to_value(p),
            ScenarioParams::Pair(p) => serde_json::to_value(p),
            ScenarioParams::Tweezer(p) => serde_json::to_value(p),
            ScenarioParams::LandauZener(p) => serde_json::to_value(p),
        };
        v.expect("parameter structs serialize")
    }

    fn from_value(id: ScenarioId, value: Value, prefix: &str) -> Result<Self> {
        Ok(match id {
            ScenarioId::GpeShakeup => ScenarioParams::Gpe(decode(value, prefix)?),
            ScenarioId::BosehubbardMott => ScenarioParams::BoseHubbard(decode(value, prefix)?),
            ScenarioId::TwoparticleGate => ScenarioParams::Pair(decode(value, prefix)?),
            ScenarioId::OneparticleTweezer => ScenarioParams::Tweezer(decode(value, prefix)?),
            ScenarioId::TwolevelLandauZener => ScenarioParams::LandauZener(decode(value, prefix)?),
        })
    }
}

/// Recursively overlays `patch` on `base`; non-object values replace.
fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: String,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    overrides: Map<String, Value>,
}

/// A scenario with all parameters resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub params: ScenarioParams,
}

impl Config {
    pub fn new(id: ScenarioId) -> Self {
        Self {
            seed: 0,
            params: ScenarioParams::defaults(id),
        }
    }

    pub fn scenario(&self) -> ScenarioId {
        self.params.id()
    }

    /// Parses `{"scenario": id, "seed": n, "overrides": {...}}`; missing
    /// overrides keep the scenario defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config {
            path: ".".into(),
            message: e.to_string(),
        })?;
        let file: ConfigFile = decode(value, "")?;
        let mut cfg = Config::new(ScenarioId::parse(&file.scenario)?);
        cfg.seed = file.seed;
        cfg.apply_overrides(&Value::Object(file.overrides))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Overlays a (possibly partial) parameter object.
    pub fn apply_overrides(&mut self, overrides: &Value) -> Result<()> {
        let mut value = self.params.to_value();
        merge(&mut value, overrides);
        self.params = ScenarioParams::from_value(self.scenario(), value, "overrides")?;
        Ok(())
    }

    /// Applies one `dotted.key=value` assignment. The value is read as JSON
    /// when possible and as a plain string otherwise.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| Error::Config {
            path: assignment.to_string(),
            message: "expected key=value".into(),
        })?;
        let key = key.trim();
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(Error::Config {
                path: key.to_string(),
                message: "empty key".into(),
            });
        }
        let raw = raw.trim();
        let mut value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        for part in key.rsplit('.') {
            let mut m = Map::new();
            m.insert(part.to_string(), value);
            value = Value::Object(m);
        }
        self.apply_overrides(&value)
    }

    /// Complete configuration with every parameter spelled out; loading it
    /// back gives an identical `Config`.
    pub fn to_json(&self) -> String {
        let mut m = Map::new();
        m.insert("scenario".into(), Value::String(self.scenario().as_str().into()));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("overrides".into(), self.params.to_value());
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(ScenarioId::parse(id.as_str()).unwrap(), id);
            assert_eq!(serde_json::to_value(id).unwrap(), Value::String(id.as_str().into()));
        }
    }

    #[test]
    fn algorithm_names_match_serde() {
        for a in [Algorithm::GrapeBfgsH1, Algorithm::DgroupSteepest, Algorithm::None] {
            assert_eq!(serde_json::to_value(a).unwrap(), Value::String(a.as_str().into()));
        }
    }

    #[test]
    fn dotted_assignment() {
        let mut c = Config::new(ScenarioId::GpeShakeup);
        c.set("optimizer.algorithm=group-bfgs").unwrap();
        c.set("n_points = 128").unwrap();
        let ScenarioParams::Gpe(p) = &c.params else { panic!() };
        assert_eq!(p.optimizer.algorithm, Algorithm::GroupBfgs);
        assert_eq!(p.n_points, 128);
        assert_eq!(p.dt, 0.002);
    }

    #[test]
    fn errors_carry_the_key_path() {
        let mut c = Config::new(ScenarioId::BosehubbardMott);
        match c.set("optimizer.max_iterations=-3") {
            Err(Error::Config { path, .. }) => assert_eq!(path, "overrides.optimizer.max_iterations"),
            other => panic!("{other:?}"),
        }
        match c.set("optimizer.typo=1") {
            Err(Error::Config { path, .. }) => assert!(path.starts_with("overrides.optimizer"), "{path}"),
            other => panic!("{other:?}"),
        }
    }
}
