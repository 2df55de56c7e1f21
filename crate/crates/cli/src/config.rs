//! Scenario configuration files.
//!
//! A config is a TOML table. Only `scenario` is required; every other key
//! falls back to the scenario's defaults. All rates are in units of κ.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqzcav::dynamics::Integrator;
use sqzcav::model::{pump_amplitude, squeezing_param, Coupling, Frame};

use crate::error::{CliError, Result};

/// Largest cutoff the automatic escalation will try.
pub const DEFAULT_MAX_CUTOFF: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Fig2,
        Scenario::Fig4,
        Scenario::Fig5,
        Scenario::Fig6,
        Scenario::Fig7,
        Scenario::Fig8,
        Scenario::Fig9,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Fig7 => "fig7",
            Scenario::Fig8 => "fig8",
            Scenario::Fig9 => "fig9",
            Scenario::Custom => "custom",
        }
    }

    pub fn kind(self) -> ScenarioKind {
        match self {
            Scenario::Fig2 => ScenarioKind::Enhancement,
            Scenario::Fig4 => ScenarioKind::Trajectory,
            Scenario::Fig9 => ScenarioKind::Wigner,
            _ => ScenarioKind::SteadyState,
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::Fig2 => "coupling enhancement g_s/g0 = cosh r against e^r/2",
            Scenario::Fig4 => "squeezed-frame transients of <a_s+a_s> and |<a_s^2>| from |g,0_s>",
            Scenario::Fig5 => "squeezed-frame steady-state moments vs r, empty and atom",
            Scenario::Fig6 => "lab-frame output flux and |<a^2>| vs r, empty and g0 = 2, 5",
            Scenario::Fig7 => "squeezed-Fock populations for several r, empty and atom",
            Scenario::Fig8 => "squeezed-Fock populations at r = 1.2, empty and atom",
            Scenario::Fig9 => "lab-frame Wigner functions at r = 1, empty and atom",
            Scenario::Custom => "steady-state sweep with user-chosen parameters",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a scenario computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Enhancement,
    Trajectory,
    SteadyState,
    Wigner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameChoice {
    Lab,
    Squeezed,
}

impl From<FrameChoice> for Frame {
    fn from(f: FrameChoice) -> Frame {
        match f {
            FrameChoice::Lab => Frame::Lab,
            FrameChoice::Squeezed => Frame::Squeezed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingChoice {
    Rwa,
    Full,
}

impl From<CouplingChoice> for Coupling {
    fn from(c: CouplingChoice) -> Coupling {
        match c {
            CouplingChoice::Rwa => Coupling::Rotating,
            CouplingChoice::Full => Coupling::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorChoice {
    Adaptive,
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AutoKeyword {
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BothKeyword {
    Both,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawCutoff {
    Fixed(usize),
    Auto(AutoKeyword),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawAtom {
    Flag(bool),
    Both(BothKeyword),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeSpec {
    start: f64,
    stop: f64,
    step: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawValues {
    List(OneOrMany),
    Range(RangeSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Scenario,
    g0_over_kappa: Option<OneOrMany>,
    gamma_over_kappa: Option<f64>,
    delta_c_over_kappa: Option<f64>,
    r_values: Option<RawValues>,
    omega_p_values: Option<RawValues>,
    fock_cutoff: Option<RawCutoff>,
    max_fock_cutoff: Option<usize>,
    atom_present: Option<RawAtom>,
    frame: Option<FrameChoice>,
    coupling: Option<CouplingChoice>,
    time_horizon: Option<f64>,
    time_points: Option<usize>,
    integrator: Option<IntegratorChoice>,
    rk4_step: Option<f64>,
    wigner_range: Option<f64>,
    wigner_points: Option<usize>,
    output_path: Option<PathBuf>,
    allow_inadequate_cutoff: Option<bool>,
    check_cutoff_convergence: Option<bool>,
    sensitivity_delta_c: Option<Vec<f64>>,
}

/// The sweep axis: squeezing strengths directly, or pump amplitudes that
/// are converted with `r = ¼ ln((Δ_c + Ω_p)/(Δ_c − Ω_p))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    Squeezing(Vec<f64>),
    Pump(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffChoice {
    Auto,
    Fixed(usize),
}

/// One simulated configuration of the cavity: empty, or with an atom
/// coupled at `g0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Case {
    pub atom_present: bool,
    pub g0_over_kappa: f64,
}

impl Case {
    pub fn label(&self) -> &'static str {
        if self.atom_present {
            "atom"
        } else {
            "empty"
        }
    }
}

/// Fully resolved scenario configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub cases: Vec<Case>,
    pub gamma_over_kappa: f64,
    pub delta_c_over_kappa: f64,
    pub sweep: Sweep,
    pub fock_cutoff: CutoffChoice,
    pub max_fock_cutoff: usize,
    pub frame: FrameChoice,
    pub coupling: CouplingChoice,
    pub time_horizon: f64,
    pub time_points: usize,
    pub integrator: IntegratorChoice,
    pub rk4_step: f64,
    pub wigner_range: f64,
    pub wigner_points: usize,
    pub output_path: PathBuf,
    pub allow_inadequate_cutoff: bool,
    pub check_cutoff_convergence: bool,
    pub sensitivity_delta_c: Vec<f64>,
}

struct Defaults {
    g0: Vec<f64>,
    gamma: f64,
    r_values: Vec<f64>,
    atom: RawAtom,
    frame: FrameChoice,
    sensitivity: Vec<f64>,
}

/// Default `Δ_c/κ`. The squeezed-mode frequency `ω_s = Δ_c/cosh 2r` is then
/// small compared with κ.
pub const DEFAULT_DELTA_C: f64 = 0.5;

fn defaults(s: Scenario) -> Defaults {
    let both = RawAtom::Both(BothKeyword::Both);
    let d = |g0: Vec<f64>, gamma: f64, r_values: Vec<f64>, atom: RawAtom, frame: FrameChoice| Defaults {
        g0,
        gamma,
        r_values,
        atom,
        frame,
        sensitivity: Vec::new(),
    };
    match s {
        Scenario::Fig2 => d(vec![1.0], 1.0, range(0.0, 3.0, 0.05), RawAtom::Flag(true), FrameChoice::Squeezed),
        Scenario::Fig4 => d(vec![5.0], 1.0, vec![0.4, 0.8, 1.2], RawAtom::Flag(true), FrameChoice::Squeezed),
        Scenario::Fig5 => Defaults {
            sensitivity: vec![5.0, 10.0, 20.0],
            ..d(vec![5.0], 1.0, range(0.0, 1.2, 0.1), both, FrameChoice::Squeezed)
        },
        Scenario::Fig6 => d(vec![2.0, 5.0], 1.0, range(0.0, 1.5, 0.1), both, FrameChoice::Squeezed),
        Scenario::Fig7 => d(vec![2.0], 0.2, vec![0.4, 0.8, 1.2], both, FrameChoice::Squeezed),
        Scenario::Fig8 => d(vec![2.0], 0.2, vec![1.2], both, FrameChoice::Squeezed),
        Scenario::Fig9 => d(vec![5.0], 1.0, vec![1.0], both, FrameChoice::Lab),
        Scenario::Custom => d(vec![1.0], 1.0, Vec::new(), both, FrameChoice::Squeezed),
    }
}

/// `start, start + step, …` up to `stop` inclusive, rounded to 1e-12 so that
/// repeated configs give bit-identical grids.
fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| round12(start + step * k as f64)).collect()
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn values(raw: RawValues, name: &str) -> Result<Vec<f64>> {
    let v = match raw {
        RawValues::List(OneOrMany::One(x)) => vec![x],
        RawValues::List(OneOrMany::Many(v)) => v,
        RawValues::Range(RangeSpec { start, stop, step }) => {
            if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                return Err(CliError::Config(format!(
                    "{name} range needs finite start ≤ stop and step > 0, got {start}..{stop} by {step}"
                )));
            }
            if (stop - start) / step > 1e5 {
                return Err(CliError::Config(format!("{name} range has too many points")));
            }
            range(start, stop, step)
        }
    };
    if v.is_empty() {
        return Err(CliError::Config(format!("{name} is empty")));
    }
    if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(CliError::Config(format!("{name} must be finite and ≥ 0, got {bad}")));
    }
    Ok(v)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        Self::resolve(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Defaults of a scenario with no overrides.
    pub fn for_scenario(scenario: Scenario) -> Result<Self> {
        Self::from_toml(&format!("scenario = \"{scenario}\""))
    }

    fn resolve(raw: RawConfig) -> Result<Self> {
        let scenario = raw.scenario;
        let def = defaults(scenario);
        let g0 = match raw.g0_over_kappa {
            None => def.g0,
            Some(OneOrMany::One(x)) => vec![x],
            Some(OneOrMany::Many(v)) => v,
        };
        if g0.is_empty() || g0.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(CliError::Config(format!("g0_over_kappa must be a non-empty list of values ≥ 0, got {g0:?}")));
        }
        let gamma = positive("gamma_over_kappa", raw.gamma_over_kappa.unwrap_or(def.gamma))?;
        let delta_c = positive("delta_c_over_kappa", raw.delta_c_over_kappa.unwrap_or(DEFAULT_DELTA_C))?;
        let sweep = match (raw.r_values, raw.omega_p_values) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either r_values or omega_p_values, not both".into()));
            }
            (Some(r), None) => Sweep::Squeezing(values(r, "r_values")?),
            (None, Some(o)) => Sweep::Pump(values(o, "omega_p_values")?),
            (None, None) if def.r_values.is_empty() => {
                return Err(CliError::Config(format!("scenario {scenario} needs r_values or omega_p_values")));
            }
            (None, None) => Sweep::Squeezing(def.r_values),
        };
        let atom = raw.atom_present.unwrap_or(def.atom);
        let mut cases = Vec::new();
        if matches!(atom, RawAtom::Flag(false) | RawAtom::Both(_)) {
            cases.push(Case { atom_present: false, g0_over_kappa: 0.0 });
        }
        if matches!(atom, RawAtom::Flag(true) | RawAtom::Both(_)) {
            cases.extend(g0.iter().map(|&g| Case { atom_present: true, g0_over_kappa: g }));
        }
        let fock_cutoff = match raw.fock_cutoff {
            None | Some(RawCutoff::Auto(_)) => CutoffChoice::Auto,
            Some(RawCutoff::Fixed(n)) if n >= 2 => CutoffChoice::Fixed(n),
            Some(RawCutoff::Fixed(n)) => return Err(CliError::Config(format!("fock_cutoff must be ≥ 2, got {n}"))),
        };
        let max_fock_cutoff = raw.max_fock_cutoff.unwrap_or(DEFAULT_MAX_CUTOFF);
        if max_fock_cutoff < 2 {
            return Err(CliError::Config(format!("max_fock_cutoff must be ≥ 2, got {max_fock_cutoff}")));
        }
        let time_points = raw.time_points.unwrap_or(501);
        if time_points < 2 {
            return Err(CliError::Config(format!("time_points must be ≥ 2, got {time_points}")));
        }
        let wigner_points = raw.wigner_points.unwrap_or(81);
        if wigner_points < 3 {
            return Err(CliError::Config(format!("wigner_points must be ≥ 3, got {wigner_points}")));
        }
        let sensitivity_delta_c = raw.sensitivity_delta_c.unwrap_or(def.sensitivity);
        for &d in &sensitivity_delta_c {
            positive("sensitivity_delta_c entry", d)?;
        }
        let frame = raw.frame.unwrap_or(def.frame);
        let coupling = raw.coupling.unwrap_or(CouplingChoice::Rwa);
        Ok(Self {
            scenario,
            cases,
            gamma_over_kappa: gamma,
            delta_c_over_kappa: delta_c,
            sweep,
            fock_cutoff,
            max_fock_cutoff,
            frame,
            coupling,
            time_horizon: positive("time_horizon", raw.time_horizon.unwrap_or(50.0))?,
            time_points,
            integrator: raw.integrator.unwrap_or(IntegratorChoice::Adaptive),
            rk4_step: positive("rk4_step", raw.rk4_step.unwrap_or(1e-3))?,
            wigner_range: positive("wigner_range", raw.wigner_range.unwrap_or(4.0))?,
            wigner_points,
            output_path: raw.output_path.unwrap_or_else(|| PathBuf::from("out")),
            allow_inadequate_cutoff: raw.allow_inadequate_cutoff.unwrap_or(false),
            check_cutoff_convergence: raw.check_cutoff_convergence.unwrap_or(true),
            sensitivity_delta_c,
        })
    }

    /// Squeezing strengths of the sweep at the given `Δ_c`, failing when a
    /// requested pump is at or above threshold.
    pub fn r_values_at(&self, delta_c: f64) -> Result<Vec<f64>> {
        match &self.sweep {
            Sweep::Squeezing(r) => {
                for &x in r {
                    let omega_p = pump_amplitude(delta_c, x)?;
                    if omega_p >= delta_c {
                        return Err(CliError::Threshold { delta_c, omega_p });
                    }
                }
                Ok(r.clone())
            }
            Sweep::Pump(o) => o.iter().map(|&w| squeezing_param(delta_c, w).map_err(CliError::from)).collect(),
        }
    }

    pub fn r_values(&self) -> Result<Vec<f64>> {
        self.r_values_at(self.delta_c_over_kappa)
    }

    pub fn integrator(&self) -> Integrator {
        match self.integrator {
            IntegratorChoice::Adaptive => Integrator::default(),
            IntegratorChoice::Rk4 => Integrator::FixedRk4 { step: self.rk4_step },
        }
    }

    /// Canonical TOML rendering of the resolved config; the config hash is
    /// taken over this text.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }
}
