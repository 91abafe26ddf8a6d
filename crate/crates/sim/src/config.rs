//! Flat `key = value` configuration with unit-suffixed quantities.
//!
//! Energies accept `g` (default), `meV` or `d0` (multiples of Δ0); times
//! accept `ps` or `hbar/g` (default); rates additionally accept `/ns`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use fle_core::model::{Resonance, SystemParams};
use fle_core::units::{mev_to_internal, per_ns_to_internal, ps_to_internal, DEFAULT_G_MEV};

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    OmegaSweep,
    DeltaSweep,
    Tomography,
    Dressed,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::OmegaSweep => "omega_sweep",
            Mode::DeltaSweep => "delta_sweep",
            Mode::Tomography => "tomography_dump",
            Mode::Dressed => "dressed_dump",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omega" | "omega_sweep" => Some(Mode::OmegaSweep),
            "delta" | "delta_sweep" => Some(Mode::DeltaSweep),
            "tomography" | "tomography_dump" => Some(Mode::Tomography),
            "dressed" | "dressed_dump" => Some(Mode::Dressed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    /// Range of the swept quantity in `g`.
    pub start: f64,
    pub stop: f64,
    pub n_points: usize,
    /// Fixed parameters; the swept one is overwritten per point.
    pub params: SystemParams,
    /// Retune Δ to this resonance at every Ω (Ω-sweeps and single points).
    pub tracking: Option<Resonance>,
    pub g_mev: f64,
    pub tau_window_ps: f64,
    pub n_tau: usize,
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: Mode::OmegaSweep,
            start: 5.0,
            stop: 40.0,
            n_points: 36,
            params: SystemParams::default(),
            tracking: Some(Resonance::UL),
            g_mev: DEFAULT_G_MEV,
            tau_window_ps: 50.0,
            n_tau: 200,
            threads: 1,
            output: None,
        }
    }
}

const KEYS: &[&str] = &[
    "mode", "start", "stop", "n_points", "g_mev", "delta0", "delta", "omega", "kappa", "gamma", "n_max", "resonance",
    "tau_window", "n_tau", "threads", "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Energy,
    Time,
    Rate,
}

/// Raw settings in application order; later entries win.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut raw = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| SimError::Config(format!("line {}: expected key = value", no + 1)))?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        let key = key.to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(SimError::Config(format!("unknown key `{key}`")));
        }
        self.entries.insert(key, value.to_string());
        Ok(())
    }

    /// Parses an override of the form `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), SimError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| SimError::Config(format!("override `{pair}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    /// Overlays `other` on top of `self`.
    pub fn merge(&mut self, other: &RawConfig) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn resolve(&self) -> Result<SweepConfig, SimError> {
        let mut cfg = SweepConfig::default();
        let get = |k: &str| self.entries.get(k).map(String::as_str);

        if let Some(v) = get("mode") {
            cfg.mode = Mode::parse(v).ok_or_else(|| SimError::Config(format!("unknown mode `{v}`")))?;
        }
        if let Some(v) = get("g_mev") {
            cfg.g_mev = parse_number(v, "g_mev")?;
            if !(cfg.g_mev > 0.0) {
                return Err(SimError::Config("g_mev must be positive".into()));
            }
        }
        // Δ0 first: other energies may be given in its units.
        let g_mev = cfg.g_mev;
        if let Some(v) = get("delta0") {
            cfg.params.delta0 = parse_quantity(v, Kind::Energy, g_mev, None, "delta0")?;
        }
        let d0 = Some(cfg.params.delta0);
        if cfg.mode == Mode::DeltaSweep {
            cfg.start = 0.2 * cfg.params.delta0;
            cfg.stop = 1.4 * cfg.params.delta0;
            cfg.params.omega = 30.0;
        }
        let energy = |k: &str| get(k).map(|v| parse_quantity(v, Kind::Energy, g_mev, d0, k)).transpose();
        if let Some(x) = energy("delta")? {
            cfg.params.delta = x;
        }
        if let Some(x) = energy("omega")? {
            cfg.params.omega = x;
        }
        if let Some(x) = energy("start")? {
            cfg.start = x;
        }
        if let Some(x) = energy("stop")? {
            cfg.stop = x;
        }
        for (k, slot) in [("kappa", &mut cfg.params.kappa), ("gamma", &mut cfg.params.gamma)] {
            if let Some(v) = get(k) {
                *slot = parse_quantity(v, Kind::Rate, g_mev, d0, k)?;
            }
        }
        if let Some(v) = get("n_max") {
            cfg.params.n_max = parse_count(v, "n_max")?;
        }
        if let Some(v) = get("n_points") {
            cfg.n_points = parse_count(v, "n_points")?;
        }
        if let Some(v) = get("n_tau") {
            cfg.n_tau = parse_count(v, "n_tau")?;
        }
        if let Some(v) = get("threads") {
            cfg.threads = parse_count(v, "threads")?;
        }
        if let Some(v) = get("resonance") {
            cfg.tracking = match v.to_ascii_lowercase().as_str() {
                "none" | "" => None,
                _ => Some(v.parse::<Resonance>().map_err(|e| SimError::Config(e.to_string()))?),
            };
        }
        if let Some(v) = get("tau_window") {
            let t = parse_quantity(v, Kind::Time, g_mev, d0, "tau_window")?;
            cfg.tau_window_ps = fle_core::units::internal_to_ps(t, g_mev);
        }
        if let Some(v) = get("output") {
            cfg.output = Some(PathBuf::from(v));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if matches!(self.mode, Mode::OmegaSweep | Mode::DeltaSweep | Mode::Dressed) {
            if self.n_points < 2 {
                return Err(SimError::Config(format!("n_points must be at least 2, got {}", self.n_points)));
            }
            if !(self.start < self.stop) {
                return Err(SimError::Config(format!("empty range: start {} >= stop {}", self.start, self.stop)));
            }
        }
        if self.threads == 0 {
            return Err(SimError::Config("threads must be at least 1".into()));
        }
        if !(self.tau_window_ps >= 0.0) || !self.tau_window_ps.is_finite() {
            return Err(SimError::Config(format!("tau_window must be non-negative, got {} ps", self.tau_window_ps)));
        }
        self.params.validate().map_err(|e| SimError::Config(e.to_string()))
    }

    /// Averaging window in `ħ/g`.
    pub fn tau_window(&self) -> f64 {
        ps_to_internal(self.tau_window_ps, self.g_mev)
    }

    /// Uniform grid of the swept quantity.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect()
    }

    /// Effective configuration as `key = value` lines.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        vec![
            ("mode", self.mode.name().to_string()),
            ("start", self.start.to_string()),
            ("stop", self.stop.to_string()),
            ("n_points", self.n_points.to_string()),
            ("g_mev", self.g_mev.to_string()),
            ("delta0", p.delta0.to_string()),
            ("delta", p.delta.to_string()),
            ("omega", p.omega.to_string()),
            ("kappa", p.kappa.to_string()),
            ("gamma", p.gamma.to_string()),
            ("n_max", p.n_max.to_string()),
            ("resonance", self.tracking.map_or("none".to_string(), |r| r.to_string())),
            ("tau_window_ps", self.tau_window_ps.to_string()),
            ("n_tau", self.n_tau.to_string()),
            ("threads", self.threads.to_string()),
        ]
    }
}

fn parse_number(s: &str, key: &str) -> Result<f64, SimError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| SimError::Config(format!("{key}: cannot parse `{s}` as a number")))
}

fn parse_count(s: &str, key: &str) -> Result<usize, SimError> {
    s.trim().parse::<usize>().map_err(|_| SimError::Config(format!("{key}: cannot parse `{s}` as a count")))
}

fn parse_quantity(s: &str, kind: Kind, g_mev: f64, delta0: Option<f64>, key: &str) -> Result<f64, SimError> {
    let s = s.trim();
    let split = (1..=s.len())
        .rev()
        .filter(|&i| s.is_char_boundary(i))
        .find(|&i| s[..i].parse::<f64>().is_ok())
        .ok_or_else(|| SimError::Config(format!("{key}: cannot parse `{s}` as a quantity")))?;
    let (num, unit) = s.split_at(split);
    let x = parse_number(num, key)?;
    let unit = unit.trim();
    let bad = || SimError::Config(format!("{key}: unit `{unit}` not allowed here"));
    let v = match (kind, unit.to_ascii_lowercase().as_str()) {
        (_, "") => x,
        (Kind::Energy | Kind::Rate, "g") => x,
        (Kind::Energy | Kind::Rate, "mev") => mev_to_internal(x, g_mev),
        (Kind::Energy, "d0") => x * delta0.ok_or_else(bad)?,
        (Kind::Rate, "/ns") => per_ns_to_internal(x, g_mev),
        (Kind::Time, "ps") => ps_to_internal(x, g_mev),
        (Kind::Time, "hbar/g") => x,
        _ => return Err(bad()),
    };
    Ok(v)
}
