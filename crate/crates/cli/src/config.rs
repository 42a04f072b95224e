//! Experiment configuration: TOML with one table per section.

use critwave::propagator::{log_grid, CutoffSpec, QuadParams};
use critwave::volterra::SolverOptions;
use critwave::{Error, Potential, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    JostSweep,
    Resonance,
    BoundStates,
    Kernel,
    Decay,
    BornCheck,
    VdcCheck,
    Acceptance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub command: Option<Command>,
    pub potential: PotentialSpec,
    pub solver: SolverSection,
    pub grid: GridSection,
    pub k: KSection,
    pub cutoff: CutoffSection,
    pub kernel: KernelSection,
    pub decay: DecaySection,
    pub resonance: ResonanceSection,
    pub bound_states: BoundStatesSection,
    pub born: BornSection,
    pub vdc: VdcSection,
    pub acceptance: AcceptanceSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Zero,
    Exponential,
    Bump,
    /// amplitude · x^(−exponent) on [a, b]; b = 0 means no upper end.
    Power,
    /// Two-column CSV (x, q).
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSpec {
    pub family: Family,
    pub amplitude: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub exponent: f64,
    pub file: String,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec {
            family: Family::Exponential,
            amplitude: 1.0,
            beta: 1.0,
            a: 1.0,
            b: 2.0,
            eps: 0.25,
            exponent: 1.0,
            file: String::new(),
        }
    }
}

impl PotentialSpec {
    /// `base` resolves a relative CSV path (the config file's directory).
    pub fn build(&self, base: Option<&Path>) -> Result<Potential> {
        match self.family {
            Family::Zero => Ok(Potential::zero()),
            Family::Exponential => Potential::exponential(self.amplitude, self.beta),
            Family::Bump => Potential::bump(self.amplitude, self.a, self.b, self.eps),
            Family::Power => {
                let (amp, p, a, b) = (self.amplitude, self.exponent, self.a, self.b);
                if !(a >= 0.0 && (b == 0.0 || b > a) && p.is_finite() && amp.is_finite()) {
                    return Err(Error::Parameter("power needs 0 ≤ a < b (or b = 0) and finite values".into()));
                }
                let end = (b > 0.0).then_some(b);
                let bps: Vec<f64> = [a, b].into_iter().filter(|v| *v > 0.0).collect();
                let f = move |x: f64| {
                    if x >= a && end.is_none_or(|e| x <= e) {
                        amp * x.powf(-p)
                    } else {
                        0.0
                    }
                };
                Ok(Potential::custom("power", f, (a, end), bps, 0.5))
            }
            Family::Csv => {
                if self.file.is_empty() {
                    return Err(Error::Parameter("potential.file is required for family = \"csv\"".into()));
                }
                let path = Path::new(&self.file);
                let path = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.to_path_buf(),
                };
                Potential::from_csv(&path)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverSection { tol: o.tol, max_iterations: o.max_iterations }
    }
}

impl SolverSection {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iterations: self.max_iterations, ..Default::default() }
    }
}

/// Log-spaced x grid, or an explicit list when `values` is non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub values: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { x_min: 0.01, x_max: 20.0, points: 50, values: vec![] }
    }
}

impl GridSection {
    pub fn points(&self) -> Result<Vec<f64>> {
        log_or_list(&self.values, self.x_min, self.x_max, self.points, "grid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KSection {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
    pub values: Vec<f64>,
}

impl Default for KSection {
    fn default() -> Self {
        KSection { k_min: 0.05, k_max: 20.0, points: 40, values: vec![] }
    }
}

impl KSection {
    pub fn points(&self) -> Result<Vec<f64>> {
        log_or_list(&self.values, self.k_min, self.k_max, self.points, "k")
    }
}

fn log_or_list(values: &[f64], lo: f64, hi: f64, n: usize, what: &str) -> Result<Vec<f64>> {
    if !values.is_empty() {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("{what}.values must be finite")));
        }
        return Ok(values.to_vec());
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite() && n >= 2) {
        return Err(Error::Parameter(format!("{what} needs 0 < min < max and at least 2 points")));
    }
    Ok(log_grid(lo, hi, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffKindSpec {
    None,
    LowPass,
    HighPass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutoffSection {
    pub kind: CutoffKindSpec,
    pub k0: f64,
}

impl Default for CutoffSection {
    fn default() -> Self {
        CutoffSection { kind: CutoffKindSpec::None, k0: 1.0 }
    }
}

impl CutoffSection {
    pub fn spec(&self) -> Result<Option<CutoffSpec>> {
        match self.kind {
            CutoffKindSpec::None => Ok(None),
            CutoffKindSpec::LowPass => CutoffSpec::low_pass(self.k0).map(Some),
            CutoffKindSpec::HighPass => CutoffSpec::high_pass(self.k0).map(Some),
        }
    }
}

/// Quadrature knobs shared by kernel, decay and born-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub t: f64,
    pub x: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub y_points: usize,
    pub max_phase: f64,
    pub stationary_margin: f64,
    pub refine: u32,
    /// Integrate the full amplitude instead of subtracting the free part.
    pub no_reference: bool,
}

impl Default for KernelSection {
    fn default() -> Self {
        let q = QuadParams::default();
        KernelSection {
            t: 10.0,
            x: 1.0,
            y_min: 0.05,
            y_max: 10.0,
            y_points: 40,
            max_phase: q.max_phase,
            stationary_margin: q.stationary_margin,
            refine: 0,
            no_reference: false,
        }
    }
}

impl KernelSection {
    pub fn quad(&self, solver: &SolverSection) -> QuadParams {
        QuadParams {
            max_phase: self.max_phase,
            stationary_margin: self.stationary_margin,
            refine: self.refine,
            reference: if self.no_reference {
                critwave::propagator::Reference::None
            } else {
                critwave::propagator::Reference::Auto
            },
            solver: solver.options(),
            ..Default::default()
        }
    }

    pub fn ys(&self) -> Result<Vec<f64>> {
        log_or_list(&[], self.y_min, self.y_max, self.y_points, "kernel.y")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySection {
    pub t_list: Vec<f64>,
    pub xy_min: f64,
    pub xy_max: f64,
    pub xy_points: usize,
}

impl Default for DecaySection {
    fn default() -> Self {
        DecaySection { t_list: vec![10.0, 31.6, 100.0, 316.0, 1000.0], xy_min: 0.05, xy_max: 40.0, xy_points: 40 }
    }
}

impl DecaySection {
    pub fn grid(&self) -> Result<Vec<f64>> {
        log_or_list(&[], self.xy_min, self.xy_max, self.xy_points, "decay.xy")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonanceSection {
    pub tol: f64,
}

impl Default for ResonanceSection {
    fn default() -> Self {
        ResonanceSection { tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundStatesSection {
    pub kappa_max: f64,
}

impl Default for BoundStatesSection {
    fn default() -> Self {
        BoundStatesSection { kappa_max: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BornSection {
    pub order: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Default for BornSection {
    fn default() -> Self {
        BornSection { order: 6, t: 20.0, x: 1.0, y: 2.0 }
    }
}

/// Amplitude for the van der Corput check: a CSV (k, A) on a uniform grid, or a
/// Gaussian e^{−(k/width)²} sampled on [−half_range, half_range].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VdcSection {
    pub file: String,
    pub width: f64,
    pub half_range: f64,
    pub points: usize,
    pub t_list: Vec<f64>,
}

impl Default for VdcSection {
    fn default() -> Self {
        VdcSection { file: String::new(), width: 1.0, half_range: 6.0, points: 257, t_list: vec![0.1, 1.0, 10.0, 100.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceSection {
    /// Criterion numbers to run; empty means all.
    pub criteria: Vec<usize>,
}

impl Config {
    pub fn from_toml(text: &str) -> std::result::Result<Config, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies `section.key=value` overrides; the value is parsed as TOML, falling back to a string.
    pub fn with_overrides(&self, sets: &[String]) -> std::result::Result<Config, String> {
        if sets.is_empty() {
            return Ok(self.clone());
        }
        let mut root: toml::Table = toml::from_str(&self.to_toml()).map_err(|e| e.to_string())?;
        for s in sets {
            let (path, raw) = s.split_once('=').ok_or_else(|| format!("--set expects key=value, got {s:?}"))?;
            let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.to_string()));
            let keys: Vec<&str> = path.trim().split('.').collect();
            let mut table = &mut root;
            for k in &keys[..keys.len() - 1] {
                table = table
                    .entry(k.to_string())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                    .as_table_mut()
                    .ok_or_else(|| format!("{k} is not a section"))?;
            }
            table.insert(keys[keys.len() - 1].to_string(), value);
        }
        toml::Value::Table(root).try_into().map_err(|e: toml::de::Error| e.to_string())
    }
}
