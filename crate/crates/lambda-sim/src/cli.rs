//! Run configuration, figure presets, and result serialization.
//!
//! A run is described by a flat `key = value` text (one pair per line, `#`
//! comments) or a single JSON object with the same keys. Later assignments
//! override earlier ones, which is how command-line flags are layered on top
//! of a config file. All frequencies and rates are in units of γ_cb.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::{dressed_states, rho_ab_dressed, rho_ac_dressed, Branch};
use crate::dynamics::{
    evolve_from, find_peaks, spectrum, InitialState, Peak, Spectrum, SpectrumOptions, WindowKind,
};
use crate::error::{io_err, Error, Result};
use crate::model::{SystemParams, IDX_A, IDX_B, IDX_C};
use crate::scan::{
    default_detuning_grid, default_phase_grid, map_phase_detuning, strong_probe_suite,
    sweep_detuning, Grid1D, ScanPoint, ScanTable,
};
use crate::steady::{coherence, populations, steady_state_of, CoherencePair};

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Steady,
    Sweep,
    Map,
    Spectrum,
    Dressed,
    StrongProbe,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Steady => "steady",
            Mode::Sweep => "sweep",
            Mode::Map => "map",
            Mode::Spectrum => "spectrum",
            Mode::Dressed => "dressed",
            Mode::StrongProbe => "strong-probe",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "steady" => Some(Mode::Steady),
            "sweep" => Some(Mode::Sweep),
            "map" => Some(Mode::Map),
            "spectrum" => Some(Mode::Spectrum),
            "dressed" => Some(Mode::Dressed),
            "strong-probe" => Some(Mode::StrongProbe),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Options consumed by spectrum runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsOptions {
    pub t_final: f64,
    pub tol: f64,
    pub samples: usize,
    pub window: WindowKind,
    pub initial_state: InitialState,
    pub steady_subtract: bool,
    pub min_prominence: f64,
}

/// Default sample spacing for spectra. π/64 keeps every integer frequency
/// (in γ_cb units) exactly on a DFT bin for power-of-two sample counts, and
/// puts the Nyquist frequency at 64 γ_cb.
pub const DEFAULT_SPECTRUM_DT: f64 = std::f64::consts::PI / 64.0;

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self {
            t_final: DEFAULT_SPECTRUM_DT * 4095.0,
            tol: 1e-9,
            samples: 4096,
            window: WindowKind::Rectangular,
            initial_state: InitialState::A,
            steady_subtract: false,
            min_prominence: 0.01,
        }
    }
}

/// A fully resolved run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: SystemParams,
    pub grid_dp: Grid1D,
    pub grid_phi: Grid1D,
    pub dynamics: DynamicsOptions,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Steady,
            params: SystemParams::default(),
            grid_dp: default_detuning_grid(),
            grid_phi: default_phase_grid(),
            dynamics: DynamicsOptions::default(),
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Parses a config text (flat key–value or a JSON object) into a validated
/// `RunConfig`. Unknown keys are errors so that typos in physics parameters
/// cannot pass silently.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    build_config(entries_from_text(text)?)
}

/// Like `parse_config`, with extra `(key, value)` overrides applied after the
/// (optional) config text.
pub fn parse_config_with_overrides(
    text: Option<&str>,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let mut entries = match text {
        Some(t) => entries_from_text(t)?,
        None => Vec::new(),
    };
    entries.extend(
        overrides
            .iter()
            .map(|(k, v)| (k.clone(), v.clone(), 0usize)),
    );
    build_config(entries)
}

fn entries_from_text(text: &str) -> Result<Vec<(String, String, usize)>> {
    if text.trim_start().starts_with('{') {
        json_entries(text)
    } else {
        flat_entries(text)
    }
}

fn json_entries(text: &str) -> Result<Vec<(String, String, usize)>> {
    let map: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
    let mut out = Vec::with_capacity(map.len());
    for (key, value) in map {
        let rendered = match value {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Bool(b) => b.to_string(),
            other => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("key `{key}`: unsupported JSON value {other}"),
                })
            }
        };
        out.push((key, rendered, 0));
    }
    Ok(out)
}

fn flat_entries(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "empty key or value".into(),
            });
        }
        out.push((key.to_string(), value.to_string(), line_no));
    }
    Ok(out)
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("key `{key}`: `{value}` is not a number"),
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    value.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("key `{key}`: `{value}` is not a non-negative integer"),
    })
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Parse {
            line,
            msg: format!("key `{key}`: `{value}` is not true/false"),
        }),
    }
}

fn build_config(entries: Vec<(String, String, usize)>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut mode: Option<Mode> = None;
    let mut provided: BTreeSet<String> = BTreeSet::new();

    for (key, value, line) in entries {
        match key.as_str() {
            "mode" => {
                mode = Some(Mode::from_name(&value).ok_or_else(|| Error::Parse {
                    line,
                    msg: format!(
                        "unknown mode `{value}` (steady|sweep|map|spectrum|dressed|strong-probe)"
                    ),
                })?)
            }
            "omega_p" => cfg.params.omega_p = parse_f64(&key, &value, line)?,
            "omega_l" => cfg.params.omega_l = parse_f64(&key, &value, line)?,
            "phi_p" => cfg.params.phi_p = parse_f64(&key, &value, line)?,
            "phi_l" => cfg.params.phi_l = parse_f64(&key, &value, line)?,
            "delta_p" => cfg.params.delta_p = parse_f64(&key, &value, line)?,
            "delta_l" => cfg.params.delta_l = parse_f64(&key, &value, line)?,
            "gamma_ca" => cfg.params.gamma_ca = parse_f64(&key, &value, line)?,
            "gamma_cb" => cfg.params.gamma_cb = parse_f64(&key, &value, line)?,
            "dp_start" => cfg.grid_dp.start = parse_f64(&key, &value, line)?,
            "dp_stop" => cfg.grid_dp.stop = parse_f64(&key, &value, line)?,
            "dp_points" => cfg.grid_dp.points = parse_usize(&key, &value, line)?,
            "phi_start" => cfg.grid_phi.start = parse_f64(&key, &value, line)?,
            "phi_stop" => cfg.grid_phi.stop = parse_f64(&key, &value, line)?,
            "phi_points" => cfg.grid_phi.points = parse_usize(&key, &value, line)?,
            "t_final" => cfg.dynamics.t_final = parse_f64(&key, &value, line)?,
            "tol" => cfg.dynamics.tol = parse_f64(&key, &value, line)?,
            "samples" => cfg.dynamics.samples = parse_usize(&key, &value, line)?,
            "window" => {
                cfg.dynamics.window = value.parse().map_err(|msg| Error::Parse { line, msg })?
            }
            "initial_state" => {
                cfg.dynamics.initial_state =
                    value.parse().map_err(|msg| Error::Parse { line, msg })?
            }
            "steady_subtract" => cfg.dynamics.steady_subtract = parse_bool(&key, &value, line)?,
            "min_prominence" => cfg.dynamics.min_prominence = parse_f64(&key, &value, line)?,
            "output" => cfg.output = Some(PathBuf::from(value.clone())),
            "format" => {
                cfg.format = match value.as_str() {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    _ => {
                        return Err(Error::Parse {
                            line,
                            msg: format!("unknown format `{value}` (csv|json)"),
                        })
                    }
                }
            }
            _ => return Err(Error::UnknownKey { key }),
        }
        provided.insert(key);
    }

    cfg.mode = mode.ok_or(Error::MissingRequired { key: "mode" })?;
    if cfg.mode == Mode::StrongProbe && !provided.contains("omega_p") {
        cfg.params.omega_p = 4.5;
    }
    cfg.params.validate()?;
    cfg.grid_dp = Grid1D::new(cfg.grid_dp.start, cfg.grid_dp.stop, cfg.grid_dp.points)?;
    cfg.grid_phi = Grid1D::new(cfg.grid_phi.start, cfg.grid_phi.stop, cfg.grid_phi.points)?;
    Ok(cfg)
}

/// Renders a config back into the flat key–value format. Every key is written
/// explicitly; floating-point values use the shortest exact representation,
/// so `parse_config(serialize_config(c)) == c`.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode = {}", cfg.mode.name());
    let p = &cfg.params;
    let _ = writeln!(s, "omega_p = {:?}", p.omega_p);
    let _ = writeln!(s, "omega_l = {:?}", p.omega_l);
    let _ = writeln!(s, "phi_p = {:?}", p.phi_p);
    let _ = writeln!(s, "phi_l = {:?}", p.phi_l);
    let _ = writeln!(s, "delta_p = {:?}", p.delta_p);
    let _ = writeln!(s, "delta_l = {:?}", p.delta_l);
    let _ = writeln!(s, "gamma_ca = {:?}", p.gamma_ca);
    let _ = writeln!(s, "gamma_cb = {:?}", p.gamma_cb);
    let _ = writeln!(s, "dp_start = {:?}", cfg.grid_dp.start);
    let _ = writeln!(s, "dp_stop = {:?}", cfg.grid_dp.stop);
    let _ = writeln!(s, "dp_points = {}", cfg.grid_dp.points);
    let _ = writeln!(s, "phi_start = {:?}", cfg.grid_phi.start);
    let _ = writeln!(s, "phi_stop = {:?}", cfg.grid_phi.stop);
    let _ = writeln!(s, "phi_points = {}", cfg.grid_phi.points);
    let d = &cfg.dynamics;
    let _ = writeln!(s, "t_final = {:?}", d.t_final);
    let _ = writeln!(s, "tol = {:?}", d.tol);
    let _ = writeln!(s, "samples = {}", d.samples);
    let _ = writeln!(s, "window = {}", d.window.name());
    let _ = writeln!(s, "initial_state = {}", d.initial_state.label());
    let _ = writeln!(s, "steady_subtract = {}", d.steady_subtract);
    let _ = writeln!(s, "min_prominence = {:?}", d.min_prominence);
    if let Some(path) = &cfg.output {
        let _ = writeln!(s, "output = {}", path.display());
    }
    let _ = writeln!(s, "format = {}", cfg.format.name());
    s
}

/// Named reference runs, one per panel of the three figure families: the
/// weak-probe line shapes and coherence maps (fig3a–f), the strong-probe
/// line shapes and flat-top surface (fig4a–e), and the time-domain spectra
/// (fig5a–d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig3e,
    Fig3f,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
    Fig4e,
    Fig5a,
    Fig5b,
    Fig5c,
    Fig5d,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 15] = [
        FigurePreset::Fig3a,
        FigurePreset::Fig3b,
        FigurePreset::Fig3c,
        FigurePreset::Fig3d,
        FigurePreset::Fig3e,
        FigurePreset::Fig3f,
        FigurePreset::Fig4a,
        FigurePreset::Fig4b,
        FigurePreset::Fig4c,
        FigurePreset::Fig4d,
        FigurePreset::Fig4e,
        FigurePreset::Fig5a,
        FigurePreset::Fig5b,
        FigurePreset::Fig5c,
        FigurePreset::Fig5d,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FigurePreset::Fig3a => "fig3a",
            FigurePreset::Fig3b => "fig3b",
            FigurePreset::Fig3c => "fig3c",
            FigurePreset::Fig3d => "fig3d",
            FigurePreset::Fig3e => "fig3e",
            FigurePreset::Fig3f => "fig3f",
            FigurePreset::Fig4a => "fig4a",
            FigurePreset::Fig4b => "fig4b",
            FigurePreset::Fig4c => "fig4c",
            FigurePreset::Fig4d => "fig4d",
            FigurePreset::Fig4e => "fig4e",
            FigurePreset::Fig5a => "fig5a",
            FigurePreset::Fig5b => "fig5b",
            FigurePreset::Fig5c => "fig5c",
            FigurePreset::Fig5d => "fig5d",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.id() == s)
    }

    /// The fully expanded run for this preset.
    pub fn config(self) -> RunConfig {
        use std::f64::consts::{FRAC_PI_2, PI};
        let weak = SystemParams {
            omega_p: 0.37,
            omega_l: 10.0,
            ..SystemParams::default()
        };
        let strong = SystemParams {
            omega_p: 4.5,
            ..weak
        };
        let spectral = SystemParams {
            omega_p: 0.1,
            ..weak
        };
        let mut cfg = RunConfig {
            output: Some(PathBuf::from(format!("{}.csv", self.id()))),
            ..RunConfig::default()
        };
        match self {
            FigurePreset::Fig3a => {
                cfg.mode = Mode::Sweep;
                cfg.params = weak;
            }
            FigurePreset::Fig3b => {
                cfg.mode = Mode::Sweep;
                cfg.params = SystemParams {
                    phi_p: FRAC_PI_2,
                    ..weak
                };
            }
            FigurePreset::Fig3c => {
                cfg.mode = Mode::Sweep;
                cfg.params = SystemParams { phi_p: PI, ..weak };
            }
            FigurePreset::Fig3d => {
                cfg.mode = Mode::Sweep;
                cfg.params = SystemParams {
                    phi_p: 1.5 * PI,
                    ..weak
                };
            }
            FigurePreset::Fig3e | FigurePreset::Fig3f => {
                cfg.mode = Mode::Map;
                cfg.params = weak;
            }
            FigurePreset::Fig4a => {
                cfg.mode = Mode::Sweep;
                cfg.params = strong;
            }
            FigurePreset::Fig4b => {
                cfg.mode = Mode::Sweep;
                cfg.params = SystemParams {
                    phi_p: FRAC_PI_2,
                    ..strong
                };
            }
            FigurePreset::Fig4c => {
                cfg.mode = Mode::Sweep;
                cfg.params = SystemParams {
                    phi_p: PI,
                    ..strong
                };
            }
            FigurePreset::Fig4d => {
                cfg.mode = Mode::Sweep;
                cfg.params = SystemParams {
                    phi_p: -FRAC_PI_2,
                    ..strong
                };
            }
            FigurePreset::Fig4e => {
                cfg.mode = Mode::StrongProbe;
                cfg.params = strong;
            }
            FigurePreset::Fig5a => {
                cfg.mode = Mode::Spectrum;
                cfg.params = SystemParams {
                    delta_p: -20.0,
                    ..spectral
                };
            }
            FigurePreset::Fig5b => {
                cfg.mode = Mode::Spectrum;
                cfg.params = SystemParams {
                    delta_p: -15.0,
                    ..spectral
                };
            }
            FigurePreset::Fig5c => {
                cfg.mode = Mode::Spectrum;
                cfg.params = SystemParams {
                    delta_p: -10.0,
                    ..spectral
                };
            }
            FigurePreset::Fig5d => {
                cfg.mode = Mode::Spectrum;
                cfg.params = spectral;
            }
        }
        cfg
    }
}

/// Runs a preset, optionally redirecting its output.
pub fn run_preset(
    preset: FigurePreset,
    output: Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    let mut cfg = preset.config();
    if let Some(path) = output {
        cfg.output = Some(path);
    }
    if let Some(fmt) = format {
        cfg.format = fmt;
    }
    run(&cfg)
}

/// One cell of an output table.
#[derive(Debug, Clone)]
enum Field {
    Float(f64),
    Text(String),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits: round-trip exact for f64
            Field::Float(x) => format!("{x:.16e}"),
            Field::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Field::Float(x) if x.is_finite() => serde_json::json!(x),
            Field::Float(_) => serde_json::Value::Null,
            Field::Text(s) => serde_json::json!(s),
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Field>>,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    config: &'a RunConfig,
    columns: &'a [&'static str],
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    points_failed: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frequency_resolution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frequency_mapping: Option<&'static str>,
    units: &'static str,
}

impl<'a> RunMetadata<'a> {
    fn new(config: &'a RunConfig, table: &'a Table) -> Self {
        Self {
            config,
            columns: &table.columns,
            rows: table.rows.len(),
            points_failed: None,
            residual_max: None,
            residual_mean: None,
            frequency_resolution: None,
            frequency_mapping: None,
            units: "all frequencies and rates in units of gamma_cb; hbar = 1",
        }
    }
}

/// Executes a run: computes the requested quantity, writes the data file and
/// its sibling `.meta.json`, and prints a one-line summary to stdout.
pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.params.validate()?;
    let (table, summary, meta_extra) = match cfg.mode {
        Mode::Steady => run_steady(cfg)?,
        Mode::Sweep => run_sweep(cfg)?,
        Mode::Map | Mode::StrongProbe => run_map(cfg)?,
        Mode::Spectrum => run_spectrum(cfg)?,
        Mode::Dressed => run_dressed(cfg)?,
    };
    if let Some(path) = &cfg.output {
        write_table(&table, cfg, path, meta_extra)?;
    }
    println!("{summary}");
    Ok(())
}

struct MetaExtra {
    points_failed: Option<usize>,
    residual_max: Option<f64>,
    residual_mean: Option<f64>,
    frequency_resolution: Option<f64>,
    frequency_mapping: Option<&'static str>,
}

impl MetaExtra {
    fn none() -> Self {
        Self {
            points_failed: None,
            residual_max: None,
            residual_mean: None,
            frequency_resolution: None,
            frequency_mapping: None,
        }
    }
}

fn run_steady(cfg: &RunConfig) -> Result<(Table, String, MetaExtra)> {
    let ss = steady_state_of(&cfg.params)?;
    let ab = coherence(&ss.rho, CoherencePair::Ab).value;
    let ac = coherence(&ss.rho, CoherencePair::Ac).value;
    let bc = coherence(&ss.rho, CoherencePair::Bc).value;
    let pops = populations(&ss.rho);
    let table = Table {
        columns: vec![
            "re_rho_ab",
            "im_rho_ab",
            "re_rho_ac",
            "im_rho_ac",
            "re_rho_bc",
            "im_rho_bc",
            "pop_a",
            "pop_b",
            "pop_c",
            "residual",
        ],
        rows: vec![vec![
            Field::Float(ab.re),
            Field::Float(ab.im),
            Field::Float(ac.re),
            Field::Float(ac.im),
            Field::Float(bc.re),
            Field::Float(bc.im),
            Field::Float(pops.a),
            Field::Float(pops.b),
            Field::Float(pops.c),
            Field::Float(ss.residual),
        ]],
    };
    let summary = format!(
        "steady: rho_ab = {:+.6}{:+.6}i, rho_ac = {:+.6}{:+.6}i, populations (a,b,c) = ({:.6}, {:.6}, {:.6}), residual = {:.2e}",
        ab.re, ab.im, ac.re, ac.im, pops.a, pops.b, pops.c, ss.residual
    );
    let extra = MetaExtra {
        residual_max: Some(ss.residual),
        residual_mean: Some(ss.residual),
        ..MetaExtra::none()
    };
    Ok((table, summary, extra))
}

fn scan_columns(two_d: bool) -> Vec<&'static str> {
    let mut cols = vec!["delta_p"];
    if two_d {
        cols.push("delta_phi");
    }
    cols.extend([
        "re_rho_ab",
        "im_rho_ab",
        "re_rho_ac",
        "im_rho_ac",
        "pop_a",
        "pop_b",
        "pop_c",
        "residual",
        "status",
    ]);
    cols
}

fn scan_rows(table: &ScanTable, two_d: bool) -> Vec<Vec<Field>> {
    table
        .points
        .iter()
        .map(|point| {
            let mut row = vec![Field::Float(point.delta_p())];
            if two_d {
                row.push(Field::Float(point.delta_phi()));
            }
            match point {
                ScanPoint::Ok(r) => {
                    row.extend([
                        Field::Float(r.rho_ab.re),
                        Field::Float(r.rho_ab.im),
                        Field::Float(r.rho_ac.re),
                        Field::Float(r.rho_ac.im),
                        Field::Float(r.pop_a),
                        Field::Float(r.pop_b),
                        Field::Float(r.pop_c),
                        Field::Float(r.residual),
                        Field::Text("ok".into()),
                    ]);
                }
                ScanPoint::Failed { error, .. } => {
                    row.extend(std::iter::repeat_with(|| Field::Float(f64::NAN)).take(8));
                    row.push(Field::Text((*error).into()));
                }
            }
            row
        })
        .collect()
}

fn scan_meta(table: &ScanTable) -> MetaExtra {
    let count = table.records().count();
    let mean = if count == 0 {
        None
    } else {
        Some(table.records().map(|r| r.residual).sum::<f64>() / count as f64)
    };
    MetaExtra {
        points_failed: Some(table.failed_count()),
        residual_max: Some(table.max_residual()),
        residual_mean: mean,
        ..MetaExtra::none()
    }
}

fn extremum_summary(table: &ScanTable, label: &str) -> String {
    match (table.max_im_ab(), table.min_im_ab()) {
        (Some(max), Some(min)) => format!(
            "{label}: Im rho_ab max {:+.6} at (delta_p {:+.3}, delta_phi {:+.4}), min {:+.6} at (delta_p {:+.3}, delta_phi {:+.4}); {} failed points",
            max.rho_ab.im, max.delta_p, max.delta_phi,
            min.rho_ab.im, min.delta_p, min.delta_phi,
            table.failed_count()
        ),
        _ => format!("{label}: no successful points ({} failed)", table.failed_count()),
    }
}

fn run_sweep(cfg: &RunConfig) -> Result<(Table, String, MetaExtra)> {
    let scan = sweep_detuning(&cfg.params, &cfg.grid_dp)?;
    let table = Table {
        columns: scan_columns(false),
        rows: scan_rows(&scan, false),
    };
    let summary = extremum_summary(&scan, "sweep");
    let extra = scan_meta(&scan);
    Ok((table, summary, extra))
}

fn run_map(cfg: &RunConfig) -> Result<(Table, String, MetaExtra)> {
    let scan = if cfg.mode == Mode::StrongProbe {
        strong_probe_suite(&cfg.params, &cfg.grid_dp, &cfg.grid_phi)?
    } else {
        map_phase_detuning(&cfg.params, &cfg.grid_dp, &cfg.grid_phi)?
    };
    let table = Table {
        columns: scan_columns(true),
        rows: scan_rows(&scan, true),
    };
    let summary = extremum_summary(&scan, cfg.mode.name());
    let extra = scan_meta(&scan);
    Ok((table, summary, extra))
}

fn peak_list(peaks: &[Peak]) -> String {
    let mut s = String::new();
    for (i, p) in peaks.iter().take(5).enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(
            s,
            "nu {:+.4} (height {:.4e}, fwhm {:.4})",
            p.nu_center, p.height, p.fwhm
        );
    }
    if s.is_empty() {
        s.push_str("none");
    }
    s
}

fn run_spectrum(cfg: &RunConfig) -> Result<(Table, String, MetaExtra)> {
    let d = &cfg.dynamics;
    let traj = evolve_from(&cfg.params, d.initial_state, d.t_final, d.tol, d.samples)?;
    let spec: Spectrum = spectrum(
        &traj,
        &SpectrumOptions {
            window: d.window,
            steady_subtract: d.steady_subtract,
        },
    )?;
    let peaks = find_peaks(&spec, d.min_prominence);
    let rows = spec
        .nu
        .iter()
        .zip(&spec.values)
        .map(|(nu, v)| {
            vec![
                Field::Float(*nu),
                Field::Float(v.norm()),
                Field::Float(v.re),
                Field::Float(v.im),
            ]
        })
        .collect();
    let table = Table {
        columns: vec!["nu", "amplitude", "re", "im"],
        rows,
    };
    let summary = format!("spectrum: peaks: {}", peak_list(&peaks));
    let extra = MetaExtra {
        frequency_resolution: Some(spec.resolution),
        frequency_mapping: Some("nu = (delta_p - delta_l) - omega_dft"),
        ..MetaExtra::none()
    };
    Ok((table, summary, extra))
}

fn run_dressed(cfg: &RunConfig) -> Result<(Table, String, MetaExtra)> {
    let pair = dressed_states(&cfg.params)?;
    let mut rows = Vec::new();
    for (branch, state) in [(Branch::Plus, &pair.plus), (Branch::Minus, &pair.minus)] {
        let mut at_resonance = cfg.params;
        at_resonance.delta_p = branch.resonant_delta_p(&cfg.params);
        let ab = rho_ab_dressed(&at_resonance, branch).value;
        let ac = rho_ac_dressed(&at_resonance, branch).value;
        rows.push(vec![
            Field::Text(
                if branch == Branch::Plus {
                    "plus"
                } else {
                    "minus"
                }
                .into(),
            ),
            Field::Float(at_resonance.delta_p),
            Field::Float(pair.r),
            Field::Float(state[IDX_C].re),
            Field::Float(state[IDX_C].im),
            Field::Float(state[IDX_B].re),
            Field::Float(state[IDX_B].im),
            Field::Float(state[IDX_A].re),
            Field::Float(state[IDX_A].im),
            Field::Float(ab.re),
            Field::Float(ab.im),
            Field::Float(ac.re),
            Field::Float(ac.im),
        ]);
    }
    let table = Table {
        columns: vec![
            "branch",
            "resonant_delta_p",
            "generalized_rabi",
            "re_c",
            "im_c",
            "re_b",
            "im_b",
            "re_a",
            "im_a",
            "re_rho_ab_dressed",
            "im_rho_ab_dressed",
            "re_rho_ac_dressed",
            "im_rho_ac_dressed",
        ],
        rows,
    };
    let summary = format!(
        "dressed: R = {:.6}; resonances at delta_p = {:+.4} (plus), {:+.4} (minus)",
        pair.r,
        Branch::Plus.resonant_delta_p(&cfg.params),
        Branch::Minus.resonant_delta_p(&cfg.params)
    );
    Ok((table, summary, MetaExtra::none()))
}

fn write_table(table: &Table, cfg: &RunConfig, path: &Path, extra: MetaExtra) -> Result<()> {
    match cfg.format {
        OutputFormat::Csv => write_csv(table, path)?,
        OutputFormat::Json => write_json(table, path)?,
    }

    let mut meta = RunMetadata::new(cfg, table);
    meta.points_failed = extra.points_failed;
    meta.residual_max = extra.residual_max;
    meta.residual_mean = extra.residual_mean;
    meta.frequency_resolution = extra.frequency_resolution;
    meta.frequency_mapping = extra.frequency_mapping;
    let meta_path = path.with_extension("meta.json");
    let body = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    let mut file = BufWriter::new(File::create(&meta_path).map_err(|e| io_err(&meta_path, e))?);
    file.write_all(body.as_bytes())
        .and_then(|_| file.write_all(b"\n"))
        .map_err(|e| io_err(&meta_path, e))?;
    Ok(())
}

fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let write = |file: &mut BufWriter<File>, line: &str| {
        file.write_all(line.as_bytes())
            .and_then(|_| file.write_all(b"\n"))
            .map_err(|e| io_err(path, e))
    };
    write(&mut file, &table.columns.join(","))?;
    for row in &table.rows {
        let line = row.iter().map(Field::csv).collect::<Vec<_>>().join(",");
        write(&mut file, &line)?;
    }
    file.flush().map_err(|e| io_err(path, e))
}

fn write_json(table: &Table, path: &Path) -> Result<()> {
    let body = serde_json::json!({
        "columns": table.columns,
        "rows": table.rows.iter()
            .map(|row| row.iter().map(Field::json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    let mut file = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let text = serde_json::to_string_pretty(&body).expect("table serializes");
    file.write_all(text.as_bytes())
        .and_then(|_| file.write_all(b"\n"))
        .map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_flat_config() {
        let cfg = parse_config(
            "# reference weak-probe sweep\nmode = sweep\nomega_l = 10\nomega_p = 0.37\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::Sweep);
        assert_eq!(cfg.params.omega_l, 10.0);
        assert_eq!(cfg.params.omega_p, 0.37);
        assert_eq!(cfg.params.gamma_ca, 1.0);
        assert_eq!(cfg.grid_dp.points, 401);
    }

    #[test]
    fn parses_the_json_form() {
        let cfg =
            parse_config(r#"{"mode": "steady", "omega_l": 10, "omega_p": 0.37, "delta_p": -10}"#)
                .unwrap();
        assert_eq!(cfg.mode, Mode::Steady);
        assert_eq!(cfg.params.delta_p, -10.0);
    }

    #[test]
    fn empty_input_misses_the_mode() {
        assert!(matches!(
            parse_config(""),
            Err(Error::MissingRequired { key: "mode" })
        ));
    }

    #[test]
    fn bad_number_reports_the_line() {
        match parse_config("mode = steady\nomega_l = ten\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            parse_config("mode = steady\nomega_q = 1\n"),
            Err(Error::UnknownKey { .. })
        ));
    }

    #[test]
    fn negative_rates_fail_validation_at_parse_time() {
        assert!(matches!(
            parse_config("mode = steady\ngamma_ca = -1\n"),
            Err(Error::NegativeRate { .. })
        ));
    }

    #[test]
    fn overrides_win_over_the_config_text() {
        let cfg = parse_config_with_overrides(
            Some("mode = sweep\nomega_p = 0.37\n"),
            &[
                ("omega_p".into(), "4.5".into()),
                ("mode".into(), "map".into()),
            ],
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::Map);
        assert_eq!(cfg.params.omega_p, 4.5);
    }

    #[test]
    fn strong_probe_mode_defaults_the_probe_amplitude() {
        let cfg = parse_config("mode = strong-probe\n").unwrap();
        assert_eq!(cfg.params.omega_p, 4.5);
        let explicit = parse_config("mode = strong-probe\nomega_p = 2\n").unwrap();
        assert_eq!(explicit.params.omega_p, 2.0);
    }

    #[test]
    fn serialize_parse_round_trip_is_exact() {
        let mut cfg = FigurePreset::Fig5c.config();
        cfg.params.phi_p = 0.1 + 0.2; // awkward binary value
        cfg.dynamics.tol = 3.333e-10;
        cfg.output = Some(PathBuf::from("out/spectrum.csv"));
        let text = serialize_config(&cfg);
        let back = parse_config(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn preset_parameters_match_the_reference_table() {
        use std::f64::consts::PI;
        // (id, mode, omega_p, phi_p, delta_p)
        let expected: &[(&str, Mode, f64, f64, f64)] = &[
            ("fig3a", Mode::Sweep, 0.37, 0.0, 0.0),
            ("fig3b", Mode::Sweep, 0.37, PI / 2.0, 0.0),
            ("fig3c", Mode::Sweep, 0.37, PI, 0.0),
            ("fig3d", Mode::Sweep, 0.37, 1.5 * PI, 0.0),
            ("fig3e", Mode::Map, 0.37, 0.0, 0.0),
            ("fig3f", Mode::Map, 0.37, 0.0, 0.0),
            ("fig4a", Mode::Sweep, 4.5, 0.0, 0.0),
            ("fig4b", Mode::Sweep, 4.5, PI / 2.0, 0.0),
            ("fig4c", Mode::Sweep, 4.5, PI, 0.0),
            ("fig4d", Mode::Sweep, 4.5, -PI / 2.0, 0.0),
            ("fig4e", Mode::StrongProbe, 4.5, 0.0, 0.0),
            ("fig5a", Mode::Spectrum, 0.1, 0.0, -20.0),
            ("fig5b", Mode::Spectrum, 0.1, 0.0, -15.0),
            ("fig5c", Mode::Spectrum, 0.1, 0.0, -10.0),
            ("fig5d", Mode::Spectrum, 0.1, 0.0, 0.0),
        ];
        for &(id, mode, omega_p, phi_p, delta_p) in expected {
            let preset = FigurePreset::from_id(id).unwrap();
            let cfg = preset.config();
            assert_eq!(cfg.mode, mode, "{id}");
            assert_eq!(cfg.params.omega_p, omega_p, "{id}");
            assert_eq!(cfg.params.phi_p, phi_p, "{id}");
            assert_eq!(cfg.params.delta_p, delta_p, "{id}");
            assert_eq!(cfg.params.omega_l, 10.0, "{id}");
            assert_eq!(cfg.params.gamma_ca, 1.0, "{id}");
            assert_eq!(cfg.params.gamma_cb, 1.0, "{id}");
            assert_eq!(cfg.params.delta_l, 0.0, "{id}");
            assert_eq!(cfg.params.phi_l, 0.0, "{id}");
        }
    }

    #[test]
    fn empty_table_writes_the_header_row_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let table = Table {
            columns: vec!["delta_p", "re_rho_ab"],
            rows: vec![],
        };
        write_csv(&table, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "delta_p,re_rho_ab\n"
        );
    }

    #[test]
    fn csv_fields_round_trip_through_seventeen_digits() {
        for x in [0.1, -1.0 / 3.0, 1e-10, std::f64::consts::PI, 123456.789e12] {
            let rendered = Field::Float(x).csv();
            let back: f64 = rendered.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{rendered}");
        }
    }
}
