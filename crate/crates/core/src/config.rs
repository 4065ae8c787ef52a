// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a flat TOML document whose keys are the
//! [`SystemParams`] field names plus a few run-control keys.

use std::path::PathBuf;

use serde::Serialize;
use toml::{Table, Value};

use crate::device::{apply_device, DetuningShift, DevicePhysical};
use crate::error::{Error, Result};
use crate::params::{Cutoffs, SystemParams, FIELD_NAMES};

/// Keys that must be present in every document.
pub const REQUIRED: [&str; 8] = [
    "Omega", "Delta_q", "Omega_R", "Gamma", "gamma", "kappa", "Delta_c", "n_th",
];

const DEVICE_KEYS: [&str; 10] = [
    "E_J", "C_J", "C_q", "C_x", "d", "N_x", "Delta_N", "X_ZPF", "flux_ratio", "charge_scale",
];

const NUMBER_KEYS: [&str; 16] = [
    "G", "G_o", "omega_min", "omega_max", "G0_min", "G0_max", "t_max", "n_b0", "sweep_start",
    "sweep_stop", "N_a", "N_b", "omega_points", "G0_points", "t_points", "sweep_points",
];

const FLAG_KEYS: [&str; 2] = ["strict_paper", "third_order"];

const STRING_KEYS: [&str; 4] = ["sweep_field", "output", "format", "detuning_shift"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config_field("format", format!("format must be csv or json, got {other:?}"))),
        }
    }
}

/// Evenly spaced grid including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl LinearGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(Error::domain("grid needs finite ends and at least one point"));
        }
        if points > 1 && !(stop > start) {
            return Err(Error::domain(format!("grid end {stop} must exceed start {start}")));
        }
        Ok(LinearGrid { start, stop, points })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| if k + 1 == self.points { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxis {
    pub field: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub device: Option<DevicePhysical>,
    pub cutoffs: Cutoffs,
    /// Override for the effective qubit coupling G.
    pub g_eff: Option<f64>,
    /// Override for the linearized optomechanical coupling G_o.
    pub g_o_eff: Option<f64>,
    pub sweep: Option<SweepAxis>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub strict_paper: bool,
    pub third_order: bool,
    pub detuning_shift: DetuningShift,
    pub omega_grid: Option<LinearGrid>,
    pub g0_grid: Option<LinearGrid>,
    pub t_grid: Option<LinearGrid>,
    /// Initial phonon number of trajectories; defaults to n_th.
    pub n_b0: Option<f64>,
}

impl RunConfig {
    /// Built-in figure parameter set with G = 0.2 MHz.
    pub fn figure_defaults() -> Self {
        RunConfig {
            params: SystemParams::figure_defaults(),
            device: None,
            cutoffs: Cutoffs::default(),
            g_eff: Some(0.2),
            g_o_eff: None,
            sweep: None,
            output: None,
            format: None,
            strict_paper: false,
            third_order: false,
            detuning_shift: DetuningShift::default(),
            omega_grid: None,
            g0_grid: None,
            t_grid: None,
            n_b0: None,
        }
    }
}

/// 1-based line on which `key` is assigned, if any.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .map(|rest| rest.trim_start().starts_with('='))
            .unwrap_or(false)
    })
    .map(|i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Reader<'a> {
    text: &'a str,
    table: Table,
}

impl Reader<'_> {
    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        Error::Config {
            line: key_line(self.text, key),
            field: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(v)),
            Some(Value::Integer(v)) => Ok(Some(v as f64)),
            Some(other) => Err(self.err(key, format!("{key} must be a number, got {}", other.type_str()))),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        match self.number(key)? {
            None => Ok(None),
            Some(v) if v >= 1.0 && v.fract() == 0.0 && v < 1e9 => Ok(Some(v as usize)),
            Some(v) => Err(self.err(key, format!("{key} must be a positive integer, got {v}"))),
        }
    }

    fn flag(&mut self, key: &str) -> Result<bool> {
        match self.table.remove(key) {
            None => Ok(false),
            Some(Value::Boolean(b)) => Ok(b),
            Some(other) => Err(self.err(key, format!("{key} must be true or false, got {}", other.type_str()))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.err(key, format!("{key} must be a string, got {}", other.type_str()))),
        }
    }

    fn grid(&mut self, min: &str, max: &str, points: &str) -> Result<Option<LinearGrid>> {
        let lo = self.number(min)?;
        let hi = self.number(max)?;
        let n = self.count(points)?;
        match (lo, hi) {
            (None, None) if n.is_none() => Ok(None),
            (Some(lo), Some(hi)) => {
                LinearGrid::new(lo, hi, n.unwrap_or(101)).map(Some).map_err(|e| self.err(min, e.to_string()))
            }
            _ => Err(self.err(min, format!("{min} and {max} must be given together"))),
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config {
        line: e.span().map(|s| line_of_offset(text, s.start)),
        field: None,
        message: e.message().to_string(),
    })?;

    for key in table.keys() {
        let known = FIELD_NAMES.contains(&key.as_str())
            || DEVICE_KEYS.contains(&key.as_str())
            || NUMBER_KEYS.contains(&key.as_str())
            || FLAG_KEYS.contains(&key.as_str())
            || STRING_KEYS.contains(&key.as_str())
            || key == "sweep_values";
        if !known {
            return Err(Error::Config {
                line: key_line(text, key),
                field: Some(key.clone()),
                message: format!("unknown key `{key}`"),
            });
        }
    }
    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !table.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(Error::Config {
            line: None,
            field: None,
            message: format!("missing required fields: {}", missing.join(", ")),
        });
    }

    let mut r = Reader { text, table };
    let mut params = SystemParams {
        omega_m: 0.0,
        omega_q: 0.0,
        delta_q: 0.0,
        rabi: 0.0,
        phi: 0.0,
        g: 0.0,
        g_o: 0.0,
        delta_c: 0.0,
        eta: 0.0,
        qubit_relax: 0.0,
        qubit_dephase: 0.0,
        mech_damping: 0.0,
        kappa: 0.0,
        n_th: 0.0,
        n_q: 0.0,
    };
    for name in FIELD_NAMES {
        if let Some(v) = r.number(name)? {
            params.set(name, v);
        }
    }
    params.validate().map_err(|e| match e {
        Error::Config { field, message, .. } => Error::Config {
            line: field.as_deref().and_then(|f| key_line(text, f)),
            field,
            message,
        },
        other => other,
    })?;

    let device_given: Vec<&str> = DEVICE_KEYS.iter().copied().filter(|k| r.table.contains_key(*k)).collect();
    let device = if device_given.is_empty() {
        None
    } else {
        for k in ["omega_q", "phi", "g"] {
            if key_line(text, k).is_some() {
                return Err(r.err(k, format!("{k} is derived from the device keys and cannot also be set")));
            }
        }
        let mut vals = Vec::with_capacity(DEVICE_KEYS.len());
        for k in DEVICE_KEYS {
            vals.push(r.number(k)?);
        }
        let missing: Vec<&str> = DEVICE_KEYS[..9].iter().zip(&vals).filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
        if !missing.is_empty() {
            return Err(Error::Config {
                line: None,
                field: None,
                message: format!("incomplete device description, missing: {}", missing.join(", ")),
            });
        }
        let v: Vec<f64> = vals.iter().map(|x| x.unwrap_or(1.0)).collect();
        let dev = DevicePhysical {
            e_j: v[0],
            c_j: v[1],
            c_q: v[2],
            c_x: v[3],
            d: v[4],
            n_x: v[5],
            delta_n: v[6],
            x_zpf: v[7],
            flux_ratio: v[8],
            charge_scale: v[9],
        };
        params = apply_device(&params, &dev).map_err(|e| Error::Config {
            line: None,
            field: None,
            message: format!("device: {e}"),
        })?;
        Some(dev)
    };

    let g_eff = r.number("G")?;
    let g_o_eff = r.number("G_o")?;
    let n_a = r.count("N_a")?;
    let n_b = r.count("N_b")?;
    let defaults = Cutoffs::default();
    let cutoffs = Cutoffs {
        cavity: n_a.unwrap_or(defaults.cavity),
        mechanics: n_b.unwrap_or(defaults.mechanics),
    };
    for (key, n) in [("N_a", cutoffs.cavity), ("N_b", cutoffs.mechanics)] {
        if n < 2 {
            return Err(r.err(key, format!("{key} must be >= 2")));
        }
    }

    let sweep_field = r.string("sweep_field")?;
    let sweep_values = match r.table.remove("sweep_values") {
        None => None,
        Some(Value::Array(a)) => {
            let mut out = Vec::with_capacity(a.len());
            for v in a {
                match v {
                    Value::Float(x) => out.push(x),
                    Value::Integer(x) => out.push(x as f64),
                    other => {
                        return Err(r.err("sweep_values", format!("sweep_values must hold numbers, got {}", other.type_str())))
                    }
                }
            }
            Some(out)
        }
        Some(other) => return Err(r.err("sweep_values", format!("sweep_values must be an array, got {}", other.type_str()))),
    };
    let sweep_grid = r.grid("sweep_start", "sweep_stop", "sweep_points")?;
    let sweep = match (sweep_field, sweep_values, sweep_grid) {
        (None, None, None) => None,
        (Some(field), values, grid) => {
            if params.get(&field).is_none() {
                return Err(r.err("sweep_field", format!("sweep_field `{field}` is not a parameter name")));
            }
            let values = match (values, grid) {
                (Some(v), None) if !v.is_empty() => v,
                (None, Some(g)) => g.values(),
                _ => {
                    return Err(r.err(
                        "sweep_field",
                        "give either a non-empty sweep_values or sweep_start/sweep_stop",
                    ))
                }
            };
            Some(SweepAxis { field, values })
        }
        _ => return Err(r.err("sweep_values", "sweep grid given without sweep_field")),
    };

    let output = r.string("output")?.map(PathBuf::from);
    let format = match r.string("format")? {
        None => None,
        Some(s) => Some(s.parse().map_err(|_| r.err("format", format!("format must be csv or json, got {s:?}")))?),
    };
    let detuning_shift = match r.string("detuning_shift")?.as_deref() {
        None | Some("printed") => DetuningShift::Printed,
        Some("linear") => DetuningShift::Linear,
        Some(other) => {
            return Err(r.err("detuning_shift", format!("detuning_shift must be printed or linear, got {other:?}")))
        }
    };
    let strict_paper = r.flag("strict_paper")?;
    let third_order = r.flag("third_order")?;
    let omega_grid = r.grid("omega_min", "omega_max", "omega_points")?;
    let g0_grid = r.grid("G0_min", "G0_max", "G0_points")?;
    let t_max = r.number("t_max")?;
    let t_points = r.count("t_points")?;
    let t_grid = match t_max {
        None if t_points.is_none() => None,
        None => return Err(r.err("t_points", "t_points needs t_max")),
        Some(t) => Some(LinearGrid::new(0.0, t, t_points.unwrap_or(1001)).map_err(|e| r.err("t_max", e.to_string()))?),
    };
    let n_b0 = r.number("n_b0")?;
    if let Some(n) = n_b0 {
        if !(n >= 0.0) {
            return Err(r.err("n_b0", "n_b0 must be >= 0"));
        }
    }
    debug_assert!(r.table.is_empty(), "unconsumed keys {:?}", r.table.keys().collect::<Vec<_>>());

    Ok(RunConfig {
        params,
        device,
        cutoffs,
        g_eff,
        g_o_eff,
        sweep,
        output,
        format,
        strict_paper,
        third_order,
        detuning_shift,
        omega_grid,
        g0_grid,
        t_grid,
        n_b0,
    })
}
