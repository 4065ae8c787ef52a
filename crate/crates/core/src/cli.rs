// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: subcommand dispatch and deterministic CSV/JSON
//! output.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cavity_spectrum::{force_spectrum, CavityDrive};
use crate::config::{parse_config, LinearGrid, OutputFormat, RunConfig};
use crate::cooling_strong::{fig4_curves, moment_generator, MomentOptions, MomentState, TwoModeOracle, Fig4Case};
use crate::cooling_weak::{budget_from_effective, oracle_steady_phonon, steady_phonon, sweep_fig3, OracleOptions, Regime};
use crate::device::{effective_params, DeriveOptions};
use crate::error::{Error, Result};
use crate::lindblad::EvolveOptions;
use crate::operators::HamiltonianOptions;
use crate::params::EffectiveParams;
use crate::qubit_spectrum::{optimal_drive, qubit_noise_spectrum, qubit_rates, QubitDrive};

#[derive(Debug, Parser)]
#[command(name = "hybridcool", version, about = "Hybrid qubit/cavity sideband cooling of a mechanical mode")]
pub struct Cli {
    /// TOML parameter file; the built-in figure parameters are used without it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (stdout by default).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Worker threads for sweeps and spectra.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Use the printed-equation variants of the qubit rates.
    #[arg(long, global = true)]
    pub strict_paper: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumKind {
    Qubit,
    Force,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Resolved,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    /// Weak-coupling steady state against the full qubit-cavity-mechanics master equation.
    Weak,
    /// Moment trajectory against the two-mode master equation.
    Moments,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady displacements and effective couplings.
    Derive,
    /// Qubit noise spectrum or cavity force spectrum.
    Spectrum {
        #[arg(value_enum)]
        kind: SpectrumKind,
    },
    /// Drive maximizing the qubit cooling rate.
    OptimalDrive,
    /// Steady phonon number versus G_0.
    Fig3 {
        #[arg(long, value_enum)]
        regime: RegimeArg,
    },
    /// Phonon number versus time from the moment equations.
    Fig4 {
        #[arg(long, value_enum)]
        case: CaseArg,
    },
    /// Cross-checks against full master equations.
    Oracle {
        #[arg(value_enum, default_value = "weak")]
        kind: OracleKind,
    },
    /// Rates and steady phonon number along the configured sweep axis.
    Sweep,
}

/// Result of a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Table { columns: Vec<String>, rows: Vec<Vec<f64>> },
    Record(Value),
}

impl Artifact {
    fn table(columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Artifact::Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    fn default_format(&self) -> OutputFormat {
        match self {
            Artifact::Table { .. } => OutputFormat::Csv,
            Artifact::Record(_) => OutputFormat::Json,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        match (self, format) {
            (Artifact::Table { columns, rows }, OutputFormat::Csv) => {
                out.push_str(&columns.join(","));
                out.push('\n');
                for r in rows {
                    let cells: Vec<String> = r.iter().map(|v| fmt_num(*v)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            (Artifact::Table { columns, rows }, OutputFormat::Json) => {
                let v = json!({
                    "columns": columns,
                    "rows": rows,
                });
                write_json(&v, &mut out);
                out.push('\n');
            }
            (Artifact::Record(v), OutputFormat::Json) => {
                write_json(v, &mut out);
                out.push('\n');
            }
            (Artifact::Record(v), OutputFormat::Csv) => {
                out.push_str("key,value\n");
                let mut flat = Vec::new();
                flatten("", v, &mut flat);
                for (k, val) in flat {
                    out.push_str(&format!("{k},{val}\n"));
                }
            }
        }
        out
    }
}

/// Twelve significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

fn write_json(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => out.push_str(&i.to_string()),
            (_, Some(u), _) => out.push_str(&u.to_string()),
            (_, _, Some(f)) if f.is_finite() => out.push_str(&fmt_num(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (k, x) in a.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_json(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (k, (key, x)) in m.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_json(x, out);
            }
            out.push('}');
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) => {
            for (k, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{k}"), x, out);
            }
        }
        other => {
            let mut s = String::new();
            write_json(other, &mut s);
            out.push((prefix.to_string(), s));
        }
    }
}

/// Machine-readable error report.
pub fn error_json(e: &Error) -> String {
    let v = json!({
        "code": e.exit_code(),
        "module": e.module(),
        "message": e.to_string(),
        "context": e.context(),
    });
    let mut s = String::new();
    write_json(&v, &mut s);
    s
}

fn derive(cfg: &RunConfig) -> Result<EffectiveParams> {
    effective_params(
        &cfg.params,
        &DeriveOptions {
            detuning_shift: cfg.detuning_shift,
            g_eff: cfg.g_eff,
            g_o_eff: cfg.g_o_eff,
            ..Default::default()
        },
    )
}

fn grid_or(g: Option<LinearGrid>, start: f64, stop: f64, points: usize) -> Vec<f64> {
    g.unwrap_or(LinearGrid { start, stop, points }).values()
}

fn strict(cli_flag: bool, cfg: &RunConfig) -> bool {
    cli_flag || cfg.strict_paper
}

/// Runs a parsed command against a configuration.
pub fn execute(command: &Command, cfg: Option<&RunConfig>, strict_paper: bool) -> Result<Artifact> {
    let defaults = RunConfig::figure_defaults();
    let given = cfg.is_some();
    let cfg = cfg.unwrap_or(&defaults);
    let p = &cfg.params;
    let strict_paper = strict(strict_paper, cfg);
    match command {
        Command::Derive => {
            let eff = derive(cfg)?;
            Ok(Artifact::Record(json!({
                "params": p,
                "effective": eff,
            })))
        }
        Command::Spectrum { kind: SpectrumKind::Qubit } => {
            let eff = derive(cfg)?;
            let drive = QubitDrive::new(eff.delta_q_shifted, eff.rabi_eff, p.qubit_relax, p.qubit_dephase, p.n_q)?;
            let w = p.omega_m;
            let omegas = grid_or(cfg.omega_grid, -3.0 * w, 3.0 * w, 601);
            let s = qubit_noise_spectrum(&drive, &omegas)?;
            let rows = omegas
                .iter()
                .zip(&s)
                .map(|(o, z)| vec![*o, z.re, z.im, 2.0 * z.re])
                .collect();
            Ok(Artifact::table(&["omega_MHz", "S_re", "S_im", "S_symmetrized"], rows))
        }
        Command::Spectrum { kind: SpectrumKind::Force } => {
            let eff = derive(cfg)?;
            let cav = CavityDrive::new(eff.delta_c_shifted, p.kappa, eff.g_o_eff)?;
            let w = p.omega_m;
            let omegas = grid_or(cfg.omega_grid, -3.0 * w, 3.0 * w, 601);
            let s = force_spectrum(&cav, &omegas);
            let rows = omegas.iter().zip(&s).map(|(o, v)| vec![*o, *v]).collect();
            Ok(Artifact::table(&["omega_MHz", "S_FF"], rows))
        }
        Command::OptimalDrive => {
            let opt = optimal_drive(p.omega_m, p.qubit_relax, p.qubit_dephase, p.n_q)?;
            Ok(Artifact::Record(serde_json::to_value(opt).expect("plain record")))
        }
        Command::Fig3 { regime } => {
            let regime = match regime {
                RegimeArg::Resolved => Regime::Resolved,
                RegimeArg::Unresolved => Regime::Unresolved,
            };
            let g = derive(cfg)?.g_eff;
            let stop = match regime {
                Regime::Resolved => 0.1,
                Regime::Unresolved => 1.0,
            };
            let grid = grid_or(cfg.g0_grid, 0.0, stop, 101);
            let rows = sweep_fig3(regime, &grid, p, g, strict_paper)?
                .into_iter()
                .map(|r| vec![r.g0, r.n_qubit_only, r.n_cavity_only, r.n_hybrid])
                .collect();
            Ok(Artifact::table(&["G0_MHz", "n_qubit_only", "n_cavity_only", "n_hybrid"], rows))
        }
        Command::Fig4 { case } => {
            let case = match case {
                CaseArg::A => Fig4Case::A,
                CaseArg::B => Fig4Case::B,
            };
            let (params, g) = if given {
                (*p, derive(cfg)?.g_eff)
            } else {
                (case.params(), case.g())
            };
            let g_o = cfg.g_o_eff.filter(|_| given).unwrap_or(case.g_o());
            let ts = grid_or(cfg.t_grid, 0.0, 1000.0, 1001);
            let opts = MomentOptions {
                strict_paper,
                ..Default::default()
            };
            let rows = fig4_curves(&params, g, g_o, cfg.n_b0.unwrap_or(params.n_th), &ts, &opts)?
                .into_iter()
                .map(|r| vec![r.t_us, r.n_hybrid, r.n_qubit_only, r.n_cavity_only])
                .collect();
            Ok(Artifact::table(&["t_us", "n_hybrid", "n_qubit_only", "n_cavity_only"], rows))
        }
        Command::Oracle { kind: OracleKind::Weak } => {
            let eff = derive(cfg)?;
            let n_formula = steady_phonon(&budget_from_effective(p, &eff, strict_paper)?, strict_paper)?;
            let opts = OracleOptions {
                hamiltonian: HamiltonianOptions {
                    third_order: cfg.third_order,
                },
                ..Default::default()
            };
            let r = oracle_steady_phonon(p, &eff, cfg.cutoffs, &opts)?;
            Ok(Artifact::Record(json!({
                "N_a": cfg.cutoffs.cavity,
                "N_b": cfg.cutoffs.mechanics,
                "n_formula": n_formula,
                "n_oracle": r.n_b,
                "relative_difference": (n_formula - r.n_b).abs() / r.n_b.abs(),
                "oracle": r,
            })))
        }
        Command::Oracle { kind: OracleKind::Moments } => {
            let eff = derive(cfg)?;
            let drive = QubitDrive::new(eff.delta_q_shifted, eff.rabi_eff, p.qubit_relax, p.qubit_dephase, p.n_q)?;
            let rates = qubit_rates(eff.g_eff, p.omega_m, &drive, strict_paper)?;
            let sys = moment_generator(p, &eff, &rates, true)?;
            let oracle = TwoModeOracle::new(&sys.coefficients, cfg.cutoffs)?;
            let rho0 = oracle.initial_state(cfg.n_b0.unwrap_or(p.n_th))?;
            let limit = OracleOptions::default().leakage_limit;
            for (name, k) in [("cavity", 0), ("mechanics", 1)] {
                let leak = rho0.top_level_population(k);
                if leak > limit {
                    return Err(Error::Cutoff { subsystem: name, leakage: leak, limit });
                }
            }
            let ts = grid_or(cfg.t_grid, 0.0, 40.0, 201);
            let exact = oracle.evolve(&rho0, &ts, &EvolveOptions::default())?;
            let traj = crate::cooling_strong::evolve_moments(&sys, &oracle.moments(&rho0), &ts, &MomentOptions::default())?;
            let rows = ts
                .iter()
                .zip(exact.iter().zip(&traj.states))
                .map(|(t, (e, m)): (&f64, (&MomentState, &MomentState))| vec![*t, m.n_b, e.n_b, (m.n_b - e.n_b).abs()])
                .collect();
            Ok(Artifact::table(&["t_us", "n_b_moments", "n_b_master", "abs_difference"], rows))
        }
        Command::Sweep => {
            let axis = cfg.sweep.as_ref().ok_or_else(|| Error::Config {
                line: None,
                field: Some("sweep_field".into()),
                message: "sweep needs sweep_field with sweep_values or sweep_start/sweep_stop".into(),
            })?;
            let rows = axis
                .values
                .par_iter()
                .map(|&v| {
                    let mut local = cfg.clone();
                    local.params.set(&axis.field, v);
                    local.params.validate()?;
                    let eff = derive(&local)?;
                    let b = budget_from_effective(&local.params, &eff, strict_paper)?;
                    let n = steady_phonon(&b, strict_paper)?;
                    Ok(vec![
                        v,
                        eff.g_eff,
                        eff.g_o_eff,
                        b.qubit.minus,
                        b.qubit.plus,
                        b.cavity.minus,
                        b.cavity.plus,
                        n,
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            let columns = [
                axis.field.as_str(),
                "G",
                "G_o",
                "Gamma_q_minus",
                "Gamma_q_plus",
                "Gamma_o_minus",
                "Gamma_o_plus",
                "n_ss",
            ];
            Ok(Artifact::table(&columns, rows))
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<Option<RunConfig>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config {
                line: None,
                field: None,
                message: format!("cannot read {}: {e}", p.display()),
            })?;
            parse_config(&text).map(Some)
        }
    }
}

/// Parses the command line, runs it, writes the artifact; returns the
/// rendered output and where it went.
pub fn run(cli: &Cli) -> Result<(String, Option<PathBuf>)> {
    let cfg = load_config(&cli.config)?;
    let work = || execute(&cli.command, cfg.as_ref(), cli.strict_paper);
    let artifact = match cli.threads {
        Some(0) => return Err(Error::Config {
            line: None,
            field: Some("threads".into()),
            message: "--threads must be >= 1".into(),
        }),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let format = match cli.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cfg.as_ref().and_then(|c| c.format).unwrap_or(artifact.default_format()),
    };
    let text = artifact.render(format);
    let out = cli.out.clone().or_else(|| cfg.as_ref().and_then(|c| c.output.clone()));
    if let Some(path) = &out {
        std::fs::write(path, &text)?;
    }
    Ok((text, out))
}

/// Process entry point; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok((text, None)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Ok((_, Some(_))) => 0,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            e.exit_code()
        }
    }
}
