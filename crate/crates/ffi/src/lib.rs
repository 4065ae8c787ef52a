// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for the hybridcool library.
//!
//! Every entry point returns an [`HcStatus`]; results are written through
//! out-pointers. On failure the message of the last error on the calling
//! thread is available from [`hc_last_error_message`]. Objects are opaque and
//! released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hybridcool::cavity_spectrum::{cavity_quantum_limit, cavity_rates, CavityDrive};
use hybridcool::config::{parse_config, RunConfig};
use hybridcool::cooling_strong::{evolve_moments, moment_generator, steady_moments, MomentOptions, MomentState, MomentSystem};
use hybridcool::cooling_weak::{steady_phonon, CoolingBudget};
use hybridcool::qubit_spectrum::{optimal_drive, qubit_rates, QubitDrive};
use hybridcool::{EffectiveParams, Error, SystemParams};

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Convergence = 4,
    Physicality = 5,
    Cutoff = 6,
    Numerical = 7,
    Heating = 8,
    Panic = 9,
}

impl From<&Error> for HcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config { .. } => HcStatus::Config,
            Error::Convergence { .. } | Error::Ambiguous { .. } => HcStatus::Convergence,
            Error::Physicality(_) | Error::Unstable { .. } | Error::NotHermitian { .. } => HcStatus::Physicality,
            Error::Cutoff { .. } => HcStatus::Cutoff,
            Error::Multiplicity { .. } | Error::Solve(_) | Error::Integration { .. } => HcStatus::Numerical,
            Error::HeatingRegime { .. } | Error::Divergence { .. } => HcStatus::Heating,
            _ => HcStatus::InvalidArgument,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HcStatus, msg: impl Into<String>) -> HcStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard<F>(f: F) -> HcStatus
where
    F: FnOnce() -> Result<(), (HcStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HcStatus::Ok
        }
        Ok(Err((status, msg))) => fail(status, msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(HcStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn lib(e: Error) -> (HcStatus, String) {
    ((&e).into(), e.to_string())
}

fn null(name: &str) -> (HcStatus, String) {
    (HcStatus::NullPointer, format!("{name} is NULL"))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// System parameters plus optional coupling overrides.
pub struct HcParams {
    config: RunConfig,
}

/// Creates parameters holding the built-in figure values (Ω = 10 MHz,
/// G = 0.2 MHz, γ = 1e-5 MHz, n_th = 1e3).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_params_new_default(out: *mut *mut HcParams) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let h = Box::new(HcParams {
            config: RunConfig::figure_defaults(),
        });
        *out = Box::into_raw(h);
        Ok(())
    })
}

/// Parses a TOML configuration document.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_params_from_toml(text: *const c_char, out: *mut *mut HcParams) -> HcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (HcStatus::InvalidArgument, "text is not UTF-8".to_string()))?;
        let config = parse_config(s).map_err(lib)?;
        *out = Box::into_raw(Box::new(HcParams { config }));
        Ok(())
    })
}

/// Releases parameters. NULL is ignored.
///
/// # Safety
/// `h` must be NULL or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_params_free(h: *mut HcParams) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn field_name<'a>(field: *const c_char) -> Result<&'a str, (HcStatus, String)> {
    if field.is_null() {
        return Err(null("field"));
    }
    CStr::from_ptr(field)
        .to_str()
        .map_err(|_| (HcStatus::InvalidArgument, "field is not UTF-8".to_string()))
}

/// Reads a parameter by its config name ("Omega", "kappa", ..., or "G",
/// "G_o" for the coupling overrides; an unset override reads as NaN).
///
/// # Safety
/// `h` must be a live handle, `field` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_params_get(h: *const HcParams, field: *const c_char, out: *mut f64) -> HcStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let name = field_name(field)?;
        let v = match name {
            "G" => h.config.g_eff.unwrap_or(f64::NAN),
            "G_o" => h.config.g_o_eff.unwrap_or(f64::NAN),
            _ => h
                .config
                .params
                .get(name)
                .ok_or_else(|| (HcStatus::InvalidArgument, format!("unknown field `{name}`")))?,
        };
        *out = v;
        Ok(())
    })
}

/// Sets a parameter by its config name and revalidates; the handle is left
/// unchanged when validation fails. NaN clears the "G"/"G_o" overrides.
///
/// # Safety
/// `h` must be a live handle and `field` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hc_params_set(h: *mut HcParams, field: *const c_char, value: f64) -> HcStatus {
    guard(|| {
        let h = h.as_mut().ok_or_else(|| null("params"))?;
        let name = field_name(field)?;
        let mut next = h.config.clone();
        match name {
            "G" => next.g_eff = (!value.is_nan()).then_some(value),
            "G_o" => next.g_o_eff = (!value.is_nan()).then_some(value),
            _ => {
                if !next.params.set(name, value) {
                    return Err((HcStatus::InvalidArgument, format!("unknown field `{name}`")));
                }
                next.params.validate().map_err(lib)?;
            }
        }
        h.config = next;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HcOptimalDrive {
    pub rabi: f64,
    pub delta_q: f64,
    pub n_min: f64,
    pub f_max: f64,
}

/// Drive maximizing the qubit cooling rate and its occupancy limit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_optimal_drive(
    omega: f64,
    relax: f64,
    dephase: f64,
    n_q: f64,
    out: *mut HcOptimalDrive,
) -> HcStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let o = optimal_drive(omega, relax, dephase, n_q).map_err(lib)?;
        *out = HcOptimalDrive {
            rabi: o.rabi,
            delta_q: o.delta_q,
            n_min: o.n_min,
            f_max: o.f_max,
        };
        Ok(())
    })
}

/// Cooling and heating rates of one channel.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HcRates {
    pub minus: f64,
    pub plus: f64,
    pub net: f64,
}

/// Phonon occupancy limit of cavity cooling for Δ_c < 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_cavity_quantum_limit(omega: f64, delta_c: f64, kappa: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = CavityDrive::new(delta_c, kappa, 1.0).map_err(lib)?;
        *out = cavity_quantum_limit(omega, &c).map_err(lib)?;
        Ok(())
    })
}

fn coupling(h: &HcParams, which: &str) -> Result<f64, (HcStatus, String)> {
    let v = match which {
        "G" => h.config.g_eff,
        _ => h.config.g_o_eff,
    };
    v.ok_or_else(|| (HcStatus::InvalidArgument, format!("{which} is not set")))
}

/// Weak-coupling rates of the qubit and cavity channels with the couplings
/// "G" and "G_o" of `h` (G_o = 0 when unset).
///
/// # Safety
/// `h` must be a live handle; `qubit` and `cavity` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_rates(h: *const HcParams, strict_paper: bool, qubit: *mut HcRates, cavity: *mut HcRates) -> HcStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("params"))?;
        let q = qubit.as_mut().ok_or_else(|| null("qubit"))?;
        let c = cavity.as_mut().ok_or_else(|| null("cavity"))?;
        let b = budget(h, strict_paper)?;
        *q = HcRates {
            minus: b.qubit.minus,
            plus: b.qubit.plus,
            net: b.qubit.net,
        };
        *c = HcRates {
            minus: b.cavity.minus,
            plus: b.cavity.plus,
            net: b.cavity.net,
        };
        Ok(())
    })
}

fn budget(h: &HcParams, strict_paper: bool) -> Result<CoolingBudget, (HcStatus, String)> {
    let p = &h.config.params;
    let g = coupling(h, "G")?;
    let g_o = h.config.g_o_eff.unwrap_or(0.0);
    let drive = QubitDrive::from_params(p).map_err(lib)?;
    let q = qubit_rates(g, p.omega_m, &drive, strict_paper).map_err(lib)?;
    let c = cavity_rates(p.omega_m, &CavityDrive::new(p.delta_c, p.kappa, g_o).map_err(lib)?).map_err(lib)?;
    CoolingBudget::new(p.mech_damping, p.n_th, q, c).map_err(lib)
}

/// Steady phonon number of the weak-coupling rate equation.
///
/// # Safety
/// `h` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_steady_phonon(h: *const HcParams, strict_paper: bool, out: *mut f64) -> HcStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("params"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = steady_phonon(&budget(h, strict_paper)?, strict_paper).map_err(lib)?;
        Ok(())
    })
}

/// Second-moment equations of the cavity and mechanics.
pub struct HcMomentSystem {
    system: MomentSystem,
}

/// Builds the moment equations from `h` with qubit coupling "G" and
/// optomechanical coupling "G_o" (both required).
///
/// # Safety
/// `h` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_moment_system_new(
    h: *const HcParams,
    strict_paper: bool,
    out: *mut *mut HcMomentSystem,
) -> HcStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p: &SystemParams = &h.config.params;
        let g = coupling(h, "G")?;
        let g_o = coupling(h, "G_o")?;
        let drive = QubitDrive::from_params(p).map_err(lib)?;
        let rates = qubit_rates(g, p.omega_m, &drive, strict_paper).map_err(lib)?;
        let eff = EffectiveParams::direct(p, g, g_o, 0.0);
        let system = moment_generator(p, &eff, &rates, true).map_err(lib)?;
        *out = Box::into_raw(Box::new(HcMomentSystem { system }));
        Ok(())
    })
}

/// Releases a moment system. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_moment_system_free(s: *mut HcMomentSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// ⟨b†b⟩ at `n_times` times, starting from the vacuum cavity and a thermal
/// mechanical state with occupancy `n_b0`.
///
/// # Safety
/// `s` must be live; `times` and `out_n_b` must each hold `n_times` doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_moment_evolve(
    s: *const HcMomentSystem,
    n_b0: f64,
    times: *const f64,
    n_times: usize,
    out_n_b: *mut f64,
) -> HcStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("system"))?;
        if n_times == 0 {
            return Err((HcStatus::InvalidArgument, "n_times is 0".into()));
        }
        if times.is_null() {
            return Err(null("times"));
        }
        if out_n_b.is_null() {
            return Err(null("out_n_b"));
        }
        let ts = std::slice::from_raw_parts(times, n_times);
        let tr = evolve_moments(&s.system, &MomentState::thermal_mechanics(n_b0), ts, &MomentOptions::default())
            .map_err(lib)?;
        let out = std::slice::from_raw_parts_mut(out_n_b, n_times);
        for (o, m) in out.iter_mut().zip(&tr.states) {
            *o = m.n_b;
        }
        Ok(())
    })
}

/// Steady ⟨b†b⟩ of the moment equations.
///
/// # Safety
/// `s` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_moment_steady(s: *const HcMomentSystem, out: *mut f64) -> HcStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("system"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = steady_moments(&s.system).map_err(lib)?.n_b;
        Ok(())
    })
}
