// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameter records shared by every module.
//!
//! All frequencies and rates are angular frequencies in MHz with hbar = 1;
//! times are in microseconds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical rates and frequencies of the hybrid qubit / cavity / mechanics
/// system. Serialized names follow the config-file keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Mechanical frequency.
    #[serde(rename = "Omega")]
    pub omega_m: f64,
    /// Qubit transition frequency. Zero means "not specified".
    #[serde(rename = "omega_q")]
    pub omega_q: f64,
    /// Qubit drive detuning, drive minus qubit frequency.
    #[serde(rename = "Delta_q")]
    pub delta_q: f64,
    /// Qubit drive amplitude.
    #[serde(rename = "Omega_R")]
    pub rabi: f64,
    /// Charge/flux mixing angle of the qubit eigenbasis.
    #[serde(rename = "phi")]
    pub phi: f64,
    /// Bare qubit-mechanics coupling.
    #[serde(rename = "g")]
    pub g: f64,
    /// Single-photon optomechanical coupling.
    #[serde(rename = "g_o")]
    pub g_o: f64,
    /// Laser detuning from the cavity, laser minus cavity frequency.
    #[serde(rename = "Delta_c")]
    pub delta_c: f64,
    /// Laser drive amplitude.
    #[serde(rename = "eta")]
    pub eta: f64,
    /// Qubit relaxation rate.
    #[serde(rename = "Gamma")]
    pub qubit_relax: f64,
    /// Qubit dephasing rate.
    #[serde(rename = "Gamma_d")]
    pub qubit_dephase: f64,
    /// Mechanical damping rate.
    #[serde(rename = "gamma")]
    pub mech_damping: f64,
    /// Cavity energy decay rate.
    #[serde(rename = "kappa")]
    pub kappa: f64,
    /// Mechanical bath occupancy.
    #[serde(rename = "n_th")]
    pub n_th: f64,
    /// Qubit bath occupancy.
    #[serde(rename = "n_q")]
    pub n_q: f64,
}

/// Config-file names of the [`SystemParams`] fields, in declaration order.
pub const FIELD_NAMES: [&str; 15] = [
    "Omega", "omega_q", "Delta_q", "Omega_R", "phi", "g", "g_o", "Delta_c", "eta", "Gamma",
    "Gamma_d", "gamma", "kappa", "n_th", "n_q",
];

impl SystemParams {
    /// Values shared by the cooling figures: Omega = 10 MHz, G-side qubit
    /// at the optimal red-detuned drive, Gamma = 2 MHz, Gamma_d = 0.01 Gamma,
    /// gamma = 1e-5 MHz, n_th = 1e3, resolved-sideband cavity.
    pub fn figure_defaults() -> Self {
        SystemParams {
            omega_m: 10.0,
            omega_q: 0.0,
            delta_q: -5.3,
            rabi: 8.5,
            phi: 0.0,
            g: 0.0,
            g_o: 0.0,
            delta_c: -10.0,
            eta: 0.0,
            qubit_relax: 2.0,
            qubit_dephase: 0.02,
            mech_damping: 1e-5,
            kappa: 1.0,
            n_th: 1e3,
            n_q: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("Omega", self.omega_m),
            ("Gamma", self.qubit_relax),
            ("gamma", self.mech_damping),
            ("kappa", self.kappa),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config_field(name, format!("{name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("n_th", self.n_th),
            ("n_q", self.n_q),
            ("Omega_R", self.rabi),
            ("Gamma_d", self.qubit_dephase),
            ("omega_q", self.omega_q),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config_field(name, format!("{name} must be >= 0, got {v}")));
            }
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        if !(self.phi > -half_pi && self.phi <= half_pi) {
            return Err(Error::config_field(
                "phi",
                format!("phi must lie in (-pi/2, pi/2], got {}", self.phi),
            ));
        }
        for (name, v) in [
            ("Delta_q", self.delta_q),
            ("g", self.g),
            ("g_o", self.g_o),
            ("Delta_c", self.delta_c),
            ("eta", self.eta),
        ] {
            if !v.is_finite() {
                return Err(Error::config_field(name, format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn get(&self, field: &str) -> Option<f64> {
        Some(match field {
            "Omega" => self.omega_m,
            "omega_q" => self.omega_q,
            "Delta_q" => self.delta_q,
            "Omega_R" => self.rabi,
            "phi" => self.phi,
            "g" => self.g,
            "g_o" => self.g_o,
            "Delta_c" => self.delta_c,
            "eta" => self.eta,
            "Gamma" => self.qubit_relax,
            "Gamma_d" => self.qubit_dephase,
            "gamma" => self.mech_damping,
            "kappa" => self.kappa,
            "n_th" => self.n_th,
            "n_q" => self.n_q,
            _ => return None,
        })
    }

    /// Sets a field by its config name. Returns `false` for unknown names.
    pub fn set(&mut self, field: &str, value: f64) -> bool {
        let slot = match field {
            "Omega" => &mut self.omega_m,
            "omega_q" => &mut self.omega_q,
            "Delta_q" => &mut self.delta_q,
            "Omega_R" => &mut self.rabi,
            "phi" => &mut self.phi,
            "g" => &mut self.g,
            "g_o" => &mut self.g_o,
            "Delta_c" => &mut self.delta_c,
            "eta" => &mut self.eta,
            "Gamma" => &mut self.qubit_relax,
            "Gamma_d" => &mut self.qubit_dephase,
            "gamma" => &mut self.mech_damping,
            "kappa" => &mut self.kappa,
            "n_th" => &mut self.n_th,
            "n_q" => &mut self.n_q,
            _ => return false,
        };
        *slot = value;
        true
    }
}

/// Displaced-frame parameters entering the linearized hybrid Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveParams {
    /// Effective qubit-mechanics coupling.
    #[serde(rename = "G")]
    pub g_eff: f64,
    /// Linearized optomechanical coupling (signed real, see [`crate::device::effective_couplings`]).
    #[serde(rename = "G_o")]
    pub g_o_eff: f64,
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub beta: Complex64,
    #[serde(rename = "Delta_q_shifted")]
    pub delta_q_shifted: f64,
    #[serde(rename = "Delta_c_shifted")]
    pub delta_c_shifted: f64,
    /// Drive amplitude in the qubit eigenbasis, Omega_R cos(phi).
    #[serde(rename = "Omega_R_eff")]
    pub rabi_eff: f64,
    #[serde(rename = "sigma_z_ss")]
    pub sigma_z_ss: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

impl EffectiveParams {
    /// Effective parameters with the couplings set directly instead of being
    /// derived from the drive. The cavity is undisplaced; the mechanical
    /// displacement is the one produced by the mean qubit force `G <sigma_z>`
    /// alone, so the displaced-frame linear terms still cancel.
    pub fn direct(p: &SystemParams, g_eff: f64, g_o_eff: f64, sigma_z_ss: f64) -> Self {
        let beta = -Complex64::new(g_eff * sigma_z_ss, 0.0)
            / Complex64::new(p.omega_m, -p.mech_damping / 2.0);
        EffectiveParams {
            g_eff,
            g_o_eff,
            alpha: Complex64::new(0.0, 0.0),
            beta,
            delta_q_shifted: p.delta_q,
            delta_c_shifted: p.delta_c,
            rabi_eff: p.rabi * p.phi.cos(),
            sigma_z_ss,
        }
    }
}

/// Fock-space truncation of the cavity and mechanical modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoffs {
    #[serde(rename = "N_a")]
    pub cavity: usize,
    #[serde(rename = "N_b")]
    pub mechanics: usize,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Cutoffs {
            cavity: 3,
            mechanics: 8,
        }
    }
}
