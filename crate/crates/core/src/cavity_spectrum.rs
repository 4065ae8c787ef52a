// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Radiation-pressure force spectrum and the optomechanical cooling rates.
//!
//! Spectra are reported multiplied by x_ZPF²/ħ², so they are rates in MHz.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, correlation_spectrum, steady_state, Dissipator};
use crate::operators::annihilation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityDrive {
    #[serde(rename = "Delta_c")]
    pub delta_c: f64,
    pub kappa: f64,
    /// Linearized optomechanical coupling.
    #[serde(rename = "G_o")]
    pub g_o: f64,
}

impl CavityDrive {
    pub fn new(delta_c: f64, kappa: f64, g_o: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::domain(format!("kappa must be > 0, got {kappa}")));
        }
        if !delta_c.is_finite() || !g_o.is_finite() {
            return Err(Error::domain("Delta_c and G_o must be finite"));
        }
        Ok(CavityDrive { delta_c, kappa, g_o })
    }

    fn lorentzian(&self, w: f64) -> f64 {
        self.kappa / ((w + self.delta_c).powi(2) + self.kappa * self.kappa / 4.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CavityRates {
    #[serde(rename = "Gamma_o_minus")]
    pub minus: f64,
    #[serde(rename = "Gamma_o_plus")]
    pub plus: f64,
    #[serde(rename = "Gamma_o")]
    pub net: f64,
}

impl CavityRates {
    pub fn zero() -> Self {
        Self::default()
    }
}

/// S_FF(ω) = G_o² κ / ((ω + Δ_c)² + κ²/4).
pub fn force_spectrum(c: &CavityDrive, omegas: &[f64]) -> Vec<f64> {
    omegas.iter().map(|&w| c.g_o * c.g_o * c.lorentzian(w)).collect()
}

/// Γ_o⁻ = S_FF(Ω), Γ_o⁺ = S_FF(-Ω).
pub fn cavity_rates(omega: f64, c: &CavityDrive) -> Result<CavityRates> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("Omega must be > 0, got {omega}")));
    }
    let s = force_spectrum(c, &[omega, -omega]);
    Ok(CavityRates {
        minus: s[0],
        plus: s[1],
        net: s[0] - s[1],
    })
}

/// Occupancy limit -(4(Ω+Δ_c)² + κ²)/(16 Ω Δ_c) of optomechanical cooling.
pub fn cavity_quantum_limit(omega: f64, c: &CavityDrive) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("Omega must be > 0, got {omega}")));
    }
    if !(c.delta_c < 0.0) {
        let rate = c.g_o * c.g_o * (c.lorentzian(omega) - c.lorentzian(-omega));
        return Err(Error::HeatingRegime { rate });
    }
    let s = omega + c.delta_c;
    Ok(-(4.0 * s * s + c.kappa * c.kappa) / (16.0 * omega * c.delta_c))
}

/// Detuning -√(Ω² + κ²/4) that minimizes the cavity occupancy limit.
pub fn optimal_detuning(omega: f64, kappa: f64) -> Result<f64> {
    if !(omega > 0.0 && kappa > 0.0) {
        return Err(Error::domain("Omega and kappa must be > 0"));
    }
    Ok(-(omega * omega + kappa * kappa / 4.0).sqrt())
}

/// Minimum occupancy limit ½(√(1 + (κ/2Ω)²) - 1).
pub fn minimum_cavity_limit(omega: f64, kappa: f64) -> Result<f64> {
    if !(omega > 0.0 && kappa > 0.0) {
        return Err(Error::domain("Omega and kappa must be > 0"));
    }
    let r = kappa / (2.0 * omega);
    // same value, without the cancellation at small r
    Ok(0.5 * r * r / ((1.0 + r * r).sqrt() + 1.0))
}

/// Force spectrum of a laser-driven damped cavity from its Liouvillian.
///
/// The cavity is driven with amplitude `eta` in the laser frame; the Fock
/// cutoff follows the coherent amplitude. Returns G_o² · 2 Re S(ω), S being
/// the half-sided spectrum of a + a†.
pub fn oracle_force_spectrum(c: &CavityDrive, eta: f64, omegas: &[f64]) -> Result<Vec<f64>> {
    let alpha = eta / num_complex::Complex64::new(c.delta_c, c.kappa / 2.0);
    let n_mean = alpha.norm_sqr();
    let n_cut = (n_mean + 8.0 * n_mean.sqrt() + 12.0).ceil() as usize;
    let a = annihilation(n_cut)?;
    let h = &(&a.dag() * &a).scale(-c.delta_c) + &(&a + &a.dag()).scale(eta);
    let l = build_liouvillian(h, vec![Dissipator::new(a.clone(), c.kappa)?])?;
    let rho = steady_state(&l)?;
    let leak = rho.top_level_population(0);
    if leak > 1e-10 {
        return Err(Error::Cutoff {
            subsystem: "cavity",
            leakage: leak,
            limit: 1e-10,
        });
    }
    let x = &a + &a.dag();
    let s = correlation_spectrum(&l, &rho, &x, omegas)?;
    Ok(s.iter().map(|z| 2.0 * c.g_o * c.g_o * z.re).collect())
}
