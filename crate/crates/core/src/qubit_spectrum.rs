// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Driven, damped qubit: steady inversion, σz noise spectrum and the
//! phonon transition rates it induces.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, correlation_spectrum, steady_state, Dissipator, Liouvillian};
use crate::operators::{sigma_minus, sigma_plus, sigma_x, sigma_z, Operator};
use crate::params::SystemParams;

/// Drive and bath parameters of the qubit in the frame of the drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitDrive {
    #[serde(rename = "Delta_q")]
    pub delta_q: f64,
    #[serde(rename = "Omega_R")]
    pub rabi: f64,
    #[serde(rename = "Gamma")]
    pub relax: f64,
    #[serde(rename = "Gamma_d")]
    pub dephase: f64,
    pub n_q: f64,
}

impl QubitDrive {
    pub fn new(delta_q: f64, rabi: f64, relax: f64, dephase: f64, n_q: f64) -> Result<Self> {
        let d = QubitDrive {
            delta_q,
            rabi,
            relax,
            dephase,
            n_q,
        };
        d.validate()?;
        Ok(d)
    }

    /// Qubit drive as seen by the hybrid model: amplitude Ω_R cos φ.
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        Self::new(
            p.delta_q,
            p.rabi * p.phi.cos(),
            p.qubit_relax,
            p.qubit_dephase,
            p.n_q,
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("Omega_R", self.rabi),
            ("Gamma", self.relax),
            ("Gamma_d", self.dephase),
            ("n_q", self.n_q),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !self.delta_q.is_finite() {
            return Err(Error::domain("Delta_q must be finite"));
        }
        Ok(())
    }

    /// Generalized Rabi frequency √(Ω_R² + Δ_q²).
    pub fn delta_bar(&self) -> f64 {
        self.rabi.hypot(self.delta_q)
    }

    /// H = -Δ_q/2 σz + Ω_R/2 σx.
    pub fn hamiltonian(&self) -> Operator {
        &sigma_z().scale(-self.delta_q / 2.0) + &sigma_x().scale(self.rabi / 2.0)
    }

    /// Relaxation Γ(n_q+1) D[σ-] + Γ n_q D[σ+] and dephasing (Γ_d/2) D[σz].
    pub fn dissipators(&self) -> Vec<Dissipator> {
        vec![
            Dissipator::new(sigma_minus(), self.relax * (self.n_q + 1.0)).expect("validated"),
            Dissipator::new(sigma_plus(), self.relax * self.n_q).expect("validated"),
            Dissipator::new(sigma_z(), self.dephase / 2.0).expect("validated"),
        ]
    }

    pub fn liouvillian(&self) -> Result<Liouvillian> {
        build_liouvillian(self.hamiltonian(), self.dissipators())
    }
}

/// Phonon transition rates induced by the qubit at mechanical frequency Ω.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct QubitRates {
    /// Phonon absorption rate.
    #[serde(rename = "Gamma_q_minus")]
    pub minus: f64,
    /// Phonon emission rate.
    #[serde(rename = "Gamma_q_plus")]
    pub plus: f64,
    /// Net cooling rate, minus - plus.
    #[serde(rename = "Gamma_q")]
    pub net: f64,
    /// Coherent shift of the mechanical frequency, Ω' - Ω.
    #[serde(rename = "Omega_shift")]
    pub omega_shift: f64,
}

impl QubitRates {
    pub fn zero() -> Self {
        Self::default()
    }
}

/// Steady-state ⟨σz⟩ from the Bloch equations.
pub fn qubit_steady_sigma_z(d: &QubitDrive) -> Result<f64> {
    d.validate()?;
    let g1 = d.relax * (2.0 * d.n_q + 1.0);
    let g2 = g1 / 2.0 + d.dephase;
    if g1 == 0.0 {
        if g2 == 0.0 || d.rabi == 0.0 {
            return Err(Error::Multiplicity {
                count: 2,
                tolerance: 0.0,
            });
        }
        return Ok(0.0);
    }
    let z0 = -1.0 / (2.0 * d.n_q + 1.0);
    let lorentz = g2 / (g2 * g2 + d.delta_q * d.delta_q);
    Ok(g1 * z0 / (g1 + d.rabi * d.rabi * lorentz))
}

/// Half-sided σz fluctuation spectrum S(ω), from the regression theorem.
pub fn qubit_noise_spectrum(d: &QubitDrive, omegas: &[f64]) -> Result<Vec<Complex64>> {
    let l = d.liouvillian()?;
    let rho = steady_state(&l)?;
    correlation_spectrum(&l, &rho, &sigma_z(), omegas)
}

/// Γ_q∓ = 2G² Re S(±Ω) and the shift 2G² Im[S(Ω) + S(-Ω)].
///
/// `strict_paper` drops the 2G² prefactor from the shift.
pub fn qubit_rates(g: f64, omega: f64, d: &QubitDrive, strict_paper: bool) -> Result<QubitRates> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("Omega must be > 0, got {omega}")));
    }
    if g == 0.0 {
        return Ok(QubitRates::zero());
    }
    let s = qubit_noise_spectrum(d, &[omega, -omega])?;
    let pref = 2.0 * g * g;
    let minus = pref * s[0].re;
    let plus = pref * s[1].re;
    let im = s[0].im + s[1].im;
    Ok(QubitRates {
        minus,
        plus,
        net: minus - plus,
        omega_shift: if strict_paper { im } else { pref * im },
    })
}

/// f(x) = 4x²√(1-x²)/(4-x⁴), x = Ω_R/Δ̄_q.
pub fn f_function(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("f is defined on [0, 1], got {x}")));
    }
    let x2 = x * x;
    Ok(4.0 * x2 * (1.0 - x2).sqrt() / (4.0 - x2 * x2))
}

/// Location and value of the maximum of f by golden-section search.
pub fn f_argmax() -> (f64, f64) {
    let f = |x: f64| f_function(x).expect("inside [0, 1]");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while b - a > 1e-12 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalDrive {
    #[serde(rename = "Omega_R")]
    pub rabi: f64,
    #[serde(rename = "Delta_q")]
    pub delta_q: f64,
    /// Γ_q⁺/Γ_q at the optimum.
    #[serde(rename = "n_min")]
    pub n_min: f64,
    #[serde(rename = "f_max")]
    pub f_max: f64,
}

/// Drive that maximizes f with the generalized Rabi frequency on the
/// mechanical resonance, Δ̄_q = Ω, on the red side; the occupancy limit is
/// evaluated from the full spectrum with the given qubit damping.
pub fn optimal_drive(omega: f64, relax: f64, dephase: f64, n_q: f64) -> Result<OptimalDrive> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("Omega must be > 0, got {omega}")));
    }
    let (x, f_max) = f_argmax();
    let rabi = x * omega;
    let delta_q = -(omega * omega - rabi * rabi).sqrt();
    let drive = QubitDrive::new(delta_q, rabi, relax, dephase, n_q)?;
    // the limit is independent of G
    let rates = qubit_rates(1.0, omega, &drive, false)?;
    let n_min = qubit_quantum_limit(&rates)?;
    Ok(OptimalDrive {
        rabi,
        delta_q,
        n_min,
        f_max,
    })
}

/// Occupancy limit of qubit cooling, Γ_q⁺/Γ_q.
pub fn qubit_quantum_limit(rates: &QubitRates) -> Result<f64> {
    if !(rates.net > 0.0) {
        return Err(Error::HeatingRegime { rate: rates.net });
    }
    Ok(rates.plus / rates.net)
}
