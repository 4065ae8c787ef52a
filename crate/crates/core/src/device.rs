// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Device-level parameter maps and the steady-state displacements of the
//! cavity and mechanical modes.

use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{EffectiveParams, SystemParams};
use crate::qubit_spectrum::{qubit_steady_sigma_z, QubitDrive};

type C64 = Complex64;

/// Physical parameters of the Cooper-pair box and the movable capacitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DevicePhysical {
    #[serde(rename = "E_J")]
    pub e_j: f64,
    #[serde(rename = "C_J")]
    pub c_j: f64,
    #[serde(rename = "C_q")]
    pub c_q: f64,
    #[serde(rename = "C_x")]
    pub c_x: f64,
    /// Capacitor gap.
    pub d: f64,
    #[serde(rename = "N_x")]
    pub n_x: f64,
    #[serde(rename = "Delta_N")]
    pub delta_n: f64,
    #[serde(rename = "X_ZPF")]
    pub x_zpf: f64,
    /// Φ_ext/Φ_o.
    pub flux_ratio: f64,
    /// e²/2 in the chosen capacitance units, so that E_c = charge_scale/C_Σ.
    #[serde(default = "unit")]
    pub charge_scale: f64,
}

fn unit() -> f64 {
    1.0
}

impl DevicePhysical {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("C_J", self.c_j),
            ("C_q", self.c_q),
            ("C_x", self.c_x),
            ("d", self.d),
            ("X_ZPF", self.x_zpf),
            ("charge_scale", self.charge_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.delta_n.abs() < 0.5) {
            return Err(Error::domain(format!(
                "|Delta_N| must be < 0.5, got {}",
                self.delta_n
            )));
        }
        for (name, v) in [("E_J", self.e_j), ("N_x", self.n_x), ("flux_ratio", self.flux_ratio)] {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// C_Σ = 2C_J + C_q + C_x.
    pub fn total_capacitance(&self) -> f64 {
        2.0 * self.c_j + self.c_q + self.c_x
    }
}

/// E_c = e²/2C_Σ.
pub fn charging_energy(dev: &DevicePhysical) -> Result<f64> {
    for (name, v) in [("C_J", dev.c_j), ("C_q", dev.c_q), ("C_x", dev.c_x)] {
        if !(v > 0.0) {
            return Err(Error::domain(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(dev.charge_scale / dev.total_capacitance())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitBasis {
    pub epsilon: f64,
    pub omega_q: f64,
    pub phi: f64,
}

/// ε = 8E_cΔN, E_J(Φ) = E_J cos(πΦ_ext/Φ_o), tan φ = ε/E_J(Φ), ω_q = √(ε² + E_J(Φ)²).
pub fn qubit_basis_params(e_c: f64, delta_n: f64, e_j: f64, flux_ratio: f64) -> Result<QubitBasis> {
    let epsilon = 8.0 * e_c * delta_n;
    let e_j_eff = e_j * (std::f64::consts::PI * flux_ratio).cos();
    if e_j_eff.abs() <= f64::EPSILON * e_j.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateJunction);
    }
    Ok(QubitBasis {
        epsilon,
        omega_q: epsilon.hypot(e_j_eff),
        phi: (epsilon / e_j_eff).atan(),
    })
}

/// g = (4E_c X_ZPF/d)[N_x - ΔN C_x/C_Σ].
pub fn bare_coupling(dev: &DevicePhysical, e_c: f64) -> Result<f64> {
    if !(dev.d > 0.0) {
        return Err(Error::domain(format!("d must be > 0, got {}", dev.d)));
    }
    let bracket = dev.n_x - dev.delta_n * dev.c_x / dev.total_capacitance();
    Ok(4.0 * e_c * dev.x_zpf / dev.d * bracket)
}

/// Large-N_x form g ≈ 4E_c X_ZPF/(d N_x).
pub fn bare_coupling_large_nx(dev: &DevicePhysical, e_c: f64) -> Result<f64> {
    if !(dev.d > 0.0) {
        return Err(Error::domain(format!("d must be > 0, got {}", dev.d)));
    }
    if dev.n_x == 0.0 {
        return Err(Error::domain("N_x must be nonzero"));
    }
    Ok(4.0 * e_c * dev.x_zpf / (dev.d * dev.n_x))
}

/// Fills ω_q, φ and g of `p` from the device description (exact g).
pub fn apply_device(p: &SystemParams, dev: &DevicePhysical) -> Result<SystemParams> {
    dev.validate()?;
    let e_c = charging_energy(dev)?;
    let basis = qubit_basis_params(e_c, dev.delta_n, dev.e_j, dev.flux_ratio)?;
    let mut out = *p;
    out.omega_q = basis.omega_q;
    out.phi = basis.phi;
    out.g = bare_coupling(dev, e_c)?;
    Ok(out)
}

/// Qubit-mechanics coupling G(β) = g sin φ + (2g²/ω_q) cos²φ Re β.
fn qubit_coupling(p: &SystemParams, beta_re: f64) -> Result<f64> {
    let cos2 = p.phi.cos().powi(2);
    if p.g == 0.0 || cos2 == 0.0 {
        return Ok(p.g * p.phi.sin());
    }
    if !(p.omega_q > 0.0) {
        return Err(Error::domain("omega_q must be > 0 to evaluate the drive-induced coupling"));
    }
    Ok(p.g * p.phi.sin() + 2.0 * p.g * p.g / p.omega_q * cos2 * beta_re)
}

/// G = g sin φ + (2g²β/ω_q) cos²φ and G_o = g_o α.
///
/// G uses Re β. G_o is taken real: g_o|α| carrying the sign of Re α, which is
/// g_o α itself once the global cavity phase makes α real.
pub fn effective_couplings(p: &SystemParams, alpha: C64, beta: C64) -> Result<(f64, f64)> {
    if !(p.omega_q > 0.0) {
        return Err(Error::domain(format!("omega_q must be > 0, got {}", p.omega_q)));
    }
    let g = qubit_coupling(p, beta.re)?;
    let sign = if alpha.re < 0.0 { -1.0 } else { 1.0 };
    Ok((g, p.g_o * alpha.norm() * sign))
}

/// Reading of the drive-frame qubit detuning shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningShift {
    /// Δ_q - (4g²β/ω_q) cos²φ |β|² - 2gβ sin φ.
    #[default]
    Printed,
    /// Δ_q - (4g²/ω_q) cos²φ β - 2gβ sin φ.
    Linear,
}

/// Displaced-frame detunings (Δ_q, Δ_c) for a real mechanical displacement.
pub fn shifted_detunings(p: &SystemParams, beta: C64, mode: DetuningShift) -> Result<(f64, f64)> {
    let b = beta.re;
    let cos2 = p.phi.cos().powi(2);
    let mut dq = p.delta_q - 2.0 * p.g * b * p.phi.sin();
    if p.g != 0.0 && cos2 != 0.0 {
        if !(p.omega_q > 0.0) {
            return Err(Error::domain("omega_q must be > 0 to shift Delta_q"));
        }
        let k = 4.0 * p.g * p.g / p.omega_q * cos2;
        dq -= match mode {
            DetuningShift::Printed => k * b * beta.norm_sqr(),
            DetuningShift::Linear => k * b,
        };
    }
    Ok((dq, p.delta_c - 2.0 * p.g_o * b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementOptions {
    pub relaxation: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Hold G fixed instead of evaluating G(β).
    pub fixed_g: Option<f64>,
    /// Number of η² steps used by the continuation fallback.
    pub continuation_steps: usize,
}

impl Default for DisplacementOptions {
    fn default() -> Self {
        DisplacementOptions {
            relaxation: 0.5,
            max_iterations: 10_000,
            tolerance: 1e-12,
            fixed_g: None,
            continuation_steps: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Displacements {
    #[serde(serialize_with = "ser_c64")]
    pub alpha: C64,
    #[serde(serialize_with = "ser_c64")]
    pub beta: C64,
    /// G at the fixed point.
    #[serde(rename = "G")]
    pub g_eff: f64,
    /// Re β of every real root of the eliminated cubic, ascending.
    pub branches: Vec<f64>,
    /// Whether the damped iteration converged (otherwise continuation selected the branch).
    pub iterated: bool,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

/// Reduced real equation for x = 2 Re β:
/// ((1 + k s1) x + k s0) Q(x) + k g_o η² = 0, Q(x) = (Δ_c - g_o x)² + κ²/4.
struct Reduced {
    k: f64,
    s0: f64,
    s1: f64,
    g_o: f64,
    delta_c: f64,
    kappa: f64,
    eta2: f64,
}

impl Reduced {
    fn new(p: &SystemParams, sigma_z: f64, fixed_g: Option<f64>) -> Result<Self> {
        let (s0, s1) = match fixed_g {
            Some(g) => (g * sigma_z, 0.0),
            None => {
                let cos2 = p.phi.cos().powi(2);
                let s1 = if p.g == 0.0 || cos2 == 0.0 {
                    0.0
                } else if p.omega_q > 0.0 {
                    p.g * p.g * cos2 * sigma_z / p.omega_q
                } else {
                    return Err(Error::domain(
                        "omega_q must be > 0 to evaluate the drive-induced coupling",
                    ));
                };
                (p.g * p.phi.sin() * sigma_z, s1)
            }
        };
        let gm = p.mech_damping / 2.0;
        Ok(Reduced {
            k: 2.0 * p.omega_m / (p.omega_m * p.omega_m + gm * gm),
            s0,
            s1,
            g_o: p.g_o,
            delta_c: p.delta_c,
            kappa: p.kappa,
            eta2: p.eta * p.eta,
        })
    }

    fn q(&self, x: f64) -> f64 {
        (self.delta_c - self.g_o * x).powi(2) + self.kappa * self.kappa / 4.0
    }

    fn value(&self, x: f64, eta2: f64) -> f64 {
        ((1.0 + self.k * self.s1) * x + self.k * self.s0) * self.q(x) + self.k * self.g_o * eta2
    }

    fn derivative(&self, x: f64) -> f64 {
        let lin = (1.0 + self.k * self.s1) * x + self.k * self.s0;
        let dq = -2.0 * self.g_o * (self.delta_c - self.g_o * x);
        (1.0 + self.k * self.s1) * self.q(x) + lin * dq
    }

    /// Scale for relative residuals.
    fn magnitude(&self, x: f64, eta2: f64) -> f64 {
        let lin = ((1.0 + self.k * self.s1) * x).abs() + (self.k * self.s0).abs();
        (lin * self.q(x)).max((self.k * self.g_o * eta2).abs()).max(f64::MIN_POSITIVE)
    }

    /// Coefficients c3 x³ + c2 x² + c1 x + c0.
    fn coefficients(&self, eta2: f64) -> [f64; 4] {
        let a1 = 1.0 + self.k * self.s1;
        let a0 = self.k * self.s0;
        let q2 = self.g_o * self.g_o;
        let q1 = -2.0 * self.delta_c * self.g_o;
        let q0 = self.delta_c * self.delta_c + self.kappa * self.kappa / 4.0;
        [
            a0 * q0 + self.k * self.g_o * eta2,
            a1 * q0 + a0 * q1,
            a1 * q1 + a0 * q2,
            a1 * q2,
        ]
    }

    fn newton(&self, mut x: f64, eta2: f64) -> Option<f64> {
        for _ in 0..100 {
            let f = self.value(x, eta2);
            let df = self.derivative(x);
            if df == 0.0 || !df.is_finite() {
                return None;
            }
            let dx = f / df;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1e-300) {
                break;
            }
        }
        let rel = self.value(x, eta2).abs() / self.magnitude(x, eta2);
        (rel < 1e-10).then_some(x)
    }

    /// All real roots, ascending.
    fn real_roots(&self, eta2: f64) -> Result<Vec<f64>> {
        let c = self.coefficients(eta2);
        let mut roots = Vec::new();
        if c[3] == 0.0 {
            // linear (g_o = 0)
            if c[1] != 0.0 {
                roots.push(-c[0] / c[1]);
            }
            return Ok(roots);
        }
        let mut comp = Array2::<f64>::zeros((3, 3));
        comp[[0, 0]] = -c[2] / c[3];
        comp[[0, 1]] = -c[1] / c[3];
        comp[[0, 2]] = -c[0] / c[3];
        comp[[1, 0]] = 1.0;
        comp[[2, 1]] = 1.0;
        let (ev, _) = comp.eig()?;
        for z in ev.iter() {
            if z.im.abs() <= 1e-7 * z.norm().max(1e-12) {
                let x = self.newton(z.re, eta2).unwrap_or(z.re);
                if !roots.iter().any(|r: &f64| (r - x).abs() <= 1e-9 * x.abs().max(1e-12)) {
                    roots.push(x);
                }
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(roots)
    }
}

fn alpha_of(p: &SystemParams, beta_re: f64) -> C64 {
    C64::new(p.eta, 0.0) / C64::new(p.delta_c - 2.0 * p.g_o * beta_re, p.kappa / 2.0)
}

fn beta_of(p: &SystemParams, alpha: C64, g: f64, sigma_z: f64) -> C64 {
    C64::new(p.g_o * alpha.norm_sqr() + g * sigma_z, 0.0)
        / C64::new(-p.omega_m, p.mech_damping / 2.0)
}

/// Self-consistent (α, β) and all real branches of the reduced cubic.
pub fn steady_displacements(
    p: &SystemParams,
    sigma_z: f64,
    opts: &DisplacementOptions,
) -> Result<Displacements> {
    if !(p.omega_m > 0.0) {
        return Err(Error::domain("Omega must be > 0"));
    }
    if !(-1.0..=1.0).contains(&sigma_z) {
        return Err(Error::domain(format!("<sigma_z> must lie in [-1, 1], got {sigma_z}")));
    }
    let reduced = Reduced::new(p, sigma_z, opts.fixed_g)?;
    let branches_x = reduced.real_roots(reduced.eta2)?;
    let coupling = |beta_re: f64| -> Result<f64> {
        match opts.fixed_g {
            Some(g) => Ok(g),
            None => qubit_coupling(p, beta_re),
        }
    };

    let finish = |beta_re_guess: f64, iterated: bool| -> Result<Displacements> {
        let alpha = alpha_of(p, beta_re_guess);
        let g = coupling(beta_re_guess)?;
        let beta = beta_of(p, alpha, g, sigma_z);
        Ok(Displacements {
            alpha,
            beta,
            g_eff: g,
            branches: branches_x.iter().map(|x| x / 2.0).collect(),
            iterated,
        })
    };

    // damped fixed-point iteration on β (α and G follow from β)
    let mut beta = C64::new(0.0, 0.0);
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let alpha = alpha_of(p, beta.re);
        let g = coupling(beta.re)?;
        let next = beta_of(p, alpha, g, sigma_z);
        residual = (next - beta).norm() / next.norm().max(1.0);
        beta = beta * (1.0 - opts.relaxation) + next * opts.relaxation;
        if !residual.is_finite() {
            break;
        }
        if residual < opts.tolerance {
            let x = reduced.newton(2.0 * beta.re, reduced.eta2).unwrap_or(2.0 * beta.re);
            return finish(x / 2.0, true);
        }
    }

    // continuation in η² from the undriven root
    let a1 = 1.0 + reduced.k * reduced.s1;
    if a1 == 0.0 {
        return Err(Error::Convergence {
            iterations: opts.max_iterations,
            residual,
        });
    }
    let mut x = -reduced.k * reduced.s0 / a1;
    let steps = opts.continuation_steps.max(1);
    for i in 1..=steps {
        let eta2 = reduced.eta2 * i as f64 / steps as f64;
        match reduced.newton(x, eta2) {
            Some(next) => x = next,
            None => {
                return Err(Error::Ambiguous {
                    branches: branches_x.iter().map(|x| x / 2.0).collect(),
                })
            }
        }
    }
    let mut dist: Vec<f64> = branches_x.iter().map(|r| (r - x).abs()).collect();
    dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = x.abs().max(1e-12);
    let unique = match dist.as_slice() {
        [] => false,
        [d0] => *d0 <= 1e-8 * scale,
        [d0, d1, ..] => *d0 <= 1e-8 * scale && *d1 > 1e-6 * scale,
    };
    if !unique {
        return Err(Error::Ambiguous {
            branches: branches_x.iter().map(|x| x / 2.0).collect(),
        });
    }
    finish(x / 2.0, false)
}

/// Net coefficients of a† and b† left in the displaced-frame generator,
/// Hamiltonian shifts plus the damping drift:
///
/// c_a = η + α(-Δ_c - iκ/2 + g_o(β+β*)),
/// c_b = g_o|α|² + G⟨σz⟩ + β(Ω - iγ/2).
pub fn residual_linear_terms(p: &SystemParams, alpha: C64, beta: C64, g: f64, sigma_z: f64) -> (C64, C64) {
    let c_a = C64::new(p.eta, 0.0)
        + alpha * C64::new(-p.delta_c + 2.0 * p.g_o * beta.re, -p.kappa / 2.0);
    let c_b = C64::new(p.g_o * alpha.norm_sqr() + g * sigma_z, 0.0)
        + beta * C64::new(p.omega_m, -p.mech_damping / 2.0);
    (c_a, c_b)
}

/// Options of the derivation pipeline from [`SystemParams`] to [`EffectiveParams`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeriveOptions {
    pub detuning_shift: DetuningShift,
    pub displacement: DisplacementOptions,
    /// Override for G.
    pub g_eff: Option<f64>,
    /// Override for G_o.
    pub g_o_eff: Option<f64>,
}

/// ⟨σz⟩ from the undisplaced qubit drive, then the displacements, couplings
/// and shifted detunings.
pub fn effective_params(p: &SystemParams, opts: &DeriveOptions) -> Result<EffectiveParams> {
    p.validate()?;
    let drive = QubitDrive::from_params(p)?;
    let sigma_z = qubit_steady_sigma_z(&drive)?;
    let mut disp_opts = opts.displacement;
    if opts.g_eff.is_some() {
        disp_opts.fixed_g = opts.g_eff;
    }
    let disp = steady_displacements(p, sigma_z, &disp_opts)?;
    let g_eff = disp.g_eff;
    let g_o_eff = match opts.g_o_eff {
        Some(v) => v,
        None => {
            let sign = if disp.alpha.re < 0.0 { -1.0 } else { 1.0 };
            p.g_o * disp.alpha.norm() * sign
        }
    };
    let (dq, dc) = shifted_detunings(p, disp.beta, opts.detuning_shift)?;
    Ok(EffectiveParams {
        g_eff,
        g_o_eff,
        alpha: disp.alpha,
        beta: disp.beta,
        delta_q_shifted: dq,
        delta_c_shifted: dc,
        rabi_eff: drive.rabi,
        sigma_z_ss: sigma_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn device() -> DevicePhysical {
        DevicePhysical {
            e_j: 8.0,
            c_j: 1.0,
            c_q: 1.0,
            c_x: 2.0,
            d: 2.0,
            n_x: 5.0,
            delta_n: 0.1,
            x_zpf: 0.01,
            flux_ratio: 0.0,
            charge_scale: 1.0,
        }
    }

    fn weak_drive_regime() -> SystemParams {
        let mut p = SystemParams::figure_defaults();
        p.g_o = 1e-3;
        p.eta = 50.0;
        p.kappa = 1.0;
        p.delta_c = -10.0;
        p.g = 0.05;
        p.phi = 0.3;
        p.omega_q = 1e4;
        p
    }

    #[test]
    fn charging_energy_values() {
        // C_Σ = 2 + 1 + 2
        assert_relative_eq!(charging_energy(&device()).unwrap(), 0.2);
        let mut unit_caps = device();
        unit_caps.c_x = 1.0;
        assert_relative_eq!(charging_energy(&unit_caps).unwrap(), 0.25);
        let mut doubled = unit_caps;
        doubled.c_j *= 2.0;
        doubled.c_q *= 2.0;
        doubled.c_x *= 2.0;
        assert_relative_eq!(charging_energy(&doubled).unwrap(), 0.125);
        let mut bad = unit_caps;
        bad.c_q = 0.0;
        assert!(charging_energy(&bad).is_err());
    }

    #[test]
    fn qubit_basis_values() {
        let b = qubit_basis_params(1.0, 0.0, 3.0, 0.0).unwrap();
        assert_eq!((b.epsilon, b.phi), (0.0, 0.0));
        assert_relative_eq!(b.omega_q, 3.0);
        // ε = E_J
        let b = qubit_basis_params(0.5, 0.25, 1.0, 0.0).unwrap();
        assert_relative_eq!(b.phi, std::f64::consts::FRAC_PI_4, max_relative = 1e-15);
        assert_relative_eq!(b.omega_q, 2f64.sqrt(), max_relative = 1e-15);
        // ε = 6, E_J = 8
        let b = qubit_basis_params(0.75, 1.0, 8.0, 0.0).unwrap();
        assert_relative_eq!(b.omega_q, 10.0, max_relative = 1e-15);
        assert_relative_eq!(b.phi, 0.75f64.atan(), max_relative = 1e-15);
        assert!(matches!(
            qubit_basis_params(1.0, 0.1, 2.0, 0.5),
            Err(Error::DegenerateJunction)
        ));
    }

    #[test]
    fn coupling_forms() {
        let mut dev = device();
        let e_c = charging_energy(&dev).unwrap();
        dev.delta_n = 0.0;
        assert_relative_eq!(
            bare_coupling(&dev, e_c).unwrap(),
            4.0 * e_c * dev.x_zpf * dev.n_x / dev.d,
            max_relative = 1e-15
        );
        let dev = device();
        let g = bare_coupling(&dev, e_c).unwrap();
        let hand = 4.0 * 0.2 * 0.01 / 2.0 * (5.0 - 0.1 * 2.0 / 5.0);
        assert_relative_eq!(g, hand, max_relative = 1e-15);
        let mut wide = dev;
        wide.x_zpf *= 2.0;
        assert_relative_eq!(bare_coupling(&wide, e_c).unwrap(), 2.0 * g, max_relative = 1e-15);
        assert_relative_eq!(
            bare_coupling_large_nx(&dev, e_c).unwrap(),
            4.0 * 0.2 * 0.01 / (2.0 * 5.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn apply_device_fills_qubit_fields() {
        let p = apply_device(&SystemParams::figure_defaults(), &device()).unwrap();
        let e_c = 0.2;
        let eps: f64 = 8.0 * e_c * 0.1;
        assert_relative_eq!(p.omega_q, eps.hypot(8.0), max_relative = 1e-15);
        assert_relative_eq!(p.phi, (eps / 8.0).atan(), max_relative = 1e-15);
        let mut bad = device();
        bad.delta_n = 0.5;
        assert!(apply_device(&SystemParams::figure_defaults(), &bad).is_err());
    }

    #[test]
    fn effective_coupling_values() {
        let mut p = SystemParams::figure_defaults();
        p.g = 0.1;
        p.phi = 0.2;
        p.omega_q = 1e4;
        p.g_o = 0.01;
        let zero = C64::new(0.0, 0.0);
        let (g, _) = effective_couplings(&p, zero, zero).unwrap();
        assert_relative_eq!(g, 0.1 * 0.2f64.sin(), max_relative = 1e-15);
        let (g, g_o) = effective_couplings(&p, C64::new(30.0, 0.0), C64::new(50.0, 0.0)).unwrap();
        let hand = 0.1 * 0.2f64.sin() + 2.0 * 0.01 * 50.0 / 1e4 * 0.2f64.cos().powi(2);
        assert_relative_eq!(g, hand, max_relative = 1e-14);
        assert_relative_eq!(g_o, 0.3, max_relative = 1e-15);
        p.phi = std::f64::consts::FRAC_PI_2;
        let (g, _) = effective_couplings(&p, zero, C64::new(50.0, 0.0)).unwrap();
        assert_relative_eq!(g, 0.1, max_relative = 1e-12);
        p.omega_q = 0.0;
        assert!(effective_couplings(&p, zero, zero).is_err());
    }

    #[test]
    fn undriven_displacements_vanish() {
        let mut p = weak_drive_regime();
        p.eta = 0.0;
        let d = steady_displacements(&p, 0.0, &DisplacementOptions::default()).unwrap();
        assert_eq!(d.alpha, C64::new(0.0, 0.0));
        assert!(d.beta.norm() < 1e-300);
    }

    #[test]
    fn decoupled_linear_solution() {
        let mut p = weak_drive_regime();
        p.g_o = 0.0;
        let opts = DisplacementOptions {
            fixed_g: Some(0.2),
            ..Default::default()
        };
        let d = steady_displacements(&p, -0.4, &opts).unwrap();
        let alpha = C64::new(p.eta, 0.0) / C64::new(p.delta_c, p.kappa / 2.0);
        let beta = C64::new(0.2 * -0.4, 0.0) / C64::new(-p.omega_m, p.mech_damping / 2.0);
        assert!((d.alpha - alpha).norm() < 1e-14 * alpha.norm());
        assert!((d.beta - beta).norm() < 1e-14 * beta.norm());
        assert_eq!(d.branches.len(), 1);
    }

    #[test]
    fn approximate_real_form_holds_at_weak_drive() {
        let p = weak_drive_regime();
        let sz = -0.3;
        let d = steady_displacements(&p, sz, &DisplacementOptions::default()).unwrap();
        let beta_approx = -(p.g_o * d.alpha.norm_sqr() + d.g_eff * sz) / p.omega_m;
        let alpha_approx = p.eta / (p.delta_c - 2.0 * p.g_o * d.beta.re);
        // neglected: (γ/2Ω)² for β, (κ/2Δ_c)² for |α|
        assert!((d.beta.re - beta_approx).abs() < 1e-8 * beta_approx.abs());
        assert!((d.alpha.norm() - alpha_approx.abs()).abs() < 0.01 * alpha_approx.abs());
        assert!(d.beta.im.abs() < 1e-5 * d.beta.re.abs());
    }

    #[test]
    fn bistable_branches_and_continuation() {
        // u((u + Δ_c)² + κ²/4) = k g_o² η² with u = -g_o x has three roots
        // for 0.75 < k g_o² η² < 4.25 at Δ_c = -3, κ = 1
        let mut p = SystemParams::figure_defaults();
        p.g_o = 0.05;
        p.kappa = 1.0;
        p.delta_c = -3.0;
        p.g = 0.0;
        let opts = DisplacementOptions {
            fixed_g: Some(0.0),
            ..Default::default()
        };
        let mut found_three = false;
        for eta in [20.0, 45.0, 60.0, 80.0, 120.0] {
            p.eta = eta;
            let reduced = Reduced::new(&p, 0.0, Some(0.0)).unwrap();
            let roots = reduced.real_roots(reduced.eta2).unwrap();
            for r in &roots {
                assert!(reduced.value(*r, reduced.eta2).abs() < 1e-10 * reduced.magnitude(*r, reduced.eta2));
            }
            if roots.len() == 3 {
                found_three = true;
                match steady_displacements(&p, 0.0, &opts) {
                    Ok(d) => {
                        assert_eq!(d.branches.len(), 3);
                        assert!(d.branches.iter().any(|b| (b - d.beta.re).abs() < 1e-8 * b.abs()));
                    }
                    Err(Error::Ambiguous { branches }) => assert_eq!(branches.len(), 3),
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(found_three);
    }

    #[test]
    fn residual_terms() {
        let p = weak_drive_regime();
        let sz = -0.3;
        let d = steady_displacements(&p, sz, &DisplacementOptions::default()).unwrap();
        let (ca, cb) = residual_linear_terms(&p, d.alpha, d.beta, d.g_eff, sz);
        let tol = 1e-8 * p.eta.max(p.omega_m);
        assert!(ca.norm() < tol && cb.norm() < tol);
        let (ca1, _) = residual_linear_terms(&p, d.alpha * 1.1, d.beta, d.g_eff, sz);
        let (ca2, _) = residual_linear_terms(&p, d.alpha * 1.2, d.beta, d.g_eff, sz);
        assert!(ca1.norm() > 0.0);
        assert_relative_eq!(ca2.norm(), 2.0 * ca1.norm(), max_relative = 1e-6);
        let zero = C64::new(0.0, 0.0);
        let mut q = p;
        q.eta = 0.0;
        assert_eq!(residual_linear_terms(&q, zero, zero, 0.0, 0.0), (zero, zero));
    }

    #[test]
    fn detuning_shift_readings() {
        let mut p = SystemParams::figure_defaults();
        p.g = 0.1;
        p.phi = 0.2;
        p.omega_q = 100.0;
        p.g_o = 0.01;
        let beta = C64::new(3.0, 0.0);
        let (dq_p, dc) = shifted_detunings(&p, beta, DetuningShift::Printed).unwrap();
        let (dq_l, _) = shifted_detunings(&p, beta, DetuningShift::Linear).unwrap();
        let k = 4.0 * 0.01 / 100.0 * 0.2f64.cos().powi(2);
        let lin = 2.0 * 0.1 * 3.0 * 0.2f64.sin();
        assert_relative_eq!(dq_p, p.delta_q - k * 27.0 - lin, max_relative = 1e-14);
        assert_relative_eq!(dq_l, p.delta_q - k * 3.0 - lin, max_relative = 1e-14);
        assert_relative_eq!(dc, p.delta_c - 0.06, max_relative = 1e-14);
    }

    #[test]
    fn pipeline_with_overrides() {
        let p = SystemParams::figure_defaults();
        let opts = DeriveOptions {
            g_eff: Some(0.2),
            g_o_eff: Some(0.06),
            ..Default::default()
        };
        let eff = effective_params(&p, &opts).unwrap();
        assert_eq!((eff.g_eff, eff.g_o_eff), (0.2, 0.06));
        let direct = EffectiveParams::direct(&p, 0.2, 0.06, eff.sigma_z_ss);
        assert!((eff.beta - direct.beta).norm() < 1e-12);
        assert_eq!(eff.delta_q_shifted, p.delta_q);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn fixed_point_residual_and_eta_symmetry(
            eta in 1.0f64..200.0,
            g_o in 1e-5f64..1e-3,
            delta_c in -30.0f64..-3.0,
            kappa in 0.01f64..1.0,
            sz in -1.0f64..0.0,
            g in 0.0f64..0.2,
        ) {
            let mut p = SystemParams::figure_defaults();
            p.eta = eta;
            p.g_o = g_o;
            p.delta_c = delta_c;
            p.kappa = kappa;
            p.g = g;
            p.phi = 0.4;
            p.omega_q = 5e3;
            let opts = DisplacementOptions::default();
            let d = steady_displacements(&p, sz, &opts).unwrap();
            let alpha = alpha_of(&p, d.beta.re);
            let beta = beta_of(&p, d.alpha, d.g_eff, sz);
            prop_assert!((alpha - d.alpha).norm() <= 1e-10 * d.alpha.norm());
            prop_assert!((beta - d.beta).norm() <= 1e-10 * d.beta.norm().max(1e-300));
            let reduced = Reduced::new(&p, sz, None).unwrap();
            for b in &d.branches {
                prop_assert!(reduced.value(2.0 * b, reduced.eta2).abs() <= 1e-10 * reduced.magnitude(2.0 * b, reduced.eta2));
            }
            let mut q = p;
            q.eta = -eta;
            let e = steady_displacements(&q, sz, &opts).unwrap();
            prop_assert!((e.alpha + d.alpha).norm() <= 1e-12 * d.alpha.norm());
            prop_assert!((e.beta - d.beta).norm() <= 1e-12 * d.beta.norm().max(1e-300));
        }
    }
}
