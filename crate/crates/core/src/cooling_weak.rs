// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Weak-coupling phonon rate equation, its steady state, and the full
//! qubit-cavity-mechanics master equation used to check it.

use rayon::prelude::*;
use serde::Serialize;

use crate::cavity_spectrum::{cavity_rates, CavityDrive, CavityRates};
use crate::device::residual_linear_terms;
use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, steady_state, Dissipator};
use crate::operators::{hybrid_hamiltonian, HamiltonianOptions, HybridSpace, Operator, Subsystem};
use crate::params::{Cutoffs, EffectiveParams, SystemParams};
use crate::qubit_spectrum::{qubit_rates, QubitDrive, QubitRates};

/// Incoherent rates acting on the mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingBudget {
    pub gamma: f64,
    pub n_th: f64,
    pub qubit: QubitRates,
    pub cavity: CavityRates,
}

impl CoolingBudget {
    pub fn new(gamma: f64, n_th: f64, qubit: QubitRates, cavity: CavityRates) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::domain(format!("gamma must be > 0, got {gamma}")));
        }
        if !(n_th >= 0.0) {
            return Err(Error::domain(format!("n_th must be >= 0, got {n_th}")));
        }
        Ok(CoolingBudget {
            gamma,
            n_th,
            qubit,
            cavity,
        })
    }

    /// γ + Γ_o + Γ_q.
    pub fn total_rate(&self) -> f64 {
        self.gamma + self.cavity.net + self.qubit.net
    }

    /// γ n_th + Γ_o⁺ + Γ_q⁺, or Γ_q⁻ in place of Γ_q⁺ with `strict_paper`.
    pub fn source(&self, strict_paper: bool) -> f64 {
        let q = if strict_paper {
            self.qubit.minus
        } else {
            self.qubit.plus
        };
        self.gamma * self.n_th + self.cavity.plus + q
    }
}

/// Qubit rates at coupling G and cavity rates at coupling G_o, both taken in
/// the displaced frame described by `eff`.
pub fn budget_from_effective(p: &SystemParams, eff: &EffectiveParams, strict_paper: bool) -> Result<CoolingBudget> {
    let drive = QubitDrive::new(eff.delta_q_shifted, eff.rabi_eff, p.qubit_relax, p.qubit_dephase, p.n_q)?;
    let qubit = qubit_rates(eff.g_eff, p.omega_m, &drive, strict_paper)?;
    let cavity = cavity_rates(p.omega_m, &CavityDrive::new(eff.delta_c_shifted, p.kappa, eff.g_o_eff)?)?;
    CoolingBudget::new(p.mech_damping, p.n_th, qubit, cavity)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryOptions {
    pub strict_paper: bool,
    /// Return a growing trajectory instead of failing when the total rate is
    /// not positive.
    pub allow_heating: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhononTrajectory {
    pub times: Vec<f64>,
    pub n: Vec<f64>,
    /// Set when the total damping is not positive.
    pub heating: bool,
}

/// ⟨n⟩(t) = n_ss + (n0 - n_ss) e^{-(γ+Γ_o+Γ_q) t}.
pub fn phonon_trajectory(
    b: &CoolingBudget,
    n0: f64,
    t_grid: &[f64],
    opts: &TrajectoryOptions,
) -> Result<PhononTrajectory> {
    let rate = b.total_rate();
    let src = b.source(opts.strict_paper);
    let heating = !(rate > 0.0);
    if heating && !opts.allow_heating {
        return Err(Error::Divergence { total_rate: rate });
    }
    let n = t_grid
        .iter()
        .map(|&t| {
            if rate == 0.0 {
                n0 + src * t
            } else {
                let n_ss = src / rate;
                n_ss + (n0 - n_ss) * (-rate * t).exp()
            }
        })
        .collect();
    Ok(PhononTrajectory {
        times: t_grid.to_vec(),
        n,
        heating,
    })
}

/// Steady occupancy (γ n_th + Γ_o⁺ + Γ_q⁺)/(γ + Γ_o + Γ_q).
pub fn steady_phonon(b: &CoolingBudget, strict_paper: bool) -> Result<f64> {
    let rate = b.total_rate();
    if !(rate > 0.0) {
        return Err(Error::Divergence { total_rate: rate });
    }
    Ok(b.source(strict_paper) / rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// κ = 0.1 Ω, Δ_c = -Ω.
    Resolved,
    /// κ = 10 Ω, Δ_c = -κ/2.
    Unresolved,
}

impl Regime {
    /// (κ, Δ_c) for mechanical frequency Ω.
    pub fn cavity(&self, omega: f64) -> (f64, f64) {
        match self {
            Regime::Resolved => (0.1 * omega, -omega),
            Regime::Unresolved => (10.0 * omega, -5.0 * omega),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resolved" => Ok(Regime::Resolved),
            "unresolved" => Ok(Regime::Unresolved),
            other => Err(Error::domain(format!("unknown regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig3Row {
    #[serde(rename = "G0_MHz")]
    pub g0: f64,
    pub n_qubit_only: f64,
    pub n_cavity_only: f64,
    pub n_hybrid: f64,
}

/// Steady occupancies versus G_0 for qubit-only, cavity-only and combined
/// cooling. The cavity linewidth and detuning are set by `regime`; the qubit
/// drive, damping and bath come from `p`, with qubit coupling `g_eff`.
pub fn sweep_fig3(
    regime: Regime,
    g0_grid: &[f64],
    p: &SystemParams,
    g_eff: f64,
    strict_paper: bool,
) -> Result<Vec<Fig3Row>> {
    if g0_grid.is_empty() {
        return Err(Error::domain("G_0 grid is empty"));
    }
    let (kappa, delta_c) = regime.cavity(p.omega_m);
    let drive = QubitDrive::from_params(p)?;
    let qubit = qubit_rates(g_eff, p.omega_m, &drive, strict_paper)?;
    g0_grid
        .par_iter()
        .map(|&g0| {
            let cavity = cavity_rates(p.omega_m, &CavityDrive::new(delta_c, kappa, g0)?)?;
            let none_q = QubitRates::zero();
            let none_c = CavityRates::zero();
            let n = |q: QubitRates, c: CavityRates| -> Result<f64> {
                steady_phonon(&CoolingBudget::new(p.mech_damping, p.n_th, q, c)?, strict_paper)
            };
            Ok(Fig3Row {
                g0,
                n_qubit_only: n(qubit, none_c)?,
                n_cavity_only: n(none_q, cavity)?,
                n_hybrid: n(qubit, cavity)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub hamiltonian: HamiltonianOptions,
    /// Largest accepted population of the top Fock level.
    pub leakage_limit: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            hamiltonian: HamiltonianOptions::default(),
            leakage_limit: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    /// Mechanical occupancy ⟨b†b⟩ in the displaced frame.
    pub n_b: f64,
    pub n_a: f64,
    pub sigma_z: f64,
    pub leakage_cavity: f64,
    pub leakage_mechanics: f64,
    /// |c_a|, |c_b| of the displaced-frame linear terms included in the run.
    pub residual_a: f64,
    pub residual_b: f64,
}

/// Full qubit ⊗ cavity ⊗ mechanics Liouvillian in the displaced frame.
///
/// The Hamiltonian is the linearized one plus the linear terms left by the
/// displacement, c_a a† + (c_b - G⟨σz⟩) b† + h.c.; at the fixed point only
/// -G⟨σz⟩(b + b†) survives, which removes the mean qubit force.
pub fn hybrid_liouvillian(
    p: &SystemParams,
    eff: &EffectiveParams,
    space: HybridSpace,
    opts: &OracleOptions,
) -> Result<(crate::lindblad::Liouvillian, (f64, f64))> {
    let mut h = hybrid_hamiltonian(p, eff, space, opts.hamiltonian)?;
    let a = space.a();
    let b = space.b();
    let (c_a, c_b) = residual_linear_terms(p, eff.alpha, eff.beta, eff.g_eff, eff.sigma_z_ss);
    let lin_b = c_b - eff.g_eff * eff.sigma_z_ss;
    let drive_a = &a.dag().scale(c_a) + &a.scale(c_a.conj());
    let drive_b = &b.dag().scale(lin_b) + &b.scale(lin_b.conj());
    h = &(&h + &drive_a) + &drive_b;

    let drive = QubitDrive::new(eff.delta_q_shifted, eff.rabi_eff, p.qubit_relax, p.qubit_dephase, p.n_q)?;
    let mut diss: Vec<Dissipator> = drive
        .dissipators()
        .into_iter()
        .map(|d| Dissipator::new(space.embed(Subsystem::Qubit, d.operator()), d.rate()))
        .collect::<Result<_>>()?;
    diss.push(Dissipator::new(a, p.kappa)?);
    diss.push(Dissipator::new(b.clone(), p.mech_damping * (p.n_th + 1.0))?);
    diss.push(Dissipator::new(b.dag(), p.mech_damping * p.n_th)?);
    Ok((build_liouvillian(h, diss)?, (c_a.norm(), c_b.norm())))
}

/// Steady ⟨b†b⟩ of the full hybrid master equation.
pub fn oracle_steady_phonon(
    p: &SystemParams,
    eff: &EffectiveParams,
    cutoffs: Cutoffs,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let space = HybridSpace::new(cutoffs.cavity, cutoffs.mechanics)?;
    let (l, (res_a, res_b)) = hybrid_liouvillian(p, eff, space, opts)?;
    let rho = steady_state(&l)?;
    let leak_a = rho.top_level_population(HybridSpace::position(Subsystem::Cavity));
    let leak_b = rho.top_level_population(HybridSpace::position(Subsystem::Mechanics));
    for (name, leak) in [("cavity", leak_a), ("mechanics", leak_b)] {
        if leak > opts.leakage_limit {
            return Err(Error::Cutoff {
                subsystem: name,
                leakage: leak,
                limit: opts.leakage_limit,
            });
        }
    }
    let number = |op: Operator| rho.expect(&(&op.dag() * &op)).re;
    Ok(OracleResult {
        n_b: number(space.b()),
        n_a: number(space.a()),
        sigma_z: rho.expect(&space.sigma_z()).re,
        leakage_cavity: leak_a,
        leakage_mechanics: leak_b,
        residual_a: res_a,
        residual_b: res_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(minus: f64, plus: f64) -> QubitRates {
        QubitRates {
            minus,
            plus,
            net: minus - plus,
            omega_shift: 0.0,
        }
    }

    fn c(minus: f64, plus: f64) -> CavityRates {
        CavityRates {
            minus,
            plus,
            net: minus - plus,
        }
    }

    #[test]
    fn bare_thermalization() {
        let b = CoolingBudget::new(0.3, 7.0, QubitRates::zero(), CavityRates::zero()).unwrap();
        let ts = [0.0, 1.0, 5.0];
        let tr = phonon_trajectory(&b, 0.0, &ts, &TrajectoryOptions::default()).unwrap();
        for (t, n) in ts.iter().zip(&tr.n) {
            assert_relative_eq!(*n, 7.0 * (1.0 - (-0.3 * t).exp()), max_relative = 1e-14);
        }
        assert_relative_eq!(steady_phonon(&b, false).unwrap(), 7.0, max_relative = 1e-14);
    }

    #[test]
    fn steady_start_stays_put() {
        let b = CoolingBudget::new(1e-3, 100.0, q(0.05, 0.005), c(0.2, 0.001)).unwrap();
        let n_ss = steady_phonon(&b, false).unwrap();
        let tr = phonon_trajectory(&b, n_ss, &[0.0, 10.0, 1e4], &TrajectoryOptions::default()).unwrap();
        assert!(tr.n.iter().all(|n| (n - n_ss).abs() < 1e-12 * n_ss));
    }

    #[test]
    fn channel_removal_limits() {
        let b = CoolingBudget::new(1e-3, 100.0, QubitRates::zero(), c(0.2, 0.001)).unwrap();
        assert_relative_eq!(
            steady_phonon(&b, false).unwrap(),
            (1e-3 * 100.0 + 0.001) / (1e-3 + 0.199),
            max_relative = 1e-14
        );
    }

    #[test]
    fn heating_is_an_error_unless_allowed() {
        let b = CoolingBudget::new(1e-3, 1.0, q(0.0, 0.01), CavityRates::zero()).unwrap();
        assert!(matches!(steady_phonon(&b, false), Err(Error::Divergence { .. })));
        let ts = [0.0, 1.0, 2.0];
        assert!(phonon_trajectory(&b, 1.0, &ts, &TrajectoryOptions::default()).is_err());
        let opts = TrajectoryOptions {
            allow_heating: true,
            ..Default::default()
        };
        let tr = phonon_trajectory(&b, 1.0, &ts, &opts).unwrap();
        assert!(tr.heating && tr.n[2] > tr.n[1] && tr.n[1] > tr.n[0]);
    }

    #[test]
    fn strict_source_uses_absorption_rate() {
        let b = CoolingBudget::new(1e-3, 10.0, q(0.05, 0.005), CavityRates::zero()).unwrap();
        let strict = steady_phonon(&b, true).unwrap();
        assert_relative_eq!(strict, (1e-2 + 0.05) / (1e-3 + 0.045), max_relative = 1e-14);
    }

    fn fig3_params() -> SystemParams {
        SystemParams::figure_defaults()
    }

    #[test]
    fn fig3_zero_g0_column_equals_qubit_only() {
        for regime in [Regime::Resolved, Regime::Unresolved] {
            let rows = sweep_fig3(regime, &[0.0, 0.05], &fig3_params(), 0.2, false).unwrap();
            assert_eq!(rows[0].n_hybrid, rows[0].n_qubit_only);
            assert_relative_eq!(rows[0].n_cavity_only, 1e3, max_relative = 1e-14);
        }
    }

    #[test]
    fn fig3_resolved_hybrid_below_both() {
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.005).collect();
        let rows = sweep_fig3(Regime::Resolved, &grid, &fig3_params(), 0.2, false).unwrap();
        for r in &rows {
            assert!(r.n_hybrid <= r.n_qubit_only && r.n_hybrid <= r.n_cavity_only, "{r:?}");
        }
        // ordered like the grid
        assert!(rows.iter().zip(&grid).all(|(r, g)| r.g0 == *g));
    }

    #[test]
    fn fig3_resolved_crossover_above_weak_coupling() {
        // beyond G_0 ≈ 0.15 MHz the cavity alone outperforms the combination
        let rows = sweep_fig3(Regime::Resolved, &[0.1, 0.5], &fig3_params(), 0.2, false).unwrap();
        assert!(rows[0].n_hybrid <= rows[0].n_cavity_only);
        assert!(rows[1].n_hybrid > rows[1].n_cavity_only);
    }

    #[test]
    fn fig3_resolved_hybrid_decreases_with_g0() {
        let grid: Vec<f64> = (0..=50).map(|k| k as f64 * 0.01).collect();
        let rows = sweep_fig3(Regime::Resolved, &grid, &fig3_params(), 0.2, false).unwrap();
        assert!(rows.windows(2).all(|w| w[1].n_hybrid <= w[0].n_hybrid));
    }

    #[test]
    fn fig3_unresolved_orderings() {
        let grid: Vec<f64> = (1..=10).map(|k| k as f64 * 0.01).collect();
        let rows = sweep_fig3(Regime::Unresolved, &grid, &fig3_params(), 0.2, false).unwrap();
        for r in &rows {
            assert!(r.n_qubit_only <= r.n_hybrid && r.n_hybrid < r.n_cavity_only, "{r:?}");
        }
        // large G_0 approaches the cavity limit 2.05 plus the thermal share
        let big = sweep_fig3(Regime::Unresolved, &[20.0], &fig3_params(), 0.2, false).unwrap()[0];
        assert!((big.n_cavity_only - 2.05).abs() < 0.01);
        assert!(big.n_hybrid > 1.5 && big.n_hybrid < big.n_cavity_only);
    }

    #[test]
    fn oracle_without_couplings_is_thermal() {
        let mut p = SystemParams::figure_defaults();
        p.n_th = 0.5;
        p.mech_damping = 0.05;
        p.rabi = 0.0;
        let eff = EffectiveParams::direct(&p, 0.0, 0.0, -1.0);
        let r = oracle_steady_phonon(&p, &eff, Cutoffs { cavity: 2, mechanics: 16 }, &OracleOptions::default())
            .unwrap();
        let q: f64 = 0.5 / 1.5;
        let exact: f64 = (0..16).map(|k| k as f64 * q.powi(k)).sum::<f64>()
            / (0..16).map(|k| q.powi(k)).sum::<f64>();
        assert_relative_eq!(r.n_b, exact, max_relative = 1e-9);
        assert!((r.n_b - 0.5).abs() < 1e-4);
    }

    #[test]
    fn oracle_reports_small_cutoff() {
        let mut p = SystemParams::figure_defaults();
        p.n_th = 0.5;
        p.mech_damping = 0.05;
        let eff = EffectiveParams::direct(&p, 0.0, 0.0, -1.0);
        let err = oracle_steady_phonon(&p, &eff, Cutoffs { cavity: 2, mechanics: 3 }, &OracleOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::Cutoff { subsystem: "mechanics", .. }));
        assert_eq!(err.exit_code(), 5);
    }

    #[test]
    fn oracle_cavity_only_cooling() {
        // G = 0, G_0 = 0.005 ≪ κ = 0.05, Δ_c = -Ω
        let mut p = SystemParams::figure_defaults();
        p.n_th = 0.5;
        p.mech_damping = 0.002;
        p.kappa = 0.05;
        p.delta_c = -10.0;
        let eff = EffectiveParams::direct(&p, 0.0, 0.005, -1.0);
        let r = oracle_steady_phonon(&p, &eff, Cutoffs { cavity: 3, mechanics: 10 }, &OracleOptions::default())
            .unwrap();
        let cav = cavity_rates(p.omega_m, &CavityDrive::new(p.delta_c, p.kappa, 0.005).unwrap()).unwrap();
        let b = CoolingBudget::new(p.mech_damping, p.n_th, QubitRates::zero(), cav).unwrap();
        let formula = steady_phonon(&b, false).unwrap();
        assert!((r.n_b - formula).abs() < 0.1 * formula, "oracle {} formula {formula}", r.n_b);
    }

    proptest! {
        #[test]
        fn budget_identities(
            gamma in 1e-4f64..1.0,
            n_th in 0.0f64..1e3,
            qm in 0.0f64..1.0, qp_frac in 0.0f64..0.9,
            cm in 0.0f64..1.0, cp_frac in 0.0f64..0.9,
        ) {
            let qr = q(qm, qm * qp_frac);
            let cr = c(cm, cm * cp_frac);
            let b = CoolingBudget::new(gamma, n_th, qr, cr).unwrap();
            let n_ss = steady_phonon(&b, false).unwrap();
            // the rate equation's long-time limit
            let tr = phonon_trajectory(&b, 0.0, &[0.0, 1e6], &TrajectoryOptions::default()).unwrap();
            prop_assert!((tr.n[1] - n_ss).abs() <= 1e-12 * n_ss.max(1.0));
            // rate-weighted average of the individual limits
            let mut num = gamma * n_th;
            let mut den = gamma;
            if qr.net > 0.0 { num += qr.net * (qr.plus / qr.net); den += qr.net; }
            if cr.net > 0.0 { num += cr.net * (cr.plus / cr.net); den += cr.net; }
            prop_assert!((num / den - n_ss).abs() <= 1e-12 * n_ss.max(1e-12));
            prop_assert!(n_ss <= n_th.max(qp_frac / (1.0 - qp_frac)).max(cp_frac / (1.0 - cp_frac)) * (1.0 + 1e-12) + 1e-15);
            // a channel whose limit lies below the current occupancy lowers it
            let without_q = steady_phonon(&CoolingBudget::new(gamma, n_th, QubitRates::zero(), cr).unwrap(), false).unwrap();
            if qr.net > 0.0 && qr.plus / qr.net < without_q {
                prop_assert!(n_ss <= without_q * (1.0 + 1e-12));
            }
        }
    }
}
