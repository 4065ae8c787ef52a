// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks. Prints one line per criterion and exits nonzero if
//! any criterion fails.

use std::time::{Duration, Instant};

use hybridcool::cavity_spectrum::{
    cavity_quantum_limit, force_spectrum, minimum_cavity_limit, optimal_detuning, oracle_force_spectrum, CavityDrive,
};
use hybridcool::cooling_strong::{
    evolve_moments, fig4_curves, steady_moments, Fig4Case, MomentCoefficients, MomentOptions, MomentSystem,
    TwoModeOracle,
};
use hybridcool::cooling_weak::{
    budget_from_effective, oracle_steady_phonon, steady_phonon, sweep_fig3, OracleOptions, Regime,
};
use hybridcool::device::{effective_params, residual_linear_terms, DeriveOptions};
use hybridcool::lindblad::EvolveOptions;
use hybridcool::qubit_spectrum::{
    optimal_drive, qubit_noise_spectrum, qubit_rates, qubit_steady_sigma_z, QubitDrive,
};
use hybridcool::{Cutoffs, EffectiveParams, SystemParams};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(n: usize, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let r = f();
    let dt = t0.elapsed();
    let pass = r.pass && dt < limit;
    println!(
        "criterion {n}: {} ({}; {:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        r.detail,
        dt.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn draw(runner: &mut TestRunner, lo: f64, hi: f64) -> f64 {
    (lo..hi).new_tree(runner).unwrap().current()
}

fn fig_drive() -> QubitDrive {
    // Ω = 10, Γ = 2, Γ_d = 0.01Γ at the optimum
    let opt = optimal_drive(10.0, 2.0, 0.02, 0.0).unwrap();
    QubitDrive::new(opt.delta_q, opt.rabi, 2.0, 0.02, 0.0).unwrap()
}

fn criterion_1() -> Outcome {
    let omega = 10.0;
    let opt = optimal_drive(omega, 2.0, 0.02, 0.0).unwrap();
    // brute-force argmax of f on a fine grid
    let f = |x: f64| 4.0 * x * x * (1.0 - x * x).sqrt() / (4.0 - x.powi(4));
    let n = 1_000_000;
    let x_grid = (0..=n).map(|k| k as f64 / n as f64).fold((0.0, f64::MIN), |best, x| {
        let v = f(x);
        if v > best.1 {
            (x, v)
        } else {
            best
        }
    });
    let ratio = opt.rabi / opt.rabi.hypot(opt.delta_q);
    let dq = opt.delta_q / omega;
    let pass = (ratio - 0.85).abs() <= 0.01
        && (dq + 0.53).abs() <= 0.01
        && (ratio - x_grid.0).abs() < 1e-5;
    outcome(
        pass,
        format!("Omega_R/Delta_bar = {ratio:.5} (grid argmax {:.5}), Delta_q/Omega = {dq:.5}", x_grid.0),
    )
}

fn criterion_2() -> Outcome {
    let opt = optimal_drive(10.0, 2.0, 0.02, 0.0).unwrap();
    let r = qubit_rates(1.0, 10.0, &fig_drive(), false).unwrap();
    let limit = r.plus / r.net;
    let rel = (limit - 0.106).abs() / 0.106;
    let pass = rel <= 0.10 && (opt.n_min - limit).abs() <= 1e-12 * limit;
    // diagnostics only: the same drive with a narrow, undephased qubit
    let narrow = QubitDrive::new(opt.delta_q, opt.rabi, 1e-3, 0.0, 0.0).unwrap();
    let rn = qubit_rates(1.0, 10.0, &narrow, false).unwrap();
    outcome(
        pass,
        format!(
            "Gamma_q+/Gamma_q = {limit:.5} vs 0.106, rel. error {:.3}; Gamma_q+/Gamma_q- = {:.5}; \
             narrow-line limit Gamma = 1e-3, Gamma_d = 0: {:.5}",
            rel,
            r.plus / r.minus,
            rn.plus / rn.net
        ),
    )
}

fn criterion_3() -> Outcome {
    let omega = 10.0;
    // exact limit from the Lorentzian force spectrum
    let lorentz_limit = |dc: f64, k: f64| {
        let s = |w: f64| k / ((w + dc).powi(2) + k * k / 4.0);
        let (m, p) = (s(omega), s(-omega));
        p / (m - p)
    };
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let kappa_r = 0.1 * omega;
    let resolved = cavity_quantum_limit(omega, &CavityDrive::new(-omega, kappa_r, 0.1).unwrap()).unwrap();
    let e1 = rel(resolved, kappa_r * kappa_r / (16.0 * omega * omega));
    let kappa_u = 10.0 * omega;
    let unresolved = cavity_quantum_limit(omega, &CavityDrive::new(-kappa_u / 2.0, kappa_u, 0.1).unwrap()).unwrap();
    let e2 = rel(unresolved, 2.05);
    let mut e3: f64 = 0.0;
    for kappa in [0.1, 0.8, 1.0, 10.0, 100.0] {
        let dc = optimal_detuning(omega, kappa).unwrap();
        let exact = lorentz_limit(dc, kappa);
        let r = kappa / (2.0 * omega);
        // ½(√(1+r²) - 1), rationalized
        let closed = 0.5 * r * r / ((1.0 + r * r).sqrt() + 1.0);
        let lib_min = minimum_cavity_limit(omega, kappa).unwrap();
        let lib_at = cavity_quantum_limit(omega, &CavityDrive::new(dc, kappa, 0.1).unwrap()).unwrap();
        e3 = e3.max(rel(exact, closed)).max(rel(lib_min, closed)).max(rel(lib_at, closed));
    }
    let pass = e1 <= 1e-12 && e2 <= 1e-12 && e3 <= 1e-12;
    outcome(pass, format!("relative errors {e1:.1e}, {e2:.1e}, {e3:.1e}"))
}

fn weak_params() -> (SystemParams, EffectiveParams) {
    let d = fig_drive();
    let mut p = SystemParams::figure_defaults();
    p.delta_q = d.delta_q;
    p.rabi = d.rabi;
    p.n_th = 0.5;
    p.mech_damping = 0.02;
    p.kappa = 1.0;
    p.delta_c = -10.0;
    // G/Γ = 0.1, G_0/κ = 0.1
    let sz = qubit_steady_sigma_z(&d).unwrap();
    let eff = EffectiveParams::direct(&p, 0.2, 0.1, sz);
    (p, eff)
}

fn criterion_4() -> Outcome {
    let (p, eff) = weak_params();
    let formula = steady_phonon(&budget_from_effective(&p, &eff, false).unwrap(), false).unwrap();
    let cutoffs = Cutoffs {
        cavity: 3,
        mechanics: 8,
    };
    match oracle_steady_phonon(&p, &eff, cutoffs, &OracleOptions::default()) {
        Ok(r) => {
            let rel = (formula - r.n_b).abs() / r.n_b;
            outcome(
                rel <= 0.10,
                format!(
                    "formula {formula:.5}, Lindblad {:.5}, rel. difference {rel:.3}, leakage {:.1e}/{:.1e}",
                    r.n_b, r.leakage_cavity, r.leakage_mechanics
                ),
            )
        }
        Err(e) => outcome(false, format!("oracle failed: {e}")),
    }
}

fn criterion_5() -> Outcome {
    // optomechanics alone: Ω = 1, Δ_c = -Ω, κ = 0.4, G_o = 0.2, γ = 0.02, n_th = 0.5
    let (gamma, n_th) = (0.02, 0.5);
    let k = MomentCoefficients {
        omega_a: 1.0,
        omega_b: 1.0,
        g: 0.2,
        kappa: 0.4,
        gamma_down: gamma * (n_th + 1.0),
        gamma_up: gamma * n_th,
    };
    let sys = MomentSystem::new(k).unwrap();
    let slow = sys.slowest_mode().unwrap().re.abs();
    let t_max = 12.0 / slow;
    let ts: Vec<f64> = (0..=40).map(|i| t_max * i as f64 / 40.0).collect();
    // truncation error of the oracle falls about tenfold per two cavity levels
    let oracle = TwoModeOracle::new(
        &k,
        Cutoffs {
            cavity: 12,
            mechanics: 18,
        },
    )
    .unwrap();
    let rho0 = oracle.initial_state(1.0).unwrap();
    let m0 = oracle.moments(&rho0);
    let exact = oracle.evolve(&rho0, &ts, &EvolveOptions::default()).unwrap();
    let mom = evolve_moments(&sys, &m0, &ts, &MomentOptions::default()).unwrap();
    let err = exact
        .iter()
        .zip(&mom.states)
        .map(|(e, m)| (e.n_b - m.n_b).abs())
        .fold(0.0, f64::max);
    let ss = steady_moments(&sys).unwrap();
    let settled = (mom.states.last().unwrap().n_b - ss.n_b).abs();
    outcome(
        err <= 1e-4 && settled <= 1e-4,
        format!(
            "max |n_b difference| {err:.2e} over t in [0, {t_max:.0}], n_b {:.4} -> {:.4}",
            m0.n_b, ss.n_b
        ),
    )
}

fn criterion_6() -> Outcome {
    let p = SystemParams::figure_defaults();
    let g = 0.2;
    let grid = |stop: f64| (0..=100).map(|k| stop * k as f64 / 100.0).collect::<Vec<_>>();
    let resolved = sweep_fig3(Regime::Resolved, &grid(0.1), &p, g, false).unwrap();
    let b_ok = resolved
        .iter()
        .all(|r| r.n_hybrid <= r.n_qubit_only * (1.0 + 1e-12) && r.n_hybrid <= r.n_cavity_only * (1.0 + 1e-12));
    let unresolved = sweep_fig3(Regime::Unresolved, &grid(0.1), &p, g, false).unwrap();
    let a_ok = unresolved
        .iter()
        .all(|r| r.n_qubit_only <= r.n_hybrid * (1.0 + 1e-12));
    let ts: Vec<f64> = (0..=1000).map(|i| i as f64).collect();
    let mut finals = Vec::new();
    let mut c_ok = true;
    for case in [Fig4Case::A, Fig4Case::B] {
        let cp = case.params();
        let rows = fig4_curves(&cp, case.g(), case.g_o(), cp.n_th, &ts, &MomentOptions::default()).unwrap();
        let last = *rows.last().unwrap();
        c_ok &= last.n_hybrid < last.n_qubit_only && last.n_hybrid < last.n_cavity_only;
        finals.push(last);
    }
    let order = finals[1].n_hybrid < finals[0].n_hybrid;
    outcome(
        b_ok && a_ok && c_ok && order,
        format!(
            "3(b) {b_ok}, 3(a) {a_ok}; fig4 final hybrid/qubit/cavity a: {:.4}/{:.4}/{:.4}, b: {:.4}/{:.4}/{:.4}",
            finals[0].n_hybrid,
            finals[0].n_qubit_only,
            finals[0].n_cavity_only,
            finals[1].n_hybrid,
            finals[1].n_qubit_only,
            finals[1].n_cavity_only
        ),
    )
}

fn criterion_7() -> Outcome {
    let omega = 10.0;
    let mut runner = TestRunner::deterministic();
    let grid: Vec<f64> = (0..2001).map(|k| -3.0 * omega + 6.0 * omega * k as f64 / 2000.0).collect();
    let mut min_re = f64::INFINITY;
    for _ in 0..20 {
        let d = QubitDrive::new(
            draw(&mut runner, -15.0, 15.0),
            draw(&mut runner, 0.0, 12.0),
            draw(&mut runner, 0.1, 4.0),
            draw(&mut runner, 0.0, 2.0),
            draw(&mut runner, 0.0, 1.0),
        )
        .unwrap();
        let s = qubit_noise_spectrum(&d, &grid).unwrap();
        min_re = s.iter().map(|z| z.re).fold(min_re, f64::min);
    }
    let w: Vec<f64> = (0..=120).map(|k| -3.0 * omega + 6.0 * omega * k as f64 / 120.0).collect();
    let mut worst: f64 = 0.0;
    for kappa in [0.1 * omega, 0.8 * omega, 10.0 * omega] {
        let c = CavityDrive::new(optimal_detuning(omega, kappa).unwrap(), kappa, 0.1).unwrap();
        let closed = force_spectrum(&c, &w);
        let oracle = oracle_force_spectrum(&c, 1.0, &w).unwrap();
        for (a, b) in closed.iter().zip(&oracle) {
            worst = worst.max((a - b).abs() / a.abs());
        }
    }
    outcome(
        min_re >= -1e-10 && worst <= 0.02,
        format!("min Re S = {min_re:.3e}, worst S_FF relative deviation {worst:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let mut worst: f64 = 0.0;
    let mut converged = 0;
    for _ in 0..100 {
        let mut p = SystemParams::figure_defaults();
        p.omega_m = draw(&mut runner, 5.0, 20.0);
        p.delta_q = draw(&mut runner, -10.0, -1.0);
        p.rabi = draw(&mut runner, 1.0, 10.0);
        p.eta = draw(&mut runner, 1.0, 200.0);
        p.g_o = draw(&mut runner, 1e-5, 1e-3);
        p.delta_c = -draw(&mut runner, 3.0, 30.0);
        p.kappa = draw(&mut runner, 0.01, 1.0);
        p.g = draw(&mut runner, 0.0, 0.2);
        p.phi = draw(&mut runner, 0.0, 1.5);
        p.omega_q = draw(&mut runner, 1e3, 1e4);
        if let Ok(eff) = effective_params(&p, &DeriveOptions::default()) {
            converged += 1;
            let (ca, cb) = residual_linear_terms(&p, eff.alpha, eff.beta, eff.g_eff, eff.sigma_z_ss);
            worst = worst.max(ca.norm().max(cb.norm()) / p.eta.max(p.omega_m));
        }
    }
    outcome(
        converged > 0 && worst < 1e-8,
        format!("{converged}/100 converged, worst residual/max(eta, Omega) {worst:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let n_th = 0.1;
    let mut p = SystemParams::figure_defaults();
    p.n_th = n_th;
    p.mech_damping = 0.05;
    p.rabi = 0.0;
    p.eta = 0.0;
    let eff = EffectiveParams::direct(&p, 0.0, 0.0, -1.0);
    let formula = steady_phonon(&budget_from_effective(&p, &eff, false).unwrap(), false).unwrap();
    let rates = budget_from_effective(&p, &eff, false).unwrap().qubit;
    let sys = hybridcool::cooling_strong::moment_generator(&p, &eff, &rates, true).unwrap();
    let moments = steady_moments(&sys).unwrap().n_b;
    let lindblad = oracle_steady_phonon(
        &p,
        &eff,
        Cutoffs {
            cavity: 2,
            mechanics: 14,
        },
        &OracleOptions::default(),
    )
    .unwrap();
    // the truncation error is bounded by the top-level population times the cutoff
    let lind_tol = 14.0 * lindblad.leakage_mechanics + 1e-10;
    let pass = (formula - n_th).abs() <= 1e-12
        && (moments - n_th).abs() <= 1e-9
        && (lindblad.n_b - n_th).abs() <= lind_tol;
    outcome(
        pass,
        format!(
            "formula {formula:.12}, moments {moments:.12}, Lindblad {:.12} (tolerance {lind_tol:.1e})",
            lindblad.n_b
        ),
    )
}

fn main() {
    let checks: [(usize, u64, fn() -> Outcome); 9] = [
        (1, 1, criterion_1),
        (2, 10, criterion_2),
        (3, 1, criterion_3),
        (4, 300, criterion_4),
        (5, 120, criterion_5),
        (6, 30, criterion_6),
        (7, 120, criterion_7),
        (8, 5, criterion_8),
        (9, 60, criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, secs, f) in checks {
        if !run(n, Duration::from_secs(secs), f) {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
