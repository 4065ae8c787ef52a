// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed second-moment equations for the cavity and mechanics once the qubit
//! has been traced out into incoherent rates Γ_q±.
//!
//! State vector (all real): `[n_a, n_b, Re c, Im c, Re s_ab, Im s_ab,
//! Re s_a, Im s_a, Re s_b, Im s_b]` with n_a = ⟨a†a⟩, n_b = ⟨b†b⟩,
//! c = ⟨a†b⟩, s_ab = ⟨ab⟩, s_a = ⟨a²⟩, s_b = ⟨b²⟩.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eig, Inverse, Solve};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, evolve, Dissipator, EvolveOptions, Liouvillian};
use crate::operators::{annihilation, tensor, DensityMatrix, Operator};
use crate::params::{Cutoffs, EffectiveParams, SystemParams};
use crate::qubit_spectrum::{qubit_rates, QubitDrive, QubitRates};

pub const DIM: usize = 10;

/// Slack for n ≥ 0.
pub const NUMBER_TOL: f64 = 1e-8;
/// Slack for |s| ≤ n + 1/2.
pub const SQUEEZE_TOL: f64 = 1e-6;
/// Largest eigenvector-matrix condition number for the spectral propagator.
const EIG_COND_MAX: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentState {
    pub n_a: f64,
    pub n_b: f64,
    pub c: C64,
    pub s_ab: C64,
    pub s_a: C64,
    pub s_b: C64,
}

impl MomentState {
    /// Cavity in vacuum, mechanics thermal with occupancy `n_b`.
    pub fn thermal_mechanics(n_b: f64) -> Self {
        MomentState {
            n_b,
            ..Default::default()
        }
    }

    pub fn to_array(&self) -> Array1<f64> {
        Array1::from(vec![
            self.n_a, self.n_b, self.c.re, self.c.im, self.s_ab.re, self.s_ab.im, self.s_a.re,
            self.s_a.im, self.s_b.re, self.s_b.im,
        ])
    }

    pub fn from_slice(x: &[f64]) -> Self {
        assert_eq!(x.len(), DIM);
        MomentState {
            n_a: x[0],
            n_b: x[1],
            c: C64::new(x[2], x[3]),
            s_ab: C64::new(x[4], x[5]),
            s_a: C64::new(x[6], x[7]),
            s_b: C64::new(x[8], x[9]),
        }
    }

    /// n_a, n_b ≥ 0 and |s_a| ≤ n_a + 1/2, |s_b| ≤ n_b + 1/2.
    pub fn check(&self) -> Result<()> {
        if !(self.n_a >= -NUMBER_TOL) || !(self.n_b >= -NUMBER_TOL) {
            return Err(Error::Physicality(format!(
                "negative occupancy: n_a = {:.6e}, n_b = {:.6e}",
                self.n_a, self.n_b
            )));
        }
        for (name, s, n) in [("s_a", self.s_a, self.n_a), ("s_b", self.s_b, self.n_b)] {
            if s.norm() > n + 0.5 + SQUEEZE_TOL {
                return Err(Error::Physicality(format!(
                    "|{name}| = {:.6e} exceeds occupancy bound {:.6e}",
                    s.norm(),
                    n + 0.5
                )));
            }
        }
        Ok(())
    }
}

/// Scalars of the linearized two-mode model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentCoefficients {
    /// Cavity frequency in the rotating frame, -Δ_c.
    pub omega_a: f64,
    /// Mechanical frequency, Ω or Ω + δΩ.
    pub omega_b: f64,
    /// Optomechanical coupling G_o.
    pub g: f64,
    pub kappa: f64,
    /// Γ_q⁻ + γ(n_th + 1).
    pub gamma_down: f64,
    /// Γ_q⁺ + γ n_th.
    pub gamma_up: f64,
}

impl MomentCoefficients {
    pub fn new(p: &SystemParams, eff: &EffectiveParams, rates: &QubitRates, apply_shift: bool) -> Result<Self> {
        let c = MomentCoefficients {
            omega_a: -eff.delta_c_shifted,
            omega_b: p.omega_m + if apply_shift { rates.omega_shift } else { 0.0 },
            g: eff.g_o_eff,
            kappa: p.kappa,
            gamma_down: rates.minus + p.mech_damping * (p.n_th + 1.0),
            gamma_up: rates.plus + p.mech_damping * p.n_th,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.omega_a, self.omega_b, self.g, self.kappa, self.gamma_down, self.gamma_up];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite moment coefficient"));
        }
        if self.kappa < 0.0 || self.gamma_down < 0.0 || self.gamma_up < 0.0 {
            return Err(Error::domain("negative damping in moment coefficients"));
        }
        Ok(())
    }

    /// Net mechanical damping Γ_m.
    pub fn gamma_m(&self) -> f64 {
        self.gamma_down - self.gamma_up
    }
}

/// dx/dt = M x + s.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSystem {
    pub coefficients: MomentCoefficients,
    pub matrix: Array2<f64>,
    pub source: Array1<f64>,
}

fn rhs(k: &MomentCoefficients, x: &[f64]) -> [f64; DIM] {
    let m = MomentState::from_slice(x);
    let i = C64::i();
    let g = k.g;
    let gm = k.gamma_m();
    let n_a_dot = -k.kappa * m.n_a - 2.0 * g * m.s_ab.im + 2.0 * g * m.c.im;
    let n_b_dot = -gm * m.n_b + k.gamma_up - 2.0 * g * m.s_ab.im - 2.0 * g * m.c.im;
    let c_dot = (i * (k.omega_a - k.omega_b) - (k.kappa + gm) / 2.0) * m.c
        + i * g * (m.s_b + m.n_b - m.n_a - m.s_a.conj());
    let s_ab_dot = (-i * (k.omega_a + k.omega_b) - (k.kappa + gm) / 2.0) * m.s_ab
        - i * g * (m.s_b + m.n_b + m.s_a + m.n_a + 1.0);
    let s_a_dot = (-2.0 * i * k.omega_a - k.kappa) * m.s_a - 2.0 * i * g * (m.s_ab + m.c.conj());
    let s_b_dot = (-2.0 * i * k.omega_b - gm) * m.s_b - 2.0 * i * g * (m.s_ab + m.c);
    [
        n_a_dot, n_b_dot, c_dot.re, c_dot.im, s_ab_dot.re, s_ab_dot.im, s_a_dot.re, s_a_dot.im,
        s_b_dot.re, s_b_dot.im,
    ]
}

impl MomentSystem {
    pub fn new(coefficients: MomentCoefficients) -> Result<Self> {
        coefficients.validate()?;
        let zero = [0.0; DIM];
        let source = Array1::from(rhs(&coefficients, &zero).to_vec());
        let mut matrix = Array2::zeros((DIM, DIM));
        for col in 0..DIM {
            let mut e = [0.0; DIM];
            e[col] = 1.0;
            let r = rhs(&coefficients, &e);
            for row in 0..DIM {
                matrix[[row, col]] = r[row] - source[row];
            }
        }
        Ok(MomentSystem {
            coefficients,
            matrix,
            source,
        })
    }

    pub fn derivative(&self, x: &MomentState) -> MomentState {
        let d = self.matrix.dot(&x.to_array()) + &self.source;
        MomentState::from_slice(d.as_slice().expect("contiguous"))
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        let (vals, _) = complexify(&self.matrix)
            .eig()
            .map_err(|e| Error::Solve(format!("moment eigen-decomposition: {e}")))?;
        Ok(vals.to_vec())
    }

    /// Eigenvalue with the largest real part.
    pub fn slowest_mode(&self) -> Result<C64> {
        let vals = self.eigenvalues()?;
        Ok(vals
            .into_iter()
            .fold(C64::new(f64::NEG_INFINITY, 0.0), |a, b| if b.re > a.re { b } else { a }))
    }

    /// [[M, s], [0, 0]], acting on [x; 1].
    fn augmented(&self) -> Array2<f64> {
        let mut a = Array2::zeros((DIM + 1, DIM + 1));
        a.slice_mut(s![..DIM, ..DIM]).assign(&self.matrix);
        a.slice_mut(s![..DIM, DIM]).assign(&self.source);
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    /// Add the qubit-induced frequency shift to Ω.
    pub apply_shift: bool,
    pub strict_paper: bool,
    /// Check the physicality bounds at every output time.
    pub check_physicality: bool,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            apply_shift: true,
            strict_paper: false,
            check_physicality: true,
        }
    }
}

/// Builds the moment system from the effective parameters and qubit rates.
pub fn moment_generator(
    p: &SystemParams,
    eff: &EffectiveParams,
    rates: &QubitRates,
    apply_shift: bool,
) -> Result<MomentSystem> {
    MomentSystem::new(MomentCoefficients::new(p, eff, rates, apply_shift)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
    /// True when the matrix-exponential fallback was used.
    pub used_expm: bool,
}

impl MomentTrajectory {
    pub fn n_b(&self) -> Vec<f64> {
        self.states.iter().map(|m| m.n_b).collect()
    }
}

// Dense factorizations run in complex arithmetic; the real LU routines of the
// linked LAPACK were found to return wrong solutions for n >= 10.
fn complexify(m: &Array2<f64>) -> Array2<C64> {
    m.mapv(|v| C64::new(v, 0.0))
}

fn norm1_c(m: &Array2<C64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm1(m: &Array2<f64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a [13/13] Padé
/// approximant.
pub fn expm(a: &Array2<f64>) -> Result<Array2<f64>> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm = norm1(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(squarings);
    let id = Array2::<f64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let u_inner = a6.dot(&(&a6 * B[13] + &a4 * B[11] + &a2 * B[9])) + &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &id * B[1];
    let u = a.dot(&u_inner);
    let v = a6.dot(&(&a6 * B[12] + &a4 * B[10] + &a2 * B[8])) + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &id * B[0];
    let q_inv = complexify(&(&v - &u))
        .inv()
        .map_err(|e| Error::Solve(format!("Padé denominator: {e}")))?;
    let mut r = q_inv.dot(&complexify(&(&v + &u))).mapv(|z| z.re);
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    Ok(r)
}

/// x(t) = x_ss + V e^{Λt} V⁻¹ (x(0) - x_ss), evaluated exactly on the
/// augmented generator; falls back to the matrix exponential when the
/// eigenvectors are ill conditioned.
pub fn evolve_moments(
    sys: &MomentSystem,
    m0: &MomentState,
    t_grid: &[f64],
    opts: &MomentOptions,
) -> Result<MomentTrajectory> {
    if t_grid.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::domain("times must be finite and >= 0"));
    }
    let aug = sys.augmented();
    let mut y0 = Array1::<f64>::zeros(DIM + 1);
    y0.slice_mut(s![..DIM]).assign(&m0.to_array());
    y0[DIM] = 1.0;

    let spectral = complexify(&aug)
        .eig()
        .ok()
        .and_then(|(vals, vecs)| {
            let inv = vecs.inv().ok()?;
            let cond = norm1_c(&vecs) * norm1_c(&inv);
            (cond.is_finite() && cond < EIG_COND_MAX).then_some((vals, vecs, inv))
        });

    let mut states = Vec::with_capacity(t_grid.len());
    let used_expm = spectral.is_none();
    match spectral {
        Some((vals, vecs, inv)) => {
            let w = inv.dot(&y0.mapv(|v| C64::new(v, 0.0)));
            for &t in t_grid {
                let scaled: Array1<C64> = w.iter().zip(vals.iter()).map(|(wk, lk)| wk * (lk * t).exp()).collect();
                let y = vecs.dot(&scaled);
                let x: Vec<f64> = y.iter().take(DIM).map(|z| z.re).collect();
                states.push(MomentState::from_slice(&x));
            }
        }
        None => {
            for &t in t_grid {
                let y = expm(&(&aug * t))?.dot(&y0);
                states.push(MomentState::from_slice(&y.as_slice().expect("contiguous")[..DIM]));
            }
        }
    }
    if opts.check_physicality {
        for (t, m) in t_grid.iter().zip(&states) {
            m.check().map_err(|e| match e {
                Error::Physicality(msg) => Error::Physicality(format!("at t = {t}: {msg}")),
                other => other,
            })?;
        }
    }
    Ok(MomentTrajectory {
        times: t_grid.to_vec(),
        states,
        used_expm,
    })
}

/// Fixed point M x = -s, after checking that every eigenvalue of M has a
/// negative real part.
pub fn steady_moments(sys: &MomentSystem) -> Result<MomentState> {
    let slow = sys.slowest_mode()?;
    if slow.re >= 0.0 {
        return Err(Error::Unstable {
            re: slow.re,
            im: slow.im,
        });
    }
    let x = complexify(&sys.matrix)
        .solve(&sys.source.mapv(|v| C64::new(-v, 0.0)))
        .map_err(|e| Error::Solve(format!("moment steady state: {e}")))?;
    let x: Vec<f64> = x.iter().map(|z| z.re).collect();
    let m = MomentState::from_slice(&x);
    m.check()?;
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fig4Case {
    /// G_o = 0.06 MHz.
    A,
    /// G_o = 0.6 MHz.
    B,
}

impl Fig4Case {
    pub fn g_o(&self) -> f64 {
        match self {
            Fig4Case::A => 0.06,
            Fig4Case::B => 0.6,
        }
    }

    /// Figure parameters: Ω = 10, κ = 0.05, Δ_c = -Ω, γ = 1e-5, n_th = 1e3,
    /// optimal qubit drive with Γ = 2 and Γ_d = 0.02.
    pub fn params(&self) -> SystemParams {
        let mut p = SystemParams::figure_defaults();
        p.kappa = 0.05;
        p.delta_c = -p.omega_m;
        p
    }

    /// Qubit coupling G.
    pub fn g(&self) -> f64 {
        0.2
    }
}

impl std::str::FromStr for Fig4Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Fig4Case::A),
            "b" | "B" => Ok(Fig4Case::B),
            other => Err(Error::domain(format!("unknown case {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig4Row {
    pub t_us: f64,
    pub n_hybrid: f64,
    pub n_qubit_only: f64,
    pub n_cavity_only: f64,
}

/// ⟨b†b⟩(t) for combined, qubit-only (G_o = 0) and cavity-only (Γ_q± = 0)
/// cooling, starting from the vacuum cavity and a thermal mechanical state
/// with occupancy `n_b0`.
pub fn fig4_curves(
    p: &SystemParams,
    g_eff: f64,
    g_o_eff: f64,
    n_b0: f64,
    t_grid: &[f64],
    opts: &MomentOptions,
) -> Result<Vec<Fig4Row>> {
    let drive = QubitDrive::from_params(p)?;
    let rates = qubit_rates(g_eff, p.omega_m, &drive, opts.strict_paper)?;
    let eff = |g_o: f64| EffectiveParams::direct(p, g_eff, g_o, 0.0);
    let runs = [
        (eff(g_o_eff), rates),
        (eff(0.0), rates),
        (eff(g_o_eff), QubitRates::zero()),
    ];
    let m0 = MomentState::thermal_mechanics(n_b0);
    let curves: Vec<Vec<f64>> = runs
        .par_iter()
        .map(|(e, r)| {
            let sys = moment_generator(p, e, r, opts.apply_shift)?;
            Ok(evolve_moments(&sys, &m0, t_grid, opts)?.n_b())
        })
        .collect::<Result<_>>()?;
    Ok(t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| Fig4Row {
            t_us: t,
            n_hybrid: curves[0][k],
            n_qubit_only: curves[1][k],
            n_cavity_only: curves[2][k],
        })
        .collect())
}

/// Two-mode master equation with the same coefficients:
/// H = ω_a a†a + ω_b b†b + G_o(a + a†)(b + b†), κ D[a], Γ↓ D[b], Γ↑ D[b†].
pub struct TwoModeOracle {
    pub liouvillian: Liouvillian,
    pub a: Operator,
    pub b: Operator,
    pub cutoffs: Cutoffs,
}

impl TwoModeOracle {
    pub fn new(k: &MomentCoefficients, cutoffs: Cutoffs) -> Result<Self> {
        let ia = Operator::identity(&[cutoffs.cavity]);
        let ib = Operator::identity(&[cutoffs.mechanics]);
        let a = tensor(&[&annihilation(cutoffs.cavity)?, &ib]);
        let b = tensor(&[&ia, &annihilation(cutoffs.mechanics)?]);
        let x_a = &a + &a.dag();
        let x_b = &b + &b.dag();
        let h = &(&(&a.dag() * &a).scale(k.omega_a) + &(&b.dag() * &b).scale(k.omega_b))
            + &(&x_a * &x_b).scale(k.g);
        let diss = vec![
            Dissipator::new(a.clone(), k.kappa)?,
            Dissipator::new(b.clone(), k.gamma_down)?,
            Dissipator::new(b.dag(), k.gamma_up)?,
        ];
        Ok(TwoModeOracle {
            liouvillian: build_liouvillian(h, diss)?,
            a,
            b,
            cutoffs,
        })
    }

    pub fn moments(&self, rho: &DensityMatrix) -> MomentState {
        let (a, b) = (&self.a, &self.b);
        let ev = |op: Operator| rho.expect(&op);
        MomentState {
            n_a: ev(&a.dag() * a).re,
            n_b: ev(&b.dag() * b).re,
            c: ev(&a.dag() * b),
            s_ab: ev(a * b),
            s_a: ev(a * a),
            s_b: ev(b * b),
        }
    }

    /// Vacuum cavity and truncated thermal mechanics.
    pub fn initial_state(&self, n_b0: f64) -> Result<DensityMatrix> {
        let vac = DensityMatrix::fock(self.cutoffs.cavity, 0)?;
        let th = DensityMatrix::thermal(self.cutoffs.mechanics, n_b0)?;
        Ok(DensityMatrix::product(&[&vac, &th]))
    }

    pub fn evolve(&self, rho0: &DensityMatrix, t_grid: &[f64], opts: &EvolveOptions) -> Result<Vec<MomentState>> {
        let tr = evolve(&self.liouvillian, rho0, t_grid, opts)?;
        Ok(tr.states.iter().map(|r| self.moments(r)).collect())
    }
}
