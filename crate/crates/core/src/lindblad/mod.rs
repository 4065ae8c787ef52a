// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad generators, time evolution, steady states and two-time
//! correlation spectra.
//!
//! The generator is
//!
//! dρ/dt = -i[H, ρ] + Σ_k r_k (L_k ρ L_k† - ½{L_k† L_k, ρ}).
//!
//! Density matrices are vectorized by column stacking,
//! `vec(ρ)[i + j d] = ρ[i, j]`, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

mod correlation;
mod evolve;
mod steady;

pub use correlation::{correlation_function, correlation_spectrum};
pub use evolve::{evolve, propagate, EvolveOptions, Trajectory};
pub use steady::{steady_state, EIG_NULL_SPACE_MAX_SIDE};

use std::sync::OnceLock;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::Operator;

type C64 = Complex64;

/// A jump operator together with its rate.
#[derive(Debug, Clone)]
pub struct Dissipator {
    operator: Operator,
    rate: f64,
}

impl Dissipator {
    pub fn new(operator: Operator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::domain(format!("dissipator rate must be >= 0, got {rate}")));
        }
        Ok(Dissipator { operator, rate })
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Lindblad generator. Holds the Hamiltonian and jump operators; the dense
/// `d² × d²` superoperator is built on first use.
#[derive(Debug)]
pub struct Liouvillian {
    hamiltonian: Operator,
    dissipators: Vec<Dissipator>,
    /// H - (i/2) Σ r L†L
    h_eff: Array2<C64>,
    jumps: Vec<(Array2<C64>, Array2<C64>, f64)>,
    matrix: OnceLock<Array2<C64>>,
}

impl Clone for Liouvillian {
    fn clone(&self) -> Self {
        build_liouvillian(self.hamiltonian.clone(), self.dissipators.clone())
            .expect("already validated")
    }
}

/// Assembles the generator from a Hermitian Hamiltonian and dissipators.
pub fn build_liouvillian(h: Operator, dissipators: Vec<Dissipator>) -> Result<Liouvillian> {
    h.hermitian_check()?;
    let d = h.dim();
    let mut h_eff = h.data().clone();
    let mut jumps = Vec::with_capacity(dissipators.len());
    for dis in &dissipators {
        if dis.operator.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: dis.operator.dim(),
            });
        }
        if dis.operator.dims() != h.dims() {
            return Err(Error::domain(format!(
                "dissipator factor dims {:?} differ from Hamiltonian dims {:?}",
                dis.operator.dims(),
                h.dims()
            )));
        }
        if dis.rate == 0.0 {
            continue;
        }
        let l = dis.operator.data().clone();
        let l_dag = l.t().mapv(|z| z.conj());
        let k = l_dag.dot(&l);
        h_eff.scaled_add(C64::new(0.0, -0.5 * dis.rate), &k);
        jumps.push((l, l_dag, dis.rate));
    }
    Ok(Liouvillian {
        hamiltonian: h,
        dissipators,
        h_eff,
        jumps,
        matrix: OnceLock::new(),
    })
}

impl Liouvillian {
    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn dissipators(&self) -> &[Dissipator] {
        &self.dissipators
    }

    /// Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn dims(&self) -> &[usize] {
        self.hamiltonian.dims()
    }

    /// dρ/dt for an arbitrary (not necessarily physical) operator ρ.
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let minus_i = C64::new(0.0, -1.0);
        let h_rho = self.h_eff.dot(rho);
        // ρ H_eff† = (H_eff ρ†)†
        let rho_h = rho.dot(&self.h_eff.t().mapv(|z| z.conj()));
        let mut out = h_rho.mapv(|z| z * minus_i);
        out.scaled_add(C64::new(0.0, 1.0), &rho_h);
        for (l, l_dag, rate) in &self.jumps {
            let t = l.dot(rho).dot(l_dag);
            out.scaled_add(C64::new(*rate, 0.0), &t);
        }
        out
    }

    /// Dense superoperator in the column-stacking convention.
    pub fn matrix(&self) -> &Array2<C64> {
        self.matrix.get_or_init(|| self.build_matrix())
    }

    fn build_matrix(&self) -> Array2<C64> {
        let d = self.dim();
        let n = d * d;
        let mut m = Array2::<C64>::zeros((n, n));
        let minus_i = C64::new(0.0, -1.0);
        let plus_i = C64::new(0.0, 1.0);
        // -i (I ⊗ H_eff): row i + j d, col k + j d
        for j in 0..d {
            for i in 0..d {
                for k in 0..d {
                    let h = self.h_eff[[i, k]];
                    if h != C64::new(0.0, 0.0) {
                        m[[i + j * d, k + j * d]] += minus_i * h;
                    }
                }
            }
        }
        // +i (conj(H_eff) ⊗ I): row i + j d, col i + l d, value conj(H_eff[j, l])
        for j in 0..d {
            for l in 0..d {
                let h = self.h_eff[[j, l]].conj();
                if h == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..d {
                    m[[i + j * d, i + l * d]] += plus_i * h;
                }
            }
        }
        // r (conj(L) ⊗ L): row i + j d, col k + l d, value conj(L[j,l]) L[i,k]
        for (l_op, _, rate) in &self.jumps {
            let nz: Vec<(usize, usize, C64)> = l_op
                .indexed_iter()
                .filter(|(_, z)| z.norm() != 0.0)
                .map(|((r, c), &z)| (r, c, z))
                .collect();
            for &(j, l, x) in &nz {
                let outer = x.conj() * *rate;
                for &(i, k, y) in &nz {
                    m[[i + j * d, k + l * d]] += outer * y;
                }
            }
        }
        m
    }

    /// Largest |⟨⟨I| L|_col| over columns: zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let m = self.matrix();
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d {
                s += m[[i + i * d, col]];
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    /// Largest magnitude among the generator's coefficients, used to scale
    /// absolute tolerances.
    pub fn scale(&self) -> f64 {
        let mut s = self.h_eff.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (l, _, rate) in &self.jumps {
            s = s.max(rate * l.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max));
        }
        s.max(1e-300)
    }
}

/// Column-stacking vectorization.
pub fn vectorize(x: &Array2<C64>) -> Array1<C64> {
    let d = x.nrows();
    Array1::from_shape_fn(d * x.ncols(), |idx| x[[idx % d, idx / d]])
}

pub fn unvectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    assert_eq!(v.len(), d * d, "vector length must be d^2");
    Array2::from_shape_fn((d, d), |(i, j)| v[i + j * d])
}
