// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-time correlations through the quantum regression theorem.

use ndarray::Array2;
use ndarray_linalg::{FactorizeInto, ReciprocalConditionNum, Solve};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{propagate, unvectorize, vectorize, EvolveOptions, Liouvillian};
use crate::error::{Error, Result};
use crate::operators::{DensityMatrix, Operator};

type C64 = Complex64;

const RESOLVENT_RCOND_MIN: f64 = 1e-14;

fn fluctuation_source(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    a: &Operator,
) -> Result<Array2<C64>> {
    if a.dim() != l.dim() || rho_ss.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: a.dim().max(rho_ss.dim()),
        });
    }
    let mean = rho_ss.expect(a);
    let da = a.data() - &Array2::from_diag_elem(a.dim(), mean);
    Ok(da.dot(rho_ss.data()))
}

/// Half-sided spectrum S(ω) = ∫₀^∞ e^{iωt} ⟨ΔA(t) ΔA(0)⟩ dt for each ω.
///
/// Evaluated as Tr[A y] with (-L - iω + |ρ_ss⟩⟩⟨⟨I|) y = vec(ΔA ρ_ss). The
/// rank-one term lifts the zero mode; it does not change the solution because
/// ΔA ρ_ss is traceless.
pub fn correlation_spectrum(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    a: &Operator,
    omegas: &[f64],
) -> Result<Vec<C64>> {
    let d = l.dim();
    let n = d * d;
    let src = vectorize(&fluctuation_source(l, rho_ss, a)?);
    let rho_vec = vectorize(rho_ss.data());
    let mut base = l.matrix().mapv(|z| -z);
    for r in 0..n {
        for i in 0..d {
            base[[r, i + i * d]] += rho_vec[r];
        }
    }
    let a_t = a.data().t().to_owned();
    omegas
        .par_iter()
        .map(|&w| {
            let mut m = base.clone();
            for k in 0..n {
                m[[k, k]] -= C64::new(0.0, w);
            }
            let lu = m.factorize_into()?;
            let rc = lu.rcond()?;
            if !(rc >= RESOLVENT_RCOND_MIN) {
                return Err(Error::Solve(format!(
                    "resolvent singular at omega = {w} (rcond {rc:.2e})"
                )));
            }
            let y = lu.solve(&src)?;
            // Tr[A Y] = Σ_ij A[j,i] Y[i,j] = Σ A^T[i,j] Y[i,j]
            let yv = unvectorize(&y, d);
            Ok((&a_t * &yv).sum())
        })
        .collect()
}

/// Time-domain correlation ⟨ΔA(t) ΔA(0)⟩ on a grid, by propagating ΔA ρ_ss.
pub fn correlation_function(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    a: &Operator,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<C64>> {
    let src = fluctuation_source(l, rho_ss, a)?;
    let xs = propagate(l, &src, t_grid, opts)?;
    let a_t = a.data().t().to_owned();
    Ok(xs.iter().map(|x| (&a_t * x).sum()).collect())
}
