// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, FactorizeInto, ReciprocalConditionNum, Solve};
use num_complex::Complex64;

use super::{unvectorize, vectorize, Liouvillian};
use crate::error::{Error, Result};
use crate::operators::{DensityMatrix, POSITIVITY_TOL};

type C64 = Complex64;

/// Largest superoperator side for which the null space is counted through a
/// full eigendecomposition. Bigger generators rely on the conditioning of the
/// trace-constrained solve instead.
pub const EIG_NULL_SPACE_MAX_SIDE: usize = 1024;

const NULL_EIG_TOL: f64 = 1e-9;
const RCOND_MIN: f64 = 1e-13;
const RESIDUAL_TOL: f64 = 1e-10;

/// Unique stationary state of the generator.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.dim();
    let n = d * d;
    let m = l.matrix();
    let scale = l.scale();

    if n <= EIG_NULL_SPACE_MAX_SIDE {
        let ev = m.clone().eig()?.0;
        let count = ev.iter().filter(|z| z.norm() < NULL_EIG_TOL * scale).count();
        if count != 1 {
            return Err(Error::Multiplicity {
                count,
                tolerance: NULL_EIG_TOL * scale,
            });
        }
    }

    // Replace the first row by the trace functional: Tr ρ = 1.
    let mut a = m.clone();
    for col in 0..n {
        a[[0, col]] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        a[[0, i + i * d]] = C64::new(1.0, 0.0);
    }
    let mut rhs = Array1::<C64>::zeros(n);
    rhs[0] = C64::new(1.0, 0.0);
    let lu = a.factorize_into()?;
    let rcond = lu.rcond()?;
    if !(rcond >= RCOND_MIN) {
        return Err(Error::Multiplicity {
            count: 2,
            tolerance: rcond,
        });
    }
    let x = lu.solve(&rhs)?;
    let rho = unvectorize(&x, d);
    let rho = hermitize(&rho);

    let residual = m
        .dot(&vectorize(&rho))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOL * scale.max(1.0) {
        return Err(Error::Solve(format!(
            "steady-state residual {residual:.3e} above tolerance"
        )));
    }
    let dm = DensityMatrix::new_unchecked(rho, l.dims().to_vec())?;
    let min = dm.min_eigenvalue()?;
    if min < -POSITIVITY_TOL {
        return Err(Error::Physicality(format!(
            "steady state has negative eigenvalue {min:.3e}"
        )));
    }
    Ok(dm)
}

fn hermitize(x: &Array2<C64>) -> Array2<C64> {
    let xt = x.t().mapv(|z| z.conj());
    (x + &xt).mapv(|z| z * 0.5)
}
