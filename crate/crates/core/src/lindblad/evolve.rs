// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand–Prince 5(4) integration of the master equation.

use ndarray::Array2;
use num_complex::Complex64;

use super::Liouvillian;
use crate::error::{Error, Result};
use crate::operators::DensityMatrix;

type C64 = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step; `None` picks one from the generator scale.
    pub first_step: Option<f64>,
    /// Checkpoint tolerance on |Tr ρ - 1|.
    pub trace_tol: f64,
    /// Smallest eigenvalue allowed at a checkpoint.
    pub positivity_tol: f64,
    /// Skip the eigenvalue check (it costs one Hermitian eigensolve per checkpoint).
    pub check_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 10_000_000,
            first_step: None,
            trace_tol: 1e-9,
            positivity_tol: -1e-8,
            check_positivity: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn expect(&self, op: &crate::operators::Operator) -> Vec<C64> {
        self.states.iter().map(|s| s.expect(op)).collect()
    }
}

// Dormand–Prince tableau (autonomous, so the nodes c_i are not needed)
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*, the embedded error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(y: &Array2<C64>, h: f64, terms: &[(f64, &Array2<C64>)]) -> Array2<C64> {
    let mut out = y.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            out.scaled_add(C64::new(h * c, 0.0), k);
        }
    }
    out
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    if t_grid[0] != 0.0 {
        return Err(Error::domain("time grid must start at 0"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("time grid must be strictly increasing"));
    }
    Ok(())
}

/// Integrates dX/dt = L(X) for an arbitrary operator X and returns X at each
/// grid time. `on_checkpoint` may reject a checkpoint with an error.
fn integrate<F>(
    l: &Liouvillian,
    x0: &Array2<C64>,
    t_grid: &[f64],
    opts: &EvolveOptions,
    mut on_checkpoint: F,
) -> Result<Vec<Array2<C64>>>
where
    F: FnMut(f64, &Array2<C64>) -> Result<()>,
{
    check_grid(t_grid)?;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut y = x0.clone();
    let mut t = 0.0;
    on_checkpoint(0.0, &y)?;
    out.push(y.clone());
    let t_end = *t_grid.last().unwrap();
    let mut h = opts
        .first_step
        .unwrap_or_else(|| 0.01 / l.scale())
        .min(t_end.max(f64::MIN_POSITIVE));
    let mut k1 = l.apply(&y);
    let mut steps = 0usize;
    for &t_next in &t_grid[1..] {
        while t < t_next {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration {
                    time: t,
                    reason: format!("step budget {} exhausted", opts.max_steps),
                });
            }
            let last = t + h >= t_next;
            let step = if last { t_next - t } else { h };
            if step < 1e-14 * t_next.abs().max(1.0) && !last {
                return Err(Error::Integration {
                    time: t,
                    reason: format!("step size underflow (h = {step:.3e})"),
                });
            }
            let k2 = l.apply(&combo(&y, step, &[(A21, &k1)]));
            let k3 = l.apply(&combo(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = l.apply(&combo(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = l.apply(&combo(
                &y,
                step,
                &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            ));
            let k6 = l.apply(&combo(
                &y,
                step,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ));
            let y_new = combo(
                &y,
                step,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let k7 = l.apply(&y_new);
            let err = combo(
                &Array2::zeros(y.raw_dim()),
                step,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            let mut acc = 0.0;
            for ((e, a), b) in err.iter().zip(y.iter()).zip(y_new.iter()) {
                let sc = opts.atol + opts.rtol * a.norm().max(b.norm());
                acc += (e.norm() / sc).powi(2);
            }
            let err_norm = (acc / err.len() as f64).sqrt();
            if !err_norm.is_finite() {
                return Err(Error::Integration {
                    time: t,
                    reason: "non-finite state".into(),
                });
            }
            if err_norm <= 1.0 {
                t = if last { t_next } else { t + step };
                y = y_new;
                k1 = k7;
                let factor = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a truncated final step says nothing about the natural step size
                if !last || step >= h {
                    h = step * factor;
                }
            } else {
                h = step * (0.9 * err_norm.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        on_checkpoint(t, &y)?;
        out.push(y.clone());
    }
    Ok(out)
}

/// Propagates an arbitrary operator under the generator (used for
/// regression-theorem correlation functions, where X = A ρ is not a state).
pub fn propagate(
    l: &Liouvillian,
    x0: &Array2<C64>,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<Array2<C64>>> {
    if x0.nrows() != l.dim() || x0.ncols() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: x0.nrows(),
        });
    }
    integrate(l, x0, t_grid, opts, |_, _| Ok(()))
}

/// Evolves a density matrix and checks trace, Hermiticity and positivity at
/// every grid time. No renormalization is applied.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if rho0.dims() != l.dims() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: rho0.dim(),
        });
    }
    let dims = rho0.dims().to_vec();
    let raw = integrate(l, rho0.data(), t_grid, opts, |t, y| {
        let tr: C64 = y.diag().sum();
        if (tr - 1.0).norm() > opts.trace_tol {
            return Err(Error::Integration {
                time: t,
                reason: format!("trace drift {:.3e}", (tr - 1.0).norm()),
            });
        }
        let herm = y
            .indexed_iter()
            .map(|((i, j), z)| (z - y[[j, i]].conj()).norm())
            .fold(0.0, f64::max);
        if herm > 1e-8 {
            return Err(Error::Integration {
                time: t,
                reason: format!("hermiticity defect {herm:.3e}"),
            });
        }
        if opts.check_positivity {
            let dm = DensityMatrix::new_unchecked(y.clone(), dims.clone())?;
            let min = dm.min_eigenvalue()?;
            if min < opts.positivity_tol {
                return Err(Error::Integration {
                    time: t,
                    reason: format!("negative eigenvalue {min:.3e}"),
                });
            }
        }
        Ok(())
    })?;
    let states = raw
        .into_iter()
        .map(|m| DensityMatrix::new_unchecked(m, dims.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
    })
}
