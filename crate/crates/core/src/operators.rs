// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense operators on truncated tensor-product Hilbert spaces.
//!
//! The hybrid space is always ordered qubit ⊗ cavity ⊗ mechanics
//! ([`TENSOR_ORDER`]); helpers on [`HybridSpace`] embed local operators in
//! that order so callers never build Kronecker products by hand.

use std::ops::{Add, Mul, Sub};

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{EffectiveParams, SystemParams};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance for Hermiticity of generated observables and Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Qubit,
    Cavity,
    Mechanics,
}

/// Global ordering of the tensor factors.
pub const TENSOR_ORDER: [Subsystem; 3] = [Subsystem::Qubit, Subsystem::Cavity, Subsystem::Mechanics];

/// Square complex matrix with subsystem dimension metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    data: Array2<C64>,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(data: Array2<C64>, dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if data.nrows() != data.ncols() {
            return Err(Error::domain(format!(
                "operator matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                found: data.nrows(),
            });
        }
        Ok(Operator { data, dims })
    }

    /// Single-factor operator.
    pub fn from_matrix(data: Array2<C64>) -> Result<Self> {
        let n = data.nrows();
        Operator::new(data, vec![n])
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Operator {
            data: Array2::eye(n),
            dims: dims.to_vec(),
        }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Operator {
            data: Array2::zeros((n, n)),
            dims: dims.to_vec(),
        }
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<C64> {
        self.data
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn dag(&self) -> Operator {
        Operator {
            data: self.data.t().mapv(|z| z.conj()),
            dims: self.dims.clone(),
        }
    }

    pub fn scale(&self, c: impl Into<C64>) -> Operator {
        let c = c.into();
        Operator {
            data: self.data.mapv(|z| z * c),
            dims: self.dims.clone(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Largest element of |H - H^dag|.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn hermitian_check(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect < HERMITIAN_TOL {
            Ok(())
        } else {
            Err(Error::NotHermitian { defect })
        }
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn eigvalsh(&self) -> Result<Array1<f64>> {
        Ok(self.data.eigvalsh(UPLO::Lower)?)
    }

    fn check_same_dims(&self, other: &Operator) {
        assert_eq!(
            self.dims, other.dims,
            "operator dimension mismatch: {:?} vs {:?}",
            self.dims, other.dims
        );
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.check_same_dims(rhs);
        Operator {
            data: self.data.dot(&rhs.data),
            dims: self.dims.clone(),
        }
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.check_same_dims(rhs);
        Operator {
            data: &self.data + &rhs.data,
            dims: self.dims.clone(),
        }
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.check_same_dims(rhs);
        Operator {
            data: &self.data - &rhs.data,
            dims: self.dims.clone(),
        }
    }
}

/// Kronecker product of two matrices.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == ZERO {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

/// Tensor product in the given factor order; dimension lists are concatenated.
pub fn tensor(ops: &[&Operator]) -> Operator {
    assert!(!ops.is_empty(), "tensor of an empty list");
    let mut data = ops[0].data.clone();
    let mut dims = ops[0].dims.clone();
    for op in &ops[1..] {
        data = kron(&data, &op.data);
        dims.extend_from_slice(&op.dims);
    }
    Operator { data, dims }
}

/// Fock lowering operator truncated to `n_cut` levels.
pub fn annihilation(n_cut: usize) -> Result<Operator> {
    if n_cut < 2 {
        return Err(Error::domain(format!("Fock cutoff must be >= 2, got {n_cut}")));
    }
    let mut m = Array2::zeros((n_cut, n_cut));
    for n in 1..n_cut {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::from_matrix(m)
}

pub fn creation(n_cut: usize) -> Result<Operator> {
    Ok(annihilation(n_cut)?.dag())
}

pub fn number(n_cut: usize) -> Result<Operator> {
    let mut m = Array2::zeros((n_cut, n_cut));
    for n in 0..n_cut {
        m[[n, n]] = C64::new(n as f64, 0.0);
    }
    Operator::from_matrix(m)
}

// Qubit basis is (|e>, |g>): sigma_z = diag(+1, -1), sigma_minus = |g><e|.

pub fn sigma_z() -> Operator {
    let m = ndarray::arr2(&[[ONE, ZERO], [ZERO, -ONE]]);
    Operator::from_matrix(m).expect("2x2")
}

pub fn sigma_x() -> Operator {
    let m = ndarray::arr2(&[[ZERO, ONE], [ONE, ZERO]]);
    Operator::from_matrix(m).expect("2x2")
}

pub fn sigma_y() -> Operator {
    let i = C64::new(0.0, 1.0);
    let m = ndarray::arr2(&[[ZERO, -i], [i, ZERO]]);
    Operator::from_matrix(m).expect("2x2")
}

pub fn sigma_minus() -> Operator {
    let m = ndarray::arr2(&[[ZERO, ZERO], [ONE, ZERO]]);
    Operator::from_matrix(m).expect("2x2")
}

pub fn sigma_plus() -> Operator {
    sigma_minus().dag()
}

/// The truncated qubit ⊗ cavity ⊗ mechanics space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HybridSpace {
    pub n_a: usize,
    pub n_b: usize,
}

impl HybridSpace {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a < 2 || n_b < 2 {
            return Err(Error::domain(format!(
                "cutoffs must be >= 2, got (N_a, N_b) = ({n_a}, {n_b})"
            )));
        }
        Ok(HybridSpace { n_a, n_b })
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![2, self.n_a, self.n_b]
    }

    pub fn dim(&self) -> usize {
        2 * self.n_a * self.n_b
    }

    /// Index of a subsystem in the tensor order.
    pub fn position(sub: Subsystem) -> usize {
        TENSOR_ORDER.iter().position(|&s| s == sub).expect("in order")
    }

    /// Embeds a single-subsystem operator into the full space.
    pub fn embed(&self, sub: Subsystem, op: &Operator) -> Operator {
        let local = [2, self.n_a, self.n_b];
        let pos = Self::position(sub);
        assert_eq!(op.dim(), local[pos], "local operator size for {sub:?}");
        let ids: Vec<Operator> = local.iter().map(|&n| Operator::identity(&[n])).collect();
        let factors: Vec<&Operator> = (0..3).map(|k| if k == pos { op } else { &ids[k] }).collect();
        tensor(&factors)
    }

    pub fn a(&self) -> Operator {
        self.embed(Subsystem::Cavity, &annihilation(self.n_a).expect("n_a >= 2"))
    }

    pub fn b(&self) -> Operator {
        self.embed(Subsystem::Mechanics, &annihilation(self.n_b).expect("n_b >= 2"))
    }

    pub fn sigma_z(&self) -> Operator {
        self.embed(Subsystem::Qubit, &sigma_z())
    }

    pub fn sigma_x(&self) -> Operator {
        self.embed(Subsystem::Qubit, &sigma_x())
    }

    pub fn sigma_minus(&self) -> Operator {
        self.embed(Subsystem::Qubit, &sigma_minus())
    }

    pub fn identity(&self) -> Operator {
        Operator::identity(&self.dims())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HamiltonianOptions {
    /// Keep the dispersive term (2 g^2 / omega_q) cos^2(phi) b^dag b sigma_z
    /// that the linearized Hamiltonian neglects.
    pub third_order: bool,
}

/// Linearized hybrid Hamiltonian in the displaced, drive-rotating frame:
///
/// H = -Δq/2 σz + Ω_R/2 σx + G (b + b†) σz + Ω b†b - Δc a†a + G_o (a + a†)(b + b†)
///
/// with Δq, Δc, Ω_R, G, G_o taken from `eff`.
pub fn hybrid_hamiltonian(
    p: &SystemParams,
    eff: &EffectiveParams,
    space: HybridSpace,
    opts: HamiltonianOptions,
) -> Result<Operator> {
    let a = space.a();
    let b = space.b();
    let sz = space.sigma_z();
    let sx = space.sigma_x();
    let x_a = &a + &a.dag();
    let x_b = &b + &b.dag();
    let n_a = &a.dag() * &a;
    let n_b = &b.dag() * &b;

    let mut h = sz.scale(-eff.delta_q_shifted / 2.0);
    h = &h + &sx.scale(eff.rabi_eff / 2.0);
    h = &h + &(&x_b * &sz).scale(eff.g_eff);
    h = &h + &n_b.scale(p.omega_m);
    h = &h + &n_a.scale(-eff.delta_c_shifted);
    h = &h + &(&x_a * &x_b).scale(eff.g_o_eff);
    if opts.third_order {
        if p.omega_q <= 0.0 {
            return Err(Error::domain("third-order term needs omega_q > 0"));
        }
        let chi = 2.0 * p.g * p.g / p.omega_q * p.phi.cos().powi(2);
        h = &h + &(&n_b * &sz).scale(chi);
    }
    h.hermitian_check()?;
    Ok(h)
}

/// Density matrix on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: Array2<C64>,
    dims: Vec<usize>,
}

/// Tolerances of the density-matrix invariants.
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validated constructor: unit trace, Hermitian, numerically positive.
    pub fn new(data: Array2<C64>, dims: Vec<usize>) -> Result<Self> {
        let rho = DensityMatrix::new_unchecked(data, dims)?;
        rho.validate(TRACE_TOL, HERMITIAN_TOL, POSITIVITY_TOL)?;
        Ok(rho)
    }

    /// Shape-checked only; used for intermediate states that are validated
    /// at checkpoints.
    pub fn new_unchecked(data: Array2<C64>, dims: Vec<usize>) -> Result<Self> {
        let op = Operator::new(data, dims)?;
        Ok(DensityMatrix {
            data: op.data,
            dims: op.dims,
        })
    }

    pub fn validate(&self, trace_tol: f64, herm_tol: f64, pos_tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - ONE).norm() > trace_tol {
            return Err(Error::Physicality(format!(
                "density matrix trace {tr} differs from 1 by more than {trace_tol:.1e}"
            )));
        }
        let herm = self.as_operator().hermitian_defect();
        if herm > herm_tol {
            return Err(Error::Physicality(format!(
                "density matrix Hermiticity defect {herm:.3e} exceeds {herm_tol:.1e}"
            )));
        }
        let min_eig = self.min_eigenvalue()?;
        if min_eig < -pos_tol {
            return Err(Error::Physicality(format!(
                "density matrix eigenvalue {min_eig:.3e} below -{pos_tol:.1e}"
            )));
        }
        Ok(())
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_operator(&self) -> Operator {
        Operator {
            data: self.data.clone(),
            dims: self.dims.clone(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    /// Tr(A ρ).
    pub fn expect(&self, op: &Operator) -> C64 {
        assert_eq!(op.dim(), self.dim(), "observable dimension");
        let a = op.data();
        let mut acc = ZERO;
        for i in 0..self.dim() {
            for k in 0..self.dim() {
                acc += a[[i, k]] * self.data[[k, i]];
            }
        }
        acc
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        // symmetrize so rounding-level anti-Hermitian parts do not leak in
        let h = (&self.data + &self.data.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        let ev = h.eigvalsh(UPLO::Lower)?;
        Ok(ev[0])
    }

    /// Fock-level populations of subsystem `k` (reduced diagonal).
    pub fn level_populations(&self, k: usize) -> Vec<f64> {
        let dims = &self.dims;
        let inner: usize = dims[k + 1..].iter().product();
        let n_k = dims[k];
        let mut pops = vec![0.0; n_k];
        for i in 0..self.dim() {
            let level = (i / inner) % n_k;
            pops[level] += self.data[[i, i]].re;
        }
        pops
    }

    /// Population of the highest retained level of subsystem `k`.
    pub fn top_level_population(&self, k: usize) -> f64 {
        *self.level_populations(k).last().expect("non-empty")
    }

    pub fn pure(state: &Array1<C64>, dims: Vec<usize>) -> Result<Self> {
        let n = state.len();
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = state[i] * state[j].conj() / norm;
            }
        }
        DensityMatrix::new(m, dims)
    }

    /// Fock state |k> in an `n_cut`-level mode.
    pub fn fock(n_cut: usize, k: usize) -> Result<Self> {
        if k >= n_cut {
            return Err(Error::domain(format!("Fock level {k} outside cutoff {n_cut}")));
        }
        let mut m = Array2::zeros((n_cut, n_cut));
        m[[k, k]] = ONE;
        DensityMatrix::new(m, vec![n_cut])
    }

    /// Thermal state of mean occupancy `n_mean`, renormalized on the
    /// truncated space.
    pub fn thermal(n_cut: usize, n_mean: f64) -> Result<Self> {
        if n_mean < 0.0 {
            return Err(Error::domain("thermal occupancy must be >= 0"));
        }
        let mut m = Array2::zeros((n_cut, n_cut));
        let ratio = n_mean / (1.0 + n_mean);
        let weights: Vec<f64> = (0..n_cut).map(|k| ratio.powi(k as i32)).collect();
        let z: f64 = weights.iter().sum();
        for (k, w) in weights.iter().enumerate() {
            m[[k, k]] = C64::new(w / z, 0.0);
        }
        DensityMatrix::new(m, vec![n_cut])
    }

    /// Qubit ground state |g>.
    pub fn qubit_ground() -> Self {
        let m = ndarray::arr2(&[[ZERO, ZERO], [ZERO, ONE]]);
        DensityMatrix::new(m, vec![2]).expect("valid")
    }

    pub fn product(states: &[&DensityMatrix]) -> Self {
        let ops: Vec<Operator> = states.iter().map(|s| s.as_operator()).collect();
        let refs: Vec<&Operator> = ops.iter().collect();
        let t = tensor(&refs);
        DensityMatrix {
            data: t.data,
            dims: t.dims,
        }
    }
}
