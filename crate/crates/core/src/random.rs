//! Random ensembles used by property and acceptance tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::numerics::CMatrix;
use crate::state::{DensityMatrix, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Independent complex Gaussian amplitudes, normalized.
pub fn random_pure<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<StateVector> {
    let amps = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
    StateVector::new(n_qubits, amps)
}

/// `G G† / tr(G G†)` for a square complex Gaussian `G`.
pub fn random_mixed<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = 1usize << n_qubits;
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let gram = &g * g.adjoint();
    let tr = gram.trace().re;
    let rho = crate::numerics::hermitian_part(&gram.unscale(tr));
    DensityMatrix::new(rho)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    crate::numerics::hermitian_part(&g)
}

/// Haar-random single-qubit unitary (normalized Gaussian quaternion times a
/// random global phase).
pub fn random_qubit_unitary<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let a = gaussian(rng);
    let b = gaussian(rng);
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    CMatrix::from_row_slice(
        2,
        2,
        &[a * phase, -b.conj() * phase, b * phase, a.conj() * phase],
    )
}
