//! Two-qubit entanglement: spin flip, concurrence and entanglement of
//! formation, plus partition surveys built on [`bunch_reduce`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bunch::{bunch_reduce, enumerate_partitions, BunchPartition};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, hermitian_part, CMatrix, Tolerances};
use crate::state::DensityMatrix;

/// Eigenvalues below this are zeroed before square roots in the λ chain.
const SQRT_CHAIN_FLOOR: f64 = 1e-14;
const ENTROPY_DOMAIN_TOL: f64 = 1e-12;
const LOG_ZERO: f64 = 1e-300;

/// `−x log₂ x − (1−x) log₂(1−x)` with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-ENTROPY_DOMAIN_TOL..=1.0 + ENTROPY_DOMAIN_TOL).contains(&x) {
        return Err(Error::arg(format!(
            "binary entropy argument {x} is outside [0, 1]"
        )));
    }
    let x = x.clamp(0.0, 1.0);
    let term = |p: f64| if p <= LOG_ZERO { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// `E_f = h((1 + √(1 − C²))/2)`.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::arg(format!("concurrence {c} is outside [0, 1]")));
    }
    binary_entropy(0.5 + 0.5 * (1.0 - c * c).max(0.0).sqrt())
}

fn sigma_yy() -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 0)] = -one;
    m
}

/// `(σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`
pub fn spin_flip(rho4: &CMatrix) -> Result<CMatrix> {
    if rho4.shape() != (4, 4) {
        return Err(Error::arg(format!(
            "spin flip needs a 4x4 matrix, got {}x{}",
            rho4.nrows(),
            rho4.ncols()
        )));
    }
    let yy = sigma_yy();
    Ok(&yy * rho4.conjugate() * &yy)
}

fn check_two_qubit(rho4: &DensityMatrix) -> Result<()> {
    if rho4.n_qubits() != 2 {
        return Err(Error::arg(format!(
            "two-qubit measure applied to {} qubits",
            rho4.n_qubits()
        )));
    }
    rho4.diagnostics().check(&Tolerances::default())
}

/// Descending square roots of the spectrum of `√ρ ρ̃ √ρ`.
fn wootters_lambdas(rho: &CMatrix) -> Result<[f64; 4]> {
    let rho = hermitian_part(rho);
    let sqrt_rho =
        hermitian_eig(&rho)?.map_spectrum(|x| if x <= SQRT_CHAIN_FLOOR { 0.0 } else { x.sqrt() });
    let flipped = spin_flip(&rho)?;
    let r2 = hermitian_part(&(&sqrt_rho * flipped * &sqrt_rho));
    let mu = hermitian_eig(&r2)?.eigenvalues;
    let mut lambdas = [0.0; 4];
    for (l, m) in lambdas.iter_mut().zip(mu) {
        *l = if m <= SQRT_CHAIN_FLOOR { 0.0 } else { m.sqrt() };
    }
    Ok(lambdas)
}

fn concurrence_from_lambdas(l: &[f64; 4]) -> f64 {
    (l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0)
}

/// Wootters concurrence `max{0, λ₁ − λ₂ − λ₃ − λ₄}`.
pub fn concurrence(rho4: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho4)?;
    Ok(concurrence_from_lambdas(&wootters_lambdas(rho4.matrix())?))
}

/// Concurrence, entanglement of formation and λ spectrum of one two-qubit
/// state, optionally tagged with the partition it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub eof: f64,
    /// Descending, clamped at zero.
    pub lambdas: [f64; 4],
    pub partition: Option<BunchPartition>,
    /// Pattern weights of the underlying bunch reduction, when there is one.
    pub etas: Vec<f64>,
}

/// Entanglement of formation of a two-qubit state.
pub fn eof(rho4: &DensityMatrix) -> Result<EntanglementReport> {
    check_two_qubit(rho4)?;
    let lambdas = wootters_lambdas(rho4.matrix())?;
    let concurrence = concurrence_from_lambdas(&lambdas);
    Ok(EntanglementReport {
        concurrence,
        eof: eof_from_concurrence(concurrence)?,
        lambdas,
        partition: None,
        etas: Vec::new(),
    })
}

/// Bunch reduction followed by [`eof`].
pub fn eof_bunches(rho: &DensityMatrix, partition: &BunchPartition) -> Result<EntanglementReport> {
    let red = bunch_reduce(rho, partition)?;
    let mut report = eof(&red.rho_ab)?;
    report.etas = red.etas();
    report.partition = Some(red.partition);
    Ok(report)
}

/// One report per partition from [`enumerate_partitions`], in its order.
pub fn survey(
    rho: &DensityMatrix,
    max_bunch: Option<usize>,
    full_cover_only: bool,
) -> Result<Vec<EntanglementReport>> {
    enumerate_partitions(rho.n_qubits(), max_bunch, full_cover_only)
        .iter()
        .map(|p| eof_bunches(rho, p))
        .collect()
}

/// [`survey`] fanned out over a pool of `jobs` worker threads. Row order and
/// values do not depend on `jobs`.
pub fn survey_parallel(
    rho: &DensityMatrix,
    max_bunch: Option<usize>,
    full_cover_only: bool,
    jobs: usize,
) -> Result<Vec<EntanglementReport>> {
    let partitions = enumerate_partitions(rho.n_qubits(), max_bunch, full_cover_only);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::arg(format!("cannot start worker pool: {e}")))?;
    pool.install(|| partitions.par_iter().map(|p| eof_bunches(rho, p)).collect())
}
