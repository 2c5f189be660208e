//! Dense complex Hermitian kernels: cyclic Jacobi eigendecomposition,
//! PSD square root and density-matrix diagnostics.
//!
//! Matrices here are tiny (4×4 in the measures pipeline, at most 2^10 on a
//! side for diagnostics), so a plain cyclic Jacobi sweep is both accurate and
//! fast enough.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const CONVERGENCE_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Relative floor below which eigenvalues are treated as zero when taking
/// square roots.
pub(crate) const SQRT_FLOOR: f64 = 1e-14;

/// Spectrum and eigenbasis of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose k-th column belongs to `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// `V f(Λ) V†` for a real function applied to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for c in 0..n {
                let vc = v[(c, k)].conj() * w;
                for r in 0..n {
                    out[(r, c)] += v[(r, k)] * vc;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|x| x)
    }
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise distance between two equally shaped matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// max |H − H†| over all entries.
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0_f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    worst
}

/// (H + H†)/2
pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

/// Full eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations.
pub fn hermitian_eig(h: &CMatrix) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(Error::arg(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = max_abs(h).max(1.0);
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::Invariant {
            invariant: "hermiticity",
            defect,
            tolerance: HERMITIAN_TOL * scale,
        });
    }
    jacobi(hermitian_part(h))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for c in 0..n {
        for r in 0..n {
            if r != c {
                sum += a[(r, c)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn jacobi(mut a: CMatrix) -> Result<EigenDecomposition> {
    let n = a.nrows();
    let mut v = CMatrix::identity(n, n);
    let target = CONVERGENCE_TOL * a.norm();

    let mut converged = off_diagonal_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep Jacobi output order
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[(p, q)]`.
///
/// The rotation is `U = D·G` where `D` removes the phase of `a[(p, q)]` and
/// `G` is the real symmetric Jacobi rotation of the resulting 2×2 block.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    let n = a.nrows();
    // A ← A U, V ← V U
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    // A ← U† A
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Hermitian PSD square root `S` with `S·S = H`.
///
/// Eigenvalues down to −1e-10·max(1, ‖H‖) are clamped to zero; anything more
/// negative is rejected.
pub fn psd_sqrt(h: &CMatrix) -> Result<CMatrix> {
    psd_sqrt_with_floor(h, SQRT_FLOOR)
}

pub(crate) fn psd_sqrt_with_floor(h: &CMatrix, rel_floor: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(h)?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let scale = top.abs().max(1.0);
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL * scale {
        return Err(Error::Invariant {
            invariant: "positive semidefinite",
            defect: -min,
            tolerance: PSD_TOL * scale,
        });
    }
    let floor = rel_floor * scale;
    let s = eig.map_spectrum(|lam| if lam <= floor { 0.0 } else { lam.sqrt() });
    Ok(hermitian_part(&s))
}

/// Validity defects of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDiagnostics {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

/// Acceptance thresholds for [`DensityDiagnostics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    /// Most negative eigenvalue still accepted, as a positive magnitude.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
        }
    }
}

impl DensityDiagnostics {
    /// First violated invariant, if any. NaN diagnostics count as violations.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn check(&self, tol: &Tolerances) -> Result<()> {
        if !(self.hermiticity_defect <= tol.hermiticity) {
            return Err(Error::Invariant {
                invariant: "hermiticity",
                defect: self.hermiticity_defect,
                tolerance: tol.hermiticity,
            });
        }
        if !(self.trace_defect <= tol.trace) {
            return Err(Error::Invariant {
                invariant: "unit trace",
                defect: self.trace_defect,
                tolerance: tol.trace,
            });
        }
        if !(self.min_eigenvalue >= -tol.psd) {
            return Err(Error::Invariant {
                invariant: "positive semidefinite",
                defect: -self.min_eigenvalue,
                tolerance: tol.psd,
            });
        }
        Ok(())
    }
}

/// Hermiticity, trace and positivity defects of a square matrix.
///
/// `min_eigenvalue` is NaN only if the eigensolver fails, which requires
/// non-finite input.
pub fn diagnose_density(rho: &CMatrix) -> DensityDiagnostics {
    assert!(rho.is_square(), "diagnose_density needs a square matrix");
    let min_eigenvalue = jacobi(hermitian_part(rho))
        .ok()
        .and_then(|e| e.eigenvalues.last().copied())
        .unwrap_or(f64::NAN);
    DensityDiagnostics {
        hermiticity_defect: hermiticity_defect(rho),
        trace_defect: (rho.trace() - Complex64::new(1.0, 0.0)).norm(),
        min_eigenvalue,
    }
}
