//! Pure states, density matrices, the named state families and the ordinary
//! partial trace.
//!
//! Qubits are labelled `1..=n`. Qubit 1 is the most significant bit of the
//! flattened computational-basis index, so `|i1 i2 … in>` sits at
//! `Σ i_k · 2^(n−k)`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{diagnose_density, CMatrix, DensityDiagnostics, Tolerances};

pub const DEFAULT_MAX_PURE_QUBITS: usize = 16;
pub const DEFAULT_MAX_MIXED_QUBITS: usize = 10;
/// Environment variable overriding both dense capacity caps.
pub const MAX_QUBITS_ENV: &str = "BUNCHENT_MAX_QUBITS";
const HARD_MAX_QUBITS: usize = 30;

const NORM_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Dense capacity caps in qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub pure: usize,
    pub mixed: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            pure: DEFAULT_MAX_PURE_QUBITS,
            mixed: DEFAULT_MAX_MIXED_QUBITS,
        }
    }
}

impl Limits {
    /// Defaults, with both caps replaced by `BUNCHENT_MAX_QUBITS` when set to
    /// a valid integer.
    pub fn from_env() -> Self {
        match std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(cap) => {
                let cap = cap.min(HARD_MAX_QUBITS);
                Limits {
                    pure: cap,
                    mixed: cap,
                }
            }
            None => Limits::default(),
        }
    }
}

/// Process-wide caps, read from the environment once.
pub fn limits() -> Limits {
    static LIMITS: OnceLock<Limits> = OnceLock::new();
    *LIMITS.get_or_init(Limits::from_env)
}

fn check_pure_cap(n: usize) -> Result<()> {
    let cap = limits().pure;
    if n > cap {
        return Err(Error::Capacity {
            what: "pure state",
            requested: n,
            cap,
        });
    }
    Ok(())
}

fn check_mixed_cap(n: usize) -> Result<()> {
    let cap = limits().mixed;
    if n > cap {
        return Err(Error::Capacity {
            what: "density matrix",
            requested: n,
            cap,
        });
    }
    Ok(())
}

/// Bit carried by qubit `label` (1-based) of an `n`-qubit basis index.
#[inline]
pub fn qubit_bit(index: usize, n: usize, label: usize) -> usize {
    (index >> (n - label)) & 1
}

/// Mask of qubit `label` (1-based) in an `n`-qubit basis index.
#[inline]
pub fn qubit_mask(n: usize, label: usize) -> usize {
    1 << (n - label)
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes and normalizes it.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::arg("a state needs at least one qubit"));
        }
        check_pure_cap(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::arg(format!(
                "{} qubits need {} amplitudes, got {}",
                n_qubits,
                1usize << n_qubits,
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::arg("amplitudes must be finite"));
        }
        let mut psi = StateVector {
            n_qubits,
            amplitudes,
        };
        let norm = psi.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::arg("the zero vector is not a state"));
        }
        if (norm - 1.0).abs() > NORM_TOL {
            psi.amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
        Ok(psi)
    }

    fn from_sparse(n_qubits: usize, entries: &[(usize, Complex64)]) -> Result<Self> {
        check_pure_cap(n_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        for &(idx, a) in entries {
            amplitudes[idx] += a;
        }
        StateVector::new(n_qubits, amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` against the default tolerances.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.nrows(), matrix.ncols())?;
        check_mixed_cap(n_qubits)?;
        diagnose_density(&matrix).check(tol)?;
        Ok(DensityMatrix { n_qubits, matrix })
    }

    /// Wraps a matrix produced by a validity-preserving operation.
    pub(crate) fn from_trusted(n_qubits: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n_qubits);
        DensityMatrix { n_qubits, matrix }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn diagnostics(&self) -> DensityDiagnostics {
        diagnose_density(&self.matrix)
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// Number of qubits for a square `2^n × 2^n` shape.
pub fn qubits_for_dim(rows: usize, cols: usize) -> Result<usize> {
    if rows != cols {
        return Err(Error::arg(format!("matrix is {rows}x{cols}, not square")));
    }
    if rows < 2 || !rows.is_power_of_two() {
        return Err(Error::arg(format!(
            "dimension {rows} is not a power of two ≥ 2"
        )));
    }
    Ok(rows.trailing_zeros() as usize)
}

/// One weighted pure component of a mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureTerm {
    pub weight: f64,
    pub state: StateVector,
}

/// Computational basis ket `|bits[0] bits[1] …>`.
pub fn ket_basis(n: usize, bits: &[u8]) -> Result<StateVector> {
    if bits.len() != n {
        return Err(Error::arg(format!("expected {n} bits, got {}", bits.len())));
    }
    if n == 0 {
        return Err(Error::arg("a state needs at least one qubit"));
    }
    let mut index = 0usize;
    for (k, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => index |= qubit_mask(n, k + 1),
            other => return Err(Error::arg(format!("bit value {other} is not 0 or 1"))),
        }
    }
    StateVector::from_sparse(n, &[(index, Complex64::new(1.0, 0.0))])
}

/// Kronecker product; `a` supplies the leading qubits.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let n = a.n_qubits + b.n_qubits;
    check_pure_cap(n)?;
    let mut amplitudes = Vec::with_capacity(a.dim() * b.dim());
    for &x in &a.amplitudes {
        amplitudes.extend(b.amplitudes.iter().map(|&y| x * y));
    }
    StateVector::new(n, amplitudes)
}

/// `(|0…0> + |1…1>)/√2`
pub fn ghz(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::arg(format!("GHZ needs at least 2 qubits, got {n}")));
    }
    check_pure_cap(n)?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector::from_sparse(n, &[(0, h), ((1 << n) - 1, h)])
}

/// `(|0^w 1^(n−w)> + |1^w 0^(n−w)>)/√2`, the Bell-like state with `w`
/// leading zeros in its first branch.
pub fn bell_w_state(n: usize, w: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::arg(format!("bell_w_state needs n ≥ 2, got {n}")));
    }
    if w == 0 || w >= n {
        return Err(Error::arg(format!(
            "w must satisfy 1 ≤ w < n = {n}, got {w}"
        )));
    }
    let subset: Vec<usize> = (1..=n).collect();
    embedded_bell(n, &subset, w)
}

fn check_subset(m_total: usize, subset: &[usize]) -> Result<()> {
    if subset.iter().any(|&q| q == 0 || q > m_total) {
        return Err(Error::arg(format!(
            "subset {subset:?} has labels outside 1..={m_total}"
        )));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg(format!(
            "subset {subset:?} is not strictly ascending"
        )));
    }
    Ok(())
}

/// `bell_w_state(subset.len(), w)` placed on `subset`, every other qubit in
/// `|0>`.
pub fn embedded_bell(m_total: usize, subset: &[usize], w: usize) -> Result<StateVector> {
    check_subset(m_total, subset)?;
    let n = subset.len();
    if n < 2 {
        return Err(Error::arg(format!(
            "subset needs at least 2 qubits, got {n}"
        )));
    }
    if w == 0 || w >= n {
        return Err(Error::arg(format!(
            "w must satisfy 1 ≤ w < n = {n}, got {w}"
        )));
    }
    check_pure_cap(m_total)?;
    let (head, tail) = subset.split_at(w);
    let ones = |labels: &[usize]| {
        labels
            .iter()
            .fold(0usize, |acc, &q| acc | qubit_mask(m_total, q))
    };
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector::from_sparse(m_total, &[(ones(tail), h), (ones(head), h)])
}

/// All ascending `k`-subsets of `1..=m`, in lexicographic order.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for q in start..=m {
            if m - q + 1 < k - cur.len() {
                break;
            }
            cur.push(q);
            go(q + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= m {
        go(1, m, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Uniform weights over every `n`-subset of `1..=m_total`.
pub fn uniform_molecule_weights(m_total: usize, n: usize) -> Vec<(Vec<usize>, f64)> {
    let all = subsets(m_total, n);
    let x = 1.0 / all.len() as f64;
    all.into_iter().map(|s| (s, x)).collect()
}

fn check_weights<'a>(weights: impl Iterator<Item = &'a f64>) -> Result<()> {
    let mut total = 0.0;
    for &w in weights {
        if !(w > 0.0 && w <= 1.0 + WEIGHT_SUM_TOL) {
            return Err(Error::arg(format!("mixture weight {w} is not in (0, 1]")));
        }
        total += w;
    }
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::arg(format!("mixture weights sum to {total}, not 1")));
    }
    Ok(())
}

/// `Σ x_S |Ψ_S><Ψ_S|` with `Ψ_S = embedded_bell(m_total, S, w)`.
pub fn entanglement_molecule(
    m_total: usize,
    n: usize,
    w: usize,
    weights: &[(Vec<usize>, f64)],
) -> Result<DensityMatrix> {
    if weights.is_empty() {
        return Err(Error::arg("a molecule needs at least one subset"));
    }
    let mut terms = Vec::with_capacity(weights.len());
    for (k, (subset, x)) in weights.iter().enumerate() {
        if subset.len() != n {
            return Err(Error::arg(format!(
                "subset {subset:?} does not have {n} elements"
            )));
        }
        if weights[..k].iter().any(|(s, _)| s == subset) {
            return Err(Error::arg(format!("subset {subset:?} listed twice")));
        }
        terms.push(MixtureTerm {
            weight: *x,
            state: embedded_bell(m_total, subset, w)?,
        });
    }
    mix_pure(&terms)
}

/// `Σ weight |ψ><ψ|` over pure terms of equal size.
pub fn mix_pure(terms: &[MixtureTerm]) -> Result<DensityMatrix> {
    let first = terms.first().ok_or_else(|| Error::arg("empty mixture"))?;
    check_weights(terms.iter().map(|t| &t.weight))?;
    let n = first.state.n_qubits;
    check_mixed_cap(n)?;
    let dim = 1 << n;
    let mut m = CMatrix::zeros(dim, dim);
    for t in terms {
        if t.state.n_qubits != n {
            return Err(Error::arg("mixture terms act on different qubit counts"));
        }
        add_outer(&mut m, t.state.amplitudes(), t.weight);
    }
    Ok(DensityMatrix::from_trusted(n, m))
}

fn add_outer(m: &mut CMatrix, psi: &[Complex64], weight: f64) {
    let support: Vec<usize> = (0..psi.len())
        .filter(|&i| psi[i].norm_sqr() > 0.0)
        .collect();
    for &c in &support {
        let right = psi[c].conj() * weight;
        for &r in &support {
            m[(r, c)] += psi[r] * right;
        }
    }
}

/// `|ψ><ψ|`
pub fn densify(psi: &StateVector) -> Result<DensityMatrix> {
    check_mixed_cap(psi.n_qubits)?;
    let mut m = CMatrix::zeros(psi.dim(), psi.dim());
    add_outer(&mut m, psi.amplitudes(), 1.0);
    Ok(DensityMatrix::from_trusted(psi.n_qubits, m))
}

/// Convex combination of density matrices of equal size.
pub fn mix(terms: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    let (_, first) = terms.first().ok_or_else(|| Error::arg("empty mixture"))?;
    check_weights(terms.iter().map(|(w, _)| w))?;
    let mut m = CMatrix::zeros(first.dim(), first.dim());
    for (w, rho) in terms {
        if rho.n_qubits != first.n_qubits {
            return Err(Error::arg("mixture terms have different dimensions"));
        }
        m += rho.matrix.scale(*w);
    }
    Ok(DensityMatrix::from_trusted(first.n_qubits, m))
}

/// Ordinary reduction onto the qubits in `keep` (ascending), tracing out the
/// rest. Kept qubits retain their relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::arg("partial trace must keep at least one qubit"));
    }
    let n = rho.n_qubits;
    check_subset(n, keep)?;
    if keep.len() == n {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (1..=n).filter(|q| !keep.contains(q)).collect();
    let keep_offsets = scatter_table(n, keep);
    let trace_offsets = scatter_table(n, &traced);

    let dk = keep_offsets.len();
    let src = &rho.matrix;
    let out = CMatrix::from_fn(dk, dk, |r, c| {
        let (row, col) = (keep_offsets[r], keep_offsets[c]);
        trace_offsets.iter().map(|&t| src[(row | t, col | t)]).sum()
    });
    Ok(DensityMatrix::from_trusted(keep.len(), out))
}

/// For every assignment of bits to `labels` (first label most significant),
/// the corresponding full-register index with all other qubits zero.
pub(crate) fn scatter_table(n: usize, labels: &[usize]) -> Vec<usize> {
    let k = labels.len();
    (0..1usize << k)
        .map(|local| {
            labels.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                if (local >> (k - 1 - pos)) & 1 == 1 {
                    acc | qubit_mask(n, q)
                } else {
                    acc
                }
            })
        })
        .collect()
}
