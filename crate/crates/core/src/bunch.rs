//! Bunch reduction: collapse two disjoint bunches of qubits into one
//! effective two-qubit state.
//!
//! After the ordinary partial trace down to the bunched qubits, the remaining
//! space splits into orthogonal 4-dimensional pattern blocks. A block is fixed
//! by the relative flip mask of each bunch: the first listed member (the
//! anchor) carries the bunch's logical bit `i`, every other member carries
//! `i ⊕ mask`. Each block is compressed to a 4×4 operator and the blocks are
//! summed.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::state::{ket_basis, partial_trace, qubit_mask, DensityMatrix};

/// η below this is treated as an empty block.
pub const ZERO_WEIGHT: f64 = 1e-14;

/// Two disjoint, ordered bunches of 1-based qubit labels. The first member of
/// each bunch is its anchor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BunchPartition {
    bunch_a: Vec<usize>,
    bunch_b: Vec<usize>,
}

impl BunchPartition {
    pub fn new(bunch_a: Vec<usize>, bunch_b: Vec<usize>) -> Result<Self> {
        if bunch_a.is_empty() || bunch_b.is_empty() {
            return Err(Error::arg("both bunches must be nonempty"));
        }
        let mut all: Vec<usize> = bunch_a.iter().chain(&bunch_b).copied().collect();
        if all.contains(&0) {
            return Err(Error::arg("qubit labels start at 1"));
        }
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::arg(format!(
                "bunches {bunch_a:?} and {bunch_b:?} repeat a qubit label"
            )));
        }
        Ok(BunchPartition { bunch_a, bunch_b })
    }

    pub fn bunch_a(&self) -> &[usize] {
        &self.bunch_a
    }

    pub fn bunch_b(&self) -> &[usize] {
        &self.bunch_b
    }

    /// Size of bunch A.
    pub fn m(&self) -> usize {
        self.bunch_a.len()
    }

    /// Size of bunch B.
    pub fn n(&self) -> usize {
        self.bunch_b.len()
    }

    /// All bunched labels, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.bunch_a.iter().chain(&self.bunch_b).copied().collect();
        all.sort_unstable();
        all
    }

    /// Checks every label fits an `n_qubits` register.
    pub fn validate_for(&self, n_qubits: usize) -> Result<()> {
        let max = self.support().last().copied().unwrap_or(0);
        if max > n_qubits {
            return Err(Error::arg(format!(
                "partition {self} uses qubit {max} but the state has {n_qubits}"
            )));
        }
        Ok(())
    }

    /// True when the bunches cover exactly `1..=m+n`.
    fn spans_register(&self) -> bool {
        self.support().iter().enumerate().all(|(k, &q)| q == k + 1)
    }

    /// The same partition with labels renamed to their rank inside
    /// `support()`, i.e. as seen after tracing out everything else.
    pub fn localized(&self) -> BunchPartition {
        let support = self.support();
        let rank = |q: &usize| support.binary_search(q).unwrap() + 1;
        BunchPartition {
            bunch_a: self.bunch_a.iter().map(rank).collect(),
            bunch_b: self.bunch_b.iter().map(rank).collect(),
        }
    }

    /// Lexicographic order on (bunch_a, bunch_b).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        (&self.bunch_a, &self.bunch_b).cmp(&(&other.bunch_a, &other.bunch_b))
    }
}

/// Dash-joined labels, e.g. `2-3-4`.
pub fn label_string(labels: &[usize]) -> String {
    labels
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

impl fmt::Display for BunchPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}|{})",
            label_string(&self.bunch_a),
            label_string(&self.bunch_b)
        )
    }
}

/// Relative flip masks for the non-anchor members of each bunch.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternPair {
    pub mask_a: Vec<u8>,
    pub mask_b: Vec<u8>,
}

fn mask_bits(len: usize, value: usize) -> Vec<u8> {
    (0..len)
        .map(|k| ((value >> (len - 1 - k)) & 1) as u8)
        .collect()
}

fn mask_str(mask: &[u8]) -> String {
    mask.iter()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect()
}

impl PatternPair {
    /// All members of both bunches aligned with their anchors.
    pub fn aligned(partition: &BunchPartition) -> Self {
        PatternPair {
            mask_a: vec![0; partition.m() - 1],
            mask_b: vec![0; partition.n() - 1],
        }
    }

    pub fn is_aligned(&self) -> bool {
        self.mask_a.iter().chain(&self.mask_b).all(|&b| b == 0)
    }

    pub fn mask_a_string(&self) -> String {
        mask_str(&self.mask_a)
    }

    pub fn mask_b_string(&self) -> String {
        mask_str(&self.mask_b)
    }

    fn check(&self, partition: &BunchPartition) -> Result<()> {
        if self.mask_a.len() + 1 != partition.m() || self.mask_b.len() + 1 != partition.n() {
            return Err(Error::arg(format!(
                "pattern masks ({}, {}) do not fit partition {partition}",
                self.mask_a.len(),
                self.mask_b.len()
            )));
        }
        if self.mask_a.iter().chain(&self.mask_b).any(|&b| b > 1) {
            return Err(Error::arg("mask bits must be 0 or 1"));
        }
        Ok(())
    }
}

/// Every pattern of a partition, `2^(m−1)·2^(n−1)` in total. Mask A varies
/// slowest; each mask counts up in binary with its first entry most
/// significant, so the aligned pattern comes first.
pub fn patterns(partition: &BunchPartition) -> Vec<PatternPair> {
    let (la, lb) = (partition.m() - 1, partition.n() - 1);
    let mut out = Vec::with_capacity(1 << (la + lb));
    for a in 0..1usize << la {
        for b in 0..1usize << lb {
            out.push(PatternPair {
                mask_a: mask_bits(la, a),
                mask_b: mask_bits(lb, b),
            });
        }
    }
    out
}

fn check_spanning(partition: &BunchPartition, pattern: &PatternPair) -> Result<()> {
    if !partition.spans_register() {
        return Err(Error::arg(format!(
            "partition {partition} does not span qubits 1..={}",
            partition.m() + partition.n()
        )));
    }
    pattern.check(partition)
}

fn bunch_bits(n: usize, bunch: &[usize], mask: &[u8], bit: usize) -> usize {
    let mut index = 0;
    if bit == 1 {
        index |= qubit_mask(n, bunch[0]);
    }
    for (&q, &flip) in bunch[1..].iter().zip(mask) {
        if bit ^ flip as usize == 1 {
            index |= qubit_mask(n, q);
        }
    }
    index
}

fn index_unchecked(partition: &BunchPartition, pattern: &PatternPair, i: usize, j: usize) -> usize {
    let n = partition.m() + partition.n();
    bunch_bits(n, &partition.bunch_a, &pattern.mask_a, i)
        | bunch_bits(n, &partition.bunch_b, &pattern.mask_b, j)
}

/// Basis index (in the `m+n`-qubit register spanned by the partition) that
/// carries logical bit `i` on bunch A and `j` on bunch B within `pattern`.
pub fn logical_index(
    partition: &BunchPartition,
    pattern: &PatternPair,
    i: u8,
    j: u8,
) -> Result<usize> {
    check_spanning(partition, pattern)?;
    if i > 1 || j > 1 {
        return Err(Error::arg("logical bits must be 0 or 1"));
    }
    Ok(index_unchecked(partition, pattern, i as usize, j as usize))
}

/// Explicit `4 × 2^(m+n)` projection onto one pattern block. Row `2i + j`
/// is the bra of the basis state with logical bits `(i, j)`; the adjoint is
/// the matching embedding.
///
/// This builds each row from single-qubit kets instead of bit arithmetic and
/// is meant as an independent check on [`compress_operator`].
pub fn build_projector(partition: &BunchPartition, pattern: &PatternPair) -> Result<CMatrix> {
    check_spanning(partition, pattern)?;
    let n = partition.m() + partition.n();
    let mut p = CMatrix::zeros(4, 1 << n);
    for i in 0..2u8 {
        for j in 0..2u8 {
            let mut bits = vec![0u8; n];
            bits[partition.bunch_a[0] - 1] = i;
            for (&q, &f) in partition.bunch_a[1..].iter().zip(&pattern.mask_a) {
                bits[q - 1] = i ^ f;
            }
            bits[partition.bunch_b[0] - 1] = j;
            for (&q, &f) in partition.bunch_b[1..].iter().zip(&pattern.mask_b) {
                bits[q - 1] = j ^ f;
            }
            let ket = ket_basis(n, &bits)?;
            let row = 2 * i as usize + j as usize;
            for (col, amp) in ket.amplitudes().iter().enumerate() {
                p[(row, col)] = amp.conj();
            }
        }
    }
    Ok(p)
}

/// Induced 4×4 operator `P T P†` of `t` on one pattern block, gathered
/// entrywise: `[out]_{ij,kl} = t[idx(i,j), idx(k,l)]`.
pub fn compress_operator(
    t: &CMatrix,
    partition: &BunchPartition,
    pattern: &PatternPair,
) -> Result<CMatrix> {
    check_spanning(partition, pattern)?;
    let dim = 1usize << (partition.m() + partition.n());
    if t.nrows() != dim || t.ncols() != dim {
        return Err(Error::arg(format!(
            "operator is {}x{}, partition {partition} needs {dim}x{dim}",
            t.nrows(),
            t.ncols()
        )));
    }
    Ok(compress_unchecked(t, partition, pattern))
}

fn compress_unchecked(t: &CMatrix, partition: &BunchPartition, pattern: &PatternPair) -> CMatrix {
    let idx = [
        index_unchecked(partition, pattern, 0, 0),
        index_unchecked(partition, pattern, 0, 1),
        index_unchecked(partition, pattern, 1, 0),
        index_unchecked(partition, pattern, 1, 1),
    ];
    CMatrix::from_fn(4, 4, |r, c| t[(idx[r], idx[c])])
}

/// One pattern block of a reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternComponent {
    pub pattern: PatternPair,
    /// Trace of the compressed block.
    pub eta: f64,
    /// Block normalized to unit trace; `None` when `eta` is below
    /// [`ZERO_WEIGHT`].
    pub rho_pattern: Option<DensityMatrix>,
}

/// Effective two-qubit state of a bunch pair together with its pattern
/// decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BunchReduction {
    pub partition: BunchPartition,
    pub rho_ab: DensityMatrix,
    pub components: Vec<PatternComponent>,
}

impl BunchReduction {
    pub fn etas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.eta).collect()
    }
}

/// Ordinary partial trace onto the bunched qubits followed by the sum of all
/// pattern-block compressions.
///
/// With two singleton bunches this is exactly the ordinary two-qubit
/// reduction.
pub fn bunch_reduce(rho: &DensityMatrix, partition: &BunchPartition) -> Result<BunchReduction> {
    partition.validate_for(rho.n_qubits())?;
    let reduced = partial_trace(rho, &partition.support())?;
    let local = partition.localized();

    let mut rho_ab = CMatrix::zeros(4, 4);
    let components = patterns(&local)
        .into_iter()
        .map(|pattern| {
            let block = compress_unchecked(reduced.matrix(), &local, &pattern);
            rho_ab += &block;
            // a block trace is a sum of diagonal entries: only rounding leaves [0, 1]
            let eta = block.trace().re.clamp(0.0, 1.0);
            let rho_pattern =
                (eta > ZERO_WEIGHT).then(|| DensityMatrix::from_trusted(2, block.unscale(eta)));
            PatternComponent {
                pattern,
                eta,
                rho_pattern,
            }
        })
        .collect();

    Ok(BunchReduction {
        partition: partition.clone(),
        rho_ab: DensityMatrix::from_trusted(2, rho_ab),
        components,
    })
}

/// The three single-versus-pair reductions of a three-qubit state:
/// `(1 | 2,3)`, `(2 | 3,1)` with the pair anchored at qubit 3, and
/// `(3 | 1,2)`.
pub fn tripartite_triple(rho: &DensityMatrix) -> Result<[BunchReduction; 3]> {
    if rho.n_qubits() != 3 {
        return Err(Error::arg(format!(
            "tripartite_triple needs 3 qubits, got {}",
            rho.n_qubits()
        )));
    }
    Ok([
        bunch_reduce(rho, &BunchPartition::new(vec![1], vec![2, 3])?)?,
        bunch_reduce(rho, &BunchPartition::new(vec![2], vec![3, 1])?)?,
        bunch_reduce(rho, &BunchPartition::new(vec![3], vec![1, 2])?)?,
    ])
}

/// Orders unordered bunch pairs: the shorter bunch first, ties broken
/// lexicographically.
fn canonical_first(a: &[usize], b: &[usize]) -> bool {
    (a.len(), a) < (b.len(), b)
}

/// Every unordered pair of disjoint nonempty ascending bunches of `1..=n`,
/// each listed once, sorted lexicographically by (bunch_a, bunch_b).
///
/// `max_bunch` bounds both bunch sizes; `full_cover` keeps only pairs whose
/// union is the whole register.
pub fn enumerate_partitions(
    n_qubits: usize,
    max_bunch: Option<usize>,
    full_cover: bool,
) -> Vec<BunchPartition> {
    let mut out = Vec::new();
    let total = 3usize.pow(n_qubits as u32);
    for mut code in 0..total {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for q in 1..=n_qubits {
            match code % 3 {
                1 => a.push(q),
                2 => b.push(q),
                _ => {}
            }
            code /= 3;
        }
        if a.is_empty() || b.is_empty() || !canonical_first(&a, &b) {
            continue;
        }
        if full_cover && a.len() + b.len() != n_qubits {
            continue;
        }
        if let Some(cap) = max_bunch {
            if a.len() > cap || b.len() > cap {
                continue;
            }
        }
        out.push(BunchPartition {
            bunch_a: a,
            bunch_b: b,
        });
    }
    out.sort_by(|x, y| x.lex_cmp(y));
    out
}
