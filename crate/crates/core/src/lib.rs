//! Bunch-to-bunch entanglement of multipartite qubit states.
//!
//! Two disjoint bunches of qubits are collapsed into one effective two-qubit
//! state ([`bunch::bunch_reduce`]), whose entanglement is measured by the
//! Wootters concurrence and the entanglement of formation
//! ([`measures::eof_bunches`]).

pub mod bunch;
pub mod error;
pub mod io;
pub mod measures;
pub mod numerics;
pub mod random;
pub mod state;

pub use bunch::{
    build_projector, bunch_reduce, compress_operator, enumerate_partitions, logical_index,
    patterns, tripartite_triple, BunchPartition, BunchReduction, PatternComponent, PatternPair,
};
pub use error::{Error, Result};
pub use measures::{
    binary_entropy, concurrence, eof, eof_bunches, eof_from_concurrence, spin_flip, survey,
    survey_parallel, EntanglementReport,
};
pub use numerics::{
    diagnose_density, hermitian_eig, psd_sqrt, CMatrix, DensityDiagnostics, EigenDecomposition,
    Tolerances,
};
pub use state::{
    bell_w_state, densify, embedded_bell, entanglement_molecule, ghz, ket_basis, mix, mix_pure,
    partial_trace, tensor, uniform_molecule_weights, DensityMatrix, MixtureTerm, StateVector,
};
