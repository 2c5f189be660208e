//! File formats: JSON state files, JSON reduction reports and survey tables
//! (CSV or JSON).
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major. Scalar
//! report values are written with 12 digits after the decimal point.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bunch::{label_string, BunchReduction};
use crate::error::{Error, Result};
use crate::measures::EntanglementReport;
use crate::numerics::{diagnose_density, CMatrix, DensityDiagnostics, Tolerances};
use crate::state::{densify, limits, qubits_for_dim, DensityMatrix, StateVector};

/// Tolerance on `|‖ψ‖² − 1|` when reading pure states.
pub const PURE_NORM_TOL: f64 = 1e-10;

/// Fixed 12-digit decimal rendering used for every reported scalar.
pub fn fmt12(x: f64) -> String {
    let s = format!("{x:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn round12(x: f64) -> f64 {
    fmt12(x).parse().unwrap_or(x)
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| pair(&m[(r, c)])).collect())
        .collect()
}

/// On-disk state, as parsed and before any invariant checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateFile {
    Pure {
        n_qubits: usize,
        amplitudes: Vec<[f64; 2]>,
    },
    Mixed {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_qubits: Option<usize>,
        matrix: Vec<Vec<[f64; 2]>>,
    },
}

/// A validated state.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn n_qubits(&self) -> usize {
        match self {
            LoadedState::Pure(psi) => psi.n_qubits(),
            LoadedState::Mixed(rho) => rho.n_qubits(),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            LoadedState::Pure(psi) => densify(psi),
            LoadedState::Mixed(rho) => Ok(rho.clone()),
        }
    }
}

fn shape_error(what: &'static str, defect: usize) -> Error {
    Error::Invariant {
        invariant: what,
        defect: defect as f64,
        tolerance: 0.0,
    }
}

impl StateFile {
    pub fn from_pure(psi: &StateVector) -> Self {
        StateFile::Pure {
            n_qubits: psi.n_qubits(),
            amplitudes: psi.amplitudes().iter().map(pair).collect(),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        StateFile::Mixed {
            n_qubits: Some(rho.n_qubits()),
            matrix: matrix_rows(rho.matrix()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    fn n_qubits_checked(&self) -> Result<usize> {
        match self {
            StateFile::Pure {
                n_qubits,
                amplitudes,
            } => {
                let cap = limits().pure;
                if *n_qubits > cap {
                    return Err(Error::Capacity {
                        what: "pure state",
                        requested: *n_qubits,
                        cap,
                    });
                }
                if *n_qubits == 0 {
                    return Err(shape_error("n_qubits ≥ 1", 1));
                }
                let expect = 1usize << n_qubits;
                if amplitudes.len() != expect {
                    return Err(shape_error(
                        "amplitude count = 2^n_qubits",
                        amplitudes.len().abs_diff(expect),
                    ));
                }
                Ok(*n_qubits)
            }
            StateFile::Mixed { n_qubits, matrix } => {
                let rows = matrix.len();
                if let Some(bad) = matrix.iter().find(|row| row.len() != rows) {
                    return Err(shape_error("square matrix", bad.len().abs_diff(rows)));
                }
                let n = qubits_for_dim(rows, rows)
                    .map_err(|_| shape_error("dimension is a power of two", rows))?;
                if let Some(declared) = n_qubits {
                    if *declared != n {
                        return Err(shape_error(
                            "matrix dimension = 2^n_qubits",
                            declared.abs_diff(n),
                        ));
                    }
                }
                let cap = limits().mixed;
                if n > cap {
                    return Err(Error::Capacity {
                        what: "density matrix",
                        requested: n,
                        cap,
                    });
                }
                Ok(n)
            }
        }
    }

    fn raw_matrix(&self) -> CMatrix {
        match self {
            StateFile::Pure { amplitudes, .. } => {
                let psi: Vec<Complex64> = amplitudes
                    .iter()
                    .map(|a| Complex64::new(a[0], a[1]))
                    .collect();
                CMatrix::from_fn(psi.len(), psi.len(), |r, c| psi[r] * psi[c].conj())
            }
            StateFile::Mixed { matrix, .. } => {
                CMatrix::from_fn(matrix.len(), matrix.len(), |r, c| {
                    Complex64::new(matrix[r][c][0], matrix[r][c][1])
                })
            }
        }
    }

    /// Density diagnostics of the stored data without normalizing anything.
    /// A pure state is diagnosed as `|ψ><ψ|`, so its norm defect shows up
    /// as the trace defect.
    pub fn diagnostics(&self) -> Result<DensityDiagnostics> {
        self.n_qubits_checked()?;
        Ok(diagnose_density(&self.raw_matrix()))
    }

    /// Checks every type invariant and builds the state.
    pub fn validate(&self, tol: &Tolerances) -> Result<LoadedState> {
        let n = self.n_qubits_checked()?;
        match self {
            StateFile::Pure { amplitudes, .. } => {
                let norm: f64 = amplitudes.iter().map(|a| a[0] * a[0] + a[1] * a[1]).sum();
                if (norm - 1.0).abs() > PURE_NORM_TOL {
                    return Err(Error::Invariant {
                        invariant: "unit norm",
                        defect: (norm - 1.0).abs(),
                        tolerance: PURE_NORM_TOL,
                    });
                }
                let amps = amplitudes
                    .iter()
                    .map(|a| Complex64::new(a[0], a[1]))
                    .collect();
                Ok(LoadedState::Pure(StateVector::new(n, amps)?))
            }
            StateFile::Mixed { .. } => Ok(LoadedState::Mixed(DensityMatrix::with_tolerances(
                self.raw_matrix(),
                tol,
            )?)),
        }
    }
}

/// Writes a state file; `path` of `None` means stdout.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEntry {
    pub mask_a: String,
    pub mask_b: String,
    pub eta: f64,
}

/// JSON form of a [`BunchReduction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub bunch_a: Vec<usize>,
    pub bunch_b: Vec<usize>,
    pub etas: Vec<EtaEntry>,
    pub rho_ab: Vec<Vec<[f64; 2]>>,
}

impl From<&BunchReduction> for ReductionReport {
    fn from(red: &BunchReduction) -> Self {
        ReductionReport {
            bunch_a: red.partition.bunch_a().to_vec(),
            bunch_b: red.partition.bunch_b().to_vec(),
            etas: red
                .components
                .iter()
                .map(|c| EtaEntry {
                    mask_a: c.pattern.mask_a_string(),
                    mask_b: c.pattern.mask_b_string(),
                    eta: round12(c.eta),
                })
                .collect(),
            rho_ab: matrix_rows(red.rho_ab.matrix()),
        }
    }
}

/// JSON form of an [`EntanglementReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bunch_a: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bunch_b: Option<Vec<usize>>,
    pub concurrence: f64,
    pub eof: f64,
    pub lambdas: [f64; 4],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub etas: Vec<f64>,
}

impl From<&EntanglementReport> for ReportRecord {
    fn from(r: &EntanglementReport) -> Self {
        ReportRecord {
            bunch_a: r.partition.as_ref().map(|p| p.bunch_a().to_vec()),
            bunch_b: r.partition.as_ref().map(|p| p.bunch_b().to_vec()),
            concurrence: round12(r.concurrence),
            eof: round12(r.eof),
            lambdas: r.lambdas.map(round12),
            etas: r.etas.iter().copied().map(round12).collect(),
        }
    }
}

pub const SURVEY_CSV_HEADER: [&str; 7] = [
    "bunch_a",
    "bunch_b",
    "m",
    "n",
    "concurrence",
    "eof",
    "eta_list",
];

/// Survey table as CSV, one row per report. `eta_list` joins pattern weights
/// with `;`.
pub fn write_survey_csv<W: Write>(reports: &[EntanglementReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SURVEY_CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        let (a, b) = r
            .partition
            .as_ref()
            .map(|p| (p.bunch_a().to_vec(), p.bunch_b().to_vec()))
            .unwrap_or_default();
        let etas = r
            .etas
            .iter()
            .map(|&e| fmt12(e))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            label_string(&a),
            label_string(&b),
            a.len().to_string(),
            b.len().to_string(),
            fmt12(r.concurrence),
            fmt12(r.eof),
            etas,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Survey table as a JSON array of [`ReportRecord`]s.
pub fn survey_json(reports: &[EntanglementReport]) -> String {
    let records: Vec<ReportRecord> = reports.iter().map(ReportRecord::from).collect();
    serde_json::to_string_pretty(&records).expect("reports always serialize")
}
