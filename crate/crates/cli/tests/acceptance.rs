//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use bunchent::numerics::max_abs_diff;
use bunchent::random::{random_mixed, random_pure};
use bunchent::state::uniform_molecule_weights;
use bunchent::{
    bell_w_state, build_projector, bunch_reduce, compress_operator, concurrence, densify,
    entanglement_molecule, enumerate_partitions, eof, eof_bunches, ghz, patterns,
    tripartite_triple, CMatrix, Tolerances,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Partial trace by explicit summation over traced bit assignments, written
/// independently of the library.
fn trace_oracle(rho: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let k = keep.len();
    let bit = |idx: usize, q: usize| (idx >> (n - q)) & 1;
    let mut out = CMatrix::zeros(1 << k, 1 << k);
    for r in 0..1usize << n {
        for c in 0..1usize << n {
            let traced_equal = (1..=n)
                .filter(|q| !keep.contains(q))
                .all(|q| bit(r, q) == bit(c, q));
            if !traced_equal {
                continue;
            }
            let local = |idx: usize| keep.iter().fold(0, |acc, &q| (acc << 1) | bit(idx, q));
            out[(local(r), local(c))] += rho[(r, c)];
        }
    }
    out
}

/// Criterion 1: GHZ bunches carry one ebit exactly when they cover every
/// qubit.
fn ghz_theorem() -> Outcome {
    let start = Instant::now();
    let mut worst_full = 0.0_f64;
    let mut worst_partial = 0.0_f64;
    let mut count = 0usize;
    for n in 3..=8 {
        let rho = densify(&ghz(n).unwrap()).unwrap();
        for p in enumerate_partitions(n, None, false) {
            let r = eof_bunches(&rho, &p).unwrap();
            if p.m() + p.n() == n {
                worst_full = worst_full.max((r.eof - 1.0).abs());
            } else {
                worst_partial = worst_partial.max(r.eof.abs()).max(r.concurrence.abs());
            }
            count += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_full < 1e-9 && worst_partial < 1e-9 && secs < 60.0,
        format!(
            "{count} partitions, max |E_f − 1| (full cover) = {worst_full:.2e}, \
             max C,E_f (m+n<N) = {worst_partial:.2e}, {secs:.2} s"
        ),
    )
}

/// Criterion 2: every ordinary pair reduction of GHZ is separable.
fn ghz_pairs() -> Outcome {
    let mut worst = 0.0_f64;
    for n in 3..=8 {
        let rho = densify(&ghz(n).unwrap()).unwrap();
        for p in enumerate_partitions(n, Some(1), false) {
            let red = bunch_reduce(&rho, &p).unwrap();
            worst = worst.max(concurrence(&red.rho_ab).unwrap());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max C over singleton pairs = {worst:.2e}"),
    )
}

/// Criterion 3: the Bell-like family, both branches.
fn bell_w_branches() -> Outcome {
    let mut worst_partial = 0.0_f64;
    let mut worst_full = 0.0_f64;
    let mut min_full = f64::INFINITY;
    for n in 3..=6 {
        for w in 1..n {
            let rho = densify(&bell_w_state(n, w).unwrap()).unwrap();
            for p in enumerate_partitions(n, None, false) {
                let e = eof_bunches(&rho, &p).unwrap().eof;
                if p.m() + p.n() == n {
                    worst_full = worst_full.max((e - 1.0).abs());
                    min_full = min_full.min(e);
                } else {
                    worst_partial = worst_partial.max(e);
                }
            }
        }
    }
    outcome(
        worst_partial < 1e-9 && min_full > 0.0 && worst_full < 1e-9,
        format!(
            "max E_f (m+n<N) = {worst_partial:.2e}, min E_f (full cover) = {min_full:.12}, \
             max |E_f − 1| = {worst_full:.2e}"
        ),
    )
}

/// Criterion 4: uniform molecule B⁺(4, 3, 1).
fn molecule() -> Outcome {
    let rho = entanglement_molecule(4, 3, 1, &uniform_molecule_weights(4, 3)).unwrap();
    let mut best_full = 0.0_f64;
    let mut worst_partial = 0.0_f64;
    let mut best_by_size = [0.0_f64; 5];
    for p in enumerate_partitions(4, None, false) {
        let e = eof_bunches(&rho, &p).unwrap().eof;
        let size = p.m() + p.n();
        best_by_size[size] = best_by_size[size].max(e);
        if size == 4 {
            best_full = best_full.max(e);
        } else {
            worst_partial = worst_partial.max(e);
        }
    }
    outcome(
        best_full > 1e-6 && worst_partial < 1e-9,
        format!(
            "max E_f (full cover) = {best_full:.3e}, max E_f (m+n<4) = {worst_partial:.3e}; \
             max E_f by m+n: 2 → {:.3e}, 3 → {:.6}, 4 → {:.3e}",
            best_by_size[2], best_by_size[3], best_by_size[4]
        ),
    )
}

/// Criterion 5: Wootters E_f equals the entanglement entropy on pure states.
fn wootters_pure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let psi = random_pure(2, &mut rng).unwrap();
        let a = psi.amplitudes();
        // ρ_A = [[|a0|²+|a1|², a0 a2* + a1 a3*], [c.c., |a2|²+|a3|²]]
        let p = a[0].norm_sqr() + a[1].norm_sqr();
        let off = a[0] * a[2].conj() + a[1] * a[3].conj();
        let det = p * (1.0 - p) - off.norm_sqr();
        let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
        let entropy: f64 = [(1.0 + disc) / 2.0, (1.0 - disc) / 2.0]
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.log2())
            .sum();
        let e = eof(&densify(&psi).unwrap()).unwrap().eof;
        worst = worst.max((e - entropy).abs());
    }
    outcome(
        worst < 1e-8,
        format!("max |E_f − S(ρ_A)| over 1000 states = {worst:.2e}"),
    )
}

/// Criterion 6: entry gather agrees with the explicit projector product.
fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    let mut blocks = 0usize;
    for n in [3usize, 4] {
        let partitions = enumerate_partitions(n, None, false);
        for _ in 0..100 {
            let rho = random_mixed(n, &mut rng).unwrap();
            for p in &partitions {
                let keep = p.support();
                let reduced = trace_oracle(rho.matrix(), n, &keep);
                let local = p.localized();
                let red = bunch_reduce(&rho, p).unwrap();
                let mut combined = CMatrix::zeros(4, 4);
                for (pat, comp) in patterns(&local).iter().zip(&red.components) {
                    let proj = build_projector(&local, pat).unwrap();
                    let upsilon = &proj * &reduced * proj.adjoint();
                    let gathered = compress_operator(&reduced, &local, pat).unwrap();
                    worst = worst.max(max_abs_diff(&upsilon, &gathered));
                    worst = worst.max((upsilon.trace().re - comp.eta).abs());
                    combined += upsilon;
                    blocks += 1;
                }
                worst = worst.max(max_abs_diff(&combined, red.rho_ab.matrix()));
            }
        }
    }
    outcome(
        worst < 1e-13,
        format!("{blocks} pattern blocks, max entry diff = {worst:.2e}"),
    )
}

/// Criterion 7: pattern weights form a probability vector.
fn eta_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_sum = 0.0_f64;
    let mut out_of_range = 0usize;
    let mut invalid = 0usize;
    for _ in 0..200 {
        let n = rng.random_range(2..=5);
        let rho = random_mixed(n, &mut rng).unwrap();
        let partitions = enumerate_partitions(n, None, false);
        let p = &partitions[rng.random_range(0..partitions.len())];
        let red = bunch_reduce(&rho, p).unwrap();
        let etas = red.etas();
        out_of_range += etas.iter().filter(|&&e| !(0.0..=1.0).contains(&e)).count();
        worst_sum = worst_sum.max((etas.iter().sum::<f64>() - 1.0).abs());
        if red
            .rho_ab
            .diagnostics()
            .check(&Tolerances::default())
            .is_err()
        {
            invalid += 1;
        }
    }
    outcome(
        worst_sum < 1e-12 && out_of_range == 0 && invalid == 0,
        format!(
            "max |Σ η − 1| = {worst_sum:.2e}, η outside [0,1]: {out_of_range}, \
             invalid ρ_AB: {invalid}"
        ),
    )
}

fn bits(s: &str) -> usize {
    usize::from_str_radix(s, 2).unwrap()
}

/// Explicit (single-vs-pair) matrix templates: each entry is a sum of two
/// entries of ρ given as (row, col) bit strings.
const TEMPLATE_A_BC: [[[(&str, &str); 2]; 4]; 4] = [
    [
        [("000", "000"), ("001", "001")],
        [("000", "011"), ("001", "010")],
        [("000", "100"), ("001", "101")],
        [("000", "111"), ("001", "110")],
    ],
    [
        [("011", "000"), ("010", "001")],
        [("011", "011"), ("010", "010")],
        [("011", "100"), ("010", "101")],
        [("011", "111"), ("010", "110")],
    ],
    [
        [("100", "000"), ("101", "001")],
        [("100", "011"), ("101", "010")],
        [("100", "100"), ("101", "101")],
        [("100", "111"), ("101", "110")],
    ],
    [
        [("111", "000"), ("110", "001")],
        [("111", "011"), ("110", "010")],
        [("111", "100"), ("110", "101")],
        [("111", "111"), ("110", "110")],
    ],
];

const TEMPLATE_B_CA: [[[(&str, &str); 2]; 4]; 4] = [
    [
        [("000", "000"), ("100", "100")],
        [("000", "101"), ("100", "001")],
        [("000", "010"), ("100", "110")],
        [("000", "111"), ("100", "011")],
    ],
    [
        [("101", "000"), ("001", "100")],
        [("101", "101"), ("001", "001")],
        [("101", "010"), ("001", "110")],
        [("101", "111"), ("001", "011")],
    ],
    [
        [("010", "000"), ("110", "100")],
        [("010", "101"), ("110", "001")],
        [("010", "010"), ("110", "110")],
        [("010", "111"), ("110", "011")],
    ],
    [
        [("111", "000"), ("011", "100")],
        [("111", "101"), ("011", "001")],
        [("111", "010"), ("011", "110")],
        [("111", "111"), ("011", "011")],
    ],
];

fn from_template(rho: &CMatrix, t: &[[[(&str, &str); 2]; 4]; 4]) -> CMatrix {
    CMatrix::from_fn(4, 4, |r, c| {
        t[r][c]
            .iter()
            .map(|(x, y)| rho[(bits(x), bits(y))])
            .sum::<Complex64>()
    })
}

/// `[ρ_(c,ab)]_{ij,kl} = [ρ]_{jji,llk} + [ρ]_{j(1−j)i,l(1−l)k}`
fn c_ab_formula(rho: &CMatrix) -> CMatrix {
    let idx = |a: usize, b: usize, c: usize| (a << 2) | (b << 1) | c;
    CMatrix::from_fn(4, 4, |r, c| {
        let (i, j, k, l) = (r >> 1, r & 1, c >> 1, c & 1);
        rho[(idx(j, j, i), idx(l, l, k))] + rho[(idx(j, 1 - j, i), idx(l, 1 - l, k))]
    })
}

/// Criterion 8: the three tripartite reductions match their explicit
/// entry templates.
fn tripartite_templates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let rho = random_mixed(3, &mut rng).unwrap();
        let [a_bc, b_ca, c_ab] = tripartite_triple(&rho).unwrap();
        let m = rho.matrix();
        worst = worst.max(max_abs_diff(
            a_bc.rho_ab.matrix(),
            &from_template(m, &TEMPLATE_A_BC),
        ));
        worst = worst.max(max_abs_diff(
            b_ca.rho_ab.matrix(),
            &from_template(m, &TEMPLATE_B_CA),
        ));
        worst = worst.max(max_abs_diff(c_ab.rho_ab.matrix(), &c_ab_formula(m)));
    }
    outcome(
        worst <= 1e-14,
        format!("max entry diff over 50 states = {worst:.2e}"),
    )
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bunchent"))
        .args(args)
        .output()
        .expect("bunchent binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn eof_line(stdout: &str) -> Option<&str> {
    stdout.lines().find_map(|l| l.strip_prefix("eof: "))
}

/// Criterion 9: CLI golden run, deterministic across runs and worker counts.
fn cli_golden() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let g4 = dir.path().join("ghz4.json");
    let g5 = dir.path().join("ghz5.json");
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let mut problems = Vec::new();

    let (code, _) = run_cli(&["build", "ghz", "--n", "4", "--out", &s(&g4)]);
    let (code5, _) = run_cli(&["build", "ghz", "--n", "5", "--out", &s(&g5)]);
    if code != 0 || code5 != 0 {
        problems.push("build failed".to_owned());
    }

    let full = run_cli(&["eof", &s(&g4), "--a", "1", "--b", "2,3,4"]);
    let part = run_cli(&["eof", &s(&g4), "--a", "1", "--b", "2,3"]);
    if eof_line(&full.1) != Some("1.000000000000") {
        problems.push(format!("full-cover eof line {:?}", eof_line(&full.1)));
    }
    if eof_line(&part.1) != Some("0.000000000000") {
        problems.push(format!("partial eof line {:?}", eof_line(&part.1)));
    }
    for _ in 0..3 {
        if run_cli(&["eof", &s(&g4), "--a", "1", "--b", "2,3,4"]) != full
            || run_cli(&["eof", &s(&g4), "--a", "1", "--b", "2,3"]) != part
        {
            problems.push("eof output not repeatable".to_owned());
            break;
        }
    }

    let base = run_cli(&["survey", &s(&g5), "--full-cover", "--jobs", "1"]);
    let mut reader = csv::Reader::from_reader(base.1.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    if rows.len() != 15 || rows.iter().any(|r| &r[5] != "1.000000000000") {
        problems.push(format!(
            "survey emitted {} rows, not 15 rows of eof 1",
            rows.len()
        ));
    }
    for jobs in ["1", "2", "4", "8"] {
        if run_cli(&["survey", &s(&g5), "--full-cover", "--jobs", jobs]) != base {
            problems.push(format!("survey differs with --jobs {jobs}"));
        }
    }
    let detail = if problems.is_empty() {
        "eof 1.000000000000 / 0.000000000000, 15 survey rows of 1, identical across runs and --jobs 1,2,4,8"
            .to_owned()
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty() && base.0 == 0, detail)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1 GHZ bunch theorem, N = 3..8", ghz_theorem),
        ("AC2 GHZ pairs disentangled", ghz_pairs),
        ("AC3 Bell-like family branches, N = 3..6", bell_w_branches),
        ("AC4 entanglement molecule B+(4,3,1)", molecule),
        ("AC5 Wootters pure-state oracle", wootters_pure),
        ("AC6 projector-path equivalence", oracle_equivalence),
        ("AC7 pattern weight normalization", eta_normalization),
        ("AC8 tripartite entry templates", tripartite_templates),
        ("AC9 CLI golden run", cli_golden),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!(
            "{} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
