//! The encode/decode game: Alice encodes a classical symbol with local
//! unitaries on her half of a shared state, and Bob tries to learn it either
//! with a global measurement or with one-way adaptive LOCC.
//!
//! Both strategies are optimized over rank-one projective measurements, so the
//! reported informations are lower bounds on the accessible information. The
//! Holevo quantity of the encoded ensemble is reported as the matching upper bound.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::{classical_mutual_information, entropy_bits, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, ZERO};
use crate::measurement::basis_unitary;
use crate::optimize::{minimize, OptimizationReport, OptimizerConfig};
use crate::qstate::{self, DensityOperator, StateFile, TAU_HERM};

/// One symbol of the encoding: its prior probability and Alice's unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingEntry {
    pub label: String,
    pub probability: f64,
    pub unitary: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct EncodingRepr {
    label: String,
    probability: f64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for EncodingEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = linalg::split_re_im(&self.unitary);
        EncodingRepr {
            label: self.label.clone(),
            probability: self.probability,
            re,
            im,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EncodingEntry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = EncodingRepr::deserialize(d)?;
        let unitary = linalg::join_re_im(&r.re, &r.im).ok_or_else(|| serde::de::Error::custom("ragged unitary"))?;
        Ok(EncodingEntry {
            label: r.label,
            probability: r.probability,
            unitary,
        })
    }
}

fn pauli(name: &str) -> CMatrix {
    let m = |a: [Complex64; 4]| CMatrix::from_row_slice(2, 2, &a);
    let one = c(1.0, 0.0);
    match name {
        "x" => m([ZERO, one, one, ZERO]),
        "z" => m([one, ZERO, ZERO, -one]),
        "zx" => m([ZERO, one, -one, ZERO]),
        _ => linalg::identity(2),
    }
}

fn uniform(labels: &[&str]) -> Vec<EncodingEntry> {
    let p = 1.0 / labels.len() as f64;
    labels
        .iter()
        .map(|&l| EncodingEntry {
            label: l.to_string(),
            probability: p,
            unitary: pauli(l),
        })
        .collect()
}

/// Built-in encodings: `pauli4` = uniform {I, Z, X, ZX}; `bit-flip` = uniform {I, X}.
pub fn encoding_preset(name: &str) -> Result<Vec<EncodingEntry>> {
    match name {
        "pauli4" => Ok(uniform(&["i", "z", "x", "zx"])),
        "bit-flip" => Ok(uniform(&["i", "x"])),
        _ => Err(Error::Config(format!("unknown encoding '{name}'; known: pauli4, bit-flip"))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecodingExperiment {
    pub initial: StateFile,
    pub encoding: Vec<EncodingEntry>,
    pub x_alphabet: Vec<String>,
    /// Best mutual information with X found for a global rank-one measurement (bits).
    pub global_result: f64,
    /// Best mutual information with X found for one-way adaptive LOCC (bits).
    pub locc_result: f64,
    pub advantage: f64,
    /// Holevo quantity of the encoded ensemble.
    pub holevo: f64,
    /// Shannon entropy of the symbol prior.
    pub prior_entropy: f64,
    pub global_report: OptimizationReport,
    pub locc_report: OptimizationReport,
}

/// `I(X : outcome)` for outcome vectors `vectors` (orthonormal, complete).
fn information(states: &[(f64, CMatrix)], vectors: &[Vec<Complex64>]) -> f64 {
    let table: Vec<Vec<f64>> = states
        .iter()
        .map(|(p, rho)| {
            vectors
                .iter()
                .map(|v| {
                    let mut q = ZERO;
                    for (i, vi) in v.iter().enumerate() {
                        for (j, vj) in v.iter().enumerate() {
                            q += vi.conj() * rho[(i, j)] * vj;
                        }
                    }
                    (p * q.re).max(0.0)
                })
                .collect()
        })
        .collect();
    let total: f64 = table.iter().flatten().sum();
    let normalized: Vec<Vec<f64>> = table.iter().map(|r| r.iter().map(|x| x / total).collect()).collect();
    classical_mutual_information(&normalized).unwrap_or(0.0)
}

fn column(u: &CMatrix, k: usize) -> Vec<Complex64> {
    u.column(k).iter().copied().collect()
}

/// Outcome vectors `|a⟩ ⊗ |b_a⟩` of A-then-B adaptive local measurements.
/// Parameters: A's Bloch pair, then B's Bloch pair for each A outcome.
fn locc_vectors(params: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let ua = basis_unitary(2, &params[0..2])?;
    let mut out = Vec::with_capacity(4);
    for a in 0..2 {
        let ub = basis_unitary(2, &params[2 + 2 * a..4 + 2 * a])?;
        let va = column(&ua, a);
        for b in 0..2 {
            let vb = column(&ub, b);
            out.push(va.iter().flat_map(|x| vb.iter().map(move |y| x * y)).collect());
        }
    }
    Ok(out)
}

fn vectors_to_unitary(vectors: &[Vec<Complex64>]) -> CMatrix {
    let n = vectors.len();
    CMatrix::from_fn(n, n, |i, k| vectors[k][i])
}

fn validate(initial: &DensityOperator, encoding: &[EncodingEntry]) -> Result<()> {
    if initial.dims() != [2, 2] {
        return Err(Error::Unsupported(format!(
            "decoding game needs a two-qubit state, got dims {:?}",
            initial.dims()
        )));
    }
    if encoding.is_empty() {
        return Err(Error::Config("empty encoding".into()));
    }
    qstate::check_probabilities(encoding.iter().map(|e| e.probability))?;
    for e in encoding {
        if e.unitary.nrows() != 2 || e.unitary.ncols() != 2 {
            return Err(Error::Dimensions(format!("encoder '{}' must be 2x2", e.label)));
        }
        let defect = linalg::unitarity_defect(&e.unitary);
        if defect > TAU_HERM {
            return Err(Error::NotUnitary(defect));
        }
    }
    Ok(())
}

/// Plays the game for `initial` and `encoding`, optimizing both decoding strategies.
pub fn run_decoding(initial: &DensityOperator, encoding: &[EncodingEntry], cfg: &OptimizerConfig) -> Result<DecodingExperiment> {
    validate(initial, encoding)?;
    let encoded: Vec<(f64, DensityOperator)> = encoding
        .iter()
        .map(|e| Ok((e.probability, initial.evolve_local(&e.unitary, 0)?)))
        .collect::<Result<_>>()?;
    let states: Vec<(f64, CMatrix)> = encoded.iter().map(|(p, s)| (*p, s.matrix().clone())).collect();

    // one-way LOCC: measure A, then B in a basis chosen by A's outcome
    let named = [[0.0, 0.0], [FRAC_PI_2, 0.0], [FRAC_PI_2, FRAC_PI_2]];
    let mut candidates = Vec::new();
    for a in named {
        for b0 in named {
            for b1 in named {
                candidates.push([a, b0, b1].concat());
            }
        }
    }
    candidates.extend(cfg.random_candidates(6, 0xdec0));
    let locc_report = minimize(
        |x: &[f64]| locc_vectors(x).map(|v| -information(&states, &v)).unwrap_or(f64::INFINITY),
        candidates,
        cfg,
    )?;
    let locc_basis = vectors_to_unitary(&locc_vectors(&locc_report.argmin.angles)?);

    // global: rotations of the LOCC optimum; zero angles reproduce it exactly
    let mut candidates = vec![vec![0.0; 12]];
    candidates.extend(cfg.random_candidates(12, 0xdec1));
    let global_objective = |x: &[f64]| -> f64 {
        basis_unitary(4, x)
            .map(|g| {
                let u = &locc_basis * g;
                let vectors: Vec<Vec<Complex64>> = (0..4).map(|k| column(&u, k)).collect();
                -information(&states, &vectors)
            })
            .unwrap_or(f64::INFINITY)
    };
    let global_report = minimize(global_objective, candidates, cfg)?;

    let locc_result = -locc_report.value;
    let global_result = -global_report.value;
    let average = encoded
        .iter()
        .fold(CMatrix::zeros(4, 4), |acc, (p, s)| acc + s.matrix().scale(*p));
    let average = DensityOperator::from_parts(vec![2, 2], average);
    let holevo = von_neumann_entropy(&average) - encoded.iter().map(|(p, s)| p * von_neumann_entropy(s)).sum::<f64>();
    let prior_entropy = entropy_bits(&encoding.iter().map(|e| e.probability).collect::<Vec<_>>());
    Ok(DecodingExperiment {
        initial: initial.to_file(),
        encoding: encoding.to_vec(),
        x_alphabet: encoding.iter().map(|e| e.label.clone()).collect(),
        global_result,
        locc_result,
        advantage: global_result - locc_result,
        holevo,
        prior_entropy,
        global_report,
        locc_report,
    })
}
