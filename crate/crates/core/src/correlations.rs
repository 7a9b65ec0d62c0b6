//! Quantum discord, one-way deficit, classicality detection and the
//! mutual-information-preservation test for local channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{clip_small_negative, mutual_information, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::measurement::{
    basis_unitary, conditional_ensemble, measure_channel, measured_conditional_entropy, parameter_count,
    MeasurementParameters, ProjectiveMeasurement,
};
use crate::optimize::{minimize, OptimizerConfig};
use crate::qstate::{DensityOperator, TAU_HERM};

pub use crate::optimize::OptimizationReport;

/// Discord and deficit minima above `-NEGATIVE_CLIP` but below zero are reported as zero.
pub const NEGATIVE_CLIP: f64 = 1e-7;
/// Default disturbance threshold for classicality verdicts.
pub const TAU_CLASS: f64 = 1e-7;
/// Marginal eigenvalues closer than this share a degenerate block.
const DEGENERACY_TOL: f64 = 1e-8;
const PROBE_SEED: u64 = 0x5eed_c1a5;

fn check_bipartite(rho: &DensityOperator, side: usize) -> Result<()> {
    if rho.num_subsystems() != 2 {
        return Err(Error::Unsupported(format!(
            "expected a bipartite state, got {} subsystems; regroup first",
            rho.num_subsystems()
        )));
    }
    if side > 1 {
        return Err(Error::Subsystem { index: side, count: 2 });
    }
    Ok(())
}

fn measurement_candidates(dim: usize, cfg: &OptimizerConfig) -> Vec<Vec<f64>> {
    if dim == 2 {
        cfg.qubit_grid()
    } else {
        let n = parameter_count(dim);
        let mut out = vec![vec![0.0; n]];
        out.extend(cfg.random_candidates(n, dim as u64));
        out
    }
}

fn minimize_over_measurements<F>(rho: &DensityOperator, measured: usize, cfg: &OptimizerConfig, f: F) -> Result<OptimizationReport>
where
    F: Fn(&ProjectiveMeasurement) -> Result<f64> + Sync,
{
    check_bipartite(rho, measured)?;
    let dim = rho.dims()[measured];
    let objective = |x: &[f64]| {
        ProjectiveMeasurement::from_parameters(measured, dim, &MeasurementParameters::new(x.to_vec()))
            .and_then(|m| f(&m))
            .unwrap_or(f64::INFINITY)
    };
    let mut report = minimize(objective, measurement_candidates(dim, cfg), cfg)?;
    report.value = clip_small_negative(report.value, NEGATIVE_CLIP);
    Ok(report)
}

/// `min_Π [I(A:B) − J(B|Π_A)] = min_Π S(B|Π_A) − S(B|A)` over rank-one
/// projective measurements on subsystem `measured` of a bipartite state.
pub fn discord(rho: &DensityOperator, measured: usize, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    check_bipartite(rho, measured)?;
    let offset = von_neumann_entropy(&rho.partial_trace(&[measured])?) - von_neumann_entropy(rho);
    minimize_over_measurements(rho, measured, cfg, |m| Ok(offset + measured_conditional_entropy(rho, m)?))
}

/// Discord value for one fixed measurement, `I(A:B) − J(B|Π_A)`.
pub fn discord_for_measurement(rho: &DensityOperator, m: &ProjectiveMeasurement) -> Result<f64> {
    check_bipartite(rho, m.subsystem())?;
    let s_measured = von_neumann_entropy(&rho.partial_trace(&[m.subsystem()])?);
    Ok(s_measured - von_neumann_entropy(rho) + measured_conditional_entropy(rho, m)?)
}

/// Larger of the two one-sided discords.
pub fn symmetric_discord(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(discord(rho, 0, cfg)?.value.max(discord(rho, 1, cfg)?.value))
}

/// `min_Π S(Π(ρ)) − S(ρ)` over rank-one projective measurements on one side.
pub fn one_way_deficit(rho: &DensityOperator, measured: usize, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    let s = von_neumann_entropy(rho);
    minimize_over_measurements(rho, measured, cfg, |m| Ok(von_neumann_entropy(&measure_channel(rho, m)?) - s))
}

/// Orthonormal basis (columns) of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    pub subsystem: usize,
    pub vectors: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct LocalBasisRepr {
    subsystem: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for LocalBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = linalg::split_re_im(&self.vectors);
        LocalBasisRepr {
            subsystem: self.subsystem,
            re,
            im,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = LocalBasisRepr::deserialize(d)?;
        let vectors = linalg::join_re_im(&r.re, &r.im).ok_or_else(|| serde::de::Error::custom("ragged basis"))?;
        Ok(LocalBasis {
            subsystem: r.subsystem,
            vectors,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalityVerdict {
    pub is_classical: bool,
    /// Set when the state is classical: the bases that leave it undisturbed.
    pub witness_basis: Option<Vec<LocalBasis>>,
    /// Least-disturbing bases found, whether or not the state is classical.
    pub best_basis: Vec<LocalBasis>,
    /// Max-norm distance between the state and its dephased image in `best_basis`.
    pub max_disturbance: f64,
}

/// Search space for one side: the marginal eigenbasis, aligned inside each
/// degenerate block with a probe operator, then rotated within blocks.
struct SideFrame {
    subsystem: usize,
    reference: CMatrix,
    blocks: Vec<(usize, usize)>,
}

impl SideFrame {
    fn new(rho: &DensityOperator, side: usize) -> Result<Self> {
        let marginal = rho.partial_trace(&[side])?;
        let (values, vectors) = linalg::eigh(marginal.matrix());
        let mut blocks = Vec::new();
        let mut start = 0;
        for k in 1..=values.len() {
            if k == values.len() || values[k] - values[k - 1] > DEGENERACY_TOL {
                blocks.push((start, k - start));
                start = k;
            }
        }
        let probe = probe_operator(rho, side);
        let mut reference = vectors.clone();
        for &(start, len) in blocks.iter().filter(|b| b.1 > 1) {
            let v = vectors.columns(start, len).into_owned();
            let restricted = v.adjoint() * &probe * &v;
            let (_, w) = linalg::eigh(&restricted);
            reference.columns_mut(start, len).copy_from(&(&v * w));
        }
        Ok(Self {
            subsystem: side,
            reference,
            blocks,
        })
    }

    fn n_params(&self) -> usize {
        self.blocks.iter().filter(|b| b.1 > 1).map(|b| parameter_count(b.1)).sum()
    }

    fn basis(&self, params: &[f64]) -> Result<CMatrix> {
        let dim = self.reference.nrows();
        let mut rotation = linalg::identity(dim);
        let mut k = 0;
        for &(start, len) in self.blocks.iter().filter(|b| b.1 > 1) {
            let n = parameter_count(len);
            let u = basis_unitary(len, &params[k..k + n])?;
            rotation.view_mut((start, start), (len, len)).copy_from(&u);
            k += n;
        }
        Ok(&self.reference * rotation)
    }
}

/// `Tr_other[ρ (I ⊗ R)]` for a fixed pseudo-random Hermitian `R` on the other side.
/// When ρ is classical on `side`, this operator is diagonal in the classical basis.
fn probe_operator(rho: &DensityOperator, side: usize) -> CMatrix {
    let other = 1 - side;
    let d = rho.dims()[other];
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut r = CMatrix::zeros(d, d);
    for i in 0..d {
        r[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..d {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            r[(i, j)] = z;
            r[(j, i)] = z.conj();
        }
    }
    let weighted = rho.matrix() * linalg::embed(&r, other, rho.dims());
    DensityOperator::from_parts(rho.dims().to_vec(), weighted)
        .partial_trace(&[side])
        .map(|m| m.matrix().clone())
        .unwrap_or_else(|_| linalg::identity(rho.dims()[side]))
}

fn dephase(rho: &DensityOperator, frames: &[SideFrame], params: &[f64]) -> Result<(DensityOperator, Vec<LocalBasis>)> {
    let mut out = rho.clone();
    let mut bases = Vec::with_capacity(frames.len());
    let mut k = 0;
    for frame in frames {
        let n = frame.n_params();
        let basis = frame.basis(&params[k..k + n])?;
        k += n;
        out = measure_channel(&out, &ProjectiveMeasurement::from_basis(frame.subsystem, &basis)?)?;
        bases.push(LocalBasis {
            subsystem: frame.subsystem,
            vectors: basis,
        });
    }
    Ok((out, bases))
}

fn classicality(rho: &DensityOperator, sides: &[usize], tol: f64, cfg: &OptimizerConfig) -> Result<ClassicalityVerdict> {
    for &s in sides {
        check_bipartite(rho, s)?;
    }
    let frames = sides.iter().map(|&s| SideFrame::new(rho, s)).collect::<Result<Vec<_>>>()?;
    let n: usize = frames.iter().map(SideFrame::n_params).sum();
    let disturbance = |params: &[f64]| -> Result<(f64, f64, Vec<LocalBasis>)> {
        let (dephased, bases) = dephase(rho, &frames, params)?;
        let diff = rho.matrix() - dephased.matrix();
        Ok((linalg::frobenius_sq(&diff), linalg::max_abs(&diff), bases))
    };

    let (_, mut max_dist, mut bases) = disturbance(&vec![0.0; n])?;
    if max_dist > tol && n > 0 {
        let mut candidates = vec![vec![0.0; n]];
        candidates.extend(cfg.random_candidates(n, 0xc1a5 + n as u64));
        let report = minimize(
            |x: &[f64]| disturbance(x).map(|d| d.0).unwrap_or(f64::INFINITY),
            candidates,
            cfg,
        )?;
        let (_, dist, b) = disturbance(&report.argmin.angles)?;
        if dist < max_dist {
            max_dist = dist;
            bases = b;
        }
    }
    let is_classical = max_dist <= tol;
    Ok(ClassicalityVerdict {
        is_classical,
        witness_basis: is_classical.then(|| bases.clone()),
        best_basis: bases,
        max_disturbance: max_dist,
    })
}

/// Whether some orthonormal product basis dephases ρ to itself within `tol`.
pub fn is_classically_correlated(rho: &DensityOperator, tol: f64) -> Result<ClassicalityVerdict> {
    is_classically_correlated_with(rho, tol, &OptimizerConfig::default())
}

pub fn is_classically_correlated_with(rho: &DensityOperator, tol: f64, cfg: &OptimizerConfig) -> Result<ClassicalityVerdict> {
    classicality(rho, &[0, 1], tol, cfg)
}

/// Whether some basis of `classical_side` alone dephases ρ to itself within `tol`.
pub fn is_classical_quantum(rho: &DensityOperator, classical_side: usize, tol: f64) -> Result<ClassicalityVerdict> {
    is_classical_quantum_with(rho, classical_side, tol, &OptimizerConfig::default())
}

pub fn is_classical_quantum_with(
    rho: &DensityOperator,
    classical_side: usize,
    tol: f64,
    cfg: &OptimizerConfig,
) -> Result<ClassicalityVerdict> {
    classicality(rho, &[classical_side], tol, cfg)
}

/// A channel acting on a single subsystem.
#[derive(Debug, Clone)]
pub enum LocalChannel {
    Identity,
    Measurement(ProjectiveMeasurement),
    Kraus { subsystem: usize, operators: Vec<CMatrix> },
}

impl LocalChannel {
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        match self {
            LocalChannel::Identity => Ok(rho.clone()),
            LocalChannel::Measurement(m) => measure_channel(rho, m),
            LocalChannel::Kraus { subsystem, operators } => {
                let n = rho.num_subsystems();
                if *subsystem >= n {
                    return Err(Error::Subsystem { index: *subsystem, count: n });
                }
                let d = rho.dims()[*subsystem];
                if operators.is_empty() || operators.iter().any(|k| k.nrows() != d || k.ncols() != d) {
                    return Err(Error::Dimensions(format!("Kraus operators must be {d}x{d}")));
                }
                let completeness = operators
                    .iter()
                    .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
                let defect = linalg::max_abs(&(completeness - linalg::identity(d)));
                if defect > TAU_HERM {
                    return Err(Error::NotTracePreserving(defect));
                }
                let side = rho.side();
                let out = operators.iter().fold(CMatrix::zeros(side, side), |acc, k| {
                    let e = linalg::embed(k, *subsystem, rho.dims());
                    acc + &e * rho.matrix() * e.adjoint()
                });
                Ok(DensityOperator::from_parts(rho.dims().to_vec(), out))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutualInformationCheck {
    pub preserved: bool,
    pub before: f64,
    pub after: f64,
    /// Max-norm distance between the input and output states.
    pub max_change: f64,
    pub state_unchanged: bool,
}

/// Whether a local channel leaves `I(cut : rest)` unchanged within `tol`.
pub fn preserves_mutual_information(
    rho: &DensityOperator,
    channel: &LocalChannel,
    cut: &[usize],
    tol: f64,
) -> Result<MutualInformationCheck> {
    let after_state = channel.apply(rho)?;
    let before = mutual_information(rho, cut)?;
    let after = mutual_information(&after_state, cut)?;
    let max_change = linalg::max_abs(&(rho.matrix() - after_state.matrix()));
    Ok(MutualInformationCheck {
        preserved: (before - after).abs() <= tol,
        before,
        after,
        max_change,
        state_unchanged: max_change <= tol,
    })
}

/// One flag value of a state with a classical flag subsystem, with its
/// one-sided classicality verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlagBranch {
    pub flag: usize,
    pub probability: f64,
    pub classical_on_first: ClassicalityVerdict,
    pub classical_on_second: ClassicalityVerdict,
}

impl FlagBranch {
    pub fn one_sided_classical(&self) -> bool {
        self.classical_on_first.is_classical || self.classical_on_second.is_classical
    }
}

/// Reads the flag subsystem in its computational basis and tests each
/// conditional bipartite state for one-sided classicality. When every branch
/// is classical on some side, revealing the flag lets the remaining parties
/// learn their state by local measurements and communication.
pub fn flag_conditioned_classicality(rho: &DensityOperator, flag: usize, tol: f64) -> Result<Vec<FlagBranch>> {
    if rho.num_subsystems() != 3 {
        return Err(Error::Unsupported("flag analysis needs exactly three subsystems".into()));
    }
    if flag > 2 {
        return Err(Error::Subsystem { index: flag, count: 3 });
    }
    let m = ProjectiveMeasurement::computational(flag, rho.dims()[flag]);
    conditional_ensemble(rho, &m)?
        .branches
        .into_iter()
        .map(|b| {
            Ok(FlagBranch {
                flag: b.outcome,
                probability: b.probability,
                classical_on_first: is_classical_quantum(&b.state, 0, tol)?,
                classical_on_second: is_classical_quantum(&b.state, 1, tol)?,
            })
        })
        .collect()
}
