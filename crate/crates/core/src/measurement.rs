//! Local projective measurements, the dephasing channel they induce, and the
//! conditional ensembles left on the unmeasured subsystems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::{von_neumann_entropy, ZERO_CUTOFF};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::qstate::{DensityOperator, TAU_HERM};

/// Angles parametrizing an orthonormal basis of one subsystem.
///
/// A qubit uses the Bloch pair `(θ, φ)`; the first basis vector is
/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`. Larger dimensions use an ordered product
/// of complex Givens rotations, one `(θ, φ)` pair per index pair `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParameters {
    pub angles: Vec<f64>,
}

impl MeasurementParameters {
    pub fn new(angles: Vec<f64>) -> Self {
        Self { angles }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            angles: vec![0.0; parameter_count(dim)],
        }
    }
}

pub fn parameter_count(dim: usize) -> usize {
    if dim == 2 {
        2
    } else {
        dim * (dim - 1)
    }
}

/// Unitary whose columns are the basis selected by `angles`.
pub fn basis_unitary(dim: usize, angles: &[f64]) -> Result<CMatrix> {
    if dim < 2 {
        return Err(Error::Dimensions(format!("cannot parametrize a basis of dimension {dim}")));
    }
    let expected = parameter_count(dim);
    if angles.len() != expected {
        return Err(Error::ParameterCount {
            dim,
            expected,
            got: angles.len(),
        });
    }
    if dim == 2 {
        let (theta, phi) = (angles[0], angles[1]);
        let (s, co) = (theta / 2.0).sin_cos();
        let phase = Complex64::from_polar(1.0, phi);
        return Ok(CMatrix::from_row_slice(
            2,
            2,
            &[c(co, 0.0), -phase.conj() * s, phase * s, c(co, 0.0)],
        ));
    }
    let mut u = linalg::identity(dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            let (theta, phi) = (angles[k], angles[k + 1]);
            k += 2;
            let (s, co) = theta.sin_cos();
            let phase = Complex64::from_polar(1.0, phi);
            // right-multiply by the rotation acting on columns i and j
            for r in 0..dim {
                let (ui, uj) = (u[(r, i)], u[(r, j)]);
                u[(r, i)] = ui * co + uj * phase * s;
                u[(r, j)] = -ui * phase.conj() * s + uj * co;
            }
        }
    }
    Ok(u)
}

/// An ordered family of orthogonal projectors resolving the identity on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    subsystem: usize,
    projectors: Vec<CMatrix>,
}

impl ProjectiveMeasurement {
    /// Accepts projectors of any rank; checks idempotence, Hermiticity,
    /// pairwise orthogonality and completeness within `TAU_HERM`.
    pub fn new(subsystem: usize, projectors: Vec<CMatrix>) -> Result<Self> {
        let dim = projectors
            .first()
            .map(|p| p.nrows())
            .ok_or_else(|| Error::Measurement("no projectors".into()))?;
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::Measurement(format!("projector {i} is not {dim}x{dim}")));
            }
            if linalg::hermiticity_defect(p) > TAU_HERM {
                return Err(Error::Measurement(format!("projector {i} is not Hermitian")));
            }
            if linalg::max_abs(&(p * p - p)) > TAU_HERM {
                return Err(Error::Measurement(format!("projector {i} is not idempotent")));
            }
            for (j, q) in projectors[..i].iter().enumerate() {
                if linalg::max_abs(&(p * q)) > TAU_HERM {
                    return Err(Error::Measurement(format!("projectors {j} and {i} are not orthogonal")));
                }
            }
            sum += p;
        }
        if linalg::max_abs(&(sum - linalg::identity(dim))) > TAU_HERM {
            return Err(Error::Measurement("projectors do not sum to the identity".into()));
        }
        Ok(Self { subsystem, projectors })
    }

    /// Rank-one measurement onto the columns of a unitary.
    pub fn from_basis(subsystem: usize, basis: &CMatrix) -> Result<Self> {
        let defect = linalg::unitarity_defect(basis);
        if defect > TAU_HERM {
            return Err(Error::NotUnitary(defect));
        }
        let projectors = (0..basis.ncols())
            .map(|k| {
                let v: Vec<Complex64> = basis.column(k).iter().copied().collect();
                linalg::outer(&v)
            })
            .collect();
        Ok(Self { subsystem, projectors })
    }

    pub fn from_parameters(subsystem: usize, dim: usize, params: &MeasurementParameters) -> Result<Self> {
        Self::from_basis(subsystem, &basis_unitary(dim, &params.angles)?)
    }

    pub fn computational(subsystem: usize, dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|k| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(k, k)] = c(1.0, 0.0);
                p
            })
            .collect();
        Self { subsystem, projectors }
    }

    /// The same projectors acting on another subsystem index.
    pub fn on(mut self, subsystem: usize) -> Self {
        self.subsystem = subsystem;
        self
    }

    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    fn embedded(&self, rho: &DensityOperator) -> Result<Vec<CMatrix>> {
        let n = rho.num_subsystems();
        if self.subsystem >= n {
            return Err(Error::Subsystem {
                index: self.subsystem,
                count: n,
            });
        }
        if rho.dims()[self.subsystem] != self.dim() {
            return Err(Error::Dimensions(format!(
                "measurement of dimension {} on subsystem of dimension {}",
                self.dim(),
                rho.dims()[self.subsystem]
            )));
        }
        Ok(self
            .projectors
            .iter()
            .map(|p| linalg::embed(p, self.subsystem, rho.dims()))
            .collect())
    }
}

/// Rank-one measurement selected by `params`, acting on subsystem 0.
pub fn basis_from_parameters(params: &MeasurementParameters, dim: usize) -> Result<ProjectiveMeasurement> {
    ProjectiveMeasurement::from_parameters(0, dim, params)
}

/// `Σ_a (Π_a ⊗ I) ρ (Π_a ⊗ I)`.
pub fn measure_channel(rho: &DensityOperator, m: &ProjectiveMeasurement) -> Result<DensityOperator> {
    let side = rho.side();
    let out = m
        .embedded(rho)?
        .iter()
        .fold(CMatrix::zeros(side, side), |acc, e| acc + e * rho.matrix() * e);
    Ok(DensityOperator::from_parts(rho.dims().to_vec(), out))
}

/// One branch of a measurement: outcome label, its probability, and the
/// normalized state of the unmeasured subsystems.
#[derive(Debug, Clone)]
pub struct ConditionalBranch {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityOperator,
}

#[derive(Debug, Clone)]
pub struct ConditionalEnsemble {
    pub branches: Vec<ConditionalBranch>,
}

impl ConditionalEnsemble {
    pub fn probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.probability).collect()
    }
}

/// Outcome probabilities `Tr[Π_a ρ]` and post-measurement states of the rest.
/// Outcomes with probability below 1e-12 are dropped.
pub fn conditional_ensemble(rho: &DensityOperator, m: &ProjectiveMeasurement) -> Result<ConditionalEnsemble> {
    let n = rho.num_subsystems();
    let rest: Vec<usize> = (0..n).filter(|&k| k != m.subsystem).collect();
    if rest.is_empty() {
        return Err(Error::Dimensions("conditional ensemble needs an unmeasured subsystem".into()));
    }
    let mut branches = Vec::with_capacity(m.projectors.len());
    for (outcome, e) in m.embedded(rho)?.iter().enumerate() {
        let projected = e * rho.matrix() * e;
        let p = linalg::trace(&projected).re;
        if p < ZERO_CUTOFF {
            continue;
        }
        let normalized = DensityOperator::from_parts(rho.dims().to_vec(), projected.unscale(p));
        branches.push(ConditionalBranch {
            outcome,
            probability: p,
            state: normalized.partial_trace(&rest)?,
        });
    }
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    for b in branches.iter_mut() {
        b.probability /= total;
    }
    Ok(ConditionalEnsemble { branches })
}

/// `S(B|Π_A) = Σ_a p_a S(ρ_{B|a})`.
pub fn measured_conditional_entropy(rho: &DensityOperator, m: &ProjectiveMeasurement) -> Result<f64> {
    Ok(conditional_ensemble(rho, m)?
        .branches
        .iter()
        .map(|b| b.probability * von_neumann_entropy(&b.state))
        .sum())
}

/// `J(B|Π_A) = S(B) − S(B|Π_A)`.
pub fn classical_correlations_j(rho: &DensityOperator, m: &ProjectiveMeasurement) -> Result<f64> {
    let rest: Vec<usize> = (0..rho.num_subsystems()).filter(|&k| k != m.subsystem).collect();
    if rest.is_empty() {
        return Err(Error::Dimensions("classical correlations need an unmeasured subsystem".into()));
    }
    let s_rest = von_neumann_entropy(&rho.partial_trace(&rest)?);
    Ok(s_rest - measured_conditional_entropy(rho, m)?)
}

/// `Σ_a p_a Π_a ⊗ ρ_{B|a}` for a rank-one measurement on subsystem 0 of a bipartite state.
pub fn reconstruct_from_ensemble(m: &ProjectiveMeasurement, ensemble: &ConditionalEnsemble) -> CMatrix {
    let dim_b = ensemble.branches.first().map_or(1, |b| b.state.side());
    let side = m.dim() * dim_b;
    ensemble.branches.iter().fold(CMatrix::zeros(side, side), |acc, b| {
        acc + linalg::kron(&m.projectors[b.outcome], b.state.matrix()).scale(b.probability)
    })
}
