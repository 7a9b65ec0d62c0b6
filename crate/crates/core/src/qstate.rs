//! Density operators over tensor-product spaces.
//!
//! Subsystems are indexed from 0 and composed in row-major Kronecker order:
//! the leftmost factor is the most significant digit of a basis index.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, ZERO};

/// Allowed deviation from Hermiticity (max-norm).
pub const TAU_HERM: f64 = 1e-9;
/// Allowed deviation of the trace (or a norm, or a probability sum) from 1.
pub const TAU_TRACE: f64 = 1e-9;
/// Most negative eigenvalue accepted (and clipped to zero) by validation.
pub const TAU_PSD: f64 = 1e-9;
/// Largest total Hilbert-space dimension accepted.
pub const MAX_SIDE: usize = 64;

/// Eigenvalues smaller in magnitude than this are float noise of a PSD matrix.
const NOISE_FLOOR: f64 = 1e-12;

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::Dimensions("no subsystems".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::Dimensions(format!("subsystem dimension {d} < 2")));
    }
    let side = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&s| s <= MAX_SIDE)
        .ok_or_else(|| Error::Dimensions(format!("total dimension of {dims:?} exceeds {MAX_SIDE}")))?;
    Ok(side)
}

fn check_subsystems(indices: &[usize], count: usize) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::EmptySelection);
    }
    for (k, &i) in indices.iter().enumerate() {
        if i >= count {
            return Err(Error::Subsystem { index: i, count });
        }
        if indices[..k].contains(&i) {
            return Err(Error::Dimensions(format!("subsystem {i} listed twice")));
        }
    }
    Ok(())
}

/// A pure state vector over a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl Ket {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let side = check_dims(&dims)?;
        if amplitudes.len() != side {
            return Err(Error::Dimensions(format!(
                "{} amplitudes for total dimension {side}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TAU_TRACE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes the given amplitudes before validating.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(dims, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let side = check_dims(&dims)?;
        if index >= side {
            return Err(Error::Dimensions(format!("basis index {index} >= {side}")));
        }
        let mut amplitudes = vec![ZERO; side];
        amplitudes[index] = c(1.0, 0.0);
        Self::new(dims, amplitudes)
    }

    /// |0⟩, |1⟩, |+⟩, |−⟩ on a single qubit.
    pub fn zero() -> Self {
        Self::qubit(1.0, 0.0)
    }
    pub fn one() -> Self {
        Self::qubit(0.0, 1.0)
    }
    pub fn plus() -> Self {
        Self::qubit(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    }
    pub fn minus() -> Self {
        Self::qubit(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2)
    }

    fn qubit(a0: f64, a1: f64) -> Self {
        Self {
            dims: vec![2],
            amplitudes: vec![c(a0, 0.0), c(a1, 0.0)],
        }
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ket { dims, amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        linalg::outer(&self.amplitudes)
    }

    /// Born-rule probability of finding `self` in the pure state `other`.
    pub fn overlap_probability(&self, other: &Ket) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates `matrix` against the tolerances above. Eigenvalues in
    /// `[-TAU_PSD, 0)` are clipped to zero and the trace renormalized; a matrix
    /// whose spectrum is already non-negative up to float noise is kept verbatim.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let side = check_dims(&dims)?;
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::Dimensions(format!(
                "matrix is {}x{}, dims {dims:?} need {side}x{side}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Dimensions("matrix has non-finite entries".into()));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > TAU_HERM {
            return Err(Error::NotHermitian(defect));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > TAU_TRACE {
            return Err(Error::Trace(tr));
        }
        let (values, vectors) = linalg::eigh(&matrix);
        let min = values[0];
        if min < -TAU_PSD {
            return Err(Error::NotPositive(min));
        }
        if min >= -NOISE_FLOOR {
            return Ok(Self { dims, matrix });
        }
        let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let diag = DVector::from_iterator(side, clipped.iter().map(|&v| c(v / total, 0.0)));
        let matrix = &vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint();
        Ok(Self { dims, matrix })
    }

    /// Skips validation; callers guarantee the result is a state.
    pub(crate) fn from_parts(dims: Vec<usize>, matrix: CMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        Self { dims, matrix }
    }

    pub fn from_ket(ket: &Ket) -> Self {
        Self::from_parts(ket.dims.clone(), ket.projector())
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let side = check_dims(&dims)?;
        Ok(Self::from_parts(dims, linalg::identity(side).unscale(side as f64)))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Ascending spectrum with noise clipped to zero and renormalized.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut values = linalg::eigvalsh(&self.matrix);
        for v in values.iter_mut() {
            if *v < NOISE_FLOOR {
                *v = 0.0;
            }
        }
        let total: f64 = values.iter().sum();
        values.iter().map(|v| v / total).collect()
    }

    pub fn purity(&self) -> f64 {
        linalg::frobenius_sq(&self.matrix)
    }

    /// `U ρ U†` for a unitary on the whole space.
    pub fn evolve(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.side() || unitary.ncols() != self.side() {
            return Err(Error::Dimensions("unitary size does not match state".into()));
        }
        let defect = linalg::unitarity_defect(unitary);
        if defect > TAU_HERM {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self::from_parts(
            self.dims.clone(),
            unitary * &self.matrix * unitary.adjoint(),
        ))
    }

    /// Applies a unitary acting on one subsystem only.
    pub fn evolve_local(&self, unitary: &CMatrix, subsystem: usize) -> Result<Self> {
        check_subsystems(&[subsystem], self.num_subsystems())?;
        if unitary.nrows() != self.dims[subsystem] {
            return Err(Error::Dimensions(format!(
                "local unitary of size {} on subsystem of dimension {}",
                unitary.nrows(),
                self.dims[subsystem]
            )));
        }
        self.evolve(&linalg::embed(unitary, subsystem, &self.dims))
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        tensor(self, other)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }

    /// Reorders subsystems: new subsystem `k` is old subsystem `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<DensityOperator> {
        let n = self.num_subsystems();
        if order.len() != n {
            return Err(Error::Dimensions(format!("permutation of length {} for {n} subsystems", order.len())));
        }
        check_subsystems(order, n)?;
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let side = self.side();
        // old index for every new index
        let mut map = vec![0usize; side];
        let mut new_digits = vec![0usize; n];
        let mut old_digits = vec![0usize; n];
        for (idx, slot) in map.iter_mut().enumerate() {
            linalg::digits(idx, &new_dims, &mut new_digits);
            for (k, &src) in order.iter().enumerate() {
                old_digits[src] = new_digits[k];
            }
            *slot = linalg::compose(&old_digits, &self.dims);
        }
        let matrix = CMatrix::from_fn(side, side, |i, j| self.matrix[(map[i], map[j])]);
        Ok(Self::from_parts(new_dims, matrix))
    }

    /// Permutes and merges subsystems into coarser parties, e.g.
    /// `regroup(&[&[1], &[0, 2]])` turns an `A,B,C` state into a `B|AC` bipartite state.
    pub fn regroup(&self, groups: &[&[usize]]) -> Result<DensityOperator> {
        let order: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
        if groups.iter().any(|g| g.is_empty()) {
            return Err(Error::EmptySelection);
        }
        let permuted = self.permute(&order)?;
        let dims = groups
            .iter()
            .map(|g| g.iter().map(|&k| self.dims[k]).product())
            .collect();
        Ok(Self::from_parts(dims, permuted.matrix))
    }

    pub fn to_file(&self) -> StateFile {
        let (re, im) = linalg::split_re_im(&self.matrix);
        StateFile {
            dims: self.dims.clone(),
            re,
            im,
        }
    }

    pub fn from_file(file: &StateFile) -> Result<Self> {
        let matrix = linalg::join_re_im(&file.re, &file.im)
            .ok_or_else(|| Error::Dimensions("ragged or mismatched re/im arrays".into()))?;
        Self::new(file.dims.clone(), matrix)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

/// JSON interchange form: `{"dims":[2,2],"re":[[...]],"im":[[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// A weighted collection of states sharing the same subsystem dimensions.
#[derive(Debug, Clone)]
pub struct Ensemble {
    entries: Vec<(f64, DensityOperator)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::Probabilities("empty ensemble".into()))?;
        let dims = first.1.dims().to_vec();
        if let Some((_, s)) = entries.iter().find(|(_, s)| s.dims() != dims.as_slice()) {
            return Err(Error::Dimensions(format!(
                "ensemble members have dims {dims:?} and {:?}",
                s.dims()
            )));
        }
        check_probabilities(entries.iter().map(|(p, _)| *p))?;
        Ok(Self { entries })
    }

    pub fn from_kets(entries: Vec<(f64, Ket)>) -> Result<Self> {
        Self::new(
            entries
                .into_iter()
                .map(|(p, k)| (p, DensityOperator::from_ket(&k)))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(f64, DensityOperator)] {
        &self.entries
    }

    pub fn mix(&self) -> DensityOperator {
        mix(self)
    }
}

pub(crate) fn check_probabilities(probs: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for p in probs {
        if !p.is_finite() || p < -TAU_PSD {
            return Err(Error::Probabilities(format!("entry {p} is negative or not finite")));
        }
        total += p;
    }
    if (total - 1.0).abs() > TAU_TRACE {
        return Err(Error::Probabilities(format!("probabilities sum to {total}")));
    }
    Ok(())
}

pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    check_dims(&dims)?;
    Ok(DensityOperator::from_parts(dims, linalg::kron(&a.matrix, &b.matrix)))
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems stay
/// in their original relative order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let n = rho.num_subsystems();
    check_subsystems(keep, n)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| rho.dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| rho.dims[k]).collect();
    let out_side: usize = keep_dims.iter().product();
    let env_side: usize = traced_dims.iter().product();

    // full index for every (kept, traced) pair
    let mut full = vec![0usize; out_side * env_side];
    let mut kd = vec![0usize; keep.len()];
    let mut td = vec![0usize; traced.len()];
    let mut all = vec![0usize; n];
    for i in 0..out_side {
        linalg::digits(i, &keep_dims, &mut kd);
        for (slot, &k) in kd.iter().zip(&keep) {
            all[k] = *slot;
        }
        for t in 0..env_side {
            linalg::digits(t, &traced_dims, &mut td);
            for (slot, &k) in td.iter().zip(&traced) {
                all[k] = *slot;
            }
            full[i * env_side + t] = linalg::compose(&all, &rho.dims);
        }
    }
    let matrix = CMatrix::from_fn(out_side, out_side, |i, j| {
        (0..env_side)
            .map(|t| rho.matrix[(full[i * env_side + t], full[j * env_side + t])])
            .sum()
    });
    Ok(DensityOperator::from_parts(keep_dims, matrix))
}

pub fn mix(ensemble: &Ensemble) -> DensityOperator {
    let (_, first) = &ensemble.entries[0];
    let side = first.side();
    let matrix = ensemble
        .entries
        .iter()
        .fold(CMatrix::zeros(side, side), |acc, (p, s)| acc + s.matrix.scale(*p));
    DensityOperator::from_parts(first.dims.clone(), matrix)
}

/// Transpose on one subsystem.
pub fn partial_transpose(rho: &DensityOperator, subsystem: usize) -> Result<CMatrix> {
    partial_transpose_many(rho, &[subsystem])
}

/// Transpose on every listed subsystem.
pub fn partial_transpose_many(rho: &DensityOperator, subsystems: &[usize]) -> Result<CMatrix> {
    let n = rho.num_subsystems();
    check_subsystems(subsystems, n)?;
    let side = rho.side();
    let mut di = vec![0usize; n];
    let mut dj = vec![0usize; n];
    let mut out = CMatrix::zeros(side, side);
    for i in 0..side {
        for j in 0..side {
            linalg::digits(i, &rho.dims, &mut di);
            linalg::digits(j, &rho.dims, &mut dj);
            for &k in subsystems {
                std::mem::swap(&mut di[k], &mut dj[k]);
            }
            out[(linalg::compose(&di, &rho.dims), linalg::compose(&dj, &rho.dims))] = rho.matrix[(i, j)];
        }
    }
    Ok(out)
}

/// Sum of the absolute values of the negative eigenvalues of the partial
/// transpose over the `cut` side.
pub fn negativity(rho: &DensityOperator, cut: &[usize]) -> Result<f64> {
    let pt = partial_transpose_many(rho, cut)?;
    Ok(linalg::eigvalsh(&pt)
        .into_iter()
        .filter(|&v| v < -NOISE_FLOOR)
        .map(f64::abs)
        .sum())
}
