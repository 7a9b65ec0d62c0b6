//! Shannon and von Neumann entropies, the two quantum conditional entropies
//! and mutual information. All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{self, DensityOperator, TAU_PSD};

/// Probabilities below this are treated as exact zeros before taking logs.
pub const ZERO_CUTOFF: f64 = 1e-12;

/// A normalized probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Probabilities("empty distribution".into()));
        }
        qstate::check_probabilities(probs.iter().copied())?;
        Ok(Self {
            probs: probs.into_iter().map(|p| p.max(0.0)).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `-Σ p log₂ p` over raw weights, with `0 log 0 = 0`.
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > ZERO_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

pub fn shannon_entropy(dist: &ProbabilityDistribution) -> f64 {
    entropy_bits(&dist.probs)
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_bits(&rho.spectrum())
}

fn complement(rho: &DensityOperator, cut: &[usize]) -> Result<Vec<usize>> {
    let n = rho.num_subsystems();
    let rest: Vec<usize> = (0..n).filter(|k| !cut.contains(k)).collect();
    if rest.is_empty() {
        return Err(Error::Dimensions("cut must leave at least one subsystem on the other side".into()));
    }
    Ok(rest)
}

/// `S(AB) − S(given)`; negative for entangled states.
pub fn conditional_entropy_subtractive(rho: &DensityOperator, given: usize) -> Result<f64> {
    complement(rho, &[given])?;
    let marginal = rho.partial_trace(&[given])?;
    Ok(von_neumann_entropy(rho) - von_neumann_entropy(&marginal))
}

/// `S(A) + S(B) − S(AB)` with `A` the subsystems in `cut` and `B` the rest.
pub fn mutual_information(rho: &DensityOperator, cut: &[usize]) -> Result<f64> {
    let rest = complement(rho, cut)?;
    let a = rho.partial_trace(cut)?;
    let b = rho.partial_trace(&rest)?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho))
}

/// Joint table `p[a][b]`, validated to be rectangular and normalized.
fn check_table(table: &[Vec<f64>]) -> Result<(usize, usize)> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || table.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimensions("joint table must be a non-empty rectangle".into()));
    }
    qstate::check_probabilities(table.iter().flatten().copied())?;
    Ok((rows, cols))
}

fn marginals(table: &[Vec<f64>], cols: usize) -> (Vec<f64>, Vec<f64>) {
    let pa = table.iter().map(|r| r.iter().sum()).collect();
    let pb = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    (pa, pb)
}

/// `H(a) + H(b) − H(ab)` of a joint distribution.
pub fn classical_mutual_information(table: &[Vec<f64>]) -> Result<f64> {
    let (_, cols) = check_table(table)?;
    let (pa, pb) = marginals(table, cols);
    let joint: Vec<f64> = table.iter().flatten().copied().collect();
    Ok(entropy_bits(&pa) + entropy_bits(&pb) - entropy_bits(&joint))
}

/// `H(b|a) = H(ab) − H(a)`.
pub fn classical_conditional_entropy(table: &[Vec<f64>]) -> Result<f64> {
    let (_, cols) = check_table(table)?;
    let (pa, _) = marginals(table, cols);
    let joint: Vec<f64> = table.iter().flatten().copied().collect();
    Ok(entropy_bits(&joint) - entropy_bits(&pa))
}

/// `H(b|a) = Σ_a p_a H(P_{b|a})`, the outcome-averaged form.
pub fn classical_conditional_entropy_averaged(table: &[Vec<f64>]) -> Result<f64> {
    check_table(table)?;
    Ok(table
        .iter()
        .map(|row| {
            let pa: f64 = row.iter().sum();
            if pa <= ZERO_CUTOFF {
                return 0.0;
            }
            let conditional: Vec<f64> = row.iter().map(|p| p / pa).collect();
            pa * entropy_bits(&conditional)
        })
        .sum())
}

/// Mutual information clipped at zero when within `TAU_PSD` of it.
pub(crate) fn clip_small_negative(x: f64, tol: f64) -> f64 {
    if x < 0.0 && x >= -tol.max(TAU_PSD) {
        0.0
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMatrix, ZERO};
    use crate::qstate::{Ensemble, Ket};
    use approx::assert_abs_diff_eq;

    fn dist(p: &[f64]) -> ProbabilityDistribution {
        ProbabilityDistribution::new(p.to_vec()).unwrap()
    }

    fn bell() -> DensityOperator {
        DensityOperator::from_ket(&Ket::normalized(vec![2, 2], vec![c(1.0, 0.0), ZERO, ZERO, c(1.0, 0.0)]).unwrap())
    }

    fn classical_pair() -> DensityOperator {
        Ensemble::from_kets(vec![
            (0.5, Ket::basis(vec![2, 2], 0).unwrap()),
            (0.5, Ket::basis(vec![2, 2], 3).unwrap()),
        ])
        .unwrap()
        .mix()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&dist(&[1.0, 0.0])), 0.0);
        assert_eq!(shannon_entropy(&dist(&[0.5, 0.5])), 1.0);
        assert_eq!(shannon_entropy(&dist(&[0.25; 4])), 2.0);
        assert!(ProbabilityDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityDistribution::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn von_neumann_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&bell()), 0.0, epsilon = 1e-12);
        let mixed = DensityOperator::maximally_mixed(vec![2]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mixed), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(von_neumann_entropy(&classical_pair()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn conditional_entropy_examples() {
        assert_abs_diff_eq!(conditional_entropy_subtractive(&bell(), 0).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(conditional_entropy_subtractive(&classical_pair(), 0).unwrap(), 0.0, epsilon = 1e-12);
        let rb = DensityOperator::new(
            vec![2],
            CMatrix::from_row_slice(2, 2, &[c(0.8, 0.0), ZERO, ZERO, c(0.2, 0.0)]),
        )
        .unwrap();
        let product = DensityOperator::maximally_mixed(vec![2]).unwrap().tensor(&rb).unwrap();
        assert_abs_diff_eq!(
            conditional_entropy_subtractive(&product, 0).unwrap(),
            von_neumann_entropy(&rb),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mutual_information_examples() {
        let product = DensityOperator::from_ket(&Ket::plus().tensor(&Ket::zero()));
        assert_abs_diff_eq!(mutual_information(&product, &[0]).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_information(&classical_pair(), &[0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_information(&bell(), &[0]).unwrap(), 2.0, epsilon = 1e-12);
        assert!(mutual_information(&bell(), &[0, 1]).is_err());
    }

    #[test]
    fn classical_mutual_information_examples() {
        assert_abs_diff_eq!(classical_mutual_information(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap(), 1.0);
        assert_abs_diff_eq!(classical_mutual_information(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap(), 0.0);
        assert!(classical_mutual_information(&[vec![0.5, 0.25], vec![0.25]]).is_err());
    }

    #[test]
    fn conditional_entropy_forms_agree() {
        let t = [vec![0.1, 0.2, 0.05], vec![0.3, 0.0, 0.35]];
        assert_abs_diff_eq!(
            classical_conditional_entropy(&t).unwrap(),
            classical_conditional_entropy_averaged(&t).unwrap(),
            epsilon = 1e-12
        );
    }
}
