//! Derivative-free minimization: a deterministic candidate sweep followed by
//! Nelder–Mead refinement from the best few candidates.
//!
//! Candidate evaluation fans out across threads; the reduction is ordered, and
//! ties on value go to the lowest candidate index, so results depend only on
//! the configuration.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::MeasurementParameters;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Polar grid points for a qubit basis, θ ∈ [0, π).
    pub polar_points: usize,
    /// Azimuthal grid points for a qubit basis, φ ∈ [0, 2π).
    pub azimuthal_points: usize,
    /// Seeded random candidates used when the parameter space is too large for a grid.
    pub samples: usize,
    pub seed: u64,
    /// Refinement stops once the simplex values spread less than this.
    pub refine_tol: f64,
    /// Number of best candidates refined.
    pub starts: usize,
    /// Objective-evaluation budget per refinement.
    pub max_evals: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            polar_points: 24,
            azimuthal_points: 48,
            samples: 512,
            seed: 0,
            refine_tol: 1e-9,
            starts: 5,
            max_evals: 20_000,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.polar_points < 4 || self.azimuthal_points < 4 {
            return Err(Error::Config("grid density must be at least 4".into()));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::Config("refinement tolerance must be positive".into()));
        }
        if self.starts == 0 || self.max_evals == 0 {
            return Err(Error::Config("need at least one refinement start and evaluation".into()));
        }
        Ok(())
    }

    /// Regular `(θ, φ)` grid for one qubit basis. θ = π is omitted since it
    /// selects the same measurement as θ = 0.
    pub fn qubit_grid(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.polar_points * self.azimuthal_points);
        for i in 0..self.polar_points {
            for j in 0..self.azimuthal_points {
                out.push(vec![
                    PI * i as f64 / self.polar_points as f64,
                    2.0 * PI * j as f64 / self.azimuthal_points as f64,
                ]);
            }
        }
        out
    }

    /// `samples` points with every angle uniform in `[0, 2π)`, reproducible from `seed`.
    pub fn random_candidates(&self, n_params: usize, stream: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        (0..self.samples)
            .map(|_| (0..n_params).map(|_| rng.gen_range(0.0..2.0 * PI)).collect())
            .collect()
    }

    /// Initial simplex edge: half a grid cell in θ.
    fn initial_step(&self) -> f64 {
        0.5 * PI / self.polar_points as f64
    }
}

/// Minimum of an objective over measurement parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    /// Minimized value in bits.
    pub value: f64,
    pub argmin: MeasurementParameters,
    /// Number of candidates swept before refinement.
    pub grid_size: usize,
    /// Nelder–Mead iterations summed over all starts.
    pub refinement_steps: usize,
    /// Best value after the sweep, then after each refinement; non-increasing.
    pub value_history: Vec<f64>,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Sweeps `candidates`, refines the best `cfg.starts`, and returns the overall minimum.
pub fn minimize<F>(objective: F, candidates: Vec<Vec<f64>>, cfg: &OptimizerConfig) -> Result<OptimizationReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    if candidates.is_empty() {
        return Err(Error::Config("no optimization candidates".into()));
    }
    let values: Vec<f64> = candidates.par_iter().map(|x| sanitize(objective(x))).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut best_x = candidates[order[0]].clone();
    let mut best = values[order[0]];
    let mut history = vec![best];

    let refined: Vec<(Vec<f64>, f64, usize)> = order
        .iter()
        .take(cfg.starts)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&idx| nelder_mead(&objective, &candidates[idx], values[idx], cfg))
        .collect();

    let mut steps = 0;
    for (x, v, iters) in refined {
        steps += iters;
        if v < best {
            best = v;
            best_x = x;
        }
        history.push(best);
    }
    Ok(OptimizationReport {
        value: best,
        argmin: MeasurementParameters::new(best_x),
        grid_size: candidates.len(),
        refinement_steps: steps,
        value_history: history,
    })
}

/// Nelder–Mead with standard coefficients, restarted from its own optimum
/// until a restart stops improving. Returns (argmin, min, iterations).
pub fn nelder_mead<F>(objective: &F, start: &[f64], start_value: f64, cfg: &OptimizerConfig) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = start.to_vec();
    let mut fx = start_value;
    let mut iterations = 0;
    let mut step = cfg.initial_step();
    for _ in 0..4 {
        let (nx, nf, it) = nelder_mead_once(objective, &x, fx, step, cfg);
        iterations += it;
        let improved = fx - nf;
        if nf < fx {
            x = nx;
            fx = nf;
        }
        if improved <= cfg.refine_tol {
            break;
        }
        step *= 0.5;
    }
    (x, fx, iterations)
}

fn nelder_mead_once<F>(objective: &F, start: &[f64], start_value: f64, step: f64, cfg: &OptimizerConfig) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    if n == 0 {
        return (Vec::new(), start_value, 0);
    }
    let f = |x: &[f64]| sanitize(objective(x));
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), start_value));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step;
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let mut evals = n;
    let mut iterations = 0;
    let xtol = 1e-10;
    while evals < cfg.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= cfg.refine_tol * 1e-3 || (spread <= cfg.refine_tol && size <= 1e-7) || size <= xtol {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(v, _)| v[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[n].1 {
                let p = along(-0.5);
                let fp = f(&p);
                (p, fp)
            } else {
                let p = along(0.5);
                let fp = f(&p);
                (p, fp)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = entry.0.iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    let fv = f(&v);
                    *entry = (v, fv);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let cfg = OptimizerConfig::default();
        let (x, v, _) = nelder_mead(&rosen, &[-1.2, 1.0], rosen(&[-1.2, 1.0]), &cfg);
        assert!(v < 1e-12, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn sweep_ties_go_to_lowest_index_and_history_is_monotone() {
        let cfg = OptimizerConfig {
            starts: 3,
            ..Default::default()
        };
        let f = |x: &[f64]| (x[0].sin() - 0.3).powi(2) + (x[1] - 1.0).powi(2);
        let report = minimize(f, cfg.qubit_grid(), &cfg).unwrap();
        assert!(report.value < 1e-12);
        assert_eq!(report.grid_size, 24 * 48);
        assert!(report.value_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(f(&report.argmin.angles), report.value);
        let again = minimize(f, cfg.qubit_grid(), &cfg).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn random_candidates_are_reproducible() {
        let cfg = OptimizerConfig::default();
        assert_eq!(cfg.random_candidates(12, 1), cfg.random_candidates(12, 1));
        assert_ne!(cfg.random_candidates(12, 1), cfg.random_candidates(12, 2));
    }

    #[test]
    fn config_validation() {
        let bad = OptimizerConfig {
            polar_points: 3,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            refine_tol: 0.0,
            ..Default::default()
        };
        assert!(minimize(|_| 0.0, vec![vec![0.0]], &bad).is_err());
    }
}
