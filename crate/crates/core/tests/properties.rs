mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qcorr_core::correlations::{discord, one_way_deficit};
use qcorr_core::entropy::{mutual_information, von_neumann_entropy};
use qcorr_core::linalg::max_abs;
use qcorr_core::measurement::{
    classical_correlations_j, conditional_ensemble, measure_channel, reconstruct_from_ensemble, MeasurementParameters,
    ProjectiveMeasurement,
};
use qcorr_core::protocols::{average_bb84_state, empirical_bb84_state, run_bb84, Basis};
use qcorr_core::qstate::{negativity, tensor};
use qcorr_core::states::locc_ensemble;
use qcorr_core::{DensityOperator, Ensemble, Ket, OptimizerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn column_ket(u: &qcorr_core::linalg::CMatrix, k: usize) -> Ket {
    let amps: Vec<Complex64> = u.column(k).iter().copied().collect();
    Ket::normalized(vec![u.nrows()], amps).unwrap()
}

fn random_ket(r: &mut ChaCha8Rng, d: usize) -> Ket {
    column_ket(&common::random_unitary(r, d), 0)
}

/// `Σ p_ij |a_i⟩⟨a_i| ⊗ |b_j⟩⟨b_j|` in random local bases.
fn random_classical(r: &mut ChaCha8Rng, da: usize, db: usize) -> DensityOperator {
    let ua = common::random_unitary(r, da);
    let ub = common::random_unitary(r, db);
    let table = common::random_table(r, da, db);
    let entries = (0..da)
        .flat_map(|i| (0..db).map(move |j| (i, j)))
        .filter(|&(i, j)| table[i][j] > 0.0)
        .map(|(i, j)| (table[i][j], column_ket(&ua, i).tensor(&column_ket(&ub, j))))
        .collect();
    Ensemble::from_kets(entries).unwrap().mix()
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_permutation_invariant(seed in any::<u64>(), dims in dims_strategy()) {
        let rho = common::random_state(&mut rng(seed), &dims);
        let order: Vec<usize> = (0..dims.len()).rev().collect();
        let moved = rho.permute(&order).unwrap();
        let reversed: Vec<usize> = dims.iter().rev().copied().collect();
        prop_assert_eq!(moved.dims(), reversed.as_slice());
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&moved)).abs() < 1e-10);
        let back = moved.permute(&order).unwrap();
        prop_assert!(max_abs(&(back.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn partial_trace_undoes_tensor(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=3) {
        let mut r = rng(seed);
        let a = common::random_state(&mut r, &[da]);
        let b = common::random_state(&mut r, &[db]);
        let ab = tensor(&a, &b).unwrap();
        prop_assert!(max_abs(&(ab.partial_trace(&[0]).unwrap().matrix() - a.matrix())) < 1e-14);
        prop_assert!(max_abs(&(ab.partial_trace(&[1]).unwrap().matrix() - b.matrix())) < 1e-14);
        prop_assert!(mutual_information(&ab, &[0]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>(), dims in dims_strategy()) {
        let rho = common::random_state(&mut rng(seed), &dims);
        let text = rho.to_json().unwrap();
        let back = DensityOperator::from_json(&text).unwrap();
        prop_assert_eq!(&back, &rho);
        prop_assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn mutual_information_is_nonnegative(seed in any::<u64>(), dims in dims_strategy()) {
        let rho = common::random_state(&mut rng(seed), &dims);
        prop_assert!(mutual_information(&rho, &[0]).unwrap() >= -1e-12);
    }

    #[test]
    fn locc_ensembles_have_no_negativity(seed in any::<u64>(), k in 1usize..=4, keep_flag in any::<bool>()) {
        let mut r = rng(seed);
        let weights: Vec<f64> = (0..k).map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let entries: Vec<(f64, Ket, Ket)> = weights
            .iter()
            .map(|w| (w / total, random_ket(&mut r, 2), random_ket(&mut r, 2)))
            .collect();
        let rho = locc_ensemble(&entries, keep_flag).unwrap();
        prop_assert!(negativity(&rho, &[0]).unwrap() < 1e-9);
        if keep_flag {
            let dropped = locc_ensemble(&entries, false).unwrap();
            prop_assert!(max_abs(&(rho.partial_trace(&[0, 1]).unwrap().matrix() - dropped.matrix())) < 1e-14);
        }
    }

    #[test]
    fn measure_channel_is_idempotent(seed in any::<u64>(), side in 0usize..2) {
        let mut r = rng(seed);
        let rho = common::random_state(&mut r, &[2, 3]);
        let d = rho.dims()[side];
        let m = ProjectiveMeasurement::from_basis(side, &common::random_unitary(&mut r, d)).unwrap();
        let once = measure_channel(&rho, &m).unwrap();
        let twice = measure_channel(&once, &m).unwrap();
        prop_assert!(max_abs(&(once.matrix() - twice.matrix())) < 1e-14);
    }

    #[test]
    fn conditional_ensemble_reconstructs_measured_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = common::random_state(&mut r, &[3, 2]);
        let m = ProjectiveMeasurement::from_basis(0, &common::random_unitary(&mut r, 3)).unwrap();
        let ens = conditional_ensemble(&rho, &m).unwrap();
        let rebuilt = reconstruct_from_ensemble(&m, &ens);
        prop_assert!(max_abs(&(rebuilt - measure_channel(&rho, &m).unwrap().matrix())) < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn classical_states_have_zero_discord(seed in any::<u64>(), side in 0usize..2) {
        let rho = random_classical(&mut rng(seed), 2, 2);
        prop_assert!(discord(&rho, side, &OptimizerConfig::default()).unwrap().value <= 1e-7);
    }

    #[test]
    fn deficit_dominates_discord(seed in any::<u64>(), side in 0usize..2) {
        let rho = common::random_state(&mut rng(seed), &[2, 2]);
        let cfg = OptimizerConfig::default();
        let d = discord(&rho, side, &cfg).unwrap().value;
        let w = one_way_deficit(&rho, side, &cfg).unwrap().value;
        prop_assert!(w >= d - 1e-7, "deficit {w} < discord {d}");
    }

    #[test]
    fn pure_state_discord_is_marginal_entropy(seed in any::<u64>()) {
        let rho = common::random_pure(&mut rng(seed), &[2, 2]);
        let s = von_neumann_entropy(&rho.partial_trace(&[0]).unwrap());
        let d = discord(&rho, 0, &OptimizerConfig::default()).unwrap().value;
        prop_assert!((d - s).abs() < 1e-6, "discord {d} vs S(A) {s}");
    }

    #[test]
    fn argmin_achieves_reported_classical_correlation(seed in any::<u64>(), side in 0usize..2) {
        let rho = common::random_state(&mut rng(seed), &[2, 2]);
        let report = discord(&rho, side, &OptimizerConfig::default()).unwrap();
        let m = ProjectiveMeasurement::from_parameters(side, 2, &MeasurementParameters::new(report.argmin.angles.clone())).unwrap();
        let j = classical_correlations_j(&rho, &m).unwrap();
        let i = mutual_information(&rho, &[0]).unwrap();
        prop_assert!((i - j - report.value).abs() <= 1e-7);
        // the grid oracle never beats the refined optimum
        let oracle = common::grid_discord(&common::dense(&rho), 2, 2, side, 24, 48).0;
        prop_assert!(report.value <= oracle + 1e-9);
        prop_assert!(oracle - report.value < 5e-3);
    }
}

#[test]
fn empirical_bb84_state_matches_average() {
    let rounds = 100_000;
    let run = run_bb84(rounds, 5, None).unwrap();
    let empirical = empirical_bb84_state(&run).unwrap();
    let average = average_bb84_state();
    // each preparation frequency has binomial σ = sqrt(p(1−p)/n) with p = ¼, and a
    // matrix entry is one frequency plus at most half of another
    let sigma = (0.25 * 0.75 / rounds as f64).sqrt();
    for (bit, basis) in [(0, Basis::Z), (1, Basis::Z), (0, Basis::X), (1, Basis::X)] {
        let n = run.records.iter().filter(|r| r.alice_bit == bit && r.alice_basis == basis).count();
        assert!((n as f64 / rounds as f64 - 0.25).abs() <= 3.0 * sigma);
    }
    let worst = max_abs(&(empirical.matrix() - average.matrix()));
    assert!(worst <= 1.5 * 3.0 * sigma, "deviation {worst} vs {}", 4.5 * sigma);
    let sifted = run.sifted_key_a.len() as f64 / rounds as f64;
    assert!((sifted - 0.5).abs() <= 3.0 * (0.25 / rounds as f64).sqrt());
}
