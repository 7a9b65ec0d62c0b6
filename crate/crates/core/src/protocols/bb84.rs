//! BB84 preparation, optional intercept-resend eavesdropping, measurement and sifting.
//!
//! Every round draws from its own ChaCha8 stream: the generator is seeded with
//! the run seed and the stream number is the round index, so rounds can be
//! simulated in any order and still reproduce bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{DensityOperator, Ensemble, Ket};

/// Identifier of the per-round random stream construction.
pub const RNG_ALGORITHM: &str = "chacha8(seed=u64 seed, stream=round index)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        if rng.gen::<bool>() {
            Basis::X
        } else {
            Basis::Z
        }
    }

    /// The basis state encoding `bit`.
    pub fn ket(self, bit: u8) -> Ket {
        match (self, bit) {
            (Basis::Z, 0) => Ket::zero(),
            (Basis::Z, _) => Ket::one(),
            (Basis::X, 0) => Ket::plus(),
            (Basis::X, _) => Ket::minus(),
        }
    }

    /// Born-rule measurement of `state` in this basis.
    fn measure(self, state: &Ket, rng: &mut ChaCha8Rng) -> u8 {
        let p0 = state.overlap_probability(&self.ket(0));
        u8::from(rng.gen::<f64>() >= p0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub alice_bit: u8,
    pub alice_basis: Basis,
    pub bob_basis: Basis,
    pub bob_outcome: u8,
}

impl RoundRecord {
    pub fn sifted(&self) -> bool {
        self.alice_basis == self.bob_basis
    }
}

/// Agreement statistics over the rounds discarded by sifting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchStats {
    pub rounds: usize,
    /// Mean of `(−1)^(a⊕b)`; zero for uncorrelated bits.
    pub correlation: f64,
    /// Binomial standard error of `correlation` under the no-correlation hypothesis.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bb84Run {
    pub rounds: usize,
    pub seed: u64,
    pub rng: String,
    /// Basis of an intercept-resend eavesdropper, if present.
    pub eavesdropper: Option<Basis>,
    pub records: Vec<RoundRecord>,
    pub sifted_key_a: Vec<u8>,
    pub sifted_key_b: Vec<u8>,
    pub sifted_errors: usize,
    /// Error rate on the sifted key.
    pub qber: f64,
    pub mismatch_stats: MismatchStats,
}

fn simulate_round(seed: u64, round: usize, eavesdropper: Option<Basis>) -> RoundRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round as u64);
    let alice_bit = u8::from(rng.gen::<bool>());
    let alice_basis = Basis::random(&mut rng);
    let bob_basis = Basis::random(&mut rng);
    let mut in_flight = alice_basis.ket(alice_bit);
    if let Some(eve) = eavesdropper {
        let intercepted = eve.measure(&in_flight, &mut rng);
        in_flight = eve.ket(intercepted);
    }
    let bob_outcome = bob_basis.measure(&in_flight, &mut rng);
    RoundRecord {
        alice_bit,
        alice_basis,
        bob_basis,
        bob_outcome,
    }
}

pub fn run_bb84(rounds: usize, seed: u64, eavesdropper: Option<Basis>) -> Result<Bb84Run> {
    if rounds == 0 {
        return Err(Error::Config("BB84 needs at least one round".into()));
    }
    let records: Vec<RoundRecord> = (0..rounds)
        .into_par_iter()
        .map(|r| simulate_round(seed, r, eavesdropper))
        .collect();
    let (sifted, discarded): (Vec<&RoundRecord>, Vec<&RoundRecord>) = records.iter().partition(|r| r.sifted());
    let sifted_key_a: Vec<u8> = sifted.iter().map(|r| r.alice_bit).collect();
    let sifted_key_b: Vec<u8> = sifted.iter().map(|r| r.bob_outcome).collect();
    let sifted_errors = sifted_key_a.iter().zip(&sifted_key_b).filter(|(a, b)| a != b).count();
    let qber = if sifted.is_empty() {
        0.0
    } else {
        sifted_errors as f64 / sifted.len() as f64
    };
    let n = discarded.len();
    let agreement: f64 = discarded
        .iter()
        .map(|r| if r.alice_bit == r.bob_outcome { 1.0 } else { -1.0 })
        .sum();
    let mismatch_stats = MismatchStats {
        rounds: n,
        correlation: if n == 0 { 0.0 } else { agreement / n as f64 },
        sigma: if n == 0 { f64::INFINITY } else { 1.0 / (n as f64).sqrt() },
    };
    Ok(Bb84Run {
        rounds,
        seed,
        rng: RNG_ALGORITHM.to_string(),
        eavesdropper,
        records,
        sifted_key_a,
        sifted_key_b,
        sifted_errors,
        qber,
        mismatch_stats,
    })
}

const PREPARATIONS: [(u8, Basis); 4] = [(0, Basis::Z), (1, Basis::Z), (0, Basis::X), (1, Basis::X)];

fn register_state(weights: [f64; 4]) -> Result<DensityOperator> {
    let entries = PREPARATIONS
        .iter()
        .zip(weights)
        .map(|(&(bit, basis), w)| (w, Basis::Z.ket(bit).tensor(&basis.ket(bit))))
        .collect();
    Ok(Ensemble::from_kets(entries)?.mix())
}

/// Alice's bit register together with the prepared qubit, averaged over the
/// four equiprobable preparations.
pub fn average_bb84_state() -> DensityOperator {
    register_state([0.25; 4]).expect("uniform weights")
}

/// Register-plus-qubit state rebuilt from the preparation frequencies of a run.
pub fn empirical_bb84_state(run: &Bb84Run) -> Result<DensityOperator> {
    let mut counts = [0usize; 4];
    for r in &run.records {
        let k = PREPARATIONS
            .iter()
            .position(|&(bit, basis)| bit == r.alice_bit && basis == r.alice_basis)
            .expect("every preparation is listed");
        counts[k] += 1;
    }
    let n = run.records.len() as f64;
    register_state(counts.map(|c| c as f64 / n))
}
