//! Named example states and the LOCC ensemble constructor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, ZERO};
use crate::measurement::ProjectiveMeasurement;
use crate::qstate::{self, DensityOperator, Ensemble, Ket};

/// Names accepted by [`named`].
pub const REGISTRY: &[&str] = &[
    "bell",
    "maximally-classical",
    "x-basis-classical",
    "discordant-mixture",
    "bb84",
    "deficit",
    "deficit-branch-ab",
    "deficit-branch-ab2",
    "partially-classical",
    "coin-flip",
    "product",
];

#[derive(Debug, Clone, Serialize)]
pub struct NamedState {
    pub name: String,
    pub parameters: Vec<f64>,
    #[serde(skip)]
    pub state: DensityOperator,
}

pub fn named(name: &str) -> Result<NamedState> {
    let state = match name {
        "bell" => bell(),
        "maximally-classical" => maximally_classical(),
        "x-basis-classical" => x_basis_classical(),
        "discordant-mixture" => discordant_mixture(),
        "bb84" => bb84_state(),
        "deficit" => deficit_state(),
        "deficit-branch-ab" => deficit_branch_quantum_a(),
        "deficit-branch-ab2" => deficit_branch_quantum_b(),
        "partially-classical" => partially_classical_example(),
        "coin-flip" => coin_flip(&Ket::plus(), &Ket::plus(), &Ket::plus())?,
        "product" => product(),
        _ => {
            return Err(Error::UnknownState {
                name: name.to_string(),
                known: REGISTRY.join(", "),
            })
        }
    };
    Ok(NamedState {
        name: name.to_string(),
        parameters: Vec::new(),
        state,
    })
}

fn mix_kets(entries: Vec<(f64, Ket)>) -> DensityOperator {
    Ensemble::from_kets(entries).expect("fixed example ensemble").mix()
}

/// `Σ p_k |α_k β_k⟩⟨α_k β_k|`, optionally tensored with an orthonormal flag `|k⟩⟨k|`
/// recording which branch was prepared.
pub fn locc_ensemble(entries: &[(f64, Ket, Ket)], keep_flag: bool) -> Result<DensityOperator> {
    let first = entries
        .first()
        .ok_or_else(|| Error::Probabilities("empty LOCC ensemble".into()))?;
    let (da, db) = (first.1.dims().to_vec(), first.2.dims().to_vec());
    if entries.iter().any(|(_, a, b)| a.dims() != da.as_slice() || b.dims() != db.as_slice()) {
        return Err(Error::Dimensions("LOCC ensemble members have different dimensions".into()));
    }
    qstate::check_probabilities(entries.iter().map(|e| e.0))?;
    let flag_dim = entries.len().max(2);
    let members = entries
        .iter()
        .enumerate()
        .map(|(k, (p, a, b))| {
            let product = DensityOperator::from_ket(&a.tensor(b));
            let member = if keep_flag {
                product.tensor(&DensityOperator::from_ket(&Ket::basis(vec![flag_dim], k)?))?
            } else {
                product
            };
            Ok((*p, member))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble::new(members)?.mix())
}

/// The four equiprobable coin-flip outcomes `|00⟩, |0ψ⟩, |ψ0⟩, |φχ⟩`.
pub fn coin_flip_entries(psi: &Ket, phi: &Ket, chi: &Ket) -> Vec<(f64, Ket, Ket)> {
    vec![
        (0.25, Ket::zero(), Ket::zero()),
        (0.25, Ket::zero(), psi.clone()),
        (0.25, psi.clone(), Ket::zero()),
        (0.25, phi.clone(), chi.clone()),
    ]
}

/// Coin-flip state with the flag discarded.
pub fn coin_flip(psi: &Ket, phi: &Ket, chi: &Ket) -> Result<DensityOperator> {
    locc_ensemble(&coin_flip_entries(psi, phi, chi), false)
}

/// `½(|00⟩⟨00| + |11⟩⟨11|)`.
pub fn maximally_classical() -> DensityOperator {
    rotated_classical(&Ket::zero(), &Ket::one(), &Ket::zero(), &Ket::one()).expect("orthonormal")
}

/// `½(|++⟩⟨++| + |−−⟩⟨−−|)`.
pub fn x_basis_classical() -> DensityOperator {
    rotated_classical(&Ket::plus(), &Ket::minus(), &Ket::plus(), &Ket::minus()).expect("orthonormal")
}

/// `½(|x₀y₀⟩⟨x₀y₀| + |x₁y₁⟩⟨x₁y₁|)` for orthonormal pairs `x` and `y`.
pub fn rotated_classical(x0: &Ket, x1: &Ket, y0: &Ket, y1: &Ket) -> Result<DensityOperator> {
    for (a, b) in [(x0, x1), (y0, y1)] {
        if a.dims() != b.dims() || a.overlap_probability(b) > qstate::TAU_TRACE {
            return Err(Error::Dimensions("basis pair is not orthonormal".into()));
        }
    }
    Ok(mix_kets(vec![(0.5, x0.tensor(y0)), (0.5, x1.tensor(y1))]))
}

/// Equal mixture of the Z⊗Z and X⊗X classically correlated states; discordant.
pub fn discordant_mixture() -> DensityOperator {
    mix_kets(vec![
        (0.25, Ket::zero().tensor(&Ket::zero())),
        (0.25, Ket::one().tensor(&Ket::one())),
        (0.25, Ket::plus().tensor(&Ket::plus())),
        (0.25, Ket::minus().tensor(&Ket::minus())),
    ])
}

pub fn bell() -> DensityOperator {
    let k = Ket::normalized(vec![2, 2], vec![c(1.0, 0.0), ZERO, ZERO, c(1.0, 0.0)]).expect("nonzero");
    DensityOperator::from_ket(&k)
}

/// `|0⟩ ⊗ |+⟩`.
pub fn product() -> DensityOperator {
    DensityOperator::from_ket(&Ket::zero().tensor(&Ket::plus()))
}

/// Alice's bit register (A) with the qubit she sends (B), averaged over the
/// four BB84 preparations: `¼(|00⟩⟨00| + |11⟩⟨11| + |0+⟩⟨0+| + |1−⟩⟨1−|)`.
pub fn bb84_state() -> DensityOperator {
    mix_kets(vec![
        (0.25, Ket::zero().tensor(&Ket::zero())),
        (0.25, Ket::one().tensor(&Ket::one())),
        (0.25, Ket::zero().tensor(&Ket::plus())),
        (0.25, Ket::one().tensor(&Ket::minus())),
    ])
}

/// `½(|0+⟩⟨0+| + |1−⟩⟨1−|)`: the X-basis half of [`bb84_state`].
pub fn bb84_x_component() -> DensityOperator {
    rotated_classical(&Ket::zero(), &Ket::one(), &Ket::plus(), &Ket::minus()).expect("orthonormal")
}

/// `½(|00⟩⟨00| + |+1⟩⟨+1|)`: classical on B, quantum on A.
pub fn deficit_branch_quantum_a() -> DensityOperator {
    mix_kets(vec![
        (0.5, Ket::zero().tensor(&Ket::zero())),
        (0.5, Ket::plus().tensor(&Ket::one())),
    ])
}

/// `½(|00⟩⟨00| + |1+⟩⟨1+|)`: classical on A, quantum on B.
pub fn deficit_branch_quantum_b() -> DensityOperator {
    mix_kets(vec![
        (0.5, Ket::zero().tensor(&Ket::zero())),
        (0.5, Ket::one().tensor(&Ket::plus())),
    ])
}

/// Three-qubit `A,B,C` state `½(ρ_Ab ⊗ |0⟩⟨0| + ρ_aB ⊗ |1⟩⟨1|)`: discordant on
/// every single-party cut of `AB`, yet each value of the flag `C` leaves a
/// one-sidedly classical state.
pub fn deficit_state() -> DensityOperator {
    let flag0 = DensityOperator::from_ket(&Ket::zero());
    let flag1 = DensityOperator::from_ket(&Ket::one());
    let a = deficit_branch_quantum_a().tensor(&flag0).expect("small");
    let b = deficit_branch_quantum_b().tensor(&flag1).expect("small");
    Ensemble::new(vec![(0.5, a), (0.5, b)]).expect("valid").mix()
}

/// The two pure states `(|00⟩+|11⟩)/√2` and `(|2+⟩+|3−⟩)/√2` on a 4⊗2 space.
pub fn partially_classical_members() -> Ensemble {
    let ket = |a: usize, b: &Ket| Ket::basis(vec![4], a).expect("in range").tensor(b);
    let superpose = |x: Ket, y: Ket| {
        let amps = x.amplitudes().iter().zip(y.amplitudes()).map(|(p, q)| p + q).collect();
        Ket::normalized(vec![4, 2], amps).expect("nonzero")
    };
    let first = superpose(ket(0, &Ket::zero()), ket(1, &Ket::one()));
    let second = superpose(ket(2, &Ket::plus()), ket(3, &Ket::minus()));
    Ensemble::from_kets(vec![(0.5, first), (0.5, second)]).expect("valid")
}

/// Uniform mixture of [`partially_classical_members`], dims `[4, 2]`.
pub fn partially_classical_example() -> DensityOperator {
    partially_classical_members().mix()
}

/// Rank-two projectors `|0⟩⟨0|+|1⟩⟨1|` and `|2⟩⟨2|+|3⟩⟨3|` on the four-level party.
pub fn coarse_measurement() -> ProjectiveMeasurement {
    let block = |lo: usize| CMatrix::from_fn(4, 4, |i, j| if i == j && (i == lo || i == lo + 1) { c(1.0, 0.0) } else { ZERO });
    ProjectiveMeasurement::new(0, vec![block(0), block(2)]).expect("complete orthogonal projectors")
}
