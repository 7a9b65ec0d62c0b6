//! Test-only reference computations, written against plain nested vectors so
//! they share no code path with the library's linear algebra or measurement layer.

#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qcorr_core::DensityOperator;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<Complex64>>;

pub fn dense(rho: &DensityOperator) -> Dense {
    let m = rho.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi on its real
/// `[[Re, −Im], [Im, Re]]` embedding, whose spectrum is the original one doubled.
pub fn hermitian_eigenvalues(m: &Dense) -> Vec<f64> {
    let n = m.len();
    let size = 2 * n;
    let mut a = vec![vec![0.0; size]; size];
    for i in 0..n {
        for j in 0..n {
            let z = m[i][j];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..size)
            .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..size {
            for q in p + 1..size {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..size {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut w: Vec<f64> = (0..size).map(|i| a[i][i]).collect();
    w.sort_by(f64::total_cmp);
    w.into_iter().step_by(2).collect()
}

pub fn entropy_of(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|&&x| x > 1e-12).map(|&x| -x * x.log2()).sum()
}

pub fn entropy(m: &Dense) -> f64 {
    entropy_of(&hermitian_eigenvalues(m))
}

/// Reduced state of a bipartite `dA ⊗ dB` matrix on side 0 or 1.
pub fn marginal(m: &Dense, da: usize, db: usize, side: usize) -> Dense {
    let z = Complex64::new(0.0, 0.0);
    if side == 0 {
        let mut out = vec![vec![z; da]; da];
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    out[i][j] += m[i * db + k][j * db + k];
                }
            }
        }
        out
    } else {
        let mut out = vec![vec![z; db]; db];
        for i in 0..db {
            for j in 0..db {
                for k in 0..da {
                    out[i][j] += m[k * db + i][k * db + j];
                }
            }
        }
        out
    }
}

fn bloch_vectors(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    [
        [Complex64::new(c, 0.0), e * s],
        [-e.conj() * s, Complex64::new(c, 0.0)],
    ]
}

/// `S(measured) − S(ρ) + Σ_a p_a S(ρ_{rest|a})` for the qubit basis `(θ, φ)` on `side`.
pub fn discord_at(m: &Dense, da: usize, db: usize, side: usize, theta: f64, phi: f64) -> f64 {
    let (dm, dr) = if side == 0 { (da, db) } else { (db, da) };
    assert_eq!(dm, 2, "oracle measures qubit sides only");
    let idx = |meas: usize, rest: usize| if side == 0 { meas * db + rest } else { rest * db + meas };
    let z = Complex64::new(0.0, 0.0);
    let mut conditional_entropy = 0.0;
    for v in bloch_vectors(theta, phi) {
        let mut sigma = vec![vec![z; dr]; dr];
        for j in 0..dr {
            for k in 0..dr {
                for (i, vi) in v.iter().enumerate() {
                    for (i2, vi2) in v.iter().enumerate() {
                        sigma[j][k] += vi.conj() * m[idx(i, j)][idx(i2, k)] * vi2;
                    }
                }
            }
        }
        let p: f64 = (0..dr).map(|j| sigma[j][j].re).sum();
        if p < 1e-12 {
            continue;
        }
        for row in sigma.iter_mut() {
            for x in row.iter_mut() {
                *x /= p;
            }
        }
        conditional_entropy += p * entropy(&sigma);
    }
    entropy(&marginal(m, da, db, side)) - entropy(m) + conditional_entropy
}

/// Brute-force minimum over a regular `(θ, φ)` grid; returns (value, θ, φ).
pub fn grid_discord(m: &Dense, da: usize, db: usize, side: usize, polar: usize, azimuthal: usize) -> (f64, f64, f64) {
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..polar {
        for j in 0..azimuthal {
            let theta = std::f64::consts::PI * i as f64 / polar as f64;
            let phi = 2.0 * std::f64::consts::PI * j as f64 / azimuthal as f64;
            let v = discord_at(m, da, db, side, theta, phi);
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }
    best
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

/// Full-rank random mixed state `GG† / Tr`.
pub fn random_state(rng: &mut ChaCha8Rng, dims: &[usize]) -> DensityOperator {
    let n: usize = dims.iter().product();
    let g = ginibre(rng, n);
    let m = &g * g.adjoint();
    let tr: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    DensityOperator::new(dims.to_vec(), m.unscale(tr)).unwrap()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let qr = ginibre(rng, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(n, n, |i, j| if i == j { r[(i, i)] / r[(i, i)].norm() } else { Complex64::new(0.0, 0.0) });
    q * phases
}

pub fn random_pure(rng: &mut ChaCha8Rng, dims: &[usize]) -> DensityOperator {
    let n: usize = dims.iter().product();
    let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
    let ket = qcorr_core::Ket::normalized(dims.to_vec(), v).unwrap();
    DensityOperator::from_ket(&ket)
}

/// Random joint probability table with some exact zeros.
pub fn random_table(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut t: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect())
        .collect();
    if t.iter().flatten().all(|&x| x == 0.0) {
        t[0][0] = 1.0;
    }
    let total: f64 = t.iter().flatten().sum();
    for row in t.iter_mut() {
        for x in row.iter_mut() {
            *x /= total;
        }
    }
    t
}

/// Sifted error rate of intercept-resend in a fixed basis, by enumerating the
/// preparation × Eve outcome × Bob outcome tree with explicit amplitudes.
pub fn intercept_resend_qber(eve_uses_x: bool) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z_basis = [[1.0, 0.0], [0.0, 1.0]];
    let x_basis = [[h, h], [h, -h]];
    let overlap = |a: [f64; 2], b: [f64; 2]| (a[0] * b[0] + a[1] * b[1]).powi(2);
    let eve = if eve_uses_x { x_basis } else { z_basis };
    let (mut errors, mut sifted) = (0.0, 0.0);
    for basis in [z_basis, x_basis] {
        for bit in 0..2 {
            // Bob measures in Alice's basis: only sifted rounds contribute
            let weight = 0.25;
            for e in 0..2 {
                let p_eve = overlap(basis[bit], eve[e]);
                for b in 0..2 {
                    let p_bob = overlap(eve[e], basis[b]);
                    let p = weight * p_eve * p_bob;
                    sifted += p;
                    if b != bit {
                        errors += p;
                    }
                }
            }
        }
    }
    errors / sifted
}
