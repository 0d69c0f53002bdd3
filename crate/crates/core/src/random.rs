//! Seeded random states and channels for tests and property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::channel::QuantumChannel;
use crate::classical::ClassicalChannel;
use crate::matrix::{ComplexMatrix, C64};
use crate::state::{DensityOperator, PureState};

/// Generator for trial `index` of a run seeded with `seed`. Streams for
/// different indices are independent, so trials can run in any order.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Orthonormalizes the columns of `m` in place order (modified
/// Gram-Schmidt). Columns of a Gaussian matrix are almost surely
/// independent, which is all the callers need.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v = m.column(c);
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(rows, cols, |r, c| q[c][r])
}

pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    orthonormalize_columns(&ginibre(d, d, rng))
}

pub fn random_pure(d: usize, rng: &mut impl Rng) -> PureState {
    PureState::normalized((0..d).map(|_| gaussian(rng)).collect()).expect("Gaussian vector is non-zero")
}

/// Density operator `GG†/Tr[GG†]` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_rank(d: usize, rank: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ginibre(d, rank, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr).hermitian_part()).expect("Ginibre state is valid")
}

pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityOperator {
    random_density_rank(d, d, rng)
}

/// Channel `ρ ↦ Tr_E[VρV†]` for a Haar random isometry `V: C^{d_in} → C^{d_out} ⊗ C^{env}`.
pub fn random_channel(d_in: usize, d_out: usize, env: usize, rng: &mut impl Rng) -> QuantumChannel {
    assert!(d_out * env >= d_in, "environment too small for an isometry");
    let v = orthonormalize_columns(&ginibre(d_out * env, d_in, rng));
    let kraus = (0..env).map(|e| ComplexMatrix::from_fn(d_out, d_in, |r, c| v[(r * env + e, c)])).collect();
    QuantumChannel::new(kraus).expect("isometry gives a trace preserving map")
}

/// Uniform (flat Dirichlet) point of the simplex.
pub fn random_distribution(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.into_iter().map(|x| x / s).collect();
    let rest: f64 = p[1..].iter().sum();
    p[0] = 1.0 - rest;
    p
}

/// Random stochastic matrix; each entry is zeroed with probability
/// `zero_prob` (keeping at least one non-zero per row).
pub fn random_classical_channel(nx: usize, ny: usize, zero_prob: f64, rng: &mut impl Rng) -> ClassicalChannel {
    let rows = (0..nx)
        .map(|_| {
            let mut w: Vec<f64> = (0..ny).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            for x in w.iter_mut() {
                if rng.random::<f64>() < zero_prob {
                    *x = 0.0;
                }
            }
            if w.iter().all(|&x| x == 0.0) {
                w[rng.random_range(0..ny)] = 1.0;
            }
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        })
        .collect();
    ClassicalChannel::new(rows).expect("normalized rows")
}
