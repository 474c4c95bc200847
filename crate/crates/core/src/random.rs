//! Seeded random instances for property campaigns.
//!
//! All generators draw from a caller-supplied RNG so that a campaign is
//! reproducible from its seed; use `rand_chacha::ChaCha8Rng` for results
//! that are identical across platforms.

use num_complex::Complex64;
use rand::Rng;

use crate::diag_sum::MatrixModel;
use crate::dist::{AtomicDistribution, Distribution, Kind, LatticeDistribution};
use crate::hafnian::{HafnianTensor, PartitionInstance};

/// `n × n` Bernoulli probabilities, uniform on `[0, 1)`.
pub fn bernoulli_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

pub fn bernoulli_model<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MatrixModel {
    MatrixModel::bernoulli(&bernoulli_probabilities(n, rng)).expect("valid probabilities")
}

/// Probability vector of length `len` with independent uniform weights.
pub fn simplex<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Three-atom entry: integer locations in `-2..=3`, or real locations in
/// `[-2, 3)`.
pub fn three_atom<R: Rng + ?Sized>(kind: Kind, rng: &mut R) -> Distribution {
    let masses = simplex(3, rng);
    match kind {
        Kind::Integer => {
            let mut dense = vec![0.0; 6];
            for p in masses {
                dense[rng.gen_range(0..6)] += p;
            }
            LatticeDistribution::new(-2, dense)
                .expect("normalized")
                .into()
        }
        Kind::Real => {
            let atoms = masses
                .into_iter()
                .map(|p| (rng.gen_range(-2.0..3.0), p))
                .collect();
            AtomicDistribution::new(atoms).expect("normalized").into()
        }
    }
}

pub fn three_atom_model<R: Rng + ?Sized>(n: usize, kind: Kind, rng: &mut R) -> MatrixModel {
    let rows = (0..n)
        .map(|_| (0..n).map(|_| three_atom(kind, rng)).collect())
        .collect();
    MatrixModel::new(rows).expect("homogeneous square model")
}

fn complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Tensor with entries uniform on the square `[-1, 1)²`.
pub fn tensor<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> HafnianTensor {
    HafnianTensor::from_fn(k, n, |_, _, _| complex(rng)).expect("valid shape")
}

/// Tensor whose off-diagonal entries are constant on each slice.
pub fn constant_slice_tensor<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> HafnianTensor {
    let slices: Vec<Complex64> = (0..k).map(|_| complex(rng)).collect();
    HafnianTensor::from_fn(k, n, |l, r, s| if r == s { complex(rng) } else { slices[l] })
        .expect("valid shape")
}

/// Random weak composition of `n` into `1..=n` parts with random complex set
/// functions, or constant ones when `constant` is set.
pub fn partition_instance<R: Rng + ?Sized>(
    n: usize,
    constant: bool,
    rng: &mut R,
) -> PartitionInstance {
    let parts = rng.gen_range(1..=n);
    let mut w = vec![0usize; parts];
    for _ in 0..n {
        w[rng.gen_range(0..parts)] += 1;
    }
    let values: Vec<Complex64> = (0..parts).map(|_| complex(rng)).collect();
    PartitionInstance::from_fn(n, w, |l, _| if constant { values[l] } else { complex(rng) })
        .expect("valid composition")
}

/// Nonnegative law with 1 to 4 atoms in `[0, 5)`.
pub fn nonnegative_law<R: Rng + ?Sized>(rng: &mut R) -> AtomicDistribution {
    let len = rng.gen_range(1..=4);
    let masses = simplex(len, rng);
    let atoms = masses
        .into_iter()
        .map(|p| (rng.gen_range(0.0..5.0), p))
        .collect();
    AtomicDistribution::new(atoms).expect("normalized")
}
