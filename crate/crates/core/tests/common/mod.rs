#![allow(dead_code)]

use hardy_nonlocality::tensor::{Bipartition, StateVector, C64};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_state(rng: &mut impl Rng, dims: Vec<usize>) -> StateVector {
    let n = dims.iter().product();
    StateVector::new(dims, gaussian_vector(rng, n)).unwrap()
}

pub fn two_qubit(a: f64, b: f64) -> StateVector {
    StateVector::new(vec![2, 2], vec![c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(b, 0.0)]).unwrap()
}

pub fn hardy_state() -> StateVector {
    two_qubit(0.8f64.sqrt(), 0.2f64.sqrt())
}

pub fn bell_state() -> StateVector {
    two_qubit(1.0, 1.0)
}

pub fn ghz(n: usize) -> StateVector {
    let mut amps = vec![c(0.0, 0.0); 1 << n];
    amps[0] = c(1.0, 0.0);
    amps[(1 << n) - 1] = c(1.0, 0.0);
    StateVector::new(vec![2; n], amps).unwrap()
}

/// `√0.5 (√0.8|00⟩ + √0.2|11⟩)⊗|0⟩ + √0.5 |22⟩⊗|1⟩` on dims `[3, 3, 2]`.
pub fn tripartite_example() -> StateVector {
    let idx = |a: usize, b: usize, t: usize| (a * 3 + b) * 2 + t;
    let mut amps = vec![c(0.0, 0.0); 18];
    amps[idx(0, 0, 0)] = c(0.4f64.sqrt(), 0.0);
    amps[idx(1, 1, 0)] = c(0.1f64.sqrt(), 0.0);
    amps[idx(2, 2, 1)] = c(0.5f64.sqrt(), 0.0);
    StateVector::new(vec![3, 3, 2], amps).unwrap()
}

/// Subsystem dimensions whose product is `d` (4 may be split into two qubits).
fn factor(rng: &mut impl Rng, d: usize) -> Vec<usize> {
    if d == 4 && rng.random_bool(0.5) {
        vec![2, 2]
    } else {
        vec![d]
    }
}

/// A random state together with a random bipartition whose sides have
/// dimensions drawn from {2, 3, 4}.
pub fn random_instance(rng: &mut impl Rng) -> (StateVector, Bipartition) {
    let sides = [2, 3, 4];
    let d1 = *sides.choose(rng).unwrap();
    let d2 = *sides.choose(rng).unwrap();
    let f1 = factor(rng, d1);
    let f2 = factor(rng, d2);
    let n = f1.len() + f2.len();
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(rng);
    let mut side1: Vec<usize> = slots[..f1.len()].to_vec();
    let mut side2: Vec<usize> = slots[f1.len()..].to_vec();
    let mut dims = vec![0; n];
    for (&k, &d) in side1.iter().zip(&f1) {
        dims[k] = d;
    }
    for (&k, &d) in side2.iter().zip(&f2) {
        dims[k] = d;
    }
    side1.shuffle(rng);
    side2.shuffle(rng);
    let v = random_state(rng, dims);
    (v, Bipartition::new(side1, side2, n).unwrap())
}

/// Random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> nalgebra::DMatrix<nalgebra::Complex<f64>> {
    let g = nalgebra::DMatrix::from_fn(n, n, |_, _| {
        nalgebra::Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    qr.q()
}
