//! Deterministic, counter-keyed random streams.
//!
//! Every stochastic piece of the toolkit (count simulation, bootstrap
//! resampling, noise draws, self-check sampling) derives its own ChaCha8
//! stream from (seed, domain, indices). Streams are independent of execution
//! order and thread count: the key is a pure function of the indices, so the
//! same cell, trial or run always sees the same randomness.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{Operator, StateVector};

/// Stream domain for count simulation, keyed (prep, setting, outcome).
pub const DOMAIN_COUNTS: u64 = 0x636f756e74; // "count"
/// Stream domain for bootstrap resampling, keyed (trial).
pub const DOMAIN_BOOTSTRAP: u64 = 0x626f6f74; // "boot"
/// Stream domain for noise draws, keyed (run index).
pub const DOMAIN_NOISE: u64 = 0x6e6f697365; // "noise"
/// Stream domain for the self-check sampler.
pub const DOMAIN_SELFCHECK: u64 = 0x636865636b; // "check"

fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// ChaCha8 stream keyed by (seed, domain, indices); identical arguments give
/// an identical stream on every platform.
pub fn stream(seed: u64, domain: u64, indices: &[u64]) -> ChaCha8Rng {
    let mut h = mix(seed ^ 0x517c_c1b7_2722_0a95);
    h = mix(h ^ mix(domain));
    for &ix in indices {
        h = mix(h ^ mix(ix.wrapping_add(0x2545f4914f6cdd1d)));
    }
    let mut key = [0u8; 32];
    let mut s = h;
    for chunk in key.chunks_exact_mut(8) {
        splitmix64(&mut s);
        chunk.copy_from_slice(&mix(s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Standard complex Gaussian entry (Ginibre ensemble).
fn ginibre_entry<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase
/// correction that makes the distribution uniform.
pub fn haar_unitary<R: Rng>(dim: usize, rng: &mut R) -> Operator {
    assert!(dim == 2 || dim == 4, "unitaries are sampled on 2 or 4 dims");
    let g = DMatrix::from_fn(dim, dim, |_, _| ginibre_entry(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Operator::unitary(q).expect("QR of Ginibre is unitary")
}

/// Haar-random pure state of the given dimension.
pub fn random_state<R: Rng>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| ginibre_entry(rng)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let scaled = amps.into_iter().map(|a| a / norm).collect();
            return StateVector::normalized(scaled).expect("scaled to unit norm");
        }
    }
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| ginibre_entry(rng));
    (&g + g.adjoint()).scale(0.5)
}
