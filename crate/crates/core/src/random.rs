//! Seeded randomness. Every stochastic step in the crate draws from a
//! ChaCha12 stream keyed by an explicit u64 seed, so runs are reproducible
//! across platforms.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::mat::Mat;
use crate::scalar::{Real, C};

pub fn rng_from(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a base seed and a salt
/// (splitmix64 finalizer). Used to decouple the random draws of unrelated
/// pipeline stages so adding a draw in one stage cannot shift another.
pub fn subseed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_complex<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat<T> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re = T::std_normal(rng);
        let im = T::std_normal(rng);
        data.push(C::new(re, im));
    }
    Mat::from_data(rows, cols, data)
}

/// Hermitian matrix from the Gaussian unitary ensemble (up to scale).
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Mat<T> {
    let g = random_complex::<T, R>(dim, dim, rng);
    g.hermitize()
}

/// Haar-like random unitary: Gram-Schmidt frame of a Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Mat<T> {
    let g = random_complex::<T, R>(dim, dim, rng);
    let mut cols: Vec<Vec<C<T>>> = (0..dim).map(|j| g.col(j)).collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let coeff = crate::mat::vec_inner(&cols[k], &cols[j]);
                let prev = cols[k].clone();
                for (x, y) in cols[j].iter_mut().zip(&prev) {
                    *x -= coeff * *y;
                }
            }
        }
        let n = crate::mat::vec_norm(&cols[j]);
        let inv = T::one() / n;
        for x in &mut cols[j] {
            *x = *x * inv;
        }
    }
    Mat::from_cols(dim, &cols)
}
