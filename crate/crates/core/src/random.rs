//! Seeded random unitaries and densities for tests and oracle checks.

use faer::Mat;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{HermitianOperator, C64};

/// Haar-distributed unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<C64> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for u in &cols {
                let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    Mat::from_fn(n, n, |i, j| cols[j][i])
}

/// `U diag(λ) U†` with `λ` drawn uniformly from `[lo, hi]`.
pub fn random_density<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> HermitianOperator {
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    random_density_with_spectrum(&values, rng)
}

pub fn random_density_with_spectrum<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> HermitianOperator {
    let u = random_unitary(values.len(), rng);
    HermitianOperator::from_spectrum(values, u.as_ref()).expect("spectral construction is Hermitian")
}

/// Rank-`rank` projector in a random basis.
pub fn random_projector<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    let values: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    random_density_with_spectrum(&values, rng)
}

/// Random subset of `0..n` of the given size, sorted.
pub fn random_subset<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, n, size).into_vec();
    idx.sort_unstable();
    idx
}
