//! Seeded, named random streams.
//!
//! Every randomized sweep draws from a ChaCha stream keyed by the scene seed
//! and a stream name, so independent sweeps never share state and results
//! are reproducible across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::poly::HomogeneousPolynomial;

/// Stream generator for `(seed, name)`.
pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let digest = Sha256::digest(name.as_bytes());
    let mut id = [0u8; 8];
    id.copy_from_slice(&digest[..8]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from_le_bytes(id));
    rng
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Coefficients uniform in the closed unit disk.
pub fn unit_disk<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let t = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, t)
}

/// A random vector on the unit sphere of `C^len`.
pub fn unit_vector<R: Rng>(rng: &mut R, len: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Random homogeneous polynomial with coefficients in the unit disk.
pub fn polynomial<R: Rng>(rng: &mut R, n: usize, d: usize) -> HomogeneousPolynomial {
    let len = crate::poly::binomial(n + d, d);
    let coeffs = (0..len).map(|_| unit_disk(rng)).collect();
    HomogeneousPolynomial::new(n, d, coeffs).expect("length matches basis")
}

/// Haar-distributed unitary matrix via QR of a complex Ginibre matrix.
pub fn unitary<R: Rng>(rng: &mut R, size: usize) -> nalgebra::DMatrix<Complex64> {
    let g = nalgebra::DMatrix::from_fn(size, size, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix column phases so the distribution is Haar
    for j in 0..size {
        let diag = r[(j, j)];
        if diag.norm() > 0.0 {
            let phase = diag / diag.norm();
            for i in 0..size {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}
