//! Seeded random samples: Haar unitaries, sphere points, tangent vectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const DEFAULT_SEED: u64 = 2024;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for shard `index` of a seeded run.
pub fn shard_rng(seed: u64, index: u64) -> SampleRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

pub fn real_vector(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

pub fn complex_vector(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-distributed U(n): QR of a complex Gaussian matrix with the phases of
/// diag(R) moved into Q.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng) * std::f64::consts::FRAC_1_SQRT_2);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed SU(n): a Haar unitary rescaled by det^{-1/n}.
pub fn haar_special_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let u = haar_unitary(rng, n);
    let det = u.determinant();
    let fix = Complex64::from_polar(1.0, -det.arg() / n as f64);
    u * fix
}

/// Uniform point on the unit sphere of C^m.
pub fn unit_complex_vector(rng: &mut impl Rng, m: usize) -> Vec<Complex64> {
    loop {
        let v = complex_vector(rng, m);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_unitary_samples() {
        let mut r = rng(DEFAULT_SEED);
        for n in 2..=4 {
            let u = haar_special_unitary(&mut r, n);
            let id = DMatrix::<Complex64>::identity(n, n);
            assert!((u.adjoint() * &u - id).iter().all(|z| z.norm() < 1e-12));
            assert!((u.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<f64> = real_vector(&mut rng(7), 5);
        let b: Vec<f64> = real_vector(&mut rng(7), 5);
        assert_eq!(a, b);
        let c: Vec<f64> = real_vector(&mut shard_rng(7, 1), 5);
        assert_ne!(a, c);
    }
}
