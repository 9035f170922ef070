//! Linear-algebra facts behind the SU(4)-invariance of Omega, as sampled checks.
//!
//! `beta(U) = det(u1 | j u1 | u2 | j u2)` for a unitary basis of a complex
//! 2-plane U in C^4, and the 2x2 determinant `delta(sigma, x)` comparing the
//! unitary frames `{x, psi_2 x, xi_2}` transported by sigma and rebuilt at
//! sigma(o).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quaternionic::j_mul;
use super::{apply, herm, scale, CVec};
use crate::error::{Error, Result};
use crate::sampling::{haar_special_unitary, haar_unitary, shard_rng};

pub fn beta(u1: &[Complex64], u2: &[Complex64]) -> Complex64 {
    let cols = [u1.to_vec(), j_mul(u1), u2.to_vec(), j_mul(u2)];
    DMatrix::from_fn(4, 4, |r, c| cols[c][r]).determinant()
}

fn origin4() -> CVec {
    let mut o = vec![Complex64::new(0.0, 0.0); 4];
    o[3] = Complex64::new(1.0, 0.0);
    o
}

/// Unit x = (x1, x2, 0, 0) with sigma x orthogonal to j(sigma o) and
/// k(sigma o), i.e. h(sigma x, j sigma o) = 0.
pub fn constrained_x(sigma: &DMatrix<Complex64>) -> Result<CVec> {
    let jso = j_mul(&apply(sigma, &origin4()));
    let a1: Complex64 = (0..4).map(|l| sigma[(l, 0)] * jso[l].conj()).sum();
    let a2: Complex64 = (0..4).map(|l| sigma[(l, 1)] * jso[l].conj()).sum();
    let r = (a1.norm_sqr() + a2.norm_sqr()).sqrt();
    if r < 1e-8 {
        return Err(Error::Degenerate("both horizontal directions satisfy the constraint".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(vec![a2 / r, -a1 / r, zero, zero])
}

pub fn delta(sigma: &DMatrix<Complex64>, x: &[Complex64]) -> Complex64 {
    let o = origin4();
    let minus = Complex64::new(-1.0, 0.0);
    let sjx = apply(sigma, &j_mul(x));
    let jsx = j_mul(&apply(sigma, x));
    let msjo = scale(minus, &apply(sigma, &j_mul(&o)));
    let mjso = scale(minus, &j_mul(&apply(sigma, &o)));
    herm(&sjx, &jsx) * herm(&msjo, &mjso) - herm(&msjo, &jsx) * herm(&sjx, &mjso)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrassmannSummary {
    pub trials: usize,
    pub beta_min_real: f64,
    pub beta_max_imag: f64,
    pub delta_max_deviation: f64,
    pub resamples: usize,
    pub passed: bool,
}

/// Runs `trials` beta samples and `trials` delta samples.
pub fn grassmann_checks(seed: u64, trials: usize) -> GrassmannSummary {
    let mut r = shard_rng(seed, 0x6a);
    let mut beta_min = f64::INFINITY;
    let mut beta_imag: f64 = 0.0;
    for _ in 0..trials {
        let u = haar_unitary(&mut r, 4);
        let c0: CVec = u.column(0).iter().copied().collect();
        let c1: CVec = u.column(1).iter().copied().collect();
        let b = beta(&c0, &c1);
        beta_min = beta_min.min(b.re);
        beta_imag = beta_imag.max(b.im.abs());
    }
    let mut delta_dev: f64 = 0.0;
    let mut resamples = 0;
    let mut done = 0;
    while done < trials {
        let s = haar_special_unitary(&mut r, 4);
        match constrained_x(&s) {
            Ok(x) => {
                delta_dev = delta_dev.max((delta(&s, &x) - Complex64::new(1.0, 0.0)).norm());
                done += 1;
            }
            Err(_) => resamples += 1,
        }
    }
    GrassmannSummary {
        trials,
        beta_min_real: if trials == 0 { 0.0 } else { beta_min },
        beta_max_imag: beta_imag,
        delta_max_deviation: delta_dev,
        resamples,
        passed: beta_min >= -1e-9 && beta_imag < 1e-9 && delta_dev < 1e-8,
    }
}
