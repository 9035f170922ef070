//! Octonions and the almost contact structure psi^ of S^5 inside S^6.
//!
//! The product is fixed by `e1 e2 = e4` together with the index rules
//! `e_{i+1} e_{j+1} = e_{k+1}` and `e_{2i} e_{2j} = e_{2k}` (indices mod 7).
//! C^3 sits in Im(O) through `(z1, z2, z3) -> z1 e1 + z2 e2 + z3 e4` with
//! `z_l = x_l + e7 y_l`, so that S^5 is the equator x7 = 0 of S^6.

use std::ops::Mul;

use num_complex::Complex64;

use super::{eta_raw, AmbientPoint, CVec, TangentVector};
use crate::error::{Error, Result};

/// Oriented triples (a, b, c) with e_a e_b = e_c, one per line of the Fano plane.
pub const FANO_TRIPLES: [[usize; 3]; 7] = [[1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 7], [5, 6, 1], [6, 7, 2], [7, 1, 3]];

fn wrap(i: usize) -> usize {
    match i % 7 {
        0 => 7,
        r => r,
    }
}

/// Rotates a triple so that its smallest index comes first.
fn normal_form(t: [usize; 3]) -> [usize; 3] {
    let p = (0..3).min_by_key(|&k| t[k]).unwrap();
    [t[p], t[(p + 1) % 3], t[(p + 2) % 3]]
}

/// Closes {(1,2,4)} under the shift and doubling rules.
pub fn generate_triples() -> Vec<[usize; 3]> {
    let mut found = vec![normal_form([1, 2, 4])];
    let mut k = 0;
    while k < found.len() {
        let t = found[k];
        for next in [t.map(|i| wrap(i + 1)), t.map(|i| wrap(2 * i))] {
            let nf = normal_form(next);
            if !found.contains(&nf) {
                found.push(nf);
            }
        }
        k += 1;
    }
    found.sort();
    found
}

/// e_a e_b = sign * e_c for imaginary units a, b in 1..=7.
fn unit_product(a: usize, b: usize) -> (f64, usize) {
    if a == b {
        return (-1.0, 0);
    }
    for t in FANO_TRIPLES {
        for r in 0..3 {
            let (x, y, z) = (t[r], t[(r + 1) % 3], t[(r + 2) % 3]);
            if (x, y) == (a, b) {
                return (1.0, z);
            }
            if (y, x) == (a, b) {
                return (-1.0, z);
            }
        }
    }
    unreachable!("every pair of distinct units lies on one line")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub fn unit(k: usize) -> Self {
        let mut c = [0.0; 8];
        c[k] = 1.0;
        Octonion(c)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn conj(&self) -> Self {
        let mut c = self.0.map(|x| -x);
        c[0] = self.0[0];
        Octonion(c)
    }

    pub fn im(&self) -> Self {
        let mut c = self.0;
        c[0] = 0.0;
        Octonion(c)
    }

    pub fn max_dist(&self, other: &Octonion) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        octonion_mul(&self, &rhs)
    }
}

pub fn octonion_mul(a: &Octonion, b: &Octonion) -> Octonion {
    let mut out = [0.0; 8];
    for i in 0..8 {
        if a.0[i] == 0.0 {
            continue;
        }
        for j in 0..8 {
            let w = a.0[i] * b.0[j];
            if w == 0.0 {
                continue;
            }
            let (s, k) = match (i, j) {
                (0, _) => (1.0, j),
                (_, 0) => (1.0, i),
                _ => unit_product(i, j),
            };
            out[k] += s * w;
        }
    }
    Octonion(out)
}

/// Real slots of (Re z1, Im z1, Re z2, Im z2, Re z3, Im z3) in Im(O).
const SLOTS: [usize; 6] = [1, 3, 2, 6, 4, 5];

pub fn embed_c3(z: &[Complex64]) -> Octonion {
    let mut c = [0.0; 8];
    for l in 0..3 {
        c[SLOTS[2 * l]] = z[l].re;
        c[SLOTS[2 * l + 1]] = z[l].im;
    }
    Octonion(c)
}

/// Inverse of [`embed_c3`]; the e7 and real parts are returned separately.
pub fn extract_c3(x: &Octonion) -> (CVec, f64) {
    let z = (0..3).map(|l| Complex64::new(x.0[SLOTS[2 * l]], x.0[SLOTS[2 * l + 1]])).collect();
    (z, x.0[7])
}

/// psi^(x) = J(x) - eta(x) nu with J(X) = Im(N X), N = p and nu = -e7.
pub fn psi_hat_at(p: &AmbientPoint, x: &TangentVector) -> Result<TangentVector> {
    if p.complex_dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: p.complex_dim() });
    }
    x.same_base(p)?;
    let j = (embed_c3(p.coords()) * embed_c3(&x.v)).im();
    let mut c = j.0;
    c[7] += eta_raw(p.coords(), &x.v);
    let (z, rest) = extract_c3(&Octonion(c));
    debug_assert!(rest.abs() < 1e-9);
    Ok(TangentVector { base: p.clone(), v: z })
}

/// theta(z) = (-conj z2, conj z1).
pub fn theta_c2(z: &[Complex64]) -> CVec {
    vec![-z[1].conj(), z[0].conj()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{real_vector, rng};
    use crate::sphere_geometry::{m_to_tangent, max_dist};

    fn oct(r: &mut crate::sampling::SampleRng) -> Octonion {
        let v = real_vector(r, 8);
        Octonion([v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]])
    }

    #[test]
    fn frozen_table_matches_generation() {
        let mut frozen: Vec<[usize; 3]> = FANO_TRIPLES.iter().map(|&t| normal_form(t)).collect();
        frozen.sort();
        assert_eq!(generate_triples(), frozen);
    }

    #[test]
    fn unit_rules() {
        assert_eq!(Octonion::unit(1) * Octonion::unit(2), Octonion::unit(4));
        for i in 1..8 {
            assert_eq!(unit_product(i, i), (-1.0, 0));
            for j in (1..8).filter(|&j| j != i) {
                let (s, k) = unit_product(i, j);
                assert_eq!(unit_product(j, i), (-s, k));
                assert_eq!(unit_product(wrap(i + 1), wrap(j + 1)), (s, wrap(k + 1)));
                assert_eq!(unit_product(wrap(2 * i), wrap(2 * j)), (s, wrap(2 * k)));
            }
        }
    }

    #[test]
    fn alternative_and_normed() {
        let mut r = rng(31);
        for _ in 0..50 {
            let x = oct(&mut r);
            let y = oct(&mut r);
            assert!((x * (x * y)).max_dist(&((x * x) * y)) < 1e-10);
            assert!(((x * y).norm() - x.norm() * y.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn psi_hat_at_origin_is_theta() {
        let o = AmbientPoint::origin(2);
        let mut r = rng(32);
        for _ in 0..10 {
            let c = real_vector(&mut r, 5);
            let x = m_to_tangent(&c).unwrap();
            let ph = psi_hat_at(&o, &x).unwrap();
            let mut expect = theta_c2(&x.v[..2]);
            expect.push(Complex64::new(0.0, 0.0));
            assert!(max_dist(&ph.v, &expect) < 1e-14);
        }
        let bad = AmbientPoint::origin(3);
        let x = m_to_tangent(&[0.0; 7]).unwrap();
        assert!(psi_hat_at(&bad, &x).is_err());
    }
}
