//! The 3-Sasakian structure of S^7 in C^4 = H^2.
//!
//! Left multiplication by j is the conjugate-linear map
//! `j(z1,z2,z3,z4) = (-conj z2, conj z1, -conj z4, conj z3)` and `k = i j`.
//! For s = 1, 2, 3 the structure is `xi_s(p) = -L_s p`, `eta_s = <., xi_s>`,
//! `psi_s(x) = L_s x - eta_s(x) p` and `Phi_s(X,Y) = g(X, psi_s Y)`.
//!
//! The 3-form is `Omega = eta_2 ^ Phi_2 - eta_3 ^ Phi_3` with
//! `(a ^ b)(X,Y,Z) = a(X) b(Y,Z) + a(Y) b(Z,X) + a(Z) b(X,Y)`, and
//! `g(Theta(X,Y), Z) = Omega(X,Y,Z)`, `Theta~ = -psi_1 o Theta`.

use num_complex::Complex64;

use super::{axpy, max_dist, re_inner, scale, tangent_basis, AmbientPoint, CVec, TangentVector, IM};
use crate::error::{Error, Result};

pub fn j_mul(z: &[Complex64]) -> CVec {
    vec![-z[1].conj(), z[0].conj(), -z[3].conj(), z[2].conj()]
}

pub fn k_mul(z: &[Complex64]) -> CVec {
    scale(IM, &j_mul(z))
}

/// Left multiplication by i (s = 1), j (s = 2) or k (s = 3).
pub fn left_mul(s: usize, z: &[Complex64]) -> CVec {
    match s {
        1 => scale(IM, z),
        2 => j_mul(z),
        3 => k_mul(z),
        _ => panic!("quaternion unit index must be 1, 2 or 3"),
    }
}

pub(crate) fn xi_s(s: usize, p: &[Complex64]) -> CVec {
    scale(Complex64::new(-1.0, 0.0), &left_mul(s, p))
}

pub(crate) fn eta_s(s: usize, p: &[Complex64], x: &[Complex64]) -> f64 {
    re_inner(x, &xi_s(s, p))
}

pub(crate) fn psi_s(s: usize, p: &[Complex64], x: &[Complex64]) -> CVec {
    axpy(-eta_s(s, p, x), p, &left_mul(s, x))
}

pub(crate) fn phi_s(s: usize, p: &[Complex64], x: &[Complex64], y: &[Complex64]) -> f64 {
    re_inner(x, &psi_s(s, p, y))
}

/// (eta_s ^ Phi_s)(u, v, w).
pub(crate) fn eta_wedge_phi(s: usize, p: &[Complex64], u: &[Complex64], v: &[Complex64], w: &[Complex64]) -> f64 {
    eta_s(s, p, u) * phi_s(s, p, v, w) + eta_s(s, p, v) * phi_s(s, p, w, u) + eta_s(s, p, w) * phi_s(s, p, u, v)
}

pub(crate) fn omega_raw(p: &[Complex64], u: &[Complex64], v: &[Complex64], w: &[Complex64]) -> f64 {
    eta_wedge_phi(2, p, u, v, w) - eta_wedge_phi(3, p, u, v, w)
}

/// Theta(x, y) as an ambient vector: the g-dual of Omega(x, y, .).
pub(crate) fn theta_raw(p: &[Complex64], x: &[Complex64], y: &[Complex64]) -> CVec {
    let mut out = vec![Complex64::new(0.0, 0.0); 4];
    for r in 0..8 {
        let mut e = vec![Complex64::new(0.0, 0.0); 4];
        e[r / 2] = if r % 2 == 0 { Complex64::new(1.0, 0.0) } else { IM };
        let c = re_inner(&e, p);
        let pe = axpy(-c, p, &e);
        let val = omega_raw(p, x, y, &pe);
        out[r / 2] += e[r / 2] * val;
    }
    out
}

pub(crate) fn theta_tilde_raw(p: &[Complex64], x: &[Complex64], y: &[Complex64]) -> CVec {
    scale(Complex64::new(-1.0, 0.0), &psi_s(1, p, &theta_raw(p, x, y)))
}

fn check_s7(p: &AmbientPoint) -> Result<()> {
    if p.complex_dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: p.complex_dim() });
    }
    Ok(())
}

fn check_at(p: &AmbientPoint, xs: &[&TangentVector]) -> Result<()> {
    check_s7(p)?;
    for x in xs {
        x.same_base(p)?;
    }
    Ok(())
}

/// The three structures evaluated on one tangent vector (index 0 is s = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionFrame {
    pub xi: [TangentVector; 3],
    pub eta: [f64; 3],
    pub psi: [TangentVector; 3],
}

pub fn quaternion_frame_at(p: &AmbientPoint, x: &TangentVector) -> Result<QuaternionFrame> {
    check_at(p, &[x])?;
    let pc = p.coords();
    let tv = |v: CVec| TangentVector { base: p.clone(), v };
    Ok(QuaternionFrame {
        xi: [tv(xi_s(1, pc)), tv(xi_s(2, pc)), tv(xi_s(3, pc))],
        eta: [eta_s(1, pc, &x.v), eta_s(2, pc, &x.v), eta_s(3, pc, &x.v)],
        psi: [tv(psi_s(1, pc, &x.v)), tv(psi_s(2, pc, &x.v)), tv(psi_s(3, pc, &x.v))],
    })
}

pub fn omega_eval(p: &AmbientPoint, u: &TangentVector, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    check_at(p, &[u, v, w])?;
    Ok(omega_raw(p.coords(), &u.v, &v.v, &w.v))
}

pub fn theta_ops(p: &AmbientPoint, x: &TangentVector, y: &TangentVector) -> Result<(TangentVector, TangentVector)> {
    check_at(p, &[x, y])?;
    let pc = p.coords();
    Ok((
        TangentVector { base: p.clone(), v: theta_raw(pc, &x.v, &y.v) },
        TangentVector { base: p.clone(), v: theta_tilde_raw(pc, &x.v, &y.v) },
    ))
}

/// B(u, v) = tr(Theta_u o Theta_v) over T_p.
pub fn b_tensor(p: &AmbientPoint, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    check_at(p, &[u, v])?;
    let pc = p.coords();
    Ok(tangent_basis(p)
        .iter()
        .map(|b| re_inner(&theta_raw(pc, &u.v, &theta_raw(pc, &v.v, &b.v)), &b.v))
        .sum())
}

/// A unit vector orthogonal to xi_1, xi_2, xi_3 at p, from a seed vector.
pub fn horizontal_unit(p: &AmbientPoint, seed: &[Complex64]) -> Result<TangentVector> {
    check_s7(p)?;
    let pc = p.coords();
    let mut v = TangentVector::project(p, seed).v;
    for s in 1..=3 {
        let xi = xi_s(s, pc);
        v = axpy(-re_inner(&v, &xi), &xi, &v);
    }
    let r = super::norm(&v);
    if r < 1e-8 {
        return Err(Error::Degenerate("seed vector lies in the vertical distribution".into()));
    }
    Ok(TangentVector { base: p.clone(), v: v.into_iter().map(|c| c / r).collect() })
}

/// The frame {x, psi_1 x, psi_2 x, psi_3 x, xi_2, xi_3} used to tabulate Theta;
/// together with xi_1 it is orthonormal when x is a horizontal unit vector.
pub fn adapted_frame(p: &AmbientPoint, x: &TangentVector) -> Result<[TangentVector; 6]> {
    check_at(p, &[x])?;
    let pc = p.coords();
    let tv = |v: CVec| TangentVector { base: p.clone(), v };
    Ok([
        x.clone(),
        tv(psi_s(1, pc, &x.v)),
        tv(psi_s(2, pc, &x.v)),
        tv(psi_s(3, pc, &x.v)),
        tv(xi_s(2, pc)),
        tv(xi_s(3, pc)),
    ])
}

/// Theta on the adapted frame: entry (sign, index) means sign * frame[index];
/// sign 0 means the zero vector. Row and column order: x, psi_1 x, psi_2 x,
/// psi_3 x, xi_2, xi_3.
pub const THETA_TABLE: [[(i8, usize); 6]; 6] = [
    [(0, 0), (0, 0), (-1, 4), (1, 5), (1, 2), (-1, 3)],
    [(0, 0), (0, 0), (1, 5), (1, 4), (-1, 3), (-1, 2)],
    [(1, 4), (-1, 5), (0, 0), (0, 0), (-1, 0), (1, 1)],
    [(-1, 5), (-1, 4), (0, 0), (0, 0), (1, 1), (1, 0)],
    [(-1, 2), (1, 3), (1, 0), (-1, 1), (0, 0), (0, 0)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0), (0, 0), (0, 0)],
];

/// Max deviation of Theta from [`THETA_TABLE`] at (p, x), including the
/// vanishing of Theta(xi_1, .) on the whole frame.
pub fn theta_table_defect(p: &AmbientPoint, x: &TangentVector) -> Result<f64> {
    let frame = adapted_frame(p, x)?;
    let pc = p.coords();
    let zero = vec![Complex64::new(0.0, 0.0); 4];
    let mut worst: f64 = 0.0;
    for (r, row) in THETA_TABLE.iter().enumerate() {
        for (c, &(sign, idx)) in row.iter().enumerate() {
            let got = theta_raw(pc, &frame[r].v, &frame[c].v);
            let expect = if sign == 0 { zero.clone() } else { scale(Complex64::new(sign as f64, 0.0), &frame[idx].v) };
            worst = worst.max(max_dist(&got, &expect));
        }
    }
    let xi1 = xi_s(1, pc);
    for f in frame.iter().chain(std::iter::once(&TangentVector { base: p.clone(), v: xi1.clone() })) {
        worst = worst.max(max_dist(&theta_raw(pc, &xi1, &f.v), &zero));
    }
    Ok(worst)
}

/// `psi_a o psi_b = sign * psi_c + eta_e (x) xi_f` as (a, b, sign, c, e, f).
pub const COMPOSITION_RULES: [(usize, usize, f64, usize, usize, usize); 6] = [
    (3, 2, -1.0, 1, 2, 3),
    (2, 1, -1.0, 3, 1, 2),
    (1, 3, -1.0, 2, 3, 1),
    (2, 3, 1.0, 1, 3, 2),
    (1, 2, 1.0, 3, 2, 1),
    (3, 1, 1.0, 2, 1, 3),
];

/// Max violation of the six composition rules on one vector.
pub fn composition_defect(p: &AmbientPoint, x: &TangentVector) -> Result<f64> {
    check_at(p, &[x])?;
    let pc = p.coords();
    let mut worst: f64 = 0.0;
    for &(a, b, sign, c, e, f) in &COMPOSITION_RULES {
        let lhs = psi_s(a, pc, &psi_s(b, pc, &x.v));
        let rhs = axpy(eta_s(e, pc, &x.v), &xi_s(f, pc), &scale(Complex64::new(sign, 0.0), &psi_s(c, pc, &x.v)));
        worst = worst.max(max_dist(&lhs, &rhs));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_vector, rng, unit_complex_vector};
    use crate::sphere_geometry::{m_to_tangent, tangent_to_m};

    fn det3(a: [Complex64; 3], b: [Complex64; 3], c: [Complex64; 3]) -> Complex64 {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
    }

    #[test]
    fn omega_at_origin_is_a_determinant() {
        let mut r = rng(21);
        let o = AmbientPoint::origin(3);
        for _ in 0..10 {
            let mut h = || {
                let z = complex_vector(&mut r, 3);
                let mut v = z.clone();
                v.push(Complex64::new(0.0, 0.0));
                (TangentVector::new(&o, v).unwrap(), [z[0], z[1], z[2]])
            };
            let (u, uh) = h();
            let (v, vh) = h();
            let (w, wh) = h();
            let om = omega_eval(&o, &u, &v, &w).unwrap();
            assert!((om + det3(uh, vh, wh).re).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_one_maps_xi_two_to_xi_three() {
        let mut r = rng(22);
        let p = AmbientPoint::new(unit_complex_vector(&mut r, 4)).unwrap();
        let xi2 = TangentVector::new(&p, xi_s(2, p.coords())).unwrap();
        let f = quaternion_frame_at(&p, &xi2).unwrap();
        assert!(max_dist(&f.psi[0].v, &f.xi[2].v) < 1e-12);
    }

    #[test]
    fn frame_and_table_at_random_points() {
        let mut r = rng(23);
        for _ in 0..10 {
            let p = AmbientPoint::new(unit_complex_vector(&mut r, 4)).unwrap();
            let x = horizontal_unit(&p, &complex_vector(&mut r, 4)).unwrap();
            let mut frame = adapted_frame(&p, &x).unwrap().to_vec();
            frame.push(TangentVector { base: p.clone(), v: xi_s(1, p.coords()) });
            for (i, a) in frame.iter().enumerate() {
                for (j, b) in frame.iter().enumerate() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((a.g(b) - e).abs() < 1e-10);
                }
            }
            assert!(theta_table_defect(&p, &x).unwrap() < 1e-10);
            assert!(composition_defect(&p, &x).unwrap() < 1e-12);
        }
    }

    #[test]
    fn theta_at_origin_matches_conjugate_cross_product() {
        let o = AmbientPoint::origin(3);
        let e1 = m_to_tangent(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let e2 = m_to_tangent(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let (t, _) = theta_ops(&o, &e1, &e2).unwrap();
        assert_eq!(tangent_to_m(&t).iter().map(|x| x.round()).collect::<Vec<_>>(), vec![0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_wrong_sphere() {
        let o = AmbientPoint::origin(2);
        let x = m_to_tangent(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(quaternion_frame_at(&o, &x).is_err());
    }
}
