//! Tensor fields on S^{2n+1} in C^{n+1}, evaluated pointwise in ambient
//! coordinates.
//!
//! The Sasakian structure comes from multiplication by i: `xi(p) = -i p`,
//! `eta(x) = <x, xi(p)>` and `i x = psi(x) + eta(x) p`, with `<,>` the real
//! inner product `Re h(x, y)`. The submodules add the quaternionic structure
//! of S^7, the octonionic structure of S^5 and the Grassmannian checks.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub mod g2;
pub mod grassmann;
pub mod octonion;
pub mod quaternionic;

pub use g2::{g2_form_membership, MembershipResult};
pub use grassmann::{grassmann_checks, GrassmannSummary};
pub use octonion::{octonion_mul, psi_hat_at, Octonion};
pub use quaternionic::{omega_eval, quaternion_frame_at, theta_ops, QuaternionFrame};

pub type CVec = Vec<Complex64>;

const TANGENCY_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-12;

/// Hermitian product h(z, w) = sum z_l conj(w_l).
pub fn herm(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// Real inner product on C^m = R^{2m}.
pub fn re_inner(x: &[Complex64], y: &[Complex64]) -> f64 {
    herm(x, y).re
}

pub fn norm(x: &[Complex64]) -> f64 {
    re_inner(x, x).sqrt()
}

pub(crate) fn axpy(a: f64, x: &[Complex64], y: &[Complex64]) -> CVec {
    x.iter().zip(y).map(|(u, v)| u * a + v).collect()
}

pub(crate) fn scale(a: Complex64, x: &[Complex64]) -> CVec {
    x.iter().map(|u| a * u).collect()
}

pub(crate) fn max_dist(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

pub(crate) const IM: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A point of the unit sphere in C^{n+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    z: CVec,
}

impl AmbientPoint {
    pub fn new(z: CVec) -> Result<Self> {
        let r = norm(&z);
        if (r - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!("point has norm {r}, expected 1")));
        }
        Ok(AmbientPoint { z })
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalized(z: CVec) -> Result<Self> {
        let r = norm(&z);
        if r < 1e-12 {
            return Err(Error::Degenerate("zero vector has no direction".into()));
        }
        Ok(AmbientPoint { z: z.into_iter().map(|c| c / r).collect() })
    }

    /// o = (0, ..., 0, 1) in C^{n+1}.
    pub fn origin(n: usize) -> Self {
        let mut z = vec![Complex64::new(0.0, 0.0); n + 1];
        z[n] = Complex64::new(1.0, 0.0);
        AmbientPoint { z }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn complex_dim(&self) -> usize {
        self.z.len()
    }

    /// Image under a linear map of C^{n+1}.
    pub fn transformed(&self, sigma: &nalgebra::DMatrix<Complex64>) -> Self {
        AmbientPoint { z: apply(sigma, &self.z) }
    }
}

pub(crate) fn apply(sigma: &nalgebra::DMatrix<Complex64>, z: &[Complex64]) -> CVec {
    (0..sigma.nrows()).map(|i| (0..z.len()).map(|j| sigma[(i, j)] * z[j]).sum()).collect()
}

/// A tangent vector of the sphere at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: AmbientPoint,
    pub v: CVec,
}

impl TangentVector {
    pub fn new(base: &AmbientPoint, v: CVec) -> Result<Self> {
        if v.len() != base.complex_dim() {
            return Err(Error::DimensionMismatch { expected: base.complex_dim(), found: v.len() });
        }
        let t = re_inner(&v, base.coords()).abs();
        if t > TANGENCY_TOL * (1.0 + norm(&v)) {
            return Err(Error::InvalidInput(format!("vector is not tangent (residual {t:.3e})")));
        }
        Ok(TangentVector { base: base.clone(), v })
    }

    /// Orthogonal projection of an arbitrary ambient vector onto T_p.
    pub fn project(base: &AmbientPoint, v: &[Complex64]) -> Self {
        let p = base.coords();
        let c = re_inner(v, p);
        TangentVector { base: base.clone(), v: axpy(-c, p, v) }
    }

    pub fn g(&self, other: &TangentVector) -> f64 {
        re_inner(&self.v, &other.v)
    }

    pub fn tangency_residual(&self) -> f64 {
        re_inner(&self.v, self.base.coords()).abs()
    }

    pub fn transformed(&self, sigma: &nalgebra::DMatrix<Complex64>) -> Self {
        TangentVector { base: self.base.transformed(sigma), v: apply(sigma, &self.v) }
    }

    fn same_base(&self, p: &AmbientPoint) -> Result<()> {
        if max_dist(self.base.coords(), p.coords()) > UNIT_TOL {
            return Err(Error::InvalidInput("tangent vector is based at a different point".into()));
        }
        Ok(())
    }
}

/// Canonical m-coordinates at o to an ambient tangent vector: (z, a) -> (z, a).
pub fn m_to_tangent(coords: &[f64]) -> Result<TangentVector> {
    let mv = crate::lie_core::MVector::from_coords(coords)?;
    let o = AmbientPoint::origin(mv.n());
    let mut v = mv.z.clone();
    v.push(mv.a());
    TangentVector::new(&o, v)
}

/// Inverse of [`m_to_tangent`] for vectors based at o.
pub fn tangent_to_m(x: &TangentVector) -> Vec<f64> {
    let n = x.v.len() - 1;
    let mv = crate::lie_core::MVector::new(x.v[..n].to_vec(), x.v[n].im);
    mv.coords()
}

/// An orthonormal basis of T_p obtained from the ambient real basis.
pub fn tangent_basis(p: &AmbientPoint) -> Vec<TangentVector> {
    let m = p.complex_dim();
    let mut out: Vec<TangentVector> = Vec::with_capacity(2 * m - 1);
    for r in 0..2 * m {
        let mut e = vec![Complex64::new(0.0, 0.0); m];
        e[r / 2] = if r % 2 == 0 { Complex64::new(1.0, 0.0) } else { IM };
        let mut v = TangentVector::project(p, &e).v;
        for _ in 0..2 {
            for u in &out {
                let c = re_inner(&v, &u.v);
                v = axpy(-c, &u.v, &v);
            }
        }
        let r = norm(&v);
        if r > 1e-6 && out.len() < 2 * m - 1 {
            out.push(TangentVector { base: p.clone(), v: v.into_iter().map(|c| c / r).collect() });
        }
    }
    out
}

/// Values of the Sasakian tensors on one tangent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SasakiData {
    pub xi: TangentVector,
    pub eta: f64,
    pub psi: TangentVector,
}

pub(crate) fn xi_raw(p: &[Complex64]) -> CVec {
    scale(-IM, p)
}

pub(crate) fn eta_raw(p: &[Complex64], x: &[Complex64]) -> f64 {
    re_inner(x, &xi_raw(p))
}

pub(crate) fn psi_raw(p: &[Complex64], x: &[Complex64]) -> CVec {
    axpy(-eta_raw(p, x), p, &scale(IM, x))
}

pub fn sasaki_at(p: &AmbientPoint, x: &TangentVector) -> Result<SasakiData> {
    x.same_base(p)?;
    let pc = p.coords();
    Ok(SasakiData {
        xi: TangentVector { base: p.clone(), v: xi_raw(pc) },
        eta: eta_raw(pc, &x.v),
        psi: TangentVector { base: p.clone(), v: psi_raw(pc, &x.v) },
    })
}

/// Phi(X, Y) = g(X, psi(Y)).
pub fn phi(p: &AmbientPoint, x: &TangentVector, y: &TangentVector) -> f64 {
    re_inner(&x.v, &psi_raw(p.coords(), &y.v))
}
