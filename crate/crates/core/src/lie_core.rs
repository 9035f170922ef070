//! Matrix Lie algebras su(m) and the reductive split su(n+1) = su(n) + m.
//!
//! The complement m consists of the matrices
//!
//! ```text
//! [ -(a/n) I_n   z ]
//! [ -conj(z)^t   a ]      z in C^n, a in iR
//! ```
//!
//! identified with the tangent space of S^{2n+1} at o = (0, ..., 0, 1).
//! Real coordinates on m are (Re z_1, Im z_1, ..., Re z_n, Im z_n, s) with a = i s;
//! in that basis the metric g((z,a),(w,b)) = Re(z^t conj(w)) - ab is the identity.

use nalgebra::DMatrix;
use ndarray::Array3;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// su(m) with its canonical real basis and structure constants.
#[derive(Debug, Clone)]
pub struct MatrixLieAlgebra {
    pub m: usize,
    pub basis: Vec<CMat>,
    /// `[b_i, b_j] = sum_k f[[i, j, k]] b_k`
    pub structure_constants: Array3<f64>,
}

impl MatrixLieAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a traceless anti-Hermitian matrix in the canonical basis.
    pub fn coords(&self, x: &CMat) -> Vec<f64> {
        su_coords(self.m, x)
    }

    pub fn element(&self, c: &[f64]) -> CMat {
        combine(&self.basis, c, self.m)
    }

    /// Max over (i, j, k) of |f_ijk + f_jik|.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim();
        let f = &self.structure_constants;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max((f[[i, j, k]] + f[[j, i, k]]).abs());
                }
            }
        }
        worst
    }

    /// Max componentwise violation of the Jacobi identity, computed from the
    /// structure constants alone.
    pub fn jacobi_residual(&self) -> f64 {
        jacobi_residual(&self.structure_constants)
    }
}

/// Jacobi identity residual of a structure-constant table.
pub fn jacobi_residual(f: &Array3<f64>) -> f64 {
    let d = f.shape()[0];
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = 0.0;
                    for p in 0..d {
                        s += f[[j, k, p]] * f[[i, p, l]]
                            + f[[k, i, p]] * f[[j, p, l]]
                            + f[[i, j, p]] * f[[k, p, l]];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

fn combine(basis: &[CMat], c: &[f64], size: usize) -> CMat {
    let mut out = CMat::zeros(size, size);
    for (b, &x) in basis.iter().zip(c) {
        if x != 0.0 {
            out += b * Complex64::new(x, 0.0);
        }
    }
    out
}

fn su_basis(m: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(m * m - 1);
    for j in 0..m {
        for k in (j + 1)..m {
            let mut e = CMat::zeros(m, m);
            e[(j, k)] = Complex64::new(1.0, 0.0);
            e[(k, j)] = Complex64::new(-1.0, 0.0);
            basis.push(e);
            let mut e = CMat::zeros(m, m);
            e[(j, k)] = I;
            e[(k, j)] = I;
            basis.push(e);
        }
    }
    for j in 0..m.saturating_sub(1) {
        let mut e = CMat::zeros(m, m);
        e[(j, j)] = I;
        e[(j + 1, j + 1)] = -I;
        basis.push(e);
    }
    basis
}

/// Exact coordinates in the canonical su(m) basis. Off-diagonal pairs read
/// off the upper triangle; the diagonal is unwound from the simple-root form.
fn su_coords(m: usize, x: &CMat) -> Vec<f64> {
    let mut c = Vec::with_capacity(m * m - 1);
    for j in 0..m {
        for k in (j + 1)..m {
            c.push(x[(j, k)].re);
            c.push(x[(j, k)].im);
        }
    }
    let mut acc = 0.0;
    for j in 0..m.saturating_sub(1) {
        acc += x[(j, j)].im;
        c.push(acc);
    }
    c
}

pub fn build_su(m: usize) -> Result<MatrixLieAlgebra> {
    if m < 2 {
        return Err(Error::AlgebraTooSmall(m));
    }
    let basis = su_basis(m);
    let d = basis.len();
    let mut f = Array3::zeros((d, d, d));
    for i in 0..d {
        for j in 0..d {
            let c = su_coords(m, &commutator(&basis[i], &basis[j]));
            for (k, v) in c.into_iter().enumerate() {
                f[[i, j, k]] = v;
            }
        }
    }
    Ok(MatrixLieAlgebra { m, basis, structure_constants: f })
}

/// An element of m in (z, a) form with a = i s.
#[derive(Debug, Clone, PartialEq)]
pub struct MVector {
    pub z: Vec<Complex64>,
    pub s: f64,
}

impl MVector {
    pub fn new(z: Vec<Complex64>, s: f64) -> Self {
        MVector { z, s }
    }

    pub fn zero(n: usize) -> Self {
        MVector { z: vec![Complex64::new(0.0, 0.0); n], s: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn a(&self) -> Complex64 {
        Complex64::new(0.0, self.s)
    }

    pub fn from_coords(c: &[f64]) -> Result<Self> {
        if c.len() % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "m-coordinates have odd length 2n+1, got {}",
                c.len()
            )));
        }
        let n = c.len() / 2;
        let z = (0..n).map(|j| Complex64::new(c[2 * j], c[2 * j + 1])).collect();
        Ok(MVector { z, s: c[2 * n] })
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(2 * self.n() + 1);
        for z in &self.z {
            c.push(z.re);
            c.push(z.im);
        }
        c.push(self.s);
        c
    }

    pub fn to_matrix(&self) -> CMat {
        m_matrix(&self.z, self.a())
    }

    /// Reads (z, a) from the last column of an (n+1)x(n+1) matrix.
    pub fn from_matrix(x: &CMat) -> Self {
        let n = x.nrows() - 1;
        MVector { z: (0..n).map(|j| x[(j, n)]).collect(), s: x[(n, n)].im }
    }

    /// g((z,a),(w,b)) = Re(z^t conj(w)) - ab.
    pub fn g(&self, other: &MVector) -> f64 {
        let zw: f64 = self.z.iter().zip(&other.z).map(|(z, w)| (z * w.conj()).re).sum();
        zw - (self.a() * other.a()).re
    }
}

fn m_matrix(z: &[Complex64], a: Complex64) -> CMat {
    let n = z.len();
    let mut x = CMat::zeros(n + 1, n + 1);
    for j in 0..n {
        x[(j, j)] = -a / n as f64;
        x[(j, n)] = z[j];
        x[(n, j)] = -z[j].conj();
    }
    x[(n, n)] = a;
    x
}

/// su(n+1) = h + m with h = su(n) embedded in the top-left block.
#[derive(Debug, Clone)]
pub struct ReductiveSplit {
    pub n: usize,
    pub h_basis: Vec<CMat>,
    pub m_basis: Vec<CMat>,
    /// `pi_m [e_i, e_j] = sum_k t[[i, j, k]] e_k`
    pub bracket_mm_m: Array3<f64>,
    /// `pi_h [e_i, e_j] = sum_a t[[i, j, a]] h_a`
    pub bracket_mm_h: Array3<f64>,
    /// `[h_a, e_j] = sum_k t[[a, j, k]] e_k`
    pub bracket_hm_m: Array3<f64>,
    pub gram: DMatrix<f64>,
}

impl ReductiveSplit {
    pub fn dim_m(&self) -> usize {
        self.m_basis.len()
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.len()
    }

    /// Splits a matrix of su(n+1) into m- and h-coordinates.
    pub fn decompose(&self, x: &CMat) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mv = MVector::from_matrix(x);
        let rest = x - mv.to_matrix();
        let h = if n >= 2 { su_coords(n, &rest.view((0, 0), (n, n)).into_owned()) } else { Vec::new() };
        (mv.coords(), h)
    }

    pub fn m_element(&self, c: &[f64]) -> CMat {
        combine(&self.m_basis, c, self.n + 1)
    }

    pub fn h_element(&self, c: &[f64]) -> CMat {
        combine(&self.h_basis, c, self.n + 1)
    }

    /// Max-norm of x minus its reconstruction from the two projections.
    pub fn reconstruction_residual(&self, x: &CMat) -> f64 {
        let (m, h) = self.decompose(x);
        let back = self.m_element(&m) + self.h_element(&h);
        (x - back).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The same split with only the listed isotropy generators kept. The
    /// bracket tables are copied unchanged; used to probe how the solver
    /// responds to a smaller isotropy algebra.
    pub fn restrict_isotropy(&self, keep: &[usize]) -> ReductiveSplit {
        let d = self.dim_m();
        let mut hm = Array3::zeros((keep.len(), d, d));
        let mut mmh = Array3::zeros((d, d, keep.len()));
        for (new, &old) in keep.iter().enumerate() {
            for j in 0..d {
                for k in 0..d {
                    hm[[new, j, k]] = self.bracket_hm_m[[old, j, k]];
                    mmh[[j, k, new]] = self.bracket_mm_h[[j, k, old]];
                }
            }
        }
        ReductiveSplit {
            n: self.n,
            h_basis: keep.iter().map(|&a| self.h_basis[a].clone()).collect(),
            m_basis: self.m_basis.clone(),
            bracket_mm_m: self.bracket_mm_m.clone(),
            bracket_mm_h: mmh,
            bracket_hm_m: hm,
            gram: self.gram.clone(),
        }
    }

    /// Max over basis triples of |g([h,A],B) + g(A,[h,B])|.
    pub fn isotropy_skewness(&self) -> f64 {
        let d = self.dim_m();
        let t = &self.bracket_hm_m;
        let mut worst: f64 = 0.0;
        for a in 0..self.dim_h() {
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += t[[a, i, k]] * self.gram[(k, j)] + self.gram[(i, k)] * t[[a, j, k]];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }
}

pub fn reductive_split(n: usize) -> Result<ReductiveSplit> {
    if n == 0 {
        return Err(Error::InvalidSphere(n));
    }
    let size = n + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut m_basis = Vec::with_capacity(2 * n + 1);
    for j in 0..n {
        for unit in [Complex64::new(1.0, 0.0), I] {
            let mut z = vec![zero; n];
            z[j] = unit;
            m_basis.push(m_matrix(&z, zero));
        }
    }
    m_basis.push(m_matrix(&vec![zero; n], I));

    let h_basis: Vec<CMat> = if n >= 2 {
        build_su(n)?
            .basis
            .into_iter()
            .map(|b| {
                let mut e = CMat::zeros(size, size);
                e.view_mut((0, 0), (n, n)).copy_from(&b);
                e
            })
            .collect()
    } else {
        Vec::new()
    };

    let d = m_basis.len();
    let dh = h_basis.len();
    let mut split = ReductiveSplit {
        n,
        h_basis,
        m_basis,
        bracket_mm_m: Array3::zeros((d, d, d)),
        bracket_mm_h: Array3::zeros((d, d, dh)),
        bracket_hm_m: Array3::zeros((dh, d, d)),
        gram: DMatrix::zeros(d, d),
    };

    let mvecs: Vec<MVector> = split.m_basis.iter().map(MVector::from_matrix).collect();
    for i in 0..d {
        for j in 0..d {
            split.gram[(i, j)] = mvecs[i].g(&mvecs[j]);
            let (m, h) = split.decompose(&commutator(&split.m_basis[i], &split.m_basis[j]));
            for k in 0..d {
                split.bracket_mm_m[[i, j, k]] = m[k];
            }
            for a in 0..dh {
                split.bracket_mm_h[[i, j, a]] = h[a];
            }
        }
    }
    for a in 0..dh {
        for j in 0..d {
            let (m, _) = split.decompose(&commutator(&split.h_basis[a], &split.m_basis[j]));
            for k in 0..d {
                split.bracket_hm_m[[a, j, k]] = m[k];
            }
        }
    }
    Ok(split)
}

/// Matrix commutator of two m-vectors, split into (m-part, h-coefficients).
pub fn bracket_m(split: &ReductiveSplit, a: &MVector, b: &MVector) -> Result<(MVector, Vec<f64>)> {
    for v in [a, b] {
        if v.n() != split.n {
            return Err(Error::DimensionMismatch { expected: split.n, found: v.n() });
        }
    }
    let c = commutator(&a.to_matrix(), &b.to_matrix());
    let (m, h) = split.decompose(&c);
    Ok((MVector::from_coords(&m)?, h))
}
