//! Invariant bilinear maps on m and their metric / skew-torsion subspaces.
//!
//! The h-equivariance condition `[h, a(A,B)] = a([h,A],B) + a(A,[h,B])` is a
//! sparse linear system in the d^3 coefficients of `a`. Its nullspace is read
//! off the Gram operator `Q = sum A_r^t A_r`: a symmetric eigendecomposition
//! gives candidate directions, and each candidate's singular value is then
//! recomputed directly as `|A v|` so that the rank threshold is applied to
//! honest singular values rather than to square roots of tiny eigenvalues.

use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, Side};
use nalgebra::DMatrix;
use ndarray::Array3;

use crate::error::{Error, Result};
use crate::lie_core::ReductiveSplit;

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Pivot threshold used while canonicalizing an orthonormal basis.
const PIVOT_TOL: f64 = 1e-8;

/// `a(e_i, e_j) = sum_k coeffs[[i, j, k]] e_k` over the canonical m-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearMap {
    pub coeffs: Array3<f64>,
}

impl BilinearMap {
    pub fn zeros(d: usize) -> Self {
        BilinearMap { coeffs: Array3::zeros((d, d, d)) }
    }

    pub fn from_fn(d: usize, f: impl FnMut((usize, usize, usize)) -> f64) -> Self {
        BilinearMap { coeffs: Array3::from_shape_fn((d, d, d), f) }
    }

    /// Builds the map from its action on pairs of basis vectors.
    pub fn from_pairs(d: usize, mut f: impl FnMut(usize, usize) -> Vec<f64>) -> Self {
        let mut c = Array3::zeros((d, d, d));
        for i in 0..d {
            for j in 0..d {
                let v = f(i, j);
                for k in 0..d {
                    c[[i, j, k]] = v[k];
                }
            }
        }
        BilinearMap { coeffs: c }
    }

    pub fn from_flat(d: usize, v: &[f64]) -> Self {
        BilinearMap { coeffs: Array3::from_shape_vec((d, d, d), v.to_vec()).expect("length d^3") }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.shape()[0]
    }

    pub fn flat(&self) -> Vec<f64> {
        self.coeffs.iter().copied().collect()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..d {
                    out[k] += w * self.coeffs[[i, j, k]];
                }
            }
        }
        out
    }

    /// The map with its two arguments exchanged.
    pub fn transposed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.swap_axes(0, 1);
        BilinearMap { coeffs: c.as_standard_layout().into_owned() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }

    /// Max over (C, A, B) of |g(a(C,A),B) + g(A,a(C,B))|.
    pub fn metric_residual(&self, gram: &DMatrix<f64>) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for c in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += self.coeffs[[c, a, k]] * gram[(k, b)] + gram[(a, k)] * self.coeffs[[c, b, k]];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }

    /// Max-norm of the symmetric part in the two arguments.
    pub fn symmetric_part_norm(&self) -> f64 {
        (self + &self.transposed()).max_abs() * 0.5
    }
}

impl Add for &BilinearMap {
    type Output = BilinearMap;
    fn add(self, rhs: &BilinearMap) -> BilinearMap {
        BilinearMap { coeffs: &self.coeffs + &rhs.coeffs }
    }
}

impl Sub for &BilinearMap {
    type Output = BilinearMap;
    fn sub(self, rhs: &BilinearMap) -> BilinearMap {
        BilinearMap { coeffs: &self.coeffs - &rhs.coeffs }
    }
}

impl Mul<f64> for &BilinearMap {
    type Output = BilinearMap;
    fn mul(self, rhs: f64) -> BilinearMap {
        BilinearMap { coeffs: &self.coeffs * rhs }
    }
}

impl Neg for &BilinearMap {
    type Output = BilinearMap;
    fn neg(self) -> BilinearMap {
        self * -1.0
    }
}

/// Linear combination `sum c_r m_r`.
pub fn combination(maps: &[&BilinearMap], c: &[f64]) -> BilinearMap {
    let d = maps[0].dim();
    let mut out = BilinearMap::zeros(d);
    for (m, &x) in maps.iter().zip(c) {
        if x != 0.0 {
            out.coeffs.scaled_add(x, &m.coeffs);
        }
    }
    out
}

/// A subspace of bilinear maps with a Frobenius-orthonormal basis.
#[derive(Debug, Clone)]
pub struct MapSpace {
    pub basis: Vec<BilinearMap>,
    pub labels: Option<Vec<String>>,
    pub tolerance: f64,
    /// Affine origin when the space parametrizes differences from a fixed map.
    pub origin: Option<BilinearMap>,
    /// Ratio of the smallest retained nonzero singular value to the largest;
    /// `None` when no rank decision was needed.
    pub spectral_gap: Option<f64>,
}

impl MapSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> Option<usize> {
        self.basis.first().map(|b| b.dim())
    }

    /// Frobenius coordinates of the orthogonal projection.
    pub fn coefficients(&self, alpha: &BilinearMap) -> Vec<f64> {
        self.basis.iter().map(|b| (&b.coeffs * &alpha.coeffs).sum()).collect()
    }

    /// Max-norm distance from `alpha` to the span.
    pub fn projection_residual(&self, alpha: &BilinearMap) -> f64 {
        if self.basis.is_empty() {
            return alpha.max_abs();
        }
        let refs: Vec<&BilinearMap> = self.basis.iter().collect();
        let proj = combination(&refs, &self.coefficients(alpha));
        (alpha - &proj).max_abs()
    }

    /// Max |<b_i, b_j> - delta_ij|.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let ip = (&a.coeffs * &b.coeffs).sum();
                worst = worst.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

/// One sparse row per (generator, i, j, l) of the equivariance system.
fn equivariance_rows(split: &ReductiveSplit) -> Vec<Vec<(usize, f64)>> {
    let d = split.dim_m();
    let rho = &split.bracket_hm_m;
    let idx = |i: usize, j: usize, k: usize| (i * d + j) * d + k;
    let mut rows = Vec::with_capacity(split.dim_h() * d * d * d);
    for a in 0..split.dim_h() {
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let mut row = Vec::new();
                    for k in 0..d {
                        let r = rho[[a, k, l]];
                        if r != 0.0 {
                            row.push((idx(i, j, k), r));
                        }
                        let r = rho[[a, i, k]];
                        if r != 0.0 {
                            row.push((idx(k, j, l), -r));
                        }
                        let r = rho[[a, j, k]];
                        if r != 0.0 {
                            row.push((idx(i, k, l), -r));
                        }
                    }
                    if !row.is_empty() {
                        rows.push(row);
                    }
                }
            }
        }
    }
    rows
}

fn apply_rows(rows: &[Vec<(usize, f64)>], v: &[f64]) -> f64 {
    rows.iter()
        .map(|row| {
            let s: f64 = row.iter().map(|&(c, x)| x * v[c]).sum();
            s * s
        })
        .sum::<f64>()
        .sqrt()
}

/// Max-norm residual of the equivariance equations for `alpha`.
pub fn equivariance_residual(split: &ReductiveSplit, alpha: &BilinearMap) -> f64 {
    let v = alpha.flat();
    equivariance_rows(split)
        .iter()
        .map(|row| row.iter().map(|&(c, x)| x * v[c]).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Reduced row echelon form with largest-pivot selection, followed by
/// Gram-Schmidt. The result depends only on the span of the input.
pub fn canonicalize(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let k = vectors.len();
    if k == 0 {
        return vectors;
    }
    let ncols = vectors[0].len();
    let mut rows = vectors;
    let mut rank = 0;
    for col in 0..ncols {
        if rank == k {
            break;
        }
        let (p, best) = (rank..k)
            .map(|r| (r, rows[r][col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= PIVOT_TOL {
            continue;
        }
        rows.swap(rank, p);
        let pivot = rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x /= pivot;
        }
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank {
                let f = row[col];
                if f != 0.0 {
                    for (x, y) in row.iter_mut().zip(&prow) {
                        *x -= f * y;
                    }
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    gram_schmidt(rows)
}

fn gram_schmidt(rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for mut v in rows {
        for _ in 0..2 {
            for u in &out {
                let ip: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= ip * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > PIVOT_TOL {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Singular values (descending) and right nullspace of a small dense matrix.
pub fn nullspace(a: &DMatrix<f64>, rel_tol: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let ncols = a.ncols();
    let padded = if a.nrows() < ncols {
        let mut p = DMatrix::zeros(ncols, ncols);
        p.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^t");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let kernel = (0..ncols)
        .filter(|&r| smax == 0.0 || sv[r] <= rel_tol * smax)
        .map(|r| vt.row(r).iter().copied().collect())
        .collect();
    let mut sorted = sv;
    sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
    (sorted, kernel)
}

fn smallest_retained_ratio(sv: &[f64], rel_tol: f64) -> Option<f64> {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return None;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).map(|s| s / smax).fold(None, |m: Option<f64>, x| {
        Some(m.map_or(x, |m| m.min(x)))
    })
}

/// Orthonormal basis of Hom_h(m (x) m, m).
pub fn invariant_bilinear_basis(split: &ReductiveSplit) -> MapSpace {
    let d = split.dim_m();
    let nvar = d * d * d;
    let rows = equivariance_rows(split);
    if rows.is_empty() {
        let basis = (0..nvar)
            .map(|c| {
                let mut v = vec![0.0; nvar];
                v[c] = 1.0;
                BilinearMap::from_flat(d, &v)
            })
            .collect();
        return MapSpace { basis, labels: None, tolerance: RANK_TOL, origin: None, spectral_gap: None };
    }

    let mut q = Mat::<f64>::zeros(nvar, nvar);
    for row in &rows {
        for &(r, x) in row {
            for &(c, y) in row {
                q[(r, c)] += x * y;
            }
        }
    }
    let eig = q.self_adjoint_eigen(Side::Lower).expect("symmetric eigendecomposition");
    let lambda = eig.S().column_vector();
    let u = eig.U();
    let lmax = (0..nvar).map(|i| lambda[i]).fold(0.0, f64::max);
    let smax = lmax.sqrt();

    let mut sigma = Vec::with_capacity(nvar);
    let mut kernel = Vec::new();
    for i in 0..nvar {
        let s = if lambda[i] <= 1e-6 * lmax {
            let v: Vec<f64> = (0..nvar).map(|r| u[(r, i)]).collect();
            let s = apply_rows(&rows, &v);
            if s <= RANK_TOL * smax {
                kernel.push(v);
            }
            s
        } else {
            lambda[i].sqrt()
        };
        sigma.push(s);
    }

    let basis = canonicalize(kernel).into_iter().map(|v| BilinearMap::from_flat(d, &v)).collect();
    MapSpace {
        basis,
        labels: None,
        tolerance: RANK_TOL,
        origin: None,
        spectral_gap: smallest_retained_ratio(&sigma, RANK_TOL),
    }
}

/// Restricts `space` to the kernel of extra linear constraints given as rows
/// over the d^3 coefficients.
fn restrict(space: &MapSpace, constraints: impl Fn(&BilinearMap) -> Vec<f64>) -> MapSpace {
    let k = space.dim();
    if k == 0 {
        return space.clone();
    }
    let cols: Vec<Vec<f64>> = space.basis.iter().map(&constraints).collect();
    let m = cols[0].len();
    let a = DMatrix::from_fn(m, k, |r, c| cols[c][r]);
    let (sv, kernel) = nullspace(&a, RANK_TOL);
    let refs: Vec<&BilinearMap> = space.basis.iter().collect();
    let vectors = kernel.iter().map(|x| combination(&refs, x).flat()).collect();
    let d = space.basis[0].dim();
    let basis = canonicalize(vectors).into_iter().map(|v| BilinearMap::from_flat(d, &v)).collect();
    MapSpace { basis, labels: None, tolerance: RANK_TOL, origin: None, spectral_gap: smallest_retained_ratio(&sv, RANK_TOL) }
}

/// Maps whose every `a(C, -)` is g-skew-adjoint.
pub fn metric_subspace(space: &MapSpace, split: &ReductiveSplit) -> MapSpace {
    let d = split.dim_m();
    let g = &split.gram;
    restrict(space, |b| {
        let mut out = Vec::with_capacity(d * d * d);
        for c in 0..d {
            for a in 0..d {
                for bb in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += b.coeffs[[c, a, k]] * g[(k, bb)] + g[(a, k)] * b.coeffs[[c, bb, k]];
                    }
                    out.push(s);
                }
            }
        }
        out
    })
}

/// Differences `a - a_lc` over metric `a` that are antisymmetric in their two
/// arguments. The returned space stores `alpha_lc` as its origin.
pub fn skew_torsion_subspace(metric_space: &MapSpace, split: &ReductiveSplit, alpha_lc: &BilinearMap) -> Result<MapSpace> {
    let residual = alpha_lc.metric_residual(&split.gram);
    if residual > 1e-9 {
        return Err(Error::InvalidInput(format!("reference map is not metric (residual {residual:.3e})")));
    }
    let d = split.dim_m();
    let mut out = restrict(metric_space, |b| {
        let mut v = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    v.push(b.coeffs[[i, j, k]] + b.coeffs[[j, i, k]]);
                }
            }
        }
        v
    });
    out.origin = Some(alpha_lc.clone());
    Ok(out)
}

fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let a = DMatrix::from_fn(vectors.len(), vectors[0].len(), |r, c| vectors[r][c]);
    let sv = if a.nrows() <= a.ncols() { a.transpose().singular_values() } else { a.singular_values() };
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| smax > 0.0 && s > tol * smax).count()
}

/// True when the two spans coincide at relative tolerance `tol`.
pub fn span_equal(a: &MapSpace, b: &MapSpace, tol: f64) -> bool {
    if a.ambient_dim() != b.ambient_dim() && !(a.basis.is_empty() && b.basis.is_empty()) {
        return false;
    }
    let va: Vec<Vec<f64>> = a.basis.iter().map(|m| m.flat()).collect();
    let vb: Vec<Vec<f64>> = b.basis.iter().map(|m| m.flat()).collect();
    let ra = rank(&va, tol);
    let rb = rank(&vb, tol);
    let both: Vec<Vec<f64>> = va.into_iter().chain(vb).collect();
    ra == rb && rank(&both, tol) == ra
}

/// A space spanned by the given (not necessarily orthonormal) maps.
pub fn span_of(maps: &[BilinearMap], labels: Option<Vec<String>>) -> MapSpace {
    let d = maps.first().map(|m| m.dim()).unwrap_or(0);
    let basis = canonicalize(maps.iter().map(|m| m.flat()).collect())
        .into_iter()
        .map(|v| BilinearMap::from_flat(d, &v))
        .collect();
    MapSpace { basis, labels, tolerance: RANK_TOL, origin: None, spectral_gap: None }
}

/// Invariant, metric and skew-torsion dimensions for one split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DimensionRow {
    pub n: usize,
    pub invariant: usize,
    pub metric: usize,
    pub skew: usize,
}

/// Computes all three dimensions. The Levi-Civita map is taken as the
/// canonical (zero-torsion) metric representative; the skew space does not
/// depend on that choice.
pub fn dimension_row(split: &ReductiveSplit, alpha_lc: &BilinearMap) -> Result<DimensionRow> {
    let inv = invariant_bilinear_basis(split);
    let met = metric_subspace(&inv, split);
    let skew = skew_torsion_subspace(&met, split, alpha_lc)?;
    Ok(DimensionRow { n: split.n, invariant: inv.dim(), metric: met.dim(), skew: skew.dim() })
}
